fn main() {
    std::process::exit(ewps::cli::run(std::env::args_os()));
}
