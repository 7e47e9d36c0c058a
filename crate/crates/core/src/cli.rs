//! Command-line front end for the `ewps` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::data::{write_atomic, Dataset};
use crate::error::{EwpsError, Result};
use crate::generator::{ExtendedWeibull, GeneratorKind};
use crate::inference::{fit, FitConfig, FitMethod, FitReport};
use crate::model::{EwpsModel, MixtureTruncation};
use crate::power_series::PowerSeries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const PLOT_POINTS: usize = 400;

/// Models compared by `compare --reference-models` on the phosphorus data.
pub const REFERENCE_MODELS: [(&str, &str); 6] = [
    ("geometric", "modified_weibull"),
    ("geometric", "weibull"),
    ("poisson", "gompertz"),
    ("poisson", "pareto"),
    ("poisson", "chen"),
    ("logarithmic", "chen"),
];

#[derive(Debug, Parser)]
#[command(
    name = "ewps",
    version,
    about = "Extended Weibull power series lifetime distributions: describe, fit, compare, simulate, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Descriptive statistics of a dataset.
    Describe(DataArgs),
    /// Fit one model by maximum likelihood and write a JSON report and plot table.
    Fit(FitArgs),
    /// Fit several models and rank them by AIC.
    Compare(CompareArgs),
    /// Draw a sample from a fully specified model.
    Simulate(SimulateArgs),
    /// Evaluate distribution functions, quantiles, moments or entropy.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Data file: one value per line, '#' comments, optional header line.
    /// Defaults to the embedded phosphorus dataset.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitOptions {
    /// em, direct or em_then_direct.
    #[arg(long, default_value = "em_then_direct")]
    method: String,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Stop EM when one iteration gains less than this.
    #[arg(long, default_value_t = 1e-9)]
    loglik_tol: f64,
    /// Number of starting points.
    #[arg(long, default_value_t = 8)]
    multistart: usize,
    #[arg(long, default_value_t = FitConfig::default().seed)]
    seed: u64,
    /// θ closer than this to a domain edge is flagged as on the boundary.
    #[arg(long, default_value_t = 1e-3)]
    boundary_tol: f64,
}

impl FitOptions {
    fn config(&self) -> Result<FitConfig> {
        let config = FitConfig {
            method: self.method.parse::<FitMethod>()?,
            max_iter: self.max_iter,
            loglik_tol: self.loglik_tol,
            multistart: self.multistart,
            seed: self.seed,
            boundary_tol: self.boundary_tol,
            ..FitConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// poisson, logarithmic, geometric, binomial or binomial:<m>.
    #[arg(long)]
    mixer: String,
    /// exponential, weibull, modified_weibull, pareto, gompertz, rayleigh,
    /// chen or exponential_power.
    #[arg(long)]
    generator: String,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    options: FitOptions,
    /// Where to write the JSON report; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where to write the plot table (x,pdf,cdf,ecdf over 400 points).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// A model as MIXER:GENERATOR, e.g. logarithmic:chen; repeatable.
    #[arg(long = "model")]
    models: Vec<String>,
    /// Add the six models MWG, WG, GP, PP, CP and CL.
    #[arg(long)]
    reference_models: bool,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    options: FitOptions,
    /// Also write the table as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    mixer: String,
    #[arg(long)]
    generator: String,
    #[arg(long)]
    theta: f64,
    /// Required unless the generator fixes α = 1.
    #[arg(long)]
    alpha: Option<f64>,
    /// Generator parameter as name=value, e.g. gamma=1.5; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

impl ModelArgs {
    fn model(&self) -> Result<EwpsModel> {
        let mixer: PowerSeries = self.mixer.parse()?;
        let kind: GeneratorKind = self.generator.parse()?;
        let names = kind.xi_names();
        let mut xi = vec![f64::NAN; names.len()];
        for spec in &self.params {
            let (name, value) = spec
                .split_once('=')
                .ok_or_else(|| EwpsError::Parse(format!("expected NAME=VALUE, got '{spec}'")))?;
            let idx = names
                .iter()
                .position(|n| *n == name.trim())
                .ok_or_else(|| EwpsError::Parse(format!("{kind} has no parameter '{name}' (expects {names:?})")))?;
            xi[idx] = value
                .trim()
                .parse()
                .map_err(|_| EwpsError::Parse(format!("'{value}' is not a number")))?;
        }
        if let Some(i) = xi.iter().position(|v| v.is_nan()) {
            return Err(EwpsError::Parse(format!("missing --param {}=<value>", names[i])));
        }
        let alpha = match (kind.alpha_role(), self.alpha) {
            (crate::generator::AlphaRole::FixedToOne, None) => 1.0,
            (_, Some(a)) => a,
            (_, None) => return Err(EwpsError::Parse(format!("{kind} needs --alpha"))),
        };
        let g = if kind == GeneratorKind::ModifiedWeibull {
            ExtendedWeibull::new_relaxed(kind, &xi)?
        } else {
            ExtendedWeibull::new(kind, &xi)?
        };
        EwpsModel::new(mixer, g, self.theta, alpha)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Sample size.
    #[arg(short = 'n', long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file, one value per line.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    /// Evenly spaced points as LO:HI:COUNT.
    #[arg(long)]
    grid: Option<String>,
    /// Columns to evaluate on the points: pdf, cdf, survival, hazard.
    #[arg(long, value_delimiter = ',', default_value = "pdf,cdf,survival,hazard")]
    functions: Vec<String>,
    /// Comma-separated probabilities for the quantile table.
    #[arg(long, value_delimiter = ',')]
    quantiles: Vec<f64>,
    /// Orders of raw moments to print.
    #[arg(long, value_delimiter = ',')]
    moments: Vec<u32>,
    /// Print the Shannon entropy.
    #[arg(long)]
    entropy: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Describe(a) => describe(&a),
        Command::Fit(a) => fit_command(&a),
        Command::Compare(a) => compare(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Eval(a) => eval(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Input problems map to the usage code, everything else to the numerical one.
pub fn exit_code(e: &EwpsError) -> i32 {
    match e {
        EwpsError::Parse(_) | EwpsError::Io(_) | EwpsError::InsufficientData(_) | EwpsError::Domain(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn load(args: &DataArgs) -> Result<Dataset> {
    match &args.data {
        Some(path) => Dataset::read(path),
        None => Ok(Dataset::phosphorus()),
    }
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn describe(args: &DataArgs) -> Result<i32> {
    let data = load(args)?;
    print(&to_json(&json!({
        "label": data.label(),
        "source": data.source(),
        "summary": data.describe(),
    })))?;
    Ok(EXIT_OK)
}

fn trace_summary(trace: &[f64]) -> Value {
    json!({
        "length": trace.len(),
        "first": trace.first(),
        "last": trace.last(),
        "non_decreasing": trace.windows(2).all(|w| w[1] >= w[0] - 1e-10),
    })
}

/// The report document: the fit report with its trace summarised, plus the
/// dataset and configuration used.
pub fn report_document(report: &FitReport, data: &Dataset, config: &FitConfig) -> Value {
    let mut doc = serde_json::to_value(report).expect("serialisable");
    let obj = doc.as_object_mut().expect("report is an object");
    obj.remove("trace");
    obj.insert("trace_summary".into(), trace_summary(&report.trace));
    obj.insert("data".into(), json!({"label": data.label(), "source": data.source(), "n": data.len()}));
    obj.insert("config".into(), serde_json::to_value(config).expect("serialisable"));
    doc
}

/// `x,pdf,cdf,ecdf` on `PLOT_POINTS` evenly spaced points over the data range.
pub fn plot_table(model: &EwpsModel, data: &Dataset) -> String {
    let sorted = data.sorted();
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let n = sorted.len() as f64;
    let mut out = String::from("x,pdf,cdf,ecdf\n");
    for i in 0..PLOT_POINTS {
        let x = if i + 1 == PLOT_POINTS {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (PLOT_POINTS - 1) as f64
        };
        let ecdf = sorted.partition_point(|v| *v <= x) as f64 / n;
        out.push_str(&format!("{x},{},{},{ecdf}\n", model.pdf(x), model.cdf(x)));
    }
    out
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => print(text),
    }
}

fn fit_command(args: &FitArgs) -> Result<i32> {
    let mixer: PowerSeries = args.mixer.parse()?;
    let kind: GeneratorKind = args.generator.parse()?;
    let config = args.options.config()?;
    let data = load(&args.data)?;
    let report = fit(mixer, kind, &data, &config)?;
    write_or_print(args.report.as_deref(), &to_json(&report_document(&report, &data, &config)))?;
    if let Some(p) = &args.plot {
        write_atomic(p, plot_table(&report.model, &data).as_bytes())?;
    }
    if !report.converged {
        eprintln!("error: fit did not converge within {} iterations", report.iterations);
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct CompareRow {
    model: String,
    neg2loglik: Option<f64>,
    aic: Option<f64>,
    bic: Option<f64>,
    aicc: Option<f64>,
    caic: Option<f64>,
    ks: Option<f64>,
    converged: bool,
    error: Option<String>,
}

fn parse_model_spec(spec: &str) -> Result<(PowerSeries, GeneratorKind)> {
    let (m, g) = spec
        .rsplit_once(':')
        .ok_or_else(|| EwpsError::Parse(format!("expected MIXER:GENERATOR, got '{spec}'")))?;
    Ok((m.parse()?, g.parse()?))
}

fn compare(args: &CompareArgs) -> Result<i32> {
    let mut specs = Vec::new();
    if args.reference_models {
        specs.extend(REFERENCE_MODELS.iter().map(|(m, g)| format!("{m}:{g}")));
    }
    specs.extend(args.models.iter().cloned());
    if specs.len() < 2 {
        return Err(EwpsError::Parse("compare needs at least two models".into()));
    }
    let models = specs.iter().map(|s| parse_model_spec(s)).collect::<Result<Vec<_>>>()?;
    let config = args.options.config()?;
    let data = load(&args.data)?;
    let fits: Vec<Result<FitReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .map(|(m, g)| {
                let (data, config) = (&data, &config);
                scope.spawn(move || fit(*m, *g, data, config))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fit worker panicked")).collect()
    });
    let mut rows: Vec<CompareRow> = models
        .iter()
        .zip(fits)
        .map(|((m, g), r)| {
            let model = format!("{m}:{g}");
            match r {
                Ok(r) => CompareRow {
                    model,
                    neg2loglik: Some(r.neg2loglik),
                    aic: Some(r.criteria.aic),
                    bic: Some(r.criteria.bic),
                    aicc: r.criteria.aicc,
                    caic: Some(r.criteria.caic),
                    ks: Some(r.ks),
                    converged: r.converged,
                    error: None,
                },
                Err(e) => CompareRow {
                    model,
                    neg2loglik: None,
                    aic: None,
                    bic: None,
                    aicc: None,
                    caic: None,
                    ks: None,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.aic.unwrap_or(f64::INFINITY).total_cmp(&b.aic.unwrap_or(f64::INFINITY)));

    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    let mut table = format!(
        "{:<30} {:>11} {:>11} {:>11} {:>11} {:>11} {:>8} {:>9}\n",
        "model", "-2loglik", "AIC", "BIC", "AICC", "CAIC", "K-S", "converged"
    );
    for r in &rows {
        table.push_str(&format!(
            "{:<30} {:>11} {:>11} {:>11} {:>11} {:>11} {:>8} {:>9}",
            r.model,
            cell(r.neg2loglik),
            cell(r.aic),
            cell(r.bic),
            cell(r.aicc),
            cell(r.caic),
            cell(r.ks),
            r.converged
        ));
        if let Some(e) = &r.error {
            table.push_str(&format!("  error: {e}"));
        }
        table.push('\n');
    }
    print(&table)?;
    if let Some(p) = &args.json {
        write_atomic(p, to_json(&rows).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn simulate(args: &SimulateArgs) -> Result<i32> {
    let model = args.model.model()?;
    let data = model.sample(args.n as usize, args.seed)?;
    data.write(&args.output)?;
    print(&to_json(&json!({
        "model": model.to_string(),
        "seed": args.seed,
        "output": args.output.display().to_string(),
        "summary": data.describe(),
    })))?;
    Ok(EXIT_OK)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || EwpsError::Parse(format!("expected LO:HI:COUNT, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !(lo <= hi) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 })
        .collect())
}

fn eval(args: &EvalArgs) -> Result<i32> {
    let model = args.model.model()?;
    let mut points = args.x.clone();
    if let Some(g) = &args.grid {
        points.extend(parse_grid(g)?);
    }
    let mut out = String::new();
    if !points.is_empty() {
        for f in &args.functions {
            if !matches!(f.as_str(), "pdf" | "cdf" | "survival" | "hazard") {
                return Err(EwpsError::Parse(format!("unknown function '{f}'")));
            }
        }
        out.push_str(&format!("x,{}\n", args.functions.join(",")));
        for x in &points {
            let cols: Vec<String> = args
                .functions
                .iter()
                .map(|f| {
                    let v = match f.as_str() {
                        "pdf" => model.pdf(*x),
                        "cdf" => model.cdf(*x),
                        "survival" => model.survival(*x),
                        _ => model.hazard(*x),
                    };
                    v.to_string()
                })
                .collect();
            out.push_str(&format!("{x},{}\n", cols.join(",")));
        }
    }
    if !args.quantiles.is_empty() {
        out.push_str("p,quantile\n");
        for p in &args.quantiles {
            out.push_str(&format!("{p},{}\n", model.quantile(*p)?));
        }
    }
    for r in &args.moments {
        out.push_str(&format!("moment_{r} = {}\n", model.raw_moment(*r, MixtureTruncation::default())?));
    }
    if args.entropy {
        out.push_str(&format!("entropy = {}\n", model.shannon_entropy_numeric()?));
    }
    if out.is_empty() {
        return Err(EwpsError::Parse(
            "nothing to evaluate: give --x, --grid, --quantiles, --moments or --entropy".into(),
        ));
    }
    print(&out)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn model_specs() {
        assert_eq!(
            parse_model_spec("binomial:5:chen").unwrap(),
            (PowerSeries::binomial(5).unwrap(), GeneratorKind::Chen)
        );
        assert!(parse_model_spec("geometric").is_err());
    }

    #[test]
    fn plot_covers_data_range() {
        let d = Dataset::phosphorus();
        let m = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::Weibull, 0.5, 100.0, &[3.0]).unwrap();
        let table = plot_table(&m, &d);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), PLOT_POINTS + 1);
        assert!(lines[1].starts_with("0.05,"));
        assert!(lines[PLOT_POINTS].starts_with("0.28,"));
        assert!(lines[PLOT_POINTS].ends_with(",1"));
    }
}
