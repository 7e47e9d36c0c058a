//! Special functions not covered by `statrs`.

use super::quadrature::{integrate, Tolerance};
use crate::error::Result;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

pub use statrs::function::gamma::{gamma, ln_gamma};

/// `sinh(t)/t`, continuous at zero.
fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 + t * t / 6.0
    } else {
        t.sinh() / t
    }
}

/// `(cosh(t) − 1)/t`, continuous at zero.
fn cosh_minus_one_over(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        t / 2.0 + t * t * t / 24.0
    } else {
        // cosh t − 1 = 2 sinh²(t/2) avoids cancellation
        2.0 * (0.5 * t).sinh().powi(2) / t
    }
}

/// Hyperbolic sine integral `Shi(z) = ∫_0^z sinh(t)/t dt`.
pub fn shi(z: f64) -> Result<f64> {
    Ok(integrate(sinhc, 0.0, z, Tolerance::tight())?.value)
}

/// Hyperbolic cosine integral `Chi(z) = γ + ln z + ∫_0^z (cosh t − 1)/t dt`, `z > 0`.
pub fn chi(z: f64) -> Result<f64> {
    let tail = integrate(cosh_minus_one_over, 0.0, z, Tolerance::tight())?.value;
    Ok(EULER_GAMMA + z.ln() + tail)
}

/// ln of the binomial coefficient `C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Binomial coefficient as a float, exact for the small arguments used here.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Full Taylor series Σ z^{2k+1} / ((2k+1)(2k+1)!).
    fn shi_series(z: f64) -> f64 {
        let mut sum = 0.0;
        let mut power_over_fact = z; // z^{2k+1}/(2k+1)!
        for k in 0..40 {
            let m = (2 * k + 1) as f64;
            sum += power_over_fact / m;
            power_over_fact *= z * z / ((m + 1.0) * (m + 2.0));
        }
        sum
    }

    #[test]
    fn shi_matches_taylor_series() {
        let z = 0.5;
        let s = shi(z).unwrap();
        assert!((s - shi_series(z)).abs() < 1e-10);
        // the leading three terms alone already sit within 3e-7
        assert!((s - (z + z.powi(3) / 18.0 + z.powi(5) / 600.0)).abs() < 3e-7);
    }

    #[test]
    fn chi_small_argument_limit() {
        for z in [1e-3, 1e-5, 1e-7] {
            let c = chi(z).unwrap();
            assert!((c - z.ln() - EULER_GAMMA).abs() < z);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(4, 5), 0.0);
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-12);
    }
}
