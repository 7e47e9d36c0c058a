//! Series and closed forms for two named special cases, used as cross-checks.

use super::entropy::PpEntropy;
use super::{EwpsModel, MixtureTruncation};
use crate::error::{EwpsError, Result};
use crate::generator::GeneratorKind;
use crate::numeric::special::{chi, ln_gamma, shi, EULER_GAMMA};
use crate::power_series::PowerSeries;

/// Coefficients `aᵢ = (−1)^{i+1} i^{i−2} (λ/γ)^{i−1} / (i−1)!`, `i = 1..=depth`,
/// of the inversion `x = Σ aᵢ y^{i/γ}` of `y = x^γ e^{λx}`.
fn inversion_coefficients(gamma: f64, lambda: f64, depth: usize) -> Vec<f64> {
    let ratio = lambda / gamma;
    (1..=depth)
        .map(|i| {
            if i == 1 {
                return 1.0;
            }
            if ratio == 0.0 {
                return 0.0;
            }
            let fi = i as f64;
            let ln_mag = (fi - 2.0) * fi.ln() + (fi - 1.0) * ratio.abs().ln() - ln_gamma(fi);
            let sign_ratio = if ratio < 0.0 && (i - 1) % 2 == 1 { -1.0 } else { 1.0 };
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            sign * sign_ratio * ln_mag.exp()
        })
        .collect()
}

/// `E[Xʳ]` under the geometric mixer with modified-Weibull generator, from the
/// `r`-fold series truncated at `depth` per index.
///
/// The `r`-fold sum over `(i₁ … i_r)` only depends on `s = Σ iⱼ`, so the
/// products `A = Π a_{iⱼ}` are collected by raising the coefficient polynomial
/// to the `r`-th power. Fails with a divergence error when the terms added by
/// the last depth level are not negligible.
pub fn mwg_moment_series(theta: f64, alpha: f64, gamma: f64, lambda: f64, r: u32, depth: usize) -> Result<f64> {
    // validates θ, α, γ and λ
    EwpsModel::with_params(
        PowerSeries::Geometric,
        GeneratorKind::ModifiedWeibull,
        theta,
        alpha,
        &[gamma, lambda],
    )?;
    if r == 0 {
        return Ok(1.0);
    }
    if depth == 0 {
        return Err(EwpsError::Domain("series depth must be at least 1".into()));
    }
    let weights = PowerSeries::Geometric.weights(theta, MixtureTruncation::default().eps_tail, usize::MAX)?;
    let value_at = |d: usize| -> f64 {
        let a = inversion_coefficients(gamma, lambda, d);
        // coefficients of (Σ aᵢ zⁱ)^r, indexed by the exponent s
        let mut poly = vec![1.0];
        for _ in 0..r {
            let mut next = vec![0.0; poly.len() + d];
            for (e, c) in poly.iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                for (i, ai) in a.iter().enumerate() {
                    next[e + i + 1] += c * ai;
                }
            }
            poly = next;
        }
        let mut total = 0.0;
        for (idx, p) in weights.iter().enumerate() {
            let rate = (idx + 1) as f64 * alpha;
            let mut mu = 0.0;
            for (s, b) in poly.iter().enumerate() {
                if *b == 0.0 {
                    continue;
                }
                let q = s as f64 / gamma;
                mu += b * (ln_gamma(q + 1.0) - q * rate.ln()).exp();
            }
            total += p * mu;
        }
        total
    };
    let value = value_at(depth);
    if !value.is_finite() {
        return Err(EwpsError::Divergence("moment series overflowed".into()));
    }
    if depth >= 2 {
        let change = (value - value_at(depth - 1)).abs();
        if change > 1e-6 * value.abs().max(f64::MIN_POSITIVE) {
            return Err(EwpsError::Divergence(format!(
                "moment series not settled at depth {depth}: last level changed the sum by {change:.3e}"
            )));
        }
    }
    Ok(value)
}

/// The printed Pareto–Poisson entropy
/// `log((e^θ−1)/(θα)) − θ/(e^θ−1)·(μ₁ − αμ₂ + μ₃)`, reported with the numeric
/// entropy of the same model and their difference.
pub fn pp_entropy_closed_form(theta: f64, alpha: f64, k: f64) -> Result<PpEntropy> {
    let model = EwpsModel::with_params(PowerSeries::Poisson, GeneratorKind::Pareto, theta, alpha, &[k])?;
    let c = theta.exp_m1();
    let two = 2.0 * theta;
    let kernel = chi(two)? - two.ln() + shi(two)? - EULER_GAMMA;
    let mu1 = (kernel / alpha - two.exp_m1() * k.ln()) / (2.0 * c);
    let mu2 = kernel / (2.0 * alpha * c);
    let mu3 = alpha * theta * k.powf(2.0 * alpha) * (1.0 - (two + 1.0) * two.exp()) / (4.0 * c);
    let closed_form = (c / (theta * alpha)).ln() - theta / c * (mu1 - alpha * mu2 + mu3);
    let numeric = model.shannon_entropy_numeric()?;
    Ok(PpEntropy {
        closed_form,
        numeric,
        gap: closed_form - numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn coefficients_invert_the_generator() {
        // y = x^γ e^{λx}; x = Σ aᵢ (y^{1/γ})ⁱ for small y
        let (gamma, lambda) = (1.5, 0.4);
        let a = inversion_coefficients(gamma, lambda, 30);
        let x: f64 = 0.05;
        let w = (x.powf(gamma) * (lambda * x).exp()).powf(1.0 / gamma);
        let back: f64 = a.iter().enumerate().map(|(i, ai)| ai * w.powi(i as i32 + 1)).sum();
        assert!((back - x).abs() < 1e-14);
    }

    #[test]
    fn lambda_zero_collapse() {
        let v = mwg_moment_series(0.5, 1.0, 2.0, 0.0, 2, 10).unwrap();
        assert!((v - LN_2).abs() < 1e-12);
        let trunc = MixtureTruncation::default();
        for r in 1..=4 {
            let weibull = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::Weibull, 0.3, 2.0, &[1.7])
                .unwrap()
                .raw_moment(r, trunc)
                .unwrap();
            let series = mwg_moment_series(0.3, 2.0, 1.7, 0.0, r, 6).unwrap();
            assert!((series - weibull).abs() < 1e-10 * weibull);
        }
    }

    #[test]
    fn series_matches_quadrature() {
        let series = mwg_moment_series(0.3, 2.0, 1.5, 0.1, 1, 25).unwrap();
        let quad = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::ModifiedWeibull, 0.3, 2.0, &[1.5, 0.1])
            .unwrap()
            .raw_moment(1, MixtureTruncation::default())
            .unwrap();
        assert!((series - quad).abs() < 1e-5 * quad, "{series} vs {quad}");
    }

    #[test]
    fn large_lambda_diverges() {
        let out = mwg_moment_series(0.5, 0.2, 1.0, 3.0, 2, 20);
        assert!(matches!(out, Err(EwpsError::Divergence(_))));
    }

    #[test]
    fn pp_entropy_reports_both_values() {
        let e = pp_entropy_closed_form(0.5, 2.0, 1.0).unwrap();
        assert!(e.closed_form.is_finite() && e.numeric.is_finite());
        assert_eq!(e.gap, e.closed_form - e.numeric);
    }
}
