//! Shannon entropy and the maximum-entropy constraint identities.

use serde::Serialize;

use super::moments::tol;
use super::EwpsModel;
use crate::error::Result;
use crate::numeric::quadrature::integrate_half_line_with_breaks;

/// The printed Pareto–Poisson entropy expression next to the numeric entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpEntropy {
    pub closed_form: f64,
    pub numeric: f64,
    /// `closed_form − numeric`.
    pub gap: f64,
}

impl EwpsModel {
    /// `∫ φ(x, log f(x)) f(x) dx` over the support.
    pub(crate) fn density_expectation<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut breaks = Vec::new();
        for p in [0.1, 0.5, 0.9, 0.999] {
            breaks.push(self.quantile(p)?);
        }
        let integrand = |x: f64| {
            let lf = self.ln_pdf(x);
            if lf == f64::NEG_INFINITY {
                0.0
            } else {
                phi(x, lf) * lf.exp()
            }
        };
        Ok(integrate_half_line_with_breaks(integrand, self.support_low(), &breaks, tol())?.value)
    }

    /// `E_Y[C′(u) φ(Y)]` with `Y ~ g(·; α, ξ)` and `u = θe^{−αH(Y)}`, scaled by `θ/C(θ)`.
    fn weighted_baseline<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(f64, f64, f64) -> f64,
    {
        let ratio = (self.theta.ln() - self.ln_c_theta).exp();
        let e = self.baseline_expectation(
            self.alpha,
            f64::INFINITY,
            |x, s| {
                let ln_c1 = self.mixer.ln_c1(self.theta * (-s).exp());
                ln_c1.exp() * phi(x, s, ln_c1)
            },
            tol(),
        )?;
        Ok(ratio * e)
    }

    /// `−∫ f log f` by adaptive quadrature.
    pub fn shannon_entropy_numeric(&self) -> Result<f64> {
        self.density_expectation(|_, lf| -lf)
    }

    /// `−log(θα) + log C(θ) − (θ/C)E[C′ log h(Y)] + α(θ/C)E[C′ H(Y)] − (θ/C)E[C′ log C′]`.
    pub fn shannon_entropy_formula(&self) -> Result<f64> {
        let g = self.generator;
        let e_ln_h = self.weighted_baseline(|x, _, _| g.ln_h(x))?;
        let e_h = self.weighted_baseline(|_, s, _| s / self.alpha)?;
        let e_ln_c1 = self.weighted_baseline(|_, _, ln_c1| ln_c1)?;
        Ok(-(self.theta * self.alpha).ln() + self.ln_c_theta - e_ln_h + self.alpha * e_h - e_ln_c1)
    }

    /// Residuals of the three identities `E_X[φ(X)] = (θ/C)E_Y[C′(u) φ(Y)]` for
    /// `φ = log C′(u)`, `log h` and `H`.
    pub fn max_entropy_constraint_residuals(&self) -> Result<[f64; 3]> {
        let g = self.generator;
        let ln_c1_at = |x: f64| self.mixer.ln_c1(self.theta * (-self.alpha * g.h_big(x)).exp());
        let lhs = [
            self.density_expectation(|x, _| ln_c1_at(x))?,
            self.density_expectation(|x, _| g.ln_h(x))?,
            self.density_expectation(|x, _| g.h_big(x))?,
        ];
        let rhs = [
            self.weighted_baseline(|_, _, ln_c1| ln_c1)?,
            self.weighted_baseline(|x, _, _| g.ln_h(x))?,
            self.weighted_baseline(|_, s, _| s / self.alpha)?,
        ];
        Ok([lhs[0] - rhs[0], lhs[1] - rhs[1], lhs[2] - rhs[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::GeneratorKind::*;
    use crate::power_series::PowerSeries;

    #[test]
    fn formula_matches_numeric() {
        for m in [
            EwpsModel::with_params(PowerSeries::Geometric, Exponential, 0.5, 1.0, &[]).unwrap(),
            EwpsModel::with_params(PowerSeries::Poisson, Weibull, 2.0, 1.5, &[0.8]).unwrap(),
            EwpsModel::with_params(PowerSeries::Logarithmic, Chen, 0.7, 1.0, &[2.0]).unwrap(),
            EwpsModel::with_params(PowerSeries::Binomial { trials: 10 }, ModifiedWeibull, 0.4, 1.0, &[1.3, 0.2]).unwrap(),
        ] {
            let a = m.shannon_entropy_numeric().unwrap();
            let b = m.shannon_entropy_formula().unwrap();
            assert!((a - b).abs() < 1e-6, "{m}: {a} vs {b}");
        }
    }

    #[test]
    fn exponential_limit_entropy() {
        for (alpha, expected) in [(1.0, 1.0), (2.0, 1.0 - 2f64.ln())] {
            let m = EwpsModel::with_params(PowerSeries::Poisson, Exponential, 1e-10, alpha, &[]).unwrap();
            assert!((m.shannon_entropy_numeric().unwrap() - expected).abs() < 1e-8);
            assert!((m.shannon_entropy_formula().unwrap() - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn constraint_residuals_vanish() {
        for m in [
            EwpsModel::with_params(PowerSeries::Geometric, Exponential, 0.5, 1.0, &[]).unwrap(),
            EwpsModel::with_params(PowerSeries::Logarithmic, Chen, 0.7, 1.0, &[2.0]).unwrap(),
            EwpsModel::with_params(PowerSeries::Geometric, Weibull, 0.5, 1.0, &[2.0]).unwrap(),
        ] {
            for r in m.max_entropy_constraint_residuals().unwrap() {
                assert!(r.abs() < 1e-6, "{m}: {r}");
            }
        }
    }
}
