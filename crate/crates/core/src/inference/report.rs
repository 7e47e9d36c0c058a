//! Goodness of fit, information criteria and the assembled fit report.

use nalgebra::DMatrix;
use serde::Serialize;

use super::likelihood::evaluate;
use super::params::ParamLayout;
use super::{FitConfig, FitMethod};
use crate::data::Dataset;
use crate::generator::GeneratorKind;
use crate::model::EwpsModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criteria {
    pub aic: f64,
    pub bic: f64,
    /// Absent when `n ≤ p + 1`.
    pub aicc: Option<f64>,
    pub caic: f64,
}

/// AIC, BIC, AICC and CAIC for `p` free parameters and `n` observations.
pub fn model_criteria(loglik: f64, p: usize, n: usize) -> Criteria {
    let (pf, nf) = (p as f64, n as f64);
    let aic = -2.0 * loglik + 2.0 * pf;
    Criteria {
        aic,
        bic: -2.0 * loglik + pf * nf.ln(),
        aicc: (n > p + 1).then(|| aic + 2.0 * pf * (pf + 1.0) / (nf - pf - 1.0)),
        caic: -2.0 * loglik + pf * (nf.ln() + 1.0),
    }
}

/// Kolmogorov–Smirnov distance between the empirical cdf of `data` and the model cdf.
pub fn ks_statistic(model: &EwpsModel, data: &Dataset) -> f64 {
    let sorted = data.sorted();
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = model.cdf(*x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    /// Wald standard error; absent for fixed or boundary parameters and when
    /// the information matrix is not positive definite.
    pub std_error: Option<f64>,
    /// Held fixed during fitting (Pareto threshold, α of fixed-α generators).
    pub fixed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub mixer: String,
    pub generator: String,
    pub method: FitMethod,
    pub estimates: Vec<Estimate>,
    pub loglik: f64,
    pub neg2loglik: f64,
    /// Observed information over the free parameters, in estimate order.
    pub info_matrix: Vec<Vec<f64>>,
    pub info_positive_definite: bool,
    pub criteria: Criteria,
    pub ks: f64,
    pub n: usize,
    pub p: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each iteration of the winning start.
    pub trace: Vec<f64>,
    pub boundary_flags: Vec<String>,
    /// The modified-Weibull λ estimate is negative, outside the usual domain.
    pub relaxed_domain: bool,
    #[serde(skip)]
    pub model: EwpsModel,
}

impl FitReport {
    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.estimate(name).and_then(|e| e.std_error)
    }
}

/// Names of free coordinates on a domain edge: θ within `tol` of an edge of
/// its domain, or any unconstrained coordinate pinned at its artificial bound.
pub(crate) fn boundary_flags(layout: &ParamLayout, params: &[f64], tol: f64) -> Vec<bool> {
    let (_, hi) = layout.mixer().theta_domain();
    let eta = layout.to_eta(params);
    let mut flags: Vec<bool> = layout
        .transforms()
        .iter()
        .zip(&eta)
        .map(|(t, e)| t.at_bound(*e))
        .collect();
    let theta = params[0];
    flags[0] |= theta < tol || (hi.is_finite() && theta > hi - tol);
    flags
}

pub(crate) struct Outcome {
    pub params: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

pub(crate) fn assemble(layout: &ParamLayout, data: &Dataset, config: &FitConfig, out: Outcome) -> FitReport {
    let model = layout.model(&out.params).expect("fitted parameters are valid");
    let xs = data.values();
    let eval = evaluate(layout, &model, xs, true);
    let p = layout.dim();
    let n = xs.len();
    let info = -eval.hessian.unwrap_or_else(|| DMatrix::from_element(p, p, f64::NAN));
    let inverse = info.clone().cholesky().map(|c| c.inverse());
    let flags = boundary_flags(layout, &out.params, config.boundary_tol);
    let names = layout.names();

    let mut estimates: Vec<Estimate> = names
        .iter()
        .enumerate()
        .map(|(i, name)| Estimate {
            name: name.clone(),
            value: out.params[i],
            std_error: match &inverse {
                Some(inv) if !flags[i] && inv[(i, i)] > 0.0 => Some(inv[(i, i)].sqrt()),
                _ => None,
            },
            fixed: false,
        })
        .collect();
    if !layout.alpha_free() {
        estimates.insert(
            1,
            Estimate {
                name: "alpha".into(),
                value: 1.0,
                std_error: None,
                fixed: true,
            },
        );
    }
    if layout.kind() == GeneratorKind::Pareto {
        estimates.push(Estimate {
            name: "k".into(),
            value: model.xi()[0],
            std_error: None,
            fixed: true,
        });
    }

    let loglik = eval.value;
    FitReport {
        mixer: layout.mixer().to_string(),
        generator: layout.kind().to_string(),
        method: config.method,
        estimates,
        loglik,
        neg2loglik: -2.0 * loglik,
        info_matrix: (0..p).map(|r| (0..p).map(|c| info[(r, c)]).collect()).collect(),
        info_positive_definite: inverse.is_some(),
        criteria: model_criteria(loglik, p, n),
        ks: ks_statistic(&model, data),
        n,
        p,
        iterations: out.iterations,
        converged: out.converged,
        trace: out.trace,
        boundary_flags: names.into_iter().zip(flags).filter(|(_, f)| *f).map(|(n, _)| n).collect(),
        relaxed_domain: layout.kind() == GeneratorKind::ModifiedWeibull && model.xi()[1] < 0.0,
        model,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DatasetSource;
    use crate::power_series::PowerSeries;

    #[test]
    fn criteria_values() {
        let c = model_criteria(200.9, 3, 128);
        assert!((c.aic - -395.8).abs() < 1e-9);
        assert!((c.bic - -387.243_909_208_241_2).abs() < 1e-9);
        assert_eq!(model_criteria(-12.0, 0, 10).aic, 24.0);
        assert!(model_criteria(1.0, 3, 4).aicc.is_none());
    }

    #[test]
    fn ks_single_point() {
        let m = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::Exponential, 0.5, 1.0, &[]).unwrap();
        let x = m.quantile(0.5).unwrap();
        let d = Dataset::new(vec![x], "one", DatasetSource::File).unwrap();
        assert!((ks_statistic(&m, &d) - 0.5).abs() < 1e-12);
    }
}
