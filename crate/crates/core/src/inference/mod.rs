//! Maximum-likelihood fitting: likelihood and derivatives, EM, quasi-Newton,
//! observed information and model-selection statistics.

mod direct;
mod em;
mod estep;
mod likelihood;
pub mod params;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use estep::{e_step, latent_pmf, LatentPosterior};
pub use likelihood::{log_likelihood, observed_info, score};
pub use params::ParamLayout;
pub use report::{ks_statistic, model_criteria, Criteria, Estimate, FitReport};

use crate::data::Dataset;
use crate::error::{domain, EwpsError, Result};
use crate::generator::GeneratorKind;
use crate::model::EwpsModel;
use crate::power_series::PowerSeries;
use report::Outcome;

/// Loglik tolerance for the EM phase of [`FitMethod::EmThenDirect`].
const EM_PHASE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Em,
    Direct,
    #[default]
    EmThenDirect,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::Em => "em",
            FitMethod::Direct => "direct",
            FitMethod::EmThenDirect => "em_then_direct",
        })
    }
}

impl FromStr for FitMethod {
    type Err = EwpsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "em" => Ok(FitMethod::Em),
            "direct" => Ok(FitMethod::Direct),
            "em_then_direct" => Ok(FitMethod::EmThenDirect),
            _ => Err(EwpsError::Parse(format!("unknown fit method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    pub method: FitMethod,
    pub max_iter: usize,
    /// Stop EM when an iteration gains less than this in log-likelihood.
    pub loglik_tol: f64,
    pub param_tol: f64,
    /// Number of starting points, the first of which is fixed.
    pub multistart: usize,
    pub seed: u64,
    /// θ closer than this to an edge of its domain is reported on the boundary.
    pub boundary_tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            method: FitMethod::EmThenDirect,
            max_iter: 2000,
            loglik_tol: 1e-9,
            param_tol: 1e-8,
            multistart: 8,
            seed: 20_240_601,
            boundary_tol: 1e-3,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        if self.multistart == 0 {
            return domain("multistart must be at least 1");
        }
        for (name, v) in [
            ("loglik_tol", self.loglik_tol),
            ("param_tol", self.param_tol),
            ("boundary_tol", self.boundary_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

fn run_start(layout: &ParamLayout, xs: &[f64], start: &[f64], config: &FitConfig) -> Outcome {
    match config.method {
        FitMethod::Em => em::run_em(layout, xs, start, config.max_iter, config.loglik_tol),
        FitMethod::Direct => direct::run_bfgs(layout, xs, start, config.max_iter),
        FitMethod::EmThenDirect => {
            let em = em::run_em(layout, xs, start, config.max_iter, EM_PHASE_TOL);
            let polish = direct::run_bfgs(layout, xs, &em.params, config.max_iter);
            let mut trace = em.trace;
            trace.extend(polish.trace.iter().skip(1));
            Outcome {
                params: polish.params,
                iterations: em.iterations + polish.iterations,
                converged: polish.converged,
                trace,
            }
        }
    }
}

/// Fits `mixer × kind` to `data` from `config.multistart` starting points,
/// running the starts concurrently and keeping the highest log-likelihood.
///
/// A Pareto threshold is fixed at the sample minimum and a modified-Weibull
/// λ may go negative.
pub fn fit(mixer: PowerSeries, kind: GeneratorKind, data: &Dataset, config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    let xs = data.values();
    if let Some(x) = xs.iter().find(|x| **x <= 0.0) {
        return domain(format!("observations must be positive, found {x}"));
    }
    let layout = ParamLayout::new(mixer, kind, Some(data.min()))?;
    if xs.len() <= layout.dim() {
        return Err(EwpsError::InsufficientData(format!(
            "{} observations for {} free parameters",
            xs.len(),
            layout.dim()
        )));
    }
    let starts = direct::starting_points(&layout, xs, config.multistart, config.seed);
    let outcomes: Vec<Outcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .map(|s| scope.spawn(|| run_start(&layout, xs, s, config)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("fit worker panicked")).collect()
    });
    let best = outcomes
        .into_iter()
        .filter(|o| o.trace.last().is_some_and(|v| v.is_finite()))
        .fold(None::<Outcome>, |best, o| match best {
            Some(b) if b.trace.last() >= o.trace.last() => Some(b),
            _ => Some(o),
        })
        .ok_or_else(|| EwpsError::Convergence("no starting point reached a finite log-likelihood".into()))?;
    Ok(report::assemble(&layout, data, config, best))
}

/// [`fit`] with the EM algorithm alone.
pub fn em_fit(mixer: PowerSeries, kind: GeneratorKind, data: &Dataset, config: &FitConfig) -> Result<FitReport> {
    let config = FitConfig {
        method: FitMethod::Em,
        ..*config
    };
    fit(mixer, kind, data, &config)
}

/// [`fit`] with quasi-Newton ascent alone.
pub fn direct_fit(mixer: PowerSeries, kind: GeneratorKind, data: &Dataset, config: &FitConfig) -> Result<FitReport> {
    let config = FitConfig {
        method: FitMethod::Direct,
        ..*config
    };
    fit(mixer, kind, data, &config)
}

/// Gradient and Hessian of the log-likelihood in the unconstrained
/// coordinates of [`ParamLayout::to_eta`], obtained from the analytic
/// derivatives by the chain rule.
pub fn unconstrained_derivatives(model: &EwpsModel, data: &Dataset) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let layout = ParamLayout::for_model(model);
    let g = score(model, data)?;
    let j = observed_info(model, data)?;
    let params = layout.vector(model);
    let ts = layout.transforms();
    let jac: Vec<f64> = ts.iter().zip(&params).map(|(t, p)| t.jacobian(*p)).collect();
    let dim = params.len();
    let grad = (0..dim).map(|i| g[i] * jac[i]).collect();
    let hess = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    let mut v = -j[r][c] * jac[r] * jac[c];
                    if r == c {
                        v += g[r] * ts[r].curvature(params[r]);
                    }
                    v
                })
                .collect()
        })
        .collect();
    Ok((grad, hess))
}
