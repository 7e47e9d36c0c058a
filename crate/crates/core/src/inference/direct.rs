//! Quasi-Newton maximisation over unconstrained coordinates, and starting points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::likelihood::evaluate;
use super::params::ParamLayout;
use super::report::Outcome;
use crate::generator::GeneratorKind;
use crate::numeric::optim::{minimize, BfgsOptions};

/// Objective `−ℓ/n` and its gradient at unconstrained point `eta`; `+∞`
/// outside the admissible region.
fn objective(layout: &ParamLayout, xs: &[f64], eta: &[f64]) -> (f64, Vec<f64>) {
    let ts = layout.transforms();
    let infeasible = (f64::INFINITY, vec![0.0; eta.len()]);
    if ts.iter().zip(eta).any(|(t, e)| !t.in_bounds(*e)) {
        return infeasible;
    }
    let params = layout.from_eta(eta);
    let Ok(model) = layout.model(&params) else {
        return infeasible;
    };
    let eval = evaluate(layout, &model, xs, false);
    if !eval.value.is_finite() {
        return infeasible;
    }
    let n = xs.len() as f64;
    let grad = eval
        .gradient
        .iter()
        .zip(&ts)
        .zip(&params)
        .map(|((g, t), p)| -g * t.jacobian(*p) / n)
        .collect();
    (-eval.value / n, grad)
}

pub(crate) fn run_bfgs(layout: &ParamLayout, xs: &[f64], start: &[f64], max_iter: usize) -> Outcome {
    let n = xs.len() as f64;
    let eta0 = layout.to_eta(start);
    let opts = BfgsOptions {
        max_iter,
        ..BfgsOptions::default()
    };
    let min = minimize(|eta| objective(layout, xs, eta), &eta0, opts);
    Outcome {
        params: layout.from_eta(&min.x),
        iterations: min.iterations,
        converged: min.converged,
        trace: min.trace.iter().map(|f| -f * n).collect(),
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// `count` starting points: a fixed central one followed by random draws.
/// Shape parameters are drawn log-uniformly, scale-like ones relative to the
/// sample mean, and α is set to the exponential-case estimate `n / Σ H(xᵢ)`.
pub(crate) fn starting_points(layout: &ParamLayout, xs: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let xmax = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bounded = layout.mixer().theta_domain().1.is_finite();
    let kind = layout.kind();
    let mut starts = Vec::with_capacity(count);
    for i in 0..count.max(1) {
        let central = i == 0;
        let theta = match (central, bounded) {
            (true, true) => 0.5,
            (true, false) => 1.0,
            (false, true) => 1.0 / (1.0 + (-rng.gen_range(-4.0..4.0f64)).exp()),
            (false, false) => rng.gen_range(-3.0..3.0f64).exp(),
        };
        let shape = |rng: &mut ChaCha8Rng, lo: f64, hi: f64, fixed: f64| {
            if central {
                fixed
            } else {
                log_uniform(rng, lo, hi)
            }
        };
        let xi: Vec<f64> = match kind {
            GeneratorKind::Exponential | GeneratorKind::Rayleigh | GeneratorKind::Pareto => vec![],
            GeneratorKind::Weibull | GeneratorKind::Chen => vec![shape(&mut rng, 0.3, 10.0, 1.5)],
            GeneratorKind::ModifiedWeibull => {
                let gamma = shape(&mut rng, 0.3, 10.0, 1.5);
                let lambda = if central { 0.0 } else { rng.gen_range(-0.9..2.0) * gamma / xmax };
                vec![gamma, lambda]
            }
            GeneratorKind::Gompertz => vec![shape(&mut rng, 0.1, 30.0, 1.0) / mean],
            GeneratorKind::ExponentialPower => {
                let lambda = shape(&mut rng, 0.3, 3.0, 1.0) / mean;
                vec![lambda, shape(&mut rng, 0.3, 5.0, 1.0)]
            }
        };
        let mut params = vec![theta];
        if layout.alpha_free() {
            params.push(1.0);
        }
        params.extend(layout.xi_free().iter().map(|&k| xi[k]));
        if let Some(a) = layout.alpha_index() {
            if let Ok(model) = layout.model(&params) {
                let g = model.generator();
                let s: f64 = xs.iter().map(|x| g.h_big(*x)).sum();
                let alpha = n / s;
                if alpha.is_finite() && alpha > 0.0 {
                    params[a] = alpha.clamp(1e-20, 1e20);
                }
            }
        }
        // keep the start strictly inside the artificial bounds
        params = layout.from_eta(&layout.to_eta(&params));
        starts.push(params);
    }
    starts
}
