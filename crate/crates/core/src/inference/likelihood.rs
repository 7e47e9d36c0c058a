//! Log-likelihood with its analytic gradient and Hessian.
//!
//! Per observation, with `u = θe^{−αH(x)}` and `φ(u) = log C′(u)`:
//!
//! ```text
//! ℓᵢ = log θ + log α − log C(θ) − αH + log h + φ(u)
//! ```
//!
//! and the derivatives follow from `φ′ = C″/C′`, `φ″ = C‴/C′ − (C″/C′)²`
//! together with the partials of `u`.

use nalgebra::DMatrix;

use super::params::ParamLayout;
use crate::data::Dataset;
use crate::error::{domain, Result};
use crate::model::EwpsModel;

/// Value, gradient and (optionally) Hessian on the natural scale of `layout`.
pub(crate) struct LikelihoodEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Option<DMatrix<f64>>,
}

fn in_support(model: &EwpsModel, x: f64) -> bool {
    let g = model.generator();
    x >= g.support_low() && x < g.support_ceiling() && x.is_finite()
}

/// Log-likelihood only; `−∞` when an observation is outside the support.
pub(crate) fn loglik_value(model: &EwpsModel, xs: &[f64]) -> f64 {
    let ps = model.mixer();
    let g = model.generator();
    let (theta, alpha) = (model.theta(), model.alpha());
    let n = xs.len() as f64;
    let mut total = n * (theta.ln() + alpha.ln() - ps.ln_c(theta));
    for &x in xs {
        if !in_support(model, x) {
            return f64::NEG_INFINITY;
        }
        let t = alpha * g.h_big(x);
        total += g.ln_h(x) - t + ps.ln_c1(theta * (-t).exp());
    }
    if total.is_nan() {
        f64::NEG_INFINITY
    } else {
        total
    }
}

pub(crate) fn evaluate(layout: &ParamLayout, model: &EwpsModel, xs: &[f64], want_hessian: bool) -> LikelihoodEval {
    let dim = layout.dim();
    let ps = model.mixer();
    let g = model.generator();
    let (theta, alpha) = (model.theta(), model.alpha());
    let n = xs.len() as f64;
    let ia = layout.alpha_index();
    let off = layout.xi_offset();
    let free = layout.xi_free();

    let mut value = n * (theta.ln() + alpha.ln() - ps.ln_c(theta));
    let mut grad = vec![0.0; dim];
    let mut hess = DMatrix::<f64>::zeros(dim, dim);
    grad[0] = n / theta - n * ps.dln_c(theta);
    hess[(0, 0)] = -n / (theta * theta) - n * ps.d2ln_c(theta);
    if let Some(a) = ia {
        grad[a] = n / alpha;
        hess[(a, a)] = -n / (alpha * alpha);
    }

    for &x in xs {
        if !in_support(model, x) {
            return LikelihoodEval {
                value: f64::NEG_INFINITY,
                gradient: vec![f64::NAN; dim],
                hessian: None,
            };
        }
        let pt = g.point(x);
        let h = pt.h_big;
        let t = alpha * h;
        let u = theta * (-t).exp();
        let r2 = ps.ratio2(u);
        value += pt.ln_h - t + ps.ln_c1(u);

        // partials of u
        let u_th = u / theta;
        let u_a = -h * u;
        let u_k = |j: usize| -alpha * pt.d.dh[free[j]] * u;

        grad[0] += r2 * u_th;
        if let Some(a) = ia {
            grad[a] += -h + r2 * u_a;
        }
        for j in 0..free.len() {
            let k = free[j];
            grad[off + j] += pt.d.dlogh[k] - alpha * pt.d.dh[k] + r2 * u_k(j);
        }

        if !want_hessian {
            continue;
        }
        let phi2 = ps.ratio3(u) - r2 * r2;
        hess[(0, 0)] += phi2 * u_th * u_th;
        if let Some(a) = ia {
            let u_tha = -h * u / theta;
            let u_aa = h * h * u;
            hess[(0, a)] += phi2 * u_th * u_a + r2 * u_tha;
            hess[(a, a)] += phi2 * u_a * u_a + r2 * u_aa;
        }
        for j in 0..free.len() {
            let k = free[j];
            let hk = pt.d.dh[k];
            let uk = u_k(j);
            let u_thk = -alpha * hk * u / theta;
            hess[(0, off + j)] += phi2 * u_th * uk + r2 * u_thk;
            if let Some(a) = ia {
                let u_ak = u * hk * (alpha * h - 1.0);
                hess[(a, off + j)] += -hk + phi2 * u_a * uk + r2 * u_ak;
            }
            for l in j..free.len() {
                let m = free[l];
                let hm = pt.d.dh[m];
                let hkm = pt.d.d2h[k][m];
                let u_km = -alpha * hkm * u + alpha * alpha * hk * hm * u;
                hess[(off + j, off + l)] += pt.d.d2logh[k][m] - alpha * hkm + phi2 * uk * u_k(l) + r2 * u_km;
            }
        }
    }
    if want_hessian {
        for r in 0..dim {
            for c in 0..r {
                hess[(r, c)] = hess[(c, r)];
            }
        }
    }
    LikelihoodEval {
        value: if value.is_nan() { f64::NEG_INFINITY } else { value },
        gradient: grad,
        hessian: want_hessian.then_some(hess),
    }
}

fn check_support(model: &EwpsModel, data: &Dataset) -> Result<()> {
    if let Some(x) = data.values().iter().find(|x| !in_support(model, **x)) {
        return domain(format!("observation {x} is outside the support of {model}"));
    }
    Ok(())
}

/// `Σ log f(xᵢ)`; `−∞` if any observation is outside the support.
pub fn log_likelihood(model: &EwpsModel, data: &Dataset) -> f64 {
    loglik_value(model, data.values())
}

/// Analytic gradient of the log-likelihood with respect to the free
/// parameters, ordered as [`ParamLayout::names`].
pub fn score(model: &EwpsModel, data: &Dataset) -> Result<Vec<f64>> {
    check_support(model, data)?;
    let layout = ParamLayout::for_model(model);
    Ok(evaluate(&layout, model, data.values(), false).gradient)
}

/// Observed information `−∇²ℓ` over the free parameters.
pub fn observed_info(model: &EwpsModel, data: &Dataset) -> Result<Vec<Vec<f64>>> {
    check_support(model, data)?;
    let layout = ParamLayout::for_model(model);
    let h = evaluate(&layout, model, data.values(), true)
        .hessian
        .expect("hessian requested");
    Ok((0..h.nrows()).map(|r| (0..h.ncols()).map(|c| -h[(r, c)]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DatasetSource;
    use crate::generator::GeneratorKind;
    use crate::numeric::fd::{central_gradient, central_hessian};
    use crate::power_series::PowerSeries;

    fn data(values: &[f64]) -> Dataset {
        Dataset::new(values.to_vec(), "t", DatasetSource::File).unwrap()
    }

    #[test]
    fn loglik_is_sum_of_log_densities() {
        let m = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::Exponential, 0.5, 1.0, &[]).unwrap();
        let d = data(&[0.2, 0.7, 1.3]);
        let direct: f64 = d.values().iter().map(|x| m.ln_pdf(*x)).sum();
        assert!((log_likelihood(&m, &d) - direct).abs() < 1e-10);
        let single = log_likelihood(&m, &data(&[std::f64::consts::LN_2]));
        assert!((single - -0.810_930_216_216_328_8).abs() < 1e-14);
    }

    #[test]
    fn outside_support_is_minus_infinity() {
        let m = EwpsModel::with_params(PowerSeries::Poisson, GeneratorKind::Pareto, 1.0, 2.0, &[0.5]).unwrap();
        assert_eq!(log_likelihood(&m, &data(&[0.4, 1.0])), f64::NEG_INFINITY);
        assert!(score(&m, &data(&[0.4, 1.0])).is_err());
    }

    #[test]
    fn theta_score_limit_near_zero() {
        // n/θ cancels against nC′/C; the limit is (2a₂/a₁) Σ (e^{−αHᵢ} − 1/2)
        let m = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::Exponential, 1e-9, 1.0, &[]).unwrap();
        for x in [0.01, 0.5, 1.0, 30.0] {
            let s = score(&m, &data(&[x])).unwrap()[0];
            let limit = 2.0 * ((-x).exp() - 0.5);
            assert!((s - limit).abs() < 1e-6, "{x}: {s} vs {limit}");
        }
        let pois = EwpsModel::with_params(PowerSeries::Poisson, GeneratorKind::Exponential, 1e-9, 1.0, &[]).unwrap();
        let s = score(&pois, &data(&[0.2, 3.0])).unwrap()[0];
        assert!((s - ((-0.2f64).exp() + (-3.0f64).exp() - 1.0)).abs() < 1e-6);
    }

    fn check_pair(ps: PowerSeries, kind: GeneratorKind, params: &[f64], xs: &[f64]) {
        let k = (kind == GeneratorKind::Pareto).then(|| xs.iter().copied().fold(f64::INFINITY, f64::min));
        let layout = ParamLayout::new(ps, kind, k).unwrap();
        let model = layout.model(params).unwrap();
        let f = |p: &[f64]| loglik_value(&layout.model(p).unwrap(), xs);
        let eval = evaluate(&layout, &model, xs, true);
        assert!((eval.value - f(params)).abs() < 1e-9 * eval.value.abs().max(1.0));
        let steps: Vec<f64> = params.iter().map(|p| 1e-5 * p.abs().max(1e-3)).collect();
        let fd = central_gradient(f, params, &steps);
        for (a, b) in eval.gradient.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1e-2), "{ps} {kind} grad {a} vs {b}");
        }
        let hsteps: Vec<f64> = params.iter().map(|p| 1e-4 * p.abs().max(1e-3)).collect();
        let fdh = central_hessian(f, params, &hsteps);
        let h = eval.hessian.unwrap();
        for r in 0..params.len() {
            for c in 0..params.len() {
                let scale = 1e-3 * (fdh[r][r] * fdh[c][c]).abs().sqrt();
                let (a, b) = (h[(r, c)], fdh[r][c]);
                assert!((a - b).abs() <= 1e-3 * b.abs().max(scale), "{ps} {kind} H[{r}][{c}] {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let xs = [0.3, 0.55, 0.8, 1.1, 1.4, 0.2, 0.9, 2.1];
        for ps in PowerSeries::all() {
            check_pair(ps, GeneratorKind::Exponential, &[0.4, 1.3], &xs);
            check_pair(ps, GeneratorKind::Weibull, &[0.6, 0.9, 1.7], &xs);
            check_pair(ps, GeneratorKind::ModifiedWeibull, &[0.3, 1.1, 1.4, 0.3], &xs);
            check_pair(ps, GeneratorKind::ModifiedWeibull, &[0.3, 1.1, 1.4, -0.3], &xs);
            check_pair(ps, GeneratorKind::Chen, &[0.7, 0.8, 1.2], &xs);
            check_pair(ps, GeneratorKind::Gompertz, &[0.2, 0.6, 0.8], &xs);
            check_pair(ps, GeneratorKind::ExponentialPower, &[0.5, 0.7, 1.3], &xs);
            check_pair(ps, GeneratorKind::Pareto, &[0.5, 1.6], &xs);
            check_pair(ps, GeneratorKind::Rayleigh, &[0.5, 0.6], &xs);
        }
    }

    #[test]
    fn observed_info_is_symmetric() {
        let m = EwpsModel::with_params(PowerSeries::Logarithmic, GeneratorKind::Chen, 0.7, 0.8, &[1.2]).unwrap();
        let j = observed_info(&m, &data(&[0.3, 0.55, 0.8, 1.1, 1.4])).unwrap();
        for (r, row) in j.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert!((v - j[c][r]).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
