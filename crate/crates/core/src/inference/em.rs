//! Expectation–conditional-maximisation iterations.
//!
//! Given `zᵢ = E(Z | xᵢ)`, the complete-data log-likelihood separates into
//! `n log α − α Σ zᵢHᵢ` (closed form in α), `Σ zᵢ log θ − n log C(θ)`
//! (maximised where `θC′(θ)/C(θ) = z̄`) and `Σ log hᵢ − α Σ zᵢHᵢ` in ξ. The ξ
//! step uses the updated α and only accepts increases, so the observed
//! log-likelihood never decreases. Iterations are accelerated by squared
//! extrapolation, guarded so that the ascent property is kept.

use nalgebra::{DMatrix, DVector};

use super::estep::z_values;
use super::likelihood::loglik_value;
use super::params::ParamLayout;
use super::report::Outcome;
use crate::numeric::roots::brent;
use crate::power_series::PowerSeries;

const THETA_FLOOR: f64 = 1e-10;
const THETA_CEIL_BOUNDED: f64 = 1.0 - 1e-12;
const THETA_CEIL_POISSON: f64 = 700.0;
const XI_NEWTON_STEPS: usize = 20;

/// Maximiser of `z̄ log θ − log C(θ)` over the working θ range.
fn theta_update(ps: PowerSeries, zbar: f64) -> f64 {
    let hi = if ps.theta_domain().1.is_finite() {
        THETA_CEIL_BOUNDED
    } else {
        THETA_CEIL_POISSON
    };
    let f = |t: f64| ps.mean_count(t) - zbar;
    if f(THETA_FLOOR) >= 0.0 {
        return THETA_FLOOR;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    brent(f, THETA_FLOOR, hi, 1e-14, 500).unwrap_or(hi)
}

/// `Σ log h(xᵢ; ξ) − α Σ zᵢ H(xᵢ; ξ)` with its gradient and Hessian in the
/// unconstrained ξ coordinates.
struct XiObjective<'a> {
    layout: &'a ParamLayout,
    xs: &'a [f64],
    z: &'a [f64],
    alpha: f64,
    /// θ, α slots of the parameter vector; ξ is appended.
    head: Vec<f64>,
}

impl XiObjective<'_> {
    fn params(&self, xi_eta: &[f64]) -> Vec<f64> {
        let mut p = self.head.clone();
        let ts = self.layout.transforms();
        let off = self.layout.xi_offset();
        p.extend(xi_eta.iter().enumerate().map(|(j, e)| ts[off + j].inverse(*e)));
        p
    }

    fn value(&self, xi_eta: &[f64]) -> f64 {
        let ts = self.layout.transforms();
        let off = self.layout.xi_offset();
        if xi_eta.iter().enumerate().any(|(j, e)| !ts[off + j].in_bounds(*e)) {
            return f64::NEG_INFINITY;
        }
        let Ok(model) = self.layout.model(&self.params(xi_eta)) else {
            return f64::NEG_INFINITY;
        };
        let g = model.generator();
        let mut q = 0.0;
        for (x, z) in self.xs.iter().zip(self.z) {
            if !(*x >= g.support_low() && *x < g.support_ceiling()) {
                return f64::NEG_INFINITY;
            }
            q += g.ln_h(*x) - self.alpha * z * g.h_big(*x);
        }
        if q.is_nan() {
            f64::NEG_INFINITY
        } else {
            q
        }
    }

    fn derivatives(&self, xi_eta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let free = self.layout.xi_free();
        let q = free.len();
        let params = self.params(xi_eta);
        let model = self.layout.model(&params).expect("current point is valid");
        let g = model.generator();
        let mut grad = DVector::<f64>::zeros(q);
        let mut hess = DMatrix::<f64>::zeros(q, q);
        for (x, z) in self.xs.iter().zip(self.z) {
            let d = g.point(*x).d;
            for j in 0..q {
                let k = free[j];
                grad[j] += d.dlogh[k] - self.alpha * z * d.dh[k];
                for l in 0..q {
                    let m = free[l];
                    hess[(j, l)] += d.d2logh[k][m] - self.alpha * z * d.d2h[k][m];
                }
            }
        }
        let ts = self.layout.transforms();
        let off = self.layout.xi_offset();
        let jac: Vec<f64> = (0..q).map(|j| ts[off + j].jacobian(params[off + j])).collect();
        let mut h_eta = DMatrix::<f64>::zeros(q, q);
        for j in 0..q {
            for l in 0..q {
                h_eta[(j, l)] = jac[j] * hess[(j, l)] * jac[l];
            }
            h_eta[(j, j)] += grad[j] * ts[off + j].curvature(params[off + j]);
        }
        let g_eta = DVector::from_iterator(q, (0..q).map(|j| grad[j] * jac[j]));
        (g_eta, h_eta)
    }

    /// Damped Newton ascent from `start`; falls back to scaled gradient steps
    /// where the objective is not locally concave.
    fn maximise(&self, start: &[f64]) -> Vec<f64> {
        let mut eta = start.to_vec();
        let mut q = self.value(&eta);
        if !q.is_finite() {
            return eta;
        }
        for _ in 0..XI_NEWTON_STEPS {
            let (g, h) = self.derivatives(&eta);
            if g.iter().any(|v| !v.is_finite()) {
                break;
            }
            let neg_h = -h.clone();
            let dir = match neg_h.clone().cholesky() {
                Some(c) => c.solve(&g),
                None => {
                    let scale = h.diagonal().iter().map(|v| v.abs()).fold(1e-12, f64::max);
                    &g / scale
                }
            };
            // predicted ascent of a full step; below rounding level nothing is left to gain
            if g.dot(&dir) < 1e-14 * q.abs().max(1.0) {
                break;
            }
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = eta.iter().zip(dir.iter()).map(|(e, d)| e + step * d).collect();
                let qt = self.value(&trial);
                if qt > q {
                    let gain = qt - q;
                    eta = trial;
                    q = qt;
                    improved = gain > 1e-15 * q.abs().max(1.0);
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        eta
    }
}

/// One ECM map: E-step at `params`, then the α, θ and ξ updates.
fn em_map(layout: &ParamLayout, xs: &[f64], params: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = xs.len() as f64;
    let off = layout.xi_offset();
    let ts = layout.transforms();
    let model = layout.model(params).ok()?;
    let z = z_values(&model, xs);
    let g = model.generator();
    let mut next = params.to_vec();

    let alpha = if let Some(a) = layout.alpha_index() {
        let s: f64 = xs.iter().zip(&z).map(|(x, zi)| zi * g.h_big(*x)).sum();
        let candidate = n / s;
        if candidate.is_finite() && candidate > 0.0 {
            next[a] = ts[a].inverse(ts[a].clamp(ts[a].forward(candidate)));
        }
        next[a]
    } else {
        1.0
    };
    next[0] = theta_update(layout.mixer(), z.iter().sum::<f64>() / n);

    if !layout.xi_free().is_empty() {
        let objective = XiObjective {
            layout,
            xs,
            z: &z,
            alpha,
            head: next[..off].to_vec(),
        };
        let eta0: Vec<f64> = (off..params.len()).map(|i| ts[i].forward(params[i])).collect();
        let eta = objective.maximise(&eta0);
        for (j, e) in eta.iter().enumerate() {
            next[off + j] = ts[off + j].inverse(*e);
        }
    }
    let ll = layout.model(&next).map(|m| loglik_value(&m, xs)).ok()?;
    ll.is_finite().then_some((next, ll))
}

/// Squared extrapolation from three successive iterates in unconstrained
/// coordinates; `None` when the iterates have stopped moving.
fn extrapolate(layout: &ParamLayout, p0: &[f64], p1: &[f64], p2: &[f64]) -> Option<Vec<f64>> {
    let (e0, e1, e2) = (layout.to_eta(p0), layout.to_eta(p1), layout.to_eta(p2));
    let r: Vec<f64> = e1.iter().zip(&e0).map(|(a, b)| a - b).collect();
    let v: Vec<f64> = (0..e0.len()).map(|i| e2[i] - 2.0 * e1[i] + e0[i]).collect();
    let norm = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (nr, nv) = (norm(&r), norm(&v));
    if !(nv > 0.0 && nr > 0.0) {
        return None;
    }
    let step = (-nr / nv).min(-1.0);
    let ts = layout.transforms();
    let eta: Vec<f64> = (0..e0.len())
        .map(|i| ts[i].clamp(e0[i] - 2.0 * step * r[i] + step * step * v[i]))
        .collect();
    eta.iter().all(|e| e.is_finite()).then(|| layout.from_eta(&eta))
}

/// Runs EM from `start` until the log-likelihood gains less than `tol` in a
/// cycle or `max_iter` ECM maps have been made.
///
/// Each cycle takes two ECM maps, extrapolates along them (SQUAREM) and maps
/// the extrapolated point once more. That point is kept only when it beats
/// the plain second map, so the recorded log-likelihood never decreases.
pub(crate) fn run_em(layout: &ParamLayout, xs: &[f64], start: &[f64], max_iter: usize, tol: f64) -> Outcome {
    let mut params = start.to_vec();
    let mut ll = layout.model(&params).map(|m| loglik_value(&m, xs)).unwrap_or(f64::NEG_INFINITY);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    if !ll.is_finite() {
        return Outcome {
            params,
            iterations,
            converged,
            trace,
        };
    }
    while iterations < max_iter {
        iterations += 1;
        let Some((p1, ll1)) = em_map(layout, xs, &params).filter(|(_, l)| *l >= ll) else {
            // no ascent left at floating-point resolution
            converged = true;
            trace.push(ll);
            break;
        };
        let mut best = (p1.clone(), ll1);
        if iterations < max_iter {
            iterations += 1;
            if let Some((p2, ll2)) = em_map(layout, xs, &p1).filter(|(_, l)| *l >= ll1) {
                best = (p2.clone(), ll2);
                if iterations < max_iter {
                    if let Some(pe) = extrapolate(layout, &params, &p1, &p2) {
                        iterations += 1;
                        if let Some((p3, ll3)) = em_map(layout, xs, &pe) {
                            if ll3 > best.1 {
                                best = (p3, ll3);
                            }
                        }
                    }
                }
            }
        }
        let gain = best.1 - ll;
        params = best.0;
        ll = best.1;
        trace.push(ll);
        if gain < tol {
            converged = true;
            break;
        }
    }
    Outcome {
        params,
        iterations,
        converged,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_update_inverts_mean_count() {
        for ps in PowerSeries::all() {
            for theta in [0.01, 0.3, 0.9] {
                let back = theta_update(ps, ps.mean_count(theta));
                assert!((back - theta).abs() < 1e-9, "{ps} {theta} {back}");
            }
        }
        assert_eq!(theta_update(PowerSeries::Geometric, 1.0), THETA_FLOOR);
        assert_eq!(theta_update(PowerSeries::Geometric, 1e13), THETA_CEIL_BOUNDED);
    }
}
