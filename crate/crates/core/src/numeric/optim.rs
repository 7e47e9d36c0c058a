//! Quasi-Newton (BFGS) minimisation with a weak-Wolfe bisection line search.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when the sup-norm of the gradient falls below this.
    pub gtol: f64,
    /// Stop when the objective changes by less than this ...
    pub ftol: f64,
    /// ... and no coordinate moves by more than `xtol·(1 + |x|)`.
    pub xtol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            max_iter: 2000,
            gtol: 1e-7,
            ftol: 1e-11,
            xtol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each accepted step (non-increasing).
    pub trace: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;
const WOLFE: f64 = 0.9;

/// Minimises `fg`, which returns the objective and its gradient.
///
/// Points where the objective is not finite are treated as infeasible and the
/// line search retreats from them.
pub fn minimize<F>(mut fg: F, x0: &[f64], opts: BfgsOptions) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dim = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let (mut f, g0) = fg(x.as_slice());
    let mut g = DVector::from_vec(g0);
    let mut trace = vec![f];
    let mut inv_h = DMatrix::<f64>::identity(dim, dim);
    let mut fresh = true;
    let mut small_steps = 0;

    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Minimum {
            x: x0.to_vec(),
            f,
            gradient: g.as_slice().to_vec(),
            iterations: 0,
            converged: false,
            trace,
        };
    }

    for iter in 0..opts.max_iter {
        if g.amax() <= opts.gtol {
            return finish(x, f, g, iter, true, trace);
        }
        let mut dir = -(&inv_h * &g);
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            inv_h = DMatrix::identity(dim, dim);
            dir = -g.clone();
            slope = g.dot(&dir);
            fresh = true;
        }
        // keep the first trial step modest when the curvature model is new
        let mut step = if fresh {
            (1.0 / dir.amax()).min(1.0)
        } else {
            1.0
        };
        let mut lo = 0.0;
        let mut hi = f64::INFINITY;
        let mut accepted: Option<(f64, f64, DVector<f64>)> = None;
        for _ in 0..80 {
            let trial = &x + &dir * step;
            let (ft, gt) = fg(trial.as_slice());
            let gt = DVector::from_vec(gt);
            let gt_ok = gt.iter().all(|v| v.is_finite());
            if !ft.is_finite() || !gt_ok || ft > f + ARMIJO * step * slope {
                hi = step;
            } else {
                accepted = Some((step, ft, gt.clone()));
                if gt.dot(&dir) < WOLFE * slope {
                    lo = step;
                } else {
                    break;
                }
            }
            step = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * lo.max(step)
            };
            if hi.is_finite() && (hi - lo) < 1e-16 * (1.0 + lo) {
                break;
            }
        }
        let Some((step, f_new, g_new)) = accepted else {
            if fresh {
                // no descent possible even along the gradient
                let small = g.amax() <= opts.gtol.sqrt();
                return finish(x, f, g, iter, small, trace);
            }
            inv_h = DMatrix::identity(dim, dim);
            fresh = true;
            continue;
        };
        let s = &dir * step;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        let x_new = &x + &s;
        let df = f - f_new;
        let dx_small = s
            .iter()
            .zip(x_new.iter())
            .all(|(si, xi)| si.abs() <= opts.xtol * (1.0 + xi.abs()));
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
        if sy > 1e-300 {
            if fresh {
                let yy = y.dot(&y);
                if yy > 0.0 {
                    inv_h = DMatrix::identity(dim, dim) * (sy / yy);
                }
            }
            let rho = 1.0 / sy;
            let hy = &inv_h * &y;
            let yhy = y.dot(&hy);
            inv_h += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
            fresh = false;
        }
        if df.abs() <= opts.ftol * (1.0 + f.abs()) && dx_small {
            small_steps += 1;
            if small_steps >= 2 {
                return finish(x, f, g, iter + 1, true, trace);
            }
        } else {
            small_steps = 0;
        }
    }
    let it = opts.max_iter;
    finish(x, f, g, it, false, trace)
}

fn finish(
    x: DVector<f64>,
    f: f64,
    g: DVector<f64>,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
) -> Minimum {
    Minimum {
        x: x.as_slice().to_vec(),
        f,
        gradient: g.as_slice().to_vec(),
        iterations,
        converged,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ];
        (f, g)
    }

    #[test]
    fn rosenbrock_minimum() {
        let m = minimize(rosenbrock, &[-1.2, 1.0], BfgsOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn infeasible_region_is_avoided() {
        // minimum of (x-2)^2 but x > 1.5 is infeasible: optimum hugs the wall
        let f = |x: &[f64]| {
            if x[0] > 1.5 {
                (f64::INFINITY, vec![0.0])
            } else {
                ((x[0] - 2.0).powi(2), vec![2.0 * (x[0] - 2.0)])
            }
        };
        let m = minimize(f, &[0.0], BfgsOptions::default());
        assert!(m.x[0] <= 1.5 && m.x[0] > 1.49);
    }
}
