//! Bracketed scalar root finding (Brent's method).

use crate::error::{EwpsError, Result};

/// Finds a root of `f` in `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign.
///
/// Terminates when the bracket is narrower than `xtol + 4ε|x|` or an exact
/// zero is hit.
pub fn brent<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(EwpsError::Bracket { lo, hi });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(EwpsError::Convergence(format!("NaN encountered at x = {b}")));
        }
    }
    Err(EwpsError::Convergence(format!(
        "brent: {max_iter} iterations without convergence"
    )))
}

/// Solves `f(x) = 0` for increasing `f` on `[lo, ∞)` by doubling the upper end.
pub fn solve_increasing<F: Fn(f64) -> f64>(f: F, lo: f64, initial_width: f64, xtol: f64) -> Result<f64> {
    let mut width = initial_width.max(f64::MIN_POSITIVE);
    let mut hi = lo + width;
    let mut doublings = 0;
    while f(hi) < 0.0 {
        width *= 2.0;
        hi = lo + width;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(EwpsError::Bracket { lo, hi });
        }
    }
    brent(f, lo, hi, xtol, 400)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = brent(|x| x * x * x - x - 2.0, 1.0, 2.0, 1e-14, 100).unwrap();
        assert!((r * r * r - r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbracketed_is_error() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100),
            Err(EwpsError::Bracket { .. })
        ));
    }

    #[test]
    fn doubling_finds_far_root() {
        let r = solve_increasing(|x| x - 1000.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 1000.0).abs() < 1e-9);
    }
}
