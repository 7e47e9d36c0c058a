//! Extended-Weibull generator families `H(x; ξ)` and `h(x; ξ) = H′(x; ξ)`.
//!
//! A generator defines the baseline cdf `G(x) = 1 − exp(−α H(x; ξ))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, EwpsError, Result};
use crate::numeric::roots::brent;

/// The shipped generator shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Exponential,
    Rayleigh,
    Weibull,
    ModifiedWeibull,
    Pareto,
    Gompertz,
    Chen,
    ExponentialPower,
}

/// Whether the scale α is a free parameter or pinned to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaRole {
    Free,
    FixedToOne,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 8] = [
        GeneratorKind::Exponential,
        GeneratorKind::Rayleigh,
        GeneratorKind::Weibull,
        GeneratorKind::ModifiedWeibull,
        GeneratorKind::Pareto,
        GeneratorKind::Gompertz,
        GeneratorKind::Chen,
        GeneratorKind::ExponentialPower,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Exponential => "exponential",
            GeneratorKind::Rayleigh => "rayleigh",
            GeneratorKind::Weibull => "weibull",
            GeneratorKind::ModifiedWeibull => "modified_weibull",
            GeneratorKind::Pareto => "pareto",
            GeneratorKind::Gompertz => "gompertz",
            GeneratorKind::Chen => "chen",
            GeneratorKind::ExponentialPower => "exponential_power",
        }
    }

    /// Names of the ξ components, in storage order.
    pub fn xi_names(&self) -> &'static [&'static str] {
        match self {
            GeneratorKind::Exponential | GeneratorKind::Rayleigh => &[],
            GeneratorKind::Weibull => &["gamma"],
            GeneratorKind::ModifiedWeibull => &["gamma", "lambda"],
            GeneratorKind::Pareto => &["k"],
            GeneratorKind::Gompertz => &["beta"],
            GeneratorKind::Chen => &["b"],
            GeneratorKind::ExponentialPower => &["lambda", "beta"],
        }
    }

    pub fn xi_dim(&self) -> usize {
        self.xi_names().len()
    }

    pub fn alpha_role(&self) -> AlphaRole {
        match self {
            GeneratorKind::ExponentialPower => AlphaRole::FixedToOne,
            _ => AlphaRole::Free,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = EwpsError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match key.as_str() {
            "exponential" | "exp" => GeneratorKind::Exponential,
            "rayleigh" => GeneratorKind::Rayleigh,
            "weibull" => GeneratorKind::Weibull,
            "modified_weibull" | "mw" => GeneratorKind::ModifiedWeibull,
            "pareto" => GeneratorKind::Pareto,
            "gompertz" => GeneratorKind::Gompertz,
            "chen" => GeneratorKind::Chen,
            "exponential_power" | "ep" => GeneratorKind::ExponentialPower,
            _ => return Err(EwpsError::Parse(format!("unknown generator family '{s}'"))),
        })
    }
}

/// First and second ξ-derivatives of `H` and `log h` at one point.
///
/// Only the leading `dim × dim` block is meaningful.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XiDerivatives {
    pub dim: usize,
    pub dh: [f64; 2],
    pub d2h: [[f64; 2]; 2],
    pub dlogh: [f64; 2],
    pub d2logh: [[f64; 2]; 2],
}

impl XiDerivatives {
    pub fn dh_dxi(&self) -> Vec<f64> {
        self.dh[..self.dim].to_vec()
    }

    pub fn dlogh_dxi(&self) -> Vec<f64> {
        self.dlogh[..self.dim].to_vec()
    }

    pub fn d2h_dxi2(&self) -> Vec<Vec<f64>> {
        self.d2h[..self.dim].iter().map(|r| r[..self.dim].to_vec()).collect()
    }

    pub fn d2logh_dxi2(&self) -> Vec<Vec<f64>> {
        self.d2logh[..self.dim].iter().map(|r| r[..self.dim].to_vec()).collect()
    }
}

/// `H`, `log h` and the ξ-derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GeneratorPoint {
    pub h_big: f64,
    pub ln_h: f64,
    pub d: XiDerivatives,
}

/// A generator family bound to its ξ vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedWeibull {
    kind: GeneratorKind,
    xi: [f64; 2],
    relaxed: bool,
}

impl ExtendedWeibull {
    /// Binds `kind` to `xi`, checking the standard ξ-domain.
    pub fn new(kind: GeneratorKind, xi: &[f64]) -> Result<Self> {
        Self::build(kind, xi, false)
    }

    /// Like [`ExtendedWeibull::new`], but a modified Weibull may take `λ < 0`;
    /// `h` then stays positive only below `x = −γ/λ`.
    pub fn new_relaxed(kind: GeneratorKind, xi: &[f64]) -> Result<Self> {
        Self::build(kind, xi, true)
    }

    fn build(kind: GeneratorKind, xi: &[f64], relaxed: bool) -> Result<Self> {
        if xi.len() != kind.xi_dim() {
            return domain(format!(
                "{kind} takes {} shape parameter(s) ({}), got {}",
                kind.xi_dim(),
                kind.xi_names().join(", "),
                xi.len()
            ));
        }
        let mut store = [0.0; 2];
        store[..xi.len()].copy_from_slice(xi);
        let g = ExtendedWeibull {
            kind,
            xi: store,
            relaxed: relaxed && kind == GeneratorKind::ModifiedWeibull,
        };
        g.check_xi()?;
        Ok(g)
    }

    fn check_xi(&self) -> Result<()> {
        for (name, v) in self.kind.xi_names().iter().zip(self.xi.iter()) {
            if !v.is_finite() {
                return domain(format!("{name} = {v} is not finite"));
            }
        }
        let ok = match self.kind {
            GeneratorKind::Exponential | GeneratorKind::Rayleigh => true,
            GeneratorKind::ModifiedWeibull => self.xi[0] > 0.0 && (self.relaxed || self.xi[1] >= 0.0),
            GeneratorKind::ExponentialPower => self.xi[0] > 0.0 && self.xi[1] > 0.0,
            _ => self.xi[0] > 0.0,
        };
        if !ok {
            let parts: Vec<String> = self
                .kind
                .xi_names()
                .iter()
                .zip(self.xi.iter())
                .map(|(n, v)| format!("{n} = {v}"))
                .collect();
            return domain(format!("{} outside the domain of {}", parts.join(", "), self.kind));
        }
        Ok(())
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi[..self.kind.xi_dim()]
    }

    pub fn alpha_role(&self) -> AlphaRole {
        self.kind.alpha_role()
    }

    /// True for a modified Weibull constructed with the relaxed λ domain and `λ < 0`.
    pub fn is_relaxed(&self) -> bool {
        self.relaxed && self.xi[1] < 0.0
    }

    pub fn support_low(&self) -> f64 {
        match self.kind {
            GeneratorKind::Pareto => self.xi[0],
            _ => 0.0,
        }
    }

    /// Point beyond which `h ≤ 0`; only finite for a relaxed modified Weibull.
    pub fn support_ceiling(&self) -> f64 {
        if self.is_relaxed() {
            -self.xi[0] / self.xi[1]
        } else {
            f64::INFINITY
        }
    }

    fn check_x(&self, x: f64, interior: bool) -> Result<()> {
        let lo = self.support_low();
        let bad_low = if interior { x <= lo } else { x < lo };
        if x.is_nan() || bad_low {
            return domain(format!("x = {x} outside the support [{lo}, ∞) of {}", self.kind));
        }
        if x >= self.support_ceiling() {
            return domain(format!(
                "x = {x} beyond {} where the relaxed modified Weibull hazard vanishes",
                self.support_ceiling()
            ));
        }
        Ok(())
    }

    // ---- checked public surface ------------------------------------------------

    /// `H(x; ξ)`.
    pub fn big_h(&self, x: f64) -> Result<f64> {
        self.check_x(x, false)?;
        Ok(self.h_big(x))
    }

    /// `h(x; ξ)`.
    pub fn small_h(&self, x: f64) -> Result<f64> {
        self.check_x(x, false)?;
        Ok(self.h_small(x))
    }

    /// `x` with `H(x; ξ) = y`.
    pub fn big_h_inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return domain(format!("H⁻¹ needs y ≥ 0, got {y}"));
        }
        self.h_inverse(y)
    }

    pub fn xi_derivatives(&self, x: f64) -> Result<XiDerivatives> {
        self.check_x(x, true)?;
        Ok(self.point(x).d)
    }

    /// Baseline cdf `1 − exp(−αH(x))`.
    pub fn ew_cdf(&self, alpha: f64, x: f64) -> Result<f64> {
        self.check_alpha(alpha)?;
        if x <= self.support_low() {
            return Ok(0.0);
        }
        self.check_x(x, false)?;
        Ok(-(-alpha * self.h_big(x)).exp_m1())
    }

    /// Baseline density `α h(x) exp(−αH(x))`.
    pub fn ew_pdf(&self, alpha: f64, x: f64) -> Result<f64> {
        self.check_alpha(alpha)?;
        if x < self.support_low() {
            return Ok(0.0);
        }
        self.check_x(x, false)?;
        Ok((alpha.ln() + self.ln_h(x) - alpha * self.h_big(x)).exp())
    }

    pub(crate) fn check_alpha(&self, alpha: f64) -> Result<()> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("alpha = {alpha} must be positive"));
        }
        if self.alpha_role() == AlphaRole::FixedToOne && alpha != 1.0 {
            return domain(format!("alpha is fixed to 1 for {}, got {alpha}", self.kind));
        }
        Ok(())
    }

    // ---- unchecked evaluation -------------------------------------------------

    pub(crate) fn h_big(&self, x: f64) -> f64 {
        let [p, q] = self.xi;
        match self.kind {
            GeneratorKind::Exponential => x,
            GeneratorKind::Rayleigh => x * x,
            GeneratorKind::Weibull => x.powf(p),
            GeneratorKind::ModifiedWeibull => x.powf(p) * (q * x).exp(),
            GeneratorKind::Pareto => (x / p).ln(),
            GeneratorKind::Gompertz => (p * x).exp_m1() / p,
            GeneratorKind::Chen => x.powf(p).exp_m1(),
            GeneratorKind::ExponentialPower => (p * x).powf(q).exp_m1(),
        }
    }

    pub(crate) fn h_small(&self, x: f64) -> f64 {
        let [p, q] = self.xi;
        match self.kind {
            GeneratorKind::Exponential => 1.0,
            GeneratorKind::Rayleigh => 2.0 * x,
            GeneratorKind::Pareto => 1.0 / x,
            GeneratorKind::Gompertz => (p * x).exp(),
            GeneratorKind::Weibull if p == 1.0 => 1.0,
            GeneratorKind::ModifiedWeibull => x.powf(p - 1.0) * (q * x).exp() * (p + q * x),
            _ => self.ln_h(x).exp(),
        }
    }

    /// `log h(x)`.
    pub(crate) fn ln_h(&self, x: f64) -> f64 {
        let [p, q] = self.xi;
        match self.kind {
            GeneratorKind::Exponential => 0.0,
            GeneratorKind::Rayleigh => (2.0 * x).ln(),
            GeneratorKind::Weibull => p.ln() + (p - 1.0) * x.ln(),
            GeneratorKind::ModifiedWeibull => (p - 1.0) * x.ln() + q * x + (p + q * x).ln(),
            GeneratorKind::Pareto => -x.ln(),
            GeneratorKind::Gompertz => p * x,
            GeneratorKind::Chen => p.ln() + (p - 1.0) * x.ln() + x.powf(p),
            GeneratorKind::ExponentialPower => {
                let lx = p * x;
                q.ln() + p.ln() + lx.powf(q) + (q - 1.0) * lx.ln()
            }
        }
    }

    pub(crate) fn h_inverse(&self, y: f64) -> Result<f64> {
        let [p, q] = self.xi;
        if y == 0.0 {
            return Ok(self.support_low());
        }
        if y == f64::INFINITY {
            return Ok(if self.is_relaxed() { self.support_ceiling() } else { f64::INFINITY });
        }
        Ok(match self.kind {
            GeneratorKind::Exponential => y,
            GeneratorKind::Rayleigh => y.sqrt(),
            GeneratorKind::Weibull => y.powf(1.0 / p),
            GeneratorKind::ModifiedWeibull => return self.modified_weibull_inverse(y),
            GeneratorKind::Pareto => p * y.exp(),
            GeneratorKind::Gompertz => (p * y).ln_1p() / p,
            GeneratorKind::Chen => y.ln_1p().powf(1.0 / p),
            GeneratorKind::ExponentialPower => y.ln_1p().powf(1.0 / q) / p,
        })
    }

    /// Solves `γ s + λ eˢ = log y` for `s = log x`, which is increasing in `s`
    /// on the region where `h > 0`.
    fn modified_weibull_inverse(&self, y: f64) -> Result<f64> {
        let [gamma, lambda] = self.xi;
        let ln_y = y.ln();
        let phi = |s: f64| gamma * s + lambda * s.exp() - ln_y;
        let s0 = ln_y / gamma;
        if lambda == 0.0 {
            return Ok(s0.exp());
        }
        let (lo, hi) = if lambda > 0.0 {
            // s0 solves the λ = 0 equation and overshoots; pull back by λe^{s0}/γ
            let lo = (ln_y - lambda * s0.exp()) / gamma;
            (lo, s0)
        } else {
            let top = self.support_ceiling().ln();
            if s0 >= top || phi(top) < 0.0 {
                return domain(format!(
                    "H = {y} exceeds the maximum of the relaxed modified Weibull generator"
                ));
            }
            (s0, top)
        };
        if phi(lo) >= 0.0 {
            return Ok(lo.exp());
        }
        if phi(hi) <= 0.0 {
            return Ok(hi.exp());
        }
        let s = brent(phi, lo, hi, 1e-15 * (1.0 + lo.abs().max(hi.abs())), 200)?;
        Ok(s.exp())
    }

    /// `H`, `log h` and all ξ-derivatives at `x` in the support interior.
    pub(crate) fn point(&self, x: f64) -> GeneratorPoint {
        let [p, q] = self.xi;
        let mut d = XiDerivatives {
            dim: self.kind.xi_dim(),
            ..Default::default()
        };
        let h_big = self.h_big(x);
        let ln_h = self.ln_h(x);
        match self.kind {
            GeneratorKind::Exponential | GeneratorKind::Rayleigh => {}
            GeneratorKind::Weibull => {
                let l = x.ln();
                d.dh[0] = h_big * l;
                d.d2h[0][0] = h_big * l * l;
                d.dlogh[0] = 1.0 / p + l;
                d.d2logh[0][0] = -1.0 / (p * p);
            }
            GeneratorKind::ModifiedWeibull => {
                let l = x.ln();
                let w = p + q * x;
                d.dh = [h_big * l, h_big * x];
                d.d2h = [[h_big * l * l, h_big * x * l], [h_big * x * l, h_big * x * x]];
                d.dlogh = [l + 1.0 / w, x + x / w];
                let w2 = w * w;
                d.d2logh = [[-1.0 / w2, -x / w2], [-x / w2, -x * x / w2]];
            }
            GeneratorKind::Pareto => {
                d.dh[0] = -1.0 / p;
                d.d2h[0][0] = 1.0 / (p * p);
            }
            GeneratorKind::Gompertz => {
                let (d1, d2) = gompertz_beta_derivatives(p, x);
                d.dh[0] = d1;
                d.d2h[0][0] = d2;
                d.dlogh[0] = x;
            }
            GeneratorKind::Chen => {
                let l = x.ln();
                let t = x.powf(p);
                let et = t.exp();
                d.dh[0] = et * t * l;
                d.d2h[0][0] = et * t * l * l * (t + 1.0);
                d.dlogh[0] = 1.0 / p + l + t * l;
                d.d2logh[0][0] = -1.0 / (p * p) + t * l * l;
            }
            GeneratorKind::ExponentialPower => {
                let (lam, beta) = (p, q);
                let lq = (lam * x).ln();
                let s = (lam * x).powf(beta);
                let es = s.exp();
                let s_l = beta * s / lam;
                let s_b = s * lq;
                let s_ll = beta * (beta - 1.0) * s / (lam * lam);
                let s_lb = s * (1.0 + beta * lq) / lam;
                let s_bb = s * lq * lq;
                d.dh = [es * s_l, es * s_b];
                d.d2h = [
                    [es * (s_l * s_l + s_ll), es * (s_l * s_b + s_lb)],
                    [es * (s_l * s_b + s_lb), es * (s_b * s_b + s_bb)],
                ];
                d.dlogh = [beta * (1.0 + s) / lam, 1.0 / beta + s * lq + lq];
                let ll = -beta * (1.0 + s) / (lam * lam) + beta * beta * s / (lam * lam);
                let lb = (1.0 + s) / lam + beta * s * lq / lam;
                let bb = -1.0 / (beta * beta) + s * lq * lq;
                d.d2logh = [[ll, lb], [lb, bb]];
            }
        }
        GeneratorPoint { h_big, ln_h, d }
    }
}

/// `∂H/∂β` and `∂²H/∂β²` for `H = (e^{βx} − 1)/β`, by series when `βx` is small.
fn gompertz_beta_derivatives(beta: f64, x: f64) -> (f64, f64) {
    let bx = beta * x;
    if bx.abs() < 0.1 {
        // H = Σ_{k≥1} β^{k−1} x^k / k!, differentiated termwise
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        let mut t1 = x * x / 2.0; // β^{k−2} x^k / k! at k = 2
        let mut t2 = x * x * x / 6.0; // β^{k−3} x^k / k! at k = 3
        for k in 2..30 {
            let kf = k as f64;
            d1 += (kf - 1.0) * t1;
            t1 *= bx / (kf + 1.0);
            if k >= 3 {
                d2 += (kf - 1.0) * (kf - 2.0) * t2;
                t2 *= bx / (kf + 1.0);
            }
        }
        (d1, d2)
    } else {
        let e = bx.exp();
        let h = bx.exp_m1() / beta;
        let d1 = (x * e - h) / beta;
        let d2 = (x * x * e - 2.0 * d1) / beta;
        (d1, d2)
    }
}

impl fmt::Display for ExtendedWeibull {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        let names = self.kind.xi_names();
        if !names.is_empty() {
            let parts: Vec<String> = names
                .iter()
                .zip(self.xi.iter())
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn ew(kind: GeneratorKind, xi: &[f64]) -> ExtendedWeibull {
        ExtendedWeibull::new(kind, xi).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn samples() -> Vec<ExtendedWeibull> {
        use GeneratorKind::*;
        vec![
            ew(Exponential, &[]),
            ew(Rayleigh, &[]),
            ew(Weibull, &[0.7]),
            ew(Weibull, &[2.5]),
            ew(ModifiedWeibull, &[1.5, 0.3]),
            ew(ModifiedWeibull, &[0.6, 1.2]),
            ew(Pareto, &[0.5]),
            ew(Gompertz, &[0.8]),
            ew(Gompertz, &[0.02]),
            ew(Chen, &[0.6]),
            ew(Chen, &[2.0]),
            ew(ExponentialPower, &[0.9, 1.4]),
            ew(ExponentialPower, &[1.3, 0.5]),
        ]
    }

    #[test]
    fn big_h_examples() {
        use GeneratorKind::*;
        assert_eq!(ew(Weibull, &[2.0]).big_h(3.0).unwrap(), 9.0);
        assert_eq!(ew(ModifiedWeibull, &[1.0, 0.0]).big_h(2.0).unwrap(), 2.0);
        assert!((ew(Chen, &[1.0]).big_h(LN_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(ew(Pareto, &[1.0]).big_h(0.5).is_err());
    }

    #[test]
    fn small_h_examples() {
        use GeneratorKind::*;
        assert_eq!(ew(Exponential, &[]).small_h(5.0).unwrap(), 1.0);
        assert_eq!(ew(Rayleigh, &[]).small_h(3.0).unwrap(), 6.0);
        let mw = ew(ModifiedWeibull, &[2.0, 0.5]).small_h(1.0).unwrap();
        assert!(rel(mw, 4.121_803_176_750_32) < 1e-14);
    }

    #[test]
    fn inverse_examples() {
        use GeneratorKind::*;
        assert!((ew(Weibull, &[2.0]).big_h_inverse(9.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(ew(Pareto, &[0.05]).big_h_inverse(0.0).unwrap(), 0.05);
        let x = ew(ModifiedWeibull, &[2.0, 0.5]).big_h_inverse(0.5f64.exp()).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
        assert!(ew(Weibull, &[2.0]).big_h_inverse(-1.0).is_err());
    }

    #[test]
    fn xi_derivative_examples() {
        use GeneratorKind::*;
        let d = ew(Weibull, &[2.0]).xi_derivatives(E).unwrap();
        assert!(rel(d.dh[0], 7.389_056_098_930_65) < 1e-14);
        assert!(ew(Exponential, &[]).xi_derivatives(1.3).unwrap().dh_dxi().is_empty());
        assert_eq!(ew(Chen, &[2.0]).xi_derivatives(1.0).unwrap().dh[0], 0.0);
    }

    #[test]
    fn baseline_cdf_examples() {
        use GeneratorKind::*;
        let e = ew(Exponential, &[]);
        assert!(rel(e.ew_cdf(1.0, 1.0).unwrap(), 0.632_120_558_828_557_7) < 1e-15);
        for g in samples() {
            let alpha = if g.alpha_role() == AlphaRole::Free { 1.3 } else { 1.0 };
            assert_eq!(g.ew_cdf(alpha, g.support_low()).unwrap(), 0.0);
        }
        let w = ew(Weibull, &[2.0]);
        assert!((w.ew_cdf(1.0, LN_2.sqrt()).unwrap() - 0.5).abs() < 1e-15);
        assert!(ew(ExponentialPower, &[1.0, 1.0]).ew_cdf(2.0, 1.0).is_err());
    }

    #[test]
    fn small_h_is_derivative_of_big_h() {
        for g in samples() {
            let lo = g.support_low();
            for i in 1..=20 {
                let x = lo + 0.15 * i as f64;
                let step = 1e-6 * x;
                let fd = (g.h_big(x + step) - g.h_big(x - step)) / (2.0 * step);
                assert!(rel(fd, g.h_small(x)) < 1e-6, "{g} at {x}");
            }
        }
    }

    #[test]
    fn big_h_is_increasing_and_invertible() {
        for g in samples() {
            let lo = g.support_low();
            let mut prev = -1.0;
            for i in 0..=40 {
                let x = lo + 0.07 * i as f64;
                let h = g.h_big(x);
                assert!(h > prev, "{g} at {x}");
                prev = h;
                if i > 0 {
                    let back = g.big_h_inverse(h).unwrap();
                    assert!(rel(back, x) < 1e-10, "{g}: {back} vs {x}");
                }
            }
        }
    }

    #[test]
    fn baseline_density_normalises() {
        use crate::numeric::quadrature::{integrate_to_infinity, Tolerance};
        for g in samples() {
            let alpha = if g.alpha_role() == AlphaRole::Free { 1.7 } else { 1.0 };
            let f = |x: f64| g.ew_pdf(alpha, x).unwrap();
            let total = integrate_to_infinity(f, g.support_low(), 1.0, Tolerance::default()).unwrap();
            assert!((total.value - 1.0).abs() < 1e-8, "{g}: {}", total.value);
        }
    }

    #[test]
    fn xi_derivatives_match_finite_differences() {
        for g in samples() {
            let dim = g.kind.xi_dim();
            if dim == 0 {
                continue;
            }
            for &x in &[0.3, 0.9, 1.7] {
                let x = x + g.support_low();
                let d = g.xi_derivatives(x).unwrap();
                for k in 0..dim {
                    let step = 1e-5 * (1.0 + g.xi[k].abs());
                    let shifted = |delta: f64| {
                        let mut xi = g.xi;
                        xi[k] += delta;
                        ExtendedWeibull::new(g.kind, &xi[..dim]).unwrap().point(x)
                    };
                    let (up, dn) = (shifted(step), shifted(-step));
                    let close = |fd: f64, exact: f64| (fd - exact).abs() <= 1e-5 * exact.abs().max(1e-3);
                    let fd_h = (up.h_big - dn.h_big) / (2.0 * step);
                    assert!(close(fd_h, d.dh[k]), "{g} dH/dξ{k} at {x}: {fd_h} vs {}", d.dh[k]);
                    let fd_l = (up.ln_h - dn.ln_h) / (2.0 * step);
                    assert!(close(fd_l, d.dlogh[k]), "{g} dlogh/dξ{k}: {fd_l} vs {}", d.dlogh[k]);
                    for j in 0..dim {
                        let fd2 = (up.d.dh[j] - dn.d.dh[j]) / (2.0 * step);
                        assert!(close(fd2, d.d2h[j][k]), "{g} d2H[{j}][{k}]: {fd2} vs {}", d.d2h[j][k]);
                        let fd2l = (up.d.dlogh[j] - dn.d.dlogh[j]) / (2.0 * step);
                        assert!(close(fd2l, d.d2logh[j][k]), "{g} d2logh[{j}][{k}]: {fd2l} vs {}", d.d2logh[j][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn gompertz_series_branch_is_continuous() {
        let x = 1.0;
        let (a1, a2) = gompertz_beta_derivatives(0.0999, x);
        let (b1, b2) = gompertz_beta_derivatives(0.1001, x);
        assert!(rel(a1, b1) < 1e-3 && rel(a2, b2) < 1e-3);
        let (z1, z2) = gompertz_beta_derivatives(0.0, 2.0);
        assert_eq!((z1, z2), (2.0, 8.0 / 3.0));
    }

    #[test]
    fn relaxed_modified_weibull() {
        let strict = ExtendedWeibull::new(GeneratorKind::ModifiedWeibull, &[1.5, -0.5]);
        assert!(strict.is_err());
        let g = ExtendedWeibull::new_relaxed(GeneratorKind::ModifiedWeibull, &[1.5, -0.5]).unwrap();
        assert!(g.is_relaxed());
        assert_eq!(g.support_ceiling(), 3.0);
        assert!(g.small_h(3.5).is_err());
        let x = g.big_h_inverse(g.h_big(1.2)).unwrap();
        assert!((x - 1.2).abs() < 1e-12);
        assert!(g.big_h_inverse(10.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in GeneratorKind::ALL {
            assert_eq!(k.name().parse::<GeneratorKind>().unwrap(), k);
        }
        assert!("kies".parse::<GeneratorKind>().is_err());
    }
}
