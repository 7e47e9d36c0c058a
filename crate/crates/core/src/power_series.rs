//! Zero-truncated power-series mixing distributions.
//!
//! Each family is described by `C(θ) = Σ_{n≥1} aₙ θⁿ` on an open parameter
//! interval. Besides the closed forms of `C`, its first three derivatives and
//! its inverse, the module exposes the log-space and ratio forms used by the
//! compound distribution so that evaluation stays finite near the edges of
//! the parameter space (θ → 1⁻ for the logarithmic and geometric families,
//! large θ for Poisson).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, EwpsError, Result};
use crate::numeric::special::{ln_binomial, ln_gamma};

pub const DEFAULT_BINOMIAL_TRIALS: u32 = 10;

/// A zero-truncated power-series family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum PowerSeries {
    Poisson,
    Logarithmic,
    Geometric,
    /// Binomial with a fixed, known number of trials `m ≥ 1`.
    Binomial { trials: u32 },
}

impl PowerSeries {
    pub fn binomial(trials: u32) -> Result<Self> {
        if trials == 0 {
            return domain("binomial trials must be at least 1");
        }
        Ok(PowerSeries::Binomial { trials })
    }

    pub fn all() -> [PowerSeries; 4] {
        [
            PowerSeries::Poisson,
            PowerSeries::Logarithmic,
            PowerSeries::Geometric,
            PowerSeries::Binomial {
                trials: DEFAULT_BINOMIAL_TRIALS,
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            PowerSeries::Poisson => "poisson",
            PowerSeries::Logarithmic => "logarithmic",
            PowerSeries::Geometric => "geometric",
            PowerSeries::Binomial { .. } => "binomial",
        }
    }

    /// Open interval of admissible θ.
    pub fn theta_domain(&self) -> (f64, f64) {
        match self {
            PowerSeries::Poisson => (0.0, f64::INFINITY),
            _ => (0.0, 1.0),
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.theta_domain();
        if theta.is_nan() || theta <= lo || theta >= hi {
            return domain(format!(
                "theta = {theta} outside ({lo}, {hi}) for the {} family",
                self.name()
            ));
        }
        Ok(())
    }

    fn trials(&self) -> f64 {
        match self {
            PowerSeries::Binomial { trials } => *trials as f64,
            _ => 0.0,
        }
    }

    // ---- checked public surface ------------------------------------------------

    /// `C(θ)`.
    pub fn c_value(&self, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.c(theta))
    }

    /// The `order`-th derivative of `C` at θ, `order ∈ {1, 2, 3}`.
    pub fn c_derivative(&self, theta: f64, order: u8) -> Result<f64> {
        self.check_theta(theta)?;
        if !(1..=3).contains(&order) {
            return domain(format!("derivative order {order} not in 1..=3"));
        }
        Ok(self.c_deriv(theta, order))
    }

    /// `C⁻¹(y)`; `y` must lie in the image of `C` over the θ-domain.
    pub fn c_inverse(&self, y: f64) -> Result<f64> {
        let sup = self.c_sup();
        if y.is_nan() || y <= 0.0 || y >= sup {
            return domain(format!(
                "y = {y} outside the image (0, {sup}) of C for the {} family",
                self.name()
            ));
        }
        Ok(self.c_inverse_ln(y.ln()))
    }

    /// `P(N = n) = aₙθⁿ / C(θ)`.
    pub fn pmf(&self, theta: f64, n: u64) -> Result<f64> {
        self.check_theta(theta)?;
        if n == 0 {
            return domain("pmf index must be at least 1");
        }
        Ok(self.ln_pmf(theta, n).exp())
    }

    /// Smallest `N ≥ 1` with `Σ_{n>N} pₙ < ε`; the trial count for the binomial family.
    pub fn tail_cutoff(&self, theta: f64, eps: f64) -> Result<usize> {
        self.check_theta(theta)?;
        if !(eps > 0.0 && eps < 1.0) {
            return domain(format!("tail probability {eps} not in (0, 1)"));
        }
        Ok(self.weights(theta, eps, usize::MAX)?.len())
    }

    /// `p₁ … p_N` with `N = tail_cutoff(θ, ε)`; errors when `N > cap`.
    pub fn weights(&self, theta: f64, eps: f64, cap: usize) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        if let PowerSeries::Binomial { trials } = self {
            let m = *trials as usize;
            if m > cap {
                return Err(EwpsError::TruncationCap { needed: m, cap });
            }
            return Ok((1..=m as u64).map(|n| self.ln_pmf(theta, n).exp()).collect());
        }
        let ln_theta = theta.ln();
        let ln_c = self.ln_c(theta);
        let mut probs: Vec<f64> = Vec::new();
        let mut ln_a = 0.0;
        let hard_cap = cap.saturating_mul(4).clamp(64, 200_000_000);
        let mut n: u64 = 0;
        let remainder = loop {
            n += 1;
            ln_a = self.next_ln_a(n, ln_a);
            let p = (ln_a + n as f64 * ln_theta - ln_c).exp();
            probs.push(p);
            // bound the mass beyond n by the geometric envelope of the term ratio
            let ratio_sup = match self {
                PowerSeries::Poisson => theta / (n as f64 + 2.0),
                _ => theta,
            };
            if ratio_sup < 1.0 {
                let next = match self {
                    PowerSeries::Poisson => p * theta / (n as f64 + 1.0),
                    PowerSeries::Logarithmic => p * theta * n as f64 / (n as f64 + 1.0),
                    _ => p * theta,
                };
                let bound = next / (1.0 - ratio_sup);
                if bound < eps * 1e-3 || bound < 1e-300 {
                    break bound;
                }
            }
            if probs.len() > hard_cap {
                return Err(EwpsError::TruncationCap {
                    needed: probs.len(),
                    cap,
                });
            }
        };
        // backward accumulation keeps small tails accurate
        let mut tail = remainder;
        let mut cutoff = probs.len();
        for idx in (0..probs.len()).rev() {
            // tail currently holds Σ_{j > idx+1} p_j
            if tail < eps {
                cutoff = idx + 1;
            } else {
                break;
            }
            tail += probs[idx];
        }
        let cutoff = cutoff.max(1);
        if cutoff > cap {
            return Err(EwpsError::TruncationCap {
                needed: cutoff,
                cap,
            });
        }
        probs.truncate(cutoff);
        Ok(probs)
    }

    /// `ln aₙ`, given `ln aₙ₋₁` (ignored at n = 1).
    fn next_ln_a(&self, n: u64, prev: f64) -> f64 {
        match self {
            PowerSeries::Poisson => {
                if n == 1 {
                    0.0
                } else {
                    prev - (n as f64).ln()
                }
            }
            PowerSeries::Logarithmic => -(n as f64).ln(),
            PowerSeries::Geometric => 0.0,
            PowerSeries::Binomial { trials } => ln_binomial(*trials as u64, n),
        }
    }

    /// `ln aₙ`.
    pub fn ln_coefficient(&self, n: u64) -> f64 {
        match self {
            PowerSeries::Poisson => -ln_gamma(n as f64 + 1.0),
            PowerSeries::Logarithmic => -(n as f64).ln(),
            PowerSeries::Geometric => 0.0,
            PowerSeries::Binomial { trials } => ln_binomial(*trials as u64, n),
        }
    }

    pub(crate) fn ln_pmf(&self, theta: f64, n: u64) -> f64 {
        self.ln_coefficient(n) + n as f64 * theta.ln() - self.ln_c(theta)
    }

    /// Supremum of `C` over the θ-domain.
    fn c_sup(&self) -> f64 {
        match self {
            PowerSeries::Binomial { trials } => 2f64.powi(*trials as i32) - 1.0,
            _ => f64::INFINITY,
        }
    }

    // ---- unchecked evaluators on the closed interval [0, θ] -------------------

    pub(crate) fn c(&self, u: f64) -> f64 {
        match self {
            PowerSeries::Poisson => u.exp_m1(),
            PowerSeries::Logarithmic => -(-u).ln_1p(),
            PowerSeries::Geometric => u / (1.0 - u),
            PowerSeries::Binomial { .. } => (self.trials() * u.ln_1p()).exp_m1(),
        }
    }

    pub(crate) fn c_deriv(&self, u: f64, order: u8) -> f64 {
        let k = order as i32;
        match self {
            PowerSeries::Poisson => u.exp(),
            PowerSeries::Logarithmic => {
                // (k−1)! (1−u)^{−k}
                let fact = [1.0, 1.0, 2.0][(k - 1) as usize];
                fact * (1.0 - u).powi(-k)
            }
            PowerSeries::Geometric => {
                // k! (1−u)^{−(k+1)}
                let fact = [1.0, 2.0, 6.0][(k - 1) as usize];
                fact * (1.0 - u).powi(-(k + 1))
            }
            PowerSeries::Binomial { .. } => {
                let m = self.trials();
                let mut falling = 1.0;
                for j in 0..k {
                    falling *= m - j as f64;
                }
                falling * (1.0 + u).powf(m - k as f64)
            }
        }
    }

    /// `ln C(u)`; `−∞` at `u = 0`.
    pub(crate) fn ln_c(&self, u: f64) -> f64 {
        match self {
            PowerSeries::Poisson => {
                if u > 1.0 {
                    u + (-(-u).exp_m1()).ln()
                } else {
                    u.exp_m1().ln()
                }
            }
            PowerSeries::Logarithmic => (-(-u).ln_1p()).ln(),
            PowerSeries::Geometric => u.ln() - (-u).ln_1p(),
            PowerSeries::Binomial { .. } => (self.trials() * u.ln_1p()).exp_m1().ln(),
        }
    }

    /// `ln C′(u)`.
    pub(crate) fn ln_c1(&self, u: f64) -> f64 {
        match self {
            PowerSeries::Poisson => u,
            PowerSeries::Logarithmic => -(-u).ln_1p(),
            PowerSeries::Geometric => -2.0 * (-u).ln_1p(),
            PowerSeries::Binomial { .. } => {
                let m = self.trials();
                m.ln() + (m - 1.0) * u.ln_1p()
            }
        }
    }

    /// `C″(u) / C′(u)`.
    pub(crate) fn ratio2(&self, u: f64) -> f64 {
        match self {
            PowerSeries::Poisson => 1.0,
            PowerSeries::Logarithmic => 1.0 / (1.0 - u),
            PowerSeries::Geometric => 2.0 / (1.0 - u),
            PowerSeries::Binomial { .. } => (self.trials() - 1.0) / (1.0 + u),
        }
    }

    /// `C‴(u) / C′(u)`.
    pub(crate) fn ratio3(&self, u: f64) -> f64 {
        match self {
            PowerSeries::Poisson => 1.0,
            PowerSeries::Logarithmic => 2.0 / (1.0 - u).powi(2),
            PowerSeries::Geometric => 6.0 / (1.0 - u).powi(2),
            PowerSeries::Binomial { .. } => {
                let m = self.trials();
                (m - 1.0) * (m - 2.0) / (1.0 + u).powi(2)
            }
        }
    }

    /// `u·C′(u) / C(u)`, with its limit 1 at `u = 0`.
    pub(crate) fn u_c1_over_c(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        match self {
            PowerSeries::Poisson => u / (-(-u).exp_m1()),
            PowerSeries::Logarithmic => u / ((1.0 - u) * (-(-u).ln_1p())),
            PowerSeries::Geometric => 1.0 / (1.0 - u),
            PowerSeries::Binomial { .. } => {
                let m = self.trials();
                m * u * (1.0 + u).powf(m - 1.0) / (m * u.ln_1p()).exp_m1()
            }
        }
    }

    /// `ln(C(θ) − C(u))` for `u = θ − d`, `0 < d ≤ θ`, with `d` supplied exactly.
    pub(crate) fn ln_c_diff(&self, theta: f64, u: f64, d: f64) -> f64 {
        match self {
            PowerSeries::Poisson => {
                // e^θ − e^u = e^θ (1 − e^{−d})
                theta + (-(-d).exp_m1()).ln()
            }
            PowerSeries::Logarithmic => (d / (1.0 - theta)).ln_1p().ln(),
            PowerSeries::Geometric => d.ln() - (-theta).ln_1p() - (-u).ln_1p(),
            PowerSeries::Binomial { .. } => {
                let m = self.trials();
                // (1+θ)^m − (1+u)^m = (1+θ)^m (1 − ((1+u)/(1+θ))^m)
                let ln_ratio = (-d / (1.0 + theta)).ln_1p();
                m * theta.ln_1p() + (-(m * ln_ratio).exp_m1()).ln()
            }
        }
    }

    /// `C⁻¹(e^{ln_y})`.
    pub(crate) fn c_inverse_ln(&self, ln_y: f64) -> f64 {
        match self {
            PowerSeries::Poisson => {
                if ln_y > 30.0 {
                    ln_y + (-ln_y).exp().ln_1p()
                } else {
                    ln_y.exp().ln_1p()
                }
            }
            PowerSeries::Logarithmic => -(-ln_y.exp()).exp_m1(),
            PowerSeries::Geometric => 1.0 / (1.0 + (-ln_y).exp()),
            PowerSeries::Binomial { .. } => (ln_y.exp().ln_1p() / self.trials()).exp_m1(),
        }
    }

    /// `θ C′(θ) / C(θ) = E[N]`, increasing in θ.
    pub fn mean_count(&self, theta: f64) -> f64 {
        self.u_c1_over_c(theta)
    }

    /// `C′(θ)/C(θ)`.
    pub(crate) fn dln_c(&self, theta: f64) -> f64 {
        self.u_c1_over_c(theta) / theta
    }

    /// `d²/dθ² ln C(θ) = C″/C − (C′/C)²`.
    pub(crate) fn d2ln_c(&self, theta: f64) -> f64 {
        let r1 = self.dln_c(theta);
        r1 * self.ratio2(theta) - r1 * r1
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerSeries::Binomial { trials } => write!(f, "binomial(m={trials})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for PowerSeries {
    type Err = EwpsError;

    /// Accepts `poisson`, `logarithmic`, `geometric`, `binomial` or `binomial:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (head, tail) = match lower.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (lower.as_str(), None),
        };
        match (head, tail) {
            ("poisson", None) => Ok(PowerSeries::Poisson),
            ("logarithmic" | "log", None) => Ok(PowerSeries::Logarithmic),
            ("geometric" | "geo", None) => Ok(PowerSeries::Geometric),
            ("binomial", None) => PowerSeries::binomial(DEFAULT_BINOMIAL_TRIALS),
            ("binomial", Some(m)) => {
                let m: u32 = m
                    .parse()
                    .map_err(|_| EwpsError::Parse(format!("bad binomial trial count '{m}'")))?;
                PowerSeries::binomial(m)
            }
            _ => Err(EwpsError::Parse(format!("unknown power-series family '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    const BIN10: PowerSeries = PowerSeries::Binomial { trials: 10 };

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn c_value_examples() {
        assert_eq!(PowerSeries::Geometric.c_value(0.5).unwrap(), 1.0);
        assert!(PowerSeries::Logarithmic.c_value(1e-300).unwrap() < 1e-299);
        assert!(rel(PowerSeries::Poisson.c_value(1.0).unwrap(), 1.718_281_828_459_045) < 1e-15);
    }

    #[test]
    fn c_derivative_examples() {
        assert_eq!(PowerSeries::Geometric.c_derivative(0.5, 1).unwrap(), 4.0);
        assert!((PowerSeries::Poisson.c_derivative(1e-300, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(PowerSeries::Logarithmic.c_derivative(0.5, 2).unwrap(), 4.0);
        assert!(PowerSeries::Geometric.c_derivative(0.5, 4).is_err());
    }

    #[test]
    fn c_inverse_examples() {
        assert!((PowerSeries::Poisson.c_inverse(E - 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((PowerSeries::Geometric.c_inverse(1.0).unwrap() - 0.5).abs() < 1e-16);
        for ps in PowerSeries::all() {
            let y = ps.c_value(0.3).unwrap();
            assert!(rel(ps.c_inverse(y).unwrap(), 0.3) < 1e-12, "{ps}");
        }
        assert!(BIN10.c_inverse(2f64.powi(10)).is_err());
        assert!(PowerSeries::Poisson.c_inverse(-1.0).is_err());
    }

    #[test]
    fn binomial_inverse_inverts_c() {
        // the closed form is (y+1)^{1/m} − 1
        let y = BIN10.c_value(0.7).unwrap();
        assert!(rel(BIN10.c_inverse(y).unwrap(), 0.7) < 1e-13);
        assert!(rel(BIN10.c_inverse(y).unwrap(), (y + 1.0).powf(0.1) - 1.0) < 1e-13);
    }

    #[test]
    fn pmf_examples() {
        assert!((PowerSeries::Geometric.pmf(0.5, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!(rel(PowerSeries::Poisson.pmf(1.0, 1).unwrap(), 0.581_976_706_869_326_5) < 1e-14);
        assert_eq!(BIN10.pmf(0.4, 11).unwrap(), 0.0);
        assert!(PowerSeries::Poisson.pmf(1.0, 0).is_err());
        assert!(PowerSeries::Geometric.pmf(1.0, 1).is_err());
    }

    #[test]
    fn tail_cutoff_examples() {
        assert_eq!(BIN10.tail_cutoff(0.3, 1e-12).unwrap(), 10);
        assert_eq!(PowerSeries::Geometric.tail_cutoff(0.5, 1e-12).unwrap(), 40);
        assert_eq!(PowerSeries::Geometric.tail_cutoff(1e-12, 0.5).unwrap(), 1);
        assert!(PowerSeries::Geometric.tail_cutoff(0.5, 0.0).is_err());
    }

    #[test]
    fn weights_respect_cap() {
        let err = PowerSeries::Logarithmic.weights(0.9999, 1e-12, 10_000);
        assert!(matches!(err, Err(EwpsError::TruncationCap { .. })));
    }

    #[test]
    fn pmf_normalises() {
        for ps in PowerSeries::all() {
            let w = ps.weights(0.4, 1e-15, usize::MAX).unwrap();
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{ps}: {total}");
        }
    }

    #[test]
    fn series_matches_closed_form() {
        for ps in PowerSeries::all() {
            for &theta in &[0.05, 0.3, 0.7, 0.95] {
                let mut sum = 0.0;
                for n in 1..=4000u64 {
                    let term = (ps.ln_coefficient(n) + n as f64 * f64::ln(theta)).exp();
                    sum += term;
                    if term < 1e-20 * sum {
                        break;
                    }
                }
                assert!(rel(sum, ps.c_value(theta).unwrap()) < 1e-10, "{ps} at {theta}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for ps in PowerSeries::all() {
            let (_, hi) = ps.theta_domain();
            let top = if hi.is_finite() { 0.95 } else { 6.0 };
            for i in 1..=12 {
                let theta = top * i as f64 / 12.5;
                for order in 1..=3u8 {
                    let lower = |t: f64| {
                        if order == 1 {
                            ps.c_value(t).unwrap()
                        } else {
                            ps.c_derivative(t, order - 1).unwrap()
                        }
                    };
                    let h = 1e-5 * theta.max(1e-3);
                    let fd = (lower(theta + h) - lower(theta - h)) / (2.0 * h);
                    let exact = ps.c_derivative(theta, order).unwrap();
                    assert!(rel(fd, exact) < 1e-6, "{ps} order {order} at {theta}: {fd} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn log_space_forms_agree_with_direct_ones() {
        for ps in PowerSeries::all() {
            for &u in &[1e-6, 0.2, 0.6, 0.9] {
                assert!(rel(ps.ln_c(u).exp(), ps.c(u)) < 1e-12);
                assert!(rel(ps.ln_c1(u).exp(), ps.c_deriv(u, 1)) < 1e-12);
                assert!(rel(ps.ratio2(u), ps.c_deriv(u, 2) / ps.c_deriv(u, 1)) < 1e-12);
                assert!(rel(ps.ratio3(u), ps.c_deriv(u, 3) / ps.c_deriv(u, 1)) < 1e-12);
                let theta = 0.95;
                let diff = ps.c(theta) - ps.c(u);
                assert!(rel(ps.ln_c_diff(theta, u, theta - u).exp(), diff) < 1e-10);
            }
        }
    }

    #[test]
    fn logarithmic_near_one_stays_finite() {
        let ps = PowerSeries::Logarithmic;
        let theta = 1.0 - 1e-13;
        assert!(ps.ln_c(theta).is_finite());
        assert!(ps.dln_c(theta).is_finite());
        assert!(PowerSeries::Poisson.ln_c(2000.0).is_finite());
    }

    #[test]
    fn parse_names() {
        assert_eq!("Poisson".parse::<PowerSeries>().unwrap(), PowerSeries::Poisson);
        assert_eq!(
            "binomial:4".parse::<PowerSeries>().unwrap(),
            PowerSeries::Binomial { trials: 4 }
        );
        assert_eq!("binomial".parse::<PowerSeries>().unwrap(), BIN10);
        assert!("negbin".parse::<PowerSeries>().is_err());
    }
}
