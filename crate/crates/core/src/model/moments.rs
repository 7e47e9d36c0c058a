//! Moments, generating function, order statistics and lifetime summaries.
//!
//! Every quantity is a sum over the mixture weights `pₙ` of an expectation
//! under the baseline `g(·; nα, ξ)`. Those baseline expectations use the
//! substitution `x = H⁻¹(s/(nα))`, `s ~ Exp(1)`, when `H⁻¹` has a closed form,
//! and direct integration over `x` otherwise.

use super::{EwpsModel, MixtureTruncation};
use crate::error::{domain, EwpsError, Result};
use crate::generator::GeneratorKind;
use crate::numeric::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::numeric::special::{binomial, gamma, ln_gamma};

pub(crate) fn tol() -> Tolerance {
    Tolerance::tight()
}

impl EwpsModel {
    fn require_proper(&self) -> Result<()> {
        if self.generator.is_relaxed() {
            return domain("the relaxed modified Weibull generator is bounded, so the distribution is defective");
        }
        Ok(())
    }

    /// `lim H(x)/x` as `x → ∞`: 0, 1 or ∞.
    fn tail_slope(&self) -> f64 {
        let xi = self.generator.xi();
        let power = |g: f64| {
            if g > 1.0 {
                f64::INFINITY
            } else if g == 1.0 {
                1.0
            } else {
                0.0
            }
        };
        match self.generator.kind() {
            GeneratorKind::Exponential => 1.0,
            GeneratorKind::Weibull => power(xi[0]),
            GeneratorKind::ModifiedWeibull if xi[1] == 0.0 => power(xi[0]),
            GeneratorKind::Pareto => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// `∫ φ(x, s) g(x; rate, ξ) dx` over `[support_low, upper]`, with `s = rate·H(x)`.
    pub(crate) fn baseline_expectation<F>(&self, rate: f64, upper: f64, phi: F, tol: Tolerance) -> Result<f64>
    where
        F: Fn(f64, f64) -> f64,
    {
        let g = self.generator;
        let low = g.support_low();
        if upper <= low {
            return Ok(0.0);
        }
        if g.kind() == GeneratorKind::ModifiedWeibull {
            let integrand = |x: f64| {
                let s = rate * g.h_big(x);
                let dens = (rate.ln() + g.ln_h(x) - s).exp();
                if dens == 0.0 {
                    0.0
                } else {
                    phi(x, s) * dens
                }
            };
            let scale = g.h_inverse(1.0 / rate)?;
            return Ok(if upper.is_finite() {
                integrate(integrand, low, upper, tol)?.value
            } else {
                integrate_to_infinity(integrand, low, scale, tol)?.value
            });
        }
        let integrand = |s: f64| {
            let w = (-s).exp();
            if w == 0.0 {
                return 0.0;
            }
            match g.h_inverse(s / rate) {
                Ok(x) => phi(x, s) * w,
                Err(_) => f64::NAN,
            }
        };
        Ok(if upper.is_finite() {
            integrate(integrand, 0.0, rate * g.h_big(upper), tol)?.value
        } else {
            integrate_to_infinity(integrand, 0.0, 1.0, tol)?.value
        })
    }

    /// `E[Zʳ]` for `Z ~ g(·; rate, ξ)`, closed form where one exists.
    fn baseline_raw_moment(&self, rate: f64, r: f64) -> Result<f64> {
        let xi = self.generator.xi();
        Ok(match self.generator.kind() {
            GeneratorKind::Exponential => gamma(r + 1.0) / rate.powf(r),
            GeneratorKind::Rayleigh => gamma(r / 2.0 + 1.0) / rate.powf(r / 2.0),
            GeneratorKind::Weibull => (ln_gamma(r / xi[0] + 1.0) - (r / xi[0]) * rate.ln()).exp(),
            GeneratorKind::Pareto => xi[0].powf(r) * rate / (rate - r),
            _ => self.baseline_expectation(rate, f64::INFINITY, |x, _| x.powf(r), tol())?,
        })
    }

    fn check_pareto_moment(&self, order: f64, what: &str) -> Result<()> {
        if self.generator.kind() == GeneratorKind::Pareto && self.alpha <= order {
            return Err(EwpsError::NonExistence(format!(
                "{what} needs alpha > {order} for a Pareto generator, got alpha = {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `E[Xʳ] = Σ pₙ E[Zₙʳ]`.
    pub fn raw_moment(&self, r: u32, trunc: MixtureTruncation) -> Result<f64> {
        if r == 0 {
            return Ok(1.0);
        }
        self.require_proper()?;
        let r = r as f64;
        self.check_pareto_moment(r, "moment")?;
        let w = self.weights(trunc)?;
        let mut total = 0.0;
        for (i, p) in w.iter().enumerate() {
            total += p * self.baseline_raw_moment((i + 1) as f64 * self.alpha, r)?;
        }
        Ok(total)
    }

    /// `E[Xʳ; X ≤ y] = Σ pₙ ∫ xʳ g(x; nα, ξ) dx` over `[support_low, y]`; `y` may be `+∞`.
    pub fn incomplete_moment(&self, r: u32, y: f64, trunc: MixtureTruncation) -> Result<f64> {
        self.require_proper()?;
        if y.is_nan() {
            return domain("incomplete moment bound is NaN");
        }
        if y.is_infinite() {
            self.check_pareto_moment(r as f64, "moment")?;
        }
        let r = r as f64;
        let w = self.weights(trunc)?;
        let mut total = 0.0;
        for (i, p) in w.iter().enumerate() {
            let rate = (i + 1) as f64 * self.alpha;
            total += p * self.baseline_expectation(rate, y, |x, _| x.powf(r), tol())?;
        }
        Ok(total)
    }

    /// `E[e^{tX}] = Σ pₙ E[e^{tZₙ}]`.
    pub fn mgf(&self, t: f64, trunc: MixtureTruncation) -> Result<f64> {
        self.require_proper()?;
        if t == 0.0 {
            return Ok(1.0);
        }
        if t > 0.0 {
            if self.generator.kind() == GeneratorKind::Pareto {
                return Err(EwpsError::Divergence(
                    "the mgf of a Pareto-based model diverges for t > 0".into(),
                ));
            }
            let slope = self.tail_slope();
            if slope.is_finite() && self.alpha * slope <= t {
                return Err(EwpsError::Divergence(format!(
                    "E[exp(tX)] diverges for t = {t}: the tail decays like exp(-{}x)",
                    self.alpha * slope
                )));
            }
        }
        let w = self.weights(trunc)?;
        let mut total = 0.0;
        for (i, p) in w.iter().enumerate() {
            let rate = (i + 1) as f64 * self.alpha;
            let term = if self.generator.kind() == GeneratorKind::Exponential {
                rate / (rate - t)
            } else {
                self.baseline_expectation(rate, f64::INFINITY, |x, _| (t * x).exp(), tol())?
            };
            total += p * term;
        }
        Ok(total)
    }

    fn order_indices(i: u32, m: u32) -> Result<()> {
        if i == 0 || i > m {
            return domain(format!("order statistic index {i} not in 1..={m}"));
        }
        Ok(())
    }

    /// `m!/((i−1)!(m−i)!) = m·C(m−1, i−1)`.
    fn order_constant(i: u32, m: u32) -> f64 {
        m as f64 * binomial((m - 1) as u64, (i - 1) as u64)
    }

    /// Density of the `i`-th smallest of `m` iid draws,
    /// `m!/((i−1)!(m−i)!) f(x) F(x)^{i−1} S(x)^{m−i}`.
    ///
    /// This is the binomial expansion `Σⱼ (−1)ʲ C(i−1, j) S^{m+j−i}` summed in
    /// closed form, which avoids cancellation in the lower tail.
    pub fn order_stat_pdf(&self, i: u32, m: u32, x: f64) -> Result<f64> {
        Self::order_indices(i, m)?;
        let f = self.pdf(x);
        if f == 0.0 {
            return Ok(0.0);
        }
        let (cdf, surv) = (self.cdf(x), self.survival(x));
        let k = Self::order_constant(i, m);
        Ok(k * f * cdf.powi(i as i32 - 1) * surv.powi((m - i) as i32))
    }

    /// `P(X_{i:m} ≤ x) = Σ_{k=i}^{m} C(m, k) Fᵏ S^{m−k}`.
    pub fn order_stat_cdf(&self, i: u32, m: u32, x: f64) -> Result<f64> {
        Self::order_indices(i, m)?;
        let (cdf, surv) = (self.cdf(x), self.survival(x));
        let mut total = 0.0;
        for k in i..=m {
            total += binomial(m as u64, k as u64) * cdf.powi(k as i32) * surv.powi((m - k) as i32);
        }
        Ok(total.min(1.0))
    }

    /// `E[X_{i:m}ˢ] = K Σₙ pₙ Σⱼ ωⱼ E[Zₙˢ S(Zₙ)^{m+j−i}]`, with the inner
    /// `j`-sum evaluated as `S^{m−i} F^{i−1}`.
    pub fn order_stat_moment(&self, i: u32, m: u32, s: u32, trunc: MixtureTruncation) -> Result<f64> {
        Self::order_indices(i, m)?;
        self.require_proper()?;
        let order = s as f64;
        if self.generator.kind() == GeneratorKind::Pareto && self.alpha * (m - i + 1) as f64 <= order {
            return Err(EwpsError::NonExistence(format!(
                "order statistic moment {s} of X({i}:{m}) needs alpha·{} > {s} for a Pareto generator",
                m - i + 1
            )));
        }
        let w = self.weights(trunc)?;
        let k = Self::order_constant(i, m);
        let mut total = 0.0;
        for (idx, p) in w.iter().enumerate() {
            let n = (idx + 1) as f64;
            let rate = n * self.alpha;
            let inner = self.baseline_expectation(
                rate,
                f64::INFINITY,
                |x, sv| {
                    let t = sv / n;
                    let surv = self.survival_at_t(t);
                    let cdf = self.cdf_at_t(t);
                    x.powf(order) * surv.powi((m - i) as i32) * cdf.powi(i as i32 - 1)
                },
                tol(),
            )?;
            total += p * inner;
        }
        Ok(k * total)
    }

    /// `P(X > Y)` for iid `X, Y`, evaluated as `1 − Σ pₙ ∫ g(x; nα, ξ) S(x) dx`.
    pub fn reliability_same(&self) -> Result<f64> {
        self.require_proper()?;
        let w = self.weights(MixtureTruncation::default())?;
        let mut total = 0.0;
        for (idx, p) in w.iter().enumerate() {
            let n = (idx + 1) as f64;
            let inner = self.baseline_expectation(
                n * self.alpha,
                f64::INFINITY,
                |_, s| self.survival_at_t(s / n),
                tol(),
            )?;
            total += p * inner;
        }
        Ok(1.0 - total)
    }

    /// `support_low + Σ pₙ ∫ e^{−nαH(x)} dx`.
    pub fn average_lifetime(&self, trunc: MixtureTruncation) -> Result<f64> {
        self.require_proper()?;
        self.check_pareto_moment(1.0, "average lifetime")?;
        let g = self.generator;
        let low = g.support_low();
        let xi = g.xi();
        let w = self.weights(trunc)?;
        let mut total = 0.0;
        for (idx, p) in w.iter().enumerate() {
            let rate = (idx + 1) as f64 * self.alpha;
            let term = match g.kind() {
                GeneratorKind::Exponential => 1.0 / rate,
                GeneratorKind::Pareto => xi[0] / (rate - 1.0),
                _ => {
                    let scale = g.h_inverse(1.0 / rate)? - low;
                    integrate_to_infinity(|x| (-rate * g.h_big(x)).exp(), low, scale, tol())?.value
                }
            };
            total += p * term;
        }
        Ok(low + total)
    }

    /// `m(x₀) = S(x₀)⁻¹ Σ pₙ ∫₀^∞ y g(x₀ + y; nα, ξ) dy`.
    pub fn mean_residual_life(&self, x0: f64, trunc: MixtureTruncation) -> Result<f64> {
        self.require_proper()?;
        let g = self.generator;
        if x0.is_nan() || x0 < g.support_low() {
            return domain(format!("x0 = {x0} below the support"));
        }
        self.check_pareto_moment(1.0, "mean residual life")?;
        let surv = self.survival(x0);
        if surv <= 0.0 {
            return domain(format!("survival underflows at x0 = {x0}"));
        }
        let h0 = g.h_big(x0);
        let w = self.weights(trunc)?;
        let mut total = 0.0;
        for (idx, p) in w.iter().enumerate() {
            let rate = (idx + 1) as f64 * self.alpha;
            let s0 = rate * h0;
            // integrate the excess over the conditional law beyond x0, then rescale by e^{-s0}
            let inner = if g.kind() == GeneratorKind::ModifiedWeibull {
                let scale = g.h_inverse((s0 + 1.0) / rate)? - x0;
                let f = |x: f64| (x - x0) * (rate.ln() + g.ln_h(x) - (rate * g.h_big(x) - s0)).exp();
                integrate_to_infinity(f, x0, scale, tol())?.value
            } else {
                let f = |v: f64| match g.h_inverse((s0 + v) / rate) {
                    Ok(x) => (x - x0) * (-v).exp(),
                    Err(_) => f64::NAN,
                };
                integrate_to_infinity(f, 0.0, 1.0, tol())?.value
            };
            total += p * (-s0).exp() * inner;
        }
        Ok(total / surv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_series::PowerSeries;
    use std::f64::consts::LN_2;
    use GeneratorKind::*;

    fn model(ps: PowerSeries, kind: GeneratorKind, theta: f64, alpha: f64, xi: &[f64]) -> EwpsModel {
        EwpsModel::with_params(ps, kind, theta, alpha, xi).unwrap()
    }

    fn eg(theta: f64, alpha: f64) -> EwpsModel {
        model(PowerSeries::Geometric, Exponential, theta, alpha, &[])
    }

    fn tr() -> MixtureTruncation {
        MixtureTruncation::default()
    }

    /// `∫ φ(x) f(x) dx` directly against the compound density.
    fn against_density(m: &EwpsModel, phi: impl Fn(f64) -> f64) -> f64 {
        let scale = m.quantile(0.5).unwrap() - m.support_low();
        let integrand = |x: f64| {
            let f = m.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                phi(x) * f
            }
        };
        integrate_to_infinity(integrand, m.support_low(), scale, tol())
            .unwrap()
            .value
    }

    #[test]
    fn exponential_geometric_mean() {
        let m = eg(0.5, 1.0);
        let mean = m.raw_moment(1, tr()).unwrap();
        let closed = -(1.0 - 0.5) * f64::ln(1.0 - 0.5) / 0.5;
        assert!((mean - closed).abs() < 1e-12);
        assert!((mean - LN_2).abs() < 1e-12);
        assert!((against_density(&m, |x| x) - mean).abs() < 1e-9);
    }

    #[test]
    fn small_theta_exponential_mean() {
        let m = model(PowerSeries::Poisson, Exponential, 1e-12, 2.0, &[]);
        assert!((m.raw_moment(1, tr()).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn pareto_poisson_mean_series() {
        let m = model(PowerSeries::Poisson, Pareto, 1.0, 3.0, &[1.0]);
        let mut series = 0.0;
        let mut fact = 1.0; // (n−1)!
        for n in 1..40 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            series += 1.0 / (fact * (3.0 * n as f64 - 1.0));
        }
        let oracle = 3.0 / (std::f64::consts::E - 1.0) * series;
        assert!((oracle - 1.363_915_426_742_131).abs() < 1e-12, "{oracle}");
        assert!((m.raw_moment(1, tr()).unwrap() - oracle).abs() < 1e-12);
        assert!((against_density(&m, |x| x) - oracle).abs() < 1e-7);
    }

    #[test]
    fn pareto_moment_nonexistence() {
        let m = model(PowerSeries::Poisson, Pareto, 1.0, 0.8, &[1.0]);
        assert!(matches!(m.raw_moment(1, tr()), Err(EwpsError::NonExistence(_))));
        assert!(matches!(m.mgf(0.1, tr()), Err(EwpsError::Divergence(_))));
    }

    #[test]
    fn quadrature_moments_match_direct_integration() {
        for (ps, kind, xi) in [
            (PowerSeries::Logarithmic, Chen, vec![1.5]),
            (PowerSeries::Poisson, Gompertz, vec![0.7]),
            (PowerSeries::Binomial { trials: 10 }, ModifiedWeibull, vec![1.5, 0.4]),
        ] {
            let m = model(ps, kind, 0.6, 1.2, &xi);
            for r in 1..=2 {
                let a = m.raw_moment(r, tr()).unwrap();
                let b = against_density(&m, |x| x.powi(r as i32));
                assert!((a - b).abs() < 1e-8 * b, "{m} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn incomplete_moment_limits() {
        let m = model(PowerSeries::Geometric, Weibull, 0.4, 1.5, &[1.7]);
        let full = m.raw_moment(1, tr()).unwrap();
        let inc = m.incomplete_moment(1, f64::INFINITY, tr()).unwrap();
        assert!((full - inc).abs() < 1e-8);
        assert_eq!(m.incomplete_moment(1, 0.0, tr()).unwrap(), 0.0);
        let partial = m.incomplete_moment(0, 0.8, tr()).unwrap();
        assert!((partial - m.cdf(0.8)).abs() < 1e-10);
    }

    #[test]
    fn mgf_values() {
        let m = eg(0.5, 1.0);
        assert_eq!(m.mgf(0.0, tr()).unwrap(), 1.0);
        let t = 0.5;
        let series: f64 = (1..200)
            .map(|n| 0.5 * 0.5f64.powi(n - 1) * n as f64 / (n as f64 - t))
            .sum();
        let direct = against_density(&m, |x| (t * x).exp());
        assert!((m.mgf(t, tr()).unwrap() - series).abs() < 1e-12);
        assert!((series - direct).abs() < 1e-8);
        assert!(m.mgf(1.0, tr()).is_err());
        let w = model(PowerSeries::Poisson, Weibull, 0.8, 1.0, &[2.0]);
        let a = w.mgf(1.5, tr()).unwrap();
        assert!((a - against_density(&w, |x| (1.5 * x).exp())).abs() < 1e-8 * a);
    }

    #[test]
    fn order_statistics() {
        let m = model(PowerSeries::Logarithmic, Weibull, 0.7, 1.0, &[1.5]);
        for x in [0.2, 0.8, 1.5] {
            assert_eq!(m.order_stat_pdf(1, 1, x).unwrap(), m.pdf(x));
            let fd = (m.order_stat_cdf(2, 5, x + 1e-6).unwrap() - m.order_stat_cdf(2, 5, x - 1e-6).unwrap()) / 2e-6;
            assert!((fd - m.order_stat_pdf(2, 5, x).unwrap()).abs() < 1e-6);
        }
        let total = integrate_to_infinity(|x| m.order_stat_pdf(2, 5, x).unwrap(), 0.0, 0.5, tol()).unwrap();
        assert!((total.value - 1.0).abs() < 1e-7);
        assert!(m.order_stat_pdf(0, 3, 1.0).is_err());
        assert!(m.order_stat_pdf(4, 3, 1.0).is_err());
    }

    #[test]
    fn order_stat_moment_identities() {
        let m = model(PowerSeries::Poisson, Chen, 1.5, 1.0, &[1.2]);
        let mean = m.raw_moment(1, tr()).unwrap();
        let single = m.order_stat_moment(1, 1, 1, tr()).unwrap();
        assert!((single - mean).abs() < 1e-8);
        let lo = m.order_stat_moment(1, 2, 1, tr()).unwrap();
        let hi = m.order_stat_moment(2, 2, 1, tr()).unwrap();
        assert!((lo + hi - 2.0 * mean).abs() < 1e-8);
    }

    #[test]
    fn binomial_expansion_matches_compact_form() {
        let m = eg(0.3, 2.0);
        let (i, mm) = (3u32, 6u32);
        let x = 0.4;
        let k = EwpsModel::order_constant(i, mm);
        let s = m.survival(x);
        let expansion: f64 = (0..i)
            .map(|j| {
                let c = crate::numeric::special::binomial((i - 1) as u64, j as u64);
                (-1f64).powi(j as i32) * c * s.powi((mm + j - i) as i32)
            })
            .sum::<f64>()
            * k
            * m.pdf(x);
        assert!((expansion - m.order_stat_pdf(i, mm, x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn reliability_is_one_half() {
        for m in [
            eg(0.5, 1.0),
            eg(0.9, 2.0),
            model(PowerSeries::Logarithmic, Chen, 0.5, 1.0, &[1.5]),
            model(PowerSeries::Poisson, Pareto, 2.0, 1.5, &[0.3]),
        ] {
            assert!((m.reliability_same().unwrap() - 0.5).abs() < 1e-8, "{m}");
        }
    }

    #[test]
    fn average_lifetime_matches_mean() {
        for m in [
            eg(0.5, 1.0),
            model(PowerSeries::Poisson, Gompertz, 1.2, 0.8, &[0.6]),
            model(PowerSeries::Logarithmic, Rayleigh, 0.6, 1.5, &[]),
            model(PowerSeries::Poisson, Pareto, 1.0, 3.0, &[1.0]),
        ] {
            let a = m.average_lifetime(tr()).unwrap();
            let b = m.raw_moment(1, tr()).unwrap();
            assert!((a - b).abs() < 1e-8, "{m}: {a} vs {b}");
        }
    }

    #[test]
    fn mean_residual_life_limits() {
        let m = model(PowerSeries::Geometric, Weibull, 0.5, 1.0, &[1.4]);
        let mean = m.raw_moment(1, tr()).unwrap();
        assert!((m.mean_residual_life(0.0, tr()).unwrap() - mean).abs() < 1e-6);
        let lim = model(PowerSeries::Poisson, Exponential, 1e-10, 2.0, &[]);
        for x0 in [0.1, 1.0, 5.0] {
            assert!((lim.mean_residual_life(x0, tr()).unwrap() - 0.5).abs() < 1e-6);
        }
        let mw = model(PowerSeries::Geometric, ModifiedWeibull, 0.5, 1.0, &[1.2, 0.3]);
        let x0 = 0.7;
        let direct = integrate_to_infinity(|x| mw.survival(x), x0, 1.0, tol()).unwrap().value / mw.survival(x0);
        assert!((mw.mean_residual_life(x0, tr()).unwrap() - direct).abs() < 1e-8);
    }
}
