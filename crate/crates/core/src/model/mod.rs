//! The compound EWPS distribution bound to parameter values.

mod entropy;
mod moments;
mod special_cases;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, DatasetSource};
use crate::error::{domain, Result};
use crate::generator::{AlphaRole, ExtendedWeibull, GeneratorKind};
use crate::power_series::PowerSeries;

pub use entropy::PpEntropy;
pub use special_cases::{mwg_moment_series, pp_entropy_closed_form};

/// Truncation rule for the infinite mixture `Σ pₙ g(x; nα, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureTruncation {
    /// Neglected tail mass of the latent count.
    pub eps_tail: f64,
    /// Largest admissible number of retained terms.
    pub n_max: usize,
}

impl Default for MixtureTruncation {
    fn default() -> Self {
        MixtureTruncation {
            eps_tail: 1e-12,
            n_max: 10_000,
        }
    }
}

impl MixtureTruncation {
    pub fn new(eps_tail: f64, n_max: usize) -> Result<Self> {
        if !(eps_tail > 0.0 && eps_tail < 1.0) {
            return domain(format!("tail mass {eps_tail} not in (0, 1)"));
        }
        if n_max == 0 {
            return domain("mixture cap must be at least 1");
        }
        Ok(MixtureTruncation { eps_tail, n_max })
    }
}

/// An EWPS distribution: mixer, generator, θ and α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwpsModel {
    mixer: PowerSeries,
    generator: ExtendedWeibull,
    theta: f64,
    alpha: f64,
    ln_c_theta: f64,
}

impl EwpsModel {
    /// Binds the families to `θ` and `α`; α must be 1 for fixed-α generators.
    pub fn new(mixer: PowerSeries, generator: ExtendedWeibull, theta: f64, alpha: f64) -> Result<Self> {
        mixer.check_theta(theta)?;
        generator.check_alpha(alpha)?;
        Ok(EwpsModel {
            mixer,
            generator,
            theta,
            alpha,
            ln_c_theta: mixer.ln_c(theta),
        })
    }

    /// Shorthand for `EwpsModel::new` with a freshly built generator.
    pub fn with_params(
        mixer: PowerSeries,
        kind: GeneratorKind,
        theta: f64,
        alpha: f64,
        xi: &[f64],
    ) -> Result<Self> {
        Self::new(mixer, ExtendedWeibull::new(kind, xi)?, theta, alpha)
    }

    pub fn mixer(&self) -> PowerSeries {
        self.mixer
    }

    pub fn generator(&self) -> ExtendedWeibull {
        self.generator
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn xi(&self) -> &[f64] {
        self.generator.xi()
    }

    pub fn support_low(&self) -> f64 {
        self.generator.support_low()
    }

    /// Mixture weights `p₁ … p_N`.
    pub fn weights(&self, trunc: MixtureTruncation) -> Result<Vec<f64>> {
        self.mixer.weights(self.theta, trunc.eps_tail, trunc.n_max)
    }

    /// `α H(x)`, clamped to the relaxed-domain ceiling.
    fn scaled_h(&self, x: f64) -> f64 {
        self.alpha * self.generator.h_big(x.min(self.generator.support_ceiling()))
    }

    /// `S` as a function of `t = αH(x)`.
    pub(crate) fn survival_at_t(&self, t: f64) -> f64 {
        let u = self.theta * (-t).exp();
        (self.mixer.ln_c(u) - self.ln_c_theta).exp()
    }

    /// `F` as a function of `t = αH(x)`, accurate for small `t`.
    pub(crate) fn cdf_at_t(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t < 1.0 {
            let u = self.theta * (-t).exp();
            let d = self.theta * -(-t).exp_m1();
            (self.mixer.ln_c_diff(self.theta, u, d) - self.ln_c_theta).exp()
        } else {
            1.0 - self.survival_at_t(t)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support_low() {
            return 0.0;
        }
        self.cdf_at_t(self.scaled_h(x))
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support_low() {
            return 1.0;
        }
        self.survival_at_t(self.scaled_h(x))
    }

    /// `log f(x)`; `−∞` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x < self.support_low() || x >= self.generator.support_ceiling() {
            return f64::NEG_INFINITY;
        }
        let t = self.scaled_h(x);
        let u = self.theta * (-t).exp();
        self.theta.ln() + self.alpha.ln() + self.generator.ln_h(x) - t + self.mixer.ln_c1(u)
            - self.ln_c_theta
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// `f/S`, evaluated as `α h(x) · u C′(u)/C(u)` with `u = θe^{−αH(x)}`, which
    /// stays finite where `S` underflows.
    pub fn hazard(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x < self.support_low() || x >= self.generator.support_ceiling() {
            return 0.0;
        }
        let u = self.theta * (-self.scaled_h(x)).exp();
        self.alpha * self.generator.h_small(x) * self.mixer.u_c1_over_c(u)
    }

    /// `f` as the truncated mixture `Σ pₙ nα h(x) e^{−nαH(x)}`.
    pub fn mixture_pdf(&self, x: f64, trunc: MixtureTruncation) -> Result<f64> {
        if x < self.support_low() || x >= self.generator.support_ceiling() {
            return Ok(0.0);
        }
        let w = self.weights(trunc)?;
        let t = self.scaled_h(x);
        let ln_h = self.generator.ln_h(x);
        Ok(w
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let n = (i + 1) as f64;
                p * (ln_h + (n * self.alpha).ln() - n * t).exp()
            })
            .sum())
    }

    /// The `p`-quantile `H⁻¹{−log[C⁻¹(C(θ)(1−p))/θ]/α}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("probability {p} not in [0, 1]"));
        }
        if p == 0.0 {
            return Ok(self.support_low());
        }
        if p == 1.0 {
            return Ok(self.generator.support_ceiling());
        }
        let ln_y = self.ln_c_theta + (-p).ln_1p();
        let theta_p = self.mixer.c_inverse_ln(ln_y);
        let t = ((self.theta.ln() - theta_p.ln()) / self.alpha).max(0.0);
        self.generator.h_inverse(t)
    }

    /// `n` draws by inverse transform, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return domain("sample size must be at least 1");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| self.quantile(rng.gen::<f64>()))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(values, format!("{self} (seed {seed})"), DatasetSource::Simulated)
    }

    /// Whether α counts as a free parameter.
    pub fn alpha_is_free(&self) -> bool {
        self.generator.alpha_role() == AlphaRole::Free
    }
}

impl fmt::Display for EwpsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} x {} (theta={}, alpha={})",
            self.mixer, self.generator, self.theta, self.alpha
        )
    }
}
