//! Free-parameter layout of a mixer/generator pair and its unconstrained
//! reparameterisation.

use crate::error::{domain, Result};
use crate::generator::{AlphaRole, ExtendedWeibull, GeneratorKind};
use crate::model::EwpsModel;
use crate::power_series::PowerSeries;

/// Bounds on the unconstrained coordinates; beyond them the objective is infeasible.
const LOGIT_BOUND: f64 = 30.0;
const LOG_BOUND: f64 = 50.0;
const LOG_THETA_LOW: f64 = -30.0;
/// `ln 700`: `e^θ` stays representable.
const LOG_THETA_HIGH: f64 = 6.551_080_335_043_404;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Transform {
    /// `(0, 1)` via the logit.
    Logit,
    /// `(0, ∞)` via the logarithm, with explicit bounds on the log.
    Log { low: f64, high: f64 },
    Identity,
}

impl Transform {
    pub fn forward(&self, v: f64) -> f64 {
        match self {
            Transform::Logit => (v / (1.0 - v)).ln(),
            Transform::Log { .. } => v.ln(),
            Transform::Identity => v,
        }
    }

    pub fn inverse(&self, eta: f64) -> f64 {
        match self {
            Transform::Logit => 1.0 / (1.0 + (-eta).exp()),
            Transform::Log { .. } => eta.exp(),
            Transform::Identity => eta,
        }
    }

    /// `d(natural)/d(eta)` at natural value `v`.
    pub fn jacobian(&self, v: f64) -> f64 {
        match self {
            Transform::Logit => v * (1.0 - v),
            Transform::Log { .. } => v,
            Transform::Identity => 1.0,
        }
    }

    /// `d²(natural)/d(eta)²` at natural value `v`.
    pub fn curvature(&self, v: f64) -> f64 {
        match self {
            Transform::Logit => v * (1.0 - v) * (1.0 - 2.0 * v),
            Transform::Log { .. } => v,
            Transform::Identity => 0.0,
        }
    }

    pub fn in_bounds(&self, eta: f64) -> bool {
        match self {
            Transform::Logit => eta.abs() <= LOGIT_BOUND,
            Transform::Log { low, high } => eta >= *low && eta <= *high,
            Transform::Identity => eta.is_finite(),
        }
    }

    pub fn clamp(&self, eta: f64) -> f64 {
        match self {
            Transform::Logit => eta.clamp(-LOGIT_BOUND, LOGIT_BOUND),
            Transform::Log { low, high } => eta.clamp(*low, *high),
            Transform::Identity => eta,
        }
    }

    /// Whether `eta` sits on one of the artificial bounds.
    pub fn at_bound(&self, eta: f64) -> bool {
        match self {
            Transform::Logit => LOGIT_BOUND - eta.abs() < 1e-6,
            Transform::Log { low, high } => eta - low < 1e-6 || high - eta < 1e-6,
            Transform::Identity => false,
        }
    }
}

/// Which parameters are free for a mixer/generator pair, in the order
/// `θ, α, ξ…`. Fixed quantities (α = 1 for fixed-α generators, the Pareto
/// threshold) are carried along but excluded from the vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamLayout {
    mixer: PowerSeries,
    kind: GeneratorKind,
    alpha_free: bool,
    xi_free: Vec<usize>,
    xi_fixed: [f64; 2],
    relaxed: bool,
}

impl ParamLayout {
    /// Layout for fitting `data`-independent parameters; `pareto_k` fixes the
    /// Pareto threshold and is ignored by other generators.
    pub fn new(mixer: PowerSeries, kind: GeneratorKind, pareto_k: Option<f64>) -> Result<Self> {
        let mut xi_fixed = [0.0; 2];
        let xi_free = if kind == GeneratorKind::Pareto {
            match pareto_k {
                Some(k) if k > 0.0 && k.is_finite() => xi_fixed[0] = k,
                _ => return domain("a Pareto generator needs a positive threshold k"),
            }
            vec![]
        } else {
            (0..kind.xi_dim()).collect()
        };
        Ok(ParamLayout {
            mixer,
            kind,
            alpha_free: kind.alpha_role() == AlphaRole::Free,
            xi_free,
            xi_fixed,
            relaxed: kind == GeneratorKind::ModifiedWeibull,
        })
    }

    /// Layout matching an existing model, with the Pareto threshold held at its value.
    pub fn for_model(model: &EwpsModel) -> Self {
        let g = model.generator();
        let k = (g.kind() == GeneratorKind::Pareto).then(|| g.xi()[0]);
        let mut layout = ParamLayout::new(model.mixer(), g.kind(), k).expect("model parameters are valid");
        layout.relaxed = g.kind() == GeneratorKind::ModifiedWeibull;
        layout
    }

    pub fn mixer(&self) -> PowerSeries {
        self.mixer
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn alpha_free(&self) -> bool {
        self.alpha_free
    }

    pub fn dim(&self) -> usize {
        1 + self.alpha_free as usize + self.xi_free.len()
    }

    /// Position of α in the free vector.
    pub(crate) fn alpha_index(&self) -> Option<usize> {
        self.alpha_free.then_some(1)
    }

    /// Position of the first ξ component in the free vector.
    pub(crate) fn xi_offset(&self) -> usize {
        1 + self.alpha_free as usize
    }

    pub(crate) fn xi_free(&self) -> &[usize] {
        &self.xi_free
    }

    pub fn names(&self) -> Vec<String> {
        let mut names = vec!["theta".to_string()];
        if self.alpha_free {
            names.push("alpha".into());
        }
        for &i in &self.xi_free {
            names.push(self.kind.xi_names()[i].into());
        }
        names
    }

    /// Builds the model; modified Weibull generators use the relaxed λ domain.
    pub fn model(&self, params: &[f64]) -> Result<EwpsModel> {
        if params.len() != self.dim() {
            return domain(format!("expected {} parameters, got {}", self.dim(), params.len()));
        }
        let alpha = if self.alpha_free { params[1] } else { 1.0 };
        let mut xi = self.xi_fixed;
        for (j, &i) in self.xi_free.iter().enumerate() {
            xi[i] = params[self.xi_offset() + j];
        }
        let xi = &xi[..self.kind.xi_dim()];
        let g = if self.relaxed {
            ExtendedWeibull::new_relaxed(self.kind, xi)?
        } else {
            ExtendedWeibull::new(self.kind, xi)?
        };
        EwpsModel::new(self.mixer, g, params[0], alpha)
    }

    pub fn vector(&self, model: &EwpsModel) -> Vec<f64> {
        let mut v = vec![model.theta()];
        if self.alpha_free {
            v.push(model.alpha());
        }
        for &i in &self.xi_free {
            v.push(model.xi()[i]);
        }
        v
    }

    pub(crate) fn transforms(&self) -> Vec<Transform> {
        let mut t = vec![if self.mixer.theta_domain().1.is_finite() {
            Transform::Logit
        } else {
            Transform::Log {
                low: LOG_THETA_LOW,
                high: LOG_THETA_HIGH,
            }
        }];
        let log = Transform::Log {
            low: -LOG_BOUND,
            high: LOG_BOUND,
        };
        if self.alpha_free {
            t.push(log);
        }
        for &i in &self.xi_free {
            let lambda = self.kind == GeneratorKind::ModifiedWeibull && i == 1;
            t.push(if lambda { Transform::Identity } else { log });
        }
        t
    }

    /// Maps natural parameters to the unconstrained coordinates used by the
    /// optimiser: logit or log of θ, log of α and of positive ξ components,
    /// identity for the modified-Weibull λ. Values are clamped to the
    /// artificial bounds.
    pub fn to_eta(&self, params: &[f64]) -> Vec<f64> {
        self.transforms()
            .iter()
            .zip(params)
            .map(|(t, v)| t.clamp(t.forward(*v)))
            .collect()
    }

    pub fn from_eta(&self, eta: &[f64]) -> Vec<f64> {
        self.transforms().iter().zip(eta).map(|(t, e)| t.inverse(*e)).collect()
    }
}
