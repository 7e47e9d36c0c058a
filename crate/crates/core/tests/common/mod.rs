#![allow(dead_code)]

use ewps::{EwpsModel, GeneratorKind, PowerSeries};

pub fn pairs() -> Vec<(PowerSeries, GeneratorKind)> {
    let mut out = Vec::new();
    for ps in PowerSeries::all() {
        for kind in GeneratorKind::ALL {
            out.push((ps, kind));
        }
    }
    out
}

/// `(α, ξ)` used for each generator in whole-family sweeps.
pub fn generator_setting(kind: GeneratorKind) -> (f64, Vec<f64>) {
    match kind {
        GeneratorKind::Exponential => (1.5, vec![]),
        GeneratorKind::Weibull => (1.2, vec![1.7]),
        GeneratorKind::ModifiedWeibull => (1.0, vec![1.3, 0.4]),
        GeneratorKind::Pareto => (2.5, vec![0.5]),
        GeneratorKind::Gompertz => (0.8, vec![0.6]),
        GeneratorKind::Rayleigh => (1.1, vec![]),
        GeneratorKind::Chen => (0.9, vec![1.2]),
        GeneratorKind::ExponentialPower => (1.0, vec![0.8, 1.3]),
    }
}

pub fn theta_setting(ps: PowerSeries) -> f64 {
    if ps == PowerSeries::Poisson {
        1.2
    } else {
        0.6
    }
}

pub fn model(ps: PowerSeries, kind: GeneratorKind) -> EwpsModel {
    let (alpha, xi) = generator_setting(kind);
    EwpsModel::with_params(ps, kind, theta_setting(ps), alpha, &xi).unwrap()
}
