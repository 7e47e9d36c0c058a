//! Conditional distribution of the latent count given an observation.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{domain, Result};
use crate::model::EwpsModel;

/// `E(Z | X = xᵢ)` for each observation; every entry is at least 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatentPosterior {
    pub z_expectations: Vec<f64>,
}

impl LatentPosterior {
    pub fn mean(&self) -> f64 {
        self.z_expectations.iter().sum::<f64>() / self.z_expectations.len() as f64
    }
}

pub(crate) fn z_values(model: &EwpsModel, xs: &[f64]) -> Vec<f64> {
    let ps = model.mixer();
    let g = model.generator();
    xs.iter()
        .map(|&x| {
            let u = model.theta() * (-model.alpha() * g.h_big(x)).exp();
            1.0 + u * ps.ratio2(u)
        })
        .collect()
}

/// `E(Z | x) = 1 + u C″(u)/C′(u)` with `u = θe^{−αH(x)}`.
pub fn e_step(model: &EwpsModel, data: &Dataset) -> LatentPosterior {
    LatentPosterior {
        z_expectations: z_values(model, data.values()),
    }
}

/// `P(Z = z | X = x) = z a_z u^{z−1} / C′(u)`.
pub fn latent_pmf(model: &EwpsModel, x: f64, z: u64) -> Result<f64> {
    if z == 0 {
        return domain("the latent count is at least 1");
    }
    let g = model.generator();
    if !(x >= g.support_low() && x < g.support_ceiling()) {
        return domain(format!("x = {x} is outside the support"));
    }
    let ps = model.mixer();
    let u = model.theta() * (-model.alpha() * g.h_big(x)).exp();
    let ln_a = ps.ln_coefficient(z);
    if ln_a == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let zf = z as f64;
    let ln_power = if z == 1 { 0.0 } else { (zf - 1.0) * u.ln() };
    Ok((zf.ln() + ln_a + ln_power - ps.ln_c1(u)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::GeneratorKind;
    use crate::power_series::PowerSeries;

    #[test]
    fn geometric_value() {
        // u = θe^{−αx} = 0.5 with θ = 0.75, α = 1, x = ln 1.5
        let m = EwpsModel::with_params(PowerSeries::Geometric, GeneratorKind::Exponential, 0.75, 1.0, &[]).unwrap();
        let z = z_values(&m, &[1.5f64.ln()]);
        assert!((z[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_theta_gives_one() {
        for ps in PowerSeries::all() {
            let m = EwpsModel::with_params(ps, GeneratorKind::Weibull, 1e-12, 1.0, &[2.0]).unwrap();
            for z in z_values(&m, &[0.01, 1.0, 4.0]) {
                assert!((z - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pmf_sums_to_one_with_matching_mean() {
        for ps in PowerSeries::all() {
            let m = EwpsModel::with_params(ps, GeneratorKind::Exponential, 0.8, 0.7, &[]).unwrap();
            for x in [0.05, 0.6, 3.0] {
                let (mut total, mut mean) = (0.0, 0.0);
                for z in 1..=2000u64 {
                    let p = latent_pmf(&m, x, z).unwrap();
                    total += p;
                    mean += z as f64 * p;
                    if z > 10 && p < 1e-17 {
                        break;
                    }
                }
                assert!((total - 1.0).abs() < 1e-10, "{ps} sum {total}");
                assert!((mean - z_values(&m, &[x])[0]).abs() < 1e-10, "{ps} mean {mean}");
            }
        }
    }
}
