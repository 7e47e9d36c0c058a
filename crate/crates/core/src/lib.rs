//! Extended Weibull power-series (EWPS) lifetime distributions.
//!
//! An EWPS variable is the minimum of `N` iid extended-Weibull lifetimes,
//! where `N ≥ 1` follows a zero-truncated power-series law:
//!
//! ```text
//! F(x) = 1 − C(θ e^{−αH(x; ξ)}) / C(θ)
//! ```
//!
//! [`PowerSeries`] supplies `C`, [`ExtendedWeibull`] supplies `H`, and
//! [`EwpsModel`] binds both to parameter values. Fitting lives in
//! [`inference`], data handling in [`data`].

// NaN-rejecting comparisons such as `!(x > 0.0)` are deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod generator;
pub mod inference;
pub mod model;
pub mod numeric;
pub mod power_series;

#[doc(hidden)]
pub mod cli;

pub use data::{Dataset, DatasetSource, Summary};
pub use error::{EwpsError, Result};
pub use generator::{AlphaRole, ExtendedWeibull, GeneratorKind, XiDerivatives};
pub use inference::{FitConfig, FitMethod, FitReport};
pub use model::{EwpsModel, MixtureTruncation};
pub use power_series::PowerSeries;
