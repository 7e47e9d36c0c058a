//! Numerical building blocks: quadrature, root finding, optimisation, special functions.

pub mod fd;
pub mod optim;
pub mod quadrature;
pub mod roots;
pub mod special;
