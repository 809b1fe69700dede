//! Exact arithmetic in `Q` and `Q(i)`: Gaussian factorization, denominators
//! at finite places, the product formula, and the commutator certifier.

mod denom;
mod gauss;
mod matrix;

pub use denom::{denom, denom_local, denom_mat, product_formula_check, BaseField, Place};
pub use gauss::{gaussian_factor, GaussFactorization, GaussInt, GaussPrime, GaussRat};
pub use matrix::{certify_commuting, commutator, Certificate, Mat2};
