use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Field of values eigenvalues and spectral transforms are computed in.
///
/// `BigRational` gives exact results for rational seeds; `f64` is the
/// fallback for real seeds, compared with a relative tolerance.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i128(n: i128) -> Self;

    fn zero() -> Self {
        Self::from_i128(0)
    }

    fn one() -> Self {
        Self::from_i128(1)
    }
}

impl Scalar for BigRational {
    fn from_i128(n: i128) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

impl Scalar for f64 {
    fn from_i128(n: i128) -> Self {
        n as f64
    }
}

/// `|a - b| <= tol * max(|a|, |b|, 1)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
