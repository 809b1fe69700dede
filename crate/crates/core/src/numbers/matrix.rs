use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::denom::{denom_mat, BaseField};
use super::gauss::GaussRat;
use crate::error::{Error, Result};

/// A 2x2 matrix over `Q(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    e: [[GaussRat; 2]; 2],
}

impl Mat2 {
    pub fn new(e: [[GaussRat; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn from_ints(e: [[i64; 2]; 2]) -> Self {
        Self::new(e.map(|row| row.map(|x| GaussRat::from_ints(x, 0))))
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0], [0, 1]])
    }

    pub fn zero() -> Self {
        Self::from_ints([[0, 0], [0, 0]])
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussRat {
        &self.e[i][j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &GaussRat> {
        self.e.iter().flatten()
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(GaussRat::is_zero)
    }

    pub fn det(&self) -> GaussRat {
        &(&self.e[0][0] * &self.e[1][1]) - &(&self.e[0][1] * &self.e[1][0])
    }

    pub fn adjugate(&self) -> Self {
        let [[a, b], [c, d]] = &self.e;
        Self::new([[d.clone(), -b], [-c, a.clone()]])
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let inv = det.inverse()?;
        Ok(Self::new(self.adjugate().e.map(|row| row.map(|x| &x * &inv))))
    }

    /// Largest squared complex modulus among the entries.
    pub fn max_entry_norm(&self) -> BigRational {
        self.entries().map(GaussRat::norm).max().expect("four entries")
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1])
    }
}

impl Mul<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        let cell = |i: usize, j: usize| &(&self.e[i][0] * &o.e[0][j]) + &(&self.e[i][1] * &o.e[1][j]);
        Mat2::new([[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]])
    }
}

impl Add<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn add(self, o: &Mat2) -> Mat2 {
        let cell = |i: usize, j: usize| &self.e[i][j] + &o.e[i][j];
        Mat2::new([[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]])
    }
}

impl Sub<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn sub(self, o: &Mat2) -> Mat2 {
        let cell = |i: usize, j: usize| &self.e[i][j] - &o.e[i][j];
        Mat2::new([[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]])
    }
}

/// `ab - ba`.
pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    &(a * b) - &(b * a)
}

/// Outcome of [`certify_commuting`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `denom([a,b]) * arch_bound < 1`, so the product formula forces `[a,b] = 0`.
    ForcedZero { denominator: BigInt },
    /// The commutator vanishes, but the bound alone would not force it.
    IsZero { denominator: BigInt },
    /// The commutator is nonzero (and the gate correctly did not fire).
    NotForced { denominator: BigInt },
}

impl Certificate {
    pub fn commutes(&self) -> bool {
        !matches!(self, Certificate::NotForced { .. })
    }
}

/// Decides whether the product formula forces `a` and `b` to commute, given an
/// asserted upper bound on the squared modulus of every commutator entry.
///
/// A nonzero entry `x` satisfies `denom(x) |x|^2 >= 1`, so a commutator with
/// `denom * arch_bound < 1` must vanish.
pub fn certify_commuting(a: &Mat2, b: &Mat2, arch_bound: &BigRational) -> Result<Certificate> {
    let c = commutator(a, b);
    let actual = c.max_entry_norm();
    if actual > *arch_bound {
        return Err(Error::ArchBoundViolated { bound: Box::new(arch_bound.clone()), actual: Box::new(actual) });
    }
    let denominator = denom_mat(&c, BaseField::GaussianRationals)?;
    let forced = BigRational::from_integer(denominator.clone()) * arch_bound < BigRational::one();
    match (forced, c.is_zero()) {
        (true, true) => Ok(Certificate::ForcedZero { denominator }),
        (true, false) => Err(Error::ForcedButNonzero),
        (false, true) => Ok(Certificate::IsZero { denominator }),
        (false, false) => Ok(Certificate::NotForced { denominator }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn commutator_examples() {
        let d1 = Mat2::from_ints([[2, 0], [0, 5]]);
        let d2 = Mat2::from_ints([[-3, 0], [0, 7]]);
        assert!(commutator(&d1, &d2).is_zero());
        let a = Mat2::from_ints([[1, 1], [0, 1]]);
        let b = Mat2::from_ints([[1, 0], [1, 1]]);
        assert_eq!(commutator(&a, &b), Mat2::from_ints([[1, 0], [0, -1]]));
        assert!(commutator(&a, &a).is_zero());
    }

    #[test]
    fn certifier_cases() {
        let d1 = Mat2::from_ints([[2, 0], [0, 5]]);
        let d2 = Mat2::from_ints([[-3, 0], [0, 7]]);
        let cert = certify_commuting(&d1, &d2, &frac(1, 10)).unwrap();
        assert_eq!(cert, Certificate::ForcedZero { denominator: BigInt::one() });
        let cert = certify_commuting(&d1, &d2, &frac(3, 1)).unwrap();
        assert_eq!(cert, Certificate::IsZero { denominator: BigInt::one() });

        let a = Mat2::from_ints([[1, 1], [0, 1]]);
        let b = Mat2::from_ints([[1, 0], [1, 1]]);
        assert!(matches!(certify_commuting(&a, &b, &frac(1, 2)), Err(Error::ArchBoundViolated { .. })));
        let cert = certify_commuting(&a, &b, &frac(1, 1)).unwrap();
        assert!(!cert.commutes());
    }

    #[test]
    fn inverse_and_det() {
        let m = Mat2::new([
            [GaussRat::from_fracs(1, 2, 1, 3), GaussRat::from_ints(2, 0)],
            [GaussRat::from_ints(0, 1), GaussRat::from_fracs(3, 1, -1, 5)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Mat2::identity());
        assert_eq!(Mat2::zero().inverse(), Err(Error::Singular));
    }
}
