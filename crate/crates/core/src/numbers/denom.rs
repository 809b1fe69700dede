//! Denominators at finite places and the product formula over `Q` and `Q(i)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gauss::{to_u64, GaussPrime, GaussRat};
use super::matrix::Mat2;
use crate::error::{Error, Result};
use crate::primes::factor;

/// The number field whose places are used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseField {
    Rationals,
    GaussianRationals,
}

/// A finite place.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Rational(u64),
    Gaussian(GaussPrime),
}

impl Place {
    /// `q_v`.
    pub fn residue_size(&self) -> u64 {
        match self {
            Place::Rational(p) => *p,
            Place::Gaussian(pi) => pi.residue_size(),
        }
    }

    /// `ord_v(x)` for nonzero `x`.
    pub fn valuation(&self, x: &GaussRat) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::Zero);
        }
        match self {
            Place::Rational(p) => {
                if !x.is_rational() {
                    return Err(Error::NotRational(x.to_string()));
                }
                Ok(rational_ord(x.re.numer(), *p) - rational_ord(x.re.denom(), *p))
            }
            Place::Gaussian(pi) => {
                let (alpha, d) = x.split_denominator();
                Ok(pi.valuation(&alpha)? as i64 - pi.rational_valuation(&d)? as i64)
            }
        }
    }
}

fn rational_ord(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        k += 1;
    }
    k
}

fn places_above(p: u64, field: BaseField) -> Vec<Place> {
    match field {
        BaseField::Rationals => vec![Place::Rational(p)],
        BaseField::GaussianRationals => GaussPrime::above(p).into_iter().map(Place::Gaussian).collect(),
    }
}

fn check_field(x: &GaussRat, field: BaseField) -> Result<()> {
    if field == BaseField::Rationals && !x.is_rational() {
        return Err(Error::NotRational(x.to_string()));
    }
    Ok(())
}

/// Rational primes dividing the common denominator of `x`.
fn denominator_primes(x: &GaussRat) -> Result<BTreeSet<u64>> {
    let (_, d) = x.split_denominator();
    Ok(factor(to_u64(&d)?).into_iter().map(|(p, _)| p).collect())
}

/// `max(|x|_v, 1) = q_v^max(-ord_v(x), 0)`; `1` for `x = 0`.
pub fn denom_local(x: &GaussRat, v: &Place) -> Result<BigInt> {
    if x.is_zero() {
        return Ok(BigInt::one());
    }
    let ord = v.valuation(x)?;
    Ok(if ord < 0 { BigInt::from(v.residue_size()).pow((-ord) as u32) } else { BigInt::one() })
}

/// Product of the local denominators over all finite places.
pub fn denom(x: &GaussRat, field: BaseField) -> Result<BigInt> {
    check_field(x, field)?;
    let mut acc = BigInt::one();
    for p in denominator_primes(x)? {
        for v in places_above(p, field) {
            acc *= denom_local(x, &v)?;
        }
    }
    Ok(acc)
}

/// Per place, the largest local denominator among the entries; multiplied over places.
pub fn denom_mat(m: &Mat2, field: BaseField) -> Result<BigInt> {
    let mut primes = BTreeSet::new();
    for x in m.entries() {
        check_field(x, field)?;
        primes.extend(denominator_primes(x)?);
    }
    let mut acc = BigInt::one();
    for p in primes {
        for v in places_above(p, field) {
            let mut worst = BigInt::one();
            for x in m.entries() {
                worst = worst.max(denom_local(x, &v)?);
            }
            acc *= worst;
        }
    }
    Ok(acc)
}

/// `|x|_inf * prod_v |x|_v` over `Q(i)`, with the squared modulus at the complex
/// place. Always exactly 1 for nonzero `x`.
pub fn product_formula_check(x: &GaussRat) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    let (alpha, d) = x.split_denominator();
    let mut primes: BTreeSet<u64> = factor(to_u64(&d)?).into_iter().map(|(p, _)| p).collect();
    primes.extend(factor(to_u64(&alpha.norm())?).into_iter().map(|(p, _)| p));
    let mut acc = x.norm();
    for p in primes {
        for v in places_above(p, BaseField::GaussianRationals) {
            let ord = v.valuation(x)?;
            let q = BigRational::from_integer(BigInt::from(v.residue_size()));
            // |x|_v = q_v^(-ord_v(x))
            acc *= q.pow(-(ord as i32));
        }
    }
    Ok(acc)
}
