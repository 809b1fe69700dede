use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::{factor, sqrt_minus_one};

/// An element of `Z[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Multiplication by `i`.
    pub fn rotate(&self) -> Self {
        Self { re: -&self.im, im: self.re.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }

    /// `self / d` when the quotient lies in `Z[i]`.
    pub fn div_exact(&self, d: &GaussInt) -> Option<GaussInt> {
        let n = d.norm();
        let num = self * &d.conj();
        if num.re.is_multiple_of(&n) && num.im.is_multiple_of(&n) {
            Some(GaussInt { re: num.re / &n, im: num.im / &n })
        } else {
            None
        }
    }

    /// The associate with `re > 0` and `re >= |im|`; `1 + i` for the ramified prime.
    pub fn canonical_associate(&self) -> GaussInt {
        if self.is_zero() {
            return self.clone();
        }
        let mut z = self.clone();
        for _ in 0..4 {
            if z.re.is_positive() && z.re >= z.im.abs() && !(z.re == z.im.abs() && z.im.is_negative()) {
                return z;
            }
            z = z.rotate();
        }
        unreachable!("some associate lies in the canonical sector")
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Mul<&GaussInt> for &GaussInt {
    type Output = GaussInt;
    fn mul(self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

/// A prime of `Z[i]` in canonical associate form, with its residue field size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussPrime {
    generator: GaussInt,
    residue_size: u64,
    rational_prime: u64,
}

impl GaussPrime {
    pub fn generator(&self) -> &GaussInt {
        &self.generator
    }

    /// `q_v`, the norm of the prime.
    pub fn residue_size(&self) -> u64 {
        self.residue_size
    }

    pub fn rational_prime(&self) -> u64 {
        self.rational_prime
    }

    /// The Gaussian primes above a rational prime `p`, ascending by generator.
    pub fn above(p: u64) -> Vec<GaussPrime> {
        match p % 4 {
            _ if p == 2 => vec![GaussPrime { generator: GaussInt::new(1, 1), residue_size: 2, rational_prime: 2 }],
            3 => vec![GaussPrime { generator: GaussInt::new(p, 0), residue_size: p * p, rational_prime: p }],
            _ => {
                let (a, b) = two_squares(p);
                let mut v: Vec<GaussPrime> = [GaussInt::new(a, b), GaussInt::new(a, -(b as i128))]
                    .into_iter()
                    .map(|g| GaussPrime { generator: g.canonical_associate(), residue_size: p, rational_prime: p })
                    .collect();
                v.sort_by(|x, y| (&x.generator.re, &x.generator.im).cmp(&(&y.generator.re, &y.generator.im)));
                v
            }
        }
    }

    /// `ord_v(z)` for nonzero `z`.
    pub fn valuation(&self, z: &GaussInt) -> Result<u32> {
        if z.is_zero() {
            return Err(Error::Zero);
        }
        let mut k = 0;
        let mut z = z.clone();
        while let Some(q) = z.div_exact(&self.generator) {
            z = q;
            k += 1;
        }
        Ok(k)
    }

    /// `ord_v(n)` for a nonzero rational integer, without dividing in `Z[i]`.
    pub fn rational_valuation(&self, n: &BigInt) -> Result<u32> {
        if n.is_zero() {
            return Err(Error::Zero);
        }
        let p = BigInt::from(self.rational_prime);
        let mut n = n.abs();
        let mut k = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            k += 1;
        }
        // (2) = (1+i)^2 is the only ramified prime
        Ok(if self.rational_prime == 2 { 2 * k } else { k })
    }
}

impl fmt::Display for GaussPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

// a^2 + b^2 = p with a > b > 0, for p ≡ 1 mod 4 (Cornacchia).
fn two_squares(p: u64) -> (u64, u64) {
    let mut r0 = p;
    let mut r1 = sqrt_minus_one(p);
    if r1 > p / 2 {
        r1 = p - r1;
    }
    while u128::from(r1) * u128::from(r1) > u128::from(p) {
        (r0, r1) = (r1, r0 % r1);
    }
    let a = r1;
    let b2 = p - a * a;
    let b = b2.isqrt();
    assert_eq!(b * b, b2, "two_squares failed for {p} (stopped at {r0}, {r1})");
    (a.max(b), a.min(b))
}

/// `z = unit * prod pi^e` with canonical primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussFactorization {
    pub unit: GaussInt,
    pub factors: Vec<(GaussPrime, u32)>,
}

impl GaussFactorization {
    pub fn product(&self) -> GaussInt {
        let mut acc = self.unit.clone();
        for (pi, e) in &self.factors {
            for _ in 0..*e {
                acc = &acc * pi.generator();
            }
        }
        acc
    }
}

pub(crate) fn to_u64(n: &BigInt) -> Result<u64> {
    n.abs().to_u64().ok_or_else(|| Error::TooLarge(n.to_string()))
}

/// Factors a nonzero Gaussian integer; the norm must fit in a `u64`.
pub fn gaussian_factor(z: &GaussInt) -> Result<GaussFactorization> {
    if z.is_zero() {
        return Err(Error::Zero);
    }
    let mut rest = z.clone();
    let mut factors = Vec::new();
    for (p, _) in factor(to_u64(&z.norm())?) {
        for pi in GaussPrime::above(p) {
            let mut e = 0;
            while let Some(q) = rest.div_exact(pi.generator()) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.push((pi, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    Ok(GaussFactorization { unit: rest, factors })
}

/// An element of `Q(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`.
    pub fn from_fracs(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(BigRational::new(re_num.into(), re_den.into()), BigRational::new(im_num.into(), im_den.into()))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// Squared complex modulus; the normalized absolute value at the complex place.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Zero);
        }
        let n = self.norm();
        Ok(Self { re: &self.re / &n, im: -&self.im / &n })
    }

    /// Writes `self = alpha / d` with `alpha` in `Z[i]` and `d >= 1` the lcm of
    /// the component denominators.
    pub fn split_denominator(&self) -> (GaussInt, BigInt) {
        let d = self.re.denom().lcm(self.im.denom());
        let alpha =
            GaussInt { re: self.re.numer() * (&d / self.re.denom()), im: self.im.numer() * (&d / self.im.denom()) };
        (alpha, d)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl From<&GaussInt> for GaussRat {
    fn from(z: &GaussInt) -> Self {
        Self::new(BigRational::from_integer(z.re.clone()), BigRational::from_integer(z.im.clone()))
    }
}

impl Add<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Div<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    /// Panics on division by zero; use [`GaussRat::inverse`] to handle it.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inverse().expect("division by zero in Q(i)")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -&self.re, im: -&self.im }
    }
}
