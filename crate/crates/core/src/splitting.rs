//! Complete splitting of rational primes in the field cut out by a monic
//! integer polynomial, and empirical splitting densities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::{is_prime, mul_mod, primes_in, primes_up_to};

/// Integer polynomial, coefficients stored from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    /// `coeffs[k]` is the coefficient of `x^k`. Trailing zeros are dropped; the
    /// result must have degree >= 1.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::PolyParse { input: format!("{coeffs:?}"), reason: "degree must be at least 1".into() });
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn reduce(&self, p: u64) -> Vec<u64> {
        let mut v: Vec<u64> = self.coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        trim(&mut v);
        v
    }

    /// `f(x) mod p`.
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        self.reduce(p).iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.unsigned_abs();
            let body = match (k, mag) {
                (0, m) => m.to_string(),
                (_, 1) => String::new(),
                (_, m) => m.to_string(),
            };
            let var = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            write!(f, "{sign}{body}{var}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = Error;

    /// Parses signed monomials in `x` joined by `+`/`-`, e.g. `x^3-2`, `-3x^2+x+1`.
    fn from_str(input: &str) -> Result<Self> {
        let err = |reason: &str| Error::PolyParse { input: input.to_string(), reason: reason.to_string() };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty"));
        }
        let mut coeffs: Vec<i64> = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'+' => (false, &rest[1..]),
                b'-' => (true, &rest[1..]),
                _ if coeffs.is_empty() && rest.len() == s.len() => (false, rest),
                _ => return Err(err("expected + or -")),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coef, power) = match term.find('x') {
                None => (term.parse::<i64>().map_err(|_| err("bad constant"))?, 0usize),
                Some(i) => {
                    let c = match term[..i].trim_end_matches('*') {
                        "" => 1,
                        digits => digits.parse::<i64>().map_err(|_| err("bad coefficient"))?,
                    };
                    let pow = match &term[i + 1..] {
                        "" => 1,
                        tail => tail
                            .strip_prefix('^')
                            .ok_or_else(|| err("expected ^ after x"))?
                            .parse::<usize>()
                            .map_err(|_| err("bad exponent"))?,
                    };
                    (c, pow)
                }
            };
            if power > 64 {
                return Err(err("degree too large"));
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, 0);
            }
            let signed = if neg { -coef } else { coef };
            coeffs[power] = coeffs[power].checked_add(signed).ok_or_else(|| err("coefficient overflow"))?;
        }
        IntPoly::new(coeffs)
    }
}

// Polynomials over F_p, constant term first, no trailing zeros (zero = empty).

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::primes::pow_mod(a, p - 2, p)
}

fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let top = a.len() - 1;
        let q = mul_mod(a[top], lead_inv, p);
        if q != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = top - dm + i;
                a[idx] = (a[idx] + p - mul_mod(q, c, p)) % p;
            }
        }
        a.pop();
        trim(&mut a);
    }
    trim(&mut a);
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(out, m, p)
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn derivative(a: &[u64], p: u64) -> Vec<u64> {
    let mut d: Vec<u64> = a.iter().enumerate().skip(1).map(|(k, &c)| mul_mod(c, k as u64 % p, p)).collect();
    trim(&mut d);
    d
}

/// `x^e mod (m, p)` by square-and-multiply.
fn x_pow_mod(e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = poly_rem(vec![1], m, p);
    let mut base = poly_rem(vec![0, 1], m, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    result
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitStatus {
    /// `deg f` distinct roots mod p.
    Split,
    /// Unramified but not completely split.
    NotSplit,
    /// `p` divides the discriminant (f is not squarefree mod p).
    Bad,
}

/// Classifies `p` for a monic `f`: squarefree mod p via `gcd(f, f')`, then
/// complete splitting iff `x^p ≡ x (mod f, p)`.
pub fn split_status(f: &IntPoly, p: u64) -> Result<SplitStatus> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let fp = f.reduce(p);
    if poly_gcd(fp.clone(), derivative(&fp, p), p).len() > 1 {
        return Ok(SplitStatus::Bad);
    }
    let xp = x_pow_mod(p, &fp, p);
    let x = poly_rem(vec![0, 1], &fp, p);
    Ok(if xp == x { SplitStatus::Split } else { SplitStatus::NotSplit })
}

/// True iff `p` is unramified and splits completely; bad primes report false.
pub fn splits_completely(f: &IntPoly, p: u64) -> Result<bool> {
    Ok(split_status(f, p)? == SplitStatus::Split)
}

/// Split primes in `[lo, hi]`, ascending.
pub fn split_primes_in(f: &IntPoly, lo: u64, hi: u64) -> Result<Vec<u64>> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if lo > hi {
        return Err(Error::OutOfRange(format!("empty range [{lo}, {hi}]")));
    }
    let candidates = primes_in(lo, hi);
    let flags: Vec<bool> = candidates
        .par_chunks(4096)
        .map(|chunk| chunk.iter().map(|&p| splits_completely(f, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(candidates.into_iter().zip(flags).filter_map(|(p, s)| s.then_some(p)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density {
    pub split: u64,
    pub primes: u64,
}

impl Density {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.split), BigInt::from(self.primes))
    }

    pub fn as_f64(&self) -> f64 {
        self.split as f64 / self.primes as f64
    }
}

/// `#{p <= limit split} / #{p <= limit}`.
pub fn empirical_density(f: &IntPoly, limit: u64) -> Result<Density> {
    if limit < 100 {
        return Err(Error::OutOfRange(format!("limit {limit} < 100")));
    }
    let primes = primes_up_to(limit).len() as u64;
    let split = split_primes_in(f, 2, limit)?.len() as u64;
    Ok(Density { split, primes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn brute_roots(f: &IntPoly, p: u64) -> usize {
        (0..p).filter(|&x| f.eval_mod(x, p) == 0).count()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(poly("x^3-2").coeffs(), &[-2, 0, 0, 1]);
        assert_eq!(poly("x^2 + 1").coeffs(), &[1, 0, 1]);
        assert_eq!(poly("-3x^2+x-1").coeffs(), &[-1, 1, -3]);
        assert_eq!(poly("x-1").coeffs(), &[-1, 1]);
        assert_eq!(poly("x^4+1").to_string(), "x^4+1");
        assert_eq!(poly("-3x^2+x-1").to_string(), "-3x^2+x-1");
        for bad in ["", "x^", "2", "x^2++1", "y+1", "x^a"] {
            assert!(bad.parse::<IntPoly>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn split_examples() {
        assert!(splits_completely(&poly("x^2+1"), 5).unwrap());
        assert!(!splits_completely(&poly("x^2+1"), 7).unwrap());
        assert!(splits_completely(&poly("x^3-2"), 31).unwrap());
        assert_eq!(split_status(&poly("x^3-2"), 3).unwrap(), SplitStatus::Bad);
        assert_eq!(split_status(&poly("x^2+1"), 2).unwrap(), SplitStatus::Bad);
        assert_eq!(splits_completely(&poly("2x^2+1"), 5), Err(Error::NotMonic));
        assert_eq!(splits_completely(&poly("x^2+1"), 9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn split_ranges() {
        assert_eq!(split_primes_in(&poly("x^2+1"), 2, 30).unwrap(), vec![5, 13, 17, 29]);
        assert_eq!(split_primes_in(&poly("x-1"), 2, 50).unwrap(), primes_up_to(50));
        assert_eq!(split_primes_in(&poly("x^3-2"), 2, 200).unwrap(), vec![31, 43, 109, 127, 157]);
        assert_eq!(split_primes_in(&poly("x^2+1"), 50, 100).unwrap(), vec![53, 61, 73, 89, 97]);
    }

    #[test]
    fn agrees_with_root_counting() {
        for s in ["x^2+1", "x^3-2", "x^2-2", "x^4+1"] {
            let f = poly(s);
            for p in primes_up_to(500) {
                let status = split_status(&f, p).unwrap();
                if status != SplitStatus::Bad {
                    assert_eq!(status == SplitStatus::Split, brute_roots(&f, p) == f.degree(), "{s} at {p}");
                }
            }
        }
    }

    #[test]
    fn degree_one_density_is_one() {
        let d = empirical_density(&poly("x-1"), 1000).unwrap();
        assert_eq!(d.ratio(), BigRational::from_integer(1.into()));
        assert!(empirical_density(&poly("x-1"), 50).is_err());
    }
}
