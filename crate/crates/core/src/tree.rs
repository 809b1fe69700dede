//! The Bruhat-Tits tree of `SL2(Q_p)` as a rooted `(p+1)`-regular tree.
//!
//! A vertex is a reduced word: the first digit is in `0..=p` (one of the
//! `p + 1` neighbors of the root), every later digit is in `0..p` (one of the
//! `p` neighbors that move away from the root). The empty word is the root,
//! i.e. the identity coset of the maximal compact subgroup. Word length is the
//! distance to the root and two vertices are adjacent exactly when one word
//! extends the other by a single digit.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::is_prime;

/// Spheres larger than this are never materialized; use [`SphereIter`] or
/// [`count_sphere_by_enumeration`] instead.
pub const MATERIALIZE_MAX_VERTICES: u128 = 1 << 20;
pub const MATERIALIZE_MAX_RADIUS: u32 = 8;
pub const MATERIALIZE_MAX_PRIME: u64 = 13;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    prime: u64,
    word: Vec<u32>,
}

impl TreeVertex {
    pub fn root(prime: u64) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self { prime, word: Vec::new() })
    }

    pub fn from_word(prime: u64, word: Vec<u32>) -> Result<Self> {
        check_prime(prime)?;
        for (i, &d) in word.iter().enumerate() {
            let bound = if i == 0 { prime } else { prime - 1 };
            if d as u64 > bound {
                return Err(Error::InvalidWord { prime, reason: format!("digit {d} at position {i} exceeds {bound}") });
            }
        }
        Ok(Self { prime, word })
    }

    /// The vertex `0^r`, used as the canonical representative of the sphere of radius `r`.
    pub fn canonical(prime: u64, r: u32) -> Result<Self> {
        Self::from_word(prime, vec![0; r as usize])
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn depth(&self) -> u32 {
        self.word.len() as u32
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, rest) = self.word.split_last()?;
        Some(Self { prime: self.prime, word: rest.to_vec() })
    }

    /// Neighbors farther from the root.
    pub fn children(&self) -> impl Iterator<Item = TreeVertex> + '_ {
        let fan = if self.is_root() { self.prime + 1 } else { self.prime };
        (0..fan as u32).map(move |d| {
            let mut word = self.word.clone();
            word.push(d);
            Self { prime: self.prime, word }
        })
    }

    pub fn neighbors(&self) -> Vec<TreeVertex> {
        self.parent().into_iter().chain(self.children()).collect()
    }

    pub fn is_adjacent(&self, other: &Self) -> bool {
        if self.prime != other.prime {
            return false;
        }
        let (short, long) =
            if self.word.len() <= other.word.len() { (&self.word, &other.word) } else { (&other.word, &self.word) };
        long.len() == short.len() + 1 && long.starts_with(short)
    }

    pub fn common_prefix_len(&self, other: &Self) -> usize {
        self.word.iter().zip(&other.word).take_while(|(a, b)| a == b).count()
    }

    pub fn distance(&self, other: &Self) -> Result<u32> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(word_distance(&self.word, &other.word))
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}[", self.prime)?;
        for (i, d) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

pub(crate) fn word_distance(a: &[u32], b: &[u32]) -> u32 {
    let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    (a.len() + b.len() - 2 * common) as u32
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `(p+1) p^(r-1)` for `r >= 1`, `1` for `r = 0`; `None` on overflow.
pub fn sphere_size(p: u64, r: u32) -> Option<u128> {
    if r == 0 {
        return Some(1);
    }
    (p as u128).checked_pow(r - 1)?.checked_mul(p as u128 + 1)
}

/// All vertices at distance exactly `r` from the root, in lexicographic order.
///
/// Only small spheres are materialized; see [`MATERIALIZE_MAX_VERTICES`].
pub fn sphere(p: u64, r: u32) -> Result<Vec<TreeVertex>> {
    check_prime(p)?;
    let size = sphere_size(p, r).ok_or(Error::Overflow("sphere size"))?;
    if p > MATERIALIZE_MAX_PRIME || r > MATERIALIZE_MAX_RADIUS || size > MATERIALIZE_MAX_VERTICES {
        return Err(Error::OutOfRange(format!(
            "sphere(p = {p}, r = {r}) has {size} vertices; stream it with SphereIter"
        )));
    }
    Ok(SphereIter::new(p, r)?.collect())
}

/// Streams the sphere of radius `r` in lexicographic order without materializing it.
pub struct SphereIter {
    prime: u64,
    digits: Vec<u32>,
    done: bool,
}

impl SphereIter {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { prime: p, digits: vec![0; r as usize], done: false })
    }
}

impl Iterator for SphereIter {
    type Item = TreeVertex;

    fn next(&mut self) -> Option<TreeVertex> {
        if self.done {
            return None;
        }
        let out = TreeVertex { prime: self.prime, word: self.digits.clone() };
        self.done = !advance(&mut self.digits, self.prime as u32, 0);
        Some(out)
    }
}

// Odometer step over reduced words of fixed length; `first` is the index of
// the leading digit (the only one allowed to reach p). Returns false on wrap.
fn advance(digits: &mut [u32], p: u32, first: usize) -> bool {
    for i in (0..digits.len()).rev() {
        let max = if i == first { p } else { p - 1 };
        if digits[i] < max {
            digits[i] += 1;
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Visits every word of the sphere of radius `r` (as a digit slice).
pub fn for_each_in_sphere(p: u64, r: u32, mut visit: impl FnMut(&[u32])) -> Result<()> {
    check_prime(p)?;
    let mut digits = vec![0u32; r as usize];
    loop {
        visit(&digits);
        if !advance(&mut digits, p as u32, 0) {
            return Ok(());
        }
    }
}

/// Counts the sphere by walking it, split across threads by leading digit.
pub fn count_sphere_by_enumeration(p: u64, r: u32) -> Result<u128> {
    check_prime(p)?;
    if r == 0 {
        return Ok(1);
    }
    let total = (0..=p as u32)
        .into_par_iter()
        .map(|_lead| {
            let mut tail = vec![0u32; r as usize - 1];
            let mut n = 0u128;
            loop {
                n += 1;
                // no leading digit in the tail: every position ranges over 0..p
                if !advance(&mut tail, p as u32, usize::MAX) {
                    break;
                }
            }
            n
        })
        .sum();
    Ok(total)
}

/// `#{ z : d(o, z) = a, d(z, y) = b }` for any `y` with `d(o, y) = r`.
///
/// Computed by classifying `z` on the length `k` of its common prefix with
/// the canonical `y = 0^r`, which fixes `d(z, y) = a + r - 2k`.
pub fn convolution_count(p: u64, a: u32, b: u32, r: u32) -> Result<u128> {
    check_prime(p)?;
    for x in [a, b, r] {
        if x % 2 == 1 {
            return Err(Error::OddRadius(x));
        }
    }
    prefix_count(p, a, b, r).ok_or(Error::Overflow("convolution count"))
}

pub(crate) fn prefix_count(p: u64, a: u32, b: u32, r: u32) -> Option<u128> {
    if a + r < b || (a + r - b) % 2 == 1 {
        return Some(0);
    }
    let k = (a + r - b) / 2;
    if k > a.min(r) {
        return Some(0);
    }
    let p = p as u128;
    if k == a {
        // z is the prefix 0^a of y
        Some(1)
    } else if k == r {
        // y is a proper prefix of z
        if r == 0 {
            sphere_size(p as u64, a)
        } else {
            p.checked_pow(a - r)
        }
    } else if k == 0 {
        // z leaves through one of the p first digits other than y's
        p.checked_pow(a)
    } else {
        (p - 1).checked_mul(p.checked_pow(a - k - 1)?)
    }
}
