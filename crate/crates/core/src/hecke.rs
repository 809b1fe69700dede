//! The spherical Hecke algebra of `SL2(Q_p)` and its restricted product over
//! several primes.
//!
//! A local element is a finitely supported integer function of the radius
//! `2j` of the double coset `K diag(p^j, p^-j) K`; the basic operator
//! `tau_{p^j}` is the indicator of radius `2j` and `delta` is radius 0.
//! Convolution is bilinear with structure constants given by
//! [`tree::convolution_count`].

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{self, check_prime, sphere_size};

/// Largest input radius accepted by [`convolve`].
pub const RADIUS_CAP: u32 = 8;
/// Longest eigenvalue sequence: `lambda_{p^j}` for `j <= MAX_EIGEN_J`.
pub const MAX_EIGEN_J: u32 = RADIUS_CAP / 2 + 1;

const SLOTS: usize = (RADIUS_CAP / 2 + 1) as usize;
const OUT_SLOTS: usize = RADIUS_CAP as usize + 1;

/// Structure constants `N(a, b, r)` for even `a, b <= RADIUS_CAP`.
struct StructureTable {
    counts: [[[u128; OUT_SLOTS]; SLOTS]; SLOTS],
}

impl StructureTable {
    fn build(p: u64) -> Result<Self> {
        let mut counts = [[[0u128; OUT_SLOTS]; SLOTS]; SLOTS];
        for (ia, row) in counts.iter_mut().enumerate() {
            for (ib, cell) in row.iter_mut().enumerate() {
                for (ir, slot) in cell.iter_mut().enumerate().take(ia + ib + 1) {
                    *slot = tree::convolution_count(p, 2 * ia as u32, 2 * ib as u32, 2 * ir as u32)?;
                }
            }
        }
        Ok(Self { counts })
    }

    fn get(&self, a: u32, b: u32, r: u32) -> u128 {
        self.counts[(a / 2) as usize][(b / 2) as usize][(r / 2) as usize]
    }
}

fn structure_table(p: u64) -> Result<Arc<StructureTable>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<StructureTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("structure cache poisoned").get(&p) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(StructureTable::build(p)?);
    let mut guard = cache.write().expect("structure cache poisoned");
    Ok(Arc::clone(guard.entry(p).or_insert(table)))
}

fn check_radius(r: u32) -> Result<()> {
    if r % 2 == 1 {
        return Err(Error::OddRadius(r));
    }
    if r > RADIUS_CAP {
        return Err(Error::RadiusCap { radius: r, cap: RADIUS_CAP });
    }
    Ok(())
}

fn to_i128(n: u128) -> Result<i128> {
    i128::try_from(n).map_err(|_| Error::Overflow("coefficient"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalHeckeElement {
    prime: u64,
    coeffs: BTreeMap<u32, i128>,
}

impl LocalHeckeElement {
    pub fn zero(prime: u64) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self { prime, coeffs: BTreeMap::new() })
    }

    /// `delta`, the unit of the algebra.
    pub fn identity(prime: u64) -> Result<Self> {
        Self::from_coeffs(prime, [(0, 1)])
    }

    /// `tau_{p^j}`: the indicator of the sphere of radius `2j`.
    pub fn basic(prime: u64, j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::OutOfRange("basic(p, 0) is delta; use LocalHeckeElement::identity".into()));
        }
        Self::from_coeffs(prime, [(2 * j, 1)])
    }

    /// Builds an element from `(radius, coefficient)` pairs; repeated radii are summed.
    /// Radii may exceed [`RADIUS_CAP`] (products of capped inputs do).
    pub fn from_coeffs(prime: u64, coeffs: impl IntoIterator<Item = (u32, i128)>) -> Result<Self> {
        check_prime(prime)?;
        let mut map = BTreeMap::new();
        for (r, c) in coeffs {
            if r % 2 == 1 {
                return Err(Error::OddRadius(r));
            }
            *map.entry(r).or_insert(0i128) += c;
        }
        map.retain(|_, c| *c != 0);
        Ok(Self { prime, coeffs: map })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, i128> {
        &self.coeffs
    }

    pub fn coeff(&self, radius: u32) -> i128 {
        self.coeffs.get(&radius).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Some(radius)` if this is `tau_{p^j}` for some `j >= 1`.
    pub fn basic_radius(&self) -> Option<u32> {
        match self.coeffs.iter().next() {
            Some((&r, &1)) if self.coeffs.len() == 1 && r > 0 => Some(r),
            _ => None,
        }
    }

    /// Number of cosets `gK` where the function is nonzero.
    pub fn support_size(&self) -> Result<u128> {
        self.coeffs.keys().try_fold(0u128, |acc, &r| {
            let s = sphere_size(self.prime, r).ok_or(Error::Overflow("sphere size"))?;
            acc.checked_add(s).ok_or(Error::Overflow("support size"))
        })
    }

    /// `sum_x f(x)` over all cosets; the eigenvalue on the constant function.
    pub fn total_mass(&self) -> Result<i128> {
        self.coeffs.iter().try_fold(0i128, |acc, (&r, &c)| {
            let s = to_i128(sphere_size(self.prime, r).ok_or(Error::Overflow("sphere size"))?)?;
            c.checked_mul(s).and_then(|m| acc.checked_add(m)).ok_or(Error::Overflow("total mass"))
        })
    }

    /// `f*(g) = conj(f(g^-1))`. The double coset of radius `r` is stable under
    /// inversion and coefficients are real, so every element is self-adjoint.
    pub fn adjoint(&self) -> Self {
        self.clone()
    }

    pub fn scale(&self, k: i128) -> Self {
        let coeffs = self.coeffs.iter().map(|(&r, &c)| (r, c * k)).filter(|&(_, c)| c != 0).collect();
        Self { prime: self.prime, coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Self::from_coeffs(self.prime, self.coeffs.iter().chain(&other.coeffs).map(|(&r, &c)| (r, c)))
    }

    /// Largest `|f(x)|` away from the origin.
    pub fn off_origin_max(&self) -> u128 {
        self.coeffs.iter().filter(|(&r, _)| r > 0).map(|(_, c)| c.unsigned_abs()).max().unwrap_or(0)
    }
}

/// `f * g`, exact.
pub fn convolve(f: &LocalHeckeElement, g: &LocalHeckeElement) -> Result<LocalHeckeElement> {
    if f.prime != g.prime {
        return Err(Error::PrimeMismatch(f.prime, g.prime));
    }
    for &r in f.coeffs.keys().chain(g.coeffs.keys()) {
        check_radius(r)?;
    }
    let table = structure_table(f.prime)?;
    let mut out: BTreeMap<u32, i128> = BTreeMap::new();
    for (&a, &fa) in &f.coeffs {
        for (&b, &gb) in &g.coeffs {
            let weight = fa.checked_mul(gb).ok_or(Error::Overflow("convolution"))?;
            for r in (0..=a + b).step_by(2) {
                let n = table.get(a, b, r);
                if n == 0 {
                    continue;
                }
                let term = to_i128(n)?.checked_mul(weight).ok_or(Error::Overflow("convolution"))?;
                let slot = out.entry(r).or_insert(0);
                *slot = slot.checked_add(term).ok_or(Error::Overflow("convolution"))?;
            }
        }
    }
    LocalHeckeElement::from_coeffs(f.prime, out)
}

/// Eigenvalues `lambda_{p^j}` (`j = 0..=max_j`) of the basic operators on a
/// common eigenfunction, determined by `lambda_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSequence<S> {
    prime: u64,
    lambda: Vec<S>,
}

impl<S: Scalar> EigenvalueSequence<S> {
    /// `lambda_{p^j}`, with `lambda_{p^0} = 1`.
    pub fn get(&self, j: u32) -> Option<&S> {
        self.lambda.get(j as usize)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn max_j(&self) -> u32 {
        self.lambda.len() as u32 - 1
    }

    pub fn values(&self) -> &[S] {
        &self.lambda
    }

    /// Eigenvalue at radius `r` (even).
    pub fn at_radius(&self, r: u32) -> Option<&S> {
        self.get(r / 2)
    }
}

/// Extends `lambda_p` to `lambda_{p^j}` for `j <= max_j` via
/// `lambda_p * lambda_{p^j} = lambda_{tau_p * tau_{p^j}}`, which is triangular
/// with leading coefficient 1 at radius `2j + 2`.
pub fn eigenvalue_sequence<S: Scalar>(p: u64, lambda_p: S, max_j: u32) -> Result<EigenvalueSequence<S>> {
    check_prime(p)?;
    if !(2..=MAX_EIGEN_J).contains(&max_j) {
        return Err(Error::OutOfRange(format!("max_j = {max_j} must lie in 2..={MAX_EIGEN_J}")));
    }
    let table = structure_table(p)?;
    let mut lambda = vec![S::one(), lambda_p.clone()];
    for j in 1..max_j {
        let top = 2 * j + 2;
        let mut rest = S::zero();
        for r in (0..top).step_by(2) {
            let n = table.get(2, 2 * j, r);
            if n != 0 {
                rest = rest + S::from_i128(to_i128(n)?) * lambda[(r / 2) as usize].clone();
            }
        }
        let lead = S::from_i128(to_i128(table.get(2, 2 * j, top))?);
        lambda.push((lambda_p.clone() * lambda[j as usize].clone() - rest) / lead);
    }
    Ok(EigenvalueSequence { prime: p, lambda })
}

/// A map from prime to its eigenvalue sequence.
pub type Spectra<S> = BTreeMap<u64, EigenvalueSequence<S>>;

/// Evaluation of a Hecke element on an eigenvalue system.
pub trait SpectralTransform {
    fn spectral_value<S: Scalar>(&self, spectra: &Spectra<S>) -> Result<S>;
}

impl SpectralTransform for LocalHeckeElement {
    fn spectral_value<S: Scalar>(&self, spectra: &Spectra<S>) -> Result<S> {
        if self.coeffs.keys().all(|&r| r == 0) {
            return Ok(S::from_i128(self.coeff(0)));
        }
        let seq = spectra.get(&self.prime).ok_or(Error::MissingSpectrum(self.prime))?;
        self.coeffs.iter().try_fold(S::zero(), |acc, (&r, &c)| {
            let l = seq.at_radius(r).ok_or(Error::MissingSpectrum(self.prime))?;
            Ok(acc + S::from_i128(c) * l.clone())
        })
    }
}

/// A point of the restricted product of double-coset spaces: the radius at
/// each prime where it leaves the origin. The empty point is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SupportPoint(Vec<(u64, u32)>);

impl SupportPoint {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn new(entries: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut v: Vec<(u64, u32)> = entries.into_iter().filter(|&(_, r)| r > 0).collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicatePrime(w[0].0));
            }
        }
        for &(_, r) in &v {
            if r % 2 == 1 {
                return Err(Error::OddRadius(r));
            }
        }
        Ok(Self(v))
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn radius_at(&self, p: u64) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, r)| r)
    }
}

/// Finitely supported integer function on the restricted product.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GlobalHeckeElement {
    coeffs: BTreeMap<SupportPoint, i128>,
}

impl GlobalHeckeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(SupportPoint::identity(), 1);
        Self { coeffs }
    }

    pub fn embed(local: &LocalHeckeElement) -> Self {
        let coeffs = local
            .coeffs
            .iter()
            .map(|(&r, &c)| (SupportPoint(if r == 0 { vec![] } else { vec![(local.prime, r)] }), c))
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<SupportPoint, i128> {
        &self.coeffs
    }

    pub fn get(&self, point: &SupportPoint) -> i128 {
        self.coeffs.get(point).copied().unwrap_or(0)
    }

    /// `tau(1)`, the value at the identity coset.
    pub fn value_at_identity(&self) -> i128 {
        self.get(&SupportPoint::identity())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Primes appearing anywhere in the support.
    pub fn primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.coeffs.keys().flat_map(|pt| pt.0.iter().map(|&(p, _)| p)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn accumulate(&mut self, point: SupportPoint, c: i128) -> Result<()> {
        let slot = self.coeffs.entry(point).or_insert(0);
        *slot = slot.checked_add(c).ok_or(Error::Overflow("global coefficient"))?;
        Ok(())
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| *c != 0);
    }

    /// Same reasoning as [`LocalHeckeElement::adjoint`]: radii are inversion-stable.
    pub fn adjoint(&self) -> Self {
        self.clone()
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// `max |tau(x)|` over points other than the identity.
    pub fn norm_inf(&self) -> u128 {
        self.coeffs.iter().filter(|(pt, _)| !pt.is_identity()).map(|(_, c)| c.unsigned_abs()).max().unwrap_or(0)
    }
}

impl SpectralTransform for GlobalHeckeElement {
    fn spectral_value<S: Scalar>(&self, spectra: &Spectra<S>) -> Result<S> {
        self.coeffs.iter().try_fold(S::zero(), |acc, (pt, &c)| {
            let mut term = S::from_i128(c);
            for &(p, r) in &pt.0 {
                let seq = spectra.get(&p).ok_or(Error::MissingSpectrum(p))?;
                term = term * seq.at_radius(r).ok_or(Error::MissingSpectrum(p))?.clone();
            }
            Ok(acc + term)
        })
    }
}

/// The sign `zeta_p` making `zeta_p * lambda_p` nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    pub fn sign(self) -> i128 {
        match self {
            Phase::Plus => 1,
            Phase::Minus => -1,
        }
    }
}

/// `tau_1 = (sum_p zeta_p h_p) * (sum_p zeta_p h_p)^*` expanded over support points.
///
/// Same-prime terms give `h_p * h_p`; a pair `p != q` gives `2 zeta_p zeta_q`
/// on the product of the two spheres since the local factors commute.
pub fn global_assemble(parts: &[(LocalHeckeElement, Phase)]) -> Result<GlobalHeckeElement> {
    let mut seen = std::collections::BTreeSet::new();
    for (h, _) in parts {
        if !seen.insert(h.prime) {
            return Err(Error::DuplicatePrime(h.prime));
        }
        if h.basic_radius().is_none() {
            return Err(Error::NotBasic);
        }
    }
    let squares: Vec<LocalHeckeElement> =
        parts.par_iter().map(|(h, _)| convolve(h, &h.adjoint())).collect::<Result<_>>()?;

    let mut out = GlobalHeckeElement::zero();
    for sq in &squares {
        for (pt, c) in GlobalHeckeElement::embed(sq).coeffs {
            out.accumulate(pt, c)?;
        }
    }
    for (i, (hp, zp)) in parts.iter().enumerate() {
        for (hq, zq) in &parts[i + 1..] {
            let sign = 2 * zp.sign() * zq.sign();
            for (&a, &ca) in &hp.coeffs {
                for (&b, &cb) in &hq.coeffs {
                    let pt = SupportPoint::new([(hp.prime, a), (hq.prime, b)])?;
                    out.accumulate(pt, sign * ca * cb)?;
                }
            }
        }
    }
    out.prune();
    Ok(out)
}

/// `tau = tau_1 - tau_1(1) delta`.
pub fn subtract_identity(t1: &GlobalHeckeElement) -> GlobalHeckeElement {
    let mut out = t1.clone();
    out.coeffs.remove(&SupportPoint::identity());
    out
}
