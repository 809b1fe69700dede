//! Orbits of small subgroups in `G_p / K_p ≅ tree × tree` and how often they
//! meet the support of one-sided Hecke operators.
//!
//! A multiplicative-type orbit is a product of two apartments through the
//! origin; an `SL2`-type orbit is the diagonal `{(v, v)}`. A finite-index
//! subgroup contributes one copy of the orbit per coset representative, each
//! moved by a root-fixing automorphism ([`Translate`]).

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hecke::GlobalHeckeElement;
use crate::tree::{check_prime, for_each_in_sphere, sphere, TreeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    /// Finite index over a diagonable group: orbit is a product of apartments.
    Multiplicative,
    /// Finite index over a conjugate of `SL2` of the real subfield: diagonal orbit.
    Sl2,
}

/// A root-fixing tree automorphism: cyclically shifts the first digit by
/// `shift` modulo `p + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Translate {
    pub shift: u32,
}

impl Translate {
    pub fn apply(&self, v: &TreeVertex) -> TreeVertex {
        let p = v.prime();
        let mut word = v.word().to_vec();
        if let Some(first) = word.first_mut() {
            *first = ((*first as u64 + self.shift as u64) % (p + 1)) as u32;
        }
        TreeVertex::from_word(p, word).expect("shifted leading digit stays in range")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitModel {
    kind: OrbitKind,
    index: u32,
    translates: Vec<Translate>,
}

impl OrbitModel {
    /// Orbit with `index` coset representatives, all at the base point.
    pub fn new(kind: OrbitKind, index: u32) -> Result<Self> {
        if index == 0 {
            return Err(Error::OutOfRange("orbit index C must be >= 1".into()));
        }
        Ok(Self { kind, index, translates: Vec::new() })
    }

    /// Representatives beyond `translates.len()` sit at the base point.
    pub fn with_translates(kind: OrbitKind, index: u32, translates: Vec<Translate>) -> Result<Self> {
        let mut m = Self::new(kind, index)?;
        if translates.len() > index as usize {
            return Err(Error::OutOfRange(format!("{} translates exceed index {index}", translates.len())));
        }
        m.translates = translates;
        Ok(m)
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn translates(&self) -> &[Translate] {
        &self.translates
    }

    fn representatives(&self) -> impl Iterator<Item = Translate> + '_ {
        (0..self.index as usize).map(|i| self.translates.get(i).copied().unwrap_or_default())
    }
}

/// A point of `G_{p,1}/K_{p,1}`: a pair of vertices in the two trees at `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductPoint {
    pub left: TreeVertex,
    pub right: TreeVertex,
}

impl ProductPoint {
    pub fn new(left: TreeVertex, right: TreeVertex) -> Result<Self> {
        if left.prime() != right.prime() {
            return Err(Error::PrimeMismatch(left.prime(), right.prime()));
        }
        Ok(Self { left, right })
    }
}

/// Support of the one-sided `tau_{p^j}`: `{(v, o) : d(o, v) = 2j}`.
pub fn one_sided_support(p: u64, j: u32) -> Result<Vec<ProductPoint>> {
    if j == 0 {
        return Err(Error::OutOfRange("one-sided operators need j >= 1".into()));
    }
    let root = TreeVertex::root(p)?;
    sphere(p, 2 * j)?.into_iter().map(|v| ProductPoint::new(v, root.clone())).collect()
}

/// Closed-form intersection count of the orbit with the one-sided support of `tau_{p^j}`.
///
/// The diagonal meets it nowhere (a right coordinate at the root forces the
/// left one there too); each apartment meets a sphere of positive radius in
/// exactly its two points at that distance.
pub fn orbit_intersect_one_sided(model: &OrbitModel, p: u64, j: u32) -> Result<u64> {
    check_prime(p)?;
    if j == 0 {
        return Err(Error::OutOfRange("one-sided operators need j >= 1".into()));
    }
    Ok(match model.kind {
        OrbitKind::Sl2 => 0,
        OrbitKind::Multiplicative => 2 * model.index as u64,
    })
}

// Apartment through the root with ends 0,00,000,... and 1,10,100,..., cut to the ball.
fn apartment(p: u64, radius: u32, t: Translate) -> Result<Vec<TreeVertex>> {
    let mut out = vec![TreeVertex::root(p)?];
    for k in 1..=radius as usize {
        let zero_ray = vec![0u32; k];
        let mut one_ray = vec![0u32; k];
        one_ray[0] = 1;
        out.push(t.apply(&TreeVertex::from_word(p, zero_ray)?));
        out.push(t.apply(&TreeVertex::from_word(p, one_ray)?));
    }
    Ok(out)
}

/// Enumerates the orbit inside the ball of radius `ball_radius` and counts its
/// points in the one-sided support of `tau_{p^j}` (`j = 0` means the identity coset).
pub fn brute_force_intersect(model: &OrbitModel, p: u64, j: u32, ball_radius: u32) -> Result<u64> {
    check_prime(p)?;
    if ball_radius < 2 * j {
        return Err(Error::OutOfRange(format!("ball radius {ball_radius} < 2j = {}", 2 * j)));
    }
    let root = TreeVertex::root(p)?;
    let support: HashSet<ProductPoint> = if j == 0 {
        HashSet::from([ProductPoint::new(root.clone(), root.clone())?])
    } else {
        one_sided_support(p, j)?.into_iter().collect()
    };

    let mut hits = 0u64;
    match model.kind {
        OrbitKind::Multiplicative => {
            let right_apartment = apartment(p, ball_radius, Translate::default())?;
            for t in model.representatives() {
                for u in apartment(p, ball_radius, t)? {
                    for w in &right_apartment {
                        if support.contains(&ProductPoint::new(u.clone(), w.clone())?) {
                            hits += 1;
                        }
                    }
                }
            }
        }
        OrbitKind::Sl2 => {
            for t in model.representatives() {
                for r in 0..=ball_radius {
                    for_each_in_sphere(p, r, |word| {
                        let v = TreeVertex::from_word(p, word.to_vec()).expect("enumerated word is valid");
                        let pt = ProductPoint { left: t.apply(&v), right: v };
                        hits += support.contains(&pt) as u64;
                    })?;
                }
            }
        }
    }
    Ok(hits)
}

/// Total number of orbit points in the support of `tau`, counting each support
/// point (a product of spheres over its primes) by the product of the
/// per-prime intersection counts.
pub fn count_global_intersections(model: &OrbitModel, tau: &GlobalHeckeElement) -> Result<u128> {
    let mut total = 0u128;
    for (pt, &c) in tau.coeffs() {
        if c == 0 || pt.is_identity() {
            continue;
        }
        let mut prod = 1u128;
        for &(p, r) in pt.entries() {
            prod *= orbit_intersect_one_sided(model, p, r / 2)? as u128;
        }
        total += prod;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::{global_assemble, subtract_identity, LocalHeckeElement, Phase};

    #[test]
    fn support_sizes() {
        let s = one_sided_support(2, 1).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|pt| pt.right.is_root()));
        assert_eq!(one_sided_support(3, 2).unwrap().len(), 108);
        assert!(one_sided_support(3, 0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let sl2 = OrbitModel::new(OrbitKind::Sl2, 1).unwrap();
        let torus = OrbitModel::new(OrbitKind::Multiplicative, 1).unwrap();
        let torus3 = OrbitModel::new(OrbitKind::Multiplicative, 3).unwrap();
        assert_eq!(orbit_intersect_one_sided(&sl2, 7, 2).unwrap(), 0);
        assert_eq!(orbit_intersect_one_sided(&torus, 3, 2).unwrap(), 2);
        assert_eq!(orbit_intersect_one_sided(&torus3, 2, 1).unwrap(), 6);
        assert!(OrbitModel::new(OrbitKind::Sl2, 0).is_err());
        assert!(OrbitModel::with_translates(OrbitKind::Sl2, 1, vec![Translate::default(); 2]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let sl2 = OrbitModel::new(OrbitKind::Sl2, 1).unwrap();
        let torus = OrbitModel::new(OrbitKind::Multiplicative, 1).unwrap();
        for j in 1..=3 {
            assert_eq!(brute_force_intersect(&sl2, 2, j, 2 * j).unwrap(), 0);
            assert_eq!(brute_force_intersect(&torus, 2, j, 2 * j + 1).unwrap(), 2);
        }
        assert_eq!(brute_force_intersect(&torus, 2, 0, 3).unwrap(), 1);
        assert!(brute_force_intersect(&torus, 2, 2, 3).is_err());
    }

    #[test]
    fn closed_form_equals_brute_force_with_translates() {
        for p in [2u64, 3, 5] {
            for c in 1..=3u32 {
                let translates: Vec<Translate> = (0..c).map(|i| Translate { shift: i * 2 + 1 }).collect();
                for kind in [OrbitKind::Sl2, OrbitKind::Multiplicative] {
                    let m = OrbitModel::with_translates(kind, c, translates.clone()).unwrap();
                    for j in 1..=3 {
                        assert_eq!(
                            brute_force_intersect(&m, p, j, 2 * j).unwrap(),
                            orbit_intersect_one_sided(&m, p, j).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn global_counts() {
        let parts = vec![
            (LocalHeckeElement::basic(5, 1).unwrap(), Phase::Plus),
            (LocalHeckeElement::basic(13, 1).unwrap(), Phase::Minus),
        ];
        let tau = subtract_identity(&global_assemble(&parts).unwrap());
        let sl2 = OrbitModel::new(OrbitKind::Sl2, 1).unwrap();
        let torus = OrbitModel::new(OrbitKind::Multiplicative, 1).unwrap();
        assert_eq!(count_global_intersections(&sl2, &tau).unwrap(), 0);
        // same-prime points {p:2},{p:4} at two primes (2 each), one cross point (2*2)
        assert_eq!(count_global_intersections(&torus, &tau).unwrap(), 4 * 2 + 4);
        assert_eq!(count_global_intersections(&torus, &GlobalHeckeElement::zero()).unwrap(), 0);

        let mut last = 0;
        for c in 1..=4 {
            let m = OrbitModel::new(OrbitKind::Multiplicative, c).unwrap();
            let n = count_global_intersections(&m, &tau).unwrap();
            assert!(n >= last);
            last = n;
        }
    }
}
