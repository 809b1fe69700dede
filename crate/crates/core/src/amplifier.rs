//! The Iwaniec dichotomy and the global amplifier built from it.
//!
//! For each split prime `p` in `[Q, 2Q]` one of `tau_p`, `tau_{p^2}` has a
//! large eigenvalue on the target eigenfunction. Keeping the primes whose
//! choice has the majority support exponent `ell`, the amplifier is
//! `tau = tau_1 - tau_1(1) delta` with
//! `tau_1 = (sum zeta_p h_p) * (sum zeta_p h_p)^*`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hecke::{
    convolve, eigenvalue_sequence, global_assemble, subtract_identity, GlobalHeckeElement, LocalHeckeElement, Phase,
    Spectra, SpectralTransform,
};
use crate::orbits::{count_global_intersections, OrbitKind, OrbitModel};
use crate::splitting::{split_primes_in, IntPoly};
use crate::tree::{check_prime, sphere_size};

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Default dichotomy constant `c0 = 2/5`.
///
/// The exact minimax of `max(|x|/sqrt(p(p+1)), |x^2-(p-1)x-p(p+1)|/sqrt(p^3(p+1)))`
/// decreases towards `sqrt(2) - 1` from above, so `2/5` is valid for every `p`.
pub fn default_c0() -> BigRational {
    BigRational::new(2.into(), 5.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumKind {
    /// `lambda_p = p(p+1)`, the constant eigenfunction.
    Trivial,
    /// `lambda_p` uniform on the grid `[-3p, 3p] ∩ (1/1000)Z`, one ChaCha stream per prime.
    TemperedRandom(u64),
    Explicit(BTreeMap<u64, BigRational>),
}

/// Synthetic eigenvalue data: `lambda_p` for each prime, extended to
/// `lambda_{p^j}` for `j <= max_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumModel {
    pub kind: SpectrumKind,
    pub max_j: u32,
}

impl SpectrumModel {
    pub fn new(kind: SpectrumKind) -> Self {
        Self { kind, max_j: 4 }
    }

    pub fn trivial() -> Self {
        Self::new(SpectrumKind::Trivial)
    }

    pub fn tempered(seed: u64) -> Self {
        Self::new(SpectrumKind::TemperedRandom(seed))
    }

    pub fn lambda_p(&self, p: u64) -> Result<BigRational> {
        match &self.kind {
            SpectrumKind::Trivial => Ok(rat(p) * rat(p + 1)),
            SpectrumKind::TemperedRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(p);
                let bound = 3000 * p as i64;
                let k: i64 = rng.gen_range(-bound..=bound);
                Ok(BigRational::new(k.into(), 1000.into()))
            }
            SpectrumKind::Explicit(map) => map.get(&p).cloned().ok_or(Error::MissingSpectrum(p)),
        }
    }
}

/// The basic operator `h_p = tau_{p^j}` chosen at `p`, with its eigenvalue and sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalChoice {
    pub prime: u64,
    pub j: u32,
    /// `lambda_{p^j}`, the eigenvalue of `h_p`.
    pub lambda: BigRational,
    pub phase: Phase,
    /// Support exponent: `2` for `j = 1`, `4` for `j = 2`.
    pub ell: u32,
}

impl LocalChoice {
    pub fn support_size(&self) -> u128 {
        sphere_size(self.prime, 2 * self.j).expect("radius at most 4")
    }

    pub fn operator(&self) -> LocalHeckeElement {
        LocalHeckeElement::basic(self.prime, self.j).expect("validated prime and j")
    }
}

/// Picks `tau_p` if `|lambda_p| >= c0 sqrt(p(p+1))`, else `tau_{p^2}`, whose
/// eigenvalue must then satisfy `|lambda_{p^2}| >= c0 sqrt(p^3(p+1))`.
/// All comparisons are exact (squared).
pub fn pick_local(p: u64, lambda_p: &BigRational, c0: &BigRational) -> Result<LocalChoice> {
    check_prime(p)?;
    let c0_sq = c0 * c0;
    let supp1 = rat(p) * rat(p + 1);
    let make = |j: u32, lambda: BigRational| {
        let phase = if lambda.is_negative() { Phase::Minus } else { Phase::Plus };
        LocalChoice { prime: p, j, lambda, phase, ell: 2 * j }
    };
    if lambda_p * lambda_p >= &c0_sq * &supp1 {
        return Ok(make(1, lambda_p.clone()));
    }
    let seq = eigenvalue_sequence(p, lambda_p.clone(), 2)?;
    let lambda2 = seq.get(2).expect("sequence has j = 2").clone();
    let supp2 = &supp1 * rat(p) * rat(p);
    if &lambda2 * &lambda2 >= c0_sq * supp2 {
        Ok(make(2, lambda2))
    } else {
        Err(Error::DichotomyViolated(p))
    }
}

/// `max(|x|/sqrt(p(p+1)), |lambda_{p^2}(x)|/sqrt(p^3(p+1)))` in floating point.
pub fn dichotomy_score(p: u64, x: f64) -> f64 {
    let pf = p as f64;
    let l2 = x * x - (pf - 1.0) * x - pf * (pf + 1.0);
    (x.abs() / (pf * (pf + 1.0)).sqrt()).max(l2.abs() / (pf.powi(3) * (pf + 1.0)).sqrt())
}

/// Result of a grid scan of [`dichotomy_score`] over `[-p(p+1), p(p+1)]` with step `p/1000`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxScan {
    pub prime: u64,
    pub grid_points: u64,
    pub argmin: BigRational,
    pub minimum: f64,
    /// Whether the cells on both sides of the minimizing grid point were
    /// proven to score at least `c0` in exact arithmetic.
    pub certified: bool,
}

pub fn minimax_scan(p: u64, c0: &BigRational) -> Result<MinimaxScan> {
    check_prime(p)?;
    // grid in units of 1/1000: X_i = -1000 p (p+1) + i p
    let start = -1000 * (p as i64) * (p as i64 + 1);
    let n = 2000 * (p + 1);
    let (best_i, minimum) = (0..=n)
        .into_par_iter()
        .map(|i| (i, dichotomy_score(p, (start + (i * p) as i64) as f64 / 1000.0)))
        .reduce(|| (0, f64::INFINITY), |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let at = |i: u64| BigRational::new((start + (i * p) as i64).into(), 1000.into());
    let lo = at(best_i.saturating_sub(1));
    let hi = at((best_i + 1).min(n));
    Ok(MinimaxScan {
        prime: p,
        grid_points: n + 1,
        argmin: at(best_i),
        minimum,
        certified: certify_cell(p, &lo, &hi, c0),
    })
}

/// Proves `dichotomy_score >= c0` on all of `[lo, hi]` using exact lower
/// bounds for `|x|` and `|lambda_{p^2}(x)|` over the cell.
pub fn certify_cell(p: u64, lo: &BigRational, hi: &BigRational, c0: &BigRational) -> bool {
    let (pr, one) = (rat(p), BigRational::one());
    let g = |x: &BigRational| x * x - (&pr - &one) * x - &pr * (&pr + &one);
    let min_abs_x = if lo.is_positive() {
        lo.clone()
    } else if hi.is_negative() {
        -hi
    } else {
        BigRational::zero()
    };
    let (g_lo, g_hi) = (g(lo), g(hi));
    let vertex = (&pr - &one) / rat(2);
    let min_abs_g = if g_lo.signum() != g_hi.signum() || g_lo.is_zero() {
        BigRational::zero()
    } else if g_lo.is_negative() {
        g_lo.abs().min(g_hi.abs())
    } else if *lo < vertex && vertex < *hi {
        let g_v = g(&vertex);
        if g_v.is_positive() {
            g_v
        } else {
            BigRational::zero()
        }
    } else {
        g_lo.min(g_hi)
    };
    let c0_sq = c0 * c0;
    let supp1 = &pr * (&pr + &one);
    let supp2 = &supp1 * &pr * &pr;
    &min_abs_x * &min_abs_x >= &c0_sq * supp1 || &min_abs_g * &min_abs_g >= c0_sq * supp2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifierConfig {
    pub c0: BigRational,
}

impl Default for AmplifierConfig {
    fn default() -> Self {
        Self { c0: default_c0() }
    }
}

/// A named pass/fail check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), pass }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifierReport {
    pub q: u64,
    pub ell: u32,
    /// All primes in `[Q, 2Q]` splitting completely.
    pub split_primes: Vec<u64>,
    pub choices: Vec<LocalChoice>,
    pub lambda: BigRational,
    pub tau1_at_identity: i128,
    pub c_tau: i128,
    pub norm_inf: u128,
    pub intersection_count: u128,
    pub ratio_intersections: BigRational,
    pub ratio_positivity: BigRational,
    pub verdicts: Vec<Verdict>,
}

impl AmplifierReport {
    pub fn primes_used(&self) -> Vec<u64> {
        self.choices.iter().map(|c| c.prime).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Selects split primes in `[Q, 2Q]`, picks a local operator at each and
/// assembles the amplifier from the majority-`ell` class (ties go to `ell = 2`).
pub fn build_amplifier(
    q: u64,
    f: &IntPoly,
    spectrum: &SpectrumModel,
    orbit: &OrbitModel,
    config: &AmplifierConfig,
) -> Result<(GlobalHeckeElement, AmplifierReport)> {
    if q < 11 {
        return Err(Error::OutOfRange(format!("Q = {q} must be at least 11")));
    }
    let hi = q.checked_mul(2).ok_or(Error::Overflow("2Q"))?;
    let split = split_primes_in(f, q, hi)?;
    match split.len() {
        0 => return Err(Error::NoSplitPrimes { lo: q, hi }),
        1 => return Err(Error::TooFewSplitPrimes { lo: q, hi, found: 1 }),
        _ => {}
    }
    let choices: Vec<LocalChoice> =
        split.par_iter().map(|&p| pick_local(p, &spectrum.lambda_p(p)?, &config.c0)).collect::<Result<_>>()?;
    let n2 = choices.iter().filter(|c| c.ell == 2).count();
    let keep = if 2 * n2 >= choices.len() { 2 } else { 4 };
    let kept: Vec<LocalChoice> = choices.into_iter().filter(|c| c.ell == keep).collect();
    let (tau, mut report) = amplifier_from_choices(q, kept, spectrum, orbit)?;
    report.split_primes = split;
    Ok((tau, report))
}

/// Assembles the amplifier for an explicit list of local choices (one per prime).
pub fn amplifier_from_choices(
    q: u64,
    choices: Vec<LocalChoice>,
    spectrum: &SpectrumModel,
    orbit: &OrbitModel,
) -> Result<(GlobalHeckeElement, AmplifierReport)> {
    if choices.is_empty() {
        return Err(Error::OutOfRange("no local choices".into()));
    }
    let ell = choices[0].ell;
    let parts: Vec<(LocalHeckeElement, Phase)> = choices.iter().map(|c| (c.operator(), c.phase)).collect();
    let tau1 = global_assemble(&parts)?;
    let tau1_at_identity = tau1.value_at_identity();
    let tau = subtract_identity(&tau1);

    let abs_sum: BigRational = choices.iter().map(|c| c.lambda.abs()).sum();
    let lambda = &abs_sum * &abs_sum - rat(tau1_at_identity);
    if !lambda.is_positive() {
        return Err(Error::LambdaNonPositive(Box::new(lambda)));
    }

    let mut spectra: Spectra<BigRational> = BTreeMap::new();
    for c in &choices {
        let lp = spectrum.lambda_p(c.prime)?;
        spectra.insert(c.prime, eigenvalue_sequence(c.prime, lp, spectrum.max_j)?);
    }
    let spectral = tau.spectral_value(&spectra)?;

    let support_total: i128 = choices.iter().map(|c| c.support_size() as i128).sum();
    let local_max = choices
        .iter()
        .map(|c| convolve(&c.operator(), &c.operator()).map(|sq| sq.off_origin_max()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let cross = if choices.len() >= 2 { 2 } else { 0 };
    let norm_inf = tau.norm_inf();

    let intersection_count = count_global_intersections(orbit, &tau)?;
    let norm = rat(BigInt::from(norm_inf));
    let ratio_intersections = &norm * rat(BigInt::from(intersection_count)) / &lambda;
    let ratio_positivity = rat(tau1_at_identity) / &lambda;

    let n = choices.len() as u128;
    let c = orbit.index() as u128;
    let mut verdicts = vec![
        Verdict::new("lambda_positive", true),
        Verdict::new("spectral_side_matches", spectral == lambda),
        Verdict::new("c_tau_equals_support_total", tau1_at_identity == support_total),
        Verdict::new("norm_inf_decomposition", norm_inf == local_max.max(cross)),
        Verdict::new("self_adjoint", tau.is_self_adjoint()),
        Verdict::new("intersection_bound", intersection_count <= 4 * c * c * n * n),
    ];
    if orbit.kind() == OrbitKind::Sl2 {
        verdicts.push(Verdict::new("sl2_avoidance", intersection_count == 0));
    }

    let report = AmplifierReport {
        q,
        ell,
        split_primes: choices.iter().map(|c| c.prime).collect(),
        choices,
        lambda,
        tau1_at_identity,
        c_tau: tau1_at_identity,
        norm_inf,
        intersection_count,
        ratio_intersections,
        ratio_positivity,
        verdicts,
    };
    Ok((tau, report))
}

/// Spectral values of `tau` over seeded random eigenvalue systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorCheck {
    pub trials: u32,
    pub minimum: BigRational,
    pub holds: bool,
}

fn spectra_for(tau: &GlobalHeckeElement, lambdas: &BTreeMap<u64, BigRational>) -> Result<Spectra<BigRational>> {
    let mut spectra = BTreeMap::new();
    for p in tau.primes() {
        let lp = lambdas.get(&p).cloned().ok_or(Error::MissingSpectrum(p))?;
        spectra.insert(p, eigenvalue_sequence(p, lp, 4)?);
    }
    Ok(spectra)
}

/// Checks `spectral_value(tau) >= -c_tau` for `trials` systems with
/// `lambda_p` drawn from `[-(p+1)^2, (p+1)^2] ∩ (1/1000)Z`.
pub fn verify_spectral_floor(tau: &GlobalHeckeElement, c_tau: i128, trials: u32, seed: u64) -> Result<FloorCheck> {
    let primes = tau.primes();
    let values: Vec<BigRational> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let lambdas = primes
                .iter()
                .map(|&p| {
                    let b = 1000 * ((p + 1) * (p + 1)) as i64;
                    (p, BigRational::new(rng.gen_range(-b..=b).into(), 1000.into()))
                })
                .collect();
            tau.spectral_value(&spectra_for(tau, &lambdas)?)
        })
        .collect::<Result<_>>()?;
    let floor = -rat(c_tau);
    let minimum = values.iter().min().cloned().unwrap_or_else(|| floor.clone());
    Ok(FloorCheck { trials, holds: values.iter().all(|v| *v >= floor), minimum })
}

/// Spectral value of `tau` at `lambda_p = 0` for every prime.
pub fn zero_system_value(tau: &GlobalHeckeElement) -> Result<BigRational> {
    let lambdas = tau.primes().into_iter().map(|p| (p, BigRational::zero())).collect();
    tau.spectral_value(&spectra_for(tau, &lambdas)?)
}

/// One sweep point with its growth-normalized quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub tau: GlobalHeckeElement,
    pub report: AmplifierReport,
    /// `Lambda log^2 Q / Q^(2+ell)`.
    pub lambda_normalized: f64,
    /// `normInf / Q^(ell-1)`.
    pub norm_inf_normalized: f64,
    /// `ratioPositivity Q^(1+ell/2) / log Q`.
    pub positivity_normalized: f64,
}

pub fn scaling_sweep(
    qs: &[u64],
    f: &IntPoly,
    spectrum: &SpectrumModel,
    orbit: &OrbitModel,
    config: &AmplifierConfig,
) -> Result<Vec<SweepEntry>> {
    if qs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange("Q values must be strictly ascending".into()));
    }
    qs.par_iter()
        .map(|&q| {
            let (tau, report) = build_amplifier(q, f, spectrum, orbit, config)?;
            let (qf, ell) = (q as f64, report.ell as i32);
            let lf = report.lambda.to_f64().unwrap_or(f64::INFINITY);
            let ln = qf.ln();
            Ok(SweepEntry {
                lambda_normalized: lf * ln * ln / qf.powi(2 + ell),
                norm_inf_normalized: report.norm_inf as f64 / qf.powi(ell - 1),
                positivity_normalized: report.ratio_positivity.to_f64().unwrap_or(f64::NAN)
                    * qf.powf(1.0 + ell as f64 / 2.0)
                    / ln,
                report,
                tau,
            })
        })
        .collect()
}
