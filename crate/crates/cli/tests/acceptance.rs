//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Oracles here are independent of the library where possible: tree words are
//! enumerated directly, root counts are brute force, and closed forms are
//! written out from the identities they check.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use heckeamp::amplifier::{
    dichotomy_score, minimax_scan, scaling_sweep, verify_spectral_floor, zero_system_value, SweepEntry,
};
use heckeamp::orbits::{brute_force_intersect, orbit_intersect_one_sided};
use heckeamp::primes::primes_up_to;
use heckeamp::splitting::{empirical_density, splits_completely};
use heckeamp::tree::{count_sphere_by_enumeration, sphere_size};
use heckeamp::{
    build_amplifier, convolve, eigenvalue_sequence, AmplifierConfig, IntPoly, LocalHeckeElement, OrbitKind, OrbitModel,
    SpectralTransform, SpectrumModel,
};
use heckeamp_cli::commands::{certifier_suite, denom_suite};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(what.into());
        }
    }

    fn line(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.notes.push(format!("{}: {what}", if ok { "pass" } else { "FAIL" }));
        self.pass &= ok;
    }
}

const HECKE_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// All reduced words of length `n` over the tree of degree `p + 1`.
fn words(p: u64, n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for w in words(p, n - 1) {
        let top = if w.is_empty() { p + 1 } else { p };
        for d in 0..top as u32 {
            let mut v = w.clone();
            v.push(d);
            out.push(v);
        }
    }
    out
}

fn dist(a: &[u32], b: &[u32]) -> usize {
    let lcp = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    a.len() + b.len() - 2 * lcp
}

/// `tau_{p^i} * tau_{p^j}` by counting paths: the coefficient at radius `r` is
/// the number of `z` with `|z| = 2i` and `d(z, y) = 2j` for a fixed `|y| = r`.
fn path_count_product(p: u64, i: usize, j: usize) -> BTreeMap<u32, i128> {
    let zs = words(p, 2 * i);
    let mut out = BTreeMap::new();
    for r in (0..=2 * (i + j)).step_by(2) {
        let y = vec![0u32; r];
        let n = zs.iter().filter(|z| dist(z, &y) == 2 * j).count() as i128;
        if n > 0 {
            out.insert(r as u32, n);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    for p in HECKE_PRIMES {
        let pi = p as i128;
        let line1 = BTreeMap::from([(0, pi * (pi + 1)), (2, pi - 1), (4, 1)]);
        let line2 = BTreeMap::from([
            (0, pi.pow(3) * (pi + 1)),
            (2, pi * pi * (pi - 1)),
            (4, pi * (pi - 1)),
            (6, pi - 1),
            (8, 1),
        ]);
        let t1 = LocalHeckeElement::basic(p, 1).unwrap();
        let t2 = LocalHeckeElement::basic(p, 2).unwrap();
        let c1 = convolve(&t1, &t1).unwrap();
        let c2 = convolve(&t2, &t2).unwrap();
        o.check(*c1.coeffs() == line1, format!("p={p}: tau_p^2 = {:?}", c1.coeffs()));
        o.check(*c2.coeffs() == line2, format!("p={p}: tau_p2^2 = {:?}", c2.coeffs()));
        o.check(path_count_product(p, 1, 1) == line1, format!("p={p}: path count disagrees on degree 2"));
        o.check(path_count_product(p, 2, 2) == line2, format!("p={p}: path count disagrees on degree 4"));
    }
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    for p in HECKE_PRIMES {
        for j in 1..=4u32 {
            let closed = (p as u128 + 1) * (p as u128).pow(2 * j - 1);
            let counted = count_sphere_by_enumeration(p, 2 * j).unwrap();
            o.check(counted == closed, format!("|S(p={p}, {})| = {counted}, expected {closed}", 2 * j));
            o.check(sphere_size(p, 2 * j) == Some(closed), format!("sphere_size({p}, {})", 2 * j));
        }
        let basics: Vec<LocalHeckeElement> =
            (0..=4).map(|j| LocalHeckeElement::from_coeffs(p, [(2 * j, 1)]).unwrap()).collect();
        for f in &basics {
            for g in &basics {
                let lhs = convolve(f, g).unwrap().total_mass().unwrap();
                let rhs = f.total_mass().unwrap() * g.total_mass().unwrap();
                o.check(lhs == rhs, format!("p={p}: mass({:?} * {:?})", f.coeffs(), g.coeffs()));
            }
        }
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let half = BigRational::new(1.into(), 2.into());
    let spot = dichotomy_score(5, 0.0);
    o.line(
        (spot - 30.0 / 750f64.sqrt()).abs() < 1e-12 && (spot - 1.095).abs() < 1e-3,
        format!("spot p=5, lambda=0: {spot:.6}"),
    );
    let mut failing = Vec::new();
    for p in primes_up_to(97) {
        let scan = minimax_scan(p, &half).unwrap();
        if scan.minimum < 0.5 || !scan.certified {
            failing.push(format!("{p}:{:.4}", scan.minimum));
        }
    }
    o.line(
        failing.is_empty(),
        if failing.is_empty() {
            "scan minimum >= 0.5 and certified for all p <= 97".to_string()
        } else {
            format!("scan minimum below 0.5 (or uncertified) at p = {}", failing.join(", "))
        },
    );
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let sl2 = OrbitModel::new(OrbitKind::Sl2, 1).unwrap();
    let torus = OrbitModel::new(OrbitKind::Multiplicative, 1).unwrap();
    for p in [2u64, 3, 5] {
        for j in 1..=3 {
            let (bs, bt) = (
                brute_force_intersect(&sl2, p, j, 2 * j).unwrap(),
                brute_force_intersect(&torus, p, j, 2 * j).unwrap(),
            );
            o.check(bs == 0, format!("sl2 p={p} j={j}: {bs}"));
            o.check(bt == 2, format!("torus p={p} j={j}: {bt}"));
            o.check(orbit_intersect_one_sided(&sl2, p, j).unwrap() == bs, format!("sl2 closed form p={p} j={j}"));
            o.check(orbit_intersect_one_sided(&torus, p, j).unwrap() == bt, format!("torus closed form p={p} j={j}"));
        }
    }
    o
}

const SWEEP: [u64; 4] = [50, 100, 200, 400];

fn sweep(spectrum: &SpectrumModel, kind: OrbitKind) -> Vec<SweepEntry> {
    let f: IntPoly = "x^2+1".parse().unwrap();
    let orbit = OrbitModel::new(kind, 1).unwrap();
    scaling_sweep(&SWEEP, &f, spectrum, &orbit, &AmplifierConfig::default()).unwrap()
}

fn band(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::MIN, f64::max);
    let min = xs.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    for (name, spectrum) in [("trivial", SpectrumModel::trivial()), ("tempered(42)", SpectrumModel::tempered(42))] {
        let sl2 = sweep(&spectrum, OrbitKind::Sl2);
        let torus = sweep(&spectrum, OrbitKind::Multiplicative);

        let pos: Vec<&BigRational> = sl2.iter().map(|e| &e.report.ratio_positivity).collect();
        let decreasing = pos.windows(2).all(|w| w[1] < w[0]);
        o.line(
            decreasing && *pos[0] <= rat(1),
            format!("(a) {name}: cTau/Lambda = {}", pos.iter().map(|r| fmt(r)).collect::<Vec<_>>().join(", ")),
        );

        let zero = sl2.iter().all(|e| e.report.ratio_intersections.is_zero());
        o.line(zero, format!("(b) {name}: sl2 ratioIntersections identically 0"));

        let ri: Vec<&BigRational> = torus.iter().map(|e| &e.report.ratio_intersections).collect();
        o.line(
            ri.windows(2).all(|w| w[1] < w[0]),
            format!(
                "(c) {name}: torus normInf*count/Lambda = {}",
                ri.iter().map(|r| fmt(r)).collect::<Vec<_>>().join(", ")
            ),
        );

        let lam: Vec<f64> = sl2.iter().map(|e| e.lambda_normalized).collect();
        let norm: Vec<f64> = sl2.iter().map(|e| e.norm_inf_normalized).collect();
        let ells: Vec<u32> = sl2.iter().map(|e| e.report.ell).collect();
        o.line(
            band(&lam) <= 4.0,
            format!("(d) {name}: Lambda log^2Q/Q^(2+ell) band {:.2} over {lam:.4?} (ell {ells:?})", band(&lam)),
        );
        o.line(band(&norm) <= 4.0, format!("(d) {name}: normInf/Q^(ell-1) band {:.2} over {norm:.4?}", band(&norm)));
    }
    o
}

fn fmt(x: &BigRational) -> String {
    format!("{:.4e}", x.to_f64().unwrap_or(f64::NAN))
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let f: IntPoly = "x^2+1".parse().unwrap();
    let sl2 = OrbitModel::new(OrbitKind::Sl2, 1).unwrap();
    for spectrum in [SpectrumModel::trivial(), SpectrumModel::tempered(42)] {
        let (tau, r) = build_amplifier(50, &f, &spectrum, &sl2, &AmplifierConfig::default()).unwrap();
        let floor = verify_spectral_floor(&tau, r.c_tau, 1000, 42).unwrap();
        o.line(
            floor.holds,
            format!("{:?}: 1000 systems, minimum {} >= -{}", spectrum.kind, fmt(&floor.minimum), r.c_tau),
        );
        let at_zero = zero_system_value(&tau).unwrap();
        o.line(at_zero == -rat(r.c_tau as i64), format!("{:?}: zero system gives {at_zero}", spectrum.kind));
        let own: BTreeMap<u64, _> = r
            .choices
            .iter()
            .map(|c| (c.prime, eigenvalue_sequence(c.prime, spectrum.lambda_p(c.prime).unwrap(), 4).unwrap()))
            .collect();
        o.line(tau.spectral_value(&own).unwrap() == r.lambda, format!("{:?}: own system gives Lambda", spectrum.kind));
    }
    o
}

fn brute_split(f: &IntPoly, p: u64) -> bool {
    let roots = (0..p).filter(|&x| {
        let mut acc = 0i128;
        for &c in f.coeffs().iter().rev() {
            acc = (acc * x as i128 + c as i128).rem_euclid(p as i128);
        }
        acc == 0
    });
    roots.count() == f.degree()
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let x2: IntPoly = "x^2+1".parse().unwrap();
    let x3: IntPoly = "x^3-2".parse().unwrap();
    let d2 = empirical_density(&x2, 1_000_000).unwrap().as_f64();
    let d3 = empirical_density(&x3, 1_000_000).unwrap().as_f64();
    o.line((0.48..=0.52).contains(&d2), format!("x^2+1 density {d2:.5}"));
    o.line((1.0 / 6.0 - 0.02..=1.0 / 6.0 + 0.02).contains(&d3), format!("x^3-2 density {d3:.5}"));
    let mut agree = true;
    for s in ["x^2+1", "x^3-2", "x^2-2", "x^4+1"] {
        let f: IntPoly = s.parse().unwrap();
        for p in primes_up_to(500) {
            agree &= splits_completely(&f, p).unwrap() == brute_split(&f, p);
        }
    }
    o.line(agree, "splitsCompletely agrees with root counting for p <= 500 on the corpus");
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let t = denom_suite(1000, 42).unwrap();
    for (name, k) in [
        ("sum submultiplicativity", t.sum_submultiplicative),
        ("product submultiplicativity", t.product_submultiplicative),
        ("matrix sum submultiplicativity", t.matrix_sum_submultiplicative),
        ("matrix product submultiplicativity", t.matrix_product_submultiplicative),
        ("unimodular right-invariance", t.unimodular_invariant),
        ("SL2 inverse denominator equality", t.sl2_inverse_equal),
        ("product formula exactly 1", t.product_formula_exact),
        ("denom * |x|^2 >= 1", t.height_lower_bound),
    ] {
        o.check(k == 1000, format!("{name}: {k}/1000"));
    }
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let t = certifier_suite(500, 42).unwrap();
    o.check(t.false_forced == 0, format!("{} nonzero commutators passed the gate", t.false_forced));
    o.check(t.nonzero_commutators > 0, "no nonzero commutators sampled");
    o.check(
        t.commuting_certified == t.commuting_pairs,
        format!("commuting pairs certified {}/{}", t.commuting_certified, t.commuting_pairs),
    );
    o
}

fn run_cli(args: &[&str], out: &std::path::Path) -> (Vec<u8>, Vec<u8>) {
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    full.extend(["--out", out_str]);
    Command::new(env!("CARGO_BIN_EXE_heckeamp")).args(&full).output().unwrap();
    let file = std::fs::read(out).unwrap_or_default();
    let stdout = Command::new(env!("CARGO_BIN_EXE_heckeamp")).args(args).output().unwrap().stdout;
    (file, stdout)
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 5] = [
        &["verify-hecke", "--primes", "2,3,5", "--max-radius", "6", "--seed", "7"],
        &["split-density", "--poly", "x^3-2", "--limit", "50000"],
        &["denom-check", "--samples", "200", "--seed", "7"],
        &["orbit-check", "--orbit", "torus", "--index", "2", "--seed", "7"],
        &[
            "amplifier",
            "--Q",
            "50,100",
            "--spectrum",
            "tempered",
            "--seed",
            "7",
            "--orbit",
            "torus",
            "--samples",
            "100",
        ],
    ];
    for (i, args) in commands.iter().enumerate() {
        let (a, sa) = run_cli(args, &dir.path().join(format!("a{i}.json")));
        let (b, sb) = run_cli(args, &dir.path().join(format!("b{i}.json")));
        o.check(!a.is_empty() && a == b, format!("{}: --out reports differ", args[0]));
        o.check(sa == sb && sa == a, format!("{}: stdout reports differ", args[0]));
    }
    o
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "Hecke identity exactness", criterion_1, Duration::from_secs(60)),
        (2, "Sphere and mass laws", criterion_2, Duration::from_secs(30)),
        (3, "Iwaniec dichotomy constant 0.5", criterion_3, Duration::from_secs(60)),
        (4, "One-sided avoidance", criterion_4, Duration::from_secs(60)),
        (5, "Amplifier bound ratios", criterion_5, Duration::from_secs(300)),
        (6, "Spectral floor", criterion_6, Duration::from_secs(60)),
        (7, "Splitting densities", criterion_7, Duration::from_secs(120)),
        (8, "Denominator laws", criterion_8, Duration::from_secs(60)),
        (9, "Commutator certifier", criterion_9, Duration::from_secs(60)),
        (10, "Determinism", criterion_10, Duration::from_secs(300)),
    ];
    let mut failed = Vec::new();
    for (n, name, run, limit) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        outcome.check(elapsed <= limit, format!("runtime {elapsed:.1?} exceeds {limit:?}"));
        println!("criterion {n:>2} {}: {name} ({:.1?})", if outcome.pass { "PASS" } else { "FAIL" }, elapsed);
        for note in &outcome.notes {
            println!("    {note}");
        }
        if !outcome.pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
