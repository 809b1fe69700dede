use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use heckeamp::amplifier::default_c0;
use heckeamp::{OrbitKind, SpectrumModel};
use heckeamp_cli::commands::{self, rational_arg, AmplifierArgs};
use heckeamp_cli::report::Report;
use num_rational::BigRational;

#[derive(Parser)]
#[command(name = "heckeamp", version, about = "Exact verification of Hecke amplifiers on Bruhat-Tits trees")]
struct Cli {
    /// Write the report here (atomically) instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Include wall time in the report (breaks byte-identical reruns)
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpectrumArg {
    Trivial,
    Tempered,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitArg {
    Sl2,
    Torus,
}

impl From<OrbitArg> for OrbitKind {
    fn from(o: OrbitArg) -> Self {
        match o {
            OrbitArg::Sl2 => OrbitKind::Sl2,
            OrbitArg::Torus => OrbitKind::Multiplicative,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the Hecke algebra identities, mass laws, commutativity and associativity
    VerifyHecke {
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 8)]
        max_radius: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Empirical density of primes splitting completely
    SplitDensity {
        #[arg(long, default_value = "x^2+1")]
        poly: String,
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        /// Expected density, e.g. 1/6; enables the tolerance verdict
        #[arg(long, value_parser = rational_arg)]
        expected: Option<BigRational>,
        #[arg(long, value_parser = rational_arg, default_value = "1/50")]
        tolerance: BigRational,
    },
    /// Denominator laws over Q(i) and the commutator certifier
    DenomCheck {
        #[arg(long, default_value_t = 1000)]
        samples: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Closed-form orbit intersection counts against brute-force enumeration
    OrbitCheck {
        #[arg(long, value_enum, default_value = "torus")]
        orbit: OrbitArg,
        #[arg(long, default_value_t = 1)]
        index: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        max_radius: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Build amplifiers over a sweep of Q and report their bound ratios
    Amplifier {
        #[arg(long = "Q", value_delimiter = ',', default_value = "50,100,200,400")]
        q: Vec<u64>,
        #[arg(long, default_value = "x^2+1")]
        poly: String,
        #[arg(long, value_enum, default_value = "trivial")]
        spectrum: SpectrumArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "sl2")]
        orbit: OrbitArg,
        #[arg(long, default_value_t = 1)]
        index: u32,
        /// Random eigenvalue systems tested against the spectral floor, per Q
        #[arg(long, default_value_t = 1000)]
        samples: u32,
        /// Dichotomy constant
        #[arg(long, value_parser = rational_arg)]
        c0: Option<BigRational>,
    },
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::VerifyHecke { primes, max_radius, seed } => commands::verify_hecke(&primes, max_radius, seed),
        Command::SplitDensity { poly, limit, expected, tolerance } => {
            commands::split_density(&poly, limit, expected.as_ref(), &tolerance)
        }
        Command::DenomCheck { samples, seed } => commands::denom_check(samples, seed),
        Command::OrbitCheck { orbit, index, primes, max_radius, seed } => {
            commands::orbit_check(orbit.into(), index, &primes, max_radius, seed)
        }
        Command::Amplifier { q, poly, spectrum, seed, orbit, index, samples, c0 } => {
            let spectrum = match spectrum {
                SpectrumArg::Trivial => SpectrumModel::trivial(),
                SpectrumArg::Tempered => SpectrumModel::tempered(seed),
            };
            commands::amplifier(&AmplifierArgs {
                qs: &q,
                poly: &poly,
                spectrum,
                seed,
                orbit: orbit.into(),
                index,
                c0: c0.unwrap_or_else(default_c0),
                floor_trials: samples,
            })
        }
    }
}

fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let elapsed = start.elapsed();
    let text = report.render(cli.timing.then_some(elapsed));
    if !cli.timing {
        eprintln!("wall time: {:.3}s", elapsed.as_secs_f64());
    }
    let written = match &cli.out {
        Some(path) => write_atomically(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(v) => {
            eprintln!("FAIL: {}", v.name);
            ExitCode::from(1)
        }
    }
}
