use num_rational::BigRational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("vertices live in trees of different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("invalid vertex word for p = {prime}: {reason}")]
    InvalidWord { prime: u64, reason: String },
    #[error("radius {0} is odd; only even radii index the determinant-one Hecke algebra")]
    OddRadius(u32),
    #[error("radius {radius} exceeds the structure-constant cap {cap}")]
    RadiusCap { radius: u32, cap: u32 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("element is not a basic Hecke operator")]
    NotBasic,
    #[error("prime {0} appears more than once")]
    DuplicatePrime(u64),
    #[error("no eigenvalue sequence (or too short a one) for prime {0}")]
    MissingSpectrum(u64),
    #[error("zero has no valuation")]
    Zero,
    #[error("value too large to factor: {0}")]
    TooLarge(String),
    #[error("element {0} does not lie in the rational field")]
    NotRational(String),
    #[error("matrix is singular")]
    Singular,
    #[error("asserted archimedean bound {bound} is below the actual squared modulus {actual}")]
    ArchBoundViolated { bound: Box<BigRational>, actual: Box<BigRational> },
    #[error("product formula contradiction: nonzero commutator passed the forcing gate")]
    ForcedButNonzero,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("cannot parse polynomial {input:?}: {reason}")]
    PolyParse { input: String, reason: String },
    #[error("no split primes in [{lo}, {hi}]")]
    NoSplitPrimes { lo: u64, hi: u64 },
    #[error("need at least two split primes in [{lo}, {hi}], found {found}")]
    TooFewSplitPrimes { lo: u64, hi: u64, found: usize },
    #[error("amplified eigenvalue is not positive: {0}")]
    LambdaNonPositive(Box<BigRational>),
    #[error("neither |lambda_p| nor |lambda_p^2| clears the threshold at p = {0}")]
    DichotomyViolated(u64),
}
