//! Exact machinery for Hecke amplifiers on Bruhat-Tits trees: tree
//! combinatorics, the spherical Hecke algebra, orbit intersection counts,
//! denominators over `Q(i)`, and split-prime selection.

pub mod amplifier;
pub mod error;
pub mod hecke;
pub mod numbers;
pub mod orbits;
pub mod primes;
pub mod scalar;
pub mod splitting;
pub mod tree;

pub use amplifier::{
    build_amplifier, pick_local, scaling_sweep, verify_spectral_floor, AmplifierConfig, AmplifierReport, LocalChoice,
    SpectrumKind, SpectrumModel, SweepEntry, Verdict,
};
pub use error::{Error, Result};
pub use hecke::{
    convolve, eigenvalue_sequence, global_assemble, subtract_identity, EigenvalueSequence, GlobalHeckeElement,
    LocalHeckeElement, Phase, Spectra, SpectralTransform, SupportPoint,
};
pub use numbers::{BaseField, Certificate, GaussInt, GaussPrime, GaussRat, Mat2};
pub use orbits::{OrbitKind, OrbitModel, ProductPoint, Translate};
pub use scalar::Scalar;
pub use splitting::{IntPoly, SplitStatus};
pub use tree::TreeVertex;
