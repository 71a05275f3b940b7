//! Information-theoretic causal inference on generic information measures.
//!
//! An information measure assigns a value to every set of observations; any
//! normalized, monotone, submodular measure yields a conditional mutual
//! information, which in turn drives Markov-condition checks and PC-style
//! structure learning. Concrete measures include Shannon entropy, the
//! logarithm of the lcm of period lengths, vocabulary size and compression
//! lengths (Lempel–Ziv, grammar based).

pub mod error;
pub mod experiment;
pub mod grammar;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod lz;
pub mod measure;
pub mod measures;
pub mod pc;
pub mod scalar;
pub mod textpipe;
pub mod verify;

pub use error::{Error, ErrorCategory, Result};
pub use lattice::{Element, GroundSet};
pub use measure::{
    cond_info, cond_mutual_info, decide_independence, joint_info, DependenceMeasure, Exactness, IndependenceDecision,
    InformationMeasure, Memoized,
};
pub use scalar::{InfoValue, LogRatio};

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
/// Shannon entropy in bits over a floating-point table.
pub type Shannon = measures::ShannonMeasure<f64>;
pub type Shannon32 = measures::ShannonMeasure<f32>;
/// `ln lcm` in floating point.
pub type LcmMeasure = measures::PeriodMeasure<f64>;
/// `ln lcm` in exact arithmetic.
pub type ExactLcmMeasure = measures::PeriodMeasure<LogRatio>;
/// Subspace dependence over exact rationals.
pub type RationalSubspaces = measures::SubspaceFixture<Rational>;
