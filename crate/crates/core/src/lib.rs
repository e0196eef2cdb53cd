//! Element-wise separability criteria for n-partite quantum states.
//!
//! Everything here works directly on the entries of a density matrix in the
//! computational product basis, 1-based, with party 1 as the most significant
//! digit of the basis label:
//!
//! - [`tensor_index`] — the mixed-radix index algebra the criteria are
//!   written in (anti-diagonal mirrors, corner sets, excitation labels).
//! - [`density_matrix`] — validated immutable dense complex matrices.
//! - [`state_factory`] — GHZ / W / noise-family constructors and seeded
//!   samplers for random fully separable and biseparable mixtures.
//! - [`criteria`] — the criterion evaluations themselves. Each returns a
//!   [`criteria::CriterionReport`] with lhs, rhs, margin, verdict and the
//!   entanglement class a violation certifies. A violated biseparability
//!   criterion certifies genuine multipartite entanglement; a violated
//!   full-separability criterion certifies the state is not fully separable;
//!   a satisfied criterion is inconclusive, except for the exact classifier
//!   of the GHZ-with-white-noise family.
//! - [`oracle`] — a sampling harness that stress-tests criterion soundness
//!   on separable states and the pure-state equality identities.

pub mod criteria;
pub mod density_matrix;
pub mod oracle;
pub mod state_factory;
pub mod tensor_index;

use thiserror::Error;

/// Errors shared by all modules of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid excitation pair (i = {i}, j = {j}): parties must be distinct")]
    InvalidPair { i: usize, j: usize },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("matrix is {rows}x{cols}, but the subsystem dimensions require {expected}x{expected}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("hermiticity violation at ({i},{j}): |rho[i,j] - conj(rho[j,i])| = {deviation:e}")]
    HermiticityViolation { i: usize, j: usize, deviation: f64 },

    #[error("trace violation: trace = {trace}, must be 1")]
    TraceViolation { trace: f64 },

    #[error("negative diagonal entry rho[{index},{index}] = {value:e}")]
    NegativeDiagonal { index: usize, value: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:e}")]
    PsdViolation { min_eigenvalue: f64 },

    #[error("criterion requires an all-qubit system, got party dimensions {dims:?}")]
    UnsupportedDimension { dims: Vec<usize> },

    #[error("criterion not applicable: {0}")]
    Inapplicable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no sign change on [{lo}, {hi}]: margin({lo}) = {margin_lo:e}, margin({hi}) = {margin_hi:e}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        margin_lo: f64,
        margin_hi: f64,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use criteria::{CriterionId, CriterionReport, Implication, NoiseClass, Verdict};
pub use density_matrix::{DensityMatrix, ValidationConfig};
pub use state_factory::{NoiseFamilyParams, SampleMode, SeparableSampleSpec};
pub use tensor_index::{Bipartition, MultiIndex, SubsystemDims};
