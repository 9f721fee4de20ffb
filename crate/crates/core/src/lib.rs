//! Exact computational algebra for free Lie algebras and their derivation algebras.
//!
//! The crate is organized around a handful of graded objects attached to the
//! free Lie algebra on `n` generators:
//!
//! * [`freelie`] — Lyndon bases of each graded piece, normalization of bracket
//!   expressions, the Lie bracket and the embedding into the tensor algebra;
//! * [`derivations`] — the degree-graded derivation algebra, its tangential
//!   subalgebra, the special (sum-zero) subalgebra as an exact integer kernel
//!   lattice, composition components and a catalogue of named elements;
//! * [`traces`] — contraction maps and the trace maps to cyclic words,
//!   symmetric powers and `H ⊗ Λ^{k-1} H`, together with image lattices;
//! * [`johnson`] — the degree-one-generated graded subalgebra matching the
//!   lower central series of the pure braid group, with cokernel
//!   presentations;
//! * [`abelianization`] — degree-by-degree abelianization quotients and
//!   non-membership certificates;
//! * [`exactlin`] — the exact integer/rational sparse linear algebra backing
//!   all of the above (rank, kernels, Smith normal form, lattice quotients).
//!
//! All arithmetic is exact: coefficients are arbitrary-precision rationals and
//! every rank, torsion or membership statement is certified over ℤ or ℚ as
//! requested, never floating point.

pub mod abelianization;
pub mod checks;
pub mod derivations;
pub mod exactlin;
pub mod freelie;
pub mod johnson;
pub mod traces;

mod util;

pub use exactlin::{ExactScalar, Int};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("entry is not an integer: {0}")]
    NotInteger(String),
    #[error("vector does not lie in the ambient lattice: {0}")]
    NotInAmbient(String),
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("invalid indices: {0}")]
    InvalidIndices(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
