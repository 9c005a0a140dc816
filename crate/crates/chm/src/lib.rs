//! Complex Hadamard matrices: a catalogue for dimensions 1 to 16, analysis
//! tools (Hadamard test, dephasing, defect, Haagerup invariants, equivalence
//! search, unbiasedness) and constructions (tensor, Diță, doubling,
//! quadrupling, affine families, closed subchain patterns).
//!
//! Matrices are stored unscaled with unimodular entries and 0-based indices.
//! Phases are kept as exact rational turns wherever possible.
#![forbid(unsafe_code)]

pub mod analysis;
pub mod catalogue;
pub mod construct;
pub mod core;
pub mod error;
pub(crate) mod exact;
pub mod io;
pub mod par;

pub use crate::core::{
    apply_equivalence, matrix_variants, phase_to_complex, AffineFamily, DiagonalPhase,
    EquivalenceWitness, HadamardMatrix, LogPhaseMatrix, MatrixMeta, MatrixVariants,
    PermutationVector, PhaseValue, UnimodularEntry, EPS_EQUIV, EPS_UNIMOD,
};
pub use crate::error::ChmError;
pub use crate::par::Execution;
