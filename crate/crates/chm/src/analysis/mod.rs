//! Predicates and invariants on complex Hadamard matrices.

pub mod basic;
pub mod defect;
pub mod equivalence;
pub mod invariants;

pub use basic::{
    chains, circulant_decompose, circulant_transpose_permutation, default_tol, dephase,
    is_hadamard, is_unbiased_pair, log_phases, verify_circulant_transpose, Circulant, Dephasing,
    HadamardReport,
};
pub use defect::{
    defect, defect_system, exact_defect, fourier_defect_formula, is_isolated_certificate,
    orthogonality_nullity, DefectReport, ExactDefect, Isolation,
};
pub use equivalence::{equivalence_search, equivalence_search_with, SearchOutcome, DEFAULT_BUDGET};
pub use invariants::{
    haagerup_invariants, haagerup_invariants_with, inequivalent_by_invariants, InvariantSet,
    InvariantVerdict, TOL_CLUSTER,
};
