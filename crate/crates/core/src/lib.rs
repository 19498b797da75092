//! Numerical laboratory for the thresholding greedy algorithm on bases of
//! finite-dimensional normed spaces.
//!
//! The crate computes the quasi-greedy constants `C_w`, `C_t`, `C_qg` and the
//! suppression-unconditional constant `K_su` of a basis, exactly where the
//! norm family allows it and as witnessed lower bounds otherwise. On top of
//! the estimators sit constructive tools relating the two notions: splitting
//! an unconditionality violation into a greedy-operator violation, the
//! Hilbert-space orthogonality witness, and the 1-suppression renorming.
//!
//! Index sets are 0-based in the Rust API. Everything serialized to JSON uses
//! 1-based indices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
mod error;
pub mod gallery;
pub mod greedy;
pub mod instance;
pub mod polytope;
pub mod report;
mod search;
pub mod spaces;
pub mod theorem;

pub use constants::{
    analyze, cqg_constant, ct_constant, cw_constant, rayleigh_su_quadratic, suppression_constant,
    Analysis, Budget, Constant, ConstantEstimate, Exactness, Method, Witness,
};
pub use error::{Error, Result};
pub use greedy::{greedy_sets, greedy_sum, projection, residual, GreedySelection, TieMode};
pub use instance::Instance;
pub use report::{build_report, Overrides, Report, Settings};
pub use spaces::{
    dual_coefficients, make_basis, norm, validate_norm_spec, Basis, Exponent, NormSpec,
    NormedSpace, ValidationReport, Vector,
};
pub use theorem::{
    find_disjoint_violation, hilbert_orthogonality_witness, hilbert_witnesses, judge,
    renorm_suppression, verify_characterization, witness_transfer, DisjointViolation,
    GreedyViolationCertificate, HilbertWitness, Verdict, VerdictStatus, ViolationSearch,
};

/// Schema tag written into every instance, report and certificate.
pub const SCHEMA: &str = "gbl/1";

/// Coefficient magnitudes closer than this are treated as tied, and a
/// coefficient below it is outside the support.
pub const TIE_TOL: f64 = 1e-12;

/// Relative tolerance for declaring a constant equal to 1.
pub const UNIT_TOL: f64 = 1e-9;

/// Maximum dimension for enumerating all `2^n` coordinate subsets.
pub const SUBSET_CAP: usize = 20;

/// Maximum dimension for exact unit-ball vertex enumeration.
pub const VERTEX_CAP: usize = 6;
