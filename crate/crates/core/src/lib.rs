//! Exact dense state-vector simulation of the three-register Deutsch
//! algorithm and its Deutsch-Jozsa generalization.
//!
//! The canonical layout is `B[2] A[1] V[1]`: the problem setting, the
//! function argument and the value register. Basis indices are big-endian in
//! layout order, so `0110` is `|01>_B |1>_A |0>_V`.

pub mod closed_form;
pub mod deutsch;
pub mod dump;
pub mod error;
pub mod gates;
pub mod measure;
pub mod qcore;
pub mod verify;

pub use deutsch::{
    classical_query_count, rho_b_invariance, run_deutsch, run_deutsch_jozsa, run_deutsch_superposed,
    solution_correlation, StageLabel, StageTrace, Verdict,
};
pub use error::{Error, Result};
pub use gates::{classify_function, hadamard, oracle_fixed, oracle_with_setting, FunctionClass, FunctionTable, Unitary};
pub use measure::{deferred_equivalence, measure, outcome_distribution, sample, CircuitStep};
pub use qcore::{Amp, BasisLabel, DensityMatrix, RegisterLayout, StateVector, AMP_TOL, MATRIX_TOL};

/// Crate version, recorded in JSON dumps.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
