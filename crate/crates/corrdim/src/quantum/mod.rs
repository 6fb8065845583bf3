//! Quantum states, measurements, and representations of correlations.
//!
//! Two ways of realizing a correlation table live here. A
//! [`PairRepresentation`] is the physical picture: a bipartite state on a
//! d²-dimensional space measured by per-party POVMs. An
//! [`OperatorRepresentation`] is the algebraic picture: families {E_xa},
//! {F_yb} of PSD matrices with a common row/column sum whose pairwise traces
//! reproduce the table. The module evaluates both, verifies the algebraic
//! conditions, and — the centerpiece — numerically replays the derivation
//! that turns an operator representation into a dimension bound, reporting
//! every intermediate inequality ([`audit_derivation`]).

mod audit;
mod linalg;
mod random;
mod repr;
mod state;

pub use audit::{audit_derivation, AuditReport};
pub use linalg::{C64, HermitianMatrix, MatrixJson, PsdCheck, SupportDecomposition};
pub use random::{
    random_operator_representation, random_pair_representation, random_povm, random_state,
};
pub use repr::{
    chsh_pair_representation, evaluate_pair_representation, induced_correlation,
    verify_operator_representation, OperatorRepresentation, PairRepresentation, PovmFamily,
    VerificationReport,
};
pub use state::{fidelity, purity, QuantumState};

use thiserror::Error;

use crate::corr::CorrError;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is not Hermitian: max |M_ij - conj(M_ji)| = {max_dev}")]
    NotHermitian { max_dev: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("state trace is {trace}, not 1")]
    BadTrace { trace: f64 },
    #[error("dimensions differ: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("{0}")]
    BadShape(String),
    #[error("measurement family does not sum to the identity: max entry error {max_err}")]
    IncompletePovm { max_err: f64 },
    #[error("every operator of the representation is numerically zero")]
    ZeroSum,
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error("malformed representation JSON: {0}")]
    Parse(#[from] serde_json::Error),
}
