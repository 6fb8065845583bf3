//! Numerical tolerances and thresholds shared across the crate.
//!
//! Every cutoff that affects a result lives here with its rationale, so the
//! numbers are auditable in one place and the modules agree with each other.

/// Default tolerance wherever a `tol` parameter has a default: table
/// normalization, nonsignaling checks, PSD checks, POVM completeness.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A bracket sum (of squared overlaps) below this is treated as a structural
/// zero, making the bound infinite. Sits far below any bracket reachable by a
/// table whose zeros are not structural: brackets of the canonical
/// correlations are all ≥ 1e-1.
pub const ZERO_BRACKET: f64 = 1e-12;

/// Subtracted before taking the ceiling when reporting integer bounds, so a
/// computed 2.0000000004 reports 2, not 3.
pub const CEILING_GUARD: f64 = 1e-9;

/// Allowed asymmetry |m[i][j] - conj(m[j][i])| when constructing a Hermitian
/// matrix from raw entries. The stored matrix is symmetrized afterwards.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Absolute floor of the relative PSD threshold, so tiny matrices are not
/// held to a threshold below representable rounding noise.
pub const PSD_FLOOR: f64 = 1e-12;

/// Eigenvalues of an operator sum at or below this cutoff are projected out
/// when the sum is rank-deficient (support restriction in the audit).
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// Relative clamp inside matrix square roots: eigenvalues in
/// [-SQRT_CLAMP * max(1, spectral norm), 0) are rounded to 0; anything more
/// negative is a hard PSD error. Lenient on purpose: square roots are taken
/// of matrices that already passed a PSD check at their own tolerance.
pub const SQRT_CLAMP: f64 = 1e-6;

/// Operator weights below this are treated as exactly zero (the operator is
/// absent and is skipped by per-pair checks).
pub const WEIGHT_FLOOR: f64 = 1e-12;
