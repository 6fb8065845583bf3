//! Density matrices, fidelity, and purity.

use super::linalg::{C64, HermitianMatrix};
use super::QuantumError;
use crate::tol::DEFAULT_TOL;

/// A density matrix: Hermitian, PSD within tolerance, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    m: HermitianMatrix,
}

impl QuantumState {
    /// Validates PSD-ness (relative to the spectral norm) and unit trace.
    pub fn new(m: HermitianMatrix) -> Result<Self, QuantumError> {
        let check = m.psd_check(DEFAULT_TOL);
        if !check.ok {
            return Err(QuantumError::NotPsd {
                min_eigenvalue: check.min_eigenvalue,
            });
        }
        let trace = m.trace();
        if (trace - 1.0).abs() > DEFAULT_TOL {
            return Err(QuantumError::BadTrace { trace });
        }
        Ok(QuantumState { m })
    }

    /// The pure state |v⟩⟨v| of a (not necessarily normalized) vector.
    pub fn pure(v: &[C64]) -> Result<Self, QuantumError> {
        let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm2 <= 0.0 || v.is_empty() {
            return Err(QuantumError::BadShape(
                "pure state needs a nonzero vector".into(),
            ));
        }
        let m = HermitianMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj() / norm2)?;
        Self::new(m)
    }

    /// The computational-basis pure state |k⟩⟨k| on `dim` dimensions.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self, QuantumError> {
        if k >= dim {
            return Err(QuantumError::BadShape(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        Self::pure(&v)
    }

    /// I/d on `dim` dimensions.
    pub fn maximally_mixed(dim: usize) -> Result<Self, QuantumError> {
        if dim == 0 {
            return Err(QuantumError::BadShape("dimension must be positive".into()));
        }
        Self::new(HermitianMatrix::identity(dim).scaled(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.m
    }
}

/// Fidelity between two density-like Hermitian matrices: the trace norm
/// ‖√ρ·√σ‖₁, computed as Σᵢ √λᵢ(√σ·ρ·√σ) from a single Hermitian
/// eigendecomposition. Exposed at the matrix level so audits can evaluate
/// intermediate operators that are states only up to numerical noise.
pub(crate) fn fidelity_matrices(
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
) -> Result<f64, QuantumError> {
    if rho.dim() != sigma.dim() {
        return Err(QuantumError::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let root = sigma.sqrt_psd()?;
    let gram = rho.sandwich(&root);
    let (values, _) = gram.eigen();
    // The Gram matrix is PSD up to rounding; tiny negatives are noise.
    Ok(values.iter().map(|&v| v.max(0.0).sqrt()).sum())
}

/// Fidelity F(ρ,σ) = ‖√ρ·√σ‖₁ between two states. Symmetric, 1 for equal
/// states, 0 for orthogonal supports; always within [0, 1] up to rounding.
pub fn fidelity(rho: &QuantumState, sigma: &QuantumState) -> Result<f64, QuantumError> {
    fidelity_matrices(rho.matrix(), sigma.matrix())
}

/// Tr(ρ²): 1 exactly for pure states, 1/d for the maximally mixed state,
/// and never below 1/d.
pub fn purity(rho: &QuantumState) -> f64 {
    rho.matrix().trace_product(rho.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_states() {
        let not_psd = HermitianMatrix::from_real(2, |i, j| {
            if i == j {
                if i == 0 {
                    1.5
                } else {
                    -0.5
                }
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(matches!(
            QuantumState::new(not_psd),
            Err(QuantumError::NotPsd { .. })
        ));
        let bad_trace = HermitianMatrix::identity(2);
        assert!(matches!(
            QuantumState::new(bad_trace),
            Err(QuantumError::BadTrace { .. })
        ));
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rho = QuantumState::pure(&v).unwrap();
        let f = fidelity(&rho, &rho).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_of_orthogonal_pure_states_is_zero() {
        let zero = QuantumState::basis_state(2, 0).unwrap();
        let one = QuantumState::basis_state(2, 1).unwrap();
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fidelity_pure_versus_maximally_mixed() {
        let zero = QuantumState::basis_state(2, 0).unwrap();
        let mixed = QuantumState::maximally_mixed(2).unwrap();
        let f = fidelity(&zero, &mixed).unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn fidelity_requires_equal_dims() {
        let a = QuantumState::maximally_mixed(2).unwrap();
        let b = QuantumState::maximally_mixed(3).unwrap();
        assert!(matches!(
            fidelity(&a, &b),
            Err(QuantumError::DimMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn purity_examples() {
        let pure = QuantumState::basis_state(3, 1).unwrap();
        assert!((purity(&pure) - 1.0).abs() < 1e-12);
        let mixed = QuantumState::maximally_mixed(4).unwrap();
        assert!((purity(&mixed) - 0.25).abs() < 1e-12);
        let diag = QuantumState::new(
            HermitianMatrix::from_real(2, |i, j| {
                if i != j {
                    0.0
                } else if i == 0 {
                    0.75
                } else {
                    0.25
                }
            })
            .unwrap(),
        )
        .unwrap();
        assert!((purity(&diag) - 0.625).abs() < 1e-15);
    }
}
