//! Dense complex-Hermitian matrices and the one numerical kernel everything
//! else is built on: a stable Hermitian eigendecomposition.
//!
//! Square roots, inverse square roots on the support, PSD checks, spectral
//! norms, and trace norms are all derived from that single kernel, so the
//! numerical behavior of the whole module is governed by one routine.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::tol::{HERMITICITY_TOL, PSD_FLOOR, SQRT_CLAMP, SUPPORT_CUTOFF};

pub type C64 = Complex<f64>;

/// Row-major serialized matrix: each entry is an `[re, im]` pair.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

/// A square complex matrix kept exactly Hermitian.
///
/// Construction verifies Hermiticity within a tight tolerance and then
/// replaces the matrix by (M + M†)/2, so downstream arithmetic never sees
/// an asymmetric residue.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<C64>,
}

/// Outcome of a PSD check: the smallest eigenvalue and whether it clears the
/// (relative) tolerance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PsdCheck {
    pub ok: bool,
    pub min_eigenvalue: f64,
}

/// Spectral functions of a PSD matrix restricted to its support: eigenvalues
/// at or below the cutoff are treated as exact zeros.
pub struct SupportDecomposition {
    pub rank: usize,
    /// Orthogonal projector onto the support.
    pub projector: HermitianMatrix,
    /// Square root, zero off the support.
    pub sqrt: HermitianMatrix,
    /// Inverse square root on the support, zero off it.
    pub inv_sqrt: HermitianMatrix,
}

impl HermitianMatrix {
    /// Wraps a raw complex matrix, verifying it is square and Hermitian.
    pub fn from_complex(m: DMatrix<C64>) -> Result<Self, QuantumError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(QuantumError::BadShape(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut max_dev = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..=i {
                max_dev = max_dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(QuantumError::NotHermitian { max_dev });
        }
        let adj = m.adjoint();
        Ok(HermitianMatrix {
            m: (m + adj).scale(0.5),
        })
    }

    /// Builds from a callback; the result must come out Hermitian.
    pub fn from_fn(
        dim: usize,
        f: impl Fn(usize, usize) -> C64,
    ) -> Result<Self, QuantumError> {
        Self::from_complex(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds from real entries (must be symmetric).
    pub fn from_real(dim: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, QuantumError> {
        Self::from_fn(dim, |i, j| C64::new(f(i, j), 0.0))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn raw(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn plus(&self, other: &Self) -> Self {
        HermitianMatrix { m: &self.m + &other.m }
    }

    pub fn minus(&self, other: &Self) -> Self {
        HermitianMatrix { m: &self.m - &other.m }
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianMatrix {
            m: self.m.scale(c),
        }
    }

    /// Real trace (the imaginary part vanishes for Hermitian matrices).
    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Tr(A·B) for Hermitian A, B — a real number, computed entrywise as the
    /// Frobenius inner product without forming the product matrix.
    pub fn trace_product(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut s = 0.0;
        for (a, b) in self.m.iter().zip(other.m.iter()) {
            s += a.re * b.re + a.im * b.im;
        }
        s
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Kronecker product: (A ⊗ B) acts on the composite space, with A's
    /// indices most significant.
    pub fn kron(&self, other: &Self) -> Self {
        HermitianMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    /// g · self · g† for an arbitrary complex g (e.g. a basis change);
    /// Hermitian by construction.
    pub fn transform(&self, g: &DMatrix<C64>) -> Self {
        let m = g * &self.m * g.adjoint();
        let adj = m.adjoint();
        HermitianMatrix {
            m: (m + adj).scale(0.5),
        }
    }

    /// u · self · u for Hermitian u (two-sided sandwich).
    pub fn sandwich(&self, u: &Self) -> Self {
        self.transform(&u.m)
    }

    /// Eigenvalues in ascending order plus the matching unitary of column
    /// eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = self.m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .expect("Hermitian eigenvalues are finite")
        });
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let dim = self.dim();
        let mut vectors = DMatrix::zeros(dim, dim);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        (values, vectors)
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        let (values, _) = self.eigen();
        values
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    /// Checks positive semidefiniteness with a tolerance relative to the
    /// spectral norm (floored for near-zero matrices).
    pub fn psd_check(&self, tol: f64) -> PsdCheck {
        let (values, _) = self.eigen();
        let min_eigenvalue = values[0];
        let scale = values
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let threshold = (tol * scale.max(1.0)).max(PSD_FLOOR);
        PsdCheck {
            ok: min_eigenvalue >= -threshold,
            min_eigenvalue,
        }
    }

    /// Applies f to each eigenvalue and recomposes V·diag(f(λ))·V†.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let (values, vectors) = self.eigen();
        let diag = DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| C64::new(f(v), 0.0)),
        );
        let m = &vectors * DMatrix::from_diagonal(&diag) * vectors.adjoint();
        let adj = m.adjoint();
        HermitianMatrix {
            m: (m + adj).scale(0.5),
        }
    }

    /// Hermitian square root of a PSD matrix. Eigenvalues slightly below
    /// zero (relative magnitude up to the clamp threshold) are treated as 0;
    /// anything more negative is a hard error.
    pub fn sqrt_psd(&self) -> Result<Self, QuantumError> {
        let (values, _) = self.eigen();
        let scale = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let min = values[0];
        if min < -SQRT_CLAMP * scale.max(1.0) {
            return Err(QuantumError::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(self.spectral_map(|v| v.max(0.0).sqrt()))
    }

    /// Spectral projector, square root, and inverse square root on the
    /// support of a PSD matrix, treating eigenvalues ≤ cutoff·max(1, λ_max)
    /// as exact zeros. Pass [`SUPPORT_CUTOFF`] unless a caller has a reason
    /// not to.
    pub fn support_decomposition(&self, cutoff: f64) -> SupportDecomposition {
        let (values, vectors) = self.eigen();
        let scale = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let threshold = cutoff * scale.max(1.0);
        let keep: Vec<bool> = values.iter().map(|&v| v > threshold).collect();
        let rank = keep.iter().filter(|&&k| k).count();
        let recompose = |f: &dyn Fn(f64) -> f64| {
            let diag = DVector::from_iterator(
                values.len(),
                values
                    .iter()
                    .zip(&keep)
                    .map(|(&v, &k)| C64::new(if k { f(v) } else { 0.0 }, 0.0)),
            );
            let m = &vectors * DMatrix::from_diagonal(&diag) * vectors.adjoint();
            let adj = m.adjoint();
            HermitianMatrix {
                m: (m + adj).scale(0.5),
            }
        };
        SupportDecomposition {
            rank,
            projector: recompose(&|_| 1.0),
            sqrt: recompose(&|v| v.sqrt()),
            inv_sqrt: recompose(&|v| 1.0 / v.sqrt()),
        }
    }

    /// Default-cutoff support decomposition.
    pub fn support(&self) -> SupportDecomposition {
        self.support_decomposition(SUPPORT_CUTOFF)
    }

    /// Row-major `[re, im]` pairs for serialization.
    pub fn to_json_rows(&self) -> MatrixJson {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| {
                        let v = self.m[(i, j)];
                        [v.re, v.im]
                    })
                    .collect()
            })
            .collect()
    }

    /// Parses row-major `[re, im]` pairs, enforcing squareness and
    /// Hermiticity.
    pub fn from_json_rows(rows: &MatrixJson) -> Result<Self, QuantumError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(QuantumError::BadShape(format!(
                "expected a nonempty square row-major matrix, got {} rows of lengths {:?}",
                dim,
                rows.iter().map(|r| r.len()).collect::<Vec<_>>()
            )));
        }
        Self::from_fn(dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
    }
}
