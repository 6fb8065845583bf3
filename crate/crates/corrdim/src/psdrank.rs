//! Fidelity lower bound on the PSD-rank of a nonnegative matrix.
//!
//! The PSD-rank of an entrywise-nonnegative matrix M is the smallest c such
//! that M_ij = Tr(A_i·B_j) for c×c PSD matrices A_i, B_j — the single-input
//! analogue of an operator representation. After normalizing M to a joint
//! distribution q, the bound is the reciprocal of
//! Σ_{j1,j2} √(f_{j1}·f_{j2})·c_{j1,j2}, where f_j are the column masses and
//! c_{j1,j2} = Σ_i √(q_{i,j1}·q_{i,j2}) — equivalently Σ f_{j1} f_{j2}
//! F(P_{j1}, P_{j2}) over the normalized columns. Both orientations are
//! evaluated and the larger bound returned.
//!
//! A correlation enters through [`flatten`], which lays p(ab|xy) out as a
//! (nx·na) × (ny·nb) matrix; its PSD-rank also caps the correlation's local
//! dimension, so [`compare_bounds`] reports this bound next to the direct
//! ones — neither dominates the other in general.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, DimensionBound, ExtendedBound};
use crate::corr::Correlation;
use crate::tol::ZERO_BRACKET;

#[derive(Debug, Error)]
pub enum PsdRankError {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("entry at flat index {index} is {value}; entries must be nonnegative")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entry at flat index {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("matrix has no positive entry")]
    ZeroMatrix,
    #[error("malformed matrix JSON: {0}")]
    Parse(#[from] serde_json::Error),
}

/// An entrywise-nonnegative matrix with at least one positive entry,
/// stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct NonnegMatrixJson {
    rows: usize,
    cols: usize,
    m: Vec<f64>,
}

impl NonnegMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, PsdRankError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(PsdRankError::BadShape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(PsdRankError::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(PsdRankError::NegativeEntry { index, value });
            }
        }
        if entries.iter().all(|&v| v == 0.0) {
            return Err(PsdRankError::ZeroMatrix);
        }
        Ok(NonnegMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[j * self.rows + i] = self.at(i, j);
            }
        }
        NonnegMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: t,
        }
    }

    pub fn to_json(&self) -> String {
        let raw = NonnegMatrixJson {
            rows: self.rows,
            cols: self.cols,
            m: self.entries.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("matrix serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, PsdRankError> {
        let raw: NonnegMatrixJson = serde_json::from_str(text)?;
        Self::new(raw.rows, raw.cols, raw.m)
    }
}

/// Lays a correlation out as the (nx·na) × (ny·nb) matrix with entry
/// p(ab|xy) at row x·na + a, column y·nb + b.
pub fn flatten(p: &Correlation) -> NonnegMatrix {
    let s = p.sizes();
    let mut entries = vec![0.0; s.table_len()];
    let cols = s.y * s.b;
    for x in 0..s.x {
        for y in 0..s.y {
            for a in 0..s.a {
                for b in 0..s.b {
                    entries[(x * s.a + a) * cols + (y * s.b + b)] =
                        p.probability(x, y, a, b).expect("index within sizes");
                }
            }
        }
    }
    NonnegMatrix::new(s.x * s.a, s.y * s.b, entries).expect("correlation tables are nonzero")
}

/// Σ_{j1,j2} √(f_{j1}·f_{j2}) · Σ_i √(q_{i,j1}·q_{i,j2}) for a matrix whose
/// entries sum to 1.
fn column_overlap_mass(q: &NonnegMatrix) -> f64 {
    let sq: Vec<f64> = q.entries.iter().map(|&v| v.sqrt()).collect();
    let mut masses = vec![0.0; q.cols];
    for (j, mass) in masses.iter_mut().enumerate() {
        for i in 0..q.rows {
            *mass += q.entries[i * q.cols + j];
        }
    }
    let mut denom = 0.0;
    for j1 in 0..q.cols {
        for j2 in 0..q.cols {
            let mut c = 0.0;
            for i in 0..q.rows {
                c += sq[i * q.cols + j1] * sq[i * q.cols + j2];
            }
            denom += (masses[j1] * masses[j2]).sqrt() * c;
        }
    }
    denom
}

/// The fidelity lower bound on PSD-rank. Scale-invariant (the matrix is
/// normalized to total mass 1 first), and symmetric under transposition
/// (both orientations are evaluated, the larger bound wins). Equals the
/// matrix's true PSD-rank on, e.g., identity matrices.
pub fn psd_rank_fidelity_bound(m: &NonnegMatrix) -> ExtendedBound {
    let total: f64 = m.entries.iter().sum();
    let q = NonnegMatrix {
        rows: m.rows,
        cols: m.cols,
        entries: m.entries.iter().map(|&v| v / total).collect(),
    };
    let mut best = ExtendedBound::Finite(0.0);
    for denom in [column_overlap_mass(&q), column_overlap_mass(&q.transpose())] {
        let bound = if denom < ZERO_BRACKET {
            ExtendedBound::Infinite
        } else {
            ExtendedBound::Finite(1.0 / denom)
        };
        if bound.value() > best.value() {
            best = bound;
        }
    }
    best
}

/// Both bound families for one correlation, side by side: the PSD-rank
/// bound of the flattened table, and the direct dimension bounds. Neither
/// one dominates the other.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub flattened_psd_bound: ExtendedBound,
    pub f1: ExtendedBound,
    pub f2: ExtendedBound,
    pub dimension_lower_bound: DimensionBound,
}

pub fn compare_bounds(p: &Correlation) -> BoundComparison {
    let report = bounds::dimension_lower_bound(p);
    BoundComparison {
        flattened_psd_bound: psd_rank_fidelity_bound(&flatten(p)),
        f1: report.f1,
        f2: report.f2,
        dimension_lower_bound: report.dimension_lower_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::guarded_ceiling;
    use crate::corr::Sizes;
    use crate::generators::{chsh_optimal, magic_square, uniform};

    fn finite(b: ExtendedBound) -> f64 {
        match b {
            ExtendedBound::Finite(v) => v,
            ExtendedBound::Infinite => panic!("expected finite bound"),
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            NonnegMatrix::new(2, 2, vec![1.0; 3]),
            Err(PsdRankError::BadShape { .. })
        ));
        assert!(matches!(
            NonnegMatrix::new(1, 2, vec![1.0, -0.5]),
            Err(PsdRankError::NegativeEntry { index: 1, .. })
        ));
        assert!(matches!(
            NonnegMatrix::new(1, 2, vec![0.0, 0.0]),
            Err(PsdRankError::ZeroMatrix)
        ));
    }

    #[test]
    fn identity_bound_is_the_dimension() {
        for n in 1..=6 {
            let mut entries = vec![0.0; n * n];
            for i in 0..n {
                entries[i * n + i] = 1.0;
            }
            let m = NonnegMatrix::new(n, n, entries).unwrap();
            assert!((finite(psd_rank_fidelity_bound(&m)) - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn all_ones_bound_is_one() {
        let m = NonnegMatrix::new(2, 2, vec![1.0; 4]).unwrap();
        assert!((finite(psd_rank_fidelity_bound(&m)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flatten_layout() {
        let p = chsh_optimal();
        let m = flatten(&p);
        assert_eq!((m.rows(), m.cols()), (4, 4));
        let total: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| m.at(i, j))
            .sum();
        assert!((total - 4.0).abs() < 1e-12);
        // Row x·na + a, column y·nb + b.
        let row = |x: usize, a: usize| 2 * x + a;
        let col = |y: usize, b: usize| 2 * y + b;
        assert_eq!(m.at(row(0, 1), col(1, 0)), p.probability(0, 1, 1, 0).unwrap());
        assert_eq!(m.at(row(1, 0), col(0, 1)), p.probability(1, 0, 0, 1).unwrap());
    }

    #[test]
    fn chsh_flattened_bound() {
        let m = flatten(&chsh_optimal());
        // 1/(1/2 + √2/4) = 4 − 2√2.
        let expect = 4.0 - 2.0 * std::f64::consts::SQRT_2;
        assert!((finite(psd_rank_fidelity_bound(&m)) - expect).abs() < 1e-12);
    }

    #[test]
    fn magic_square_flattened_bound_is_two() {
        let m = flatten(&magic_square());
        assert_eq!((m.rows(), m.cols()), (24, 24));
        let nonzero = (0..24)
            .flat_map(|i| (0..24).map(move |j| (i, j)))
            .filter(|&(i, j)| m.at(i, j) > 0.0)
            .count();
        assert_eq!(nonzero, 72);
        let bound = finite(psd_rank_fidelity_bound(&m));
        assert!((bound - 2.0).abs() < 1e-12, "bound {bound}");
        assert_eq!(guarded_ceiling(bound), 2);
    }

    #[test]
    fn scale_invariance() {
        let m = flatten(&chsh_optimal());
        let scaled = NonnegMatrix::new(
            m.rows(),
            m.cols(),
            m.entries.iter().map(|&v| 37.5 * v).collect(),
        )
        .unwrap();
        let a = finite(psd_rank_fidelity_bound(&m));
        let b = finite(psd_rank_fidelity_bound(&scaled));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn transpose_symmetry() {
        // Dyadic entries keep the normalizing total exact in either
        // summation order, so the two orientations agree bit for bit.
        let m =
            NonnegMatrix::new(2, 3, vec![0.5, 0.25, 0.0, 0.125, 0.0625, 0.0625]).unwrap();
        let a = finite(psd_rank_fidelity_bound(&m));
        let b = finite(psd_rank_fidelity_bound(&m.transpose()));
        assert_eq!(a, b);

        // Non-dyadic totals can round differently per orientation; the
        // bounds still agree to machine precision.
        let m = NonnegMatrix::new(2, 3, vec![0.5, 0.1, 0.0, 0.2, 0.1, 0.1]).unwrap();
        let a = finite(psd_rank_fidelity_bound(&m));
        let b = finite(psd_rank_fidelity_bound(&m.transpose()));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn comparison_on_magic_square() {
        let r = compare_bounds(&magic_square());
        assert!((finite(r.flattened_psd_bound) - 2.0).abs() < 1e-9);
        assert!((finite(r.f1) - 4.0).abs() < 1e-9);
        assert_eq!(r.dimension_lower_bound, DimensionBound::Finite(4));
    }

    #[test]
    fn comparison_on_uniform_table() {
        let r = compare_bounds(&uniform(Sizes::new(2, 2, 2, 2)).unwrap());
        assert!((finite(r.flattened_psd_bound) - 1.0).abs() < 1e-9);
        assert!((finite(r.f1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_input_bound_never_exceeds_the_direct_bound() {
        // On one-input scenarios the flattened bound coincides with the
        // direct formula up to replacing squared column fidelities by plain
        // ones, so it can only be smaller; equal when columns have disjoint
        // support.
        let p = Correlation::new(
            Sizes::new(1, 1, 3, 3),
            vec![0.3, 0.05, 0.0, 0.05, 0.25, 0.05, 0.0, 0.05, 0.25],
        )
        .unwrap();
        let r = compare_bounds(&p);
        let direct = finite(r.f1).max(finite(r.f2));
        assert!(finite(r.flattened_psd_bound) <= direct + 1e-9);

        // Disjoint columns: both views collapse to the same value.
        let diag = Correlation::new(
            Sizes::new(1, 1, 2, 2),
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let r = compare_bounds(&diag);
        assert!((finite(r.flattened_psd_bound) - 2.0).abs() < 1e-12);
        assert!((finite(r.f1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_json_round_trips() {
        let m = flatten(&chsh_optimal());
        let back = NonnegMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(NonnegMatrix::from_json("{\"rows\": 1").is_err());
    }
}
