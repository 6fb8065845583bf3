//! Two-party correlation tables.
//!
//! A [`Correlation`] stores the conditional probabilities p(ab|xy) of a
//! two-party scenario as a dense table: Alice receives input x and answers a,
//! Bob receives y and answers b. Construction validates the table (nonnegative
//! entries, each (x, y) block normalized); afterwards the value is immutable
//! and all operations are pure.
//!
//! The flat index order is fixed as `((x·ny + y)·na + a)·nb + b` so that
//! serialized files are bit-portable across machines and implementations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol::DEFAULT_TOL;

/// Alphabet sizes of the two inputs (x, y) and two outputs (a, b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sizes {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
}

impl Sizes {
    pub fn new(x: usize, y: usize, a: usize, b: usize) -> Self {
        Sizes { x, y, a, b }
    }

    /// Length of the dense probability table for these sizes.
    pub fn table_len(&self) -> usize {
        self.x * self.y * self.a * self.b
    }
}

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("alphabet sizes must all be at least 1, got {0:?}")]
    EmptyAlphabet(Sizes),
    #[error("table has {len} entries but sizes {sizes:?} require {expected}")]
    ShapeMismatch {
        len: usize,
        sizes: Sizes,
        expected: usize,
    },
    #[error("entry at flat index {index} is {value}, below -{tol}")]
    NegativeEntry { index: usize, value: f64, tol: f64 },
    #[error("entry at flat index {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("block (x={x}, y={y}) sums to {sum}, more than {tol} away from 1")]
    NotNormalized { x: usize, y: usize, sum: f64, tol: f64 },
    #[error("index (x={x}, y={y}, a={a}, b={b}) out of range for sizes {sizes:?}")]
    IndexOutOfRange {
        x: usize,
        y: usize,
        a: usize,
        b: usize,
        sizes: Sizes,
    },
    #[error("malformed correlation JSON: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Result of [`Correlation::check_nonsignaling`].
///
/// `max_violation` is the largest spread, over one party's inputs, of the
/// other party's marginal probabilities; `is_nonsignaling` holds iff that
/// spread stays within the tolerance passed to the check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignalingReport {
    pub is_nonsignaling: bool,
    pub max_violation: f64,
}

/// A validated two-party correlation p(ab|xy).
#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    sizes: Sizes,
    probs: Vec<f64>,
}

/// Serialized form; see the crate docs for the field layout.
#[derive(Serialize, Deserialize)]
struct CorrelationJson {
    sizes: Sizes,
    p: Vec<f64>,
}

impl Correlation {
    /// Validates and wraps a dense table with the default tolerance.
    pub fn new(sizes: Sizes, probs: Vec<f64>) -> Result<Self, CorrError> {
        Self::with_tol(sizes, probs, DEFAULT_TOL)
    }

    /// Validates and wraps a dense table.
    ///
    /// Entries in [-tol, 0) are clamped to exactly 0 (square roots are taken
    /// downstream); entries below -tol are errors. Every (x, y) block must
    /// sum to 1 within `tol`. Values not clamped are preserved bit-exactly.
    /// Signaling tables are accepted; see [`Correlation::check_nonsignaling`].
    pub fn with_tol(sizes: Sizes, mut probs: Vec<f64>, tol: f64) -> Result<Self, CorrError> {
        if sizes.x == 0 || sizes.y == 0 || sizes.a == 0 || sizes.b == 0 {
            return Err(CorrError::EmptyAlphabet(sizes));
        }
        let expected = sizes.table_len();
        if probs.len() != expected {
            return Err(CorrError::ShapeMismatch {
                len: probs.len(),
                sizes,
                expected,
            });
        }
        for (index, v) in probs.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(CorrError::NonFiniteEntry { index });
            }
            if *v < -tol {
                return Err(CorrError::NegativeEntry {
                    index,
                    value: *v,
                    tol,
                });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let block = sizes.a * sizes.b;
        for x in 0..sizes.x {
            for y in 0..sizes.y {
                let start = (x * sizes.y + y) * block;
                let sum: f64 = probs[start..start + block].iter().sum();
                if (sum - 1.0).abs() > tol {
                    return Err(CorrError::NotNormalized { x, y, sum, tol });
                }
            }
        }
        Ok(Correlation { sizes, probs })
    }

    pub fn sizes(&self) -> Sizes {
        self.sizes
    }

    /// The dense table in flat index order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub(crate) fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.sizes.y + y) * self.sizes.a + a) * self.sizes.b + b
    }

    /// Unchecked table access for crate-internal loops whose indices come
    /// from the sizes themselves.
    #[inline]
    pub(crate) fn at(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.probs[self.idx(x, y, a, b)]
    }

    fn check_xy(&self, x: usize, y: usize) -> Result<(), CorrError> {
        if x >= self.sizes.x || y >= self.sizes.y {
            return Err(CorrError::IndexOutOfRange {
                x,
                y,
                a: 0,
                b: 0,
                sizes: self.sizes,
            });
        }
        Ok(())
    }

    /// The stored probability p(ab|xy).
    pub fn probability(&self, x: usize, y: usize, a: usize, b: usize) -> Result<f64, CorrError> {
        if x >= self.sizes.x || y >= self.sizes.y || a >= self.sizes.a || b >= self.sizes.b {
            return Err(CorrError::IndexOutOfRange {
                x,
                y,
                a,
                b,
                sizes: self.sizes,
            });
        }
        Ok(self.at(x, y, a, b))
    }

    /// Alice's output distribution for inputs (x, y): sums p(ab|xy) over b.
    pub fn marginal_a(&self, x: usize, y: usize) -> Result<Vec<f64>, CorrError> {
        self.check_xy(x, y)?;
        let mut m = vec![0.0; self.sizes.a];
        for (a, slot) in m.iter_mut().enumerate() {
            for b in 0..self.sizes.b {
                *slot += self.at(x, y, a, b);
            }
        }
        Ok(m)
    }

    /// Bob's output distribution for inputs (x, y): sums p(ab|xy) over a.
    pub fn marginal_b(&self, x: usize, y: usize) -> Result<Vec<f64>, CorrError> {
        self.check_xy(x, y)?;
        let mut m = vec![0.0; self.sizes.b];
        for a in 0..self.sizes.a {
            for (b, slot) in m.iter_mut().enumerate() {
                *slot += self.at(x, y, a, b);
            }
        }
        Ok(m)
    }

    /// Checks that neither party's marginal depends on the other party's
    /// input. `max_violation` is the worst spread (max minus min over the
    /// remote input) of any marginal probability.
    pub fn check_nonsignaling(&self, tol: f64) -> SignalingReport {
        let mut worst = 0.0f64;
        // Bob's marginal must not depend on x.
        for y in 0..self.sizes.y {
            for b in 0..self.sizes.b {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for x in 0..self.sizes.x {
                    let mut m = 0.0;
                    for a in 0..self.sizes.a {
                        m += self.at(x, y, a, b);
                    }
                    lo = lo.min(m);
                    hi = hi.max(m);
                }
                worst = worst.max(hi - lo);
            }
        }
        // Alice's marginal must not depend on y.
        for x in 0..self.sizes.x {
            for a in 0..self.sizes.a {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for y in 0..self.sizes.y {
                    let mut m = 0.0;
                    for b in 0..self.sizes.b {
                        m += self.at(x, y, a, b);
                    }
                    lo = lo.min(m);
                    hi = hi.max(m);
                }
                worst = worst.max(hi - lo);
            }
        }
        SignalingReport {
            is_nonsignaling: worst <= tol,
            max_violation: worst,
        }
    }

    /// Serializes as `{"sizes": {"x","y","a","b"}, "p": [flat table]}`.
    /// Numbers round-trip bit-exactly.
    pub fn to_json(&self) -> String {
        let raw = CorrelationJson {
            sizes: self.sizes,
            p: self.probs.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("correlation serialization cannot fail")
    }

    /// Parses and validates with the default tolerance.
    pub fn from_json(text: &str) -> Result<Self, CorrError> {
        Self::from_json_with_tol(text, DEFAULT_TOL)
    }

    /// Parses and validates; all of [`Correlation::with_tol`]'s checks apply
    /// on load.
    pub fn from_json_with_tol(text: &str, tol: f64) -> Result<Self, CorrError> {
        let raw: CorrelationJson = serde_json::from_str(text)?;
        Self::with_tol(raw.sizes, raw.p, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_probs(sizes: Sizes) -> Vec<f64> {
        vec![1.0 / (sizes.a * sizes.b) as f64; sizes.table_len()]
    }

    #[test]
    fn accepts_uniform_table() {
        let s = Sizes::new(2, 2, 2, 2);
        let p = Correlation::new(s, uniform_probs(s)).unwrap();
        assert_eq!(p.probability(0, 1, 1, 0).unwrap(), 0.25);
    }

    #[test]
    fn rejects_negative_entry() {
        let s = Sizes::new(2, 2, 2, 2);
        let mut t = uniform_probs(s);
        t[3] = -0.5;
        assert!(matches!(
            Correlation::new(s, t),
            Err(CorrError::NegativeEntry { index: 3, .. })
        ));
    }

    #[test]
    fn rejects_unnormalized_block() {
        let s = Sizes::new(2, 2, 2, 2);
        let t = vec![0.2; s.table_len()];
        assert!(matches!(
            Correlation::new(s, t),
            Err(CorrError::NotNormalized { .. })
        ));
    }

    #[test]
    fn rejects_shape_mismatch() {
        let s = Sizes::new(2, 2, 2, 2);
        assert!(matches!(
            Correlation::new(s, vec![0.25; 15]),
            Err(CorrError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let s = Sizes::new(1, 1, 2, 2);
        let t = vec![0.25, f64::NAN, 0.25, 0.25];
        assert!(matches!(
            Correlation::new(s, t),
            Err(CorrError::NonFiniteEntry { index: 1 })
        ));
    }

    #[test]
    fn clamps_tiny_negatives_to_zero() {
        let s = Sizes::new(1, 1, 2, 2);
        let t = vec![0.5, -1e-12, 0.25, 0.25 + 1e-12];
        let p = Correlation::new(s, t).unwrap();
        assert_eq!(p.probability(0, 0, 0, 1).unwrap(), 0.0);
        // Unclamped entries are preserved bit-exactly.
        assert_eq!(p.probability(0, 0, 0, 0).unwrap(), 0.5);
        assert_eq!(p.probability(0, 0, 1, 1).unwrap(), 0.25 + 1e-12);
    }

    #[test]
    fn index_out_of_range_is_reported() {
        let s = Sizes::new(2, 2, 2, 2);
        let p = Correlation::new(s, uniform_probs(s)).unwrap();
        assert!(matches!(
            p.probability(2, 0, 0, 0),
            Err(CorrError::IndexOutOfRange { .. })
        ));
        assert!(p.marginal_b(0, 2).is_err());
    }

    #[test]
    fn marginals_of_uniform_table() {
        let s = Sizes::new(2, 2, 2, 2);
        let p = Correlation::new(s, uniform_probs(s)).unwrap();
        assert_eq!(p.marginal_a(1, 0).unwrap(), vec![0.5, 0.5]);
        assert_eq!(p.marginal_b(0, 1).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn uniform_table_is_nonsignaling() {
        let s = Sizes::new(2, 2, 2, 2);
        let p = Correlation::new(s, uniform_probs(s)).unwrap();
        let report = p.check_nonsignaling(DEFAULT_TOL);
        assert!(report.is_nonsignaling);
        assert_eq!(report.max_violation, 0.0);
    }

    #[test]
    fn signaling_table_is_flagged() {
        // Bob's marginal depends on x: b copies x under y=0.
        let s = Sizes::new(2, 1, 1, 2);
        let t = vec![1.0, 0.0, 0.0, 1.0];
        let p = Correlation::new(s, t).unwrap();
        let report = p.check_nonsignaling(DEFAULT_TOL);
        assert!(!report.is_nonsignaling);
        assert_eq!(report.max_violation, 1.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = Sizes::new(2, 2, 2, 2);
        let v = (2.0 + std::f64::consts::SQRT_2) / 8.0;
        let w = (2.0 - std::f64::consts::SQRT_2) / 8.0;
        let mut t = Vec::new();
        for _ in 0..4 {
            t.extend_from_slice(&[v, w, w, v]);
        }
        let p = Correlation::new(s, t).unwrap();
        let q = Correlation::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn truncated_json_is_a_parse_error() {
        let text = r#"{"sizes": {"x": 2, "y": 2, "a": 2"#;
        assert!(matches!(
            Correlation::from_json(text),
            Err(CorrError::Parse(_))
        ));
    }

    #[test]
    fn json_with_bad_sum_fails_validation() {
        let s = Sizes::new(1, 1, 1, 2);
        let good = Correlation::new(s, vec![0.5, 0.5]).unwrap();
        let text = good.to_json().replace("0.5", "0.45");
        assert!(matches!(
            Correlation::from_json(&text),
            Err(CorrError::NotNormalized { .. })
        ));
    }
}
