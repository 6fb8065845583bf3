//! Dimension lower bounds computed directly from a correlation table.
//!
//! `f1` bounds the local Hilbert-space dimension any quantum representation
//! of the table must have: for each pair of Bob inputs it sums, over output
//! pairs, the squared worst-case (over Alice's input) overlap between the
//! conditional distributions of Alice's output, and takes the reciprocal.
//! `f2` is the same quantity with the parties exchanged. The least dimension
//! is then at least `ceil(max(f1, f2))`, computed with a small guard against
//! floating-point overshoot.
//!
//! A bracket below [`ZERO_BRACKET`](crate::tol::ZERO_BRACKET) makes the bound
//! infinite: the table cannot be produced in any finite dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corr::{CorrError, Correlation, Sizes};
use crate::tol::{CEILING_GUARD, ZERO_BRACKET};

/// A nonnegative bound value that may be positive infinity.
///
/// Serializes as a plain number, or the string `"infinity"` for the infinite
/// value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum ExtendedBound {
    Finite(f64),
    Infinite,
}

impl ExtendedBound {
    /// Wraps a computed value, folding IEEE infinities into [`Infinite`].
    ///
    /// [`Infinite`]: ExtendedBound::Infinite
    pub fn from_value(v: f64) -> Self {
        debug_assert!(!v.is_nan());
        if v.is_finite() {
            ExtendedBound::Finite(v)
        } else {
            ExtendedBound::Infinite
        }
    }

    /// The value as an f64, with [`Infinite`](ExtendedBound::Infinite)
    /// mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            ExtendedBound::Finite(v) => v,
            ExtendedBound::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedBound::Infinite)
    }
}

impl Serialize for ExtendedBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedBound::Finite(v) => serializer.serialize_f64(*v),
            ExtendedBound::Infinite => serializer.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedBound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Word(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) if v.is_finite() => Ok(ExtendedBound::Finite(v)),
            Repr::Num(v) => Err(D::Error::custom(format!("non-finite bound value {v}"))),
            Repr::Word(w) if w == "infinity" => Ok(ExtendedBound::Infinite),
            Repr::Word(w) => Err(D::Error::custom(format!("expected \"infinity\", got {w:?}"))),
        }
    }
}

/// An integer dimension bound that may be positive infinity.
/// Serializes as an integer or the string `"infinity"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionBound {
    Finite(u64),
    Infinite,
}

impl DimensionBound {
    pub fn value(self) -> f64 {
        match self {
            DimensionBound::Finite(n) => n as f64,
            DimensionBound::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for DimensionBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DimensionBound::Finite(n) => serializer.serialize_u64(*n),
            DimensionBound::Infinite => serializer.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for DimensionBound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Word(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(n) => Ok(DimensionBound::Finite(n)),
            Repr::Word(w) if w == "infinity" => Ok(DimensionBound::Infinite),
            Repr::Word(w) => Err(D::Error::custom(format!("expected \"infinity\", got {w:?}"))),
        }
    }
}

/// Both directional bounds plus the integer dimension bound they imply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub f1: ExtendedBound,
    pub f2: ExtendedBound,
    pub dimension_lower_bound: DimensionBound,
}

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("perturbation radius must be a finite nonnegative number, got {0}")]
    BadEps(f64),
    #[error("need at least one sample")]
    NoSamples,
    #[error(
        "sample {sample}: block (x={x}, y={y}) lost all probability mass under the perturbation"
    )]
    InfeasiblePerturbation { x: usize, y: usize, sample: usize },
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// The overlap Σ_a √p(ab1|xy1)·√p(ab2|xy2) between the two conditional
/// distributions of Alice's output. Lies in [0, 1] for normalized tables by
/// Cauchy–Schwarz; for (y1,b1) = (y2,b2) it equals Bob's marginal.
pub fn overlap(
    p: &Correlation,
    x: usize,
    y1: usize,
    b1: usize,
    y2: usize,
    b2: usize,
) -> Result<f64, CorrError> {
    // Two checked probes validate all six indices; the loop then reads
    // directly.
    p.probability(x, y1, 0, b1)?;
    p.probability(x, y2, 0, b2)?;
    let mut s = 0.0;
    for a in 0..p.sizes().a {
        s += p.at(x, y1, a, b1).sqrt() * p.at(x, y2, a, b2).sqrt();
    }
    Ok(s)
}

/// The dimension bound seen from Bob's side: the maximum over input pairs
/// (y1, y2) of the reciprocal of Σ_{b1,b2} [min_x overlap(x,y1,b1,y2,b2)]².
///
/// A bracket below the zero threshold means no finite dimension suffices and
/// the result is infinite. All scans run in fixed ascending index order.
pub fn f1(p: &Correlation) -> ExtendedBound {
    f1_table(p.sizes(), p.probs())
}

/// The same scan on a raw nonnegative table that need not pass correlation
/// validation — the derivation audit evaluates it on defective inputs to
/// show the bound failing, not to certify it.
pub(crate) fn f1_table(sizes: Sizes, probs: &[f64]) -> ExtendedBound {
    debug_assert_eq!(probs.len(), sizes.table_len());
    let sq: Vec<f64> = probs.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let idx = |x: usize, y: usize, a: usize, b: usize| {
        ((x * sizes.y + y) * sizes.a + a) * sizes.b + b
    };
    let mut best = 0.0f64;
    for y1 in 0..sizes.y {
        for y2 in 0..sizes.y {
            let mut bracket = 0.0;
            for b1 in 0..sizes.b {
                for b2 in 0..sizes.b {
                    let mut worst = f64::INFINITY;
                    for x in 0..sizes.x {
                        let mut ov = 0.0;
                        for a in 0..sizes.a {
                            ov += sq[idx(x, y1, a, b1)] * sq[idx(x, y2, a, b2)];
                        }
                        worst = worst.min(ov);
                    }
                    bracket += worst * worst;
                }
            }
            if bracket < ZERO_BRACKET {
                return ExtendedBound::Infinite;
            }
            best = best.max(1.0 / bracket);
        }
    }
    ExtendedBound::Finite(best)
}

/// The same bound seen from Alice's side; equals `f1` of the party-swapped
/// table bit-exactly.
pub fn f2(p: &Correlation) -> ExtendedBound {
    f1(&swap_parties(p))
}

/// Exchanges the parties' roles: the result q satisfies q(ba|yx) = p(ab|xy).
pub fn swap_parties(p: &Correlation) -> Correlation {
    let s = p.sizes();
    let swapped = Sizes::new(s.y, s.x, s.b, s.a);
    let mut t = vec![0.0; swapped.table_len()];
    for x in 0..s.x {
        for y in 0..s.y {
            for a in 0..s.a {
                for b in 0..s.b {
                    t[((y * s.x + x) * s.b + b) * s.a + a] = p.at(x, y, a, b);
                }
            }
        }
    }
    Correlation::new(swapped, t).expect("relabeling preserves validity")
}

/// Rounds a bound value up to the least integer ≥ v − guard, never below 1.
/// The guard keeps a value that overshot an exact integer by floating-point
/// noise (e.g. 2.0000000004) from rounding up to the next integer.
pub fn guarded_ceiling(v: f64) -> u64 {
    (v - CEILING_GUARD).ceil().max(1.0) as u64
}

/// Evaluates both directional bounds and the integer dimension bound
/// ceil(max(f1, f2)) with the floating-point guard.
pub fn dimension_lower_bound(p: &Correlation) -> BoundReport {
    let a = f1(p);
    let b = f2(p);
    let m = a.value().max(b.value());
    let dim = if m.is_finite() {
        DimensionBound::Finite(guarded_ceiling(m))
    } else {
        DimensionBound::Infinite
    };
    BoundReport {
        f1: a,
        f2: b,
        dimension_lower_bound: dim,
    }
}

/// Minimum, maximum, and mean of a bound over perturbation samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStats {
    pub min: ExtendedBound,
    pub max: ExtendedBound,
    pub mean: ExtendedBound,
}

impl BoundStats {
    fn from_values(values: &[f64]) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        BoundStats {
            min: ExtendedBound::from_value(lo),
            max: ExtendedBound::from_value(hi),
            mean: ExtendedBound::from_value(sum / values.len() as f64),
        }
    }
}

/// Bound statistics over entrywise perturbations of one table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSummary {
    pub eps: f64,
    pub samples: usize,
    pub f1: BoundStats,
    pub f2: BoundStats,
}

/// Draws `samples` perturbed copies of `p` and reports f1/f2 statistics.
///
/// Perturbation model, fixed so results are reproducible: a ChaCha8 stream
/// seeded with `seed` yields one uniform u ∈ [−1, 1] per table entry in flat
/// index order, per sample; each entry becomes max(0, p + eps·u); each (x, y)
/// block is then rescaled to unit sum. The u values are drawn before scaling
/// by eps, so the underlying stream is identical across eps values: eps = 0
/// reproduces the input exactly, and growing eps widens nested intervals.
/// A block whose perturbed mass falls below the zero threshold aborts with
/// `InfeasiblePerturbation`; this cannot happen for eps < 1/(na·nb).
pub fn robustness_scan(
    p: &Correlation,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<RobustnessSummary, BoundsError> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(BoundsError::BadEps(eps));
    }
    if samples == 0 {
        return Err(BoundsError::NoSamples);
    }
    let sizes = p.sizes();
    let block = sizes.a * sizes.b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f1s = Vec::with_capacity(samples);
    let mut f2s = Vec::with_capacity(samples);
    for sample in 0..samples {
        let mut t: Vec<f64> = p
            .probs()
            .iter()
            .map(|&v| {
                let u: f64 = rng.random_range(-1.0..=1.0);
                (v + eps * u).max(0.0)
            })
            .collect();
        for x in 0..sizes.x {
            for y in 0..sizes.y {
                let start = (x * sizes.y + y) * block;
                let s: f64 = t[start..start + block].iter().sum();
                if s < ZERO_BRACKET {
                    return Err(BoundsError::InfeasiblePerturbation { x, y, sample });
                }
                for v in &mut t[start..start + block] {
                    *v /= s;
                }
            }
        }
        let q = Correlation::new(sizes, t)?;
        f1s.push(f1(&q).value());
        f2s.push(f2(&q).value());
    }
    Ok(RobustnessSummary {
        eps,
        samples,
        f1: BoundStats::from_values(&f1s),
        f2: BoundStats::from_values(&f2s),
    })
}
