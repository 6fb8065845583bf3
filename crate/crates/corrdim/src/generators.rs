//! Canonical correlation constructors and combinators.
//!
//! Named generators build the well-known tables directly from their defining
//! formulas; [`deterministic`], [`mixture`], and [`product`] combine tables
//! into new ones. Every constructor returns a validated [`Correlation`].

use thiserror::Error;

use crate::corr::{CorrError, Correlation, Sizes};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("box dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("need at least one correlation")]
    Empty,
    #[error("arguments disagree in shape: {0}")]
    ShapeMismatch(String),
    #[error("weights must be nonnegative and sum to 1, got sum {sum}")]
    BadWeights { sum: f64 },
    #[error("output map sends input {input} to {output}, outside alphabet of size {alphabet}")]
    BadMap {
        input: usize,
        output: usize,
        alphabet: usize,
    },
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// The quantum-optimal CHSH table: p(ab|xy) = (2+√2)/8 when a⊕b = x·y,
/// (2−√2)/8 otherwise.
pub fn chsh_optimal() -> Correlation {
    let sizes = Sizes::new(2, 2, 2, 2);
    let win = (2.0 + std::f64::consts::SQRT_2) / 8.0;
    let lose = (2.0 - std::f64::consts::SQRT_2) / 8.0;
    let mut t = Vec::with_capacity(sizes.table_len());
    for x in 0..2usize {
        for y in 0..2usize {
            for a in 0..2usize {
                for b in 0..2usize {
                    t.push(if a ^ b == x & y { win } else { lose });
                }
            }
        }
    }
    Correlation::new(sizes, t).expect("constant table is valid")
}

#[inline]
fn bit3(v: usize, j: usize) -> usize {
    // Three-bit strings are read left to right: bit 0 is the most
    // significant bit of the integer encoding.
    (v >> (2 - j)) & 1
}

#[inline]
fn parity3(v: usize) -> usize {
    bit3(v, 0) ^ bit3(v, 1) ^ bit3(v, 2)
}

/// The optimal Magic Square table on 3 inputs per party and 3-bit outputs:
/// p(ab|xy) = 1/8 when the y-th bit of a equals the x-th bit of b, a has
/// even parity, and b has odd parity; 0 otherwise.
///
/// Outputs range over all eight 3-bit strings; the four illegal-parity
/// strings per party simply carry zero mass.
pub fn magic_square() -> Correlation {
    let sizes = Sizes::new(3, 3, 8, 8);
    let mut t = Vec::with_capacity(sizes.table_len());
    for x in 0..3usize {
        for y in 0..3usize {
            for a in 0..8usize {
                for b in 0..8usize {
                    let legal =
                        bit3(a, y) == bit3(b, x) && parity3(a) == 0 && parity3(b) == 1;
                    t.push(if legal { 0.125 } else { 0.0 });
                }
            }
        }
    }
    Correlation::new(sizes, t).expect("eight entries of 1/8 per block")
}

/// The d-outcome nonlocal box: p(ab|xy) = 1/d when x·y = (b − a) mod d,
/// 0 otherwise. Nonsignaling with uniform marginals for every d.
pub fn pr_box(d: usize) -> Result<Correlation, GeneratorError> {
    if d < 2 {
        return Err(GeneratorError::BadDimension(d));
    }
    let sizes = Sizes::new(2, 2, d, d);
    let mut t = Vec::with_capacity(sizes.table_len());
    let w = 1.0 / d as f64;
    for x in 0..2usize {
        for y in 0..2usize {
            for a in 0..d {
                for b in 0..d {
                    t.push(if (b + d - a) % d == x * y { w } else { 0.0 });
                }
            }
        }
    }
    Ok(Correlation::new(sizes, t)?)
}

/// A winning strategy pattern for the FFL game, completed uniformly:
/// for (x, y) ≠ (1, 1) the mass is uniform over the pairs with
/// x∨a ≠ y∨b, and the (1, 1) block is uniform over all four pairs.
///
/// The table is signaling by construction — that is the point: it has no
/// quantum representation of any dimension.
pub fn ffl_uniform() -> Correlation {
    let sizes = Sizes::new(2, 2, 2, 2);
    let mut t = vec![0.0; sizes.table_len()];
    let idx = |x: usize, y: usize, a: usize, b: usize| ((x * 2 + y) * 2 + a) * 2 + b;
    for (x, y, pairs) in [
        (0, 0, &[(0usize, 1usize), (1, 0)][..]),
        (0, 1, &[(0, 0), (0, 1)][..]),
        (1, 0, &[(0, 0), (1, 0)][..]),
    ] {
        for &(a, b) in pairs {
            t[idx(x, y, a, b)] = 0.5;
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            t[idx(1, 1, a, b)] = 0.25;
        }
    }
    Correlation::new(sizes, t).expect("blocks sum to 1 by construction")
}

/// The local deterministic correlation with a = fa[x] and b = fb[y].
/// Input alphabet sizes are the map lengths; `na`, `nb` set the output
/// alphabets.
pub fn deterministic(
    fa: &[usize],
    na: usize,
    fb: &[usize],
    nb: usize,
) -> Result<Correlation, GeneratorError> {
    for (input, &output) in fa.iter().enumerate() {
        if output >= na {
            return Err(GeneratorError::BadMap {
                input,
                output,
                alphabet: na,
            });
        }
    }
    for (input, &output) in fb.iter().enumerate() {
        if output >= nb {
            return Err(GeneratorError::BadMap {
                input,
                output,
                alphabet: nb,
            });
        }
    }
    let sizes = Sizes::new(fa.len(), fb.len(), na, nb);
    let mut t = vec![0.0; sizes.table_len()];
    for (x, &ax) in fa.iter().enumerate() {
        for (y, &by) in fb.iter().enumerate() {
            t[((x * sizes.y + y) * sizes.a + ax) * sizes.b + by] = 1.0;
        }
    }
    Ok(Correlation::new(sizes, t)?)
}

/// Entrywise convex combination of equal-shape correlations.
pub fn mixture(ps: &[Correlation], weights: &[f64]) -> Result<Correlation, GeneratorError> {
    let first = ps.first().ok_or(GeneratorError::Empty)?;
    if ps.len() != weights.len() {
        return Err(GeneratorError::ShapeMismatch(format!(
            "{} correlations but {} weights",
            ps.len(),
            weights.len()
        )));
    }
    for p in &ps[1..] {
        if p.sizes() != first.sizes() {
            return Err(GeneratorError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                p.sizes(),
                first.sizes()
            )));
        }
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(GeneratorError::BadWeights { sum });
    }
    let mut t = vec![0.0; first.sizes().table_len()];
    for (p, &w) in ps.iter().zip(weights) {
        for (slot, &v) in t.iter_mut().zip(p.probs()) {
            *slot += w * v;
        }
    }
    Ok(Correlation::new(first.sizes(), t)?)
}

fn product2(p: &Correlation, q: &Correlation) -> Correlation {
    let (sp, sq) = (p.sizes(), q.sizes());
    let sizes = Sizes::new(sp.x * sq.x, sp.y * sq.y, sp.a * sq.a, sp.b * sq.b);
    let mut t = Vec::with_capacity(sizes.table_len());
    // Composite indices are mixed-radix with the first factor most
    // significant: x = x1·nx2 + x2, and likewise for y, a, b.
    for x1 in 0..sp.x {
        for x2 in 0..sq.x {
            for y1 in 0..sp.y {
                for y2 in 0..sq.y {
                    for a1 in 0..sp.a {
                        for a2 in 0..sq.a {
                            for b1 in 0..sp.b {
                                for b2 in 0..sq.b {
                                    t.push(p.at(x1, y1, a1, b1) * q.at(x2, y2, a2, b2));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Correlation::new(sizes, t).expect("product of normalized blocks is normalized")
}

/// Product correlation: parties receive one input per factor and answer
/// each independently, so p(ab|xy) = Π_i p_i(a_i b_i | x_i y_i).
///
/// Composite indices pack mixed-radix with factor 0 most significant.
pub fn product(ps: &[Correlation]) -> Result<Correlation, GeneratorError> {
    let (first, rest) = ps.split_first().ok_or(GeneratorError::Empty)?;
    Ok(rest.iter().fold(first.clone(), |acc, q| product2(&acc, q)))
}

/// The uniform table over outputs: p(ab|xy) = 1/(na·nb).
pub fn uniform(sizes: Sizes) -> Result<Correlation, GeneratorError> {
    let w = 1.0 / (sizes.a * sizes.b) as f64;
    Ok(Correlation::new(sizes, vec![w; sizes.table_len()])?)
}

/// The equal-weight mixture of three deterministic tables — (a,b) fixed to
/// (1,1), fixed to (0,0), and (a,b) = (1−x, 1−y) — whose bound exceeds that
/// of every deterministic table, witnessing non-convexity of the set of
/// correlations with a 2-dimensional representation.
pub fn nonconvex_mixture() -> Correlation {
    let p1 = deterministic(&[1, 1], 2, &[1, 1], 2).expect("maps in range");
    let p2 = deterministic(&[0, 0], 2, &[0, 0], 2).expect("maps in range");
    let p3 = deterministic(&[1, 0], 2, &[1, 0], 2).expect("maps in range");
    mixture(&[p1, p2, p3], &[1.0 / 3.0; 3]).expect("equal shapes, weights sum to 1")
}
