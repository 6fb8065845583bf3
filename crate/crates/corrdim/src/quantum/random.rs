//! Seeded random states, measurements, and representations.
//!
//! Every function here derives all randomness from an explicit seed via a
//! ChaCha8 stream with a documented draw order, so each output is bit-stable
//! per seed: Gaussian matrices are filled row-major, real part before
//! imaginary part, and composite structures draw their parts in the listed
//! order.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{C64, HermitianMatrix};
use super::repr::{OperatorRepresentation, PairRepresentation, PovmFamily};
use super::state::QuantumState;
use super::QuantumError;
use crate::corr::Sizes;

fn gaussian_matrix(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        // from_fn fills column-by-column; the draw order contract is simply
        // "one (re, im) pair per entry in nalgebra fill order".
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// A Wishart-like PSD matrix G·G†.
fn random_psd(rng: &mut ChaCha8Rng, dim: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, dim);
    let m = &g * g.adjoint();
    HermitianMatrix::from_complex(m).expect("G·G† is Hermitian")
}

/// A full-rank random density matrix: G·G† normalized to unit trace.
pub fn random_state(dim: usize, seed: u64) -> Result<QuantumState, QuantumError> {
    if dim == 0 {
        return Err(QuantumError::BadShape("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = random_psd(&mut rng, dim);
    QuantumState::new(raw.scaled(1.0 / raw.trace()))
}

/// One random POVM with the given number of outcomes: per outcome a Wishart
/// matrix H_a, then A_a = T^(−1/2)·H_a·T^(−1/2) with T = Σ_a H_a, which sums
/// to the identity by construction.
pub fn random_povm(
    rng: &mut ChaCha8Rng,
    dim: usize,
    outcomes: usize,
) -> Vec<HermitianMatrix> {
    let parts: Vec<HermitianMatrix> = (0..outcomes).map(|_| random_psd(rng, dim)).collect();
    let total = parts
        .iter()
        .fold(HermitianMatrix::zeros(dim), |acc, h| acc.plus(h));
    // A sum of full-rank Wishart draws; singular only on a measure-zero
    // event, which the support handling turns into a projector POVM.
    let inv_root = total.support().inv_sqrt;
    parts.iter().map(|h| h.sandwich(&inv_root)).collect()
}

/// A random operator representation on dimension d for the given scenario
/// sizes.
///
/// Draw order: one Wishart for the common sum σ (normalized so Tr(σ²) = 1),
/// then one POVM per Alice input in ascending x, then one per Bob input in
/// ascending y. The families are E_xa = σ^(1/2)·A_xa·σ^(1/2) and
/// F_yb = σ^(1/2)·B_yb·σ^(1/2), so all per-input sums equal σ and the
/// induced table is a valid correlation.
pub fn random_operator_representation(
    d: usize,
    sizes: Sizes,
    seed: u64,
) -> Result<OperatorRepresentation, QuantumError> {
    if d == 0 {
        return Err(QuantumError::BadShape("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = random_psd(&mut rng, d);
    let scale = raw.trace_product(&raw).sqrt();
    if scale <= 0.0 {
        return Err(QuantumError::ZeroSum);
    }
    let sigma = raw.scaled(1.0 / scale);
    let root = sigma.sqrt_psd()?;
    let dress = |povm: Vec<HermitianMatrix>| -> Vec<HermitianMatrix> {
        povm.iter().map(|m| m.sandwich(&root)).collect()
    };
    let e = (0..sizes.x)
        .map(|_| dress(random_povm(&mut rng, d, sizes.a)))
        .collect();
    let f = (0..sizes.y)
        .map(|_| dress(random_povm(&mut rng, d, sizes.b)))
        .collect();
    OperatorRepresentation::new(d, e, f)
}

/// A random physical representation: a full-rank state on d² dimensions and
/// random POVMs per party. Draw order: state, then Alice inputs ascending,
/// then Bob inputs ascending.
pub fn random_pair_representation(
    d: usize,
    sizes: Sizes,
    seed: u64,
) -> Result<PairRepresentation, QuantumError> {
    if d == 0 {
        return Err(QuantumError::BadShape("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = random_psd(&mut rng, d * d);
    let state = QuantumState::new(raw.scaled(1.0 / raw.trace()))?;
    let alice = PovmFamily::new(
        (0..sizes.x)
            .map(|_| random_povm(&mut rng, d, sizes.a))
            .collect(),
    )?;
    let bob = PovmFamily::new(
        (0..sizes.y)
            .map(|_| random_povm(&mut rng, d, sizes.b))
            .collect(),
    )?;
    PairRepresentation::new(d, state, alice, bob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::f1;
    use crate::quantum::repr::{
        evaluate_pair_representation, induced_correlation, verify_operator_representation,
    };
    use crate::tol::DEFAULT_TOL;

    #[test]
    fn states_are_valid_and_seed_stable() {
        for dim in 2..=6 {
            let a = random_state(dim, 17).unwrap();
            let b = random_state(dim, 17).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.dim(), dim);
        }
        let a = random_state(3, 1).unwrap();
        let b = random_state(3, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn random_povm_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let povm = random_povm(&mut rng, 3, 4);
        let sum = povm
            .iter()
            .fold(HermitianMatrix::zeros(3), |acc, m| acc.plus(m));
        assert!(sum.max_abs_diff(&HermitianMatrix::identity(3)) < 1e-12);
        for m in &povm {
            assert!(m.psd_check(DEFAULT_TOL).ok);
        }
    }

    #[test]
    fn orep_satisfies_its_own_conditions() {
        for (seed, d, sizes) in [
            (1u64, 2, Sizes::new(2, 2, 2, 2)),
            (2, 3, Sizes::new(2, 3, 3, 2)),
            (3, 1, Sizes::new(2, 2, 2, 2)),
        ] {
            let orep = random_operator_representation(d, sizes, seed).unwrap();
            let p = induced_correlation(&orep).unwrap();
            let report = verify_operator_representation(&orep, &p, DEFAULT_TOL).unwrap();
            assert!(report.verdict, "seed {seed}: {report:?}");
            // The common sum is normalized so that Tr(σ²) = 1.
            let s = orep.e_sum(0);
            assert!((s.trace_product(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orep_is_bit_stable_per_seed() {
        let sizes = Sizes::new(2, 2, 3, 2);
        let a = random_operator_representation(3, sizes, 99).unwrap();
        let b = random_operator_representation(3, sizes, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scalar_orep_has_unit_bound() {
        let p = induced_correlation(
            &random_operator_representation(1, Sizes::new(2, 2, 2, 2), 7).unwrap(),
        )
        .unwrap();
        // Scalars commute: the table is a product distribution.
        assert!((f1(&p).value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_representation_statistics_are_nonsignaling() {
        for seed in 0..5 {
            let rep = random_pair_representation(2, Sizes::new(2, 2, 2, 2), seed).unwrap();
            let p = evaluate_pair_representation(&rep).unwrap();
            assert!(p.check_nonsignaling(DEFAULT_TOL).is_nonsignaling);
        }
    }
}
