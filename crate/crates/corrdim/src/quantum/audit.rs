//! Numerical replay of the dimension-bound derivation on a concrete
//! operator representation.
//!
//! The derivation rewrites a representation {E_xa}, {F_yb} with common sum
//! S into a normal form: E'_xa = S^(−1/2)·E_xa·S^(−1/2) are POVMs on the
//! support of S, F'_yb = S^(1/2)·F_yb·S^(1/2)/f_yb are states with weights
//! f_yb = Tr(S·F_yb), and the table factors as p(ab|xy) = f_yb·Tr(E'_xa·
//! F'_yb). From there a chain of inequalities — fidelity can only grow
//! under a measurement, trace against squared fidelity, the y-independence
//! of ρ_y = Σ_b f_yb·F'_yb, and the purity floor 1/rank — caps the bound
//! computed from the table by the support rank, hence by the dimension.
//! [`audit_derivation`] evaluates every link on concrete matrices and
//! reports the margins, so a defective representation shows exactly which
//! link breaks.

use serde::{Deserialize, Serialize};

use super::linalg::HermitianMatrix;
use super::repr::OperatorRepresentation;
use super::state::fidelity_matrices;
use super::QuantumError;
use crate::bounds::{f1_table, ExtendedBound};
use crate::tol::{SUPPORT_CUTOFF, WEIGHT_FLOOR};

/// Everything [`audit_derivation`] measured. Margins are signed distances
/// into the allowed region: a negative margin is a violated inequality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditReport {
    /// Rank of the common sum S after the support cutoff — the effective
    /// dimension the chain certifies against.
    pub common_sum_rank: usize,
    /// f_yb = Tr(S·F_yb), the weight of outcome b under input y.
    pub f_weights: Vec<Vec<f64>>,
    /// Worst entrywise difference between ρ_y for different y.
    pub rho_y_max_discrepancy: f64,
    /// Tr(ρ_y²) per y.
    pub purity_values: Vec<f64>,
    /// Every link of the chain held at the requested tolerance.
    pub chain_holds: bool,
    /// 1/min_y Tr(ρ_y²): the cap the derivation places on the table bound.
    pub implied_f1_upper: f64,
    /// The table bound of the induced correlation, for comparison.
    pub f1_value: ExtendedBound,
    /// Worst entrywise deviation of Σ_a E'_xa from the support projector.
    pub povm_completeness_max_err: f64,
    /// Worst |Σ_b f_yb − 1| over y.
    pub f_weight_sum_max_err: f64,
    /// Worst |f_yb·Tr(E'_xa·F'_yb) − Tr(E_xa·F_yb)| over entries.
    pub factorization_max_err: f64,
    /// min over state pairs and inputs x of Σ_a √(q1·q2) − F(F'_1, F'_2).
    pub fidelity_monotonicity_min_margin: f64,
    /// min over state pairs of F(F'_1, F'_2)² − Tr(F'_1·F'_2).
    pub trace_fidelity_min_margin: f64,
    /// min over y of Tr(ρ_y²) − 1/rank.
    pub purity_min_margin: f64,
}

/// Replays the derivation on `orep`, checking every intermediate identity
/// and inequality within `tol` (the two bound comparisons at the end use a
/// fixed 1e-6 slack, since they compare independently computed quantities).
///
/// A rank-deficient common sum is not an error: the derivation restricts to
/// the support of S, and `common_sum_rank` reports the effective dimension.
pub fn audit_derivation(
    orep: &OperatorRepresentation,
    tol: f64,
) -> Result<AuditReport, QuantumError> {
    let sizes = orep.sizes();
    let d = orep.dim();
    let s = orep.e_sum(0);
    let sup = s.support_decomposition(SUPPORT_CUTOFF);
    if sup.rank == 0 {
        return Err(QuantumError::ZeroSum);
    }
    let rank = sup.rank;

    // Normal form: E' families and their completeness on the support.
    let mut povm_completeness_max_err = 0.0f64;
    let mut e_prime: Vec<Vec<HermitianMatrix>> = Vec::with_capacity(sizes.x);
    for x in 0..sizes.x {
        let row: Vec<HermitianMatrix> = (0..sizes.a)
            .map(|a| orep.e(x, a).sandwich(&sup.inv_sqrt))
            .collect();
        let total = row
            .iter()
            .fold(HermitianMatrix::zeros(d), |acc, m| acc.plus(m));
        povm_completeness_max_err =
            povm_completeness_max_err.max(total.max_abs_diff(&sup.projector));
        e_prime.push(row);
    }

    // Outcome weights and normalized post-measurement states.
    let mut f_weights = vec![vec![0.0; sizes.b]; sizes.y];
    let mut f_prime: Vec<Vec<Option<HermitianMatrix>>> = vec![Vec::new(); sizes.y];
    let mut f_weight_sum_max_err = 0.0f64;
    let mut rho: Vec<HermitianMatrix> = Vec::with_capacity(sizes.y);
    for y in 0..sizes.y {
        let mut rho_y = HermitianMatrix::zeros(d);
        for (b, slot) in f_weights[y].iter_mut().enumerate() {
            let weight = s.trace_product(orep.f(y, b));
            *slot = weight;
            let dressed = orep.f(y, b).sandwich(&sup.sqrt);
            // Outcomes with (numerically) zero weight never occur; they
            // have no normalized state and drop out of the chain.
            f_prime[y].push(if weight > WEIGHT_FLOOR {
                Some(dressed.scaled(1.0 / weight))
            } else {
                None
            });
            rho_y = rho_y.plus(&dressed);
        }
        let sum: f64 = f_weights[y].iter().sum();
        f_weight_sum_max_err = f_weight_sum_max_err.max((sum - 1.0).abs());
        rho.push(rho_y);
    }

    let mut rho_y_max_discrepancy = 0.0f64;
    for y1 in 0..sizes.y {
        for y2 in (y1 + 1)..sizes.y {
            rho_y_max_discrepancy = rho_y_max_discrepancy.max(rho[y1].max_abs_diff(&rho[y2]));
        }
    }

    let purity_values: Vec<f64> = rho.iter().map(|r| r.trace_product(r)).collect();
    let min_purity = purity_values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let purity_min_margin = min_purity - 1.0 / rank as f64;
    let implied_f1_upper = if min_purity > 0.0 {
        1.0 / min_purity
    } else {
        f64::INFINITY
    };

    // Raw table and the factorization identity p = f_yb·Tr(E'·F').
    let mut raw = vec![0.0; sizes.table_len()];
    let mut factorization_max_err = 0.0f64;
    for x in 0..sizes.x {
        for y in 0..sizes.y {
            for a in 0..sizes.a {
                for b in 0..sizes.b {
                    let p = orep.e(x, a).trace_product(orep.f(y, b));
                    raw[((x * sizes.y + y) * sizes.a + a) * sizes.b + b] = p;
                    let err = match &f_prime[y][b] {
                        Some(state) => {
                            (f_weights[y][b] * e_prime[x][a].trace_product(state) - p).abs()
                        }
                        None => p.abs(),
                    };
                    factorization_max_err = factorization_max_err.max(err);
                }
            }
        }
    }

    // The inequality chain over pairs of post-measurement states.
    let outcomes: Vec<(usize, usize)> = (0..sizes.y)
        .flat_map(|y| (0..sizes.b).map(move |b| (y, b)))
        .collect();
    let mut fidelity_monotonicity_min_margin = f64::INFINITY;
    let mut trace_fidelity_min_margin = f64::INFINITY;
    let table = |x: usize, y: usize, a: usize, b: usize| {
        raw[((x * sizes.y + y) * sizes.a + a) * sizes.b + b].max(0.0)
    };
    for (i, &(y1, b1)) in outcomes.iter().enumerate() {
        let Some(first) = &f_prime[y1][b1] else {
            continue;
        };
        for &(y2, b2) in &outcomes[i..] {
            let Some(second) = &f_prime[y2][b2] else {
                continue;
            };
            let fid = fidelity_matrices(first, second)?;
            trace_fidelity_min_margin =
                trace_fidelity_min_margin.min(fid * fid - first.trace_product(second));
            let weight_root = (f_weights[y1][b1] * f_weights[y2][b2]).sqrt();
            for x in 0..sizes.x {
                let mut classical = 0.0;
                for a in 0..sizes.a {
                    classical += (table(x, y1, a, b1) * table(x, y2, a, b2)).sqrt();
                }
                fidelity_monotonicity_min_margin =
                    fidelity_monotonicity_min_margin.min(classical / weight_root - fid);
            }
        }
    }

    let f1_value = f1_table(sizes, &raw);
    let chain_holds = povm_completeness_max_err <= tol
        && f_weight_sum_max_err <= tol
        && rho_y_max_discrepancy <= tol
        && factorization_max_err <= tol
        && fidelity_monotonicity_min_margin >= -tol
        && trace_fidelity_min_margin >= -tol
        && purity_min_margin >= -tol
        && f1_value.value() <= implied_f1_upper + 1e-6
        && implied_f1_upper <= rank as f64 + 1e-6
        && f1_value.value() <= d as f64 + 1e-6;

    Ok(AuditReport {
        common_sum_rank: rank,
        f_weights,
        rho_y_max_discrepancy,
        purity_values,
        chain_holds,
        implied_f1_upper,
        f1_value,
        povm_completeness_max_err,
        f_weight_sum_max_err,
        factorization_max_err,
        fidelity_monotonicity_min_margin,
        trace_fidelity_min_margin,
        purity_min_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::random::random_operator_representation;
    use super::super::repr::chsh_pair_representation;
    use crate::corr::Sizes;

    /// The CHSH table as an operator representation: halve the projectors of
    /// the textbook construction. The common sum is I/√2, so Tr(S²) = 1.
    fn chsh_operator_representation() -> OperatorRepresentation {
        let rep = chsh_pair_representation();
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let collect = |povm: &crate::quantum::PovmFamily| -> Vec<Vec<HermitianMatrix>> {
            (0..povm.inputs())
                .map(|i| {
                    (0..povm.outcomes())
                        .map(|o| povm.element(i, o).scaled(scale))
                        .collect()
                })
                .collect()
        };
        // Bob's observables lie in the x–z plane, so their projectors are
        // real symmetric and transposition is a no-op; the bare scaled
        // projectors already reproduce the table through Tr(E·F).
        OperatorRepresentation::new(2, collect(rep.alice()), collect(rep.bob())).unwrap()
    }

    #[test]
    fn chsh_audit_is_tight() {
        let orep = chsh_operator_representation();
        let report = audit_derivation(&orep, 1e-9).unwrap();
        assert!(report.chain_holds, "{report:?}");
        assert_eq!(report.common_sum_rank, 2);
        for row in &report.f_weights {
            for &w in row {
                assert!((w - 0.5).abs() < 1e-12);
            }
        }
        // ρ_y = I/2: purity exactly 1/2, so the cap is exactly the bound.
        for &p in &report.purity_values {
            assert!((p - 0.5).abs() < 1e-12);
        }
        assert!((report.implied_f1_upper - 2.0).abs() < 1e-9);
        assert!((report.f1_value.value() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn random_representation_passes_the_chain() {
        let orep =
            random_operator_representation(3, Sizes::new(2, 2, 3, 2), 2024).unwrap();
        let report = audit_derivation(&orep, 1e-9).unwrap();
        assert!(report.chain_holds, "{report:?}");
        assert_eq!(report.common_sum_rank, 3);
        for &p in &report.purity_values {
            assert!(p >= 1.0 / 3.0 - 1e-9);
        }
        assert!(report.f1_value.value() <= report.implied_f1_upper + 1e-6);
    }

    #[test]
    fn broken_marginal_condition_shows_up_in_rho() {
        let orep = random_operator_representation(2, Sizes::new(2, 2, 2, 2), 5).unwrap();
        let sizes = orep.sizes();
        // Shift one Bob operator off the common sum by 0.1·I.
        let bump = HermitianMatrix::identity(2).scaled(0.1);
        let f: Vec<Vec<HermitianMatrix>> = (0..sizes.y)
            .map(|y| {
                (0..sizes.b)
                    .map(|b| {
                        if (y, b) == (1, 0) {
                            orep.f(y, b).plus(&bump)
                        } else {
                            orep.f(y, b).clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let e: Vec<Vec<HermitianMatrix>> = (0..sizes.x)
            .map(|x| (0..sizes.a).map(|a| orep.e(x, a).clone()).collect())
            .collect();
        let broken = OperatorRepresentation::new(2, e, f).unwrap();
        let report = audit_derivation(&broken, 1e-9).unwrap();
        assert!(!report.chain_holds);
        // The ρ_y mismatch is √S·(0.1·I)·√S, entrywise on the order of 0.1·S.
        assert!(
            report.rho_y_max_discrepancy > 0.01 && report.rho_y_max_discrepancy < 0.2,
            "discrepancy {}",
            report.rho_y_max_discrepancy
        );
    }

    #[test]
    fn rank_deficient_sum_restricts_to_the_support() {
        let orep = chsh_operator_representation();
        let sizes = orep.sizes();
        // Embed every operator as the top-left block of a 3×3 matrix.
        let pad = |m: &HermitianMatrix| {
            HermitianMatrix::from_fn(3, |i, j| {
                if i < 2 && j < 2 {
                    m.entry(i, j)
                } else {
                    nalgebra::Complex::new(0.0, 0.0)
                }
            })
            .unwrap()
        };
        let e: Vec<Vec<HermitianMatrix>> = (0..sizes.x)
            .map(|x| (0..sizes.a).map(|a| pad(orep.e(x, a))).collect())
            .collect();
        let f: Vec<Vec<HermitianMatrix>> = (0..sizes.y)
            .map(|y| (0..sizes.b).map(|b| pad(orep.f(y, b))).collect())
            .collect();
        let padded = OperatorRepresentation::new(3, e, f).unwrap();
        let report = audit_derivation(&padded, 1e-9).unwrap();
        assert_eq!(report.common_sum_rank, 2);
        assert!(report.chain_holds, "{report:?}");
        assert!((report.implied_f1_upper - 2.0).abs() < 1e-9);
    }
}
