//! Quantum representations of correlations and their verification.

use serde::{Deserialize, Serialize};

use super::linalg::{C64, HermitianMatrix, MatrixJson};
use super::state::QuantumState;
use super::QuantumError;
use crate::corr::{Correlation, Sizes};
use crate::tol::DEFAULT_TOL;

/// One POVM per input: for each input, a family of PSD matrices summing to
/// the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmFamily {
    dim: usize,
    families: Vec<Vec<HermitianMatrix>>,
}

impl PovmFamily {
    /// Validates shapes, positivity, and completeness (Σ over outcomes = I
    /// within the default tolerance, entrywise).
    pub fn new(families: Vec<Vec<HermitianMatrix>>) -> Result<Self, QuantumError> {
        let outcomes = families.first().map(|f| f.len()).unwrap_or(0);
        if outcomes == 0 {
            return Err(QuantumError::BadShape(
                "a POVM family needs at least one input and one outcome".into(),
            ));
        }
        let dim = families[0][0].dim();
        for family in &families {
            if family.len() != outcomes {
                return Err(QuantumError::BadShape(format!(
                    "inputs disagree on outcome count: {} vs {}",
                    family.len(),
                    outcomes
                )));
            }
            let mut sum = HermitianMatrix::zeros(dim);
            for element in family {
                if element.dim() != dim {
                    return Err(QuantumError::DimMismatch {
                        left: element.dim(),
                        right: dim,
                    });
                }
                let check = element.psd_check(DEFAULT_TOL);
                if !check.ok {
                    return Err(QuantumError::NotPsd {
                        min_eigenvalue: check.min_eigenvalue,
                    });
                }
                sum = sum.plus(element);
            }
            let max_err = sum.max_abs_diff(&HermitianMatrix::identity(dim));
            if max_err > DEFAULT_TOL {
                return Err(QuantumError::IncompletePovm { max_err });
            }
        }
        Ok(PovmFamily { dim, families })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inputs(&self) -> usize {
        self.families.len()
    }

    pub fn outcomes(&self) -> usize {
        self.families[0].len()
    }

    pub fn element(&self, input: usize, outcome: usize) -> &HermitianMatrix {
        &self.families[input][outcome]
    }
}

/// The physical picture: a bipartite state on a d²-dimensional space and one
/// local POVM family per party, each acting on d dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRepresentation {
    d: usize,
    state: QuantumState,
    alice: PovmFamily,
    bob: PovmFamily,
}

#[derive(Serialize, Deserialize)]
struct PairRepresentationJson {
    d: usize,
    state: MatrixJson,
    alice: Vec<Vec<MatrixJson>>,
    bob: Vec<Vec<MatrixJson>>,
}

impl PairRepresentation {
    pub fn new(
        d: usize,
        state: QuantumState,
        alice: PovmFamily,
        bob: PovmFamily,
    ) -> Result<Self, QuantumError> {
        if d == 0 {
            return Err(QuantumError::BadShape("local dimension must be ≥ 1".into()));
        }
        if state.dim() != d * d {
            return Err(QuantumError::DimMismatch {
                left: state.dim(),
                right: d * d,
            });
        }
        for (party, povm) in [("alice", &alice), ("bob", &bob)] {
            if povm.dim() != d {
                return Err(QuantumError::BadShape(format!(
                    "{party} POVM dimension {} does not match local dimension {d}",
                    povm.dim()
                )));
            }
        }
        Ok(PairRepresentation {
            d,
            state,
            alice,
            bob,
        })
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn alice(&self) -> &PovmFamily {
        &self.alice
    }

    pub fn bob(&self) -> &PovmFamily {
        &self.bob
    }

    pub fn to_json(&self) -> String {
        let raw = PairRepresentationJson {
            d: self.d,
            state: self.state.matrix().to_json_rows(),
            alice: self
                .alice
                .families
                .iter()
                .map(|f| f.iter().map(HermitianMatrix::to_json_rows).collect())
                .collect(),
            bob: self
                .bob
                .families
                .iter()
                .map(|f| f.iter().map(HermitianMatrix::to_json_rows).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("representation serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, QuantumError> {
        let raw: PairRepresentationJson = serde_json::from_str(text)?;
        let parse_family = |tables: &[Vec<MatrixJson>]| -> Result<PovmFamily, QuantumError> {
            let families = tables
                .iter()
                .map(|f| f.iter().map(HermitianMatrix::from_json_rows).collect())
                .collect::<Result<Vec<Vec<_>>, _>>()?;
            PovmFamily::new(families)
        };
        PairRepresentation::new(
            raw.d,
            QuantumState::new(HermitianMatrix::from_json_rows(&raw.state)?)?,
            parse_family(&raw.alice)?,
            parse_family(&raw.bob)?,
        )
    }
}

/// Evaluates the measurement statistics p(ab|xy) = Tr((M_xa ⊗ N_yb)·ρ).
/// The output is a valid correlation, nonsignaling up to numerical noise.
pub fn evaluate_pair_representation(
    rep: &PairRepresentation,
) -> Result<Correlation, QuantumError> {
    let sizes = Sizes::new(
        rep.alice.inputs(),
        rep.bob.inputs(),
        rep.alice.outcomes(),
        rep.bob.outcomes(),
    );
    let mut t = Vec::with_capacity(sizes.table_len());
    for x in 0..sizes.x {
        for y in 0..sizes.y {
            for a in 0..sizes.a {
                for b in 0..sizes.b {
                    let joint = rep.alice.element(x, a).kron(rep.bob.element(y, b));
                    t.push(joint.trace_product(rep.state.matrix()));
                }
            }
        }
    }
    Ok(Correlation::new(sizes, t)?)
}

/// The algebraic picture: PSD families {E_xa}, {F_yb} whose per-input sums
/// all coincide, with p(ab|xy) = Tr(E_xa·F_yb).
///
/// The constructor checks shapes only; whether the numeric conditions
/// actually hold is the business of [`verify_operator_representation`] and
/// [`audit_derivation`](super::audit_derivation), which must be able to
/// report on defective inputs rather than refuse to look at them.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorRepresentation {
    d: usize,
    e: Vec<Vec<HermitianMatrix>>,
    f: Vec<Vec<HermitianMatrix>>,
}

#[derive(Serialize, Deserialize)]
struct OperatorRepresentationJson {
    d: usize,
    #[serde(rename = "E")]
    e: Vec<Vec<MatrixJson>>,
    #[serde(rename = "F")]
    f: Vec<Vec<MatrixJson>>,
}

impl OperatorRepresentation {
    pub fn new(
        d: usize,
        e: Vec<Vec<HermitianMatrix>>,
        f: Vec<Vec<HermitianMatrix>>,
    ) -> Result<Self, QuantumError> {
        for (name, table) in [("E", &e), ("F", &f)] {
            let outcomes = table.first().map(|row| row.len()).unwrap_or(0);
            if outcomes == 0 {
                return Err(QuantumError::BadShape(format!(
                    "{name} table needs at least one input and one outcome"
                )));
            }
            for row in table {
                if row.len() != outcomes {
                    return Err(QuantumError::BadShape(format!(
                        "{name} table is ragged: {} vs {} outcomes",
                        row.len(),
                        outcomes
                    )));
                }
                for m in row {
                    if m.dim() != d {
                        return Err(QuantumError::DimMismatch {
                            left: m.dim(),
                            right: d,
                        });
                    }
                }
            }
        }
        Ok(OperatorRepresentation { d, e, f })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Scenario sizes (nx, ny, na, nb) implied by the tables.
    pub fn sizes(&self) -> Sizes {
        Sizes::new(self.e.len(), self.f.len(), self.e[0].len(), self.f[0].len())
    }

    pub fn e(&self, x: usize, a: usize) -> &HermitianMatrix {
        &self.e[x][a]
    }

    pub fn f(&self, y: usize, b: usize) -> &HermitianMatrix {
        &self.f[y][b]
    }

    /// Σ_a E_xa for one input.
    pub fn e_sum(&self, x: usize) -> HermitianMatrix {
        self.e[x]
            .iter()
            .fold(HermitianMatrix::zeros(self.d), |acc, m| acc.plus(m))
    }

    /// Σ_b F_yb for one input.
    pub fn f_sum(&self, y: usize) -> HermitianMatrix {
        self.f[y]
            .iter()
            .fold(HermitianMatrix::zeros(self.d), |acc, m| acc.plus(m))
    }

    pub fn to_json(&self) -> String {
        let raw = OperatorRepresentationJson {
            d: self.d,
            e: self
                .e
                .iter()
                .map(|row| row.iter().map(HermitianMatrix::to_json_rows).collect())
                .collect(),
            f: self
                .f
                .iter()
                .map(|row| row.iter().map(HermitianMatrix::to_json_rows).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("representation serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, QuantumError> {
        let raw: OperatorRepresentationJson = serde_json::from_str(text)?;
        let parse_table = |table: &[Vec<MatrixJson>]| {
            table
                .iter()
                .map(|row| row.iter().map(HermitianMatrix::from_json_rows).collect())
                .collect::<Result<Vec<Vec<_>>, QuantumError>>()
        };
        OperatorRepresentation::new(raw.d, parse_table(&raw.e)?, parse_table(&raw.f)?)
    }
}

/// What [`verify_operator_representation`] found.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Worst |Tr(E_xa·F_yb) − p(ab|xy)|.
    pub condition1_max_err: f64,
    /// Worst entrywise deviation of any per-input sum from the common sum.
    pub condition3_max_err: f64,
    /// All E and F matrices passed the PSD check.
    pub psd_ok: bool,
    /// All three checks passed at the requested tolerance.
    pub verdict: bool,
}

/// Checks the two defining conditions of an operator representation against
/// a target correlation: the trace condition Tr(E_xa·F_yb) = p(ab|xy), the
/// common-sum condition (all Σ_a E_xa and Σ_b F_yb coincide), and
/// positivity of every operator.
pub fn verify_operator_representation(
    orep: &OperatorRepresentation,
    p: &Correlation,
    tol: f64,
) -> Result<VerificationReport, QuantumError> {
    let sizes = orep.sizes();
    if sizes != p.sizes() {
        return Err(QuantumError::BadShape(format!(
            "representation implies sizes {:?} but the correlation has {:?}",
            sizes,
            p.sizes()
        )));
    }
    let mut condition1_max_err = 0.0f64;
    for x in 0..sizes.x {
        for y in 0..sizes.y {
            for a in 0..sizes.a {
                for b in 0..sizes.b {
                    let tr = orep.e(x, a).trace_product(orep.f(y, b));
                    let err = (tr - p.probability(x, y, a, b)?).abs();
                    condition1_max_err = condition1_max_err.max(err);
                }
            }
        }
    }
    let reference = orep.e_sum(0);
    let mut condition3_max_err = 0.0f64;
    for x in 1..sizes.x {
        condition3_max_err = condition3_max_err.max(orep.e_sum(x).max_abs_diff(&reference));
    }
    for y in 0..sizes.y {
        condition3_max_err = condition3_max_err.max(orep.f_sum(y).max_abs_diff(&reference));
    }
    let psd_ok = (0..sizes.x)
        .flat_map(|x| (0..sizes.a).map(move |a| (x, a)))
        .all(|(x, a)| orep.e(x, a).psd_check(tol).ok)
        && (0..sizes.y)
            .flat_map(|y| (0..sizes.b).map(move |b| (y, b)))
            .all(|(y, b)| orep.f(y, b).psd_check(tol).ok);
    Ok(VerificationReport {
        condition1_max_err,
        condition3_max_err,
        psd_ok,
        verdict: condition1_max_err <= tol && condition3_max_err <= tol && psd_ok,
    })
}

/// The correlation table Tr(E_xa·F_yb) of an operator representation,
/// validated (fails if the common-sum condition is broken badly enough that
/// blocks no longer normalize).
pub fn induced_correlation(orep: &OperatorRepresentation) -> Result<Correlation, QuantumError> {
    let sizes = orep.sizes();
    let mut t = Vec::with_capacity(sizes.table_len());
    for x in 0..sizes.x {
        for y in 0..sizes.y {
            for a in 0..sizes.a {
                for b in 0..sizes.b {
                    t.push(orep.e(x, a).trace_product(orep.f(y, b)));
                }
            }
        }
    }
    Ok(Correlation::new(sizes, t)?)
}

fn projector_pair(direction: &HermitianMatrix) -> Vec<HermitianMatrix> {
    // Eigenprojectors (I ± O)/2 of a qubit observable O with O² = I;
    // outcome 0 is the +1 eigenspace.
    let id = HermitianMatrix::identity(2);
    vec![
        id.plus(direction).scaled(0.5),
        id.minus(direction).scaled(0.5),
    ]
}

/// The textbook two-qubit construction achieving the CHSH-optimal table:
/// the maximally entangled state (|00⟩+|11⟩)/√2, Alice measuring Z or X,
/// Bob measuring (Z±X)/√2.
pub fn chsh_pair_representation() -> PairRepresentation {
    let z = HermitianMatrix::from_real(2, |i, j| {
        if i != j {
            0.0
        } else if i == 0 {
            1.0
        } else {
            -1.0
        }
    })
    .expect("Pauli Z is Hermitian");
    let x = HermitianMatrix::from_real(2, |i, j| if i != j { 1.0 } else { 0.0 })
        .expect("Pauli X is Hermitian");
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let alice = PovmFamily::new(vec![projector_pair(&z), projector_pair(&x)])
        .expect("projective measurements are complete");
    let bob = PovmFamily::new(vec![
        projector_pair(&z.plus(&x).scaled(inv_sqrt2)),
        projector_pair(&z.minus(&x).scaled(inv_sqrt2)),
    ])
    .expect("projective measurements are complete");
    let amp = C64::new(inv_sqrt2, 0.0);
    let zero = C64::new(0.0, 0.0);
    let state = QuantumState::pure(&[amp, zero, zero, amp]).expect("normalized Bell state");
    PairRepresentation::new(2, state, alice, bob).expect("shapes agree by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::chsh_optimal;
    use crate::tol::DEFAULT_TOL;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn scalar(v: f64) -> HermitianMatrix {
        HermitianMatrix::from_real(1, |_, _| v).unwrap()
    }

    #[test]
    fn povm_rejects_incomplete_family() {
        let half = HermitianMatrix::identity(2).scaled(0.4);
        let err = PovmFamily::new(vec![vec![half.clone(), half]]);
        assert!(matches!(err, Err(QuantumError::IncompletePovm { .. })));
    }

    #[test]
    fn povm_rejects_indefinite_element() {
        let id = HermitianMatrix::identity(2);
        let over = id.scaled(1.5);
        let under = id.scaled(-0.5);
        let err = PovmFamily::new(vec![vec![over, under]]);
        assert!(matches!(err, Err(QuantumError::NotPsd { .. })));
    }

    #[test]
    fn chsh_representation_reproduces_the_table() {
        let rep = chsh_pair_representation();
        let p = evaluate_pair_representation(&rep).unwrap();
        let target = chsh_optimal();
        for (got, want) in p.probs().iter().zip(target.probs()) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(p.check_nonsignaling(DEFAULT_TOL).is_nonsignaling);
    }

    #[test]
    fn product_state_with_basis_measurements_is_deterministic() {
        let proj = |k: usize| {
            HermitianMatrix::from_real(2, |i, j| if i == j && i == k { 1.0 } else { 0.0 }).unwrap()
        };
        let povm = PovmFamily::new(vec![vec![proj(0), proj(1)]]).unwrap();
        let state = QuantumState::basis_state(4, 0).unwrap();
        let rep = PairRepresentation::new(2, state, povm.clone(), povm).unwrap();
        let p = evaluate_pair_representation(&rep).unwrap();
        assert!((p.probability(0, 0, 0, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.probability(0, 0, 1, 1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mixed_state_with_uniform_povms_is_uniform() {
        let third = HermitianMatrix::identity(2).scaled(1.0 / 3.0);
        let povm = PovmFamily::new(vec![vec![third.clone(), third.clone(), third]]).unwrap();
        let state = QuantumState::maximally_mixed(4).unwrap();
        let rep = PairRepresentation::new(2, state, povm.clone(), povm).unwrap();
        let p = evaluate_pair_representation(&rep).unwrap();
        for &v in p.probs() {
            assert!((v - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_representation_json_round_trips() {
        let rep = chsh_pair_representation();
        let back = PairRepresentation::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn scalar_orep_induces_product_distribution() {
        let orep = OperatorRepresentation::new(
            1,
            vec![vec![scalar(0.3), scalar(0.7)]],
            vec![vec![scalar(0.4), scalar(0.6)]],
        )
        .unwrap();
        let p = induced_correlation(&orep).unwrap();
        assert!((p.probability(0, 0, 0, 0).unwrap() - 0.12).abs() < 1e-15);
        assert!((p.probability(0, 0, 1, 1).unwrap() - 0.42).abs() < 1e-15);
        let report = verify_operator_representation(&orep, &p, DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        assert_eq!(report.condition1_max_err, 0.0);
    }

    #[test]
    fn verify_flags_perturbed_correlation() {
        let orep = OperatorRepresentation::new(
            1,
            vec![vec![scalar(0.3), scalar(0.7)]],
            vec![vec![scalar(0.4), scalar(0.6)]],
        )
        .unwrap();
        let shifted = Correlation::new(
            Sizes::new(1, 1, 2, 2),
            vec![0.12 + 1e-3, 0.18 - 1e-3, 0.28, 0.42],
        )
        .unwrap();
        let report = verify_operator_representation(&orep, &shifted, DEFAULT_TOL).unwrap();
        assert!(!report.verdict);
        assert!((report.condition1_max_err - 1e-3).abs() < 1e-12);
        assert!(report.psd_ok);
    }

    #[test]
    fn verify_flags_indefinite_element() {
        // Diagonal families whose sums are both I/√2, so the summation and
        // marginal conditions hold exactly and the induced table is a valid
        // correlation — yet one element has a negative eigenvalue.
        let diag = |p: f64, q: f64| {
            HermitianMatrix::from_real(2, |i, j| {
                if i != j {
                    0.0
                } else if i == 0 {
                    p * FRAC_1_SQRT_2
                } else {
                    q * FRAC_1_SQRT_2
                }
            })
            .unwrap()
        };
        let orep = OperatorRepresentation::new(
            2,
            vec![vec![diag(0.7, -0.1), diag(0.3, 1.1)]],
            vec![vec![diag(0.4, 0.5), diag(0.6, 0.5)]],
        )
        .unwrap();
        let p = induced_correlation(&orep).unwrap();
        assert!((p.probability(0, 0, 0, 0).unwrap() - 0.115).abs() < 1e-12);
        let report = verify_operator_representation(&orep, &p, DEFAULT_TOL).unwrap();
        assert!(!report.psd_ok && !report.verdict);
        assert!(report.condition1_max_err < 1e-15);
        assert!(report.condition3_max_err < 1e-15);
    }

    #[test]
    fn verify_rejects_shape_mismatch() {
        let orep = OperatorRepresentation::new(
            1,
            vec![vec![scalar(0.3), scalar(0.7)]],
            vec![vec![scalar(0.4), scalar(0.6)]],
        )
        .unwrap();
        let err = verify_operator_representation(&orep, &chsh_optimal(), DEFAULT_TOL);
        assert!(matches!(err, Err(QuantumError::BadShape(_))));
    }

    #[test]
    fn orep_json_round_trips() {
        let orep = OperatorRepresentation::new(
            1,
            vec![vec![scalar(0.3), scalar(0.7)]],
            vec![vec![scalar(0.4), scalar(0.6)]],
        )
        .unwrap();
        let text = orep.to_json();
        assert!(text.contains("\"E\"") && text.contains("\"F\""));
        let back = OperatorRepresentation::from_json(&text).unwrap();
        assert_eq!(back, orep);
    }
}
