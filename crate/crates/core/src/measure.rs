//! Projective measurement of register observables.
//!
//! Deterministic conditioning (`measure` on a chosen outcome) and stochastic
//! sampling (`sample`) are separate entry points. `deferred_equivalence`
//! compares projecting a register before a circuit with conditioning on it
//! afterwards.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{random_unitary, Unitary};
use crate::qcore::{bitstring, Amp, BasisLabel, RegisterLayout, StateVector, AMP_TOL};

/// Identifier of the generator behind [`sample`], recorded in CLI output.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9, seed_from_u64)";

/// Probabilities below this are treated as exact zeros (amplitude < 1e-12).
pub const PROB_EPS: f64 = AMP_TOL * AMP_TOL;

/// Born-rule outcome probabilities for one register. Outcomes with
/// probability below [`PROB_EPS`] are omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub register: String,
    pub probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn probability(&self, outcome: &str) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// The outcome carrying probability 1 within `AMP_TOL`, if any.
    pub fn certain_outcome(&self) -> Option<&str> {
        self.probs
            .iter()
            .find(|(_, &p)| (p - 1.0).abs() <= AMP_TOL)
            .map(|(k, _)| k.as_str())
    }

    /// Largest absolute probability difference over the union of outcomes.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub register: String,
    pub outcome: String,
    pub probability: f64,
    pub post_state: StateVector,
}

pub fn outcome_distribution(state: &StateVector, register: &str) -> Result<OutcomeDistribution> {
    let layout = state.layout();
    let qubits = layout.qubits(register)?;
    let width = qubits.len();
    let mut acc = vec![0.0; 1 << width];
    for (i, a) in state.amps().iter().enumerate() {
        acc[layout.extract(i, &qubits)] += a.norm_sqr();
    }
    let probs = acc
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > PROB_EPS)
        .map(|(v, p)| (bitstring(v, width), p))
        .collect();
    Ok(OutcomeDistribution {
        register: register.to_string(),
        probs,
    })
}

/// Projects `register` onto `outcome` and renormalizes.
pub fn measure(state: &StateVector, register: &str, outcome: &str) -> Result<MeasurementRecord> {
    let layout = state.layout();
    let qubits = layout.qubits(register)?;
    let wanted: BasisLabel = outcome.parse()?;
    if wanted.len() != qubits.len() {
        return Err(Error::Layout(format!(
            "outcome {outcome} does not fit register {register} of width {}",
            qubits.len()
        )));
    }
    let value = wanted.index();
    let mut amps: Vec<Amp> = state
        .amps()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if layout.extract(i, &qubits) == value {
                *a
            } else {
                Amp::new(0.0, 0.0)
            }
        })
        .collect();
    let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if probability <= PROB_EPS {
        return Err(Error::ImpossibleOutcome {
            register: register.to_string(),
            outcome: outcome.to_string(),
        });
    }
    let scale = probability.sqrt();
    amps.iter_mut().for_each(|a| *a /= scale);
    Ok(MeasurementRecord {
        register: register.to_string(),
        outcome: outcome.to_string(),
        probability,
        post_state: StateVector::from_amplitudes(layout, amps)?,
    })
}

/// Draws `shots` outcomes of `register` from a ChaCha8 stream seeded with `seed`.
pub fn sample(
    state: &StateVector,
    register: &str,
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<String, usize>> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let dist = outcome_distribution(state, register)?;
    let outcomes: Vec<&String> = dist.probs.keys().collect();
    let weights = WeightedIndex::new(dist.probs.values().copied())
        .map_err(|e| Error::Structure(format!("cannot sample: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(outcomes[weights.sample(&mut rng)].clone()).or_default() += 1;
    }
    Ok(counts)
}

/// One unitary acting on the listed qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitStep {
    pub unitary: Unitary,
    pub targets: Vec<usize>,
}

impl CircuitStep {
    pub fn new(unitary: Unitary, targets: Vec<usize>) -> Self {
        Self { unitary, targets }
    }
}

pub fn run_circuit(circuit: &[CircuitStep], state: &StateVector) -> Result<StateVector> {
    circuit
        .iter()
        .try_fold(state.clone(), |s, step| s.apply_unitary(&step.unitary, &step.targets))
}

/// Bob-view and Alice-view results for one outcome of the deferred register.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchComparison {
    pub outcome: String,
    /// Probability of the outcome before the circuit.
    pub prior_probability: f64,
    /// Probability of the outcome after the circuit, without prior projection.
    pub posterior_probability: f64,
    /// Joint probabilities over full basis labels, projection first.
    pub bob_joint: BTreeMap<String, f64>,
    /// Joint probabilities over full basis labels, conditioning last.
    pub alice_joint: BTreeMap<String, f64>,
    /// Per-register marginals of the projected branch, projection first.
    pub bob_marginals: BTreeMap<String, OutcomeDistribution>,
    pub alice_marginals: BTreeMap<String, OutcomeDistribution>,
    pub max_joint_deviation: f64,
    pub max_state_deviation: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeferredReport {
    pub register: String,
    pub branches: Vec<BranchComparison>,
    pub max_deviation: f64,
    pub agrees: bool,
}

/// Fails with `NotBlockDiagonal` unless every step preserves the basis
/// vectors of `register`.
pub fn check_block_diagonal(
    circuit: &[CircuitStep],
    layout: &RegisterLayout,
    register: &str,
) -> Result<()> {
    let reg_qubits = layout.qubits(register)?;
    for (step_idx, step) in circuit.iter().enumerate() {
        let k = step.targets.len();
        if step.unitary.dim() != 1 << k {
            return Err(Error::DimensionMismatch {
                dim: step.unitary.dim(),
                targets: k,
            });
        }
        // Matrix-index bits of the targets that belong to the register.
        let mask: usize = step
            .targets
            .iter()
            .enumerate()
            .filter(|(_, t)| reg_qubits.contains(t))
            .map(|(i, _)| 1 << (k - 1 - i))
            .sum();
        if mask == 0 {
            continue;
        }
        let d = step.unitary.dim();
        for r in 0..d {
            for c in 0..d {
                if (r ^ c) & mask != 0 && step.unitary.get(r, c).norm() > AMP_TOL {
                    return Err(Error::NotBlockDiagonal {
                        step: step_idx,
                        register: register.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Random circuit whose every step is block-diagonal in the basis of
/// `register`: either a unitary on other qubits only, or a unitary on the
/// register plus other qubits built as one independent block per register
/// value.
pub fn random_block_diagonal_circuit<R: Rng + ?Sized>(
    layout: &RegisterLayout,
    register: &str,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<CircuitStep>> {
    let reg: Vec<usize> = layout.qubits(register)?.collect();
    let others: Vec<usize> = (0..layout.total_qubits()).filter(|q| !reg.contains(q)).collect();
    let mut circuit = Vec::with_capacity(steps);
    for _ in 0..steps {
        let subset: Vec<usize> = others.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if !subset.is_empty() && rng.random_bool(0.3) {
            let u = random_unitary(1 << subset.len(), rng);
            circuit.push(CircuitStep::new(u, subset));
        } else {
            let blocks: Vec<Unitary> = (0..1usize << reg.len())
                .map(|_| random_unitary(1 << subset.len(), rng))
                .collect();
            let targets = reg.iter().chain(&subset).copied().collect();
            circuit.push(CircuitStep::new(Unitary::block_diagonal(&blocks)?, targets));
        }
    }
    Ok(circuit)
}

fn joint(state: &StateVector, weight: f64) -> BTreeMap<String, f64> {
    let n = state.layout().total_qubits();
    state
        .amps()
        .iter()
        .enumerate()
        .map(|(i, a)| (bitstring(i, n), weight * a.norm_sqr()))
        .filter(|(_, p)| *p > PROB_EPS)
        .collect()
}

fn marginals(state: &StateVector) -> Result<BTreeMap<String, OutcomeDistribution>> {
    state
        .layout()
        .groups()
        .iter()
        .map(|r| Ok((r.name().to_string(), outcome_distribution(state, r.name())?)))
        .collect()
}

fn map_deviation(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

/// Compares measuring `register` before `circuit` (Bob's view) with running
/// the circuit on the unprojected state and conditioning afterwards (Alice's
/// view). Every branch with nonzero prior probability is reported.
pub fn deferred_equivalence(
    circuit: &[CircuitStep],
    initial: &StateVector,
    register: &str,
) -> Result<DeferredReport> {
    check_block_diagonal(circuit, initial.layout(), register)?;
    let prior = outcome_distribution(initial, register)?;
    let alice_final = run_circuit(circuit, initial)?;

    let mut branches = Vec::new();
    for (outcome, &p_prior) in &prior.probs {
        let projected = measure(initial, register, outcome)?;
        let bob_final = run_circuit(circuit, &projected.post_state)?;
        let conditioned = measure(&alice_final, register, outcome)?;

        let bob_joint = joint(&bob_final, projected.probability);
        let alice_joint = joint(&conditioned.post_state, conditioned.probability);
        let max_joint_deviation = map_deviation(&bob_joint, &alice_joint);
        let max_state_deviation = bob_final.max_abs_diff(&conditioned.post_state)?;
        branches.push(BranchComparison {
            outcome: outcome.clone(),
            prior_probability: p_prior,
            posterior_probability: conditioned.probability,
            bob_marginals: marginals(&bob_final)?,
            alice_marginals: marginals(&conditioned.post_state)?,
            bob_joint,
            alice_joint,
            max_joint_deviation,
            max_state_deviation,
            agrees: max_joint_deviation <= AMP_TOL,
        });
    }
    let max_deviation = branches
        .iter()
        .map(|b| b.max_joint_deviation)
        .fold(0.0, f64::max);
    Ok(DeferredReport {
        register: register.to_string(),
        agrees: branches.iter().all(|b| b.agrees),
        branches,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::hadamard;

    fn c(re: f64) -> Amp {
        Amp::new(re, 0.0)
    }

    fn plus() -> StateVector {
        let l = RegisterLayout::new([("Q", 1)]).unwrap();
        StateVector::superpose(&l, &[(c(1.0), "0".parse().unwrap()), (c(1.0), "1".parse().unwrap())])
            .unwrap()
    }

    #[test]
    fn symmetric_superposition_measurement() {
        let rec = measure(&plus(), "Q", "0").unwrap();
        assert!((rec.probability - 0.5).abs() < AMP_TOL);
        assert_eq!(rec.post_state.amps(), &[c(1.0), c(0.0)]);
    }

    #[test]
    fn basis_state_distribution_and_samples() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::basis_state(&l, &"0000".parse().unwrap()).unwrap();
        let d = outcome_distribution(&s, "B").unwrap();
        assert_eq!(d.probs.len(), 1);
        assert_eq!(d.probability("00"), 1.0);
        for reg in ["B", "A", "V"] {
            let counts = sample(&s, reg, 7, 99).unwrap();
            assert_eq!(counts.len(), 1);
            assert_eq!(counts.values().sum::<usize>(), 7);
        }
    }

    #[test]
    fn measurement_errors() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::basis_state(&l, &"0000".parse().unwrap()).unwrap();
        assert!(matches!(
            measure(&s, "A", "1"),
            Err(Error::ImpossibleOutcome { .. })
        ));
        assert!(matches!(measure(&s, "B", "1"), Err(Error::Layout(_))));
        assert!(matches!(measure(&s, "Z", "1"), Err(Error::Layout(_))));
        assert!(matches!(outcome_distribution(&s, "Z"), Err(Error::Layout(_))));
        assert!(sample(&s, "A", 0, 1).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = plus();
        assert_eq!(sample(&s, "Q", 500, 11).unwrap(), sample(&s, "Q", 500, 11).unwrap());
        assert_ne!(sample(&s, "Q", 500, 11).unwrap(), sample(&s, "Q", 500, 12).unwrap());
    }

    #[test]
    fn empty_circuit_agrees_trivially() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::superpose(
            &l,
            &[(c(1.0), "0000".parse().unwrap()), (c(1.0), "1101".parse().unwrap())],
        )
        .unwrap();
        let report = deferred_equivalence(&[], &s, "B").unwrap();
        assert!(report.agrees);
        assert_eq!(report.branches.len(), 2);
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn non_block_diagonal_circuit_is_rejected() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::basis_state(&l, &"0000".parse().unwrap()).unwrap();
        let circuit = [CircuitStep::new(hadamard(), vec![1])];
        assert_eq!(
            deferred_equivalence(&circuit, &s, "B"),
            Err(Error::NotBlockDiagonal {
                step: 0,
                register: "B".into()
            })
        );
        // Acting only on A is fine.
        let ok = [CircuitStep::new(hadamard(), vec![2])];
        assert!(deferred_equivalence(&ok, &s, "B").unwrap().agrees);
    }
}
