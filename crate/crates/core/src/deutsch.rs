//! Algorithm drivers for the three-register Deutsch run and Deutsch-Jozsa.
//!
//! Registers: `B` holds the problem setting `b` (which of the four one-bit
//! functions was chosen), `A` the function argument and `V` the value that
//! the black box adds modulo 2. The quantum part is always `H_A`, then the
//! function evaluation `H_f`, then `H_A` again.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{
    argument_bits, classify_function, hadamard, oracle_fixed, oracle_with_setting, FunctionClass,
    FunctionTable, Unitary,
};
use crate::measure::{measure, outcome_distribution, OutcomeDistribution};
use crate::qcore::{bitstring, Amp, BasisLabel, RegisterLayout, StateVector, AMP_TOL};

/// Largest argument width accepted by [`run_deutsch_jozsa`].
pub const MAX_DJ_BITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StageLabel {
    #[serde(rename = "input")]
    Input,
    #[serde(rename = "after_H_A")]
    AfterHadamard,
    #[serde(rename = "after_H_f")]
    AfterEvaluation,
    #[serde(rename = "after_H_A_2")]
    AfterSecondHadamard,
}

impl StageLabel {
    pub const ALL: [StageLabel; 4] = [
        StageLabel::Input,
        StageLabel::AfterHadamard,
        StageLabel::AfterEvaluation,
        StageLabel::AfterSecondHadamard,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageLabel::Input => "input",
            StageLabel::AfterHadamard => "after_H_A",
            StageLabel::AfterEvaluation => "after_H_f",
            StageLabel::AfterSecondHadamard => "after_H_A_2",
        }
    }
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub label: StageLabel,
    pub state: StateVector,
}

/// The four states of one run, in pipeline order.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    stages: Vec<Stage>,
    oracle_applications: usize,
}

impl StageTrace {
    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn state(&self, label: StageLabel) -> &StateVector {
        &self.stages[label as usize].state
    }

    pub fn input(&self) -> &StateVector {
        self.state(StageLabel::Input)
    }

    pub fn final_state(&self) -> &StateVector {
        self.state(StageLabel::AfterSecondHadamard)
    }

    /// Number of times the function-evaluation unitary was applied.
    pub fn oracle_applications(&self) -> usize {
        self.oracle_applications
    }

    /// Re-applies each declared unitary to the previous stage and returns the
    /// largest amplitude deviation from the recorded next stage.
    pub fn transition_error(&self) -> Result<f64> {
        let h = hadamard();
        let hf = oracle_with_setting(&FunctionTable::deutsch())?;
        let a = a_qubit(self.input().layout())?;
        let steps: [(&Unitary, Vec<usize>); 3] = [(&h, vec![a]), (&hf, (0..4).collect()), (&h, vec![a])];
        let mut worst = 0.0f64;
        for (i, (u, targets)) in steps.iter().enumerate() {
            let next = self.stages[i].state.apply_unitary(u, targets)?;
            worst = worst.max(next.max_abs_diff(&self.stages[i + 1].state)?);
        }
        Ok(worst)
    }
}

/// A function-evaluation unitary that counts its applications.
#[derive(Debug, Clone)]
pub struct CountingOracle {
    unitary: Unitary,
    targets: Vec<usize>,
    applications: usize,
}

impl CountingOracle {
    pub fn new(unitary: Unitary, targets: Vec<usize>) -> Self {
        Self {
            unitary,
            targets,
            applications: 0,
        }
    }

    pub fn apply(&mut self, state: &StateVector) -> Result<StateVector> {
        let out = state.apply_unitary(&self.unitary, &self.targets)?;
        self.applications += 1;
        Ok(out)
    }

    pub fn applications(&self) -> usize {
        self.applications
    }
}

/// Outcome of a quantum run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub outcome_bit: u8,
    pub classification: FunctionClass,
    pub evaluations_used: usize,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "outcome={} classification={} evaluations={}",
            self.outcome_bit, self.classification, self.evaluations_used
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeutschRun {
    pub trace: StageTrace,
    pub verdict: Verdict,
}

fn check_initial_a(initial_a: u8) -> Result<()> {
    if initial_a > 1 {
        return Err(Error::Domain(format!("initial A value {initial_a} is not 0 or 1")));
    }
    Ok(())
}

fn a_qubit(layout: &RegisterLayout) -> Result<usize> {
    if *layout != RegisterLayout::deutsch() {
        return Err(Error::Layout(format!("expected layout B[2] A[1] V[1], got {layout}")));
    }
    Ok(layout.qubits("A")?.start)
}

/// Basis state `|b>_B |a0>_A |1>_V` followed by `H` on `V`, which yields
/// `(|0>_V - |1>_V)/sqrt 2` on the value register.
pub fn prepare_input(b: &str, initial_a: u8) -> Result<StateVector> {
    check_initial_a(initial_a)?;
    if FunctionTable::deutsch().values(b).is_none() {
        return Err(Error::Domain(format!("unknown problem setting {b:?}")));
    }
    let layout = RegisterLayout::deutsch();
    let label: BasisLabel = format!("{b}{initial_a}1").parse()?;
    StateVector::basis_state(&layout, &label)?.apply_on(&hadamard(), "V")
}

/// Same as [`prepare_input`] with `B` in the uniform superposition of all
/// four settings.
pub fn prepare_superposed_input(initial_a: u8) -> Result<StateVector> {
    check_initial_a(initial_a)?;
    let layout = RegisterLayout::deutsch();
    let label: BasisLabel = format!("00{initial_a}1").parse()?;
    let h = hadamard();
    StateVector::basis_state(&layout, &label)?
        .apply_unitary(&h, &[0])?
        .apply_unitary(&h, &[1])?
        .apply_on(&h, "V")
}

/// Runs `H_A`, `H_f`, `H_A` on an arbitrary input over the `(B, A, V)` layout.
pub fn deutsch_pipeline(input: &StateVector) -> Result<StageTrace> {
    let a = a_qubit(input.layout())?;
    let h = hadamard();
    let mut oracle = CountingOracle::new(oracle_with_setting(&FunctionTable::deutsch())?, (0..4).collect());

    let after_h = input.apply_unitary(&h, &[a])?;
    let after_f = oracle.apply(&after_h)?;
    let after_h2 = after_f.apply_unitary(&h, &[a])?;
    let stages = [input.clone(), after_h, after_f, after_h2]
        .into_iter()
        .zip(StageLabel::ALL)
        .map(|(state, label)| Stage { label, state })
        .collect();
    Ok(StageTrace {
        stages,
        oracle_applications: oracle.applications(),
    })
}

/// Reads the verdict off the `A` register of a final state. With `A`
/// prepared in `|1>` the readout flips: outcome equal to the initial value
/// means constant.
pub fn verdict_from_final(final_state: &StateVector, initial_a: u8, evaluations: usize) -> Result<Verdict> {
    check_initial_a(initial_a)?;
    let dist = outcome_distribution(final_state, "A")?;
    let outcome = dist
        .certain_outcome()
        .ok_or_else(|| Error::Structure(format!("A outcome is not deterministic: {:?}", dist.probs)))?;
    let outcome_bit = u8::from(outcome == "1");
    let classification = if outcome_bit == initial_a {
        FunctionClass::Constant
    } else {
        FunctionClass::Balanced
    };
    Ok(Verdict {
        outcome_bit,
        classification,
        evaluations_used: evaluations,
    })
}

pub fn run_deutsch(b: &str) -> Result<DeutschRun> {
    run_deutsch_with(b, 0)
}

pub fn run_deutsch_with(b: &str, initial_a: u8) -> Result<DeutschRun> {
    let trace = deutsch_pipeline(&prepare_input(b, initial_a)?)?;
    let verdict = verdict_from_final(trace.final_state(), initial_a, trace.oracle_applications())?;
    Ok(DeutschRun { trace, verdict })
}

pub fn run_deutsch_superposed() -> Result<StageTrace> {
    run_deutsch_superposed_with(0)
}

pub fn run_deutsch_superposed_with(initial_a: u8) -> Result<StageTrace> {
    deutsch_pipeline(&prepare_superposed_input(initial_a)?)
}

/// Pairs each problem setting present in `final_state` with the solution
/// stored in `A` for that setting.
pub fn solution_correlation(final_state: &StateVector) -> Result<BTreeMap<String, FunctionClass>> {
    solution_correlation_with(final_state, 0)
}

pub fn solution_correlation_with(
    final_state: &StateVector,
    initial_a: u8,
) -> Result<BTreeMap<String, FunctionClass>> {
    let settings = outcome_distribution(final_state, "B")?;
    let mut out = BTreeMap::new();
    for b in settings.probs.keys() {
        let branch = measure(final_state, "B", b)?;
        let verdict = verdict_from_final(&branch.post_state, initial_a, 0)
            .map_err(|_| Error::Structure(format!("A is not deterministic in the b={b} block")))?;
        out.insert(b.clone(), verdict.classification);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeutschJozsaRun {
    pub verdict: Verdict,
    /// Distribution of the argument register `X` after the final Hadamards.
    pub argument_outcomes: OutcomeDistribution,
}

/// `H^n` on the argument register, one oracle call, `H^n`, then measure the
/// argument register: all zeros means constant.
pub fn run_deutsch_jozsa(values: &[u8]) -> Result<DeutschJozsaRun> {
    let n = argument_bits(values)?;
    if n > MAX_DJ_BITS {
        return Err(Error::Domain(format!("{n} argument bits exceeds {MAX_DJ_BITS}")));
    }
    if classify_function(values) == FunctionClass::Neither {
        return Err(Error::PromiseViolation(format_values(values)));
    }
    let layout = RegisterLayout::new([("X", n), ("Y", 1)])?;
    let h = hadamard();
    let mut oracle = CountingOracle::new(oracle_fixed(values)?, (0..=n).collect());

    let mut label = vec![false; n + 1];
    label[n] = true;
    let mut state = StateVector::basis_state(&layout, &BasisLabel::new(label))?;
    for q in 0..=n {
        state = state.apply_unitary(&h, &[q])?;
    }
    state = oracle.apply(&state)?;
    for q in 0..n {
        state = state.apply_unitary(&h, &[q])?;
    }

    let argument_outcomes = outcome_distribution(&state, "X")?;
    let zero = bitstring(0, n);
    let p_zero = argument_outcomes.probability(&zero);
    let (outcome_bit, classification) = if (p_zero - 1.0).abs() <= AMP_TOL {
        (0, FunctionClass::Constant)
    } else if p_zero <= AMP_TOL {
        (1, FunctionClass::Balanced)
    } else {
        return Err(Error::Structure(format!("all-zero outcome has probability {p_zero}")));
    };
    Ok(DeutschJozsaRun {
        verdict: Verdict {
            outcome_bit,
            classification,
            evaluations_used: oracle.applications(),
        },
        argument_outcomes,
    })
}

pub fn format_values(values: &[u8]) -> String {
    values.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
}

/// Worst-case number of queries a deterministic classical algorithm needs to
/// tell constant from balanced on `n` argument bits: `2^(n-1) + 1`.
pub fn classical_query_count(n: u32) -> Result<u64> {
    if !(1..=63).contains(&n) {
        return Err(Error::Domain(format!("argument width {n} outside 1..=63")));
    }
    Ok((1u64 << (n - 1)) + 1)
}

/// Quantum counterpart of [`classical_query_count`].
pub fn quantum_query_count(n: u32) -> Result<u64> {
    classical_query_count(n).map(|_| 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoStage {
    pub stage: StageLabel,
    pub diagonal: Vec<f64>,
    pub max_deviation: f64,
    pub diagonal_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffDiagonalDelta {
    pub stage: StageLabel,
    pub row: String,
    pub col: String,
    pub input: Amp,
    pub value: Amp,
    pub delta: f64,
}

/// Reduced state of `B` across a trace, relative to the input stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoBReport {
    /// True when `B` starts in a single basis state.
    pub basis_input: bool,
    pub stages: Vec<RhoStage>,
    pub max_deviation: f64,
    pub max_diagonal_deviation: f64,
    /// Off-diagonal entries (upper triangle) that moved by more than `AMP_TOL`.
    pub off_diagonal_deltas: Vec<OffDiagonalDelta>,
    pub exact_invariance: bool,
    pub diagonal_invariance: bool,
}

impl RhoBReport {
    /// Exact invariance for basis inputs; diagonal invariance otherwise.
    pub fn passes(&self) -> bool {
        if self.basis_input {
            self.exact_invariance
        } else {
            self.diagonal_invariance
        }
    }
}

pub fn rho_b_invariance(trace: &StageTrace) -> Result<RhoBReport> {
    let reference = trace.input().partial_trace("B")?;
    let ref_diag = reference.diagonal();
    let basis_input = ref_diag.iter().any(|p| (p - 1.0).abs() <= AMP_TOL);
    let d = reference.dim();
    let w = reference.register().width();

    let mut stages = Vec::new();
    let mut off_diagonal_deltas = Vec::new();
    for stage in trace.stages() {
        let rho = stage.state.partial_trace("B")?;
        rho.check_invariants()?;
        let diagonal = rho.diagonal();
        let diagonal_deviation = diagonal
            .iter()
            .zip(&ref_diag)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        for r in 0..d {
            for c in r + 1..d {
                let delta = (rho.get(r, c) - reference.get(r, c)).norm();
                if delta > AMP_TOL {
                    off_diagonal_deltas.push(OffDiagonalDelta {
                        stage: stage.label,
                        row: bitstring(r, w),
                        col: bitstring(c, w),
                        input: reference.get(r, c),
                        value: rho.get(r, c),
                        delta,
                    });
                }
            }
        }
        stages.push(RhoStage {
            stage: stage.label,
            max_deviation: rho.max_abs_diff(&reference),
            diagonal,
            diagonal_deviation,
        });
    }
    let max_deviation = stages.iter().map(|s| s.max_deviation).fold(0.0, f64::max);
    let max_diagonal_deviation = stages.iter().map(|s| s.diagonal_deviation).fold(0.0, f64::max);
    Ok(RhoBReport {
        basis_input,
        exact_invariance: max_deviation < AMP_TOL,
        diagonal_invariance: max_diagonal_deviation < AMP_TOL,
        stages,
        max_deviation,
        max_diagonal_deviation,
        off_diagonal_deltas,
    })
}
