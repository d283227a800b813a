//! Named self-checks run by `deutsch verify`.
//!
//! Each check compares simulator output against closed-form golden states
//! or structural invariants and reports its worst deviation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_form;
use crate::deutsch::{
    classical_query_count, deutsch_pipeline, prepare_input, prepare_superposed_input,
    rho_b_invariance, run_deutsch, run_deutsch_jozsa, run_deutsch_superposed, verdict_from_final,
    StageLabel,
};
use crate::error::{Error, Result};
use crate::gates::{
    classify_function, hadamard, hadamard_n, oracle_fixed, oracle_with_setting, random_unitary,
    FunctionClass, FunctionTable, Unitary,
};
use crate::measure::{
    deferred_equivalence, measure, outcome_distribution, random_block_diagonal_circuit, sample,
    CircuitStep,
};
use crate::qcore::{RegisterLayout, StateVector, AMP_TOL, MATRIX_TOL};

pub const SETTINGS: [&str; 4] = ["00", "01", "10", "11"];

/// Every check `run_checks` performs, in order.
pub const CHECK_NAMES: &[&str] = &[
    "eq2_input_state",
    "eq3_after_hadamard",
    "eq4_after_evaluation",
    "eq5_final_state",
    "eq6_superposed_input",
    "eq7_superposed_after_hadamard",
    "eq8_superposed_after_evaluation",
    "eq9_superposed_final_state",
    "stage_closed_forms_all_settings",
    "readout_table",
    "single_evaluation",
    "non_disturbance",
    "reversibility",
    "deferred_equivalence_b00",
    "deferred_equivalence_b01",
    "deferred_equivalence_b10",
    "deferred_equivalence_b11",
    "deferred_equivalence_random_circuits",
    "rho_b_basis_input",
    "rho_b_superposed_diagonal",
    "deutsch_jozsa_exhaustive",
    "sampling_superposed_b",
    "sampling_eigenstates",
    "gate_unitarity",
    "oracle_permutation",
    "norm_preservation",
    "hadamard_involution",
    "global_phase_invariance",
];

/// Number of random circuits in the deferred-measurement property check.
pub const RANDOM_CIRCUITS: usize = 100;
pub const SAMPLE_SHOTS: usize = 40_000;
pub const SAMPLE_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub detail: String,
}

struct Outcome {
    passed: bool,
    deviation: f64,
    detail: String,
}

impl Outcome {
    fn within(deviation: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self {
            passed: deviation < tol,
            deviation,
            detail: detail.into(),
        }
    }

    fn flag(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            deviation: 0.0,
            detail: detail.into(),
        }
    }
}

fn stage_regression(stage: StageLabel, superposed: bool) -> Result<Outcome> {
    let (got, want) = if superposed {
        (
            run_deutsch_superposed()?.state(stage).clone(),
            closed_form::superposed_stage(stage)?,
        )
    } else {
        (
            run_deutsch("01")?.trace.state(stage).clone(),
            closed_form::setting_01_stage(stage)?,
        )
    };
    Ok(Outcome::within(got.max_abs_diff(&want)?, AMP_TOL, format!("stage {stage}")))
}

fn all_settings_closed_forms() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for b in SETTINGS {
        let run = run_deutsch(b)?;
        for stage in StageLabel::ALL {
            let want = closed_form::setting_stage(b, stage)?;
            worst = worst.max(run.trace.state(stage).max_abs_diff(&want)?);
        }
    }
    Ok(Outcome::within(worst, AMP_TOL, "4 settings x 4 stages"))
}

fn readout_table() -> Result<Outcome> {
    let table = FunctionTable::deutsch();
    let mut worst = 0.0f64;
    let mut ok = true;
    for b in SETTINGS {
        let run = run_deutsch(b)?;
        let expected = match classify_function(table.values(b).unwrap()) {
            FunctionClass::Balanced => "1",
            _ => "0",
        };
        let p = outcome_distribution(run.trace.final_state(), "A")?.probability(expected);
        worst = worst.max((p - 1.0).abs());
        ok &= run.verdict.classification == classify_function(table.values(b).unwrap());
    }
    Ok(Outcome {
        passed: ok && worst < AMP_TOL,
        deviation: worst,
        detail: "A=1 for 01,10; A=0 for 00,11".into(),
    })
}

fn single_evaluation() -> Result<Outcome> {
    let mut counts = Vec::new();
    for b in SETTINGS {
        counts.push(run_deutsch(b)?.verdict.evaluations_used);
    }
    counts.push(run_deutsch_superposed()?.oracle_applications());
    let classical = classical_query_count(1)?;
    Ok(Outcome::flag(
        counts.iter().all(|&c| c == 1) && classical == 2,
        format!("quantum calls {counts:?}, classical {classical}"),
    ))
}

fn non_disturbance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for b in SETTINGS {
        let run = run_deutsch(b)?;
        let f = run.trace.final_state();
        let outcome = run.verdict.outcome_bit.to_string();
        let rec = measure(f, "A", &outcome)?;
        worst = worst
            .max(rec.post_state.max_abs_diff(f)?)
            .max((rec.probability - 1.0).abs());
    }
    Ok(Outcome::within(worst, AMP_TOL, "measure A on each final state"))
}

fn reversibility() -> Result<Outcome> {
    let h = hadamard();
    let hf = oracle_with_setting(&FunctionTable::deutsch())?;
    let final_state = closed_form::setting_01_stage(StageLabel::AfterSecondHadamard)?;
    let back = final_state
        .apply_unitary(&h, &[2])?
        .apply_unitary(&hf.adjoint(), &[0, 1, 2, 3])?
        .apply_unitary(&h, &[2])?;
    let input = closed_form::setting_01_stage(StageLabel::Input)?;
    Ok(Outcome::within(back.max_abs_diff(&input)?, AMP_TOL, "inverse pipeline on b=01"))
}

/// `H_A`, `H_f`, `H_A` as circuit steps on the `(B, A, V)` layout.
pub fn deutsch_circuit() -> Result<Vec<CircuitStep>> {
    let h = hadamard();
    Ok(vec![
        CircuitStep::new(h.clone(), vec![2]),
        CircuitStep::new(oracle_with_setting(&FunctionTable::deutsch())?, vec![0, 1, 2, 3]),
        CircuitStep::new(h, vec![2]),
    ])
}

fn deferred_branch(b: &str) -> Result<Outcome> {
    let report = deferred_equivalence(&deutsch_circuit()?, &prepare_superposed_input(0)?, "B")?;
    let branch = report
        .branches
        .iter()
        .find(|br| br.outcome == b)
        .ok_or_else(|| Error::Structure(format!("no branch {b}")))?;
    let fixed = outcome_distribution(run_deutsch(b)?.trace.final_state(), "A")?;
    let bob_a = &branch.bob_marginals["A"];
    let alice_a = &branch.alice_marginals["A"];
    let dev = branch
        .max_joint_deviation
        .max(bob_a.max_abs_diff(&fixed))
        .max(alice_a.max_abs_diff(&fixed));
    Ok(Outcome::within(
        dev,
        AMP_TOL,
        format!("A distribution {:?}", alice_a.probs),
    ))
}

fn deferred_random() -> Result<Outcome> {
    let layout = RegisterLayout::deutsch();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..RANDOM_CIRCUITS {
        let circuit = random_block_diagonal_circuit(&layout, "B", 1 + i % 4, &mut rng)?;
        let initial = StateVector::random(&layout, &mut rng);
        worst = worst.max(deferred_equivalence(&circuit, &initial, "B")?.max_deviation);
    }
    Ok(Outcome::within(worst, AMP_TOL, format!("{RANDOM_CIRCUITS} random circuits")))
}

fn rho_basis() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for b in SETTINGS {
        let report = rho_b_invariance(&run_deutsch(b)?.trace)?;
        ok &= report.basis_input;
        worst = worst.max(report.max_deviation);
    }
    Ok(Outcome {
        passed: ok && worst < AMP_TOL,
        deviation: worst,
        detail: "rho_B constant over all stages".into(),
    })
}

fn rho_superposed() -> Result<Outcome> {
    let report = rho_b_invariance(&run_deutsch_superposed()?)?;
    let moved: Vec<String> = report
        .off_diagonal_deltas
        .iter()
        .filter(|d| d.stage == StageLabel::AfterSecondHadamard)
        .map(|d| format!("({},{}) {:+.3}", d.row, d.col, d.value.re - d.input.re))
        .collect();
    Ok(Outcome::within(
        report.max_diagonal_deviation,
        AMP_TOL,
        format!("diagonal constant; final off-diagonal deltas {}", moved.join(" ")),
    ))
}

/// All constant and balanced functions on `n` argument bits.
pub fn promise_functions(n: usize) -> Vec<Vec<u8>> {
    let size = 1usize << n;
    (0u64..1 << size)
        .map(|mask| (0..size).map(|i| ((mask >> i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|f| classify_function(f) != FunctionClass::Neither)
        .collect()
}

fn dj_exhaustive() -> Result<Outcome> {
    let mut total = 0;
    let mut ok = true;
    for n in 1..=3 {
        for f in promise_functions(n) {
            let run = run_deutsch_jozsa(&f)?;
            ok &= run.verdict.classification == classify_function(&f);
            ok &= run.verdict.evaluations_used == 1;
            total += 1;
        }
    }
    Ok(Outcome::flag(ok && total == 4 + 8 + 72, format!("{total} functions")))
}

fn sampling_superposed() -> Result<Outcome> {
    let state = prepare_superposed_input(0)?;
    let counts = sample(&state, "B", SAMPLE_SHOTS, SAMPLE_SEED)?;
    let mean = SAMPLE_SHOTS as f64 * 0.25;
    let sigma = (SAMPLE_SHOTS as f64 * 0.25 * 0.75).sqrt();
    let worst = SETTINGS
        .iter()
        .map(|b| (*counts.get(*b).unwrap_or(&0) as f64 - mean).abs() / sigma)
        .fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst <= 3.0 && counts.len() == 4,
        deviation: worst,
        detail: format!("counts {counts:?}, worst |z| {worst:.2}"),
    })
}

fn sampling_eigenstates() -> Result<Outcome> {
    let mut ok = true;
    for b in SETTINGS {
        let run = run_deutsch(b)?;
        let counts = sample(run.trace.final_state(), "A", 1000, SAMPLE_SEED)?;
        ok &= counts.len() == 1 && counts.get(&run.verdict.outcome_bit.to_string()) == Some(&1000);
    }
    Ok(Outcome::flag(ok, "1000 shots of A per setting"))
}

fn all_gates() -> Result<Vec<(String, Unitary)>> {
    let mut gates = vec![("H".to_string(), hadamard())];
    for n in 2..=3 {
        gates.push((format!("H^{n}"), hadamard_n(n)));
    }
    gates.push(("H_f".into(), oracle_with_setting(&FunctionTable::deutsch())?));
    for f in promise_functions(1).into_iter().chain(promise_functions(2)) {
        gates.push((format!("U_f{f:?}"), oracle_fixed(&f)?));
    }
    Ok(gates)
}

fn gate_unitarity() -> Result<Outcome> {
    let gates = all_gates()?;
    let worst = gates.iter().map(|(_, u)| u.unitarity_error()).fold(0.0, f64::max);
    Ok(Outcome::within(worst, MATRIX_TOL, format!("{} gates", gates.len())))
}

fn oracle_permutation() -> Result<Outcome> {
    let mut oracles = vec![oracle_with_setting(&FunctionTable::deutsch())?];
    for n in 1..=3 {
        for f in promise_functions(n) {
            oracles.push(oracle_fixed(&f)?);
        }
    }
    let ok = oracles
        .iter()
        .all(|u| u.is_permutation() && u.mul(u) == Unitary::identity(u.dim()));
    Ok(Outcome::flag(ok, format!("{} oracles self-inverse permutations", oracles.len())))
}

fn norm_preservation() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut traces = vec![run_deutsch_superposed()?];
    for b in SETTINGS {
        traces.push(run_deutsch(b)?.trace);
    }
    for t in &traces {
        for s in t.stages() {
            worst = worst.max((s.state.norm() - 1.0).abs());
        }
    }
    let layout = RegisterLayout::deutsch();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let k = 1 + i % 3;
        let u = random_unitary(1 << k, &mut rng);
        let targets: Vec<usize> = (0..k).map(|j| (i + j) % 4).collect();
        let s = StateVector::random(&layout, &mut rng).apply_unitary(&u, &targets)?;
        worst = worst.max((s.norm() - 1.0).abs());
    }
    Ok(Outcome::within(worst, AMP_TOL, "stage states and 200 random applications"))
}

fn hadamard_involution() -> Result<Outcome> {
    let h = hadamard();
    let mut worst = h.mul(&h).max_abs_diff(&Unitary::identity(2));
    for n in 2..=3 {
        let hn = hadamard_n(n);
        worst = worst.max(hn.mul(&hn).max_abs_diff(&Unitary::identity(1 << n)));
    }
    Ok(Outcome::within(worst, AMP_TOL, "H*H = I"))
}

fn global_phase_invariance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for theta in [0.3, 1.0, std::f64::consts::PI, 4.2] {
        for b in SETTINGS {
            let reference = run_deutsch(b)?;
            let trace = deutsch_pipeline(&prepare_input(b, 0)?.with_global_phase(theta))?;
            let verdict = verdict_from_final(trace.final_state(), 0, trace.oracle_applications())?;
            ok &= verdict == reference.verdict;
            for reg in ["B", "A", "V"] {
                let got = outcome_distribution(trace.final_state(), reg)?;
                let want = outcome_distribution(reference.trace.final_state(), reg)?;
                worst = worst.max(got.max_abs_diff(&want));
            }
        }
        let reference = run_deutsch_superposed()?;
        let trace = deutsch_pipeline(&prepare_superposed_input(0)?.with_global_phase(theta))?;
        for reg in ["B", "A", "V"] {
            let got = outcome_distribution(trace.final_state(), reg)?;
            let want = outcome_distribution(reference.final_state(), reg)?;
            worst = worst.max(got.max_abs_diff(&want));
        }
    }
    Ok(Outcome {
        passed: ok && worst < AMP_TOL,
        deviation: worst,
        detail: "4 phases x 5 inputs".into(),
    })
}

fn dispatch(name: &str) -> Result<Outcome> {
    use StageLabel::*;
    match name {
        "eq2_input_state" => stage_regression(Input, false),
        "eq3_after_hadamard" => stage_regression(AfterHadamard, false),
        "eq4_after_evaluation" => stage_regression(AfterEvaluation, false),
        "eq5_final_state" => stage_regression(AfterSecondHadamard, false),
        "eq6_superposed_input" => stage_regression(Input, true),
        "eq7_superposed_after_hadamard" => stage_regression(AfterHadamard, true),
        "eq8_superposed_after_evaluation" => stage_regression(AfterEvaluation, true),
        "eq9_superposed_final_state" => stage_regression(AfterSecondHadamard, true),
        "stage_closed_forms_all_settings" => all_settings_closed_forms(),
        "readout_table" => readout_table(),
        "single_evaluation" => single_evaluation(),
        "non_disturbance" => non_disturbance(),
        "reversibility" => reversibility(),
        "deferred_equivalence_b00" => deferred_branch("00"),
        "deferred_equivalence_b01" => deferred_branch("01"),
        "deferred_equivalence_b10" => deferred_branch("10"),
        "deferred_equivalence_b11" => deferred_branch("11"),
        "deferred_equivalence_random_circuits" => deferred_random(),
        "rho_b_basis_input" => rho_basis(),
        "rho_b_superposed_diagonal" => rho_superposed(),
        "deutsch_jozsa_exhaustive" => dj_exhaustive(),
        "sampling_superposed_b" => sampling_superposed(),
        "sampling_eigenstates" => sampling_eigenstates(),
        "gate_unitarity" => gate_unitarity(),
        "oracle_permutation" => oracle_permutation(),
        "norm_preservation" => norm_preservation(),
        "hadamard_involution" => hadamard_involution(),
        "global_phase_invariance" => global_phase_invariance(),
        other => Err(Error::Domain(format!("unknown check {other}"))),
    }
}

pub fn run_check(name: &'static str) -> CheckResult {
    match dispatch(name) {
        Ok(o) => CheckResult {
            name,
            passed: o.passed,
            max_deviation: o.deviation,
            detail: o.detail,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            max_deviation: f64::INFINITY,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_checks() -> Vec<CheckResult> {
    CHECK_NAMES.iter().map(|&n| run_check(n)).collect()
}
