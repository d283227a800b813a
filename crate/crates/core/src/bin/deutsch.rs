use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use deutsch_core::deutsch::{
    format_values, rho_b_invariance, run_deutsch_jozsa, run_deutsch_superposed_with,
    run_deutsch_with, solution_correlation_with, StageTrace, MAX_DJ_BITS,
};
use deutsch_core::dump::{render_state, StateDump};
use deutsch_core::measure::{sample, RNG_ALGORITHM};
use deutsch_core::verify::{promise_functions, run_checks};
use deutsch_core::{Error, FunctionTable, StateVector};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PROMISE: u8 = 3;

#[derive(Parser)]
#[command(name = "deutsch", version, about = "Exact simulation of the Deutsch oracle algorithm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algorithm for one problem setting b (00, 01, 10 or 11).
    Run {
        setting: String,
        /// Print all four stage states.
        #[arg(long)]
        trace: bool,
        /// Emit the verdict and one state dump per stage as JSON.
        #[arg(long)]
        json: bool,
        /// Initial basis value of the argument register.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        initial_a: u8,
    },
    /// Run the algorithm with B in the uniform superposition of all settings.
    Superposed {
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        initial_a: u8,
    },
    /// Run every named self-check; exit 1 if any fails.
    Verify {
        #[arg(long)]
        json: bool,
    },
    /// Sample a register of the final state.
    Sample {
        /// A problem setting, or `superposed`.
        setting: String,
        #[arg(long, default_value = "A")]
        register: String,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Deutsch-Jozsa on functions from a file or on every promise function.
    Dj {
        /// Function table: one `<label>: <v0>,<v1>,...` line per function.
        #[arg(long, conflicts_with = "all")]
        function_file: Option<PathBuf>,
        /// Argument width; required with --all, checked against the file otherwise.
        #[arg(long)]
        n: Option<usize>,
        /// Enumerate all constant and balanced functions (n <= 3).
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PromiseViolation(_) => EXIT_PROMISE,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            setting,
            trace,
            json,
            initial_a,
        } => cmd_run(&setting, trace, json, initial_a),
        Command::Superposed { json, initial_a } => cmd_superposed(json, initial_a),
        Command::Verify { json } => cmd_verify(json),
        Command::Sample {
            setting,
            register,
            shots,
            seed,
            json,
        } => cmd_sample(&setting, &register, shots, seed, json),
        Command::Dj {
            function_file,
            n,
            all,
            json,
        } => cmd_dj(function_file, n, all, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            if f.code == EXIT_USAGE {
                eprintln!("usage: deutsch <run|superposed|verify|sample|dj> --help");
            }
            ExitCode::from(f.code)
        }
    }
}

fn stage_dumps(trace: &StageTrace, extra: &BTreeMap<String, Value>) -> Vec<StateDump> {
    trace
        .stages()
        .iter()
        .map(|s| StateDump::from_state(&s.state, s.label.as_str(), extra.clone()))
        .collect()
}

fn print_trace(trace: &StageTrace) {
    for s in trace.stages() {
        println!("[{}]", s.label);
        print!("{}", render_state(&s.state));
    }
}

fn cmd_run(setting: &str, trace: bool, json: bool, initial_a: u8) -> Result<(), Failure> {
    let run = run_deutsch_with(setting, initial_a)?;
    if json {
        let meta = BTreeMap::from([
            ("setting".to_string(), json!(setting)),
            ("initial_a".to_string(), json!(initial_a)),
        ]);
        let doc = json!({
            "verdict": run.verdict,
            "stages": stage_dumps(&run.trace, &meta),
        });
        println!("{doc}");
        return Ok(());
    }
    if trace {
        print_trace(&run.trace);
    }
    println!("{}", run.verdict);
    Ok(())
}

fn cmd_superposed(json: bool, initial_a: u8) -> Result<(), Failure> {
    let trace = run_deutsch_superposed_with(initial_a)?;
    let correlation = solution_correlation_with(trace.final_state(), initial_a)?;
    let rho = rho_b_invariance(&trace)?;
    if json {
        let meta = BTreeMap::from([
            ("setting".to_string(), json!("superposed")),
            ("initial_a".to_string(), json!(initial_a)),
        ]);
        let doc = json!({
            "stages": stage_dumps(&trace, &meta),
            "solution_correlation": correlation,
            "oracle_applications": trace.oracle_applications(),
            "rho_b": rho,
        });
        println!("{doc}");
        return Ok(());
    }
    print_trace(&trace);
    println!("solution correlation:");
    for (b, class) in &correlation {
        println!("  b={b} -> {class}");
    }
    println!(
        "rho_B diagonal max deviation {:.3e}; full max deviation {:.3e}",
        rho.max_diagonal_deviation, rho.max_deviation
    );
    for d in rho
        .off_diagonal_deltas
        .iter()
        .filter(|d| d.stage == deutsch_core::StageLabel::AfterSecondHadamard)
    {
        println!(
            "  rho_B[{},{}]: {:+.6} -> {:+.6}",
            d.row, d.col, d.input.re, d.value.re
        );
    }
    println!("oracle applications {}", trace.oracle_applications());
    Ok(())
}

fn cmd_verify(json: bool) -> Result<(), Failure> {
    let results = run_checks();
    let failed = results.iter().filter(|r| !r.passed).count();
    if json {
        println!("{}", json!({ "checks": results, "failed": failed }));
    } else {
        for r in &results {
            println!(
                "{} {:<40} max_dev={:.3e}  {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.max_deviation,
                r.detail
            );
        }
        println!("{} checks, {} failed", results.len(), failed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY_FAILED,
            message: String::new(),
        })
    }
}

fn cmd_sample(setting: &str, register: &str, shots: usize, seed: u64, json: bool) -> Result<(), Failure> {
    if shots == 0 {
        return Err(Failure::usage("--shots must be at least 1"));
    }
    let state: StateVector = if setting == "superposed" {
        run_deutsch_superposed_with(0)?.final_state().clone()
    } else {
        run_deutsch_with(setting, 0)?.trace.final_state().clone()
    };
    let counts = sample(&state, register, shots, seed)?;
    if json {
        let doc = json!({
            "setting": setting,
            "register": register,
            "shots": shots,
            "seed": seed,
            "rng": RNG_ALGORITHM,
            "counts": counts,
        });
        println!("{doc}");
    } else {
        println!("# register {register}, {shots} shots, seed {seed}, rng {RNG_ALGORITHM}");
        let width = counts.keys().map(String::len).max().unwrap_or(1).max(7);
        println!("{:<width$}  {:>8}", "outcome", "count");
        for (outcome, count) in &counts {
            println!("{outcome:<width$}  {count:>8}");
        }
    }
    Ok(())
}

fn cmd_dj(file: Option<PathBuf>, n: Option<usize>, all: bool, json: bool) -> Result<(), Failure> {
    let functions: Vec<(String, Vec<u8>)> = if all {
        let n = n.ok_or_else(|| Failure::usage("--all requires --n"))?;
        if !(1..=3).contains(&n) {
            return Err(Failure::usage("--all supports 1 <= n <= 3"));
        }
        promise_functions(n)
            .into_iter()
            .map(|f| (format_values(&f), f))
            .collect()
    } else {
        let path = file.ok_or_else(|| Failure::usage("give --function-file or --all"))?;
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let table: FunctionTable = text.parse()?;
        if let Some(n) = n {
            if n != table.arg_bits() {
                return Err(Failure::usage(format!(
                    "--n {n} does not match the file's {} argument bits",
                    table.arg_bits()
                )));
            }
        }
        if table.arg_bits() > MAX_DJ_BITS {
            return Err(Failure::usage(format!("at most {MAX_DJ_BITS} argument bits")));
        }
        table
            .settings()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    };

    let mut verdicts = Vec::new();
    for (label, values) in &functions {
        match run_deutsch_jozsa(values) {
            Ok(run) => {
                if !json {
                    println!("{label}: {}", run.verdict);
                }
                verdicts.push(json!({
                    "function": label,
                    "values": values,
                    "verdict": run.verdict,
                }));
            }
            Err(Error::PromiseViolation(_)) => {
                return Err(Failure {
                    code: EXIT_PROMISE,
                    message: format!(
                        "promise violated by {label}: {} is neither constant nor balanced",
                        format_values(values)
                    ),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    if json {
        println!("{}", json!({ "verdicts": verdicts }));
    }
    Ok(())
}
