//! C ABI over `deutsch-core`.
//!
//! Objects cross the boundary as opaque handles (`DeutschState`,
//! `DeutschTrace`) that the caller releases with the matching `*_free`
//! function. Every fallible call returns a `DeutschStatus`; on failure the
//! message is available from `deutsch_last_error_message` on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with `deutsch_string_free`.
//!
//! Layouts are written as `"B:2,A:1,V:1"`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use deutsch_core::deutsch::{
    classical_query_count, run_deutsch_jozsa, run_deutsch_superposed_with, run_deutsch_with,
    StageTrace, Verdict,
};
use deutsch_core::dump::StateDump;
use deutsch_core::measure::{measure, outcome_distribution, sample};
use deutsch_core::verify::run_checks;
use deutsch_core::{classify_function, Amp, Error, FunctionClass, RegisterLayout, StateVector, Unitary};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeutschStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Layout = 3,
    DegenerateState = 4,
    NotNormalized = 5,
    NotUnitary = 6,
    Domain = 7,
    IncompleteOracle = 8,
    ImpossibleOutcome = 9,
    PromiseViolation = 10,
    NotBlockDiagonal = 11,
    Structure = 12,
    Format = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeutschClass {
    Constant = 0,
    Balanced = 1,
    Neither = 2,
}

impl From<FunctionClass> for DeutschClass {
    fn from(c: FunctionClass) -> Self {
        match c {
            FunctionClass::Constant => DeutschClass::Constant,
            FunctionClass::Balanced => DeutschClass::Balanced,
            FunctionClass::Neither => DeutschClass::Neither,
        }
    }
}

/// Readout of a quantum run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeutschVerdict {
    pub outcome_bit: u8,
    pub classification: DeutschClass,
    pub evaluations_used: usize,
}

impl From<Verdict> for DeutschVerdict {
    fn from(v: Verdict) -> Self {
        Self {
            outcome_bit: v.outcome_bit,
            classification: v.classification.into(),
            evaluations_used: v.evaluations_used,
        }
    }
}

/// Opaque pure state.
pub struct DeutschState(StateVector);

/// Opaque four-stage trace of one run.
pub struct DeutschTrace(StageTrace);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(DeutschStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Layout(_) | Error::DimensionMismatch { .. } => DeutschStatus::Layout,
            Error::DegenerateState => DeutschStatus::DegenerateState,
            Error::NotNormalized(_) => DeutschStatus::NotNormalized,
            Error::NotUnitary(_) => DeutschStatus::NotUnitary,
            Error::IncompleteOracle(_) => DeutschStatus::IncompleteOracle,
            Error::Domain(_) => DeutschStatus::Domain,
            Error::ImpossibleOutcome { .. } => DeutschStatus::ImpossibleOutcome,
            Error::PromiseViolation(_) => DeutschStatus::PromiseViolation,
            Error::NotBlockDiagonal { .. } => DeutschStatus::NotBlockDiagonal,
            Error::Structure(_) => DeutschStatus::Structure,
            Error::Format(_) => DeutschStatus::Format,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DeutschStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DeutschStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside deutsch-ffi");
            DeutschStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DeutschStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DeutschStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn state_arg<'a>(p: *const DeutschState) -> Result<&'a StateVector, Failure> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("state"))
}

fn parse_layout(text: &str) -> Result<RegisterLayout, Failure> {
    let groups = text
        .split(',')
        .map(|part| {
            let (name, width) = part
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("register {part:?} lacks ':width'")))?;
            let width = width
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Format(format!("bad width in {part:?}")))?;
            Ok((name.trim().to_string(), width))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(RegisterLayout::new(groups)?)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn deutsch_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn deutsch_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn deutsch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Basis state `label` (bits in layout order) on `layout`.
///
/// # Safety
/// `layout` and `label` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_basis(
    layout: *const c_char,
    label: *const c_char,
    out: *mut *mut DeutschState,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let layout = parse_layout(str_arg(layout, "layout")?)?;
        let label = str_arg(label, "label")?.parse().map_err(Failure::from)?;
        *out = boxed(DeutschState(StateVector::basis_state(&layout, &label)?));
        Ok(())
    })
}

/// State from `len` = 2^qubits amplitudes split into real and imaginary arrays.
///
/// # Safety
/// `re` and `im` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_from_amplitudes(
    layout: *const c_char,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut DeutschState,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let layout = parse_layout(str_arg(layout, "layout")?)?;
        let re = slice_arg(re, len, "re")?;
        let im = slice_arg(im, len, "im")?;
        let amps = re.iter().zip(im).map(|(&r, &i)| Amp::new(r, i)).collect();
        *out = boxed(DeutschState(StateVector::from_amplitudes(&layout, amps)?));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_free(state: *mut DeutschState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of amplitudes (2^qubits), or 0 for NULL.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_dim(state: *const DeutschState) -> usize {
    state.as_ref().map_or(0, |s| s.0.amps().len())
}

/// Copies amplitudes into `re` / `im`, each of capacity `len`.
///
/// # Safety
/// `re` and `im` must each have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_amplitudes(
    state: *const DeutschState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> DeutschStatus {
    guard(|| {
        let s = state_arg(state)?;
        let amps = s.amps();
        if len < amps.len() {
            return Err(Failure(
                DeutschStatus::BufferTooSmall,
                format!("need {} slots, got {len}", amps.len()),
            ));
        }
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for (i, a) in amps.iter().enumerate() {
            *re.add(i) = a.re;
            *im.add(i) = a.im;
        }
        Ok(())
    })
}

/// Applies a `dim` x `dim` row-major unitary to `targets` and returns a new state.
///
/// # Safety
/// `re`/`im` must hold `dim*dim` doubles and `targets` `ntargets` entries.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_apply(
    state: *const DeutschState,
    re: *const f64,
    im: *const f64,
    dim: usize,
    targets: *const usize,
    ntargets: usize,
    out: *mut *mut DeutschState,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = state_arg(state)?;
        let n = dim.checked_mul(dim).ok_or_else(|| Failure::from(Error::Domain("dim overflow".into())))?;
        let re = slice_arg(re, n, "re")?;
        let im = slice_arg(im, n, "im")?;
        let targets = slice_arg(targets, ntargets, "targets")?;
        let u = Unitary::new(dim, re.iter().zip(im).map(|(&r, &i)| Amp::new(r, i)).collect())?;
        *out = boxed(DeutschState(s.apply_unitary(&u, targets)?));
        Ok(())
    })
}

/// Born probability of `outcome` on `register`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_probability(
    state: *const DeutschState,
    register: *const c_char,
    outcome: *const c_char,
    out: *mut f64,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = state_arg(state)?;
        let dist = outcome_distribution(s, str_arg(register, "register")?)?;
        *out = dist.probability(str_arg(outcome, "outcome")?);
        Ok(())
    })
}

/// Projects `register` onto `outcome`; writes the probability and the
/// renormalized post-measurement state.
///
/// # Safety
/// String arguments must be NUL-terminated; out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_measure(
    state: *const DeutschState,
    register: *const c_char,
    outcome: *const c_char,
    out_probability: *mut f64,
    out_state: *mut *mut DeutschState,
) -> DeutschStatus {
    guard(|| {
        let out_p = out_arg(out_probability, "out_probability")?;
        let out_s = out_arg(out_state, "out_state")?;
        let s = state_arg(state)?;
        let rec = measure(s, str_arg(register, "register")?, str_arg(outcome, "outcome")?)?;
        *out_p = rec.probability;
        *out_s = boxed(DeutschState(rec.post_state));
        Ok(())
    })
}

/// Seeded sampling; writes a JSON object `{outcome: count}`.
///
/// # Safety
/// `register` must be NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_sample(
    state: *const DeutschState,
    register: *const c_char,
    shots: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let s = state_arg(state)?;
        let counts = sample(s, str_arg(register, "register")?, shots, seed)?;
        *out = into_c_string(serde_json::to_string(&counts).expect("counts serialize"));
        Ok(())
    })
}

/// Reduced density matrix of `register`, row-major into `re`/`im` of capacity `len`.
/// Writes the matrix dimension to `out_dim`.
///
/// # Safety
/// `re` and `im` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_partial_trace(
    state: *const DeutschState,
    register: *const c_char,
    re: *mut f64,
    im: *mut f64,
    len: usize,
    out_dim: *mut usize,
) -> DeutschStatus {
    guard(|| {
        let out_dim = out_arg(out_dim, "out_dim")?;
        let s = state_arg(state)?;
        let rho = s.partial_trace(str_arg(register, "register")?)?;
        let d = rho.dim();
        *out_dim = d;
        if len < d * d {
            return Err(Failure(
                DeutschStatus::BufferTooSmall,
                format!("need {} slots, got {len}", d * d),
            ));
        }
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for r in 0..d {
            for c in 0..d {
                let v = rho.get(r, c);
                *re.add(r * d + c) = v.re;
                *im.add(r * d + c) = v.im;
            }
        }
        Ok(())
    })
}

/// State dump JSON (nonzero amplitudes, 15 significant digits).
///
/// # Safety
/// `stage` must be NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_to_json(
    state: *const DeutschState,
    stage: *const c_char,
    out_json: *mut *mut c_char,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let s = state_arg(state)?;
        let dump = StateDump::from_state(s, str_arg(stage, "stage")?, BTreeMap::new());
        *out = into_c_string(dump.to_json());
        Ok(())
    })
}

/// Rebuilds a state from a dump.
///
/// # Safety
/// `json` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_state_from_json(
    json: *const c_char,
    out: *mut *mut DeutschState,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dump = StateDump::from_json(str_arg(json, "json")?)?;
        *out = boxed(DeutschState(dump.to_state()?));
        Ok(())
    })
}

/// Runs the algorithm for `setting` ("00".."11") with the argument register
/// prepared in `initial_a`.
///
/// # Safety
/// `setting` must be NUL-terminated; out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_run(
    setting: *const c_char,
    initial_a: u8,
    out_trace: *mut *mut DeutschTrace,
    out_verdict: *mut DeutschVerdict,
) -> DeutschStatus {
    guard(|| {
        let out_t = out_arg(out_trace, "out_trace")?;
        let out_v = out_arg(out_verdict, "out_verdict")?;
        let run = run_deutsch_with(str_arg(setting, "setting")?, initial_a)?;
        *out_v = run.verdict.into();
        *out_t = boxed(DeutschTrace(run.trace));
        Ok(())
    })
}

/// Runs the algorithm with the setting register in uniform superposition.
///
/// # Safety
/// `out_trace` must be writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_run_superposed(
    initial_a: u8,
    out_trace: *mut *mut DeutschTrace,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out_trace, "out_trace")?;
        *out = boxed(DeutschTrace(run_deutsch_superposed_with(initial_a)?));
        Ok(())
    })
}

/// Copy of stage `index` (0 input, 1 after H_A, 2 after H_f, 3 after the second H_A).
///
/// # Safety
/// `trace` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_trace_stage(
    trace: *const DeutschTrace,
    index: usize,
    out: *mut *mut DeutschState,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let stage = t.0.stages().get(index).ok_or_else(|| {
            Failure::from(Error::Domain(format!("stage index {index} outside 0..4")))
        })?;
        *out = boxed(DeutschState(stage.state.clone()));
        Ok(())
    })
}

/// Oracle applications recorded by the run, or 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn deutsch_trace_oracle_applications(trace: *const DeutschTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.oracle_applications())
}

/// # Safety
/// `trace` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn deutsch_trace_free(trace: *mut DeutschTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Constant / balanced / neither for `len` values in {0, 1}.
///
/// # Safety
/// `values` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn deutsch_classify(values: *const u8, len: usize) -> DeutschClass {
    match slice_arg(values, len, "values") {
        Ok(v) => classify_function(v).into(),
        Err(_) => DeutschClass::Neither,
    }
}

/// Deutsch-Jozsa on the truth table `values` (length 2^n, n <= 8).
///
/// # Safety
/// `values` must point to `len` bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_jozsa(
    values: *const u8,
    len: usize,
    out: *mut DeutschVerdict,
) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let run = run_deutsch_jozsa(slice_arg(values, len, "values")?)?;
        *out = run.verdict.into();
        Ok(())
    })
}

/// Worst-case classical query count for `n` argument bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_classical_query_count(n: u32, out: *mut u64) -> DeutschStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = classical_query_count(n)?;
        Ok(())
    })
}

/// Runs every self-check. Writes the failure count and, when `out_json` is
/// not NULL, the per-check report.
///
/// # Safety
/// `out_failed` must be writable; `out_json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn deutsch_verify(
    out_failed: *mut usize,
    out_json: *mut *mut c_char,
) -> DeutschStatus {
    guard(|| {
        let failed = out_arg(out_failed, "out_failed")?;
        let results = run_checks();
        *failed = results.iter().filter(|r| !r.passed).count();
        if let Some(out) = out_json.as_mut() {
            *out = into_c_string(serde_json::to_string(&results).expect("report serializes"));
        }
        Ok(())
    })
}
