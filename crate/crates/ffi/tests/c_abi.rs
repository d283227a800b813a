use std::ffi::{CStr, CString};
use std::ptr;

use deutsch_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(deutsch_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    deutsch_string_free(p);
    s
}

#[test]
fn run_and_read_final_state() {
    unsafe {
        let mut trace = ptr::null_mut();
        let mut verdict = DeutschVerdict {
            outcome_bit: 9,
            classification: DeutschClass::Neither,
            evaluations_used: 0,
        };
        assert_eq!(deutsch_run(cs("01").as_ptr(), 0, &mut trace, &mut verdict), DeutschStatus::Ok);
        assert_eq!(verdict.outcome_bit, 1);
        assert_eq!(verdict.classification, DeutschClass::Balanced);
        assert_eq!(verdict.evaluations_used, 1);
        assert_eq!(deutsch_trace_oracle_applications(trace), 1);

        let mut state = ptr::null_mut();
        assert_eq!(deutsch_trace_stage(trace, 3, &mut state), DeutschStatus::Ok);
        assert_eq!(deutsch_state_dim(state), 16);
        let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
        assert_eq!(
            deutsch_state_amplitudes(state, re.as_mut_ptr(), im.as_mut_ptr(), 16),
            DeutschStatus::Ok
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((re[6] - h).abs() < 1e-12 && (re[7] + h).abs() < 1e-12);

        let mut p = 0.0;
        assert_eq!(
            deutsch_state_probability(state, cs("A").as_ptr(), cs("1").as_ptr(), &mut p),
            DeutschStatus::Ok
        );
        assert!((p - 1.0).abs() < 1e-12);

        let mut bad = ptr::null_mut();
        assert_eq!(deutsch_trace_stage(trace, 4, &mut bad), DeutschStatus::Domain);
        assert!(bad.is_null());

        assert_eq!(
            deutsch_state_amplitudes(state, re.as_mut_ptr(), im.as_mut_ptr(), 8),
            DeutschStatus::BufferTooSmall
        );

        deutsch_state_free(state);
        deutsch_trace_free(trace);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut trace = ptr::null_mut();
        let mut v = std::mem::zeroed::<DeutschVerdict>();
        assert_eq!(deutsch_run(cs("22").as_ptr(), 0, &mut trace, &mut v), DeutschStatus::Domain);
        assert!(last_error().contains("unknown problem setting"));
        assert_eq!(deutsch_run(ptr::null(), 0, &mut trace, &mut v), DeutschStatus::NullPointer);

        let mut state = ptr::null_mut();
        assert_eq!(
            deutsch_state_basis(cs("B:2,B:1").as_ptr(), cs("000").as_ptr(), &mut state),
            DeutschStatus::Layout
        );
        assert_eq!(
            deutsch_state_basis(cs("B:2").as_ptr(), cs("0x").as_ptr(), &mut state),
            DeutschStatus::Format
        );

        let f = [0u8, 0, 0, 1];
        assert_eq!(deutsch_jozsa(f.as_ptr(), 4, &mut v), DeutschStatus::PromiseViolation);
        assert_eq!(deutsch_classify(f.as_ptr(), 4), DeutschClass::Neither);
        let g = [1u8, 1];
        assert_eq!(deutsch_classify(g.as_ptr(), 2), DeutschClass::Constant);
        assert_eq!(deutsch_jozsa(g.as_ptr(), 2, &mut v), DeutschStatus::Ok);
        assert_eq!(last_error(), "");
    }
}

#[test]
fn measure_apply_and_partial_trace() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            deutsch_state_basis(cs("P:1,Q:1").as_ptr(), cs("00").as_ptr(), &mut s),
            DeutschStatus::Ok
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (re, im) = ([h, h, h, -h], [0.0; 4]);
        let mut plus = ptr::null_mut();
        let target = [0usize];
        assert_eq!(
            deutsch_state_apply(s, re.as_ptr(), im.as_ptr(), 2, target.as_ptr(), 1, &mut plus),
            DeutschStatus::Ok
        );

        let (mut rre, mut rim, mut d) = ([0.0; 4], [0.0; 4], 0usize);
        assert_eq!(
            deutsch_state_partial_trace(plus, cs("P").as_ptr(), rre.as_mut_ptr(), rim.as_mut_ptr(), 4, &mut d),
            DeutschStatus::Ok
        );
        assert_eq!(d, 2);
        assert!(rre.iter().all(|x| (x - 0.5).abs() < 1e-12));

        let mut p = 0.0;
        let mut post = ptr::null_mut();
        assert_eq!(
            deutsch_state_measure(plus, cs("P").as_ptr(), cs("1").as_ptr(), &mut p, &mut post),
            DeutschStatus::Ok
        );
        assert!((p - 0.5).abs() < 1e-12);

        let not_unitary = [1.0, 1.0, 0.0, 1.0];
        let mut junk = ptr::null_mut();
        assert_eq!(
            deutsch_state_apply(s, not_unitary.as_ptr(), im.as_ptr(), 2, target.as_ptr(), 1, &mut junk),
            DeutschStatus::NotUnitary
        );

        let mut json = ptr::null_mut();
        assert_eq!(
            deutsch_state_sample(post, cs("P").as_ptr(), 5, 1, &mut json),
            DeutschStatus::Ok
        );
        assert_eq!(take_string(json), r#"{"1":5}"#);

        for p in [s, plus, post] {
            deutsch_state_free(p);
        }
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let mut trace = ptr::null_mut();
        assert_eq!(deutsch_run_superposed(0, &mut trace), DeutschStatus::Ok);
        let mut state = ptr::null_mut();
        assert_eq!(deutsch_trace_stage(trace, 2, &mut state), DeutschStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(deutsch_state_to_json(state, cs("after_H_f").as_ptr(), &mut json), DeutschStatus::Ok);
        let text = take_string(json);
        assert!(text.contains(r#""stage":"after_H_f""#));

        let mut back = ptr::null_mut();
        assert_eq!(deutsch_state_from_json(cs(&text).as_ptr(), &mut back), DeutschStatus::Ok);
        let (mut a, mut ai, mut b, mut bi) = ([0.0; 16], [0.0; 16], [0.0; 16], [0.0; 16]);
        deutsch_state_amplitudes(state, a.as_mut_ptr(), ai.as_mut_ptr(), 16);
        deutsch_state_amplitudes(back, b.as_mut_ptr(), bi.as_mut_ptr(), 16);
        for i in 0..16 {
            assert!((a[i] - b[i]).abs() < 1e-12 && (ai[i] - bi[i]).abs() < 1e-12);
        }
        deutsch_state_free(back);
        deutsch_state_free(state);
        deutsch_trace_free(trace);
    }
}

#[test]
fn counts_version_and_verify() {
    unsafe {
        let mut q = 0u64;
        assert_eq!(deutsch_classical_query_count(1, &mut q), DeutschStatus::Ok);
        assert_eq!(q, 2);
        assert_eq!(deutsch_classical_query_count(0, &mut q), DeutschStatus::Domain);
        assert_eq!(CStr::from_ptr(deutsch_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));

        let mut failed = usize::MAX;
        let mut json = ptr::null_mut();
        assert_eq!(deutsch_verify(&mut failed, &mut json), DeutschStatus::Ok);
        assert_eq!(failed, 0);
        assert!(take_string(json).contains("eq5_final_state"));
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        deutsch_state_free(ptr::null_mut());
        deutsch_trace_free(ptr::null_mut());
        deutsch_string_free(ptr::null_mut());
        assert_eq!(deutsch_state_dim(ptr::null()), 0);
    }
}
