//! Stage states written out as factored kets, built without running the
//! simulator pipeline. Used as golden values by `verify` and the tests.

use std::f64::consts::SQRT_2;

use crate::deutsch::StageLabel;
use crate::error::{Error, Result};
use crate::qcore::{Amp, RegisterLayout, StateVector};

/// Weighted basis kets of one register, e.g. `[(1.0, "0"), (-1.0, "1")]`.
type Factor = &'static [(f64, &'static str)];

/// `coefficient * (B factor) (A factor) (V factor)`.
struct Term {
    coefficient: f64,
    b: Factor,
    a: Factor,
    v: Factor,
}

const PLUS: Factor = &[(1.0, "0"), (1.0, "1")];
const MINUS: Factor = &[(1.0, "0"), (-1.0, "1")];
const ZERO: Factor = &[(1.0, "0")];
const ONE: Factor = &[(1.0, "1")];
const ALL_B: Factor = &[(1.0, "00"), (1.0, "01"), (1.0, "10"), (1.0, "11")];
const B00_MINUS_B11: Factor = &[(1.0, "00"), (-1.0, "11")];
const B01_MINUS_B10: Factor = &[(1.0, "01"), (-1.0, "10")];
const B01: Factor = &[(1.0, "01")];

fn superposed_terms(stage: StageLabel) -> Vec<Term> {
    let quarter = 0.25;
    let eighth_root = 1.0 / (2.0 * SQRT_2);
    match stage {
        StageLabel::Input => vec![Term { coefficient: eighth_root, b: ALL_B, a: ZERO, v: MINUS }],
        StageLabel::AfterHadamard => vec![Term { coefficient: quarter, b: ALL_B, a: PLUS, v: MINUS }],
        StageLabel::AfterEvaluation => vec![
            Term { coefficient: quarter, b: B00_MINUS_B11, a: PLUS, v: MINUS },
            Term { coefficient: quarter, b: B01_MINUS_B10, a: MINUS, v: MINUS },
        ],
        StageLabel::AfterSecondHadamard => vec![
            Term { coefficient: eighth_root, b: B00_MINUS_B11, a: ZERO, v: MINUS },
            Term { coefficient: eighth_root, b: B01_MINUS_B10, a: ONE, v: MINUS },
        ],
    }
}

fn setting_01_terms(stage: StageLabel) -> Vec<Term> {
    let root_half = 1.0 / SQRT_2;
    match stage {
        StageLabel::Input => vec![Term { coefficient: root_half, b: B01, a: ZERO, v: MINUS }],
        StageLabel::AfterHadamard => vec![Term { coefficient: 0.5, b: B01, a: PLUS, v: MINUS }],
        StageLabel::AfterEvaluation => vec![Term { coefficient: 0.5, b: B01, a: MINUS, v: MINUS }],
        StageLabel::AfterSecondHadamard => vec![Term { coefficient: root_half, b: B01, a: ONE, v: MINUS }],
    }
}

/// Expands the terms into amplitudes, keeping only `B` kets accepted by `keep_b`.
fn expand(terms: &[Term], scale: f64, keep_b: impl Fn(&str) -> bool) -> Result<StateVector> {
    let layout = RegisterLayout::deutsch();
    let mut amps = vec![Amp::new(0.0, 0.0); layout.dim()];
    for t in terms {
        for &(cb, b) in t.b.iter().filter(|(_, b)| keep_b(b)) {
            for &(ca, a) in t.a {
                for &(cv, v) in t.v {
                    let index = usize::from_str_radix(&format!("{b}{a}{v}"), 2)
                        .expect("factor kets are bitstrings");
                    amps[index] += scale * t.coefficient * cb * ca * cv;
                }
            }
        }
    }
    StateVector::from_amplitudes(&layout, amps)
}

/// The stage states of the `b = 01` run.
pub fn setting_01_stage(stage: StageLabel) -> Result<StateVector> {
    expand(&setting_01_terms(stage), 1.0, |_| true)
}

/// The stage states of the run with `B` in the uniform superposition.
pub fn superposed_stage(stage: StageLabel) -> Result<StateVector> {
    expand(&superposed_terms(stage), 1.0, |_| true)
}

/// The superposed stage restricted to one setting `b` and renormalized
/// (each setting carries weight 1/4, so the rescale is exactly 2).
pub fn setting_stage(b: &str, stage: StageLabel) -> Result<StateVector> {
    if !["00", "01", "10", "11"].contains(&b) {
        return Err(Error::Domain(format!("unknown problem setting {b:?}")));
    }
    expand(&superposed_terms(stage), 2.0, |k| k == b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::AMP_TOL;

    #[test]
    fn closed_forms_are_normalized_and_consistent() {
        for stage in StageLabel::ALL {
            superposed_stage(stage).unwrap();
            let literal = setting_01_stage(stage).unwrap();
            let restricted = setting_stage("01", stage).unwrap();
            assert!(literal.max_abs_diff(&restricted).unwrap() < AMP_TOL, "{stage}");
        }
        assert!(setting_stage("2", StageLabel::Input).is_err());
    }

    #[test]
    fn superposed_input_has_eight_equal_terms() {
        let s = superposed_stage(StageLabel::Input).unwrap();
        let nz = s.nonzero();
        assert_eq!(nz.len(), 8);
        for (_, a) in nz {
            assert!((a.norm() - 1.0 / (2.0 * SQRT_2)).abs() < AMP_TOL);
        }
    }
}
