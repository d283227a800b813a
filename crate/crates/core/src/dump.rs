//! JSON state dumps and symbolic amplitude printing.
//!
//! Schema: `{"layout": [["B",2],["A",1],["V",1]], "stage": str,
//! "entries": [{"basis": str, "re": num, "im": num}], "meta": {...}}`.
//! Only nonzero amplitudes are listed, ascending by basis index, with values
//! rounded to 15 significant digits.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::qcore::{Amp, BasisLabel, RegisterLayout, StateVector, AMP_TOL};

/// Allowed deviation of `sum |amp|^2` from 1 when reading a dump.
pub const DUMP_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub basis: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub layout: Vec<(String, usize)>,
    pub stage: String,
    pub entries: Vec<DumpEntry>,
    #[serde(default)]
    pub meta: BTreeMap<String, Value>,
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

impl StateDump {
    pub fn from_state(state: &StateVector, stage: &str, meta: BTreeMap<String, Value>) -> Self {
        let layout = state
            .layout()
            .groups()
            .iter()
            .map(|r| (r.name().to_string(), r.width()))
            .collect();
        let entries = state
            .nonzero()
            .into_iter()
            .map(|(label, a)| DumpEntry {
                basis: label.to_string(),
                re: round15(a.re),
                im: round15(a.im),
            })
            .collect();
        let mut meta = meta;
        meta.entry("tool_version".into())
            .or_insert_with(|| Value::from(crate::VERSION));
        Self {
            layout,
            stage: stage.to_string(),
            entries,
            meta,
        }
    }

    /// Rebuilds the state; omitted entries are zero.
    pub fn to_state(&self) -> Result<StateVector> {
        let layout = RegisterLayout::new(self.layout.iter().map(|(n, w)| (n.clone(), *w)))?;
        let mut amps = vec![Amp::new(0.0, 0.0); layout.dim()];
        let mut last: Option<usize> = None;
        for e in &self.entries {
            let label: BasisLabel = e.basis.parse()?;
            if label.len() != layout.total_qubits() {
                return Err(Error::Format(format!(
                    "basis {} does not match layout width {}",
                    e.basis,
                    layout.total_qubits()
                )));
            }
            let index = label.index();
            if last.is_some_and(|l| l >= index) {
                return Err(Error::Format(format!(
                    "entries not strictly ascending at basis {}",
                    e.basis
                )));
            }
            last = Some(index);
            amps[index] = Amp::new(e.re, e.im);
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > DUMP_NORM_TOL {
            return Err(Error::NotNormalized(norm_sq.sqrt()));
        }
        let norm = norm_sq.sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(&layout, amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("dump serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("bad state dump: {e}")))
    }
}

const SYMBOLS: [(f64, &str); 5] = [
    (1.0, "1"),
    (std::f64::consts::FRAC_1_SQRT_2, "1/√2"),
    (0.5, "1/2"),
    (1.0 / (2.0 * SQRT_2), "1/(2√2)"),
    (0.25, "1/4"),
];

fn symbolic_real(x: f64) -> String {
    if x.abs() <= AMP_TOL {
        return "0".into();
    }
    let sign = if x < 0.0 { "-" } else { "+" };
    match SYMBOLS.iter().find(|(v, _)| (x.abs() - v).abs() <= AMP_TOL) {
        Some((_, s)) => format!("{sign}{s}"),
        None => format!("{x:+.15}"),
    }
}

/// Exact symbolic form when the amplitude is a real multiple the algorithm
/// produces, otherwise the decimal value.
pub fn symbolic(a: Amp) -> String {
    if a.im.abs() <= AMP_TOL {
        symbolic_real(a.re)
    } else if a.re.abs() <= AMP_TOL {
        format!("{}i", symbolic_real(a.im))
    } else {
        format!("{}{}i", symbolic_real(a.re), symbolic_real(a.im))
    }
}

/// One line per nonzero amplitude: `|0110>  +1/√2`.
pub fn render_state(state: &StateVector) -> String {
    let spans: Vec<(usize, usize)> = {
        let mut start = 0;
        state
            .layout()
            .groups()
            .iter()
            .map(|r| {
                let s = (start, start + r.width());
                start += r.width();
                s
            })
            .collect()
    };
    let names: Vec<&str> = state.layout().groups().iter().map(|r| r.name()).collect();
    let mut out = String::new();
    for (label, a) in state.nonzero() {
        let bits = label.to_string();
        let ket: String = spans
            .iter()
            .zip(&names)
            .map(|((s, e), n)| format!("|{}>_{n}", &bits[*s..*e]))
            .collect();
        out.push_str(&format!("  {ket}  {}\n", symbolic(a)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deutsch::{run_deutsch, StageLabel};

    #[test]
    fn symbols() {
        assert_eq!(symbolic(Amp::new(0.5, 0.0)), "+1/2");
        assert_eq!(symbolic(Amp::new(-1.0 / (2.0 * SQRT_2), 0.0)), "-1/(2√2)");
        assert_eq!(symbolic(Amp::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)), "+1/√2");
        assert_eq!(symbolic(Amp::new(0.0, -0.25)), "-1/4i");
        assert_eq!(symbolic(Amp::new(0.3, 0.0)), "+0.300000000000000");
    }

    #[test]
    fn dump_lists_nonzero_entries_in_order() {
        let run = run_deutsch("01").unwrap();
        let s = run.trace.state(StageLabel::AfterEvaluation);
        let dump = StateDump::from_state(s, "after_H_f", BTreeMap::new());
        let got: Vec<(&str, f64)> = dump.entries.iter().map(|e| (e.basis.as_str(), e.re)).collect();
        assert_eq!(
            got,
            vec![("0100", 0.5), ("0101", -0.5), ("0110", -0.5), ("0111", 0.5)]
        );
        let json = dump.to_json();
        assert!(json.starts_with(r#"{"layout":[["B",2],["A",1],["V",1]],"stage":"after_H_f""#));
        let back = StateDump::from_json(&json).unwrap().to_state().unwrap();
        assert!(back.max_abs_diff(s).unwrap() < AMP_TOL);
    }

    #[test]
    fn rejects_bad_dumps() {
        let mk = |entries: Vec<(&str, f64)>| StateDump {
            layout: vec![("Q".into(), 2)],
            stage: "x".into(),
            entries: entries
                .into_iter()
                .map(|(b, re)| DumpEntry { basis: b.into(), re, im: 0.0 })
                .collect(),
            meta: BTreeMap::new(),
        };
        assert!(mk(vec![("01", 1.0)]).to_state().is_ok());
        assert!(mk(vec![("01", 0.5)]).to_state().is_err());
        assert!(mk(vec![("1", 1.0)]).to_state().is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(mk(vec![("10", h), ("01", h)]).to_state().is_err());
        assert!(StateDump::from_json("{").is_err());
    }
}
