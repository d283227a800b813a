//! Exact complex linear algebra over labeled multi-qubit registers.
//!
//! Qubits are numbered in layout order: qubit 0 is the most significant bit
//! of the first register, and a basis index is the big-endian value of the
//! bitstring written register by register. For the canonical `(B, A, V)`
//! layout the label `0110` means `|01>_B |1>_A |0>_V` and has index 6.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::Unitary;

/// A single complex amplitude.
pub type Amp = Complex64;

/// Equality tolerance for amplitudes and norms.
pub const AMP_TOL: f64 = 1e-12;
/// Tolerance for unitarity and positive-semidefiniteness checks.
pub const MATRIX_TOL: f64 = 1e-10;

/// Largest state the simulator will allocate (2^MAX_QUBITS amplitudes).
pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    name: String,
    width: usize,
}

impl Register {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

/// Named qubit groups with a fixed ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    groups: Vec<Register>,
}

impl RegisterLayout {
    pub fn new<I, S>(groups: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Register> = Vec::new();
        for (name, width) in groups {
            let name = name.into();
            if name.is_empty() {
                return Err(Error::Layout("register name must not be empty".into()));
            }
            if width == 0 {
                return Err(Error::Layout(format!("register {name} has zero width")));
            }
            if out.iter().any(|r| r.name == name) {
                return Err(Error::Layout(format!("duplicate register name {name}")));
            }
            out.push(Register { name, width });
        }
        let layout = Self { groups: out };
        let total = layout.total_qubits();
        if total == 0 {
            return Err(Error::Layout("layout has no qubits".into()));
        }
        if total > MAX_QUBITS {
            return Err(Error::Layout(format!(
                "{total} qubits exceeds the dense limit of {MAX_QUBITS}"
            )));
        }
        Ok(layout)
    }

    /// The `[(B,2), (A,1), (V,1)]` layout of the three-register algorithm.
    pub fn deutsch() -> Self {
        Self::new([("B", 2), ("A", 1), ("V", 1)]).expect("canonical layout is valid")
    }

    pub fn groups(&self) -> &[Register] {
        &self.groups
    }

    pub fn total_qubits(&self) -> usize {
        self.groups.iter().map(|r| r.width).sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.groups
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Layout(format!("unknown register {name}")))
    }

    /// Qubit indices occupied by `name`, in layout order.
    pub fn qubits(&self, name: &str) -> Result<Range<usize>> {
        let mut start = 0;
        for r in &self.groups {
            if r.name == name {
                return Ok(start..start + r.width);
            }
            start += r.width;
        }
        Err(Error::Layout(format!("unknown register {name}")))
    }

    /// Bit mask selecting qubit `q` inside a basis index.
    pub(crate) fn qubit_mask(&self, q: usize) -> usize {
        1 << (self.total_qubits() - 1 - q)
    }

    /// Value of the bits of register `qubits` inside basis index `index`.
    pub(crate) fn extract(&self, index: usize, qubits: &Range<usize>) -> usize {
        let shift = self.total_qubits() - qubits.end;
        (index >> shift) & ((1 << qubits.len()) - 1)
    }
}

impl fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|r| format!("{}[{}]", r.name, r.width))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A computational basis label, bits in layout order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    bits: Vec<bool>,
}

impl BasisLabel {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_index(index: usize, width: usize) -> Self {
        let bits = (0..width).map(|i| (index >> (width - 1 - i)) & 1 == 1).collect();
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Big-endian integer value of the bits.
    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Format("empty basis label".into()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("invalid bit {other:?} in label {s}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bits })
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Formats `value` as a bitstring of `width` bits.
pub fn bitstring(value: usize, width: usize) -> String {
    BasisLabel::from_index(value, width).to_string()
}

/// A normalized pure state over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Amp>,
}

impl StateVector {
    pub fn basis_state(layout: &RegisterLayout, label: &BasisLabel) -> Result<Self> {
        check_label(layout, label)?;
        let mut amps = vec![Amp::new(0.0, 0.0); layout.dim()];
        amps[label.index()] = Amp::new(1.0, 0.0);
        Ok(Self {
            layout: layout.clone(),
            amps,
        })
    }

    /// Normalized sum of weighted basis terms. Repeated labels accumulate.
    pub fn superpose(layout: &RegisterLayout, terms: &[(Amp, BasisLabel)]) -> Result<Self> {
        let mut amps = vec![Amp::new(0.0, 0.0); layout.dim()];
        for (w, label) in terms {
            check_label(layout, label)?;
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::Domain(format!("non-finite weight on {label}")));
            }
            amps[label.index()] += w;
        }
        let norm = l2_norm(&amps);
        if norm == 0.0 {
            return Err(Error::DegenerateState);
        }
        if norm != 1.0 {
            amps.iter_mut().for_each(|a| *a /= norm);
        }
        Ok(Self {
            layout: layout.clone(),
            amps,
        })
    }

    /// Wraps raw amplitudes, which must already be normalized within `AMP_TOL`.
    pub fn from_amplitudes(layout: &RegisterLayout, amps: Vec<Amp>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::Layout(format!(
                "{} amplitudes for a layout of dimension {}",
                amps.len(),
                layout.dim()
            )));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Domain("non-finite amplitude".into()));
        }
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > AMP_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            layout: layout.clone(),
            amps,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amps(&self) -> &[Amp] {
        &self.amps
    }

    pub fn amp(&self, label: &BasisLabel) -> Result<Amp> {
        check_label(&self.layout, label)?;
        Ok(self.amps[label.index()])
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// Applies `u` to `targets` (first target is the most significant bit of
    /// the matrix index) and identity elsewhere.
    pub fn apply_unitary(&self, u: &Unitary, targets: &[usize]) -> Result<Self> {
        let n = self.layout.total_qubits();
        let k = targets.len();
        if k == 0 || u.dim() != 1 << k {
            return Err(Error::DimensionMismatch {
                dim: u.dim(),
                targets: k,
            });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= n {
                return Err(Error::Layout(format!("target qubit {t} out of range 0..{n}")));
            }
            if targets[..i].contains(&t) {
                return Err(Error::Layout(format!("target qubit {t} repeated")));
            }
        }

        let masks: Vec<usize> = targets.iter().map(|&t| self.layout.qubit_mask(t)).collect();
        let target_mask: usize = masks.iter().sum();
        let sub_dim = 1 << k;
        let spread = |sub: usize| -> usize {
            masks
                .iter()
                .enumerate()
                .filter(|(i, _)| (sub >> (k - 1 - i)) & 1 == 1)
                .map(|(_, m)| m)
                .sum()
        };
        let offsets: Vec<usize> = (0..sub_dim).map(spread).collect();

        let mut out = vec![Amp::new(0.0, 0.0); self.amps.len()];
        let mut local = vec![Amp::new(0.0, 0.0); sub_dim];
        for base in (0..self.amps.len()).filter(|i| i & target_mask == 0) {
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                out[base | off] = (0..sub_dim).map(|col| u.get(row, col) * local[col]).sum();
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            amps: out,
        })
    }

    /// Applies `u` to all qubits of register `name`.
    pub fn apply_on(&self, u: &Unitary, name: &str) -> Result<Self> {
        let targets: Vec<usize> = self.layout.qubits(name)?.collect();
        self.apply_unitary(u, &targets)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Amp> {
        if self.layout != other.layout {
            return Err(Error::Layout("inner product of states on different layouts".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Reduced density matrix of register `keep`, tracing out everything else.
    pub fn partial_trace(&self, keep: &str) -> Result<DensityMatrix> {
        let reg = self.layout.register(keep)?.clone();
        let kept = self.layout.qubits(keep)?;
        let kept_mask: usize = kept.clone().map(|q| self.layout.qubit_mask(q)).sum();
        let d = 1 << reg.width;

        let mut rho = vec![Amp::new(0.0, 0.0); d * d];
        // Pair every index with every other index sharing the traced-out bits.
        for (i, ai) in self.amps.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let rest = i & !kept_mask;
            let r = self.layout.extract(i, &kept);
            for c in 0..d {
                let j = rest | self.insert(c, &kept);
                rho[r * d + c] += ai * self.amps[j].conj();
            }
        }
        Ok(DensityMatrix {
            register: reg,
            dim: d,
            data: rho,
        })
    }

    fn insert(&self, value: usize, qubits: &Range<usize>) -> usize {
        value << (self.layout.total_qubits() - qubits.end)
    }

    /// Random normalized state with uniformly drawn real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(layout: &RegisterLayout, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Amp> = (0..layout.dim())
                .map(|_| Amp::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm = l2_norm(&amps);
            if norm > 1e-6 {
                return Self {
                    layout: layout.clone(),
                    amps: amps.into_iter().map(|a| a / norm).collect(),
                };
            }
        }
    }

    /// Same state multiplied by a global phase `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Amp::from_polar(1.0, theta);
        Self {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// Largest per-amplitude modulus difference. Layouts must match.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::Layout("comparing states on different layouts".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Nonzero amplitudes (modulus above `AMP_TOL`) with their labels, ascending by index.
    pub fn nonzero(&self) -> Vec<(BasisLabel, Amp)> {
        let n = self.layout.total_qubits();
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > AMP_TOL)
            .map(|(i, a)| (BasisLabel::from_index(i, n), *a))
            .collect()
    }
}

fn check_label(layout: &RegisterLayout, label: &BasisLabel) -> Result<()> {
    if label.len() != layout.total_qubits() {
        return Err(Error::Layout(format!(
            "label {label} has {} bits, layout {layout} has {}",
            label.len(),
            layout.total_qubits()
        )));
    }
    Ok(())
}

fn l2_norm(amps: &[Amp]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Reduced state of one register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    register: Register,
    dim: usize,
    data: Vec<Amp>,
}

impl DensityMatrix {
    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amp {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Amp {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order. Hermitian input is assumed.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c));
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Number of eigenvalues above `MATRIX_TOL`.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > MATRIX_TOL).count()
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > AMP_TOL {
            return Err(Error::Structure(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - Amp::new(1.0, 0.0)).norm() > AMP_TOL {
            return Err(Error::Structure(format!("density matrix trace {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -MATRIX_TOL {
            return Err(Error::Structure(format!("density matrix eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "density matrices of different size");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::hadamard;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn label(s: &str) -> BasisLabel {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Amp {
        Amp::new(re, 0.0)
    }

    #[test]
    fn basis_state_sets_single_amplitude() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::basis_state(&l, &label("0100")).unwrap();
        assert_eq!(s.amps()[4], c(1.0));
        assert_eq!(s.amps().iter().filter(|a| a.norm() > 0.0).count(), 1);
        let z = StateVector::basis_state(&l, &label("0000")).unwrap();
        assert_eq!(z.amps()[0], c(1.0));
    }

    #[test]
    fn basis_index_matches_bitstring_conversion() {
        let l = RegisterLayout::deutsch();
        for i in 0..16usize {
            let text = format!("{i:04b}");
            let parsed = u8::from_str_radix(&text, 2).unwrap() as usize;
            let s = StateVector::basis_state(&l, &label(&text)).unwrap();
            let hot: Vec<usize> = (0..16).filter(|&j| s.amps()[j].norm() > 0.0).collect();
            assert_eq!(hot, vec![parsed]);
        }
        assert_eq!(label("0110").index(), 6);
    }

    #[test]
    fn basis_state_rejects_wrong_length() {
        let l = RegisterLayout::deutsch();
        assert!(matches!(
            StateVector::basis_state(&l, &label("010")),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn layout_validation() {
        assert!(RegisterLayout::new([("B", 2), ("B", 1)]).is_err());
        assert!(RegisterLayout::new([("B", 0)]).is_err());
        assert!(RegisterLayout::new(Vec::<(String, usize)>::new()).is_err());
        assert!(RegisterLayout::new([("X", 17)]).is_err());
        let l = RegisterLayout::deutsch();
        assert_eq!(l.total_qubits(), 4);
        assert_eq!(l.qubits("A").unwrap(), 2..3);
        assert!(l.qubits("Q").is_err());
    }

    #[test]
    fn superpose_normalizes() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::superpose(&l, &[(c(1.0), label("0100")), (c(-1.0), label("0101"))])
            .unwrap();
        assert!((s.amps()[4] - c(FRAC_1_SQRT_2)).norm() < AMP_TOL);
        assert!((s.amps()[5] - c(-FRAC_1_SQRT_2)).norm() < AMP_TOL);

        let single = StateVector::superpose(&l, &[(c(1.0), label("0000"))]).unwrap();
        assert_eq!(single, StateVector::basis_state(&l, &label("0000")).unwrap());

        let eq = StateVector::superpose(&l, &[(c(2.0), label("0000")), (c(2.0), label("0001"))])
            .unwrap();
        assert!((eq.amps()[0] - c(FRAC_1_SQRT_2)).norm() < AMP_TOL);
        assert!((eq.amps()[1] - c(FRAC_1_SQRT_2)).norm() < AMP_TOL);
    }

    #[test]
    fn superpose_rejects_zero_weights() {
        let l = RegisterLayout::deutsch();
        assert_eq!(
            StateVector::superpose(&l, &[(c(0.0), label("0000"))]),
            Err(Error::DegenerateState)
        );
        assert_eq!(
            StateVector::superpose(&l, &[(c(1.0), label("0000")), (c(-1.0), label("0000"))]),
            Err(Error::DegenerateState)
        );
    }

    #[test]
    fn hadamard_on_a_gives_after_first_hadamard_stage() {
        let l = RegisterLayout::deutsch();
        let input = StateVector::superpose(&l, &[(c(1.0), label("0100")), (c(-1.0), label("0101"))])
            .unwrap();
        let out = input.apply_on(&hadamard(), "A").unwrap();
        for (lab, want) in [("0100", 0.5), ("0110", 0.5), ("0101", -0.5), ("0111", -0.5)] {
            assert!((out.amp(&label(lab)).unwrap() - c(want)).norm() < AMP_TOL, "{lab}");
        }
        assert!((out.norm() - 1.0).abs() < AMP_TOL);
        // <Eq3|Eq2> = 1/sqrt(2), also by explicit summation
        let ip = out.inner_product(&input).unwrap();
        let direct: Amp = (0..16).map(|i| out.amps()[i].conj() * input.amps()[i]).sum();
        assert!((ip - c(FRAC_1_SQRT_2)).norm() < AMP_TOL);
        assert!((ip - direct).norm() < AMP_TOL);
    }

    #[test]
    fn apply_unitary_errors() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::basis_state(&l, &label("0000")).unwrap();
        let h = hadamard();
        assert!(matches!(s.apply_unitary(&h, &[4]), Err(Error::Layout(_))));
        assert!(matches!(
            s.apply_unitary(&h, &[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
        let h2 = h.kron(&h);
        assert!(matches!(s.apply_unitary(&h2, &[1, 1]), Err(Error::Layout(_))));
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let l = RegisterLayout::deutsch();
        let s = StateVector::basis_state(&l, &label("1011")).unwrap();
        let out = s.apply_unitary(&Unitary::identity(4), &[3, 0]).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn inner_products() {
        let l = RegisterLayout::deutsch();
        let a = StateVector::basis_state(&l, &label("0000")).unwrap();
        let b = StateVector::basis_state(&l, &label("0001")).unwrap();
        assert_eq!(a.inner_product(&a).unwrap(), c(1.0));
        assert_eq!(a.inner_product(&b).unwrap(), c(0.0));
        let other = RegisterLayout::new([("X", 4)]).unwrap();
        let x = StateVector::basis_state(&other, &label("0000")).unwrap();
        assert!(matches!(a.inner_product(&x), Err(Error::Layout(_))));
    }

    #[test]
    fn partial_trace_of_product_state_is_projector() {
        let l = RegisterLayout::deutsch();
        let input = StateVector::superpose(&l, &[(c(1.0), label("0100")), (c(-1.0), label("0101"))])
            .unwrap();
        let rho = input.partial_trace("B").unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == 1 && col == 1 { 1.0 } else { 0.0 };
                assert!((rho.get(r, col) - c(want)).norm() < AMP_TOL);
            }
        }
        assert_eq!(rho.rank(), 1);
        rho.check_invariants().unwrap();
        assert!(matches!(input.partial_trace("Z"), Err(Error::Layout(_))));
    }

    #[test]
    fn partial_trace_of_entangled_pair_is_mixed() {
        let l = RegisterLayout::new([("P", 1), ("Q", 1)]).unwrap();
        let bell = StateVector::superpose(&l, &[(c(1.0), label("00")), (c(1.0), label("11"))])
            .unwrap();
        let rho = bell.partial_trace("P").unwrap();
        assert!((rho.get(0, 0) - c(0.5)).norm() < AMP_TOL);
        assert!(rho.get(0, 1).norm() < AMP_TOL);
        assert_eq!(rho.rank(), 2);
    }

    #[test]
    fn from_amplitudes_requires_normalization() {
        let l = RegisterLayout::new([("P", 1)]).unwrap();
        assert!(matches!(
            StateVector::from_amplitudes(&l, vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(StateVector::from_amplitudes(&l, vec![c(1.0)]).is_err());
        assert!(StateVector::from_amplitudes(&l, vec![c(0.6), Amp::new(0.0, 0.8)]).is_ok());
    }
}
