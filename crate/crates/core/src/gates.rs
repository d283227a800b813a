//! Dense unitaries: the Hadamard transform and function-evaluation oracles.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{bitstring, Amp, MATRIX_TOL};

/// A dense square unitary, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    data: Vec<Amp>,
}

impl Unitary {
    /// Builds a unitary from row-major entries, rejecting anything that is
    /// not unitary within `MATRIX_TOL`.
    pub fn new(dim: usize, data: Vec<Amp>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Domain(format!("dimension {dim} is not a power of two")));
        }
        if data.len() != dim * dim {
            return Err(Error::Domain(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        if data.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        let u = Self { dim, data };
        if !u.is_permutation() {
            let dev = u.unitarity_error();
            if dev > MATRIX_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(u)
    }

    pub fn from_rows(rows: &[Vec<Amp>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("matrix rows are not square".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        Self::permutation(&(0..dim).collect::<Vec<_>>())
    }

    /// Permutation matrix sending basis vector `col` to `image[col]`.
    pub(crate) fn permutation(image: &[usize]) -> Self {
        let dim = image.len();
        let mut data = vec![Amp::new(0.0, 0.0); dim * dim];
        for (col, &row) in image.iter().enumerate() {
            data[row * dim + col] = Amp::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Amp {
        self.data[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let data = (0..d * d).map(|i| self.get(i % d, i / d).conj()).collect();
        Self { dim: d, data }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Unitary) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let d = self.dim;
        let mut data = vec![Amp::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * rhs.get(k, c);
                }
            }
        }
        Self { dim: d, data }
    }

    /// Tensor product; `self` acts on the more significant qubits.
    pub fn kron(&self, rhs: &Unitary) -> Self {
        let d = self.dim * rhs.dim;
        let mut data = vec![Amp::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = self.get(r / rhs.dim, c / rhs.dim) * rhs.get(r % rhs.dim, c % rhs.dim);
            }
        }
        Self { dim: d, data }
    }

    /// Max entry modulus of `U^dagger U - I`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut acc = Amp::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(k, r).conj() * self.get(k, c);
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// True when every entry is exactly 0 or 1 with one 1 per row and column.
    pub fn is_permutation(&self) -> bool {
        let d = self.dim;
        let zero = Amp::new(0.0, 0.0);
        let one = Amp::new(1.0, 0.0);
        let mut col_hits = vec![0usize; d];
        for r in 0..d {
            let mut row_hits = 0;
            for (c, hits) in col_hits.iter_mut().enumerate() {
                let v = self.get(r, c);
                if v == one {
                    row_hits += 1;
                    *hits += 1;
                } else if v != zero {
                    return false;
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }

    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Sub-block of rows and columns `offset..offset + size`.
    pub fn block(&self, offset: usize, size: usize) -> Result<Self> {
        let data = (0..size * size)
            .map(|i| self.get(offset + i / size, offset + i % size))
            .collect();
        Self::new(size, data)
    }

    /// Block-diagonal unitary `diag(blocks[0], blocks[1], ...)`.
    pub fn block_diagonal(blocks: &[Unitary]) -> Result<Self> {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut data = vec![Amp::new(0.0, 0.0); dim * dim];
        let mut offset = 0;
        for b in blocks {
            for r in 0..b.dim {
                for c in 0..b.dim {
                    data[(offset + r) * dim + offset + c] = b.get(r, c);
                }
            }
            offset += b.dim;
        }
        Self::new(dim, data)
    }
}

/// The 2x2 Hadamard transform.
pub fn hadamard() -> Unitary {
    let h = Amp::new(FRAC_1_SQRT_2, 0.0);
    Unitary {
        dim: 2,
        data: vec![h, h, h, -h],
    }
}

/// `H` tensored `n` times.
pub fn hadamard_n(n: usize) -> Unitary {
    let h = hadamard();
    (1..n).fold(h.clone(), |acc, _| acc.kron(&h))
}

/// Random unitary from Gram-Schmidt over uniformly drawn complex columns.
/// Not Haar-distributed; meant for property tests.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Unitary {
    loop {
        let mut cols: Vec<Vec<Amp>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            let mut v: Vec<Amp> = (0..dim)
                .map(|_| Amp::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &cols {
                    let proj: Amp = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, qi)| *x -= proj * qi);
                }
            }
            let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        if ok {
            let data = (0..dim * dim).map(|i| cols[i % dim][i / dim]).collect();
            return Unitary { dim, data };
        }
    }
}

/// Constant / balanced / neither partition of a boolean function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Constant,
    Balanced,
    Neither,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::Constant => "constant",
            FunctionClass::Balanced => "balanced",
            FunctionClass::Neither => "neither",
        })
    }
}

pub fn classify_function(values: &[u8]) -> FunctionClass {
    let ones = values.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == values.len() {
        FunctionClass::Constant
    } else if 2 * ones == values.len() {
        FunctionClass::Balanced
    } else {
        FunctionClass::Neither
    }
}

/// Validates a value list and returns its argument width `n`.
pub fn argument_bits(values: &[u8]) -> Result<usize> {
    if values.len() < 2 || !values.len().is_power_of_two() {
        return Err(Error::Format(format!(
            "value list length {} is not a power of two >= 2",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|&&v| v > 1) {
        return Err(Error::Domain(format!("function value {v} is not binary")));
    }
    Ok(values.len().trailing_zeros() as usize)
}

/// Boolean functions indexed by a problem-setting label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    arg_bits: usize,
    settings: BTreeMap<String, Vec<u8>>,
}

impl FunctionTable {
    pub fn new<I, S>(settings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<u8>)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        let mut arg_bits = None;
        let mut width = None;
        for (label, values) in settings {
            let label = label.into();
            if label.is_empty() || !label.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Format(format!("setting label {label:?} is not a bitstring")));
            }
            if *width.get_or_insert(label.len()) != label.len() {
                return Err(Error::Format(format!("setting label {label} has inconsistent width")));
            }
            let n = argument_bits(&values)?;
            if *arg_bits.get_or_insert(n) != n {
                return Err(Error::Format(format!(
                    "setting {label} has {} values, expected {}",
                    values.len(),
                    1 << arg_bits.unwrap()
                )));
            }
            if map.insert(label.clone(), values).is_some() {
                return Err(Error::Format(format!("duplicate setting {label}")));
            }
        }
        let arg_bits = arg_bits.ok_or_else(|| Error::Format("function table is empty".into()))?;
        Ok(Self {
            arg_bits,
            settings: map,
        })
    }

    /// The four one-bit functions `f_00 .. f_11`.
    pub fn deutsch() -> Self {
        Self::new([
            ("00", vec![0, 0]),
            ("01", vec![0, 1]),
            ("10", vec![1, 0]),
            ("11", vec![1, 1]),
        ])
        .expect("canonical table is valid")
    }

    pub fn arg_bits(&self) -> usize {
        self.arg_bits
    }

    /// Width of the setting labels.
    pub fn setting_bits(&self) -> usize {
        self.settings.keys().next().map_or(0, |k| k.len())
    }

    pub fn settings(&self) -> &BTreeMap<String, Vec<u8>> {
        &self.settings
    }

    pub fn values(&self, label: &str) -> Option<&[u8]> {
        self.settings.get(label).map(Vec::as_slice)
    }
}

impl FromStr for FunctionTable {
    type Err = Error;

    /// One `<label>: <v0>,<v1>,...` line per setting; blank lines and `#`
    /// comments are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (label, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("line {}: missing ':'", lineno + 1)))?;
            let values = rest
                .split(',')
                .map(|v| match v.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::Format(format!(
                        "line {}: value {other:?} is not 0 or 1",
                        lineno + 1
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            entries.push((label.trim().to_string(), values));
        }
        Self::new(entries)
    }
}

impl fmt::Display for FunctionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, values) in &self.settings {
            let vals: Vec<String> = values.iter().map(u8::to_string).collect();
            writeln!(f, "{label}: {}", vals.join(","))?;
        }
        Ok(())
    }
}

/// `|b,a,v> -> |b,a,v xor f_b(a)>` over setting, argument and value qubits.
pub fn oracle_with_setting(table: &FunctionTable) -> Result<Unitary> {
    let w = table.setting_bits();
    let n = table.arg_bits();
    let lists = (0..1usize << w)
        .map(|b| {
            let label = bitstring(b, w);
            table
                .values(&label)
                .ok_or(Error::IncompleteOracle(label))
        })
        .collect::<Result<Vec<_>>>()?;

    let dim = 1 << (w + n + 1);
    let image: Vec<usize> = (0..dim)
        .map(|idx| {
            let b = idx >> (n + 1);
            let a = (idx >> 1) & ((1 << n) - 1);
            idx ^ lists[b][a] as usize
        })
        .collect();
    Ok(Unitary::permutation(&image))
}

/// `|a,v> -> |a,v xor f(a)>` over argument and value qubits.
pub fn oracle_fixed(values: &[u8]) -> Result<Unitary> {
    argument_bits(values)?;
    let image: Vec<usize> = (0..2 * values.len())
        .map(|idx| idx ^ values[idx >> 1] as usize)
        .collect();
    Ok(Unitary::permutation(&image))
}
