//! Brute-force reference machinery shared by the integration tests. Works
//! on plain nested vectors so it stays independent of the library's
//! targeted-application and partial-trace code paths.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub const TOL: f64 = 1e-12;
pub const SETTINGS: [&str; 4] = ["00", "01", "10", "11"];

/// Table of the four one-bit functions, column by column.
pub fn f(b: usize, a: usize) -> usize {
    [[0, 0], [0, 1], [1, 0], [1, 1]][b][a]
}

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn eye(d: usize) -> Mat {
    (0..d)
        .map(|r| (0..d).map(|k| if r == k { c(1.0) } else { c(0.0) }).collect())
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    (0..da * db)
        .map(|r| {
            (0..da * db)
                .map(|k| a[r / db][k / db] * b[r % db][k % db])
                .collect()
        })
        .collect()
}

pub fn matvec(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn hadamard() -> Mat {
    let h = 1.0 / 2f64.sqrt();
    vec![vec![c(h), c(h)], vec![c(h), c(-h)]]
}

/// `I_B (x) H (x) I_V` on the 16-dim (B, A, V) space.
pub fn h_on_a() -> Mat {
    kron(&kron(&eye(4), &hadamard()), &eye(2))
}

/// Function evaluation by enumeration of every (b, a, v) triple.
pub fn evaluation_matrix() -> Mat {
    let mut m = vec![vec![c(0.0); 16]; 16];
    for b in 0..4 {
        for a in 0..2 {
            for v in 0..2 {
                m[b * 4 + a * 2 + (v ^ f(b, a))][b * 4 + a * 2 + v] = c(1.0);
            }
        }
    }
    m
}

/// Input amplitudes with the setting register weighted by `b_weights`,
/// `A = |0>`, `V = (|0> - |1>)/sqrt2`.
pub fn input(b_weights: [f64; 4]) -> Vec<C> {
    let norm: f64 = b_weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let mut v = vec![c(0.0); 16];
    for (b, w) in b_weights.iter().enumerate() {
        let x = w / norm / 2f64.sqrt();
        v[b * 4] = c(x);
        v[b * 4 + 1] = c(-x);
    }
    v
}

/// The four stage vectors from explicit 16x16 products.
pub fn brute_pipeline(input: Vec<C>) -> [Vec<C>; 4] {
    let s1 = matvec(&h_on_a(), &input);
    let s2 = matvec(&evaluation_matrix(), &s1);
    let s3 = matvec(&h_on_a(), &s2);
    [input, s1, s2, s3]
}

pub fn basis_weights(b: &str) -> [f64; 4] {
    let mut w = [0.0; 4];
    w[usize::from_str_radix(b, 2).unwrap()] = 1.0;
    w
}

/// `rho_B` by explicit outer product `|psi><psi|` and index summation.
pub fn brute_rho_b(psi: &[C]) -> Mat {
    let outer: Mat = psi
        .iter()
        .map(|x| psi.iter().map(|y| x * y.conj()).collect())
        .collect();
    let mut rho = vec![vec![c(0.0); 4]; 4];
    for r in 0..4 {
        for k in 0..4 {
            for rest in 0..4 {
                rho[r][k] += outer[r * 4 + rest][k * 4 + rest];
            }
        }
    }
    rho
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Dense vector from sparse `(basis label, amplitude)` pairs.
pub fn sparse(entries: &[(&str, f64)]) -> Vec<C> {
    let mut v = vec![c(0.0); 16];
    for (label, amp) in entries {
        v[usize::from_str_radix(label, 2).unwrap()] = c(*amp);
    }
    v
}
