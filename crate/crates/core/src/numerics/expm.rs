//! Matrix exponential by scaling and squaring with a diagonal Padé core
//! (degrees 3, 5, 7, 9, 13 selected by the 1-norm).

use super::linalg::solve;
use super::matrix::{ComplexMatrix, C64};
use crate::error::Result;

const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Maximum absolute column sum.
pub fn one_norm(a: &ComplexMatrix) -> f64 {
    let (r, c) = (a.rows(), a.cols());
    (0..c)
        .map(|j| (0..r).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^a` for a square matrix.
pub fn matexp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.square_dim()?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            return pade_low(a, m);
        }
    }
    let theta13 = THETA[4].1;
    let s = if norm > theta13 { (norm / theta13).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale_real(0.5f64.powi(s));
    let mut x = pade13(&scaled)?;
    for _ in 0..s {
        x = x.dot(&x);
    }
    Ok(x)
}

fn combine(terms: &[(&ComplexMatrix, f64)], n: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(n, n);
    for (m, b) in terms {
        acc = &acc + &m.scale_real(*b);
    }
    acc
}

fn finish(u: ComplexMatrix, v: ComplexMatrix) -> Result<ComplexMatrix> {
    solve(&(&v - &u), &(&v + &u))
}

fn pade_low(a: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    let n = a.rows();
    let b: &[f64] = match m {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let id = ComplexMatrix::identity(n);
    let a2 = a.dot(a);
    // even powers A^0, A^2, ..., A^{m-1}
    let mut powers = vec![id, a2.clone()];
    while powers.len() < m.div_ceil(2) {
        let next = powers.last().expect("non-empty").dot(&a2);
        powers.push(next);
    }
    let odd: Vec<(&ComplexMatrix, f64)> = powers.iter().zip(b.iter().skip(1).step_by(2)).map(|(p, &c)| (p, c)).collect();
    let even: Vec<(&ComplexMatrix, f64)> = powers.iter().zip(b.iter().step_by(2)).map(|(p, &c)| (p, c)).collect();
    let u = a.dot(&combine(&odd, n));
    let v = combine(&even, n);
    finish(u, v)
}

fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let b = &B13;
    let id = ComplexMatrix::identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let inner_u = combine(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])], n);
    let u = a.dot(&(&a6.dot(&inner_u) + &combine(&[(&a6, b[7]), (&a4, b[5]), (&a2, b[3]), (&id, b[1])], n)));
    let inner_v = combine(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])], n);
    let v = &a6.dot(&inner_v) + &combine(&[(&a6, b[6]), (&a4, b[4]), (&a2, b[2]), (&id, b[0])], n);
    finish(u, v)
}

/// `e^{c·a}`.
pub fn matexp_scaled(a: &ComplexMatrix, c: C64) -> Result<ComplexMatrix> {
    matexp(&a.scale(c))
}
