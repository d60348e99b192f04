//! Dense matrix builders for the direct (oracle) signal path.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::params::GfdmParams;

pub type CMatrix = DMatrix<Complex64>;

/// Default ceiling on MN for anything that materializes an MN×MN matrix.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// Unitary IDFT matrix: `W[r, c] = e^{+j2πrc/n}/√n`.
pub fn normalized_idft(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |r, c| {
        Complex64::from_polar(s, 2.0 * PI * ((r * c) % n) as f64 / n as f64)
    })
}

/// `count` copies of `block` on the diagonal.
pub fn block_diag(block: &CMatrix, count: usize) -> CMatrix {
    let b = block.nrows();
    let mut out = DMatrix::zeros(b * count, b * count);
    for k in 0..count {
        out.view_mut((k * b, k * b), (b, b)).copy_from(block);
    }
    out
}

/// The perfect-shuffle matrix P: row `l` has its one at column
/// `(l mod M)·N + ⌊l/M⌋`.
pub fn permutation_matrix(params: &GfdmParams) -> CMatrix {
    let (m, n) = (params.m, params.n);
    let mut p = DMatrix::zeros(m * n, m * n);
    for l in 0..m * n {
        p[(l, (l % m) * n + l / m)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Circulant matrix whose first column is `h` zero-padded to `size`.
pub fn circulant(h: &[Complex64], size: usize) -> CMatrix {
    DMatrix::from_fn(size, size, |r, c| {
        let k = (r + size - c) % size;
        h.get(k).copied().unwrap_or_default()
    })
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

pub fn mat_vec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let out = a * nalgebra::DVector::from_column_slice(v);
    out.iter().copied().collect()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `‖a − b‖₂ / ‖b‖₂`, or the absolute error when `b` is zero.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Ratio of the largest to the smallest singular value.
pub fn condition_number_svd(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}
