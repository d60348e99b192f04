//! Spectral diagonals of the block-circulant pulse factor.
//!
//! `λ(qN + n) = Σ_m g[mN + n]·ω^{-mq}` with `ω = e^{+j2π/M}`, i.e. an
//! unnormalized forward M-point DFT down each in-slot sample index `n`.
//! `λ̄` is the same set of values reordered by the perfect shuffle.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{check_len, Result};
use crate::params::GfdmParams;
use crate::permute::permute_forward;
use crate::pulse::PrototypeFilter;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDiagonal {
    pub lambda: Vec<Complex64>,
    pub lambda_bar: Vec<Complex64>,
}

impl SpectralDiagonal {
    pub fn from_pulse(g: &PrototypeFilter, params: &GfdmParams) -> Result<Self> {
        let lambda = spectral_diag_lambda(g, params)?;
        let lambda_bar = spectral_diag_lambda_bar(&lambda, params)?;
        Ok(SpectralDiagonal { lambda, lambda_bar })
    }

    /// Smallest `|λ̄|` and the bin where it occurs. Zero means `A` is singular.
    pub fn min_abs(&self) -> (usize, f64) {
        self.lambda_bar
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, a)| if a < best.1 { (i, a) } else { best })
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda_bar.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn spectral_diag_lambda(g: &PrototypeFilter, params: &GfdmParams) -> Result<Vec<Complex64>> {
    let (m, n) = (params.m, params.n);
    check_len("pulse", g.len(), params.mn())?;
    let coeffs = g.coefficients();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut column = vec![Complex64::default(); m];
    let mut lambda = vec![Complex64::default(); m * n];
    for k in 0..n {
        for (slot, c) in column.iter_mut().enumerate() {
            *c = coeffs[slot * n + k];
        }
        fft.process(&mut column);
        for (q, c) in column.iter().enumerate() {
            lambda[q * n + k] = *c;
        }
    }
    Ok(lambda)
}

/// `λ̄(r) = λ((r mod M)·N + ⌊r/M⌋)`.
pub fn spectral_diag_lambda_bar(lambda: &[Complex64], params: &GfdmParams) -> Result<Vec<Complex64>> {
    permute_forward(lambda, params)
}
