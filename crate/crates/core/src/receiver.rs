//! Two-stage receiver: frequency-domain channel equalization, then the fast
//! self-interference equalizer. Dense oracle equalizers live here too.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::dense::{CMatrix, DEFAULT_ORACLE_CAP};
use crate::error::{check_len, GfdmError, Result};
use crate::fast::FastGfdm;
use crate::modmatrix::ModulationMatrix;
use crate::params::GfdmParams;

/// Entries below this fraction of the largest modulus count as zero on ZF paths.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqualizerKind {
    Mf,
    Zf,
    MmseBiased,
    MmseUnbiased,
}

impl EqualizerKind {
    pub const ALL: [EqualizerKind; 4] = [
        EqualizerKind::Mf,
        EqualizerKind::Zf,
        EqualizerKind::MmseBiased,
        EqualizerKind::MmseUnbiased,
    ];
}

impl fmt::Display for EqualizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqualizerKind::Mf => "mf",
            EqualizerKind::Zf => "zf",
            EqualizerKind::MmseBiased => "mmse-biased",
            EqualizerKind::MmseUnbiased => "mmse-unbiased",
        })
    }
}

impl FromStr for EqualizerKind {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "mf" => Ok(EqualizerKind::Mf),
            "zf" => Ok(EqualizerKind::Zf),
            "mmse-biased" | "biased-mmse" => Ok(EqualizerKind::MmseBiased),
            "mmse-unbiased" | "unbiased-mmse" | "mmse" => Ok(EqualizerKind::MmseUnbiased),
            other => Err(GfdmError::Parse(format!("unknown equalizer '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FdeKind {
    Zf,
    Mmse,
}

impl fmt::Display for FdeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FdeKind::Zf => "zf",
            FdeKind::Mmse => "mmse",
        })
    }
}

impl FromStr for FdeKind {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zf" => Ok(FdeKind::Zf),
            "mmse" => Ok(FdeKind::Mmse),
            other => Err(GfdmError::Parse(format!("unknown FDE kind '{other}'"))),
        }
    }
}

/// Bin and modulus of the first entry below the ZF threshold, if any.
fn find_singular(values: &[Complex64]) -> Option<(usize, f64)> {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = SINGULARITY_THRESHOLD * max;
    values
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .find(|(_, a)| max == 0.0 || *a < floor)
}

/// Everything the fast self-interference equalizer needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerFactors {
    pub d_eq: Vec<Complex64>,
    pub bias: f64,
    pub kind: EqualizerKind,
    pub snr_ratio: f64,
}

impl EqualizerFactors {
    /// `max|d_eq| / min|d_eq|`.
    pub fn condition_number(&self) -> Result<f64> {
        let (lo_bin, lo) = self
            .d_eq
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, a)| if a < b.1 { (i, a) } else { b });
        let hi = self.d_eq.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(lo > 0.0) {
            return Err(GfdmError::SingularPulse { bin: lo_bin, magnitude: lo });
        }
        Ok(hi / lo)
    }
}

/// `B = (1/MN)·Σ|λ|²/(|λ|² + ρ)`. Zero entries contribute nothing.
pub fn bias_scalar(lambda: &[Complex64], snr_ratio: f64) -> f64 {
    let sum: f64 = lambda
        .iter()
        .map(|l| {
            let p = l.norm_sqr();
            if p == 0.0 {
                0.0
            } else {
                p / (p + snr_ratio)
            }
        })
        .sum();
    sum / lambda.len() as f64
}

pub fn build_deq(lambda_bar: &[Complex64], kind: EqualizerKind, snr_ratio: f64) -> Result<EqualizerFactors> {
    if !(snr_ratio >= 0.0) {
        return Err(GfdmError::param(format!("snr_ratio {snr_ratio} must be nonnegative")));
    }
    if lambda_bar.is_empty() {
        return Err(GfdmError::param("empty spectral diagonal"));
    }
    let zf_like = kind == EqualizerKind::Zf || snr_ratio == 0.0 && kind != EqualizerKind::Mf;
    if zf_like {
        if let Some((bin, magnitude)) = find_singular(lambda_bar) {
            return Err(GfdmError::SingularPulse { bin, magnitude });
        }
    }
    let d_eq = lambda_bar
        .iter()
        .map(|l| match kind {
            EqualizerKind::Mf => l.conj(),
            EqualizerKind::Zf => l.inv(),
            EqualizerKind::MmseBiased | EqualizerKind::MmseUnbiased => l.conj() / (l.norm_sqr() + snr_ratio),
        })
        .collect();
    let bias = if kind == EqualizerKind::MmseUnbiased {
        bias_scalar(lambda_bar, snr_ratio)
    } else {
        1.0
    };
    Ok(EqualizerFactors { d_eq, bias, kind, snr_ratio })
}

/// κ of the equalization matrix from its diagonal alone.
pub fn condition_number(lambda_bar: &[Complex64], kind: EqualizerKind, snr_ratio: f64) -> Result<f64> {
    build_deq(lambda_bar, kind, snr_ratio)?.condition_number()
}

/// Fast self-interference equalization. Builds FFT plans per call; use
/// [`FastGfdm::equalize`] in loops.
pub fn equalize_fast(y: &[Complex64], factors: &EqualizerFactors, params: &GfdmParams) -> Result<Vec<Complex64>> {
    FastGfdm::new(params)?.equalize(&factors.d_eq, factors.bias, y)
}

/// Per-bin FDE coefficients: `1/Λ` or `Λ*/(|Λ|² + ρ)`.
pub fn fde_diagonal(lambda: &[Complex64], kind: FdeKind, snr_ratio: f64) -> Result<Vec<Complex64>> {
    match kind {
        FdeKind::Zf => {
            if let Some((bin, magnitude)) = find_singular(lambda) {
                return Err(GfdmError::SingularChannel { bin, magnitude });
            }
            Ok(lambda.iter().map(|l| l.inv()).collect())
        }
        FdeKind::Mmse => {
            if !(snr_ratio >= 0.0) {
                return Err(GfdmError::param("snr_ratio must be nonnegative"));
            }
            if snr_ratio == 0.0 {
                return fde_diagonal(lambda, FdeKind::Zf, 0.0);
            }
            Ok(lambda.iter().map(|l| l.conj() / (l.norm_sqr() + snr_ratio)).collect())
        }
    }
}

/// MN-point FFT plans for channel equalization.
#[derive(Clone)]
pub struct FdePlan {
    mn: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FdePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdePlan").field("mn", &self.mn).finish()
    }
}

impl FdePlan {
    pub fn new(mn: usize) -> Self {
        let mut planner = FftPlanner::new();
        FdePlan {
            mn,
            forward: planner.plan_fft_forward(mn),
            inverse: planner.plan_fft_inverse(mn),
        }
    }

    /// `y = W·diag(coeffs)·Wᴴ·z`.
    pub fn apply(&self, z: &[Complex64], coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("received block", z.len(), self.mn)?;
        check_len("FDE diagonal", coeffs.len(), self.mn)?;
        let mut buf = z.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.mn as f64;
        for (b, c) in buf.iter_mut().zip(coeffs) {
            *b *= c * scale;
        }
        self.inverse.process(&mut buf);
        Ok(buf)
    }
}

pub fn fde_equalize(z: &[Complex64], lambda: &[Complex64], kind: FdeKind, snr_ratio: f64) -> Result<Vec<Complex64>> {
    check_len("channel diagonal", lambda.len(), z.len())?;
    let coeffs = fde_diagonal(lambda, kind, snr_ratio)?;
    FdePlan::new(z.len()).apply(z, &coeffs)
}

fn lu_inverse(m: CMatrix, what: &str) -> Result<CMatrix> {
    let lu = m.lu();
    let u = lu.u();
    let pivots: Vec<f64> = u.diagonal().iter().map(|v| v.norm()).collect();
    let max = pivots.iter().copied().fold(0.0, f64::max);
    if let Some((i, p)) = pivots.iter().enumerate().find(|(_, p)| max == 0.0 || **p < SINGULARITY_THRESHOLD * max) {
        return Err(GfdmError::SingularMatrix(format!("{what}: pivot {i} has modulus {p:e}")));
    }
    lu.try_inverse()
        .ok_or_else(|| GfdmError::SingularMatrix(format!("{what} is not invertible")))
}

/// Dense equalization matrix: `Aᴴ`, `A⁻¹`, `(ρI + AᴴA)⁻¹Aᴴ`, or the latter
/// with its effective-gain diagonal divided out.
pub fn build_equalizer_direct(a: &ModulationMatrix, kind: EqualizerKind, snr_ratio: f64) -> Result<CMatrix> {
    let size = a.size();
    if size > DEFAULT_ORACLE_CAP {
        return Err(GfdmError::Capacity { mn: size, cap: DEFAULT_ORACLE_CAP });
    }
    let ah = a.matrix().adjoint();
    match kind {
        EqualizerKind::Mf => Ok(ah),
        EqualizerKind::Zf => lu_inverse(a.matrix().clone(), "A"),
        EqualizerKind::MmseBiased | EqualizerKind::MmseUnbiased => {
            let gram = &ah * a.matrix();
            let reg = &gram + DMatrix::<Complex64>::identity(size, size) * Complex64::new(snr_ratio, 0.0);
            let biased = lu_inverse(reg, "rho*I + A^H A")? * &ah;
            if kind == EqualizerKind::MmseBiased {
                return Ok(biased);
            }
            let gain = &biased * a.matrix();
            let mut out = biased;
            for (r, mut row) in out.row_iter_mut().enumerate() {
                row /= gain[(r, r)];
            }
            Ok(out)
        }
    }
}
