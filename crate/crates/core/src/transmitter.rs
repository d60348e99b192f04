//! GFDM modulation (dense and fast) and cyclic-prefix insertion.
//!
//! Data grids are time-slot-major: `d[m·N + k]` is the symbol on subcarrier
//! `k` of slot `m`.

use num_complex::Complex64;

use crate::dense::mat_vec;
use crate::error::{check_len, GfdmError, Result};
use crate::fast::FastGfdm;
use crate::modmatrix::ModulationMatrix;
use crate::params::GfdmParams;

#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    pub has_cp: bool,
    pub n_cp: usize,
}

impl BasebandSignal {
    pub fn without_cp(samples: Vec<Complex64>) -> Self {
        BasebandSignal { samples, has_cp: false, n_cp: 0 }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// `x = A·d` by dense product.
pub fn modulate_direct(a: &ModulationMatrix, d: &[Complex64]) -> Result<BasebandSignal> {
    check_len("data grid", d.len(), a.size())?;
    Ok(BasebandSignal::without_cp(mat_vec(a.matrix(), d)))
}

/// Fast modulation through the factorized pipeline. Builds FFT plans on
/// every call; hold a [`FastGfdm`] to reuse them.
pub fn modulate_fast(params: &GfdmParams, lambda_bar: &[Complex64], d: &[Complex64]) -> Result<BasebandSignal> {
    let fast = FastGfdm::new(params)?;
    Ok(BasebandSignal::without_cp(fast.modulate(lambda_bar, d)?))
}

/// Prepends the last `n_cp` samples.
pub fn add_cp(x: &BasebandSignal, n_cp: usize) -> Result<BasebandSignal> {
    if x.has_cp {
        return Err(GfdmError::param("signal already carries a cyclic prefix"));
    }
    let len = x.samples.len();
    if n_cp > len {
        return Err(GfdmError::param(format!("CP length {n_cp} exceeds block length {len}")));
    }
    let mut samples = Vec::with_capacity(len + n_cp);
    samples.extend_from_slice(&x.samples[len - n_cp..]);
    samples.extend_from_slice(&x.samples);
    Ok(BasebandSignal { samples, has_cp: true, n_cp })
}
