//! Dense modulation matrix, built directly and through the factorization.
//! Both are oracle paths; MN is capped to bound memory.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::{CMatrix, DEFAULT_ORACLE_CAP};
use crate::error::{check_len, GfdmError, Result};
use crate::fast::FastGfdm;
use crate::params::GfdmParams;
use crate::pulse::PrototypeFilter;
use crate::spectral::SpectralDiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct ModulationMatrix(pub CMatrix);

impl ModulationMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }
}

fn check_cap(params: &GfdmParams, cap: usize) -> Result<()> {
    params.validate()?;
    if params.mn() > cap {
        return Err(GfdmError::Capacity { mn: params.mn(), cap });
    }
    Ok(())
}

pub fn build_modmatrix_direct(g: &PrototypeFilter, params: &GfdmParams) -> Result<ModulationMatrix> {
    build_modmatrix_direct_capped(g, params, DEFAULT_ORACLE_CAP)
}

/// `A[n, mN+k] = g[(n − mN) mod MN]·e^{j2πkn/N}/√N`.
pub fn build_modmatrix_direct_capped(
    g: &PrototypeFilter,
    params: &GfdmParams,
    cap: usize,
) -> Result<ModulationMatrix> {
    check_cap(params, cap)?;
    let (n_sub, mn) = (params.n, params.mn());
    check_len("pulse", g.len(), mn)?;
    let c = g.coefficients();
    let scale = 1.0 / (n_sub as f64).sqrt();
    let a = DMatrix::from_fn(mn, mn, |row, col| {
        let (slot, k) = (col / n_sub, col % n_sub);
        let tap = c[(row + mn - slot * n_sub) % mn];
        let phase = 2.0 * PI * ((k * row) % n_sub) as f64 / n_sub as f64;
        tap * Complex64::from_polar(scale, phase)
    });
    Ok(ModulationMatrix(a))
}

pub fn build_modmatrix_factored(g: &PrototypeFilter, params: &GfdmParams) -> Result<ModulationMatrix> {
    build_modmatrix_factored_capped(g, params, DEFAULT_ORACLE_CAP)
}

/// Applies the factored pipeline to every standard basis vector. Works for
/// any M, N.
pub fn build_modmatrix_factored_capped(
    g: &PrototypeFilter,
    params: &GfdmParams,
    cap: usize,
) -> Result<ModulationMatrix> {
    check_cap(params, cap)?;
    let mn = params.mn();
    let diag = SpectralDiagonal::from_pulse(g, params)?;
    let fast = FastGfdm::any_size(params);
    let mut a = DMatrix::zeros(mn, mn);
    let mut e = vec![Complex64::default(); mn];
    for col in 0..mn {
        e[col] = Complex64::new(1.0, 0.0);
        let x = fast.modulate(&diag.lambda_bar, &e)?;
        a.column_mut(col).copy_from_slice(&x);
        e[col] = Complex64::default();
    }
    Ok(ModulationMatrix(a))
}
