//! FFT-factorized GFDM stages.
//!
//! The modulation matrix factors as `A = Pᵀ·Γ_M·D̄·Γ_Mᴴ·P·Γ_N`, where `Γ_N`
//! is M blockwise N-point unitary IDFTs, `Γ_M` is N blockwise M-point
//! unitary IDFTs, `P` the perfect shuffle and `D̄` diagonal. Every linear
//! equalizer shares the mirrored structure `B⁻¹·Γ_Nᴴ·Pᵀ·Γ_M·D_eq·Γ_Mᴴ·P`, so
//! one engine serves both directions.

use num_complex::Complex64;

use crate::error::{check_len, Result};
use crate::params::GfdmParams;
use crate::permute::shuffle_into;
use crate::transform::BlockDft;

/// Precomputed FFT plans for one `(M, N)` geometry. Cheap to clone and
/// safe to share across threads.
#[derive(Debug, Clone)]
pub struct FastGfdm {
    m: usize,
    n: usize,
    slot: BlockDft,
    shuffled: BlockDft,
}

impl FastGfdm {
    /// Fails with `UnsupportedSize` unless M and N are powers of two.
    pub fn new(params: &GfdmParams) -> Result<Self> {
        params.validate()?;
        params.require_fast()?;
        Ok(Self::any_size(params))
    }

    /// Same pipeline without the power-of-two restriction; used to
    /// materialize the factored matrix for arbitrary sizes.
    pub(crate) fn any_size(params: &GfdmParams) -> Self {
        FastGfdm {
            m: params.m,
            n: params.n,
            slot: BlockDft::new(params.n),
            shuffled: BlockDft::new(params.m),
        }
    }

    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// `x = Pᵀ·Γ_M·diag(λ̄)·Γ_Mᴴ·P·Γ_N·d`.
    pub fn modulate(&self, lambda_bar: &[Complex64], d: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("lambda_bar", lambda_bar.len(), self.mn())?;
        check_len("data grid", d.len(), self.mn())?;
        let mut buf = d.to_vec();
        let mut work = vec![Complex64::default(); self.mn()];
        let mut scratch = Vec::new();

        self.slot.idft(&mut buf, &mut scratch);
        shuffle_into(&buf, &mut work, self.m, self.n);
        self.shuffled.dft(&mut work, &mut scratch);
        for (w, l) in work.iter_mut().zip(lambda_bar) {
            *w *= l;
        }
        self.shuffled.idft(&mut work, &mut scratch);
        shuffle_into(&work, &mut buf, self.n, self.m);
        Ok(buf)
    }

    /// `d̂ = (1/bias)·Γ_Nᴴ·Pᵀ·Γ_M·diag(d_eq)·Γ_Mᴴ·P·y`.
    pub fn equalize(&self, d_eq: &[Complex64], bias: f64, y: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("d_eq", d_eq.len(), self.mn())?;
        check_len("received block", y.len(), self.mn())?;
        let mut buf = vec![Complex64::default(); self.mn()];
        let mut work = vec![Complex64::default(); self.mn()];
        let mut scratch = Vec::new();

        shuffle_into(y, &mut work, self.m, self.n);
        self.shuffled.dft(&mut work, &mut scratch);
        for (w, e) in work.iter_mut().zip(d_eq) {
            *w *= e;
        }
        self.shuffled.idft(&mut work, &mut scratch);
        shuffle_into(&work, &mut buf, self.n, self.m);
        self.slot.dft(&mut buf, &mut scratch);
        if bias != 1.0 {
            let inv = 1.0 / bias;
            for v in buf.iter_mut() {
                *v *= inv;
            }
        }
        Ok(buf)
    }
}
