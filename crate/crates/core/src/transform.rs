//! Blockwise unitary DFTs over contiguous runs of a buffer.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans of one size, both scaled by 1/√size so every
/// application is unitary.
#[derive(Clone)]
pub(crate) struct BlockDft {
    size: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl BlockDft {
    pub(crate) fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        BlockDft {
            size,
            scale: 1.0 / (size as f64).sqrt(),
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    /// Normalized DFT (e^{-j}) on every `size`-long block of `buf`.
    pub(crate) fn dft(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.run(&self.forward, buf, scratch);
    }

    /// Normalized IDFT (e^{+j}) on every `size`-long block of `buf`.
    pub(crate) fn idft(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.run(&self.inverse, buf, scratch);
    }

    fn run(&self, plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(buf.len() % self.size, 0);
        if self.size == 1 {
            return;
        }
        let need = plan.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::default());
        }
        plan.process_with_scratch(buf, &mut scratch[..need]);
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }
}

impl std::fmt::Debug for BlockDft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockDft").field("size", &self.size).finish()
    }
}
