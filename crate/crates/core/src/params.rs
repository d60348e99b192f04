//! Block geometry and signal/noise variances.

use crate::error::{GfdmError, Result};

/// GFDM block geometry: `m` time slots by `n` subcarriers, plus CP length and
/// the data/noise variances used by the MMSE equalizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfdmParams {
    pub m: usize,
    pub n: usize,
    pub n_cp: usize,
    pub sigma_d2: f64,
    pub sigma_nu2: f64,
}

impl GfdmParams {
    /// Unit data variance, no noise, no CP.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        let p = GfdmParams {
            m,
            n,
            n_cp: 0,
            sigma_d2: 1.0,
            sigma_nu2: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_cp(mut self, n_cp: usize) -> Self {
        self.n_cp = n_cp;
        self
    }

    pub fn with_noise(mut self, sigma_nu2: f64) -> Self {
        self.sigma_nu2 = sigma_nu2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(GfdmError::param(format!(
                "M and N must be positive (M={}, N={})",
                self.m, self.n
            )));
        }
        if !(self.sigma_d2 > 0.0) || !self.sigma_d2.is_finite() {
            return Err(GfdmError::param("sigma_d2 must be positive"));
        }
        if !(self.sigma_nu2 >= 0.0) || !self.sigma_nu2.is_finite() {
            return Err(GfdmError::param("sigma_nu2 must be nonnegative"));
        }
        Ok(())
    }

    /// Total symbols (and samples) per block.
    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// σ_ν² / σ_d², the regularizer of the MMSE equalizers.
    pub fn snr_ratio(&self) -> f64 {
        self.sigma_nu2 / self.sigma_d2
    }

    pub fn is_fast_compatible(&self) -> bool {
        self.m.is_power_of_two() && self.n.is_power_of_two()
    }

    pub fn require_fast(&self) -> Result<()> {
        if self.is_fast_compatible() {
            Ok(())
        } else {
            Err(GfdmError::UnsupportedSize {
                m: self.m,
                n: self.n,
            })
        }
    }

    /// Enforces `n_cp >= taps` for an attached multipath channel.
    pub fn check_channel_len(&self, taps: usize) -> Result<()> {
        if taps > self.n_cp.max(1) {
            return Err(GfdmError::Config(format!(
                "channel has {taps} taps but CP is only {} samples",
                self.n_cp
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_sizes() {
        assert!(GfdmParams::new(0, 4).is_err());
        assert!(GfdmParams::new(4, 0).is_err());
    }

    #[test]
    fn rejects_bad_variances() {
        let mut p = GfdmParams::new(2, 2).unwrap();
        p.sigma_d2 = 0.0;
        assert!(p.validate().is_err());
        let p = GfdmParams::new(2, 2).unwrap().with_noise(-1.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn fast_path_requires_powers_of_two() {
        assert!(GfdmParams::new(8, 16).unwrap().require_fast().is_ok());
        assert!(matches!(
            GfdmParams::new(3, 16).unwrap().require_fast(),
            Err(GfdmError::UnsupportedSize { m: 3, n: 16 })
        ));
        assert!(GfdmParams::new(1, 1).unwrap().is_fast_compatible());
    }

    #[test]
    fn channel_length_against_cp() {
        let p = GfdmParams::new(8, 16).unwrap().with_cp(4);
        assert!(p.check_channel_len(4).is_ok());
        assert!(p.check_channel_len(5).is_err());
        // a flat channel needs no CP
        assert!(GfdmParams::new(8, 16).unwrap().check_channel_len(1).is_ok());
    }
}
