//! Prototype pulse construction and CSV import/export.
//!
//! Every pulse is `M·N` samples long and scaled so that `Σ|g[n]|² = N`;
//! together with the `1/√N` prefactor of the modulation matrix this gives
//! each column of `A` unit energy.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{GfdmError, Result};
use crate::params::GfdmParams;

/// Pulse family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSpec {
    /// Frequency-domain raised cosine spanning two subcarriers, sampled half
    /// a bin off centre. The offset keeps the pulse's spectral diagonal free
    /// of exact zeros when M and N are even.
    RaisedCosine { rolloff: f64 },
    /// `g[n] = 1` on the first N samples, zero elsewhere. Makes `A`
    /// block-diagonal IDFT (OFDM without per-symbol CP).
    RectTimeDelta,
    /// Constant over the whole block. Singular for M > 1.
    RectFull,
    /// User-supplied coefficients.
    Custom,
}

impl fmt::Display for PulseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseSpec::RaisedCosine { rolloff } => write!(f, "rc:{rolloff}"),
            PulseSpec::RectTimeDelta => f.write_str("rect-delta"),
            PulseSpec::RectFull => f.write_str("rect-full"),
            PulseSpec::Custom => f.write_str("custom"),
        }
    }
}

impl FromStr for PulseSpec {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "rect-delta" | "rect-time-delta" => return Ok(PulseSpec::RectTimeDelta),
            "rect-full" => return Ok(PulseSpec::RectFull),
            "custom" => return Ok(PulseSpec::Custom),
            _ => {}
        }
        let alpha = s
            .strip_prefix("rc:")
            .or_else(|| s.strip_prefix("rc="))
            .ok_or_else(|| GfdmError::Parse(format!("unknown pulse spec '{s}'")))?;
        let rolloff: f64 = alpha
            .trim()
            .parse()
            .map_err(|_| GfdmError::Parse(format!("bad roll-off '{alpha}'")))?;
        Ok(PulseSpec::RaisedCosine { rolloff })
    }
}

/// The `M·N` prototype filter coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeFilter {
    g: Vec<Complex64>,
    spec: PulseSpec,
}

impl PrototypeFilter {
    /// Wraps user coefficients, rescaling them to energy N.
    pub fn from_coefficients(g: Vec<Complex64>, params: &GfdmParams) -> Result<Self> {
        crate::error::check_len("pulse", g.len(), params.mn())?;
        let mut pulse = PrototypeFilter {
            g,
            spec: PulseSpec::Custom,
        };
        pulse.normalize(params.n)?;
        Ok(pulse)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.g
    }

    pub fn spec(&self) -> PulseSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.g.iter().map(|v| v.norm_sqr()).sum()
    }

    fn normalize(&mut self, n: usize) -> Result<()> {
        let e = self.energy();
        if !(e > 0.0) || !e.is_finite() {
            return Err(GfdmError::param("pulse has zero or non-finite energy"));
        }
        let s = (n as f64 / e).sqrt();
        for v in self.g.iter_mut() {
            *v *= s;
        }
        Ok(())
    }

    /// `index,re,im` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, v) in self.g.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", v.re, v.im));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses `index,re,im` rows (header optional; rows may come in any
    /// order but every index in `0..MN` must appear once).
    pub fn from_csv_str(text: &str, params: &GfdmParams) -> Result<Self> {
        let mn = params.mn();
        let mut g = vec![None; mn];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("index") {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(GfdmError::Parse(format!(
                    "pulse csv line {}: expected 3 columns",
                    lineno + 1
                )));
            }
            let bad = |c: &str| GfdmError::Parse(format!("pulse csv line {}: bad value '{c}'", lineno + 1));
            let idx: usize = cols[0].parse().map_err(|_| bad(cols[0]))?;
            let re: f64 = cols[1].parse().map_err(|_| bad(cols[1]))?;
            let im: f64 = cols[2].parse().map_err(|_| bad(cols[2]))?;
            if idx >= mn {
                return Err(GfdmError::Parse(format!("pulse index {idx} out of range 0..{mn}")));
            }
            if g[idx].replace(Complex64::new(re, im)).is_some() {
                return Err(GfdmError::Parse(format!("pulse index {idx} repeated")));
            }
        }
        let g = g
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| GfdmError::Parse(format!("pulse index {i} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coefficients(g, params)
    }

    pub fn read_csv(path: impl AsRef<Path>, params: &GfdmParams) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?, params)
    }
}

/// Raised-cosine amplitude at `x` subcarrier widths from the centre.
fn rc_response(x: f64, rolloff: f64) -> f64 {
    let x = x.abs();
    let lo = (1.0 - rolloff) / 2.0;
    let hi = (1.0 + rolloff) / 2.0;
    if x <= lo {
        1.0
    } else if x <= hi {
        0.5 * (1.0 + (PI / rolloff * (x - lo)).cos())
    } else {
        0.0
    }
}

/// Builds the pulse for `spec` at the block geometry of `params`.
pub fn build_prototype_pulse(spec: PulseSpec, params: &GfdmParams) -> Result<PrototypeFilter> {
    params.validate()?;
    let (m, n) = (params.m, params.n);
    let mn = params.mn();
    let g = match spec {
        PulseSpec::RectTimeDelta => (0..mn)
            .map(|i| if i < n { Complex64::new(1.0, 0.0) } else { Complex64::default() })
            .collect(),
        PulseSpec::RectFull => vec![Complex64::new(1.0, 0.0); mn],
        PulseSpec::RaisedCosine { rolloff } => {
            if !(0.0..=1.0).contains(&rolloff) {
                return Err(GfdmError::param(format!("roll-off {rolloff} outside [0, 1]")));
            }
            // bins laid out as 0..MN/2 then the negative half
            let half = mn.div_ceil(2);
            let mut spectrum: Vec<Complex64> = (0..mn)
                .map(|k| {
                    let f = if k < half { k as f64 } else { k as f64 - mn as f64 };
                    Complex64::new(rc_response((f + 0.5) / m as f64, rolloff), 0.0)
                })
                .collect();
            FftPlanner::new().plan_fft_inverse(mn).process(&mut spectrum);
            spectrum
        }
        PulseSpec::Custom => {
            return Err(GfdmError::param(
                "custom pulses are loaded with PrototypeFilter::from_coefficients",
            ))
        }
    };
    let mut pulse = PrototypeFilter { g, spec };
    pulse.normalize(n)?;
    Ok(pulse)
}
