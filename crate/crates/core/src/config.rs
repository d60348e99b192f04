//! Simulation configuration: `key = value` files and named presets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::ChannelProfile;
use crate::error::{GfdmError, Result};
use crate::kv::{parse_kv, parse_list, parse_value};
use crate::params::GfdmParams;
use crate::pulse::PulseSpec;
use crate::qam::bits_per_symbol;
use crate::receiver::{EqualizerKind, FdeKind};

/// Which axis the SNR grid is expressed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrUnit {
    EbN0,
    EsN0,
}

impl fmt::Display for SnrUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrUnit::EbN0 => "ebn0",
            SnrUnit::EsN0 => "esn0",
        })
    }
}

impl FromStr for SnrUnit {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['/', '_'], "").as_str() {
            "ebn0" => Ok(SnrUnit::EbN0),
            "esn0" => Ok(SnrUnit::EsN0),
            other => Err(GfdmError::Parse(format!("unknown SNR unit '{other}' (ebn0 or esn0)"))),
        }
    }
}

/// Fast factorized pipeline or dense matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecPath {
    Fast,
    Direct,
}

impl fmt::Display for ExecPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExecPath::Fast => "fast",
            ExecPath::Direct => "direct",
        })
    }
}

impl FromStr for ExecPath {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(ExecPath::Fast),
            "direct" => Ok(ExecPath::Direct),
            other => Err(GfdmError::Parse(format!("unknown path '{other}' (fast or direct)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Awgn,
    Multipath(ChannelProfile),
}

impl ChannelSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("awgn") {
            Ok(ChannelSpec::Awgn)
        } else {
            Ok(ChannelSpec::Multipath(ChannelProfile::resolve(s.trim())?))
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ChannelSpec::Awgn => "AWGN",
            ChannelSpec::Multipath(p) => &p.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: GfdmParams,
    pub pulse: PulseSpec,
    /// CSV coefficients overriding `pulse`.
    pub pulse_file: Option<PathBuf>,
    pub channel: ChannelSpec,
    pub fs_hz: f64,
    /// Recorded only; every block sees a static channel.
    pub doppler_hz: f64,
    pub fde: FdeKind,
    /// Divide soft outputs by the MMSE-FDE gain before self-interference equalization.
    pub fde_rescale: bool,
    pub equalizer: EqualizerKind,
    pub qam_order: usize,
    pub snr_unit: SnrUnit,
    pub snr_db: Vec<f64>,
    pub min_bits: u64,
    pub seed: u64,
    pub coding: bool,
    pub path: ExecPath,
    pub workers: usize,
    pub blocks_per_batch: usize,
    /// Subcarriers of the OFDM baseline.
    pub ofdm_n: usize,
}

pub const PRESETS: [&str; 4] = ["case1", "case2", "case1-awgn", "case2-awgn"];

impl SimConfig {
    /// Case I (N=128, M=8) or Case II (N=8, M=128), 16-QAM at 1.92 MHz with
    /// a 16-sample CP. Fading presets use ETU with MMSE FDE and the rate-1/2
    /// code; `-awgn` presets are uncoded.
    pub fn preset(name: &str) -> Result<Self> {
        let (m, n) = match name {
            "case1" | "case1-awgn" => (8, 128),
            "case2" | "case2-awgn" => (128, 8),
            other => {
                return Err(GfdmError::Config(format!(
                    "unknown preset '{other}' (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        let fading = !name.ends_with("-awgn");
        Ok(SimConfig {
            params: GfdmParams::new(m, n)?.with_cp(16),
            pulse: PulseSpec::RaisedCosine { rolloff: 0.1 },
            pulse_file: None,
            channel: if fading {
                ChannelSpec::Multipath(ChannelProfile::etu())
            } else {
                ChannelSpec::Awgn
            },
            fs_hz: 1.92e6,
            doppler_hz: 100.0,
            fde: FdeKind::Mmse,
            fde_rescale: false,
            equalizer: EqualizerKind::MmseUnbiased,
            qam_order: 16,
            snr_unit: SnrUnit::EbN0,
            snr_db: if fading {
                vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
            } else {
                vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0]
            },
            min_bits: 1_000_000,
            seed: 1,
            coding: fading,
            path: ExecPath::Fast,
            workers: 1,
            blocks_per_batch: 16,
            ofdm_n: 128,
        })
    }

    /// Starts from `preset = ...` when given (default `case1-awgn`) and
    /// applies the remaining keys in order.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let pairs = parse_kv(text)?;
        let preset = pairs
            .iter()
            .find(|(k, _)| k == "preset")
            .map_or("case1-awgn", |(_, v)| v.as_str());
        let mut cfg = SimConfig::preset(preset)?;
        let mut unit_given = false;
        for (k, v) in &pairs {
            if k == "snr_unit" {
                unit_given = true;
            }
            if k != "preset" {
                cfg.set(k, v)?;
            }
        }
        if pairs.iter().any(|(k, _)| k == "snr_db") && !unit_given {
            return Err(GfdmError::Config("snr_db given without snr_unit (ebn0 or esn0)".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" => self.params.m = parse_value(key, value)?,
            "n" => self.params.n = parse_value(key, value)?,
            "n_cp" => self.params.n_cp = parse_value(key, value)?,
            "pulse" => self.pulse = value.parse()?,
            "pulse_file" => {
                self.pulse_file = Some(PathBuf::from(value));
                self.pulse = PulseSpec::Custom;
            }
            "channel" => self.channel = ChannelSpec::parse(value)?,
            "fs_hz" => self.fs_hz = parse_value(key, value)?,
            "doppler_hz" => self.doppler_hz = parse_value(key, value)?,
            "fde" => self.fde = value.parse()?,
            "fde_rescale" => self.fde_rescale = parse_bool(key, value)?,
            "equalizer" => self.equalizer = value.parse()?,
            "qam_order" => self.qam_order = parse_value(key, value)?,
            "snr_unit" => self.snr_unit = value.parse()?,
            "snr_db" => self.snr_db = parse_list(key, value)?,
            "min_bits" => self.min_bits = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "coding" => self.coding = parse_bool(key, value)?,
            "path" => self.path = value.parse()?,
            "workers" => self.workers = parse_value(key, value)?,
            "blocks_per_batch" => self.blocks_per_batch = parse_value(key, value)?,
            "ofdm_n" => self.ofdm_n = parse_value(key, value)?,
            other => return Err(GfdmError::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn code_rate(&self) -> f64 {
        if self.coding {
            0.5
        } else {
            1.0
        }
    }

    /// Es/N0 in dB for a grid value.
    pub fn es_n0_db(&self, snr_db: f64) -> Result<f64> {
        let k = bits_per_symbol(self.qam_order)? as f64;
        Ok(match self.snr_unit {
            SnrUnit::EsN0 => snr_db,
            SnrUnit::EbN0 => snr_db + 10.0 * (k * self.code_rate()).log10(),
        })
    }

    /// Structural checks that need no pulse or channel evaluation.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        bits_per_symbol(self.qam_order)?;
        if self.min_bits < 10_000 {
            return Err(GfdmError::Config(format!("min_bits {} is below 10^4", self.min_bits)));
        }
        if self.snr_db.is_empty() {
            return Err(GfdmError::Config("empty SNR grid".into()));
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) || self.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(GfdmError::Config("SNR grid must be finite and strictly increasing".into()));
        }
        if self.workers == 0 || self.blocks_per_batch == 0 {
            return Err(GfdmError::Config("workers and blocks_per_batch must be positive".into()));
        }
        if self.path == ExecPath::Fast {
            self.params.require_fast()?;
        }
        if let ChannelSpec::Multipath(profile) = &self.channel {
            if !(self.fs_hz > 0.0) {
                return Err(GfdmError::Config("fs_hz must be positive".into()));
            }
            profile.validate()?;
            self.params.check_channel_len(profile.tap_count(self.fs_hz))?;
        }
        if self.coding && self.params.mn() * bits_per_symbol(self.qam_order)? < 14 {
            return Err(GfdmError::Config("block too short for the coded chain".into()));
        }
        Ok(())
    }

    /// Human-readable metadata lines for output headers.
    pub fn describe(&self) -> String {
        format!(
            "M={} N={} n_cp={} pulse={} channel={} fs_hz={} doppler_hz={} fde={} fde_rescale={} \
             equalizer={} qam={} unit={} coding={} path={} min_bits={} seed={}",
            self.params.m,
            self.params.n,
            self.params.n_cp,
            self.pulse,
            self.channel.name(),
            self.fs_hz,
            self.doppler_hz,
            self.fde,
            self.fde_rescale,
            self.equalizer,
            self.qam_order,
            self.snr_unit,
            self.coding,
            self.path,
            self.min_bits,
            self.seed
        )
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "on" | "yes" => Ok(true),
        "0" | "false" | "off" | "no" => Ok(false),
        _ => Err(GfdmError::Parse(format!("{key}: expected on/off, got '{value}'"))),
    }
}
