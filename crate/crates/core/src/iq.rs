//! Baseband I/Q files: interleaved little-endian f64 pairs or CSV
//! (`index,re,im`), with a `key = value` sidecar describing the block.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{GfdmError, Result};
use crate::kv::{parse_kv, parse_value};
use crate::pulse::PulseSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct IqHeader {
    pub m: usize,
    pub n: usize,
    pub n_cp: usize,
    pub pulse: PulseSpec,
    pub qam_order: Option<usize>,
    pub blocks: usize,
}

impl IqHeader {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "n_cp = {}", self.n_cp);
        let _ = writeln!(s, "pulse = {}", self.pulse);
        if let Some(q) = self.qam_order {
            let _ = writeln!(s, "qam_order = {q}");
        }
        let _ = writeln!(s, "blocks = {}", self.blocks);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut m = None;
        let mut n = None;
        let mut h = IqHeader {
            m: 0,
            n: 0,
            n_cp: 0,
            pulse: PulseSpec::Custom,
            qam_order: None,
            blocks: 1,
        };
        for (k, v) in parse_kv(text)? {
            match k.as_str() {
                "m" => m = Some(parse_value(&k, &v)?),
                "n" => n = Some(parse_value(&k, &v)?),
                "n_cp" => h.n_cp = parse_value(&k, &v)?,
                "pulse" => h.pulse = v.parse()?,
                "qam_order" => h.qam_order = Some(parse_value(&k, &v)?),
                "blocks" => h.blocks = parse_value(&k, &v)?,
                _ => return Err(GfdmError::Parse(format!("unknown header key '{k}'"))),
            }
        }
        h.m = m.ok_or_else(|| GfdmError::Parse("header lacks m".into()))?;
        h.n = n.ok_or_else(|| GfdmError::Parse("header lacks n".into()))?;
        Ok(h)
    }

    /// Samples per block including CP.
    pub fn block_len(&self) -> usize {
        self.m * self.n + self.n_cp
    }
}

/// Sidecar path: the data path with `.hdr` appended.
pub fn header_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

pub fn encode_binary(samples: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 16);
    for s in samples {
        out.extend_from_slice(&s.re.to_le_bytes());
        out.extend_from_slice(&s.im.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<Vec<Complex64>> {
    if bytes.len() % 16 != 0 {
        return Err(GfdmError::Parse(format!(
            "binary I/Q length {} is not a multiple of 16 bytes",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

pub fn encode_csv(samples: &[Complex64]) -> String {
    let mut s = String::from("index,re,im\n");
    for (i, v) in samples.iter().enumerate() {
        let _ = writeln!(s, "{i},{:e},{:e}", v.re, v.im);
    }
    s
}

pub fn decode_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(GfdmError::Parse(format!("line {}: expected index,re,im", lineno + 1)));
        }
        let idx: usize = parse_value("index", cols[0])?;
        if idx != out.len() {
            return Err(GfdmError::Parse(format!("line {}: index {idx} out of order", lineno + 1)));
        }
        out.push(Complex64::new(parse_value("re", cols[1])?, parse_value("im", cols[2])?));
    }
    Ok(out)
}

/// Writes samples (binary unless the extension is `.csv`) plus the sidecar.
pub fn write_iq(path: &Path, samples: &[Complex64], header: &IqHeader) -> Result<()> {
    if is_csv(path) {
        std::fs::write(path, encode_csv(samples))?;
    } else {
        std::fs::write(path, encode_binary(samples))?;
    }
    std::fs::write(header_path(path), header.to_text())?;
    Ok(())
}

/// Reads samples and, if present, the sidecar.
pub fn read_iq(path: &Path) -> Result<(Vec<Complex64>, Option<IqHeader>)> {
    let samples = if is_csv(path) {
        decode_csv(&std::fs::read_to_string(path)?)?
    } else {
        decode_binary(&std::fs::read(path)?)?
    };
    let hp = header_path(path);
    let header = if hp.exists() {
        Some(IqHeader::from_text(&std::fs::read_to_string(hp)?)?)
    } else {
        None
    };
    Ok((samples, header))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
