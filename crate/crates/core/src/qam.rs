//! Gray-coded square QAM with unit average symbol energy.
//!
//! For `k` bits per symbol the first `k/2` bits pick the in-phase level and
//! the rest the quadrature level, each as a Gray label read MSB first.

use num_complex::Complex64;

use crate::error::{GfdmError, Result};

/// Bits per symbol for a supported order (4, 16, 64).
pub fn bits_per_symbol(order: usize) -> Result<usize> {
    match order {
        4 => Ok(2),
        16 => Ok(4),
        64 => Ok(6),
        _ => Err(GfdmError::param(format!("QAM order {order} not in {{4, 16, 64}}"))),
    }
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn inverse_gray(mut g: usize) -> usize {
    let mut i = 0;
    while g != 0 {
        i ^= g;
        g >>= 1;
    }
    i
}

/// Levels per dimension and the amplitude step giving unit energy.
fn geometry(order: usize) -> Result<(usize, usize, f64)> {
    let k = bits_per_symbol(order)?;
    let levels = 1usize << (k / 2);
    let l = levels as f64;
    Ok((k, levels, 1.0 / (2.0 * (l * l - 1.0) / 3.0).sqrt()))
}

fn read_label(bits: &[u8]) -> Result<usize> {
    bits.iter().try_fold(0usize, |acc, &b| {
        if b > 1 {
            Err(GfdmError::param(format!("bit value {b} is not 0 or 1")))
        } else {
            Ok((acc << 1) | b as usize)
        }
    })
}

pub fn qam_map(bits: &[u8], order: usize) -> Result<Vec<Complex64>> {
    let (k, levels, scale) = geometry(order)?;
    if bits.len() % k != 0 {
        return Err(GfdmError::param(format!(
            "{} bits do not divide into {k}-bit symbols",
            bits.len()
        )));
    }
    let amp = |label: usize| (2.0 * inverse_gray(label) as f64 - levels as f64 + 1.0) * scale;
    bits.chunks_exact(k)
        .map(|chunk| {
            let i = read_label(&chunk[..k / 2])?;
            let q = read_label(&chunk[k / 2..])?;
            Ok(Complex64::new(amp(i), amp(q)))
        })
        .collect()
}

/// Nearest level index along one axis; exact midpoints go to the level
/// with the smaller Gray label.
fn slice(x: f64, levels: usize, scale: f64) -> usize {
    let t = (x / scale + levels as f64 - 1.0) / 2.0;
    if !t.is_finite() {
        return if t > 0.0 { levels - 1 } else { 0 };
    }
    let lo = t.floor();
    let idx = if t - lo == 0.5 {
        let a = (lo.max(0.0) as usize).min(levels - 1);
        let b = ((lo + 1.0).max(0.0) as usize).min(levels - 1);
        if gray(a) <= gray(b) {
            a
        } else {
            b
        }
    } else {
        t.round().clamp(0.0, (levels - 1) as f64) as usize
    };
    idx.min(levels - 1)
}

fn push_label(out: &mut Vec<u8>, label: usize, width: usize) {
    for b in (0..width).rev() {
        out.push(((label >> b) & 1) as u8);
    }
}

/// Minimum-distance hard decisions.
pub fn qam_demap(symbols: &[Complex64], order: usize) -> Result<Vec<u8>> {
    let (k, levels, scale) = geometry(order)?;
    let mut out = Vec::with_capacity(symbols.len() * k);
    for s in symbols {
        push_label(&mut out, gray(slice(s.re, levels, scale)), k / 2);
        push_label(&mut out, gray(slice(s.im, levels, scale)), k / 2);
    }
    Ok(out)
}
