//! Multipath block-fading channel: tap generation, convolution with AWGN,
//! CP removal and the channel's frequency diagonal.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{check_len, GfdmError, Result};
use crate::kv::{parse_kv, parse_list};
use crate::params::GfdmParams;
use crate::transmitter::BasebandSignal;

/// Power-delay profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub name: String,
    pub delays_ns: Vec<f64>,
    pub powers_db: Vec<f64>,
}

impl ChannelProfile {
    /// 3GPP Extended Typical Urban.
    pub fn etu() -> Self {
        ChannelProfile {
            name: "ETU".into(),
            delays_ns: vec![0.0, 50.0, 120.0, 200.0, 230.0, 500.0, 1600.0, 2300.0, 5000.0],
            powers_db: vec![-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0],
        }
    }

    /// One path, no delay: Rayleigh flat fading.
    pub fn single_path() -> Self {
        ChannelProfile {
            name: "flat".into(),
            delays_ns: vec![0.0],
            powers_db: vec![0.0],
        }
    }

    /// Built-in profile by name (`ETU`, `flat`), case-insensitive.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "etu" => Some(Self::etu()),
            "flat" | "rayleigh" => Some(Self::single_path()),
            _ => None,
        }
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut p = ChannelProfile {
            name: "custom".into(),
            delays_ns: Vec::new(),
            powers_db: Vec::new(),
        };
        for (k, v) in parse_kv(text)? {
            match k.as_str() {
                "name" => p.name = v,
                "delays_ns" => p.delays_ns = parse_list(&k, &v)?,
                "powers_db" => p.powers_db = parse_list(&k, &v)?,
                _ => return Err(GfdmError::Parse(format!("unknown profile key '{k}'"))),
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }

    /// A built-in name, otherwise a profile file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Some(p) => Ok(p),
            None => Self::load(name_or_path),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delays_ns.is_empty() {
            return Err(GfdmError::Config(format!("profile '{}' has no paths", self.name)));
        }
        if self.delays_ns.len() != self.powers_db.len() {
            return Err(GfdmError::Config(format!(
                "profile '{}': {} delays but {} powers",
                self.name,
                self.delays_ns.len(),
                self.powers_db.len()
            )));
        }
        if self.delays_ns.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(GfdmError::Config("delays must be finite and nonnegative".into()));
        }
        if self.delays_ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GfdmError::Config("delays must be strictly increasing".into()));
        }
        if self.powers_db.iter().any(|p| !p.is_finite()) {
            return Err(GfdmError::Config("powers must be finite".into()));
        }
        Ok(())
    }

    /// Sample bin of every path, `round(delay·fs)`.
    pub fn tap_bins(&self, fs: f64) -> Vec<usize> {
        self.delays_ns.iter().map(|d| (d * 1e-9 * fs).round() as usize).collect()
    }

    /// Number of sample-spaced taps after quantization.
    pub fn tap_count(&self, fs: f64) -> usize {
        self.tap_bins(fs).last().map_or(0, |b| b + 1)
    }

    /// Mean power per tap, normalized to unit total.
    pub fn tap_powers(&self, fs: f64) -> Vec<f64> {
        let bins = self.tap_bins(fs);
        let mut pw = vec![0.0; self.tap_count(fs)];
        for (b, db) in bins.iter().zip(&self.powers_db) {
            pw[*b] += 10f64.powf(db / 10.0);
        }
        let total: f64 = pw.iter().sum();
        pw.iter_mut().for_each(|p| *p /= total);
        pw
    }
}

/// One block's channel: taps, their MN-point frequency response and count.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub lambda: Vec<Complex64>,
    pub taps: usize,
}

impl ChannelRealization {
    pub fn from_taps(h: Vec<Complex64>, mn: usize) -> Result<Self> {
        let lambda = channel_freq_coeffs(&h, mn)?;
        Ok(ChannelRealization { taps: h.len(), h, lambda })
    }
}

/// Zero-mean circularly symmetric complex Gaussian with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Draws independent Rayleigh paths, sums paths sharing a sample bin and
/// normalizes the mean total power to one.
pub fn draw_channel<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    fs: f64,
    params: &GfdmParams,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if !(fs > 0.0) || !fs.is_finite() {
        return Err(GfdmError::param(format!("sampling rate {fs} must be positive")));
    }
    profile.validate()?;
    let taps = profile.tap_count(fs);
    params.check_channel_len(taps)?;
    let total: f64 = profile.powers_db.iter().map(|db| 10f64.powf(db / 10.0)).sum();
    let mut h = vec![Complex64::default(); taps];
    for (bin, db) in profile.tap_bins(fs).into_iter().zip(&profile.powers_db) {
        h[bin] += complex_gaussian(rng, 10f64.powf(db / 10.0) / total);
    }
    ChannelRealization::from_taps(h, params.mn())
}

/// Linear convolution with `h` plus complex AWGN of per-sample variance
/// `sigma_nu2`. Output length is `len(x) + L − 1`.
pub fn apply_channel<R: Rng + ?Sized>(
    x_cp: &BasebandSignal,
    h: &[Complex64],
    sigma_nu2: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if h.is_empty() {
        return Err(GfdmError::param("channel has no taps"));
    }
    if x_cp.has_cp && h.len() > x_cp.n_cp.max(1) {
        return Err(GfdmError::Config(format!(
            "channel has {} taps but CP is only {} samples",
            h.len(),
            x_cp.n_cp
        )));
    }
    let x = &x_cp.samples;
    let mut out = vec![Complex64::default(); x.len() + h.len() - 1];
    for (i, xi) in x.iter().enumerate() {
        for (s, hs) in h.iter().enumerate() {
            out[i + s] += hs * xi;
        }
    }
    if sigma_nu2 > 0.0 {
        for v in out.iter_mut() {
            *v += complex_gaussian(rng, sigma_nu2);
        }
    }
    Ok(out)
}

/// Drops the CP and the convolution tail, keeping samples `[n_cp, n_cp+MN)`.
pub fn remove_cp(z_cp: &[Complex64], params: &GfdmParams, taps: usize) -> Result<Vec<Complex64>> {
    let mn = params.mn();
    check_len("received block", z_cp.len(), params.n_cp + mn + taps.max(1) - 1)?;
    Ok(z_cp[params.n_cp..params.n_cp + mn].to_vec())
}

/// `Λ[r] = Σ_s h[s]·e^{−j2πsr/MN}`.
pub fn channel_freq_coeffs(h: &[Complex64], mn: usize) -> Result<Vec<Complex64>> {
    if h.is_empty() || h.len() > mn {
        return Err(GfdmError::param(format!("{} taps do not fit a block of {mn}", h.len())));
    }
    let mut buf = vec![Complex64::default(); mn];
    buf[..h.len()].copy_from_slice(h);
    FftPlanner::new().plan_fft_forward(mn).process(&mut buf);
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{circulant, diag, mat_vec, max_abs_diff, normalized_idft, relative_error};
    use crate::transmitter::add_cp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_vec(r: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
        (0..len).map(|_| complex_gaussian(r, 1.0)).collect()
    }

    #[test]
    fn etu_quantizes_to_eleven_taps() {
        let etu = ChannelProfile::etu();
        assert_eq!(etu.tap_bins(1.92e6), vec![0, 0, 0, 0, 0, 1, 3, 4, 10]);
        assert_eq!(etu.tap_count(1.92e6), 11);
        let pw = etu.tap_powers(1.92e6);
        assert!((pw.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(pw[2], 0.0);
    }

    #[test]
    fn single_path_unit_power() {
        let prm = GfdmParams::new(2, 4).unwrap();
        let mut r = rng(1);
        let draws = 20_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let ch = draw_channel(&ChannelProfile::single_path(), 1.92e6, &prm, &mut r).unwrap();
            assert_eq!(ch.taps, 1);
            acc += ch.h[0].norm_sqr();
        }
        assert!((acc / draws as f64 - 1.0).abs() < 0.03);
    }

    #[test]
    fn etu_total_power_and_reproducibility() {
        let prm = GfdmParams::new(8, 16).unwrap().with_cp(16);
        let etu = ChannelProfile::etu();
        let a = draw_channel(&etu, 1.92e6, &prm, &mut rng(5)).unwrap();
        let b = draw_channel(&etu, 1.92e6, &prm, &mut rng(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.h[2], c(0.0, 0.0));
        let mut r = rng(9);
        let draws = 20_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let ch = draw_channel(&etu, 1.92e6, &prm, &mut r).unwrap();
            acc += ch.h.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        assert!((acc / draws as f64 - 1.0).abs() < 0.03);
    }

    #[test]
    fn short_cp_is_rejected() {
        let prm = GfdmParams::new(8, 16).unwrap().with_cp(4);
        let err = draw_channel(&ChannelProfile::etu(), 1.92e6, &prm, &mut rng(0)).unwrap_err();
        assert_eq!(err.name(), "ConfigError");
        assert!(draw_channel(&ChannelProfile::etu(), 0.0, &prm, &mut rng(0)).is_err());
    }

    #[test]
    fn profile_file_parsing() {
        let p = ChannelProfile::from_kv_str("name = two\ndelays_ns = 0, 1000\npowers_db = 0 -3\n").unwrap();
        assert_eq!(p.tap_count(1e6), 2);
        assert!(ChannelProfile::from_kv_str("delays_ns = 0, 10\npowers_db = 0\n").is_err());
        assert!(ChannelProfile::from_kv_str("delays_ns = 10, 0\npowers_db = 0 0\n").is_err());
        assert!(ChannelProfile::from_kv_str("speed = 3\n").is_err());
        assert_eq!(ChannelProfile::resolve("etu").unwrap().name, "ETU");
    }

    #[test]
    fn identity_and_delay_channels() {
        let x = BasebandSignal::without_cp(vec![c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0)]);
        let y = apply_channel(&x, &[c(1.0, 0.0)], 0.0, &mut rng(0)).unwrap();
        assert_eq!(y, x.samples);
        let y = apply_channel(&x, &[c(0.0, 0.0), c(1.0, 0.0)], 0.0, &mut rng(0)).unwrap();
        assert_eq!(y, vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0)]);
    }

    #[test]
    fn cp_turns_convolution_circular() {
        let mut r = rng(2);
        let prm = GfdmParams::new(4, 8).unwrap().with_cp(6);
        let x = random_vec(&mut r, 32);
        let h = random_vec(&mut r, 5);
        let xcp = add_cp(&BasebandSignal::without_cp(x.clone()), 6).unwrap();
        let z = apply_channel(&xcp, &h, 0.0, &mut r).unwrap();
        let y = remove_cp(&z, &prm, 5).unwrap();
        let want = mat_vec(&circulant(&h, 32), &x);
        assert!(relative_error(&y, &want) < 1e-10);

        let w = normalized_idft(32);
        let lam = channel_freq_coeffs(&h, 32).unwrap();
        let via_freq = mat_vec(&(&w * diag(&lam) * w.adjoint()), &x);
        assert!(relative_error(&y, &via_freq) < 1e-10);
    }

    #[test]
    fn cp_round_trip_with_identity_channel() {
        let prm = GfdmParams::new(2, 4).unwrap().with_cp(3);
        let x = random_vec(&mut rng(4), 8);
        let xcp = add_cp(&BasebandSignal::without_cp(x.clone()), 3).unwrap();
        let z = apply_channel(&xcp, &[c(1.0, 0.0)], 0.0, &mut rng(0)).unwrap();
        assert_eq!(remove_cp(&z, &prm, 1).unwrap(), x);
        assert!(remove_cp(&z[1..], &prm, 1).is_err());
    }

    #[test]
    fn frequency_coefficients() {
        assert!(channel_freq_coeffs(&[c(1.0, 0.0)], 8).unwrap().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
        let lam = channel_freq_coeffs(&[c(0.0, 0.0), c(1.0, 0.0)], 8).unwrap();
        for (r, v) in lam.iter().enumerate() {
            assert!((v - Complex64::from_polar(1.0, -2.0 * PI * r as f64 / 8.0)).norm() < 1e-12);
        }
        let h = random_vec(&mut rng(8), 4);
        let lam = channel_freq_coeffs(&h, 16).unwrap();
        let w = normalized_idft(16);
        assert!(max_abs_diff(&(&w * diag(&lam) * w.adjoint()), &circulant(&h, 16)) < 1e-10);
        assert!(channel_freq_coeffs(&h, 3).is_err());
    }

    #[test]
    fn noise_variance_calibration() {
        let x = BasebandSignal::without_cp(vec![Complex64::default(); 1_000_000]);
        let z = apply_channel(&x, &[c(1.0, 0.0)], 0.25, &mut rng(12)).unwrap();
        let var = z.iter().map(|v| v.norm_sqr()).sum::<f64>() / z.len() as f64;
        assert!((var / 0.25 - 1.0).abs() < 0.01, "{var}");
    }
}
