//! Monte Carlo BER sweeps, the OFDM baseline and condition-number sweeps.
//!
//! Every batch of blocks draws from its own ChaCha8 stream keyed by
//! `(seed, point, batch)`, and batches are reduced in index order, so results
//! do not depend on the worker count.

use std::fmt::Write as _;
use std::hash::Hasher;
use std::time::Instant;

use fnv::FnvHasher;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{apply_channel, draw_channel, remove_cp};
use crate::config::{ChannelSpec, ExecPath, SimConfig};
use crate::dense::{mat_vec, CMatrix};
use crate::error::{GfdmError, Result};
use crate::fast::FastGfdm;
use crate::fec::{conv_encode, viterbi_decode, CodeMetrics};
use crate::modmatrix::{build_modmatrix_direct, ModulationMatrix};
use crate::params::GfdmParams;
use crate::pulse::{build_prototype_pulse, PrototypeFilter, PulseSpec};
use crate::qam::{bits_per_symbol, qam_demap, qam_map};
use crate::receiver::{
    build_deq, build_equalizer_direct, condition_number, fde_diagonal, EqualizerFactors, EqualizerKind, FdeKind,
    FdePlan,
};
use crate::spectral::SpectralDiagonal;
use crate::transmitter::{add_cp, BasebandSignal};

/// Tail bits of the convolutional code.
const TAIL: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub es_n0_db: f64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub wall_time_s: f64,
    /// FNV-1a fold of every decided bit, in batch order.
    pub digest: u64,
}

impl BerRecord {
    /// Binomial standard deviation of the BER estimate.
    pub fn sigma(&self) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits_simulated as f64).sqrt()
    }
}

/// Builds the pulse named by the config, reading `pulse_file` when set.
pub fn config_pulse(cfg: &SimConfig, params: &GfdmParams) -> Result<PrototypeFilter> {
    match (&cfg.pulse_file, cfg.pulse) {
        (Some(path), _) => PrototypeFilter::read_csv(path, params),
        (None, PulseSpec::Custom) => Err(GfdmError::Config("pulse = custom needs pulse_file".into())),
        (None, spec) => build_prototype_pulse(spec, params),
    }
}

enum Engine {
    Fast(FastGfdm),
    Direct { a: ModulationMatrix, eq: CMatrix },
}

/// Everything fixed for one SNR point.
struct Chain<'a> {
    cfg: &'a SimConfig,
    info_bits: usize,
    sigma_nu2: f64,
    snr_ratio: f64,
    lambda_bar: Vec<Complex64>,
    factors: EqualizerFactors,
    engine: Engine,
    fde: Option<FdePlan>,
}

impl<'a> Chain<'a> {
    fn new(cfg: &'a SimConfig, pulse: &PrototypeFilter, a: Option<&ModulationMatrix>, snr_db: f64) -> Result<Self> {
        let params = cfg.params;
        let es_n0 = 10f64.powf(cfg.es_n0_db(snr_db)? / 10.0);
        let sigma_nu2 = params.sigma_d2 / es_n0;
        let snr_ratio = sigma_nu2 / params.sigma_d2;
        let lambda_bar = SpectralDiagonal::from_pulse(pulse, &params)?.lambda_bar;
        let factors = build_deq(&lambda_bar, cfg.equalizer, snr_ratio)?;
        let engine = match cfg.path {
            ExecPath::Fast => Engine::Fast(FastGfdm::new(&params)?),
            ExecPath::Direct => {
                let a = a.cloned().ok_or_else(|| GfdmError::Config("direct path needs A".into()))?;
                let eq = build_equalizer_direct(&a, cfg.equalizer, snr_ratio)?;
                Engine::Direct { a, eq }
            }
        };
        let bits_per_block = params.mn() * bits_per_symbol(cfg.qam_order)?;
        let info_bits = if cfg.coding { bits_per_block / 2 - TAIL } else { bits_per_block };
        let fde = match cfg.channel {
            ChannelSpec::Awgn => None,
            ChannelSpec::Multipath(_) => Some(FdePlan::new(params.mn())),
        };
        Ok(Chain { cfg, info_bits, sigma_nu2, snr_ratio, lambda_bar, factors, engine, fde })
    }

    fn modulate(&self, d: &[Complex64]) -> Result<Vec<Complex64>> {
        match &self.engine {
            Engine::Fast(f) => f.modulate(&self.lambda_bar, d),
            Engine::Direct { a, .. } => Ok(mat_vec(a.matrix(), d)),
        }
    }

    fn equalize(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        match &self.engine {
            Engine::Fast(f) => f.equalize(&self.factors.d_eq, self.factors.bias, y),
            Engine::Direct { eq, .. } => Ok(mat_vec(eq, y)),
        }
    }

    /// Runs one batch; returns (bits, errors, digest).
    fn batch(&self, point: usize, batch: usize, blocks: usize) -> Result<(u64, u64, u64)> {
        let cfg = self.cfg;
        let params = cfg.params;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(((point as u64) << 32) | batch as u64);
        let mut hasher = FnvHasher::default();
        let mut errors = 0u64;
        for _ in 0..blocks {
            let info: Vec<u8> = (0..self.info_bits).map(|_| rng.random::<bool>() as u8).collect();
            let coded = if cfg.coding { conv_encode(&info)? } else { info.clone() };
            let symbols = qam_map(&coded, cfg.qam_order)?;
            let x = BasebandSignal::without_cp(self.modulate(&symbols)?);
            let xcp = add_cp(&x, params.n_cp)?;
            let mut y = match &cfg.channel {
                ChannelSpec::Awgn => {
                    let z = apply_channel(&xcp, &[Complex64::new(1.0, 0.0)], self.sigma_nu2, &mut rng)?;
                    remove_cp(&z, &params, 1)?
                }
                ChannelSpec::Multipath(profile) => {
                    let ch = draw_channel(profile, cfg.fs_hz, &params, &mut rng)?;
                    let z = apply_channel(&xcp, &ch.h, self.sigma_nu2, &mut rng)?;
                    let z = remove_cp(&z, &params, ch.taps)?;
                    let coeffs = fde_diagonal(&ch.lambda, cfg.fde, self.snr_ratio)?;
                    let mut y = self.fde.as_ref().expect("plan exists for multipath").apply(&z, &coeffs)?;
                    if cfg.fde_rescale && cfg.fde == FdeKind::Mmse {
                        let gain = crate::receiver::bias_scalar(&ch.lambda, self.snr_ratio);
                        y.iter_mut().for_each(|v| *v /= gain);
                    }
                    y
                }
            };
            y = self.equalize(&y)?;
            let hard = qam_demap(&y, cfg.qam_order)?;
            let decided = if cfg.coding {
                viterbi_decode(CodeMetrics::Hard(&hard[..coded.len()]))?
            } else {
                hard
            };
            errors += decided.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
            hasher.write(&decided);
        }
        Ok(((blocks * self.info_bits) as u64, errors, hasher.finish()))
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| GfdmError::Config(format!("cannot start {workers} workers: {e}")))
}

/// Full BER sweep. Configuration problems (short CP, singular ZF pulse,
/// unsupported sizes) are reported before any block is simulated.
pub fn run_ber_sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let pulse = config_pulse(cfg, &cfg.params)?;
    let a = match cfg.path {
        ExecPath::Direct => Some(build_modmatrix_direct(&pulse, &cfg.params)?),
        ExecPath::Fast => None,
    };
    let chains = cfg
        .snr_db
        .iter()
        .map(|&s| Chain::new(cfg, &pulse, a.as_ref(), s))
        .collect::<Result<Vec<_>>>()?;
    let pool = thread_pool(cfg.workers)?;
    let mut records = Vec::with_capacity(chains.len());
    for (point, (chain, &snr_db)) in chains.iter().zip(&cfg.snr_db).enumerate() {
        let start = Instant::now();
        let per_batch = (chain.info_bits * cfg.blocks_per_batch) as u64;
        let batches = cfg.min_bits.div_ceil(per_batch) as usize;
        let results: Vec<Result<(u64, u64, u64)>> = pool.install(|| {
            (0..batches)
                .into_par_iter()
                .map(|b| chain.batch(point, b, cfg.blocks_per_batch))
                .collect()
        });
        let mut hasher = FnvHasher::default();
        let (mut bits, mut errors) = (0u64, 0u64);
        for r in results {
            let (b, e, d) = r?;
            bits += b;
            errors += e;
            hasher.write_u64(d);
        }
        records.push(BerRecord {
            snr_db,
            es_n0_db: cfg.es_n0_db(snr_db)?,
            bits_simulated: bits,
            bit_errors: errors,
            ber: errors as f64 / bits as f64,
            wall_time_s: start.elapsed().as_secs_f64(),
            digest: hasher.finish(),
        });
    }
    Ok(records)
}

/// The same sweep through CP-OFDM with `ofdm_n` subcarriers: one OFDM symbol
/// per block, per-symbol CP and single-tap FDE of the configured kind.
pub fn ofdm_baseline(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    let mut ofdm = cfg.clone();
    ofdm.params = GfdmParams::new(1, cfg.ofdm_n)?.with_cp(cfg.params.n_cp);
    ofdm.params.sigma_d2 = cfg.params.sigma_d2;
    ofdm.pulse = PulseSpec::RectTimeDelta;
    ofdm.pulse_file = None;
    ofdm.equalizer = EqualizerKind::Zf;
    ofdm.path = ExecPath::Fast;
    run_ber_sweep(&ofdm)
}

pub fn ber_csv(records: &[BerRecord], cfg: &SimConfig, with_timing: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", cfg.describe());
    s.push_str("snr_db,es_n0_db,bits,errors,ber,digest");
    s.push_str(if with_timing { ",wall_time_s\n" } else { "\n" });
    for r in records {
        let _ = write!(
            s,
            "{},{:.6},{},{},{:.6e},{:016x}",
            r.snr_db, r.es_n0_db, r.bits_simulated, r.bit_errors, r.ber, r.digest
        );
        if with_timing {
            let _ = write!(s, ",{:.3}", r.wall_time_s);
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub m: usize,
    pub kind: EqualizerKind,
    /// `inf` when the equalizer does not exist.
    pub kappa: f64,
}

/// κ of every equalizer kind over `m_list` at fixed N. `snr_db` is
/// `σ_d²/σ_ν²` in dB.
pub fn run_condition_sweep(n: usize, m_list: &[usize], pulse: PulseSpec, snr_db: f64) -> Result<Vec<ConditionRow>> {
    let ratio = 10f64.powf(-snr_db / 10.0);
    let mut rows = Vec::new();
    for &m in m_list {
        let params = GfdmParams::new(m, n)?;
        params.require_fast()?;
        let g = build_prototype_pulse(pulse, &params)?;
        let lb = SpectralDiagonal::from_pulse(&g, &params)?.lambda_bar;
        for kind in EqualizerKind::ALL {
            let kappa = match condition_number(&lb, kind, ratio) {
                Ok(k) => k,
                Err(GfdmError::SingularPulse { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            rows.push(ConditionRow { m, kind, kappa });
        }
    }
    Ok(rows)
}

pub fn condition_csv(rows: &[ConditionRow]) -> String {
    let mut s = String::from("M,kind,kappa\n");
    for r in rows {
        if r.kappa.is_finite() {
            let _ = writeln!(s, "{},{},{:.9e}", r.m, r.kind, r.kappa);
        } else {
            let _ = writeln!(s, "{},{},inf", r.m, r.kind);
        }
    }
    s
}

/// Gnuplot script plotting one or more BER CSV files on a log axis.
pub fn gnuplot_ber_script(csv_files: &[&str], x_label: &str, output_png: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\n");
    let _ = writeln!(s, "set terminal pngcairo size 800,600\nset output '{output_png}'");
    let _ = writeln!(s, "set logscale y\nset grid\nset xlabel '{x_label} (dB)'\nset ylabel 'BER'");
    let plots: Vec<String> = csv_files
        .iter()
        .map(|f| format!("'{f}' every ::1 using 1:($5 > 0 ? $5 : 1/0) with linespoints title '{f}'"))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

/// Gnuplot script for a condition-number CSV, one curve per equalizer kind.
pub fn gnuplot_condition_script(csv_file: &str, output_png: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    let _ = writeln!(s, "set terminal pngcairo size 800,600\nset output '{output_png}'");
    s.push_str("set logscale xy 2\nset grid\nset xlabel 'M'\nset ylabel 'condition number'\n");
    let plots: Vec<String> = EqualizerKind::ALL
        .iter()
        .map(|k| {
            format!("'{csv_file}' every ::1 using 1:(strcol(2) eq '{k}' ? $3 : 1/0) with linespoints title '{k}'")
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
