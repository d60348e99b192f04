use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gfdm::channel::complex_gaussian;
use gfdm::config::PRESETS;
use gfdm::flops::{report_csv, report_markdown};
use gfdm::iq::{read_iq, write_iq, IqHeader};
use gfdm::receiver::build_deq;
use gfdm::sim::{ber_csv, condition_csv, gnuplot_ber_script, gnuplot_condition_script};
use gfdm::{
    add_cp, build_modmatrix_direct, build_modmatrix_factored, build_prototype_pulse, complexity_report, dense,
    equalize_fast, modulate_direct, ofdm_baseline, qam_demap, qam_map, run_ber_sweep, run_condition_sweep,
    scheme_flops, ChannelCase, EqualizerKind, FastGfdm, FlopExtras, GfdmError, GfdmParams, PrototypeFilter,
    PulseSpec, Scheme, SimConfig, SpectralDiagonal,
};

/// Environment variable that redirects relative output paths.
const OUT_DIR_ENV: &str = "GFDM_OUT_DIR";

#[derive(Parser)]
#[command(name = "gfdm-sim", version, about = "GFDM modulation, BER sweeps, flop reports and condition numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulate random 16/4/64-QAM blocks to an I/Q file.
    Modulate(ModulateArgs),
    /// Equalize and demap an I/Q file written by `modulate`.
    Demodulate(DemodulateArgs),
    /// Monte Carlo BER sweep.
    Ber(BerArgs),
    /// Closed-form flop counts.
    Flops(FlopsArgs),
    /// Condition numbers of the equalizers over M.
    Condition(ConditionArgs),
    /// Quick consistency checks of the fast path against dense oracles.
    Selftest,
}

#[derive(Args)]
struct PulseArgs {
    /// Pulse: rc:<rolloff>, rect-delta, rect-full or custom.
    #[arg(long, default_value = "rc:0.1")]
    pulse: String,
    /// CSV coefficients (required for `custom`).
    #[arg(long)]
    pulse_file: Option<PathBuf>,
}

#[derive(Args)]
struct ModulateArgs {
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    n_cp: usize,
    #[command(flatten)]
    pulse: PulseArgs,
    #[arg(long, default_value_t = 16)]
    qam_order: usize,
    #[arg(long, default_value_t = 1)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Add white Gaussian noise at this Es/N0 (dB).
    #[arg(long)]
    es_n0_db: Option<f64>,
    /// Use the dense modulation matrix instead of the fast path.
    #[arg(long)]
    direct: bool,
    /// Output file; `.csv` selects CSV, anything else little-endian f64 pairs.
    /// The transmitted bits go to `<out>.bits`.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct DemodulateArgs {
    #[arg(long = "in", short)]
    input: PathBuf,
    /// CSV coefficients when the header names a custom pulse.
    #[arg(long)]
    pulse_file: Option<PathBuf>,
    #[arg(long, default_value = "zf")]
    equalizer: EqualizerKind,
    /// Es/N0 (dB) for the MMSE regularizer.
    #[arg(long, default_value_t = 30.0)]
    es_n0_db: f64,
    /// QAM order when the header does not carry one.
    #[arg(long)]
    qam_order: Option<usize>,
    /// Hard-decision bits as a 0/1 string.
    #[arg(long, short)]
    out: PathBuf,
    /// Equalized soft symbols as `index,re,im` CSV.
    #[arg(long)]
    symbols_out: Option<PathBuf>,
    /// Bits file to count errors against.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct BerArgs {
    /// Key-value config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Named preset used when no config file is given.
    #[arg(long)]
    preset: Option<String>,
    /// Override a config key, e.g. `--set snr_db=10,12`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, short, default_value = "ber.csv")]
    out: PathBuf,
    /// Also run the OFDM baseline into `<out stem>_ofdm.csv`.
    #[arg(long)]
    ofdm: bool,
    /// Append the wall-time column.
    #[arg(long)]
    timing: bool,
    /// Write a gnuplot script next to the CSV.
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct FlopsArgs {
    /// M values: comma list or `lo..hi` for the powers of two in range.
    #[arg(long, default_value = "2..1024")]
    m: String,
    #[arg(long, default_value = "128")]
    n: String,
    /// Schemes (default all).
    #[arg(long, value_delimiter = ',')]
    schemes: Vec<Scheme>,
    /// Receiver channel cases (default all).
    #[arg(long, value_delimiter = ',')]
    channels: Vec<ChannelCase>,
    /// Filter support L (defaults to N).
    #[arg(long)]
    l: Option<u64>,
    #[arg(long, default_value_t = 8)]
    iterations: u64,
    #[arg(long)]
    markdown: bool,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value = "2..1024")]
    m: String,
    #[arg(long, default_value = "rc:0.9")]
    pulse: PulseSpec,
    /// σ_d²/σ_ν² in dB for the MMSE kinds.
    #[arg(long, default_value_t = 30.0)]
    snr_db: f64,
    #[arg(long, short, default_value = "condition.csv")]
    out: PathBuf,
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Modulate(a) => modulate(a),
        Command::Demodulate(a) => demodulate(a),
        Command::Ber(a) => ber(a),
        Command::Flops(a) => flops(a),
        Command::Condition(a) => condition(a),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let name = e.chain().find_map(|c| c.downcast_ref::<GfdmError>()).map_or("Error", GfdmError::name);
            eprintln!("error: {name}: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn write_out(p: &Path, contents: &str) -> anyhow::Result<PathBuf> {
    let path = out_path(p);
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_sizes(s: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().context("range start")?;
        let hi: u64 = hi.trim().parse().context("range end")?;
        if lo == 0 || lo > hi {
            bail!(GfdmError::Parse(format!("bad range '{s}'")));
        }
        let mut v = Vec::new();
        let mut x = lo.next_power_of_two();
        while x <= hi {
            v.push(x);
            x *= 2;
        }
        return Ok(v);
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| GfdmError::Parse(format!("bad size '{t}'")).into()))
        .collect()
}

fn load_pulse(spec: PulseSpec, file: Option<&Path>, params: &GfdmParams) -> anyhow::Result<PrototypeFilter> {
    Ok(match (spec, file) {
        (_, Some(f)) => PrototypeFilter::read_csv(f, params)?,
        (PulseSpec::Custom, None) => bail!(GfdmError::Config("custom pulse needs --pulse-file".into())),
        (spec, None) => build_prototype_pulse(spec, params)?,
    })
}

fn bits_to_string(bits: &[u8]) -> String {
    let mut s: String = bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
    s.push('\n');
    s
}

fn read_bits(path: &Path) -> anyhow::Result<Vec<u8>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(GfdmError::Parse(format!("bad bit '{c}' in {}", path.display())).into()),
        })
        .collect()
}

fn modulate(a: ModulateArgs) -> anyhow::Result<()> {
    let params = GfdmParams::new(a.m, a.n)?.with_cp(a.n_cp);
    let spec: PulseSpec = a.pulse.pulse.parse()?;
    let g = load_pulse(spec, a.pulse.pulse_file.as_deref(), &params)?;
    let k = gfdm::qam::bits_per_symbol(a.qam_order)?;
    let mn = params.mn();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let bits: Vec<u8> = (0..a.blocks * mn * k).map(|_| rng.random_range(0..2u8)).collect();
    let symbols = qam_map(&bits, a.qam_order)?;

    let mut samples = Vec::with_capacity(a.blocks * (params.mn() + a.n_cp));
    if a.direct {
        let am = build_modmatrix_direct(&g, &params)?;
        for d in symbols.chunks(mn) {
            samples.extend(add_cp(&modulate_direct(&am, d)?, a.n_cp)?.samples);
        }
    } else {
        let lb = SpectralDiagonal::from_pulse(&g, &params)?.lambda_bar;
        let fast = FastGfdm::new(&params)?;
        for d in symbols.chunks(mn) {
            let x = gfdm::BasebandSignal::without_cp(fast.modulate(&lb, d)?);
            samples.extend(add_cp(&x, a.n_cp)?.samples);
        }
    }
    if let Some(db) = a.es_n0_db {
        let var = 10f64.powf(-db / 10.0);
        for s in &mut samples {
            *s += complex_gaussian(&mut rng, var);
        }
    }

    let header = IqHeader { m: a.m, n: a.n, n_cp: a.n_cp, pulse: g.spec(), qam_order: Some(a.qam_order), blocks: a.blocks };
    let path = out_path(&a.out);
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_iq(&path, &samples, &header)?;
    let bits_path = write_out(&with_suffix(&a.out, ".bits"), &bits_to_string(&bits))?;
    println!("wrote {} samples to {} and {} bits to {}", samples.len(), path.display(), bits.len(), bits_path.display());
    Ok(())
}

fn demodulate(a: DemodulateArgs) -> anyhow::Result<()> {
    let (samples, header) = read_iq(&a.input)?;
    let header = header.ok_or_else(|| GfdmError::Config(format!("{} has no header", a.input.display())))?;
    let order = a
        .qam_order
        .or(header.qam_order)
        .ok_or_else(|| GfdmError::Config("QAM order missing from header and flags".into()))?;
    let params = GfdmParams::new(header.m, header.n)?.with_cp(header.n_cp);
    let g = load_pulse(header.pulse, a.pulse_file.as_deref(), &params)?;
    let lb = SpectralDiagonal::from_pulse(&g, &params)?.lambda_bar;
    let factors = build_deq(&lb, a.equalizer, 10f64.powf(-a.es_n0_db / 10.0))?;

    let block = header.block_len();
    if samples.len() % block != 0 {
        bail!(GfdmError::Parse(format!("{} samples is not a multiple of the block length {block}", samples.len())));
    }
    let mut soft: Vec<Complex64> = Vec::with_capacity(samples.len() / block * params.mn());
    for chunk in samples.chunks(block) {
        soft.extend(equalize_fast(&chunk[header.n_cp..], &factors, &params)?);
    }
    let bits = qam_demap(&soft, order)?;
    let path = write_out(&a.out, &bits_to_string(&bits))?;
    println!("demodulated {} blocks, {} bits to {}", samples.len() / block, bits.len(), path.display());

    if let Some(p) = &a.symbols_out {
        write_out(p, &gfdm::iq::encode_csv(&soft))?;
    }
    if let Some(r) = &a.reference {
        let reference = read_bits(r)?;
        if reference.len() != bits.len() {
            bail!(GfdmError::Param(format!("reference has {} bits, decoded {}", reference.len(), bits.len())));
        }
        let errors = bits.iter().zip(&reference).filter(|(x, y)| x != y).count();
        println!("bit errors: {errors} of {} (BER {:.6e})", bits.len(), errors as f64 / bits.len() as f64);
    }
    Ok(())
}

fn ber(a: BerArgs) -> anyhow::Result<()> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(_), Some(_)) => bail!(GfdmError::Config("give either --config or --preset".into())),
        (Some(path), None) => SimConfig::load(path)?,
        (None, Some(name)) => SimConfig::preset(name)?,
        (None, None) => bail!(GfdmError::Config(format!("need --config or --preset ({})", PRESETS.join(", ")))),
    };
    for o in &a.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| GfdmError::Parse(format!("override '{o}' is not key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;

    let records = run_ber_sweep(&cfg)?;
    for r in &records {
        println!("{:>6.2} dB  bits {:>10}  errors {:>8}  ber {:.4e}", r.snr_db, r.bits_simulated, r.bit_errors, r.ber);
    }
    let path = write_out(&a.out, &ber_csv(&records, &cfg, a.timing))?;
    let mut csvs = vec![path];
    if a.ofdm {
        let ofdm = ofdm_baseline(&cfg)?;
        let stem = a.out.with_extension("");
        csvs.push(write_out(&with_suffix(&stem, "_ofdm.csv"), &ber_csv(&ofdm, &cfg, a.timing))?);
    }
    if a.plot {
        let names: Vec<String> = csvs.iter().map(|p| p.display().to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let png = csvs[0].with_extension("png");
        let script = gnuplot_ber_script(&refs, cfg.snr_unit.to_string().as_str(), &png.display().to_string());
        write_out(&a.out.with_extension("gp"), &script)?;
    }
    for p in &csvs {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn flops(a: FlopsArgs) -> anyhow::Result<()> {
    let m = parse_sizes(&a.m)?;
    let n = parse_sizes(&a.n)?;
    let schemes = if a.schemes.is_empty() { Scheme::ALL.to_vec() } else { a.schemes };
    let channels = if a.channels.is_empty() { ChannelCase::ALL.to_vec() } else { a.channels };
    let mut pairs = Vec::new();
    for s in schemes {
        if s.is_transmitter() {
            pairs.push((s, None));
        } else {
            pairs.extend(channels.iter().map(|&c| (s, Some(c))));
        }
    }
    let extras = FlopExtras { l: a.l, iterations: a.iterations };
    let rows = complexity_report(&m, &n, &pairs, &extras)?;
    let text = if a.markdown { report_markdown(&rows) } else { report_csv(&rows) };
    match &a.out {
        Some(p) => {
            let path = write_out(p, &text)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn condition(a: ConditionArgs) -> anyhow::Result<()> {
    let m: Vec<usize> = parse_sizes(&a.m)?.into_iter().map(|x| x as usize).collect();
    let rows = run_condition_sweep(a.n, &m, a.pulse, a.snr_db)?;
    let path = write_out(&a.out, &condition_csv(&rows))?;
    if a.plot {
        let script = gnuplot_condition_script(&path.display().to_string(), &path.with_extension("png").display().to_string());
        write_out(&a.out.with_extension("gp"), &script)?;
    }
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn selftest() -> anyhow::Result<()> {
    let mut report = String::new();
    let mut failed = 0;
    let mut check = |name: &str, ok: bool, detail: String| {
        let _ = writeln!(report, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };

    let params = GfdmParams::new(8, 16)?;
    let g = build_prototype_pulse(PulseSpec::RaisedCosine { rolloff: 0.5 }, &params)?;
    let direct = build_modmatrix_direct(&g, &params)?;
    let factored = build_modmatrix_factored(&g, &params)?;
    let err = dense::max_abs_diff(direct.matrix(), factored.matrix());
    check("factorization", err < 1e-10, format!("max |A - A_fact| = {err:.2e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d: Vec<Complex64> = (0..params.mn()).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    let lb = SpectralDiagonal::from_pulse(&g, &params)?.lambda_bar;
    let fast = FastGfdm::new(&params)?;
    let x_fast = fast.modulate(&lb, &d)?;
    let x_dense = modulate_direct(&direct, &d)?.samples;
    let err = x_fast.iter().zip(&x_dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    check("fast modulation", err < 1e-10, format!("max |x_fast - x_direct| = {err:.2e}"));

    let factors = build_deq(&lb, EqualizerKind::Zf, 0.0)?;
    let back = equalize_fast(&x_fast, &factors, &params)?;
    let err = back.iter().zip(&d).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    check("ZF round trip", err < 1e-10, format!("max |d_hat - d| = {err:.2e}"));

    let f = scheme_flops(Scheme::ProposedTx, None, 8, 128, &FlopExtras::default())?;
    check("flop model", f > 0, format!("PROPOSED_TX at M=8, N=128: {f}"));

    print!("{report}");
    if failed > 0 {
        bail!(GfdmError::Unsupported(format!("{failed} self-test check(s) failed")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists_and_ranges() {
        assert_eq!(parse_sizes("2..16").unwrap(), vec![2, 4, 8, 16]);
        assert_eq!(parse_sizes("3..20").unwrap(), vec![4, 8, 16]);
        assert_eq!(parse_sizes("8, 128").unwrap(), vec![8, 128]);
        assert!(parse_sizes("16..2").is_err());
        assert!(parse_sizes("a,b").is_err());
    }

    #[test]
    fn bits_text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.bits");
        fs::write(&p, bits_to_string(&[0, 1, 1, 0])).unwrap();
        assert_eq!(read_bits(&p).unwrap(), vec![0, 1, 1, 0]);
        fs::write(&p, "012").unwrap();
        assert!(read_bits(&p).is_err());
    }

    #[test]
    fn suffix_keeps_extension() {
        assert_eq!(with_suffix(Path::new("a/tx.iq"), ".bits"), PathBuf::from("a/tx.iq.bits"));
    }
}
