//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

use std::time::Instant;

use gfdm::channel::{complex_gaussian, draw_channel, ChannelProfile};
use gfdm::dense::{condition_number_svd, mat_vec, max_abs_diff, relative_error};
use gfdm::flops::{fft_flops, scheme_flops, FlopExtras, Scheme};
use gfdm::receiver::{bias_scalar, build_deq, build_equalizer_direct, fde_equalize, EqualizerKind, FdeKind};
use gfdm::sim::{ber_csv, run_ber_sweep, BerRecord};
use gfdm::transmitter::{add_cp, BasebandSignal};
use gfdm::{
    apply_channel, build_modmatrix_direct, build_modmatrix_factored, build_prototype_pulse, remove_cp, ExecPath,
    FastGfdm, GfdmParams, PrototypeFilter, PulseSpec, SimConfig, SnrUnit, SpectralDiagonal,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rc(alpha: f64) -> PulseSpec {
    PulseSpec::RaisedCosine { rolloff: alpha }
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng, 1.0)).collect()
}

fn random_pulse(rng: &mut ChaCha8Rng, params: &GfdmParams) -> PrototypeFilter {
    PrototypeFilter::from_coefficients(random_vec(rng, params.mn()), params).unwrap()
}

const ORACLE_SIZES: [(usize, usize); 4] = [(2, 2), (4, 8), (8, 4), (16, 16)];
const ORACLE_PULSES: [PulseSpec; 3] = [
    PulseSpec::RaisedCosine { rolloff: 0.1 },
    PulseSpec::RaisedCosine { rolloff: 0.9 },
    PulseSpec::RectTimeDelta,
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (m, n) in ORACLE_SIZES {
        let p = GfdmParams::new(m, n).unwrap();
        for spec in ORACLE_PULSES {
            let g = build_prototype_pulse(spec, &p).unwrap();
            let a = build_modmatrix_direct(&g, &p).unwrap();
            let f = build_modmatrix_factored(&g, &p).unwrap();
            worst = worst.max(max_abs_diff(a.matrix(), f.matrix()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-10 && secs < 10.0,
        format!("max |A_direct - A_factored| = {worst:.2e} (< 1e-10), {secs:.2} s (< 10 s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for (m, n) in ORACLE_SIZES {
        let p = GfdmParams::new(m, n).unwrap();
        for spec in ORACLE_PULSES {
            let g = build_prototype_pulse(spec, &p).unwrap();
            let a = build_modmatrix_direct(&g, &p).unwrap();
            let lb = SpectralDiagonal::from_pulse(&g, &p).unwrap().lambda_bar;
            let fast = FastGfdm::new(&p).unwrap();
            for _ in 0..100 {
                let d = random_vec(&mut rng, p.mn());
                let x = fast.modulate(&lb, &d).unwrap();
                let y = mat_vec(a.matrix(), &d);
                worst = worst.max(relative_error(&x, &y));
            }
        }
    }
    check(worst < 1e-10, format!("max relative error fast vs direct = {worst:.2e} (< 1e-10)"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (m, n) in [(4, 4), (8, 16), (16, 8)] {
        let p = GfdmParams::new(m, n).unwrap();
        let pulses = [
            build_prototype_pulse(rc(0.1), &p).unwrap(),
            build_prototype_pulse(rc(0.9), &p).unwrap(),
            random_pulse(&mut rng, &p),
        ];
        for g in &pulses {
            let lb = SpectralDiagonal::from_pulse(g, &p).unwrap().lambda_bar;
            let a = build_modmatrix_direct(g, &p).unwrap();
            let fast = FastGfdm::new(&p).unwrap();
            for kind in EqualizerKind::ALL {
                for rho in [0.0, 0.1, 1.0] {
                    let f = build_deq(&lb, kind, rho).unwrap();
                    let dense = build_equalizer_direct(&a, kind, rho).unwrap();
                    let y = random_vec(&mut rng, p.mn());
                    let got = fast.equalize(&f.d_eq, f.bias, &y).unwrap();
                    worst = worst.max(relative_error(&got, &mat_vec(&dense, &y)));
                    cases += 1;
                }
            }
        }
    }
    check(worst < 1e-9, format!("{cases} cases, max relative error fast vs dense = {worst:.2e} (< 1e-9)"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut spread, mut gap): (f64, f64) = (0.0, 0.0);
    let p = GfdmParams::new(4, 8).unwrap();
    let mn = p.mn();
    for i in 0..20 {
        let rho = [0.05, 0.3, 1.0, 2.5][i % 4];
        let g = random_pulse(&mut rng, &p);
        let a = build_modmatrix_direct(&g, &p).unwrap();
        let ah = a.matrix().adjoint();
        let gram = &ah * a.matrix();
        let reg = &gram + DMatrix::<Complex64>::identity(mn, mn) * Complex64::new(rho, 0.0);
        let gain = reg.lu().try_inverse().unwrap() * &gram;
        let diag: Vec<Complex64> = gain.diagonal().iter().copied().collect();
        let mean = diag.iter().sum::<Complex64>() / mn as f64;
        spread = spread.max(diag.iter().map(|v| (v - diag[0]).norm()).fold(0.0, f64::max));
        let lambda = SpectralDiagonal::from_pulse(&g, &p).unwrap().lambda;
        gap = gap.max((mean - Complex64::new(bias_scalar(&lambda, rho), 0.0)).norm());
    }
    check(
        spread < 1e-9 && gap < 1e-9,
        format!("20 pulses: diagonal spread {spread:.2e} (< 1e-9), |mean - B| {gap:.2e} (< 1e-9)"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for preset in ["case1", "case2"] {
        let cfg = SimConfig::preset(preset).unwrap();
        let p = cfg.params;
        for alpha in [0.1, 0.9] {
            let g = build_prototype_pulse(rc(alpha), &p).unwrap();
            let lb = SpectralDiagonal::from_pulse(&g, &p).unwrap().lambda_bar;
            let fast = FastGfdm::new(&p).unwrap();
            let zf = build_deq(&lb, EqualizerKind::Zf, 0.0).unwrap();
            let d = gfdm::qam_map(&(0..p.mn() * 4).map(|i| ((i * 31 + i / 7) % 2) as u8).collect::<Vec<_>>(), 16)
                .unwrap();
            let x = BasebandSignal::without_cp(fast.modulate(&lb, &d).unwrap());
            let xcp = add_cp(&x, p.n_cp).unwrap();

            let z = apply_channel(&xcp, &[Complex64::new(1.0, 0.0)], 0.0, &mut rng).unwrap();
            let y = remove_cp(&z, &p, 1).unwrap();
            let awgn = fast.equalize(&zf.d_eq, 1.0, &y).unwrap();
            let e_awgn = awgn.iter().zip(&d).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

            let ch = draw_channel(&ChannelProfile::etu(), cfg.fs_hz, &p, &mut rng).unwrap();
            let z = apply_channel(&xcp, &ch.h, 0.0, &mut rng).unwrap();
            let y = remove_cp(&z, &p, ch.taps).unwrap();
            let y = fde_equalize(&y, &ch.lambda, FdeKind::Zf, 0.0).unwrap();
            let etu = fast.equalize(&zf.d_eq, 1.0, &y).unwrap();
            let e_etu = etu.iter().zip(&d).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(e_awgn).max(e_etu);
            lines.push(format!("{preset} rc:{alpha} awgn {e_awgn:.1e} etu {e_etu:.1e}"));
        }
    }
    check(worst < 1e-8, format!("max symbol error {worst:.2e} (< 1e-8): {}", lines.join("; ")))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let x = FlopExtras::default();
    let mut notes = Vec::new();
    let mut ok = true;
    let exact = fft_flops(16).unwrap() == 92 && fft_flops(2).unwrap() == 4;
    ok &= exact;
    notes.push(format!("fft_flops(16)=92, fft_flops(2)=4: {}", if exact { "ok" } else { "WRONG" }));
    let tx = scheme_flops(Scheme::ProposedTx, None, 8, 128, &x).unwrap();
    ok &= tx == 37440;
    notes.push(format!("PROPOSED_TX(8,128)={tx} (want 37440)"));

    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let grid: Vec<(u64, u64)> = (1..=10)
        .map(|e| (1u64 << e, 16))
        .chain((1..=10).map(|e| (16, 1u64 << e)))
        .collect();
    for &(m, n) in &grid {
        let r = scheme_flops(Scheme::ProposedTx, None, m, n, &x).unwrap() as f64
            / scheme_flops(Scheme::OfdmTx, None, m, n, &x).unwrap() as f64;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let band = lo >= 2.0 && hi <= 10.0;
    ok &= band;
    notes.push(format!("PROPOSED_TX/OFDM_TX over sweeps in [{lo:.2}, {hi:.2}] (want within [2, 10])"));

    let far = scheme_flops(Scheme::FarhangTx, None, 1024, 16, &x).unwrap() as f64
        / scheme_flops(Scheme::ProposedTx, None, 1024, 16, &x).unwrap() as f64;
    ok &= far >= 50.0;
    notes.push(format!("FARHANG_TX/PROPOSED_TX at (1024,16) = {far:.1} (want >= 50)"));

    let repeat = scheme_flops(Scheme::ProposedTx, None, 8, 128, &x).unwrap() == tx;
    ok &= repeat;
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 1.0;
    notes.push(format!("{secs:.4} s (< 1 s)"));
    check(ok, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for (m, n) in [(4, 4), (8, 8), (4, 16), (16, 16), (8, 32)] {
        let p = GfdmParams::new(m, n).unwrap();
        for g in [
            build_prototype_pulse(rc(0.1), &p).unwrap(),
            build_prototype_pulse(rc(0.9), &p).unwrap(),
            random_pulse(&mut rng, &p),
        ] {
            let lb = SpectralDiagonal::from_pulse(&g, &p).unwrap().lambda_bar;
            let a = build_modmatrix_direct(&g, &p).unwrap();
            for kind in EqualizerKind::ALL {
                for rho in [1e-3, 0.1] {
                    let fast = build_deq(&lb, kind, rho).unwrap().condition_number().unwrap();
                    let dense = condition_number_svd(&build_equalizer_direct(&a, kind, rho).unwrap());
                    worst = worst.max((fast / dense - 1.0).abs());
                }
            }
        }
    }
    let ratio = 1e-3;
    let kappa = |m: usize, kind| {
        let p = GfdmParams::new(m, 16).unwrap();
        let g = build_prototype_pulse(rc(0.9), &p).unwrap();
        let lb = SpectralDiagonal::from_pulse(&g, &p).unwrap().lambda_bar;
        build_deq(&lb, kind, ratio).unwrap().condition_number().unwrap()
    };
    let (z4, z64) = (kappa(4, EqualizerKind::Zf), kappa(64, EqualizerKind::Zf));
    let (m256, m1024) = (kappa(256, EqualizerKind::MmseUnbiased), kappa(1024, EqualizerKind::MmseUnbiased));
    let sat = m1024 / m256;
    check(
        worst < 1e-6 && z64 > z4 && sat < 1.1,
        format!(
            "shortcut vs SVD max rel {worst:.2e} (< 1e-6); kappa_ZF(4)={z4:.2}, kappa_ZF(64)={z64:.2}; \
             kappa_MMSE(1024)/kappa_MMSE(256)={sat:.4} (< 1.1)"
        ),
    )
}

fn q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Exact Gray 16-QAM BER in AWGN at unit symbol energy.
fn qam16_ber(eb_n0_db: f64) -> f64 {
    let es_n0 = 4.0 * 10f64.powf(eb_n0_db / 10.0);
    let sigma = (0.5 / es_n0).sqrt();
    let a = 1.0 / 10f64.sqrt();
    (3.0 * q(a / sigma) + 2.0 * q(3.0 * a / sigma) - q(5.0 * a / sigma)) / 4.0
}

fn sweep(cfg: &SimConfig) -> Vec<BerRecord> {
    run_ber_sweep(cfg).expect("sweep runs")
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    // (a) OFDM-equivalent pulse against the closed form
    let mut cfg = SimConfig::preset("case1-awgn").unwrap();
    cfg.pulse = PulseSpec::RectTimeDelta;
    cfg.equalizer = EqualizerKind::Zf;
    cfg.snr_unit = SnrUnit::EbN0;
    cfg.snr_db = vec![8.0, 10.0, 12.0];
    cfg.min_bits = 1_000_000;
    cfg.workers = 4;
    cfg.seed = 81;
    for r in sweep(&cfg) {
        let theory = qam16_ber(r.snr_db);
        let sd = (theory * (1.0 - theory) / r.bits_simulated as f64).sqrt();
        let z = (r.ber - theory) / sd;
        ok &= z.abs() <= 3.0;
        notes.push(format!("(a) {} dB: {:.3e} vs {:.3e} ({z:+.2} sigma)", r.snr_db, r.ber, theory));
    }

    // (b) fast and direct make identical decisions on shared noise
    for preset in ["case1-awgn", "case2-awgn"] {
        for eq in [EqualizerKind::Zf, EqualizerKind::MmseBiased, EqualizerKind::MmseUnbiased] {
            let mut cfg = SimConfig::preset(preset).unwrap();
            cfg.equalizer = eq;
            cfg.snr_db = vec![6.0, 10.0];
            cfg.min_bits = 100_000;
            cfg.workers = 4;
            let fast = sweep(&cfg);
            cfg.path = ExecPath::Direct;
            let direct = sweep(&cfg);
            let same = fast
                .iter()
                .zip(&direct)
                .all(|(a, b)| a.digest == b.digest && a.bit_errors == b.bit_errors);
            ok &= same;
            if !same {
                notes.push(format!("(b) {preset} {eq}: decisions differ"));
            }
        }
    }
    notes.push("(b) fast/direct digests checked".into());

    // (c) bias correction does not hurt
    let mut cfg = SimConfig::preset("case2-awgn").unwrap();
    cfg.pulse = rc(0.9);
    cfg.snr_db = vec![10.0, 14.0];
    cfg.min_bits = 1_000_000;
    cfg.workers = 4;
    cfg.seed = 83;
    cfg.equalizer = EqualizerKind::MmseUnbiased;
    let unbiased = sweep(&cfg);
    cfg.equalizer = EqualizerKind::MmseBiased;
    let biased = sweep(&cfg);
    for (u, b) in unbiased.iter().zip(&biased) {
        let pass = u.ber <= b.ber + b.sigma();
        ok &= pass;
        notes.push(format!("(c) {} dB: unbiased {:.3e} vs biased {:.3e}", u.snr_db, u.ber, b.ber));
    }

    // (d) coded ETU, Case II rc:0.1 at 20 dB
    let mut cfg = SimConfig::preset("case2").unwrap();
    cfg.snr_db = vec![20.0];
    cfg.min_bits = 1_000_000;
    cfg.workers = 4;
    cfg.seed = 84;
    cfg.equalizer = EqualizerKind::MmseUnbiased;
    let mmse = sweep(&cfg)[0].clone();
    cfg.equalizer = EqualizerKind::Zf;
    let zf = sweep(&cfg)[0].clone();
    let pass = zf.bit_errors > 0 && 2.0 * mmse.ber <= zf.ber;
    ok &= pass;
    notes.push(format!(
        "(d) unbiased MMSE {:.3e} vs ZF {:.3e} (ratio {:.2}, need >= 2) over {} bits",
        mmse.ber,
        zf.ber,
        zf.ber / mmse.ber,
        mmse.bits_simulated
    ));
    check(ok, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let mut cfg = SimConfig::preset("case2").unwrap();
    cfg.snr_db = vec![5.0, 10.0];
    cfg.min_bits = 100_000;
    cfg.blocks_per_batch = 4;
    let mut outputs = Vec::new();
    for workers in [1, 4, 8] {
        cfg.workers = workers;
        outputs.push(ber_csv(&sweep(&cfg), &cfg, false));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    check(same, format!("CSV byte-identical across 1, 4, 8 workers: {same}"))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("factorization oracle", criterion_1),
        ("transmitter equivalence", criterion_2),
        ("receiver equivalence", criterion_3),
        ("bias scalar", criterion_4),
        ("perfect reconstruction", criterion_5),
        ("flop model", criterion_6),
        ("condition number", criterion_7),
        ("BER properties", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} [{name}] PASS ({secs:.1} s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} [{name}] FAIL ({secs:.1} s): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
