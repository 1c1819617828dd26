//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::f64::consts::{FRAC_PI_4, LN_10, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use xpm_comp::alignment::{adapt_kappa, estimate_delay};
use xpm_comp::channel::{apply_channel, apply_channel_with_phase, conversion_efficiency, gen_common_phase, ChannelParams, PhaseModel, PhaseProcess};
use xpm_comp::cpe::{extract_phase, wrap_quarter, VvConfig};
use xpm_comp::harness::{classify_case, emit, run_sweep, ConstellationCase, Format, SweepGrid, TrialConfig};
use xpm_comp::joint::{compensate_pair, estimate_common_phase, EstimatorConfig};
use xpm_comp::qpsk::{count_errors, demap_symbols, map_symbols, BitStream, SymbolStream};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn estimator_limits() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (zero, huge, inf) = (EstimatorConfig::finite(0.0), EstimatorConfig::finite(1e6), EstimatorConfig::infinite());
    let mut compared = 0;
    for _ in 0..10_000 {
        let p1 = rng.gen_range(-FRAC_PI_4..FRAC_PI_4);
        let p2 = rng.gen_range(-FRAC_PI_4..FRAC_PI_4);
        let mean = estimate_common_phase(p1, p2, &zero).map_err(|e| e.to_string())?.value;
        ensure((mean - (p1 + p2) / 2.0).abs() <= 1e-12, || format!("kappa=0 at ({p1}, {p2}) gave {mean}"))?;
        if (p1.abs() - p2.abs()).abs() > 1e-3 {
            compared += 1;
            let a = estimate_common_phase(p1, p2, &huge).map_err(|e| e.to_string())?.value;
            let b = estimate_common_phase(p1, p2, &inf).map_err(|e| e.to_string())?.value;
            ensure(a == b, || format!("kappa=1e6 gave {a}, border case {b} at ({p1}, {p2})"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("10000 pairs, {compared} border-case comparisons"))
}

fn hand_oracle() -> Check {
    let got = estimate_common_phase(0.2, 0.4, &EstimatorConfig::finite(1.0)).map_err(|e| e.to_string())?.value;
    let (w1, w2) = ((-0.2f64).exp(), (-0.4f64).exp());
    let oracle = (w1 * 0.2 + w2 * 0.4) / (w1 + w2);
    ensure((oracle - 0.29003).abs() < 1e-5, || format!("oracle {oracle}"))?;
    ensure((got - 0.29003).abs() <= 1e-5, || format!("estimate {got}"))?;
    Ok(format!("estimate {got:.6}"))
}

fn random_payload(n: usize, seed: u64) -> BitStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BitStream::new((0..2 * n).map(|_| rng.gen_range(0..2u8)).collect()).unwrap()
}

fn exact_cancellation() -> Check {
    let start = Instant::now();
    let n = 100_000;
    let (b1, b2) = (random_payload(n, 10), random_payload(n, 11));
    let (t1, t2) = (map_symbols(&b1), map_symbols(&b2));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let phase = PhaseProcess { values: (0..n).map(|_| rng.gen_range(-0.78..0.78)).collect() };
    let ch = apply_channel_with_phase(t1.samples(), t2.samples(), phase, &ChannelParams::default()).map_err(|e| e.to_string())?;
    let out = compensate_pair(&ch.rx1, &ch.rx2, &VvConfig::per_symbol(), &EstimatorConfig::infinite()).map_err(|e| e.to_string())?;
    let worst = out
        .out1
        .iter()
        .zip(t1.samples())
        .chain(out.out2.iter().zip(t2.samples()))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    let e1 = count_errors(&b1, &demap_symbols(&out.out1)).map_err(|e| e.to_string())?;
    let e2 = count_errors(&b2, &demap_symbols(&out.out2)).map_err(|e| e.to_string())?;
    ensure(e1.errors + e2.errors == 0, || format!("{} bit errors", e1.errors + e2.errors))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("max deviation {worst:.1e}, BER 0"))
}

fn grid_config() -> (TrialConfig, SweepGrid) {
    let base = TrialConfig {
        n_symbols: 1_000_000,
        channel: ChannelParams { seed: 2024, ..Default::default() },
        vv: VvConfig { window: 1, remove_mean: true },
        estimator: EstimatorConfig::infinite(),
        compare_baseline: true,
        max_lag: 16,
    };
    let grid = SweepGrid { sigma_common: vec![0.2, 0.3, 0.4], sigma_additive: vec![0.12, 0.18], ..Default::default() };
    (base, grid)
}

fn ber_reduction_and_case_ordering() -> (Check, Check) {
    let start = Instant::now();
    let (base, grid) = grid_config();
    let points = run_sweep(&base, &grid, &Default::default());
    let elapsed = start.elapsed();

    let mut reports = Vec::new();
    for p in points {
        match p.result {
            Ok(r) => reports.push(r),
            Err(e) => return (Err(e.clone()), Err(e)),
        }
    }

    let reduction = (|| {
        let mut lines = Vec::new();
        for r in &reports {
            let base = r.uncompensated.ok_or("baseline missing")?;
            let c = r.compensated;
            let label = format!("sc={} sa={}", r.config.channel.sigma_common, r.config.channel.sigma_additive);
            ensure(c.ber < base.ber, || format!("{label}: comp {} >= base {}", c.ber, base.ber))?;
            ensure(c.ci.hi < base.ci.lo, || format!("{label}: intervals overlap {:?} vs {:?}", c.ci, base.ci))?;
            lines.push(format!("{label}: {:.3e}->{:.3e}", base.ber, c.ber));
        }
        within(elapsed, Duration::from_secs(120))?;
        Ok(format!("{} in {elapsed:.1?}", lines.join("; ")))
    })();

    let ordering = (|| {
        let mut checked = 0;
        for r in &reports {
            let base_ber = r.ber_uncompensated.ok_or("baseline missing")?;
            if base_ber < 1e-3 {
                continue;
            }
            checked += 1;
            let h = &r.case_histogram;
            ensure(h.additional_errors < h.correction_successful, || {
                format!(
                    "sc={} sa={}: additional {} >= successful {}",
                    r.config.channel.sigma_common, r.config.channel.sigma_additive, h.additional_errors, h.correction_successful
                )
            })?;
        }
        Ok(format!("{checked} grid points with baseline BER >= 1e-3"))
    })();
    (reduction, ordering)
}

fn classifier_truth_table() -> Check {
    use ConstellationCase::*;
    let start = Instant::now();
    // (rx1 ok, rx2 ok, post1 ok, post2 ok) -> case
    let table = [
        ((true, true, true, true), NoCorrectionRequired),
        ((true, true, true, false), AdditionalErrors),
        ((true, true, false, true), AdditionalErrors),
        ((true, true, false, false), AdditionalErrors),
        ((true, false, true, true), CorrectionSuccessful),
        ((true, false, true, false), NoCorrectionPossible),
        ((true, false, false, true), AdditionalErrors),
        ((true, false, false, false), AdditionalErrors),
        ((false, true, true, true), CorrectionSuccessful),
        ((false, true, true, false), AdditionalErrors),
        ((false, true, false, true), NoCorrectionPossible),
        ((false, true, false, false), AdditionalErrors),
        ((false, false, true, true), CorrectionSuccessful),
        ((false, false, true, false), NoCorrectionPossible),
        ((false, false, false, true), NoCorrectionPossible),
        ((false, false, false, false), NoCorrectionPossible),
    ];
    let mut checked = 0;
    for code in 0..4096u32 {
        let q = |k: u32| ((code >> (2 * k)) & 3) as u8;
        let (tx, rx, post) = ([q(0), q(1)], [q(2), q(3)], [q(4), q(5)]);
        let key = (rx[0] == tx[0], rx[1] == tx[1], post[0] == tx[0], post[1] == tx[1]);
        let expected = table.iter().find(|(k, _)| *k == key).map(|(_, c)| *c).ok_or("pattern missing")?;
        let got = classify_case(tx, rx, post).map_err(|e| e.to_string())?.case;
        ensure(got == expected, || format!("tx {tx:?} rx {rx:?} post {post:?}: {got:?} != {expected:?}"))?;
        checked += 1;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{checked} quadrant triples"))
}

fn viterbi_identity() -> Check {
    let all = SymbolStream::from_quadrants(&[0, 1, 2, 3]).map_err(|e| e.to_string())?;
    for theta in [-0.7, -0.3, 0.0, 0.3, 0.7] {
        let expected = wrap_quarter(theta);
        for q in 0..4usize {
            let s = [all.samples()[q] * Complex64::cis(theta)];
            for window in [1, 33] {
                let got = extract_phase(&s, &VvConfig { window, remove_mean: false }).map_err(|e| e.to_string())?.values[0];
                ensure((got - expected).abs() <= 1e-9, || format!("theta {theta}, quadrant {q}: {got}"))?;
            }
        }
    }
    Ok("5 rotations x 4 symbols".into())
}

fn efficiency_curve_shape() -> Check {
    for alpha_db in [0.2, 0.25] {
        for dbeta in [1e-9, 5e-9] {
            let dc = conversion_efficiency(0.0, alpha_db, dbeta);
            ensure(dc == LN_10 / 10.0 * alpha_db, || format!("eta(0) = {dc} for alpha {alpha_db}"))?;
            let mut prev = dc;
            for i in 1..=1000 {
                let omega = 2.0 * PI * 1e7 * i as f64;
                let up = conversion_efficiency(omega, alpha_db, dbeta);
                let down = conversion_efficiency(-omega, alpha_db, dbeta);
                ensure(up == down, || format!("not even at {omega}"))?;
                ensure(up >= prev, || format!("decreasing at {omega}"))?;
                prev = up;
            }
        }
    }
    Ok("4 parameter sets x 1000 frequencies".into())
}

fn shaped_periodogram() -> Check {
    let start = Instant::now();
    let n = 1usize << 20;
    let params = ChannelParams {
        sigma_common: 0.3,
        phase_model: PhaseModel::Shaped,
        alpha_db: 0.2,
        dbeta: 5e-9,
        cpe_cutoff: 1e6,
        symbol_rate: 32e9,
        seed: 77,
        ..Default::default()
    };
    let trace = gen_common_phase(n, &params).map_err(|e| e.to_string())?.values;

    let mut spectrum: Vec<Complex64> = trace.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let periodogram: Vec<f64> = spectrum.iter().map(|z| z.norm_sqr() / n as f64).collect();

    // Analytic |H(f)|^2: efficiency curve squared times first-order high-pass.
    let alpha_np = LN_10 / 10.0 * params.alpha_db;
    let h2 = |k: usize| {
        let f = if k <= n / 2 { k as f64 } else { n as f64 - k as f64 } * params.symbol_rate / n as f64;
        let w = 2.0 * PI * f;
        (alpha_np * alpha_np + (params.dbeta * w).powi(2)) * f * f / (f * f + params.cpe_cutoff.powi(2))
    };
    let mean_h2 = (0..n).map(h2).sum::<f64>() / n as f64;
    let expected = |k: usize| params.sigma_common.powi(2) * h2(k) / mean_h2;

    let group = 2048;
    let first_bin = (10.0 * params.cpe_cutoff * n as f64 / params.symbol_rate).ceil() as usize;
    let mut worst: f64 = 0.0;
    let mut bands = 0;
    let mut lo = first_bin;
    while lo + group <= n / 2 {
        let measured: f64 = periodogram[lo..lo + group].iter().sum();
        let model: f64 = (lo..lo + group).map(expected).sum();
        let db = 10.0 * (measured / model).log10();
        worst = worst.max(db.abs());
        bands += 1;
        lo += group;
    }
    ensure(worst <= 1.0, || format!("worst band deviation {worst:.2} dB"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("{bands} bands, worst deviation {worst:.3} dB"))
}

fn delay_recovery() -> Check {
    let n = 100_000;
    let (t1, t2) = (map_symbols(&random_payload(n, 20)), map_symbols(&random_payload(n, 21)));
    let vv = VvConfig::per_symbol();
    for d in -7i64..=7 {
        let params = ChannelParams { sigma_common: 0.3, sigma_additive: 0.15, delay_offset: d, seed: (300 + d) as u64, ..Default::default() };
        let ch = apply_channel(&t1, &t2, &params).map_err(|e| e.to_string())?;
        let tr1 = extract_phase(&ch.rx1, &vv).map_err(|e| e.to_string())?;
        let tr2 = extract_phase(&ch.rx2, &vv).map_err(|e| e.to_string())?;
        let found = estimate_delay(&tr1, &tr2, 10).map_err(|e| e.to_string())?;
        ensure(found.lag == d && found.confident, || format!("offset {d}: found {found:?}"))?;
    }
    Ok("offsets -7..=7 recovered".into())
}

fn kappa_adaptation() -> Check {
    let r = adapt_kappa(|k| (k - 2.0).powi(2) + 0.01, 0.0, 10.0, 1e-3).map_err(|e| e.to_string())?;
    ensure((r.kappa_opt - 2.0).abs() <= 1e-3, || format!("kappa_opt {}", r.kappa_opt))?;
    ensure(r.evaluations <= 35, || format!("{} evaluations", r.evaluations))?;
    Ok(format!("kappa_opt {:.5} after {} evaluations", r.kappa_opt, r.evaluations))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let base = TrialConfig {
        n_symbols: 50_000,
        channel: ChannelParams { sigma_common: 0.3, sigma_additive: 0.15, delay_offset: 2, seed: 9, ..Default::default() },
        ..Default::default()
    };
    let grid = SweepGrid { kappa: vec![0.5, 4.0], ..Default::default() };
    let mut outputs = Vec::new();
    for run in 0..2 {
        let reports: Vec<_> = run_sweep(&base, &grid, &Default::default()).into_iter().map(|p| p.result.unwrap()).collect();
        for format in [Format::Csv, Format::Json] {
            let path = dir.path().join(format!("run{run}.{format:?}"));
            emit(&reports, format, &path).map_err(|e| e.to_string())?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
    }
    ensure(outputs[0] == outputs[2], || "CSV differs between runs".into())?;
    ensure(outputs[1] == outputs[3], || "JSON differs between runs".into())?;

    let bin = env!("CARGO_BIN_EXE_xpm-comp");
    let cfg = dir.path().join("trial.json");
    std::fs::write(&cfg, serde_json::to_string(&base).unwrap()).map_err(|e| e.to_string())?;
    let mut cli = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("cli{run}.csv"));
        let status = std::process::Command::new(bin)
            .args(["trial", "--config"])
            .arg(&cfg)
            .args(["--format", "csv", "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("CLI exited with {status}"))?;
        cli.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(cli[0] == cli[1], || "CLI CSV differs between runs".into())?;
    Ok(format!("{} + {} bytes identical, CLI output identical", outputs[0].len(), outputs[1].len()))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let (reduction, ordering) = ber_reduction_and_case_ordering();
    let results: Vec<(&str, Check)> = vec![
        ("estimator limits", estimator_limits()),
        ("hand-oracle weighting", hand_oracle()),
        ("exact cancellation", exact_cancellation()),
        ("BER reduction over grid", reduction),
        ("case-frequency ordering", ordering),
        ("four-case classifier", classifier_truth_table()),
        ("Viterbi & Viterbi identity", viterbi_identity()),
        ("efficiency curve", efficiency_curve_shape()),
        ("shaped phase periodogram", shaped_periodogram()),
        ("delay recovery", delay_recovery()),
        ("kappa adaptation", kappa_adaptation()),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("AC{:<2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
