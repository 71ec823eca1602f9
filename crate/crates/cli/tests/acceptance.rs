//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, then fails if any criterion failed.
//!
//! Run with `cargo test -p fms-cantilever-cli --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::Value;

use fms_cantilever::analysis::dominance_analysis;
use fms_cantilever::cantilever::{
    min_resonant_frequency, noise_budget, snr_cantilever, thermal_force_sensitivity,
    ResonanceBound,
};
use fms_cantilever::cantilever::Channels;
use fms_cantilever::model::to_angular;
use fms_cantilever::optics::beat_signal;
use fms_cantilever::presets;
use fms_cantilever::sim::{
    equipartition_variance, lock_in_demodulate, run_experiment, welch_psd, SimConfig, Trajectory,
};

// Pinned tolerances.
const C1_TARGET: f64 = 1.8e-4;
const C1_REL: f64 = 1e-3;
const C2_ELECTRONIC: f64 = 1.8e-3;
const C2_RATIO: f64 = 0.100;
const C2_REL: f64 = 1e-3;
const C3_MU: f64 = 5.0;
const C3_MU_ABS: f64 = 0.1;
const C3_OMEGA: f64 = 5.3e6;
const C3_OMEGA_REL: f64 = 0.02;
const C4_XI: f64 = 8.1e-6;
const C4_REL: f64 = 0.01;
const C4_REFERENCE: f64 = 1.8e-5;
const C4_ENVELOPE: f64 = 3.0;
const C5_TARGET: f64 = 1.1e-16;
const C5_REL: f64 = 0.05;
const C6_CASES: u32 = 100;
const C7_CASES: u32 = 1000;
const C7_REL: f64 = 1e-12;
const C8_TRIALS: usize = 50;
const C8_VARIANCE_REL: f64 = 0.05;
const C8_AMPLITUDE_REL: f64 = 0.01;
const C8_SNR_REL: f64 = 0.10;
const C9_LOCKIN_REL: f64 = 5e-3;
const C9_PARSEVAL_REL: f64 = 0.01;
const FAST: Duration = Duration::from_secs(1);
const C8_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn fmsc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fmsc"))
        .args(args)
        .output()
        .expect("run fmsc");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn fmsc_json(args: &[&str]) -> Result<Value, String> {
    let (code, out, err) = fmsc(args);
    if code != 0 {
        return Err(format!("fmsc {} exited {code}: {err}", args.join(" ")));
    }
    serde_json::from_str(&out).map_err(|e| e.to_string())
}

fn result(v: &Value, name: &str) -> Result<f64, String> {
    v["results"][name]["value"]
        .as_f64()
        .ok_or_else(|| format!("missing result {name}"))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    let within = dt < limit;
    match r {
        Ok(d) if within => Ok(format!("{d}; {:.0} ms", dt.as_secs_f64() * 1e3)),
        Ok(d) => Err(format!("{d}; took {:.2} s, limit {:.0} s", dt.as_secs_f64(), limit.as_secs_f64())),
        Err(d) => Err(format!("{d}; {:.0} ms", dt.as_secs_f64() * 1e3)),
    }
}

fn c1() -> Outcome {
    timed(FAST, || {
        let v = fmsc_json(&["min-alpha", "--preset", "paper-main", "--mode", "rin_only"])?;
        let a = result(&v, "alpha_L_cantilever_rin_only")?;
        check(
            rel(a, C1_TARGET) < C1_REL,
            format!("cantilever (αL)min = {a:.6e}, target {C1_TARGET:e} ±{C1_REL:e} rel"),
        )
    })
}

fn c2() -> Outcome {
    timed(FAST, || {
        let v = fmsc_json(&[
            "compare",
            "--preset",
            "paper-main",
            "--preset-electronic",
            "paper-electronic",
        ])?;
        let e = result(&v, "alpha_L_electronic_rin_only")?;
        let ratio = result(&v, "ratio_rin_only")?;
        check(
            rel(e, C2_ELECTRONIC) < C2_REL && rel(ratio, C2_RATIO) < C2_REL,
            format!("electronic (αL)min = {e:.6e}, ratio = {ratio:.6}"),
        )
    })
}

fn c3() -> Outcome {
    timed(FAST, || match min_resonant_frequency(&presets::paper_eq4()) {
        Ok(ResonanceBound::Bounded { mu, omega_0 }) => check(
            (mu - C3_MU).abs() <= C3_MU_ABS && rel(omega_0, C3_OMEGA) <= C3_OMEGA_REL,
            format!("mu* = {mu:.4}, omega_0 = {omega_0:.5e}"),
        ),
        other => Err(format!("unexpected {other:?}")),
    })
}

fn c4() -> Outcome {
    let d = dominance_analysis(&presets::paper_main());
    let xi = d.xi_crossover_rt_hz;
    let ratio = xi / C4_REFERENCE;
    let v = fmsc_json(&["budget", "--preset", "paper-main"])?;
    let note = v["results"]["xi_crossover_reference_ratio"]["note"]
        .as_str()
        .unwrap_or("");
    let cli_xi = result(&v, "xi_crossover_rtHz")?;
    check(
        rel(xi, C4_XI) < C4_REL
            && (1.0 / C4_ENVELOPE..=C4_ENVELOPE).contains(&ratio)
            && note.contains("not reconciled")
            && d.note.contains("not reconciled")
            && cli_xi == xi,
        format!("xi* = {xi:.4e}, ratio to {C4_REFERENCE:e} = {ratio:.3}, note present: {}", !note.is_empty()),
    )
}

fn c5() -> Outcome {
    timed(FAST, || {
        let f = thermal_force_sensitivity(&presets::yang2002().cantilever);
        check(
            rel(f, C5_TARGET) < C5_REL,
            format!("F_T = {f:.4e} N/rtHz, target {C5_TARGET:e} ±5%"),
        )
    })
}

fn c6() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: C6_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        1e-3f64..1e3,  // gamma_a
        1e-2f64..1e2,  // omega_mod / gamma_a
        0.0f64..0.5,   // index
        1e-6f64..1.0,  // alpha_L for the symmetric case
        -1e2f64..1e2,  // detuning / gamma_a for the αL = 0 case
    );
    runner
        .run(&strategy, |(g, w, m, al, det)| {
            let mut s = presets::paper_main();
            s.absorber.gamma_a = g;
            s.modulation.omega_mod = w * g;
            s.modulation.index = m;

            s.absorber.alpha_l_peak = 0.0;
            s.absorber.carrier_detuning = det * g;
            let b = beat_signal(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(b.inphase_w == 0.0 && b.quadrature_w == 0.0);

            s.absorber.alpha_l_peak = al;
            s.absorber.carrier_detuning = 0.0;
            let b = beat_signal(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(b.inphase_w == 0.0, "inphase {}", b.inphase_w);
            Ok(())
        })
        .map(|_| format!("{C6_CASES} random scenarios: exact nulls"))
        .map_err(|e| e.to_string())
}

fn c7() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: C7_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        (1e-8f64..1e-1, 0.0f64..1e-3, 1e-6f64..1e-2, 1e-3f64..1e3),
        (1e-2f64..1e8, 1e3f64..1e9, 0.0f64..1.0, 1e-2f64..1e3),
        (1.0f64..1e3, 2e-7f64..2e-6),
    );
    let worst = std::cell::Cell::new(0.0f64);
    runner
        .run(&strategy, |((p, xi, al, k), (q, w0, r, t), (enh, lambda))| {
            let mut s = presets::paper_main();
            s.laser.power_w = p;
            s.laser.broadband_rin_rt_hz = xi;
            s.laser.wavelength_m = lambda;
            s.absorber.alpha_l_peak = al;
            s.cantilever.spring_n_per_m = k;
            s.cantilever.quality = q;
            s.cantilever.omega_0 = w0;
            s.cantilever.reflectivity = r;
            s.cantilever.temperature_k = t;
            s.cantilever.force_enhancement = enh;
            let composed = noise_budget(&s).snr();
            let direct = snr_cantilever(&s);
            let e = rel(composed, direct);
            worst.set(worst.get().max(e));
            prop_assert!(e <= C7_REL, "{composed} vs {direct}");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{C7_CASES} random scenarios, worst relative gap {:.2e}", worst.get()))
}

fn c8() -> Outcome {
    timed(C8_BUDGET, || {
        let s = presets::desk_scaled();
        let w = to_angular(s.cantilever.omega_0);
        if (w - 1e5).abs() > 1e-6 || s.cantilever.quality != 500.0 {
            return Err("desk preset is not at w0 = 1e5 rad/s, Q = 500".into());
        }
        let cfg = SimConfig::for_scenario(&s).with_seed(2024);
        let r = run_experiment(&s, &cfg, C8_TRIALS).map_err(|e| e.to_string())?;

        let var = r.thermal_variance_m2.ok_or("no thermal run")?.value;
        let kt = equipartition_variance(&s.cantilever);
        let a_ok = rel(var, kt) < C8_VARIANCE_REL;

        let quiet = cfg.with_channels(Channels {
            thermal: false,
            shot: false,
            rin: false,
        });
        let clean = run_experiment(&s, &quiet, 1).map_err(|e| e.to_string())?;
        let f0 = fms_cantilever::cantilever::radiation_force(
            beat_signal(&s).map_err(|e| e.to_string())?.amplitude_w(),
            s.cantilever.reflectivity,
            s.cantilever.force_enhancement,
        );
        let qf_k = s.cantilever.quality * f0 / s.cantilever.spring_n_per_m;
        let b_ok = rel(clean.signal_m.value, qf_k) < C8_AMPLITUDE_REL;

        let snr = r.snr.ok_or("no snr")?.value;
        let target = r.analytic_snr.ok_or("no analytic snr")?;
        let c_ok = rel(snr, target) < C8_SNR_REL;
        check(
            a_ok && b_ok && c_ok,
            format!(
                "(a) var/(kT/k) = {:.4}; (b) amp/(QF0/k) = {:.5}; (c) SNR {snr:.3} vs analytic {target:.3} ({:+.1}%), {C8_TRIALS} trials",
                var / kt,
                clean.signal_m.value / qf_k,
                100.0 * (snr / target - 1.0)
            ),
        )
    })
}

fn c9() -> Outcome {
    let w = 2.0 * PI * 1e4;
    let period = 2.0 * PI / w;
    let dt = period / 40.0;
    let tau = 10.0 * period;
    let amp = 2.7e-9;
    let n = ((5.0 * tau + 50.0 * period) / dt) as usize;
    let traj = Trajectory {
        dt_s: dt,
        samples: (0..n).map(|i| amp * (w * i as f64 * dt - 0.7).cos()).collect(),
        scenario_fingerprint: None,
        seed: None,
    };
    let got = lock_in_demodulate(&traj, w, tau).map_err(|e| e.to_string())?.amplitude();
    let lock_ok = rel(got, amp) < C9_LOCKIN_REL;

    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let r = fms_cantilever::model::RinSpectrum {
            xi_peak_rt_hz: 1e-3,
            omega_l: 2e3 + 500.0 * seed as f64,
            gamma: 300.0,
        };
        let x = fms_cantilever::sim::colored_noise_series(&r, 1.0, 1e-5, 1 << 17, seed);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        let psd = welch_psd(&x, 1e-5, 2048, 0.5).map_err(|e| e.to_string())?;
        worst = worst.max(rel(psd.total_power(), var));
    }
    check(
        lock_ok && worst < C9_PARSEVAL_REL,
        format!("lock-in amplitude ratio {:.5}; worst Parseval gap {:.2e}", got / amp, worst),
    )
}

fn c10() -> Outcome {
    let sim = [
        "simulate", "--preset", "desk-scaled", "--seed", "7", "--trials", "4", "--set",
        "sim.duration_s=0.3",
    ];
    let (c1, a, e1) = fmsc(&sim);
    let (c2, b, _) = fmsc(&sim);
    if c1 != 0 || c2 != 0 {
        return Err(format!("simulate failed: {e1}"));
    }
    let sw = [
        "sweep", "--preset", "paper-main", "--param", "cantilever.quality", "--min", "1e4",
        "--max", "1e6", "--count", "33", "--log", "--metric", "min_alpha_cantilever_full",
    ];
    let (_, s1, _) = fmsc(&sw);
    let (_, s2, _) = fmsc(&sw);
    let (_, s3, _) = fmsc(&[&sw[..], &["--format", "csv"]].concat());
    let (_, s4, _) = fmsc(&[&sw[..], &["--format", "csv"]].concat());
    check(
        a == b && !a.is_empty() && s1 == s2 && s3 == s4 && !s3.is_empty(),
        format!(
            "simulate payloads identical: {}; sweep JSON/CSV identical: {}",
            a == b,
            s1 == s2 && s3 == s4
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 cantilever min-alpha (rin_only)", c1),
        ("2 electronic min-alpha and scheme ratio", c2),
        ("3 thermal-limit resonance bound", c3),
        ("4 RIN-dominance crossover", c4),
        ("5 force sensitivity (yang2002)", c5),
        ("6 FM-to-AM nulls", c6),
        ("7 analytic self-consistency", c7),
        ("8 Monte-Carlo oracle", c8),
        ("9 lock-in and Welch instruments", c9),
        ("10 determinism", c10),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                println!("FAIL  {name}: {d}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
