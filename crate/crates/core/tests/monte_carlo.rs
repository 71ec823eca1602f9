//! End-to-end Monte-Carlo checks on the desk-scale scenario.

use fms_cantilever::cantilever::Channels;
use fms_cantilever::model::to_angular;
use fms_cantilever::presets;
use fms_cantilever::sim::{equipartition_variance, run_experiment, SimConfig};

const TRIALS: usize = 50;

#[test]
fn measured_snr_matches_angular_budget() {
    let s = presets::desk_scaled();
    let cfg = SimConfig::for_scenario(&s).with_seed(2024);
    let r = run_experiment(&s, &cfg, TRIALS).unwrap();

    let snr = r.snr.unwrap();
    let target = r.analytic_snr.unwrap();
    eprintln!(
        "snr {:.4} ± {:.4}, all-on {:.4}, analytic {:.4}",
        snr.value,
        snr.std_error.unwrap(),
        r.snr_all_on.unwrap().value,
        target
    );
    assert!((snr.value / target - 1.0).abs() < 0.10);

    let a = r.analytic;
    let noise = r.noise_m;
    for (name, got, want) in [
        ("signal", r.signal_m.value, a.x_sig_m),
        ("thermal", noise.thermal.unwrap().value, a.x_t_m),
        ("shot", noise.shot.unwrap().value, a.x_sn_m),
        ("rin", noise.rin.unwrap().value, a.x_n_m),
    ] {
        eprintln!("{name}: {got:e} vs {want:e} ({:+.2}%)", 100.0 * (got / want - 1.0));
        assert!((got / want - 1.0).abs() < 0.05, "{name}");
    }

    // Independent channels: all-on noise ≈ quadrature sum of the single runs.
    let all_on = r.snr_all_on.unwrap().value;
    assert!((all_on / snr.value - 1.0).abs() < 0.15);

    let var = r.thermal_variance_m2.unwrap().value;
    let want = equipartition_variance(&s.cantilever);
    eprintln!("thermal variance ratio {}", var / want);
    assert!((var / want - 1.0).abs() < 0.05);
}

#[test]
fn resonant_amplitude_and_linearity() {
    let s = presets::desk_scaled();
    let quiet = SimConfig::for_scenario(&s).with_channels(Channels {
        thermal: false,
        shot: false,
        rin: false,
    });
    let r = run_experiment(&s, &quiet, 1).unwrap();
    let want = r.analytic.x_sig_m;
    assert!((r.signal_m.value / want - 1.0).abs() < 0.01);

    let mut fine = quiet;
    fine.dt_s /= 2.0;
    let r2 = run_experiment(&s, &fine, 1).unwrap();
    assert!((r2.signal_m.value / r.signal_m.value - 1.0).abs() < 2e-3);

    // Doubling the optical power doubles the drive; noise settings unchanged.
    let mut strong = s.clone();
    strong.laser.power_w *= 2.0;
    let r3 = run_experiment(&strong, &quiet, 1).unwrap();
    assert!((r3.signal_m.value / (2.0 * r.signal_m.value) - 1.0).abs() < 1e-9);

    let ring = 2.0 * s.cantilever.quality / to_angular(s.cantilever.omega_0);
    assert!(quiet.burn_in_s >= 10.0 * ring);
}
