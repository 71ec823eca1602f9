//! `fmsc`: command-line front end for the fms-cantilever toolkit.
//!
//! Exit codes: 0 success, 2 usage/configuration/validation error,
//! 3 numeric failure.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fms_cantilever::analysis::{
    compare_schemes, dominance_analysis, optimize_resonance, sweep, Metric, ResonanceOptimum,
    SweepAxis,
};
use fms_cantilever::cantilever::{
    min_alpha_cantilever, noise_budget_with, snr_cantilever, thermal_limit_margin,
    min_resonant_frequency, thermal_force_sensitivity, BudgetOptions, MinAlphaMode,
    ResonanceBound, SignalMode, ThermalMode,
};
use fms_cantilever::electronic::min_alpha_electronic;
use fms_cantilever::presets::{self, PRESETS};
use fms_cantilever::sim::{equipartition_variance, run_experiment, Estimate};

use config::{load_config, Loaded};
use report::{Provenance, RunReport, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<fms_cantilever::Error> for CliError {
    fn from(e: fms_cantilever::Error) -> Self {
        match e {
            fms_cantilever::Error::Validation(v) => {
                CliError::Config(v.iter().map(|x| x.to_string()).collect())
            }
            e if e.is_config_class() => CliError::Config(vec![e.to_string()]),
            e => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fmsc", version, about = "FM spectroscopy with cantilever detection: noise budgets and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Vibrational noise budget, SNR and dominant noise source.
    Budget {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SignalArg::Paper)]
        signal_mode: SignalArg,
        #[arg(long, value_enum, default_value_t = ThermalArg::Paper)]
        thermal_mode: ThermalArg,
    },
    /// Minimum detectable absorbance for both detection schemes.
    MinAlpha {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Cantilever / electronic minimum-αL ratio.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Take the detector section from this preset.
        #[arg(long, value_name = "NAME")]
        preset_electronic: Option<String>,
    },
    /// Thermal-limit condition for a Lorentzian RIN peak and the minimum resonance.
    ThermalLimit {
        #[command(flatten)]
        common: Common,
        /// Also minimise the full-mode αL over ω₀ in LO:HI (paper units).
        #[arg(long, value_name = "LO:HI")]
        optimize: Option<String>,
    },
    /// Evaluate a metric over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter path, e.g. cantilever.quality or laser.power_W.
        #[arg(long)]
        param: String,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        log: bool,
        #[arg(long, default_value = "snr_cantilever")]
        metric: String,
    },
    /// Monte-Carlo time-domain experiment.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// List built-in presets.
    Presets {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// KEY=VALUE, applied after preset and config; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    #[value(name = "rin_only")]
    RinOnly,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignalArg {
    Paper,
    Chain,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ThermalArg {
    Paper,
    Equipartition,
}

impl Common {
    fn load(&self) -> Result<Loaded, CliError> {
        load_config(self.preset.as_deref(), self.config.as_deref(), &self.set)
    }
}

fn provenance(l: &Loaded, seed: Option<u64>) -> Provenance {
    Provenance {
        preset: l.preset.clone(),
        config: l.config_path.as_ref().map(|p| p.display().to_string()),
        seed,
        trials: None,
    }
}

fn mode_name(m: MinAlphaMode) -> &'static str {
    match m {
        MinAlphaMode::RinOnly => "rin_only",
        MinAlphaMode::Full => "full",
    }
}

fn modes(sel: Option<ModeArg>) -> Vec<MinAlphaMode> {
    match sel {
        Some(ModeArg::RinOnly) => vec![MinAlphaMode::RinOnly],
        Some(ModeArg::Full) => vec![MinAlphaMode::Full],
        None => vec![MinAlphaMode::RinOnly, MinAlphaMode::Full],
    }
}

fn cmd_budget(c: &Common, signal: SignalArg, thermal: ThermalArg) -> Result<RunReport, CliError> {
    let l = c.load()?;
    let s = &l.scenario;
    let opts = BudgetOptions {
        signal: match signal {
            SignalArg::Paper => SignalMode::Paper,
            SignalArg::Chain => SignalMode::Chain,
        },
        thermal: match thermal {
            ThermalArg::Paper => ThermalMode::Paper,
            ThermalArg::Equipartition => ThermalMode::Equipartition,
        },
        ..Default::default()
    };
    let b = noise_budget_with(s, &opts)?;
    let d = dominance_analysis(s);
    let mut r = RunReport::new("budget", Some(s), provenance(&l, None));
    let res = &mut r.results;
    res.push("x_sig_m", b.x_sig_m, "m")
        .push("x_T_m", b.x_t_m, "m")
        .push("x_SN_m", b.x_sn_m, "m")
        .push("x_N_m", b.x_n_m, "m")
        .push("snr", b.snr(), "1");
    if matches!(opts.signal, SignalMode::Paper) && matches!(opts.thermal, ThermalMode::Paper) {
        res.push("snr_closed_form", snr_cantilever(s), "1");
    }
    let dominant = fms_cantilever::analysis::classify(&b);
    let amp = match dominant {
        fms_cantilever::analysis::NoiseSource::Thermal => b.x_t_m,
        fms_cantilever::analysis::NoiseSource::Shot => b.x_sn_m,
        fms_cantilever::analysis::NoiseSource::Rin => b.x_n_m,
    };
    res.push_note(
        "dominant_noise_fraction",
        amp * amp / b.noise_sq(),
        "1",
        format!("dominant source: {dominant}"),
    );
    res.push("xi_crossover_rtHz", d.xi_crossover_rt_hz, "Hz^-1/2")
        .push("xi_crossover_quadrature_rtHz", d.xi_crossover_quadrature_rt_hz, "Hz^-1/2")
        .push("xi_reference_threshold_rtHz", d.reference_threshold_rt_hz, "Hz^-1/2");
    res.push_note("xi_crossover_reference_ratio", d.reference_ratio, "1", d.note);
    res.push(
        "thermal_force_sensitivity_N_per_rtHz",
        thermal_force_sensitivity(&s.cantilever),
        "N Hz^-1/2",
    );
    Ok(r)
}

fn cmd_min_alpha(c: &Common, mode: Option<ModeArg>) -> Result<RunReport, CliError> {
    let l = c.load()?;
    let s = &l.scenario;
    let mut r = RunReport::new("min-alpha", Some(s), provenance(&l, None));
    for m in modes(mode) {
        let name = mode_name(m);
        r.results
            .push(format!("alpha_L_cantilever_{name}"), min_alpha_cantilever(s, m)?, "1")
            .push(format!("alpha_L_electronic_{name}"), min_alpha_electronic(s, m)?, "1");
    }
    Ok(r)
}

fn cmd_compare(c: &Common, electronic: Option<&str>) -> Result<RunReport, CliError> {
    let mut l = c.load()?;
    if let Some(name) = electronic {
        let e = presets::lookup(name)
            .ok_or_else(|| CliError::Config(vec![format!("unknown preset '{name}'")]))?;
        l.scenario.detector = (e.build)().detector;
    }
    let s = &l.scenario;
    let cmp = compare_schemes(s)?;
    let mut r = RunReport::new("compare", Some(s), provenance(&l, None));
    r.results
        .push("alpha_L_cantilever_rin_only", cmp.cantilever_rin_only, "1")
        .push("alpha_L_electronic_rin_only", cmp.electronic_rin_only, "1")
        .push("ratio_rin_only", cmp.ratio_rin_only, "1")
        .push("alpha_L_cantilever_full", cmp.cantilever_full, "1")
        .push("alpha_L_electronic_full", cmp.electronic_full, "1")
        .push("ratio_full", cmp.ratio_full, "1");
    Ok(r)
}

fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(vec![format!("--optimize expects LO:HI, got '{text}'")]);
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_thermal_limit(c: &Common, optimize: Option<&str>) -> Result<RunReport, CliError> {
    let l = c.load()?;
    let s = &l.scenario;
    let t = thermal_limit_margin(s)?;
    let mut r = RunReport::new("thermal-limit", Some(s), provenance(&l, None));
    r.results
        .push("mu", t.mu, "1")
        .push("lhs_rtHz", t.lhs, "Hz^-1/2")
        .push("rhs_rtHz", t.rhs, "Hz^-1/2")
        .push("satisfied", f64::from(u8::from(t.satisfied)), "bool");
    match min_resonant_frequency(s)? {
        ResonanceBound::Bounded { mu, omega_0 } => {
            r.results
                .push("mu_min", mu, "1")
                .push("omega_0_min_paperHz", omega_0, "s^-1");
        }
        ResonanceBound::Unconstrained => {
            r.results.push_note(
                "mu_min",
                0.0,
                "1",
                "unconstrained: the RIN peak never exceeds the thermal floor".into(),
            );
        }
    }
    if let Some(text) = optimize {
        match optimize_resonance(s, parse_range(text)?, true)? {
            ResonanceOptimum::Found { omega_0, min_alpha } => {
                r.results
                    .push("omega_0_optimum_paperHz", omega_0, "s^-1")
                    .push("alpha_L_cantilever_full_at_optimum", min_alpha, "1");
            }
            ResonanceOptimum::Infeasible => {
                return Err(CliError::Numeric(
                    "no resonance in the range satisfies the thermal-limit condition".into(),
                ))
            }
        }
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    c: &Common,
    param: &str,
    min: f64,
    max: f64,
    count: usize,
    log: bool,
    metric: &str,
) -> Result<RunReport, CliError> {
    let l = c.load()?;
    let s = &l.scenario;
    let metric = Metric::from_str(metric)?;
    let axis = SweepAxis {
        path: param.to_string(),
        min,
        max,
        count,
        log,
    };
    let t = sweep(s, &axis, metric)?;
    let mut r = RunReport::new("sweep", Some(s), provenance(&l, None));
    let (imin, vmin) = t
        .metric_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, v)| if v < b.1 { (i, v) } else { b });
    let vmax = t.metric_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    r.results
        .push("points", t.axis_values.len() as f64, "1")
        .push(format!("{}_min", t.metric_name), vmin, "")
        .push(format!("{}_max", t.metric_name), vmax, "")
        .push(format!("{}_at_min", t.axis_name), t.axis_values[imin], "");
    r.table = Some(Table {
        columns: vec![t.axis_name.clone(), t.metric_name.clone()],
        rows: t
            .axis_values
            .iter()
            .zip(&t.metric_values)
            .map(|(a, v)| vec![*a, *v])
            .collect(),
    });
    Ok(r)
}

fn push_estimate(r: &mut report::Results, name: &str, e: Estimate, units: &str) {
    r.push(name, e.value, units);
    if let Some(se) = e.std_error {
        r.push(format!("{name}_stderr"), se, units);
    }
}

fn cmd_simulate(c: &Common, seed: u64, trials: usize) -> Result<RunReport, CliError> {
    let l = c.load()?;
    let s = &l.scenario;
    let cfg = l.sim_config().with_seed(seed);
    let res = run_experiment(s, &cfg, trials)?;
    let mut prov = provenance(&l, Some(seed));
    prov.trials = Some(trials);
    let mut r = RunReport::new("simulate", Some(s), prov);
    let out = &mut r.results;
    out.push("sim.dt_s", cfg.dt_s, "s")
        .push("sim.duration_s", cfg.duration_s, "s")
        .push("sim.burn_in_s", cfg.burn_in_s, "s")
        .push("sim.lock_in_time_constant_s", cfg.lock_in_time_constant_s, "s")
        .push("sim.sample_interval_s", cfg.sample_interval_s, "s")
        .push("steps_per_run", cfg.steps() as f64, "1");
    push_estimate(out, "signal_m", res.signal_m, "m");
    for (name, e) in [
        ("noise_thermal_m", res.noise_m.thermal),
        ("noise_shot_m", res.noise_m.shot),
        ("noise_rin_m", res.noise_m.rin),
    ] {
        if let Some(e) = e {
            push_estimate(out, name, e, "m");
        }
    }
    push_estimate(out, "noise_all_on_m", res.noise_all_on_m, "m");
    if let Some(v) = res.thermal_variance_m2 {
        push_estimate(out, "thermal_variance_m2", v, "m^2");
        out.push(
            "equipartition_variance_m2",
            equipartition_variance(&s.cantilever),
            "m^2",
        );
    }
    let a = res.analytic;
    out.push("analytic_x_sig_m", a.x_sig_m, "m")
        .push("analytic_x_T_m", a.x_t_m, "m")
        .push("analytic_x_SN_m", a.x_sn_m, "m")
        .push("analytic_x_N_m", a.x_n_m, "m");
    if let (Some(snr), Some(target)) = (res.snr, res.analytic_snr) {
        push_estimate(out, "snr_measured", snr, "1");
        if let Some(all) = res.snr_all_on {
            push_estimate(out, "snr_all_on", all, "1");
        }
        out.push("snr_analytic", target, "1")
            .push("snr_relative_deviation", snr.value / target - 1.0, "1");
    }
    Ok(r)
}

fn cmd_presets() -> RunReport {
    let mut r = RunReport::new("presets", None, Provenance::default());
    for (i, p) in PRESETS.iter().enumerate() {
        r.results.push_note(p.name, i as f64, "index", p.summary.to_string());
    }
    r
}

fn emit(r: &RunReport, format: Format, output: Option<&PathBuf>) -> Result<(), CliError> {
    r.check_finite()?;
    let text = match format {
        Format::Json => r.to_json(),
        Format::Csv => r.to_csv(),
    };
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Config(vec![format!("{}: {e}", p.display())])),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Config(vec![format!("stdout: {e}")]))
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    let (report, c) = match &cmd {
        Command::Budget {
            common,
            signal_mode,
            thermal_mode,
        } => (cmd_budget(common, *signal_mode, *thermal_mode)?, common),
        Command::MinAlpha { common, mode } => (cmd_min_alpha(common, *mode)?, common),
        Command::Compare {
            common,
            preset_electronic,
        } => (cmd_compare(common, preset_electronic.as_deref())?, common),
        Command::ThermalLimit { common, optimize } => {
            (cmd_thermal_limit(common, optimize.as_deref())?, common)
        }
        Command::Sweep {
            common,
            param,
            min,
            max,
            count,
            log,
            metric,
        } => (cmd_sweep(common, param, *min, *max, *count, *log, metric)?, common),
        Command::Simulate {
            common,
            seed,
            trials,
        } => (cmd_simulate(common, *seed, *trials)?, common),
        Command::Presets { format, output } => {
            return emit(&cmd_presets(), *format, output.as_ref());
        }
    };
    emit(&report, c.format, c.output.as_ref())
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code. Errors go to standard error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            for line in e.to_string().lines() {
                eprintln!("error: {line}");
            }
            e.exit_code()
        }
    }
}
