//! Flat `section.key = value` configuration files and `--set` overrides.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fms_cantilever::params::{self, KEYS, NOISE_FIGURES_KEY};
use fms_cantilever::presets;
use fms_cantilever::sim::SimConfig;
use fms_cantilever::{validate_scenario, Scenario};

use crate::CliError;

/// Simulation keys, accepted in config files and `--set` under `sim.`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimKey {
    Dt,
    Duration,
    BurnIn,
    LockInTimeConstant,
    SampleInterval,
    Thermal,
    Shot,
    Rin,
}

pub const SIM_KEYS: &[(&str, SimKey)] = &[
    ("sim.dt_s", SimKey::Dt),
    ("sim.duration_s", SimKey::Duration),
    ("sim.burn_in_s", SimKey::BurnIn),
    ("sim.lock_in_time_constant_s", SimKey::LockInTimeConstant),
    ("sim.sample_interval_s", SimKey::SampleInterval),
    ("sim.thermal", SimKey::Thermal),
    ("sim.shot", SimKey::Shot),
    ("sim.rin", SimKey::Rin),
];

impl SimKey {
    fn is_flag(self) -> bool {
        matches!(self, SimKey::Thermal | SimKey::Shot | SimKey::Rin)
    }

    pub fn apply(self, cfg: &mut SimConfig, v: f64) {
        match self {
            SimKey::Dt => cfg.dt_s = v,
            SimKey::Duration => cfg.duration_s = v,
            SimKey::BurnIn => cfg.burn_in_s = v,
            SimKey::LockInTimeConstant => cfg.lock_in_time_constant_s = v,
            SimKey::SampleInterval => cfg.sample_interval_s = v,
            SimKey::Thermal => cfg.channels.thermal = v != 0.0,
            SimKey::Shot => cfg.channels.shot = v != 0.0,
            SimKey::Rin => cfg.channels.rin = v != 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    /// `sim.*` assignments in the order given; applied on top of the defaults.
    pub sim: Vec<(SimKey, f64)>,
    pub preset: Option<String>,
    pub config_path: Option<PathBuf>,
}

impl Loaded {
    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = SimConfig::for_scenario(&self.scenario);
        for &(k, v) in &self.sim {
            k.apply(&mut cfg, v);
        }
        cfg
    }
}

struct Assignment {
    origin: String,
    key: String,
    value: String,
}

fn parse_number(raw: &str) -> Result<f64, String> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("value '{raw}' is not finite")),
        Err(_) => Err(format!("cannot parse '{raw}' as a number")),
    }
}

fn parse_list(raw: &str) -> Result<Vec<f64>, String> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',').map(parse_number).collect()
}

fn read_file(path: &Path, out: &mut Vec<Assignment>, errors: &mut Vec<String>) {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            errors.push(format!("{}: {e}", path.display()));
            return;
        }
    };
    for (n, line) in text.lines().enumerate() {
        let origin = format!("{}:{}", path.display(), n + 1);
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match body.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => out.push(Assignment {
                origin,
                key: k.trim().to_string(),
                value: v.trim().to_string(),
            }),
            _ => errors.push(format!("{origin}: expected 'section.key = value', got '{body}'")),
        }
    }
}

/// Resolves preset → config file → `--set` overrides, then validates.
///
/// Every problem found is reported, not just the first. Without a preset the
/// config must assign every scenario key.
pub fn load_config(
    preset: Option<&str>,
    config: Option<&Path>,
    overrides: &[String],
) -> Result<Loaded, CliError> {
    let mut errors = Vec::new();
    let mut scenario = match preset {
        Some(name) => match presets::lookup(name) {
            Some(p) => (p.build)(),
            None => {
                let known: Vec<_> = presets::PRESETS.iter().map(|p| p.name).collect();
                return Err(CliError::Config(vec![format!(
                    "unknown preset '{name}' (known: {})",
                    known.join(", ")
                )]));
            }
        },
        None if config.is_none() => {
            return Err(CliError::Config(vec![
                "no scenario given: use --preset NAME and/or --config PATH".into(),
            ]))
        }
        // Placeholder values; every key must then come from the file.
        None => presets::paper_main(),
    };

    let mut assignments = Vec::new();
    if let Some(path) = config {
        read_file(path, &mut assignments, &mut errors);
    }
    for (i, o) in overrides.iter().enumerate() {
        match o.split_once('=') {
            Some((k, v)) => assignments.push(Assignment {
                origin: format!("--set #{}", i + 1),
                key: k.trim().to_string(),
                value: v.trim().to_string(),
            }),
            None => errors.push(format!("--set '{o}': expected KEY=VALUE")),
        }
    }

    let mut assigned: Vec<&'static str> = Vec::new();
    let mut sim = Vec::new();
    for a in &assignments {
        let fail = |msg: String| format!("{}: {}: {msg}", a.origin, a.key);
        if a.key == NOISE_FIGURES_KEY {
            match parse_list(&a.value) {
                Ok(v) => {
                    scenario.detector.stage_noise_figures_db = v;
                    assigned.push(NOISE_FIGURES_KEY);
                }
                Err(e) => errors.push(fail(e)),
            }
        } else if let Some(&(_, k)) = SIM_KEYS.iter().find(|(n, _)| *n == a.key) {
            match parse_number(&a.value) {
                Ok(v) if k.is_flag() && v != 0.0 && v != 1.0 => {
                    errors.push(fail("channel flags take 0 or 1".into()))
                }
                Ok(v) => sim.push((k, v)),
                Err(e) => errors.push(fail(e)),
            }
        } else {
            match params::resolve(&a.key) {
                Ok(r) => match parse_number(&a.value) {
                    Ok(v) => {
                        r.apply(&mut scenario, v);
                        assigned.push(r.key.name);
                    }
                    Err(e) => errors.push(fail(e)),
                },
                Err(_) => errors.push(format!("{}: unknown key '{}'", a.origin, a.key)),
            }
        }
    }

    if preset.is_none() {
        let required = KEYS
            .iter()
            .filter(|k| k.name != "modulation.source_quality")
            .map(|k| (k.name, params::canonical_name(k)))
            .chain(std::iter::once((NOISE_FIGURES_KEY, NOISE_FIGURES_KEY.to_string())));
        for (name, shown) in required {
            if !assigned.contains(&name) {
                errors.push(format!("missing required key '{shown}'"));
            }
        }
        if !assigned.contains(&"modulation.source_quality") {
            scenario.modulation.source_quality = None;
        }
    }

    if !errors.is_empty() {
        return Err(CliError::Config(errors));
    }
    let scenario = validate_scenario(scenario)
        .map_err(|v| CliError::Config(v.iter().map(|x| x.to_string()).collect()))?
        .into_inner();
    Ok(Loaded {
        scenario,
        sim,
        preset: preset.map(str::to_string),
        config_path: config.map(Path::to_path_buf),
    })
}

/// Writes a complete config file that reloads to a bit-identical scenario.
///
/// `{:e}` prints the shortest digits that round-trip an f64.
pub fn write_config(s: &Scenario) -> String {
    let mut out = String::from("# fmsc scenario\n");
    for (name, v) in params::flatten(s) {
        let _ = writeln!(out, "{name} = {v:e}");
    }
    let nf: Vec<String> = s
        .detector
        .stage_noise_figures_db
        .iter()
        .map(|v| format!("{v:e}"))
        .collect();
    let _ = writeln!(out, "{NOISE_FIGURES_KEY} = {}", nf.join(", "));
    out
}
