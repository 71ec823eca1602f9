//! Scheme comparison, noise-dominance classification, single-axis sweeps and
//! resonance optimisation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cantilever::{
    min_alpha_cantilever, noise_budget, snr_cantilever, thermal_limit_margin, MinAlphaMode,
    NoiseBudget,
};
use crate::electronic::{min_alpha_electronic, snr_electronic};
use crate::error::{Error, Result};
use crate::model::{validate_scenario, Scenario};
use crate::params;

/// Commonly quoted RIN level above which laser noise is said to dominate for
/// the 4 K, Q = 2×10⁵ worked example (Hz^-1/2). Kept for side-by-side
/// reporting against the derived crossover; the two are not reconciled.
pub const REFERENCE_RIN_THRESHOLD: f64 = 1.8e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSource {
    Thermal,
    Shot,
    Rin,
}

impl fmt::Display for NoiseSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseSource::Thermal => "thermal",
            NoiseSource::Shot => "shot",
            NoiseSource::Rin => "rin",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub dominant: NoiseSource,
    /// ξ at which x_N equals max(x_T, x_SN).
    pub xi_crossover_rt_hz: f64,
    /// ξ at which x_N² equals x_T² + x_SN².
    pub xi_crossover_quadrature_rt_hz: f64,
    pub reference_threshold_rt_hz: f64,
    /// Derived crossover divided by the reference threshold.
    pub reference_ratio: f64,
    pub note: String,
}

/// Picks the largest of the three noise amplitudes. Ties resolve towards
/// thermal, then shot.
pub fn classify(b: &NoiseBudget) -> NoiseSource {
    let mut best = (NoiseSource::Thermal, b.x_t_m);
    for cand in [(NoiseSource::Shot, b.x_sn_m), (NoiseSource::Rin, b.x_n_m)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best.0
}

pub fn dominance_analysis(s: &Scenario) -> DominanceReport {
    let b = noise_budget(s);
    let c = &s.cantilever;
    // x_N per unit ξ: (Q/k)·(1+R)/c·P₀·√(ω₀/Q).
    let per_xi = c.quality / c.spring_n_per_m
        * crate::cantilever::radiation_force(s.laser.power_w, c.reflectivity, c.force_enhancement)
        * c.bandwidth().sqrt();
    let crossover = b.x_t_m.max(b.x_sn_m) / per_xi;
    let quadrature = b.x_t_m.hypot(b.x_sn_m) / per_xi;
    let ratio = crossover / REFERENCE_RIN_THRESHOLD;
    DominanceReport {
        dominant: classify(&b),
        xi_crossover_rt_hz: crossover,
        xi_crossover_quadrature_rt_hz: quadrature,
        reference_threshold_rt_hz: REFERENCE_RIN_THRESHOLD,
        reference_ratio: ratio,
        note: format!(
            "derived RIN crossover {crossover:.3e} Hz^-1/2 is {ratio:.3}x the commonly quoted \
             threshold {REFERENCE_RIN_THRESHOLD:.1e} Hz^-1/2; the discrepancy is reported, not reconciled"
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeComparison {
    pub cantilever_rin_only: f64,
    pub electronic_rin_only: f64,
    pub ratio_rin_only: f64,
    pub cantilever_full: f64,
    pub electronic_full: f64,
    pub ratio_full: f64,
}

/// (αL)_cantilever / (αL)_electronic in both modes.
pub fn compare_schemes(s: &Scenario) -> Result<SchemeComparison> {
    let cr = min_alpha_cantilever(s, MinAlphaMode::RinOnly)?;
    let er = min_alpha_electronic(s, MinAlphaMode::RinOnly)?;
    let cf = min_alpha_cantilever(s, MinAlphaMode::Full)?;
    let ef = min_alpha_electronic(s, MinAlphaMode::Full)?;
    Ok(SchemeComparison {
        cantilever_rin_only: cr,
        electronic_rin_only: er,
        ratio_rin_only: cr / er,
        cantilever_full: cf,
        electronic_full: ef,
        ratio_full: cf / ef,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MinAlphaCantileverRinOnly,
    MinAlphaCantileverFull,
    MinAlphaElectronicRinOnly,
    MinAlphaElectronicFull,
    SnrCantilever,
    SnrElectronic,
    XiCrossover,
    /// lhs/rhs of the thermal-limit inequality; below 1 means satisfied.
    ThermalLimitRatio,
    SchemeRatio,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::MinAlphaCantileverRinOnly,
        Metric::MinAlphaCantileverFull,
        Metric::MinAlphaElectronicRinOnly,
        Metric::MinAlphaElectronicFull,
        Metric::SnrCantilever,
        Metric::SnrElectronic,
        Metric::XiCrossover,
        Metric::ThermalLimitRatio,
        Metric::SchemeRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MinAlphaCantileverRinOnly => "min_alpha_cantilever_rin_only",
            Metric::MinAlphaCantileverFull => "min_alpha_cantilever_full",
            Metric::MinAlphaElectronicRinOnly => "min_alpha_electronic_rin_only",
            Metric::MinAlphaElectronicFull => "min_alpha_electronic_full",
            Metric::SnrCantilever => "snr_cantilever",
            Metric::SnrElectronic => "snr_electronic",
            Metric::XiCrossover => "xi_crossover",
            Metric::ThermalLimitRatio => "thermal_limit_ratio",
            Metric::SchemeRatio => "scheme_ratio",
        }
    }

    pub fn evaluate(self, s: &Scenario) -> Result<f64> {
        Ok(match self {
            Metric::MinAlphaCantileverRinOnly => min_alpha_cantilever(s, MinAlphaMode::RinOnly)?,
            Metric::MinAlphaCantileverFull => min_alpha_cantilever(s, MinAlphaMode::Full)?,
            Metric::MinAlphaElectronicRinOnly => min_alpha_electronic(s, MinAlphaMode::RinOnly)?,
            Metric::MinAlphaElectronicFull => min_alpha_electronic(s, MinAlphaMode::Full)?,
            Metric::SnrCantilever => snr_cantilever(s),
            Metric::SnrElectronic => snr_electronic(s, s.absorber.alpha_l_peak)?.0,
            Metric::XiCrossover => dominance_analysis(s).xi_crossover_rt_hz,
            Metric::ThermalLimitRatio => {
                let r = thermal_limit_margin(s)?;
                r.lhs / r.rhs
            }
            Metric::SchemeRatio => compare_schemes(s)?.ratio_rin_only,
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| {
                let known: Vec<_> = Metric::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!("unknown metric '{name}' (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis {
    pub path: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl SweepAxis {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.count < 2 {
            return Err(Error::Config("sweep count must be >= 2".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Config("sweep bounds must be finite with min < max".into()));
        }
        if self.log && !(self.min > 0.0) {
            return Err(Error::Config("log sweep needs min > 0".into()));
        }
        let last = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i == self.count - 1 {
                    self.max
                } else if self.log {
                    let (a, b) = (self.min.ln(), self.max.ln());
                    (a + (b - a) * i as f64 / last).exp()
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub metric_name: String,
    pub metric_values: Vec<f64>,
    pub scenario_fingerprint: String,
}

/// Evaluates `metric` on every grid point. Points run in parallel; the
/// table is always in grid order.
pub fn sweep(s: &Scenario, axis: &SweepAxis, metric: Metric) -> Result<SweepTable> {
    let key = params::resolve(&axis.path)?;
    let grid = axis.grid()?;
    let values = grid
        .par_iter()
        .map(|&x| {
            let mut point = s.clone();
            key.apply(&mut point, x);
            let point = validate_scenario(point).map_err(Error::Validation)?;
            let v = metric.evaluate(&point)?;
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "{} is not finite at {} = {x}",
                    metric.name(),
                    axis.path
                )));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis_name: axis.path.clone(),
        axis_values: grid,
        metric_name: metric.name().to_string(),
        metric_values: values,
        scenario_fingerprint: s.fingerprint(),
    })
}

pub const BRACKET_POINTS: usize = 64;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResonanceOptimum {
    Found { omega_0: f64, min_alpha: f64 },
    /// No scanned resonance satisfies the thermal-limit condition.
    Infeasible,
}

struct Problem<'a> {
    base: &'a Scenario,
    constrained: bool,
}

impl Problem<'_> {
    fn at(&self, omega_0: f64) -> Scenario {
        let mut s = self.base.clone();
        s.cantilever.omega_0 = omega_0;
        s
    }

    fn feasible(&self, omega_0: f64) -> bool {
        !self.constrained
            || thermal_limit_margin(&self.at(omega_0)).is_ok_and(|r| r.satisfied)
    }

    fn objective(&self, omega_0: f64) -> f64 {
        min_alpha_cantilever(&self.at(omega_0), MinAlphaMode::Full).unwrap_or(f64::INFINITY)
    }

    /// Feasible point closest to the boundary between `inside` and `outside`.
    fn boundary(&self, inside: f64, outside: f64) -> f64 {
        let (mut a, mut b) = (inside.ln(), outside.ln());
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if self.feasible(mid.exp()) {
                a = mid;
            } else {
                b = mid;
            }
        }
        a.exp()
    }

    /// Golden-section search over ln ω on [lo, hi]; returns (ω, f).
    fn golden(&self, lo: f64, hi: f64) -> (f64, f64) {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let f = |u: f64| self.objective(u.exp());
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while (b - a).abs() > GOLDEN_TOL {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        // The interior estimate can lose to an end of the bracket when the
        // optimum sits on it.
        [(lo, f(lo.ln())), (hi, f(hi.ln())), ((0.5 * (a + b)).exp(), f(0.5 * (a + b)))]
            .into_iter()
            .fold((lo, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best })
    }
}

/// Minimises the full-mode minimum detectable αL over ω₀ in `bounds`,
/// optionally restricted to resonances satisfying the thermal-limit
/// condition.
///
/// A log-spaced bracketing scan of [`BRACKET_POINTS`] points locates every
/// feasible local minimum; each is refined by golden-section search within
/// its neighbouring grid cells, clipped to the feasibility boundary.
pub fn optimize_resonance(
    s: &Scenario,
    bounds: (f64, f64),
    enforce_thermal_limit: bool,
) -> Result<ResonanceOptimum> {
    let (lo, hi) = bounds;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!(
            "resonance bounds must satisfy 0 < lower < upper, got [{lo}, {hi}]"
        )));
    }
    let p = Problem {
        base: s,
        constrained: enforce_thermal_limit,
    };
    let axis = SweepAxis {
        path: String::new(),
        min: lo,
        max: hi,
        count: BRACKET_POINTS,
        log: true,
    };
    let grid = axis.grid()?;
    let feas: Vec<bool> = grid.iter().map(|&w| p.feasible(w)).collect();
    let vals: Vec<f64> = grid.iter().map(|&w| p.objective(w)).collect();

    let mut best: Option<(f64, f64)> = None;
    for i in (0..grid.len()).filter(|&i| feas[i]) {
        let left_ok = i == 0 || !feas[i - 1] || vals[i] <= vals[i - 1];
        let right_ok = i + 1 == grid.len() || !feas[i + 1] || vals[i] <= vals[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let left = match i {
            0 => grid[0],
            _ if feas[i - 1] => grid[i - 1],
            _ => p.boundary(grid[i], grid[i - 1]),
        };
        let right = match i + 1 {
            n if n == grid.len() => grid[i],
            _ if feas[i + 1] => grid[i + 1],
            _ => p.boundary(grid[i], grid[i + 1]),
        };
        let cand = if left < right {
            p.golden(left, right)
        } else {
            (grid[i], vals[i])
        };
        if best.is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    }

    Ok(match best {
        Some((omega_0, min_alpha)) if min_alpha.is_finite() => {
            ResonanceOptimum::Found { omega_0, min_alpha }
        }
        Some(_) => return Err(Error::Numeric("objective is not finite at the optimum".into())),
        None => ResonanceOptimum::Infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn paper_main_dominance() {
        let r = dominance_analysis(&presets::paper_main());
        assert_eq!(r.dominant, NoiseSource::Rin);
        // (c/((1+R)P₀))·√(4k_B T k/(Qω₀))
        assert!(rel(r.xi_crossover_rt_hz, 8.137e-6) < 1e-3, "{}", r.xi_crossover_rt_hz);
        assert!(r.reference_ratio > 1.0 / 3.0 && r.reference_ratio < 1.0);
        assert!(r.note.contains("not reconciled"));
        assert!(r.xi_crossover_quadrature_rt_hz >= r.xi_crossover_rt_hz);
    }

    #[test]
    fn crossover_balances_amplitudes() {
        let mut s = presets::paper_main();
        let r = dominance_analysis(&s);
        s.laser.broadband_rin_rt_hz = r.xi_crossover_rt_hz;
        let b = noise_budget(&s);
        assert!(rel(b.x_n_m, b.x_t_m.max(b.x_sn_m)) < 1e-12);
    }

    #[test]
    fn shot_dominates_when_alone() {
        let mut s = presets::paper_main();
        s.laser.broadband_rin_rt_hz = 0.0;
        s.cantilever.temperature_k = 1e-12;
        assert_eq!(dominance_analysis(&s).dominant, NoiseSource::Shot);
    }

    #[test]
    fn classification_scale_invariant() {
        let b = noise_budget(&presets::paper_main());
        for k in [1e-20, 1e-3, 7.0, 1e30] {
            let scaled = NoiseBudget {
                x_sig_m: b.x_sig_m,
                x_t_m: b.x_t_m * k,
                x_sn_m: b.x_sn_m * k,
                x_n_m: b.x_n_m * k,
            };
            assert_eq!(classify(&scaled), classify(&b));
        }
    }

    #[test]
    fn paper_scheme_ratio() {
        let c = compare_schemes(&presets::paper_electronic()).unwrap();
        assert!(rel(c.ratio_rin_only, 0.1) < 1e-12);
        assert!(c.ratio_full > c.ratio_rin_only);
    }

    #[test]
    fn matched_schemes_have_unit_ratio() {
        let mut s = presets::paper_main();
        s.detector.stage_noise_figures_db = vec![0.0];
        s.detector.bandwidth_hz = s.cantilever.omega_0 / s.cantilever.quality;
        let c = compare_schemes(&s).unwrap();
        assert!(rel(c.ratio_rin_only, 1.0) < 1e-12);
        s.detector.stage_noise_figures_db = vec![10.0];
        let d = compare_schemes(&s).unwrap();
        assert!(rel(d.ratio_rin_only, c.ratio_rin_only / 10.0) < 1e-12);
    }

    #[test]
    fn ratio_matches_symbolic_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut s = presets::paper_main();
            s.cantilever.omega_0 = 10f64.powf(rng.random_range(4.0..9.0));
            s.cantilever.quality = 10f64.powf(rng.random_range(2.0..7.0));
            s.laser.broadband_rin_rt_hz = 10f64.powf(rng.random_range(-7.0..-3.0));
            s.detector.bandwidth_hz = 10f64.powf(rng.random_range(0.0..4.0));
            s.detector.stage_noise_figures_db = vec![rng.random_range(0.0..20.0)];
            let xi = s.laser.broadband_rin_rt_hz;
            let nf = 10f64.powf(s.detector.stage_noise_figures_db[0] / 10.0);
            let want = xi * (s.cantilever.omega_0 / s.cantilever.quality).sqrt()
                / (xi * nf * s.detector.bandwidth_hz.sqrt());
            let got = compare_schemes(&s).unwrap().ratio_rin_only;
            assert!(rel(got, want) < 1e-12);
        }
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("bogus".parse::<Metric>().is_err());
    }

    #[test]
    fn sweep_scaling_laws() {
        let s = presets::paper_main();
        let axis = SweepAxis {
            path: "cantilever.omega_0_paperHz".into(),
            min: 1e6,
            max: 1e8,
            count: 9,
            log: true,
        };
        let t = sweep(&s, &axis, Metric::MinAlphaCantileverRinOnly).unwrap();
        for (w, v) in t.axis_values.iter().zip(&t.metric_values) {
            assert!(rel(v / w.sqrt(), t.metric_values[0] / 1e3) < 1e-12);
        }
        let axis = SweepAxis {
            path: "cantilever.quality".into(),
            min: 1e3,
            max: 1e6,
            count: 7,
            log: true,
        };
        let t = sweep(&s, &axis, Metric::MinAlphaCantileverRinOnly).unwrap();
        for (q, v) in t.axis_values.iter().zip(&t.metric_values) {
            assert!(rel(v * q.sqrt(), t.metric_values[0] * 1e3_f64.sqrt()) < 1e-12);
        }
    }

    #[test]
    fn two_point_sweep_hits_endpoints() {
        let s = presets::paper_main();
        let axis = SweepAxis {
            path: "laser.power_W".into(),
            min: 1e-5,
            max: 3e-3,
            count: 2,
            log: false,
        };
        let t = sweep(&s, &axis, Metric::SnrCantilever).unwrap();
        assert_eq!(t.axis_values, vec![1e-5, 3e-3]);
        for (p, v) in t.axis_values.iter().zip(&t.metric_values) {
            let mut e = s.clone();
            e.laser.power_w = *p;
            assert_eq!(*v, snr_cantilever(&e));
        }
    }

    #[test]
    fn sweep_errors() {
        let s = presets::paper_main();
        let mut axis = SweepAxis {
            path: "cantilever.colour".into(),
            min: 1.0,
            max: 2.0,
            count: 3,
            log: false,
        };
        assert!(matches!(sweep(&s, &axis, Metric::SnrCantilever), Err(Error::Config(_))));
        axis.path = "cantilever.reflectivity".into();
        axis.count = 1;
        assert!(sweep(&s, &axis, Metric::SnrCantilever).is_err());
        // Grid points outside the invariants are reported as validation errors.
        axis.count = 3;
        axis.max = 2.0;
        assert!(matches!(sweep(&s, &axis, Metric::SnrCantilever), Err(Error::Validation(_))));
    }

    #[test]
    fn sweep_is_bit_reproducible() {
        let s = presets::paper_eq4();
        let axis = SweepAxis {
            path: "cantilever.omega_0_paperHz".into(),
            min: 2e6,
            max: 5e7,
            count: 33,
            log: true,
        };
        let a = sweep(&s, &axis, Metric::ThermalLimitRatio).unwrap();
        let b = sweep(&s, &axis, Metric::ThermalLimitRatio).unwrap();
        assert_eq!(a, b);
        let bits = |t: &SweepTable| t.metric_values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    /// Dense scan oracle: the best feasible point on a fine log grid.
    fn scan_optimum(s: &Scenario, lo: f64, hi: f64, constrained: bool) -> Option<(f64, f64)> {
        let n = 20_000;
        (0..=n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / n as f64).exp())
            .filter(|&w| {
                let mut t = s.clone();
                t.cantilever.omega_0 = w;
                !constrained || thermal_limit_margin(&t).is_ok_and(|r| r.satisfied)
            })
            .map(|w| {
                let mut t = s.clone();
                t.cantilever.omega_0 = w;
                (w, min_alpha_cantilever(&t, MinAlphaMode::Full).unwrap())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    fn found(o: ResonanceOptimum) -> (f64, f64) {
        match o {
            ResonanceOptimum::Found { omega_0, min_alpha } => (omega_0, min_alpha),
            ResonanceOptimum::Infeasible => panic!("infeasible"),
        }
    }

    #[test]
    fn flat_rin_unconstrained_optimum_is_lower_bound() {
        let s = presets::paper_main();
        let (w, _) = found(optimize_resonance(&s, (1e6, 1e8), false).unwrap());
        assert_eq!(w, 1e6);
    }

    #[test]
    fn infeasible_below_resonance_bound() {
        let s = presets::paper_eq4();
        assert_eq!(
            optimize_resonance(&s, (1e6, 4e6), true).unwrap(),
            ResonanceOptimum::Infeasible
        );
    }

    #[test]
    fn lorentzian_peak_optimum_matches_scan() {
        // Without a flat floor the objective keeps falling above the
        // constraint, so the optimum runs to the upper bound.
        let s = presets::paper_eq4();
        let (w, v) = found(optimize_resonance(&s, (1e6, 1e8), true).unwrap());
        let (ws, vs) = scan_optimum(&s, 1e6, 1e8, true).unwrap();
        assert!(v <= vs * (1.0 + 1e-9));
        assert!(rel(w, ws) < 1e-3, "{w} vs {ws}");
        assert!(rel(w, 1e8) < 1e-9);
    }

    #[test]
    fn lorentzian_with_floor_optimum_matches_scan() {
        let mut s = presets::paper_eq4();
        s.laser.broadband_rin_rt_hz = 1.8e-5;
        let (w, v) = found(optimize_resonance(&s, (1e6, 1e8), true).unwrap());
        let (ws, vs) = scan_optimum(&s, 1e6, 1e8, true).unwrap();
        assert!(v <= vs * (1.0 + 1e-9), "{v} vs {vs}");
        assert!(rel(w, ws) < 2e-3, "{w} vs {ws}");
        // Interior optimum above the resonance bound, below 2x of it.
        assert!(w > 5.22e6 && w < 1.1e7, "{w}");
    }

    #[test]
    fn constraint_boundary_optimum() {
        // A strong floor makes the objective rise above the bound, pinning
        // the optimum to the constraint.
        let mut s = presets::paper_eq4();
        s.laser.broadband_rin_rt_hz = 1e-4;
        let (w, _) = found(optimize_resonance(&s, (1e6, 1e8), true).unwrap());
        let bound = match crate::cantilever::min_resonant_frequency(&s).unwrap() {
            crate::cantilever::ResonanceBound::Bounded { omega_0, .. } => omega_0,
            _ => unreachable!(),
        };
        assert!(rel(w, bound) < 1e-6, "{w} vs {bound}");
    }

    #[test]
    fn optimum_is_stationary() {
        let mut s = presets::paper_eq4();
        s.laser.broadband_rin_rt_hz = 1.8e-5;
        let (w, v) = found(optimize_resonance(&s, (1e6, 1e8), true).unwrap());
        for f in [0.999, 1.001] {
            let mut t = s.clone();
            t.cantilever.omega_0 = w * f;
            if thermal_limit_margin(&t).unwrap().satisfied {
                let pv = min_alpha_cantilever(&t, MinAlphaMode::Full).unwrap();
                assert!(pv >= v * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn bad_bounds_rejected() {
        let s = presets::paper_main();
        assert!(optimize_resonance(&s, (1e7, 1e6), true).is_err());
        assert!(optimize_resonance(&s, (0.0, 1e6), true).is_err());
    }
}
