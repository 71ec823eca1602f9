//! Run reports and their JSON / CSV renderings.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::{Map, Value};

use fms_cantilever::params::{self, NOISE_FIGURES_KEY};
use fms_cantilever::Scenario;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEntry {
    pub value: f64,
    pub units: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Named results in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Results(Vec<(String, ResultEntry)>);

impl Results {
    pub fn push(&mut self, name: impl Into<String>, value: f64, units: &str) -> &mut Self {
        self.0.push((
            name.into(),
            ResultEntry {
                value,
                units: units.to_string(),
                note: None,
            },
        ));
        self
    }

    pub fn push_note(&mut self, name: impl Into<String>, value: f64, units: &str, note: String) {
        self.push(name, value, units);
        if let Some(last) = self.0.last_mut() {
            last.1.note = Some(note);
        }
    }

    pub fn get(&self, name: &str) -> Option<&ResultEntry> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, ResultEntry)> {
        self.0.iter()
    }
}

impl Serialize for Results {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub preset: Option<String>,
    pub config: Option<String>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

/// Column-oriented table for sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// Scenario after preset, config and overrides, keyed by config name.
    pub scenario: Map<String, Value>,
    pub results: Results,
    pub provenance: Provenance,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

pub fn scenario_map(s: &Scenario) -> Map<String, Value> {
    let mut m = Map::new();
    for (k, v) in params::flatten(s) {
        m.insert(k, Value::from(v));
    }
    m.insert(
        NOISE_FIGURES_KEY.into(),
        Value::from(s.detector.stage_noise_figures_db.clone()),
    );
    m
}

/// Turns a report's `scenario` object back into config-file text.
pub fn scenario_map_to_config(m: &Map<String, Value>) -> Result<String, CliError> {
    let mut out = String::new();
    for (k, v) in m {
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::Array(items) => items
                .iter()
                .map(|x| x.as_f64().map(|f| format!("{f:e}")))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| CliError::Config(vec![format!("{k}: expected numbers")]))?
                .join(", "),
            _ => return Err(CliError::Config(vec![format!("{k}: unsupported value {v}")])),
        };
        let _ = writeln!(out, "{k} = {text}");
    }
    Ok(out)
}

impl RunReport {
    pub fn new(command: &str, scenario: Option<&Scenario>, provenance: Provenance) -> Self {
        Self {
            command: command.to_string(),
            scenario: scenario.map(scenario_map).unwrap_or_default(),
            results: Results::default(),
            provenance,
            version: env!("CARGO_PKG_VERSION").to_string(),
            table: None,
        }
    }

    /// Rejects reports carrying a non-finite number.
    pub fn check_finite(&self) -> Result<(), CliError> {
        let bad: Vec<&str> = self
            .results
            .iter()
            .filter(|(_, e)| !e.value.is_finite())
            .map(|(n, _)| n.as_str())
            .collect();
        let table_bad = self
            .table
            .as_ref()
            .is_some_and(|t| t.rows.iter().flatten().any(|v| !v.is_finite()));
        if bad.is_empty() && !table_bad {
            Ok(())
        } else {
            Err(CliError::Numeric(format!(
                "non-finite result(s): {}",
                if table_bad { "table".to_string() } else { bad.join(", ") }
            )))
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Header `metric,value,units,note` for results; a sweep emits its table
    /// instead, one column per axis/metric.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.table {
            let header: Vec<String> = t.columns.iter().map(|c| csv_field(c)).collect();
            let _ = writeln!(out, "{}", header.join(","));
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            return out;
        }
        out.push_str("metric,value,units,note\n");
        for (name, e) in self.results.iter() {
            let _ = writeln!(
                out,
                "{},{:e},{},{}",
                csv_field(name),
                e.value,
                csv_field(&e.units),
                csv_field(e.note.as_deref().unwrap_or(""))
            );
        }
        out
    }
}

/// RFC 4180 quoting when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fms_cantilever::presets;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn results_keep_order_and_reject_nan() {
        let mut r = RunReport::new("x", None, Provenance::default());
        r.results.push("b", 1.0, "m").push("a", 2.0, "m");
        let json = r.to_json();
        assert!(json.find("\"b\"").unwrap() < json.find("\"a\"").unwrap());
        assert!(r.check_finite().is_ok());
        r.results.push("bad", f64::NAN, "");
        assert!(matches!(r.check_finite(), Err(CliError::Numeric(_))));
    }

    #[test]
    fn scenario_map_round_trips_through_config() {
        let s = presets::paper_electronic();
        let text = scenario_map_to_config(&scenario_map(&s)).unwrap();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
        let back = crate::config::load_config(None, Some(f.path()), &[]).unwrap();
        assert_eq!(back.scenario, s);
    }
}
