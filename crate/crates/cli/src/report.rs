use std::collections::BTreeMap;

use discordium::CMatrix;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of each input file, keyed by role.
    pub inputs: BTreeMap<String, String>,
    pub results: Map<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(command: String) -> Self {
        Self {
            command,
            inputs: BTreeMap::new(),
            results: Map::new(),
            tolerances: BTreeMap::new(),
            seed: None,
            wall_time_s: None,
        }
    }

    pub fn input(&mut self, role: &str, digest: String) -> &mut Self {
        self.inputs.insert(role.into(), digest);
        self
    }

    pub fn tol(&mut self, name: &str, v: f64) -> &mut Self {
        self.tolerances.insert(name.into(), v);
        self
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.results
            .insert(key.into(), serde_json::to_value(v).expect("serialisable"));
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            return serde_json::to_string_pretty(self).expect("serialisable");
        }
        let mut out = format!("command: {}\n", self.command);
        for (k, v) in &self.inputs {
            out += &format!("input {k}: sha256 {v}\n");
        }
        if let Some(seed) = self.seed {
            out += &format!("seed: {seed}\n");
        }
        for (k, v) in &self.results {
            out += &format!("{k}: {}\n", compact(v));
        }
        for (k, v) in &self.tolerances {
            out += &format!("tolerance {k}: {v:e}\n");
        }
        if let Some(t) = self.wall_time_s {
            out += &format!("wall time: {t:.3} s\n");
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows of `[re, im]` pairs.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}
