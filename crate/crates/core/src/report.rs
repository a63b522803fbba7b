//! The machine-readable report emitted by every CLI verb:
//! `{command, inputs, status, certificates, dims, series, failures}`.
//! Exact scalars serialize as canonical strings, never as floats, and
//! identical runs produce byte-identical output (all maps are ordered).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CoreError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    pub certificates: Vec<Value>,
    pub dims: BTreeMap<String, Value>,
    pub series: Vec<Value>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            status: Status::Pass,
            certificates: Vec::new(),
            dims: BTreeMap::new(),
            series: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn input(mut self, key: &str, value: &str) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push_certificate<T: Serialize>(&mut self, cert: &T) {
        self.certificates.push(serde_json::to_value(cert).expect("serializable certificate"));
    }

    pub fn set_dim<T: Serialize>(&mut self, key: &str, value: T) {
        self.dims.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn push_series<T: Serialize>(&mut self, entry: &T) {
        self.series.push(serde_json::to_value(entry).expect("serializable series entry"));
    }

    pub fn fail(&mut self, reason: &str) {
        self.status = Status::Fail;
        self.failures.push(reason.to_string());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Report, CoreError> {
        serde_json::from_str(s).map_err(|e| CoreError::Io(format!("bad report JSON: {e}")))
    }

    /// Deterministic human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for (k, v) in &self.inputs {
            out.push_str(&format!("input {k}: {v}\n"));
        }
        out.push_str(&format!(
            "status: {}\n",
            match self.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
            }
        ));
        for c in &self.certificates {
            out.push_str(&format!("certificate: {}\n", render_value(c)));
        }
        for (k, v) in &self.dims {
            out.push_str(&format!("dim {k}: {}\n", render_value(v)));
        }
        for s in &self.series {
            out.push_str(&format!("series: {}\n", render_value(s)));
        }
        for f in &self.failures {
            out.push_str(&format!("failure: {f}\n"));
        }
        out
    }
}

fn render_value(v: &Value) -> String {
    serde_json::to_string(v).expect("value renders")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("verify p-contact").input("algebra", "iwasawa.cnil");
        r.set_dim("rank_f", 2usize);
        r.push_certificate(&serde_json::json!({"valid": true, "top_coefficient": "-2"}));
        r.fail("example failure");
        let s = r.to_json();
        let back = Report::from_json(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn byte_identical_rendering() {
        let mut r = Report::new("froelicher");
        r.set_dim("e1", vec![vec![1usize, 2], vec![3, 4]]);
        assert_eq!(r.to_json(), r.to_json());
        assert_eq!(r.to_text(), r.to_text());
    }
}
