//! Named inequality/identity checks shared by the audit modules.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub inputs: BTreeMap<String, f64>,
}

impl AuditReport {
    /// Report for the inequality `lhs >= rhs - tolerance`.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
            inputs: BTreeMap::new(),
        }
    }

    /// Report for `lhs <= rhs + tolerance`, stored with margin `rhs - lhs`.
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
            inputs: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    pub const CSV_HEADER: &'static str = "name,lhs,rhs,margin,tolerance,pass,inputs";

    pub fn csv_row(&self) -> String {
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|(k, v)| format!("{k}={v:.12e}"))
            .collect();
        format!(
            "{},{:.12e},{:.12e},{:.12e},{:e},{},{}",
            self.name,
            self.lhs,
            self.rhs,
            self.margin,
            self.tolerance,
            self.pass,
            inputs.join(";")
        )
    }
}

pub fn reports_csv(reports: &[AuditReport]) -> String {
    let mut s = String::from(AuditReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}
