//! Shared report building blocks: named pass/fail checks and the frozen CSV row.

use serde::{Deserialize, Serialize};

/// One named pass/fail diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), passed: true, detail: None }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: false, detail: Some(detail.into()) }
    }

    pub fn from_bool(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Check { name: name.into(), passed, detail: if detail.is_empty() { None } else { Some(detail) } }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// CSV row, one per (scenario, θ, β) point. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub command: String,
    pub theta: f64,
    pub beta: Option<f64>,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub value: f64,
    #[serde(rename = "G")]
    pub g: Option<f64>,
    pub classical_bound: f64,
    pub violation: bool,
    pub value_stderr: Option<f64>,
    pub seed: Option<u64>,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "scenario",
    "command",
    "theta",
    "beta",
    "I",
    "J",
    "P",
    "C",
    "value",
    "G",
    "classical_bound",
    "violation",
    "value_stderr",
    "seed",
];

impl ReportRow {
    /// Row from an exact evaluation; tilted reports fill `beta`, `P`, `G`.
    pub fn from_bell(scenario: &str, command: &str, r: &crate::bell::BellReport) -> Self {
        let tilt = r.tilt.as_ref();
        ReportRow {
            scenario: scenario.into(),
            command: command.into(),
            theta: r.thetas.first().copied().unwrap_or(0.0),
            beta: tilt.map(|t| t.beta),
            i: r.i,
            j: r.j,
            p: tilt.map(|t| t.p),
            c: r.c,
            value: r.value,
            g: tilt.map(|t| t.g),
            classical_bound: r.classical_bound,
            violation: r.violation,
            value_stderr: None,
            seed: r.seed,
        }
    }

    /// Row from a sampling run at angle `theta` with the given `C`.
    pub fn from_tally(scenario: &str, theta: f64, c: f64, t: &crate::sampling::TallyReport) -> Self {
        let bound = 1.0 + t.beta.unwrap_or(0.0);
        let stat = t.g.as_ref().unwrap_or(&t.value);
        ReportRow {
            scenario: scenario.into(),
            command: "sample".into(),
            theta,
            beta: t.beta,
            i: t.i.value,
            j: t.j.value,
            p: t.p.as_ref().map(|e| e.value),
            c,
            value: t.value.value,
            g: t.g.as_ref().map(|e| e.value),
            classical_bound: bound,
            violation: stat.value > bound,
            value_stderr: Some(t.value.stderr),
            seed: Some(t.seed),
        }
    }

    /// Row for the best deterministic classical strategy.
    pub fn from_classical(scenario: &str, r: &crate::classical::ClassicalReport) -> Self {
        let det = &r.deterministic;
        let c = &det.argmax_correlators;
        let tilted = r.beta.is_some();
        ReportRow {
            scenario: scenario.into(),
            command: "classical-bound".into(),
            theta: 0.0,
            beta: r.beta,
            i: c.i,
            j: c.j,
            p: tilted.then_some(c.p),
            c: 0.0,
            value: c.value(r.shape.k),
            g: tilted.then_some(det.max_value),
            classical_bound: r.bound,
            violation: det.max_value > r.bound,
            value_stderr: None,
            seed: Some(r.stochastic.seed),
        }
    }
}
