use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Largest residual seen for one property and whether it stayed in bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub checks: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl PropertyResult {
    pub fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            checks: 0,
            max_residual: 0.0,
            tolerance,
            pass: true,
        }
    }

    /// Records one residual. A NaN counts as a failure and is stored as infinity.
    pub fn record(&mut self, residual: f64) {
        let r = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        self.checks += 1;
        self.max_residual = self.max_residual.max(r);
        self.pass = self.max_residual <= self.tolerance;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub family: String,
    pub draws_attempted: usize,
    pub draws_skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
    pub properties: Vec<PropertyResult>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(name: &str, family: &str) -> Self {
        Self {
            name: name.to_string(),
            family: family.to_string(),
            draws_attempted: 0,
            draws_skipped: 0,
            skip_reasons: BTreeMap::new(),
            properties: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    pub fn skip(&mut self, reason: &str) {
        self.draws_skipped += 1;
        *self.skip_reasons.entry(reason.to_string()).or_insert(0) += 1;
    }

    pub fn skipped_fraction(&self) -> f64 {
        if self.draws_attempted == 0 {
            0.0
        } else {
            self.draws_skipped as f64 / self.draws_attempted as f64
        }
    }

    pub fn finish(mut self, properties: Vec<PropertyResult>) -> Self {
        self.pass = properties.iter().all(|p| p.pass);
        self.properties = properties;
        self
    }
}

/// A formula as displayed next to the form that the checks rely on, with
/// the residual each one leaves on the same test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyNote {
    pub name: String,
    pub description: String,
    pub derived_residual: f64,
    pub printed_residual: f64,
    /// True when the derived form passes and the displayed one clearly fails.
    pub printed_rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub sampling_scale: f64,
    pub suites: Vec<SuiteReport>,
    pub discrepancies: Vec<DiscrepancyNote>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn discrepancy(&self, name: &str) -> Option<&DiscrepancyNote> {
        self.discrepancies.iter().find(|d| d.name == name)
    }

    /// Plain-text table, one line per property.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "seed {}  sampling scale {}",
            self.seed, self.sampling_scale
        );
        let _ = writeln!(
            out,
            "{:<16} {:<34} {:>7} {:>12} {:>10}  result",
            "suite", "property", "checks", "max resid", "tol"
        );
        for s in &self.suites {
            for p in &s.properties {
                let _ = writeln!(
                    out,
                    "{:<16} {:<34} {:>7} {:>12.3e} {:>10.1e}  {}",
                    s.name,
                    p.name,
                    p.checks,
                    p.max_residual,
                    p.tolerance,
                    if p.pass { "pass" } else { "FAIL" }
                );
            }
            if s.draws_skipped > 0 {
                let reasons: Vec<_> = s
                    .skip_reasons
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                let _ = writeln!(
                    out,
                    "{:<16} skipped {}/{} draws ({})",
                    s.name,
                    s.draws_skipped,
                    s.draws_attempted,
                    reasons.join(", ")
                );
            }
        }
        for d in &self.discrepancies {
            let _ = writeln!(
                out,
                "discrepancy {}: derived {:.3e}, printed {:.3e}{}",
                d.name,
                d.derived_residual,
                d.printed_residual,
                if d.printed_rejected {
                    " (printed form rejected)"
                } else {
                    ""
                }
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}
