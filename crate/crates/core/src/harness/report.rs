use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checks::{Check, CheckStatus};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub status: CheckStatus,
    pub residual: f64,
    pub tolerance: f64,
    pub clause: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    /// Command line reproducing a failed entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproduce: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inapplicable: usize,
    pub warning: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub report_version: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub entries: Vec<ReportEntry>,
    pub summary: Summary,
    /// Command-specific results such as spectral tables or matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(command: impl Into<String>) -> Self {
        VerificationReport {
            report_version: REPORT_VERSION,
            command: command.into(),
            seed: None,
            entries: Vec::new(),
            summary: Summary::default(),
            output: None,
            wall_time_ms: None,
        }
    }

    /// Appends checks; failures get `reproduce` attached.
    pub fn extend(
        &mut self,
        checks: impl IntoIterator<Item = Check>,
        trial: Option<u64>,
        reproduce: &str,
    ) {
        for c in checks {
            let failed = c.failed();
            self.entries.push(ReportEntry {
                name: c.name,
                status: c.status,
                residual: c.residual,
                tolerance: c.tolerance,
                clause: c.clause,
                detail: c.detail,
                trial,
                reproduce: failed.then(|| reproduce.to_string()),
            });
        }
        self.summarize();
    }

    /// Stable sort by trial index, then recount.
    pub fn finalize(&mut self) {
        self.entries.sort_by_key(|e| e.trial);
        self.summarize();
    }

    fn summarize(&mut self) {
        let mut s = Summary::default();
        for e in &self.entries {
            match e.status {
                CheckStatus::Pass => s.pass += 1,
                CheckStatus::Fail => s.fail += 1,
                CheckStatus::Inapplicable => s.inapplicable += 1,
                CheckStatus::Warning => s.warning += 1,
            }
        }
        self.summary = s;
    }

    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Human-readable rendering. Passing entries are listed only when
    /// `verbose` is set.
    pub fn to_text(&self, verbose: bool) -> String {
        let mut out = String::new();
        let _ = write!(out, "{}", self.command);
        if let Some(seed) = self.seed {
            let _ = write!(out, "  seed {seed}");
        }
        out.push('\n');
        for e in &self.entries {
            if !verbose && e.status == CheckStatus::Pass {
                continue;
            }
            let tag = match e.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Inapplicable => "N/A ",
                CheckStatus::Warning => "WARN",
            };
            let trial = e.trial.map(|t| format!("trial {t}  ")).unwrap_or_default();
            let _ = write!(
                out,
                "{tag}  {trial}{:<28} {:>10.3e} / {:<9.1e} {}",
                e.name, e.residual, e.tolerance, e.clause
            );
            if let Some(d) = &e.detail {
                let _ = write!(out, "  [{d}]");
            }
            out.push('\n');
            if let Some(r) = &e.reproduce {
                let _ = writeln!(out, "      reproduce: {r}");
            }
        }
        let s = self.summary;
        let _ = write!(
            out,
            "summary: {} pass, {} fail, {} inapplicable, {} warning",
            s.pass, s.fail, s.inapplicable, s.warning
        );
        if let Some(ms) = self.wall_time_ms {
            let _ = write!(out, ", {ms} ms");
        }
        out.push('\n');
        out
    }
}
