use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
    Warning,
}

/// One verified property: a residual compared against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub residual: f64,
    pub tolerance: f64,
    /// The property being checked, stated as a formula.
    pub clause: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `residual <= tolerance`. NaN residuals fail.
    pub fn bound(
        name: impl Into<String>,
        clause: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let status = if residual <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Check {
            name: name.into(),
            status,
            residual,
            tolerance,
            clause: clause.into(),
            detail: None,
        }
    }

    pub fn flag(name: impl Into<String>, clause: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            clause: clause.into(),
            detail: None,
        }
    }

    pub fn inapplicable(
        name: impl Into<String>,
        clause: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            status: CheckStatus::Inapplicable,
            residual: 0.0,
            tolerance: 0.0,
            clause: clause.into(),
            detail: Some(reason.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Downgrades a failure to a warning.
    pub fn as_warning(mut self) -> Self {
        if self.status == CheckStatus::Fail {
            self.status = CheckStatus::Warning;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// True when no check failed.
pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| !c.failed())
}
