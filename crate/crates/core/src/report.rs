//! Status tags shared by every machine-readable report.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Computed and reported, but not a pass/fail claim.
    Diagnostic,
    InsufficientData,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Diagnostic => "diagnostic",
            Status::InsufficientData => "insufficient-data",
        }
    }
}

/// One named check with its payload.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: serde_json::Value,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Serialize) -> Check {
        Check {
            name: name.into(),
            status,
            detail: serde_json::to_value(detail).unwrap_or_else(|e| serde_json::Value::String(e.to_string())),
        }
    }

    /// A check that could not run; recorded as a failure with the reason.
    pub fn error(name: impl Into<String>, err: &crate::Error) -> Check {
        Check {
            name: name.into(),
            status: Status::Fail,
            detail: serde_json::json!({ "error": err.to_string() }),
        }
    }
}

pub fn any_failed<'a>(checks: impl IntoIterator<Item = &'a Check>) -> bool {
    checks.into_iter().any(|c| c.status == Status::Fail)
}
