//! Machine-readable command reports.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Pass,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn fail(
        name: impl Into<String>,
        kind: impl Into<String>,
        detail: impl Into<String>,
    ) -> Check {
        let detail = detail.into();
        Check {
            name: name.into(),
            status: Status::Fail,
            detail: detail.clone(),
            witness: Some(Witness {
                kind: kind.into(),
                detail,
            }),
        }
    }

    pub fn error(
        name: impl Into<String>,
        kind: impl Into<String>,
        detail: impl Into<String>,
    ) -> Check {
        Check {
            status: Status::Error,
            ..Check::fail(name, kind, detail)
        }
    }
}

/// Field order is part of the schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub site: String,
    pub status: Status,
    pub checks: Vec<Check>,
    /// Present only when requested, so that reports stay reproducible.
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: &str, site: &str, checks: Vec<Check>) -> Report {
        let status = if checks.iter().any(|c| c.status == Status::Error) {
            Status::Error
        } else if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        };
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            site: site.to_string(),
            status,
            checks,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", c.status, c.name, c.detail)?;
            if let Some(w) = &c.witness {
                if w.detail != c.detail {
                    writeln!(f, "  witness {}: {}", w.kind, w.detail)?;
                } else {
                    writeln!(f, "  witness {}", w.kind)?;
                }
            }
        }
        write!(
            f,
            "{} {} ({} checks)",
            self.status,
            self.command,
            self.checks.len()
        )
    }
}
