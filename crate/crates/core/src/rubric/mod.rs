//! Rubrics: which checks an assignment uses, what each costs, and what the
//! student is told when it fails.

mod grade;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::CheckId;
use crate::corpus;

pub use grade::{grade, render_report, GradeReport, COULD_NOT_VERIFY, WAIVED};

pub const DEFAULT_MAX_SCORE: u32 = 20;

#[derive(Debug, Error)]
pub enum RubricError {
    #[error("cannot read rubric {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid rubric: {0}")]
    Schema(String),
    #[error("invalid rubric: item {index} ({check}): {message}")]
    Item {
        index: usize,
        check: CheckId,
        message: String,
    },
}

/// What an item whose check errored or was skipped costs the student.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorPolicy {
    /// Deduct the points and say the item could not be verified.
    #[default]
    Deduct,
    /// Deduct nothing, but still say the item could not be verified.
    Waive,
}

/// An assignment number, or a free-form name for custom rubrics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssignmentId {
    Number(u8),
    Name(String),
}

impl AssignmentId {
    /// The bundled assignment this id refers to, if any.
    pub fn builtin_number(&self) -> Option<u8> {
        match self {
            AssignmentId::Number(n) => Some(*n).filter(|n| (1..=4).contains(n)),
            AssignmentId::Name(s) => s.trim().parse().ok().filter(|n| (1..=4).contains(n)),
        }
    }
}

impl fmt::Display for AssignmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentId::Number(n) => write!(f, "{n}"),
            AssignmentId::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemParams {
    /// Function names for `checkCreatedFunctionsExist`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RubricItem {
    pub check: CheckId,
    /// Deducted when the check fails.
    pub points: u32,
    pub feedback: String,
    #[serde(default)]
    pub params: ItemParams,
    #[serde(default)]
    pub on_error: ErrorPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rubric {
    pub assignment_id: AssignmentId,
    #[serde(default = "default_max_score")]
    pub max_score: u32,
    #[serde(default)]
    pub items: Vec<RubricItem>,
}

fn default_max_score() -> u32 {
    DEFAULT_MAX_SCORE
}

impl Rubric {
    /// Parses and validates a rubric in TOML form.
    pub fn from_toml(text: &str) -> Result<Rubric, RubricError> {
        let rubric: Rubric =
            toml::from_str(text).map_err(|e| RubricError::Schema(e.to_string().trim_end().to_string()))?;
        rubric.validate()?;
        Ok(rubric)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("rubrics serialize")
    }

    pub fn validate(&self) -> Result<(), RubricError> {
        if self.max_score == 0 {
            return Err(RubricError::Schema("max_score must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        for (index, item) in self.items.iter().enumerate() {
            let bad = |message: &str| RubricError::Item {
                index,
                check: item.check,
                message: message.to_string(),
            };
            if item.points == 0 {
                return Err(bad("points must be at least 1"));
            }
            if !seen.insert(item.check) {
                return Err(bad("the check appears more than once"));
            }
            let wants_functions = item.check == CheckId::CreatedFunctionsExist;
            if wants_functions && item.params.functions.is_empty() {
                return Err(bad("params.functions must list at least one function name"));
            }
            if !wants_functions && !item.params.functions.is_empty() {
                return Err(bad("params.functions only applies to checkCreatedFunctionsExist"));
            }
        }
        Ok(())
    }

    pub fn total_points(&self) -> u32 {
        self.items.iter().map(|i| i.points).sum()
    }
}

/// Reads and validates a rubric file.
pub fn load_rubric(path: &Path) -> Result<Rubric, RubricError> {
    let text = std::fs::read_to_string(path).map_err(|source| RubricError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Rubric::from_toml(&text)
}

/// The bundled rubric for assignment `n` (1 to 4).
pub fn builtin_rubric(n: u8) -> Option<Rubric> {
    let text = corpus::rubric_toml(n)?;
    Some(Rubric::from_toml(text).expect("bundled rubrics are valid"))
}

/// All bundled rubrics, by assignment number.
pub fn builtin_rubrics() -> Vec<(u8, Rubric)> {
    (1..=4).filter_map(|n| builtin_rubric(n).map(|r| (n, r))).collect()
}

#[cfg(test)]
mod tests;
