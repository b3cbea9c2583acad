//! Check identifiers and results shared by the static and dynamic checkers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    Tabs,
    StatementsPerLine,
    Comments,
    Background,
    Fills,
    Strokes,
    Ellipses,
    Rects,
    Scores,
    SetupDraw,
    FullScreen,
    CreatedFunctionsExist,
    MagicNumbers,
    MovingBall,
    GameOn,
    WallsBounceTop,
    WallsBounceBottom,
    LeftWall,
    RightWall,
    MoveLeftPaddle,
    MoveRightPaddle,
    BounceLeftPaddle,
    BounceRightPaddle,
}

impl CheckId {
    pub const ALL: [CheckId; 23] = [
        CheckId::Tabs,
        CheckId::StatementsPerLine,
        CheckId::Comments,
        CheckId::Background,
        CheckId::Fills,
        CheckId::Strokes,
        CheckId::Ellipses,
        CheckId::Rects,
        CheckId::Scores,
        CheckId::SetupDraw,
        CheckId::FullScreen,
        CheckId::CreatedFunctionsExist,
        CheckId::MagicNumbers,
        CheckId::MovingBall,
        CheckId::GameOn,
        CheckId::WallsBounceTop,
        CheckId::WallsBounceBottom,
        CheckId::LeftWall,
        CheckId::RightWall,
        CheckId::MoveLeftPaddle,
        CheckId::MoveRightPaddle,
        CheckId::BounceLeftPaddle,
        CheckId::BounceRightPaddle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Tabs => "checkTabs",
            CheckId::StatementsPerLine => "checkStatementsPerLine",
            CheckId::Comments => "checkComments",
            CheckId::Background => "checkBackground",
            CheckId::Fills => "checkFills",
            CheckId::Strokes => "checkStrokes",
            CheckId::Ellipses => "checkEllipses",
            CheckId::Rects => "checkRects",
            CheckId::Scores => "checkScores",
            CheckId::SetupDraw => "checkSetupDraw",
            CheckId::FullScreen => "checkFullScreen",
            CheckId::CreatedFunctionsExist => "checkCreatedFunctionsExist",
            CheckId::MagicNumbers => "checkMagicNumbers",
            CheckId::MovingBall => "checkMovingBall",
            CheckId::GameOn => "checkGameOn",
            CheckId::WallsBounceTop => "checkWallsBounceTop",
            CheckId::WallsBounceBottom => "checkWallsBounceBottom",
            CheckId::LeftWall => "checkLeftWall",
            CheckId::RightWall => "checkRightWall",
            CheckId::MoveLeftPaddle => "checkMoveLeftPaddle",
            CheckId::MoveRightPaddle => "checkMoveRightPaddle",
            CheckId::BounceLeftPaddle => "checkBounceLeftPaddle",
            CheckId::BounceRightPaddle => "checkBounceRightPaddle",
        }
    }

    /// Dynamic checks execute the sketch; static ones only read it.
    pub fn is_dynamic(self) -> bool {
        self >= CheckId::MovingBall
    }

    /// Style checks look at formatting rather than behaviour.
    pub fn is_style(self) -> bool {
        matches!(
            self,
            CheckId::Tabs | CheckId::StatementsPerLine | CheckId::Comments | CheckId::MagicNumbers
        )
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCheck(pub String);

impl fmt::Display for UnknownCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let known: Vec<_> = CheckId::ALL.iter().map(|c| c.name()).collect();
        write!(
            f,
            "unknown check `{}`; registered checks are: {}",
            self.0,
            known.join(", ")
        )
    }
}

impl std::error::Error for UnknownCheck {}

impl FromStr for CheckId {
    type Err = UnknownCheck;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckId::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownCheck(s.to_string()))
    }
}

impl Serialize for CheckId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for CheckId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check could not be evaluated (parse damage, runtime fault, budget).
    Error,
    /// The check does not apply to this submission.
    Skipped,
}

/// Where the grader found the reason for a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Span(Span),
    Frame(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    pub status: CheckStatus,
    pub evidence: Vec<Evidence>,
    pub message: String,
}

impl CheckResult {
    pub fn pass(check_id: CheckId) -> Self {
        CheckResult {
            check_id,
            status: CheckStatus::Pass,
            evidence: Vec::new(),
            message: String::new(),
        }
    }

    pub fn fail(check_id: CheckId, message: impl Into<String>) -> Self {
        CheckResult {
            check_id,
            status: CheckStatus::Fail,
            evidence: Vec::new(),
            message: message.into(),
        }
    }

    pub fn error(check_id: CheckId, message: impl Into<String>) -> Self {
        CheckResult {
            check_id,
            status: CheckStatus::Error,
            evidence: Vec::new(),
            message: message.into(),
        }
    }

    pub fn skipped(check_id: CheckId, message: impl Into<String>) -> Self {
        CheckResult {
            check_id,
            status: CheckStatus::Skipped,
            evidence: Vec::new(),
            message: message.into(),
        }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.evidence.push(Evidence::Span(span));
        self
    }

    pub fn with_spans(mut self, spans: impl IntoIterator<Item = Span>) -> Self {
        self.evidence.extend(spans.into_iter().map(Evidence::Span));
        self
    }

    pub fn with_frame(mut self, frame: usize) -> Self {
        self.evidence.push(Evidence::Frame(frame));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    /// Source lines cited as evidence, ascending and deduplicated.
    pub fn lines(&self) -> Vec<u32> {
        let mut lines: Vec<u32> = self
            .evidence
            .iter()
            .filter_map(|e| match e {
                Evidence::Span(s) => Some(s.start_line),
                Evidence::Frame(_) => None,
            })
            .collect();
        lines.sort_unstable();
        lines.dedup();
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
        }
        let err = "checkNope".parse::<CheckId>().unwrap_err().to_string();
        assert!(err.contains("checkNope") && err.contains("checkTabs"));
    }

    #[test]
    fn dynamic_partition() {
        assert!(!CheckId::MagicNumbers.is_dynamic());
        assert!(CheckId::MovingBall.is_dynamic());
        assert!(CheckId::BounceRightPaddle.is_dynamic());
    }
}
