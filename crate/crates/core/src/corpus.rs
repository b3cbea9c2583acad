//! Reference solutions, defect mutants, rubrics and published grade tables
//! bundled with the grader.

use crate::check::CheckId;

/// A reference solution with one behaviour broken. The file name starts
/// with the check the defect targets, then `__` and a short description.
#[derive(Debug, Clone, Copy)]
pub struct Mutant {
    pub assignment: u8,
    pub name: &'static str,
    pub source: &'static str,
}

impl Mutant {
    /// The one check this mutant is built to fail.
    pub fn target(&self) -> CheckId {
        let id = self.name.split("__").next().unwrap_or(self.name);
        id.parse().expect("mutant names start with a registered check")
    }
}

/// The reference solution for assignment `n` (1 to 4).
pub fn reference(n: u8) -> Option<&'static str> {
    Some(match n {
        1 => include_str!("../corpus/a1/reference.pde"),
        2 => include_str!("../corpus/a2/reference.pde"),
        3 => include_str!("../corpus/a3/reference.pde"),
        4 => include_str!("../corpus/a4/reference.pde"),
        _ => return None,
    })
}

/// The built-in rubric for assignment `n` (1 to 4), as TOML.
pub fn rubric_toml(n: u8) -> Option<&'static str> {
    Some(match n {
        1 => include_str!("../corpus/rubrics/assignment1.toml"),
        2 => include_str!("../corpus/rubrics/assignment2.toml"),
        3 => include_str!("../corpus/rubrics/assignment3.toml"),
        4 => include_str!("../corpus/rubrics/assignment4.toml"),
        _ => return None,
    })
}

/// Published per-student grades for assignment `n` (1 to 4), as CSV with
/// columns `student_id,autograd,instructor`.
pub fn grade_table(n: u8) -> Option<&'static str> {
    Some(match n {
        1 => include_str!("../corpus/tables/assignment1.csv"),
        2 => include_str!("../corpus/tables/assignment2.csv"),
        3 => include_str!("../corpus/tables/assignment3.csv"),
        4 => include_str!("../corpus/tables/assignment4.csv"),
        _ => return None,
    })
}

pub fn mutants(n: u8) -> impl Iterator<Item = &'static Mutant> {
    MUTANTS.iter().filter(move |m| m.assignment == n)
}

pub const MUTANTS: &[Mutant] = &[
    Mutant {
        assignment: 1,
        name: "checkBackground__matches_paddles",
        source: include_str!("../corpus/a1/mutants/checkBackground__matches_paddles.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkBackground__missing",
        source: include_str!("../corpus/a1/mutants/checkBackground__missing.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkComments__header_only",
        source: include_str!("../corpus/a1/mutants/checkComments__header_only.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkComments__stripped",
        source: include_str!("../corpus/a1/mutants/checkComments__stripped.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkEllipses__off_centre",
        source: include_str!("../corpus/a1/mutants/checkEllipses__off_centre.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkEllipses__oval",
        source: include_str!("../corpus/a1/mutants/checkEllipses__oval.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkFills__ball_like_paddles",
        source: include_str!("../corpus/a1/mutants/checkFills__ball_like_paddles.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkFills__paddles_differ",
        source: include_str!("../corpus/a1/mutants/checkFills__paddles_differ.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkFullScreen__size",
        source: include_str!("../corpus/a1/mutants/checkFullScreen__size.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkRects__same_corner",
        source: include_str!("../corpus/a1/mutants/checkRects__same_corner.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkRects__unequal",
        source: include_str!("../corpus/a1/mutants/checkRects__unequal.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkScores__no_text_size",
        source: include_str!("../corpus/a1/mutants/checkScores__no_text_size.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkScores__one_side",
        source: include_str!("../corpus/a1/mutants/checkScores__one_side.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkSetupDraw__no_draw",
        source: include_str!("../corpus/a1/mutants/checkSetupDraw__no_draw.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkStatementsPerLine__paddles_one_line",
        source: include_str!("../corpus/a1/mutants/checkStatementsPerLine__paddles_one_line.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkStatementsPerLine__stacked_scores",
        source: include_str!("../corpus/a1/mutants/checkStatementsPerLine__stacked_scores.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkStrokes__missing",
        source: include_str!("../corpus/a1/mutants/checkStrokes__missing.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkStrokes__two_colours",
        source: include_str!("../corpus/a1/mutants/checkStrokes__two_colours.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkTabs__flush_left",
        source: include_str!("../corpus/a1/mutants/checkTabs__flush_left.pde"),
    },
    Mutant {
        assignment: 1,
        name: "checkTabs__mixed_indent",
        source: include_str!("../corpus/a1/mutants/checkTabs__mixed_indent.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkBackground__missing",
        source: include_str!("../corpus/a2/mutants/checkBackground__missing.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkFills__ball_like_paddles",
        source: include_str!("../corpus/a2/mutants/checkFills__ball_like_paddles.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkFullScreen__size",
        source: include_str!("../corpus/a2/mutants/checkFullScreen__size.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkGameOn__already_on",
        source: include_str!("../corpus/a2/mutants/checkGameOn__already_on.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkGameOn__no_gate",
        source: include_str!("../corpus/a2/mutants/checkGameOn__no_gate.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkMagicNumbers__literal_ball_size",
        source: include_str!("../corpus/a2/mutants/checkMagicNumbers__literal_ball_size.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkMagicNumbers__literal_score_height",
        source: include_str!("../corpus/a2/mutants/checkMagicNumbers__literal_score_height.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkMovingBall__moves_once",
        source: include_str!("../corpus/a2/mutants/checkMovingBall__moves_once.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkMovingBall__speeds_cleared",
        source: include_str!("../corpus/a2/mutants/checkMovingBall__speeds_cleared.pde"),
    },
    Mutant {
        assignment: 2,
        name: "checkRects__right_paddle_inset",
        source: include_str!("../corpus/a2/mutants/checkRects__right_paddle_inset.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkLeftWall__no_right_point",
        source: include_str!("../corpus/a3/mutants/checkLeftWall__no_right_point.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkLeftWall__wrong_player",
        source: include_str!("../corpus/a3/mutants/checkLeftWall__wrong_player.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkMagicNumbers__literal_paddle",
        source: include_str!("../corpus/a3/mutants/checkMagicNumbers__literal_paddle.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkRightWall__exit_never_detected",
        source: include_str!("../corpus/a3/mutants/checkRightWall__exit_never_detected.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkRightWall__no_left_point",
        source: include_str!("../corpus/a3/mutants/checkRightWall__no_left_point.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkWallsBounceBottom__late_turn",
        source: include_str!("../corpus/a3/mutants/checkWallsBounceBottom__late_turn.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkWallsBounceBottom__no_bottom_bounce",
        source: include_str!("../corpus/a3/mutants/checkWallsBounceBottom__no_bottom_bounce.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkWallsBounceTop__late_turn",
        source: include_str!("../corpus/a3/mutants/checkWallsBounceTop__late_turn.pde"),
    },
    Mutant {
        assignment: 3,
        name: "checkWallsBounceTop__no_top_bounce",
        source: include_str!("../corpus/a3/mutants/checkWallsBounceTop__no_top_bounce.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkBounceLeftPaddle__no_left_bounce",
        source: include_str!("../corpus/a4/mutants/checkBounceLeftPaddle__no_left_bounce.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkBounceRightPaddle__no_right_bounce",
        source: include_str!("../corpus/a4/mutants/checkBounceRightPaddle__no_right_bounce.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkBounceRightPaddle__wrong_direction",
        source: include_str!("../corpus/a4/mutants/checkBounceRightPaddle__wrong_direction.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkCreatedFunctionsExist__renamed_display",
        source: include_str!("../corpus/a4/mutants/checkCreatedFunctionsExist__renamed_display.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkCreatedFunctionsExist__renamed_scores",
        source: include_str!("../corpus/a4/mutants/checkCreatedFunctionsExist__renamed_scores.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkGameOn__no_gate",
        source: include_str!("../corpus/a4/mutants/checkGameOn__no_gate.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkMoveLeftPaddle__either_half",
        source: include_str!("../corpus/a4/mutants/checkMoveLeftPaddle__either_half.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkMoveLeftPaddle__frozen",
        source: include_str!("../corpus/a4/mutants/checkMoveLeftPaddle__frozen.pde"),
    },
    Mutant {
        assignment: 4,
        name: "checkMoveRightPaddle__frozen",
        source: include_str!("../corpus/a4/mutants/checkMoveRightPaddle__frozen.pde"),
    },
];
