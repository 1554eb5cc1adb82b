//! The Sum and Product Puzzle as a chain of definitions and as a program.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::parser::parse_program;
use crate::solve::{ground, stable_models, IntWindow, Method, SolveError, StableModel};
use crate::term::Precomputed;

/// One definition per line, from the initial belief state `b0` up to `b3`.
pub const AXIOMS: &str = "\
forall M N (b0(M, N) <-> 1 < M < N & M + N <= 100).
forall I (puzzling0(I) <-> exists J1 K1 J2 K2 (b0(J1, K1) & b0(J2, K2) & I = J1 * K1 = J2 * K2 & J1 != J2)).
forall I (possibly_easy(I) <-> exists J K (b0(J, K) & I = J + K & ~puzzling0(J * K))).
forall M N (b1(M, N) <-> b0(M, N) & ~possibly_easy(M + N)).
forall I (puzzling1(I) <-> exists J1 K1 J2 K2 (b1(J1, K1) & b1(J2, K2) & I = J1 * K1 = J2 * K2 & J1 != J2)).
forall M N (b2(M, N) <-> b1(M, N) & ~puzzling1(M * N)).
forall I (puzzling2(I) <-> exists J1 K1 J2 K2 (b2(J1, K1) & b2(J2, K2) & I = J1 + K1 = J2 + K2 & J1 != J2)).
forall M N (b3(M, N) <-> b2(M, N) & ~puzzling2(M + N)).
";

pub const PROGRAM: &str = "\
b0(XM, XN) :- 1 < XM, XM < XN, XM + XN <= 100.
puzzling0(XI) :- b0(XJ1, XK1), b0(XJ2, XK2), XI = XJ1 * XK1, XJ1 * XK1 = XJ2 * XK2, XJ1 != XJ2.
possibly_easy(XI) :- b0(XJ, XK), XI = XJ + XK, not puzzling0(XJ * XK).
b1(XM, XN) :- b0(XM, XN), not possibly_easy(XM + XN).
puzzling1(XI) :- b1(XJ1, XK1), b1(XJ2, XK2), XI = XJ1 * XK1, XJ1 * XK1 = XJ2 * XK2, XJ1 != XJ2.
b2(XM, XN) :- b1(XM, XN), not puzzling1(XM * XN).
puzzling2(XI) :- b2(XJ1, XK1), b2(XJ2, XK2), XI = XJ1 + XK1, XJ1 + XK1 = XJ2 + XK2, XJ1 != XJ2.
b3(XM, XN) :- b2(XM, XN), not puzzling2(XM + XN).
";

/// Wide enough for every product `M * N` with `M + N <= 100`, the largest
/// being 49 * 51 = 2499.
pub const WINDOW: IntWindow = IntWindow { lo: 2, hi: 10000 };

#[derive(Debug, Error)]
pub enum PuzzleError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("expected exactly one stable model, found {0}")]
    ModelCount(usize),
    #[error("some products fall outside the window: {0}")]
    Window(String),
}

/// Grounds and solves the puzzle program, insisting on a unique model.
pub fn solve_puzzle() -> Result<StableModel, PuzzleError> {
    let program = parse_program(PROGRAM).expect("the built-in program parses");
    let g = ground(&program, WINDOW, &BTreeSet::new());
    if let Some(w) = g
        .warnings
        .iter()
        .find(|w| matches!(w, crate::solve::GroundWarning::WindowTooSmall { .. }))
    {
        return Err(PuzzleError::Window(w.to_string()));
    }
    let mut models = stable_models(&g, Method::Stratified)?;
    if models.len() != 1 {
        return Err(PuzzleError::ModelCount(models.len()));
    }
    Ok(models.remove(0))
}

/// The pairs `(M, N)` in the extent of a binary predicate.
pub fn pairs(model: &StableModel, predicate: &str) -> Vec<(i64, i64)> {
    model
        .extent(predicate)
        .filter_map(|a| match a.args.as_slice() {
            [Precomputed::Numeral(m), Precomputed::Numeral(n)] => Some((*m, *n)),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_axioms;

    #[test]
    fn texts_parse() {
        assert_eq!(parse_axioms(AXIOMS).unwrap().len(), 8);
        assert_eq!(parse_program(PROGRAM).unwrap().rules.len(), 8);
    }
}
