//! Well-sortedness checking for formulas.

use std::fmt;

use crate::formula::{Formula, Sort, Term, Variable};
use crate::parser::print::{term_to_string, Style};

/// The first ill-sorted node found by [`check_sorts`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortError {
    /// Child indices from the root formula down to the offending node.
    pub path: Vec<usize>,
    /// The offending subterm or subformula, printed in ASCII style.
    pub node: String,
    pub reason: String,
}

impl fmt::Display for SortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ill-sorted `{}`: {}", self.node, self.reason)?;
        if !self.path.is_empty() {
            let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
            write!(f, " (at {})", path.join("."))?;
        }
        Ok(())
    }
}

impl std::error::Error for SortError {}

/// Checks arithmetic operands are integer-sorted and that no variable is
/// bound twice on one quantifier path.
pub fn check_sorts(f: &Formula) -> Result<(), SortError> {
    let mut path = Vec::new();
    let mut bound = Vec::new();
    check_formula(f, &mut path, &mut bound)
}

fn check_formula(
    f: &Formula,
    path: &mut Vec<usize>,
    bound: &mut Vec<Variable>,
) -> Result<(), SortError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom { args, .. } => {
            for (k, t) in args.iter().enumerate() {
                path.push(k);
                check_term(t, Sort::General, path)?;
                path.pop();
            }
            Ok(())
        }
        Formula::Compare { lhs, rhs, .. } => {
            path.push(0);
            check_term(lhs, Sort::General, path)?;
            path.pop();
            path.push(1);
            check_term(rhs, Sort::General, path)?;
            path.pop();
            Ok(())
        }
        Formula::Not(g) => {
            path.push(0);
            check_formula(g, path, bound)?;
            path.pop();
            Ok(())
        }
        Formula::And(gs) | Formula::Or(gs) => {
            for (k, g) in gs.iter().enumerate() {
                path.push(k);
                check_formula(g, path, bound)?;
                path.pop();
            }
            Ok(())
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            path.push(0);
            check_formula(a, path, bound)?;
            path.pop();
            path.push(1);
            check_formula(b, path, bound)?;
            path.pop();
            Ok(())
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let depth = bound.len();
            for v in vs {
                if bound.iter().any(|w| w.name == v.name) {
                    return Err(SortError {
                        path: path.clone(),
                        node: v.name.clone(),
                        reason: format!("variable {} is bound twice on one path", v.name),
                    });
                }
                bound.push(v.clone());
            }
            path.push(0);
            check_formula(g, path, bound)?;
            path.pop();
            bound.truncate(depth);
            Ok(())
        }
    }
}

fn check_term(t: &Term, required: Sort, path: &mut Vec<usize>) -> Result<(), SortError> {
    let actual = match t {
        Term::Binary(_, l, r) => {
            path.push(0);
            check_term(l, Sort::Integer, path)?;
            path.pop();
            path.push(1);
            check_term(r, Sort::Integer, path)?;
            path.pop();
            Sort::Integer
        }
        other => other.sort(),
    };
    if actual.fits(required) {
        Ok(())
    } else {
        Err(SortError {
            path: path.clone(),
            node: term_to_string(t, Style::Ascii),
            reason: format!("{actual} term where {required} is required"),
        })
    }
}
