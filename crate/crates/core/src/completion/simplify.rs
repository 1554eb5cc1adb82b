use std::collections::HashMap;

use crate::formula::{Formula, Sort, Term, Variable};
use crate::syntax::Relation;

/// A conservative simplifier producing a classically equivalent formula.
///
/// Rewrites applied, bottom-up until nothing changes: double negation,
/// the unit laws of `∧`/`∨`, elimination of `∃X(X = t ∧ G)` when the sort of
/// `t` fits `X`, and `p(V) ↔ (G ∧ p(V))` to `p(V) → G`.
pub fn simplify(f: &Formula) -> Formula {
    let mut current = f.clone();
    loop {
        let next = step(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn step(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => {
            f.clone()
        }
        Formula::Not(g) => match step(g) {
            Formula::Not(inner) => *inner,
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            other => Formula::not(other),
        },
        Formula::And(gs) => {
            let mut parts = Vec::new();
            for g in gs.iter().map(step) {
                match g {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::And(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            Formula::conjunction(parts)
        }
        Formula::Or(gs) => {
            let mut parts = Vec::new();
            for g in gs.iter().map(step) {
                match g {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            Formula::disjunction(parts)
        }
        Formula::Implies(a, b) => Formula::implies(step(a), step(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (step(a), step(b));
            if let (Formula::Atom { .. }, Formula::And(parts)) = (&a, &b) {
                if let Some(k) = parts.iter().position(|p| *p == a) {
                    let mut rest = parts.clone();
                    rest.remove(k);
                    return Formula::implies(a, Formula::conjunction(rest));
                }
            }
            Formula::iff(a, b)
        }
        Formula::Forall(vs, g) => Formula::forall(vs.clone(), step(g)),
        Formula::Exists(vs, g) => eliminate_equalities(vs.clone(), step(g)),
    }
}

/// Removes variables of an existential block that are fixed by an
/// equation among the top-level conjuncts.
fn eliminate_equalities(mut vs: Vec<Variable>, body: Formula) -> Formula {
    let mut conjuncts = match body {
        Formula::And(parts) => parts,
        other => vec![other],
    };
    while let Some((_, x, rest)) = find_elimination(&vs, &conjuncts) {
        vs.retain(|v| *v != x);
        conjuncts = rest;
    }
    Formula::exists(vs, Formula::conjunction(conjuncts))
}

/// Finds an equation `X = t` among `conjuncts` with `X` in `vs` whose
/// substitution into the other conjuncts is capture-free.
fn find_elimination(
    vs: &[Variable],
    conjuncts: &[Formula],
) -> Option<(usize, Variable, Vec<Formula>)> {
    for (k, c) in conjuncts.iter().enumerate() {
        let Formula::Compare {
            lhs,
            rel: Relation::Eq,
            rhs,
        } = c
        else {
            continue;
        };
        for (var_side, other) in [(lhs, rhs), (rhs, lhs)] {
            let Term::Var(x) = var_side else { continue };
            if !vs.contains(x) || other.contains(x) || !fits(other, x) {
                continue;
            }
            let map = HashMap::from([(x.clone(), other.clone())]);
            let rest: Option<Vec<Formula>> = conjuncts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, g)| g.substitute(&map))
                .collect();
            if let Some(rest) = rest {
                return Some((k, x.clone(), rest));
            }
        }
    }
    None
}

fn fits(t: &Term, x: &Variable) -> bool {
    x.sort == Sort::General || t.sort() == Sort::Integer
}
