//! Interpretations induced by atom sets and formula evaluation over them.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, Sort, Term, Variable};
use crate::solve::{GroundAtom, IntWindow};
use crate::syntax::Relation;
use crate::term::Precomputed;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelCheckError {
    #[error("atom {0} lies outside the universe")]
    AtomOutsideUniverse(String),
    #[error("free variable {0} has no value")]
    FreeVariable(String),
    #[error("integer overflow while evaluating {0}")]
    Overflow(String),
}

/// The interpretation `S↑` restricted to a finite universe: numerals of the
/// window and a set of symbolic constants. Every precomputed term denotes
/// itself and arithmetic and comparisons are the standard ones.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub window: IntWindow,
    pub constants: BTreeSet<String>,
    atoms: HashSet<GroundAtom>,
}

pub fn lift(
    s: impl IntoIterator<Item = GroundAtom>,
    w: IntWindow,
    consts: &BTreeSet<String>,
) -> Result<Interpretation, ModelCheckError> {
    let mut atoms = HashSet::new();
    for a in s {
        if !a.within(w, consts) {
            return Err(ModelCheckError::AtomOutsideUniverse(a.to_string()));
        }
        atoms.insert(a);
    }
    Ok(Interpretation {
        window: w,
        constants: consts.clone(),
        atoms,
    })
}

/// Truth value of a sentence, flagged when some value left the universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub holds: bool,
    /// Arithmetic or an equation produced a value outside the window; the
    /// truth value was computed with that value.
    pub boundary_warning: bool,
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.holds, self.boundary_warning) {
            (v, false) => write!(f, "{v}"),
            (v, true) => write!(f, "boundary_warning({v})"),
        }
    }
}

impl Interpretation {
    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    fn universe(&self, sort: Sort) -> impl Iterator<Item = Precomputed> + '_ {
        let symbols = match sort {
            Sort::General => Some(self.constants.iter().map(Precomputed::symbol)),
            Sort::Integer => None,
        };
        self.window
            .numerals()
            .map(Precomputed::Numeral)
            .chain(symbols.into_iter().flatten())
    }

    fn in_universe(&self, v: &Precomputed) -> bool {
        match v {
            Precomputed::Numeral(n) => self.window.contains(*n),
            Precomputed::Symbol(s) => self.constants.contains(s),
        }
    }

    pub fn eval(&self, f: &Formula) -> Result<Evaluation, ModelCheckError> {
        self.eval_with(f, &HashMap::new())
    }

    /// Evaluates `f` with its free variables taken from `env`.
    pub fn eval_with(
        &self,
        f: &Formula,
        env: &HashMap<Variable, Precomputed>,
    ) -> Result<Evaluation, ModelCheckError> {
        if let Some(v) = f
            .free_variables()
            .into_iter()
            .find(|v| !env.contains_key(v))
        {
            return Err(ModelCheckError::FreeVariable(v.name));
        }
        let mut e = Evaluator {
            i: self,
            env: env.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            boundary: false,
        };
        let holds = e.formula(f)?;
        Ok(Evaluation {
            holds,
            boundary_warning: e.boundary,
        })
    }
}

type Env = Vec<(Variable, Precomputed)>;

struct Evaluator<'a> {
    i: &'a Interpretation,
    env: Env,
    boundary: bool,
}

/// Conjuncts of a formula, looking through nested conjunctions.
fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(parts) => parts.iter().flat_map(conjuncts).collect(),
        other => vec![other],
    }
}

fn lookup<'e>(env: &'e Env, v: &Variable) -> Option<&'e Precomputed> {
    env.iter().rev().find(|(w, _)| w == v).map(|(_, val)| val)
}

impl Evaluator<'_> {
    fn term(&mut self, t: &Term, env: &Env) -> Result<Option<Precomputed>, ModelCheckError> {
        Ok(Some(match t {
            Term::Numeral(n) => Precomputed::Numeral(*n),
            Term::Symbol(s) => Precomputed::Symbol(s.clone()),
            Term::Var(v) => match lookup(env, v) {
                Some(val) => val.clone(),
                None => return Ok(None),
            },
            Term::Binary(op, l, r) => {
                let (Some(a), Some(b)) = (self.term(l, env)?, self.term(r, env)?) else {
                    return Ok(None);
                };
                let (Some(a), Some(b)) = (a.as_numeral(), b.as_numeral()) else {
                    // only reachable for ill-sorted input
                    return Ok(None);
                };
                let n = op
                    .apply(a, b)
                    .ok_or_else(|| ModelCheckError::Overflow(format!("{a} {} {b}", op.symbol())))?;
                if !self.i.window.contains(n) {
                    self.boundary = true;
                }
                Precomputed::Numeral(n)
            }
        }))
    }

    fn value(&mut self, t: &Term) -> Result<Precomputed, ModelCheckError> {
        let env = std::mem::take(&mut self.env);
        let v = self.term(t, &env);
        self.env = env;
        match v? {
            Some(v) => Ok(v),
            None => Err(ModelCheckError::FreeVariable(
                t.variables()
                    .first()
                    .map(|v| v.name.clone())
                    .unwrap_or_default(),
            )),
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<bool, ModelCheckError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { predicate, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.value(a)?);
                }
                self.i.holds(&GroundAtom::new(predicate.clone(), values))
            }
            Formula::Compare { lhs, rel, rhs } => {
                let (a, b) = (self.value(lhs)?, self.value(rhs)?);
                rel.holds(&a, &b)
            }
            Formula::Not(g) => !self.formula(g)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.formula(g)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.formula(g)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.formula(a)? || self.formula(b)?,
            Formula::Iff(a, b) => self.formula(a)? == self.formula(b)?,
            Formula::Exists(vs, body) => self.exists(vs, body)?,
            Formula::Forall(vs, body) => match body.as_ref() {
                Formula::Not(inner) => !self.exists(vs, inner)?,
                _ => self.forall(vs, body)?,
            },
        })
    }

    fn forall(&mut self, vs: &[Variable], body: &Formula) -> Result<bool, ModelCheckError> {
        let Some((v, rest)) = vs.split_first() else {
            return self.formula(body);
        };
        let values: Vec<Precomputed> = self.i.universe(v.sort).collect();
        for val in values {
            self.env.push((v.clone(), val));
            let ok = self.forall(rest, body);
            self.env.pop();
            if !ok? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `∃vs body`. A variable fixed by an equation among the conjuncts takes
    /// that value, even outside the universe; the others range over it.
    fn exists(&mut self, vs: &[Variable], body: &Formula) -> Result<bool, ModelCheckError> {
        let parts = conjuncts(body);
        let mut remaining: Vec<Variable> = vs.to_vec();
        // later binders shadow earlier ones with the same name
        let mut seen = HashSet::new();
        for k in (0..remaining.len()).rev() {
            if !seen.insert(remaining[k].clone()) {
                remaining.remove(k);
            }
        }
        self.assign(&mut remaining, &parts, body)
    }

    fn assign(
        &mut self,
        remaining: &mut Vec<Variable>,
        parts: &[&Formula],
        body: &Formula,
    ) -> Result<bool, ModelCheckError> {
        if remaining.is_empty() {
            return self.formula(body);
        }
        // prune with conjuncts that no longer mention unassigned variables
        for part in parts {
            let free = part.free_variables();
            if free.iter().all(|v| !remaining.contains(v)) && !self.formula(part)? {
                return Ok(false);
            }
        }
        for k in 0..remaining.len() {
            let v = remaining[k].clone();
            let pinned = {
                let others: Vec<Variable> =
                    remaining.iter().filter(|w| **w != v).cloned().collect();
                let env = self.env.clone();
                self.pin(&v, parts, &others, &env, &mut Vec::new())?
            };
            if let Some(val) = pinned {
                remaining.remove(k);
                let result = self.try_value(&v, val, remaining, parts, body);
                remaining.insert(k, v);
                return result;
            }
        }
        let k = (0..remaining.len())
            .find(|&k| !statically_pinnable(&remaining[k], parts))
            .unwrap_or(0);
        let v = remaining.remove(k);
        let values: Vec<Precomputed> = self.i.universe(v.sort).collect();
        let mut result = Ok(false);
        for val in values {
            match self.try_value(&v, val, remaining, parts, body) {
                Ok(false) => {}
                other => {
                    result = other;
                    break;
                }
            }
        }
        remaining.insert(k, v);
        result
    }

    fn try_value(
        &mut self,
        v: &Variable,
        val: Precomputed,
        remaining: &mut Vec<Variable>,
        parts: &[&Formula],
        body: &Formula,
    ) -> Result<bool, ModelCheckError> {
        if v.sort == Sort::Integer && !val.is_numeral() {
            return Ok(false);
        }
        if !self.i.in_universe(&val) {
            self.boundary = true;
        }
        self.env.push((v.clone(), val));
        let result = self.assign(remaining, parts, body);
        self.env.pop();
        result
    }

    /// A value for `v` forced by an equation `v = t` among `parts`, where
    /// `t` can be evaluated in `env` once the variables bound by enclosing
    /// nested quantifiers are themselves resolved by equations. Variables in
    /// `blocked` are unknown.
    fn pin(
        &mut self,
        v: &Variable,
        parts: &[&Formula],
        blocked: &[Variable],
        env: &Env,
        visiting: &mut Vec<Variable>,
    ) -> Result<Option<Precomputed>, ModelCheckError> {
        if visiting.contains(v) {
            return Ok(None);
        }
        visiting.push(v.clone());
        let result = self.pin_inner(v, parts, blocked, env, visiting);
        visiting.pop();
        result
    }

    fn pin_inner(
        &mut self,
        v: &Variable,
        parts: &[&Formula],
        blocked: &[Variable],
        env: &Env,
        visiting: &mut Vec<Variable>,
    ) -> Result<Option<Precomputed>, ModelCheckError> {
        for part in parts {
            match part {
                Formula::Compare {
                    lhs,
                    rel: Relation::Eq,
                    rhs,
                } => {
                    for (side, t) in [(lhs, rhs), (rhs, lhs)] {
                        if !matches!(side, Term::Var(w) if w == v) || t.contains(v) {
                            continue;
                        }
                        if let Some(val) = self.solve_term(t, parts, blocked, env, visiting)? {
                            return Ok(Some(val));
                        }
                    }
                }
                Formula::Exists(ws, inner) => {
                    if ws.contains(v) {
                        continue;
                    }
                    // inner variables become solvable, shadowing outer ones
                    let inner_parts = conjuncts(inner);
                    let scope: Env = env
                        .iter()
                        .filter(|(w, _)| !ws.contains(w))
                        .cloned()
                        .collect();
                    let blocked: Vec<Variable> = blocked
                        .iter()
                        .filter(|w| !ws.contains(w))
                        .cloned()
                        .collect();
                    if let Some(val) =
                        self.pin_inner(v, &inner_parts, &blocked, &scope, visiting)?
                    {
                        return Ok(Some(val));
                    }
                }
                _ => {}
            }
        }
        Ok(None)
    }

    /// Evaluates `t`, resolving its unknown variables by further pins.
    fn solve_term(
        &mut self,
        t: &Term,
        parts: &[&Formula],
        blocked: &[Variable],
        env: &Env,
        visiting: &mut Vec<Variable>,
    ) -> Result<Option<Precomputed>, ModelCheckError> {
        let mut env = env.clone();
        for u in t.variables() {
            if lookup(&env, &u).is_some() && !blocked.contains(&u) {
                continue;
            }
            if blocked.contains(&u) {
                return Ok(None);
            }
            match self.pin(&u, parts, blocked, &env, visiting)? {
                Some(val) if u.sort == Sort::General || val.is_numeral() => env.push((u, val)),
                _ => return Ok(None),
            }
        }
        self.term(t, &env)
    }
}

/// Whether some equation among `parts` could fix `v` once the other
/// variables have values.
fn statically_pinnable(v: &Variable, parts: &[&Formula]) -> bool {
    parts.iter().any(|part| match part {
        Formula::Compare {
            lhs,
            rel: Relation::Eq,
            rhs,
        } => [(lhs, rhs), (rhs, lhs)]
            .into_iter()
            .any(|(side, t)| matches!(side, Term::Var(w) if w == v) && !t.contains(v)),
        Formula::Exists(ws, inner) => !ws.contains(v) && statically_pinnable(v, &conjuncts(inner)),
        _ => false,
    })
}
