//! Two-sorted first-order formulas.
//!
//! The signature has a sort `general` and its subsort `integer`. Numerals are
//! integer-sorted object constants, symbolic constants are general-sorted,
//! and `+`, `-`, `*` take and return integers. Predicate and comparison
//! arguments are general, so integer terms are admitted there via the subsort.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::syntax::{BinOp, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sort {
    General,
    Integer,
}

impl Sort {
    /// Whether a term of sort `self` may stand where `required` is expected.
    pub fn fits(self, required: Sort) -> bool {
        self == required || required == Sort::General
    }

    /// Default sort of a variable name: `I`..`N` are integer, everything else general.
    pub fn from_name(name: &str) -> Sort {
        match name.chars().next() {
            Some('I'..='N') => Sort::Integer,
            _ => Sort::General,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::General => "general",
            Sort::Integer => "integer",
        })
    }
}

/// A sorted variable. Two variables are the same iff name and sort agree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

impl Variable {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Variable {
            name: name.into(),
            sort,
        }
    }

    pub fn general(name: impl Into<String>) -> Self {
        Variable::new(name, Sort::General)
    }

    pub fn integer(name: impl Into<String>) -> Self {
        Variable::new(name, Sort::Integer)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Numeral(i64),
    Symbol(String),
    Var(Variable),
    Binary(BinOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(v: &Variable) -> Term {
        Term::Var(v.clone())
    }

    pub fn binary(op: BinOp, lhs: Term, rhs: Term) -> Term {
        Term::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Sort of the term, assuming it is well-sorted.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Numeral(_) | Term::Binary(..) => Sort::Integer,
            Term::Symbol(_) => Sort::General,
            Term::Var(v) => v.sort,
        }
    }

    pub fn collect_variables(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Numeral(_) | Term::Symbol(_) => {}
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Binary(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    pub fn contains(&self, v: &Variable) -> bool {
        match self {
            Term::Numeral(_) | Term::Symbol(_) => false,
            Term::Var(w) => w == v,
            Term::Binary(_, l, r) => l.contains(v) || r.contains(v),
        }
    }

    pub fn substitute(&self, map: &HashMap<Variable, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Binary(op, l, r) => Term::binary(*op, l.substitute(map), r.substitute(map)),
            _ => self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom { predicate: String, args: Vec<Term> },
    Compare { lhs: Term, rel: Relation, rhs: Term },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Variable>, Box<Formula>),
    Exists(Vec<Variable>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn compare(lhs: Term, rel: Relation, rhs: Term) -> Formula {
        Formula::Compare { lhs, rel, rhs }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::compare(lhs, Relation::Eq, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction that splices nested conjunctions and drops `true`.
    /// An empty conjunction is `true`; a singleton is its element.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction; an empty disjunction is `false`, a singleton its element.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out: Vec<Formula> = parts.into_iter().collect();
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    /// `∀vars body`, or just `body` when `vars` is empty.
    pub fn forall(vars: Vec<Variable>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    /// `∃vars body`, or just `body` when `vars` is empty.
    pub fn exists(vars: Vec<Variable>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut Vec<Variable>) {
        let term = |t: &Term, bound: &Vec<Variable>, out: &mut Vec<Variable>| {
            for v in t.variables() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, bound, out)),
            Formula::Compare { lhs, rhs, .. } => {
                term(lhs, bound, out);
                term(rhs, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Universal closure over the free variables, in order of first occurrence.
    pub fn universal_closure(self) -> Formula {
        let free = self.free_variables();
        Formula::forall(free, self)
    }

    /// Every variable occurring in the formula, free or bound.
    pub fn all_variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit_all_variables(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_all_variables(&self, f: &mut impl FnMut(&Variable)) {
        let term = |t: &Term, f: &mut dyn FnMut(&Variable)| {
            for v in t.variables() {
                f(&v);
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, f)),
            Formula::Compare { lhs, rhs, .. } => {
                term(lhs, f);
                term(rhs, f);
            }
            Formula::Not(g) => g.visit_all_variables(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_all_variables(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_all_variables(f);
                b.visit_all_variables(f);
            }
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                vs.iter().for_each(&mut *f);
                g.visit_all_variables(f);
            }
        }
    }

    /// Predicate symbols `(name, arity)` in order of first occurrence.
    pub fn predicates(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Formula::Atom { predicate, args } => {
                let key = (predicate.clone(), args.len());
                if !out.contains(&key) {
                    out.push(key);
                }
            }
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => {
                f.collect_predicates(out)
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_predicates(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_predicates(out);
                b.collect_predicates(out);
            }
            _ => {}
        }
    }

    /// Capture-avoiding substitution of free variables.
    ///
    /// Returns `None` if some replacement term would be captured by a
    /// quantifier inside the formula.
    pub fn substitute(&self, map: &HashMap<Variable, Term>) -> Option<Formula> {
        Some(match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom { predicate, args } => Formula::Atom {
                predicate: predicate.clone(),
                args: args.iter().map(|t| t.substitute(map)).collect(),
            },
            Formula::Compare { lhs, rel, rhs } => Formula::Compare {
                lhs: lhs.substitute(map),
                rel: *rel,
                rhs: rhs.substitute(map),
            },
            Formula::Not(f) => Formula::not(f.substitute(map)?),
            Formula::And(fs) => Formula::And(
                fs.iter()
                    .map(|f| f.substitute(map))
                    .collect::<Option<Vec<_>>>()?,
            ),
            Formula::Or(fs) => Formula::Or(
                fs.iter()
                    .map(|f| f.substitute(map))
                    .collect::<Option<Vec<_>>>()?,
            ),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map)?, b.substitute(map)?),
            Formula::Iff(a, b) => Formula::iff(a.substitute(map)?, b.substitute(map)?),
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let inner: HashMap<Variable, Term> = map
                    .iter()
                    .filter(|(k, _)| !vs.contains(k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let free_here = f.free_variables();
                for (k, t) in &inner {
                    if free_here.contains(k) && vs.iter().any(|v| t.contains(v)) {
                        return None;
                    }
                }
                let body = Box::new(f.substitute(&inner)?);
                match self {
                    Formula::Forall(..) => Formula::Forall(vs.clone(), body),
                    _ => Formula::Exists(vs.clone(), body),
                }
            }
        })
    }
}

/// Deterministic fresh-name supply: `prefix1`, `prefix2`, ... skipping taken names.
#[derive(Clone, Debug, Default)]
pub struct NameGen {
    taken: BTreeSet<String>,
    counters: HashMap<String, usize>,
}

impl NameGen {
    pub fn new<I, S>(taken: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        NameGen {
            taken: taken.into_iter().map(Into::into).collect(),
            counters: HashMap::new(),
        }
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.taken.insert(name.into());
    }

    pub fn fresh_name(&mut self, prefix: &str) -> String {
        let counter = self.counters.entry(prefix.to_string()).or_insert(0);
        loop {
            *counter += 1;
            let candidate = format!("{prefix}{counter}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn fresh(&mut self, prefix: &str, sort: Sort) -> Variable {
        Variable::new(self.fresh_name(prefix), sort)
    }
}

/// Alpha-equivalence up to associativity of `∧`/`∨`, merging of adjacent
/// quantifier blocks of the same kind, and symmetry of `=` and `≠`.
pub fn alpha_equivalent(a: &Formula, b: &Formula) -> bool {
    let a = normalize(a);
    let b = normalize(b);
    let mut env = Vec::new();
    alpha_eq(&a, &b, &mut env)
}

fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::And(fs) => {
            let mut out = Vec::new();
            for g in fs.iter().map(normalize) {
                match g {
                    Formula::And(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            Formula::And(out)
        }
        Formula::Or(fs) => {
            let mut out = Vec::new();
            for g in fs.iter().map(normalize) {
                match g {
                    Formula::Or(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            Formula::Or(out)
        }
        Formula::Not(g) => Formula::not(normalize(g)),
        Formula::Implies(a, b) => Formula::implies(normalize(a), normalize(b)),
        Formula::Iff(a, b) => Formula::iff(normalize(a), normalize(b)),
        Formula::Forall(vs, g) => {
            let mut vars = vs.clone();
            let mut body = normalize(g);
            while let Formula::Forall(inner, rest) = body {
                vars.extend(inner);
                body = *rest;
            }
            Formula::forall(vars, body)
        }
        Formula::Exists(vs, g) => {
            let mut vars = vs.clone();
            let mut body = normalize(g);
            while let Formula::Exists(inner, rest) = body {
                vars.extend(inner);
                body = *rest;
            }
            Formula::exists(vars, body)
        }
        other => other.clone(),
    }
}

fn alpha_eq(a: &Formula, b: &Formula, env: &mut Vec<(Variable, Variable)>) -> bool {
    match (a, b) {
        (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
        (
            Formula::Atom {
                predicate: p,
                args: xs,
            },
            Formula::Atom {
                predicate: q,
                args: ys,
            },
        ) => p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env)),
        (
            Formula::Compare {
                lhs: l1,
                rel: r1,
                rhs: h1,
            },
            Formula::Compare {
                lhs: l2,
                rel: r2,
                rhs: h2,
            },
        ) => {
            if r1 != r2 {
                return false;
            }
            let straight = term_eq(l1, l2, env) && term_eq(h1, h2, env);
            straight
                || (matches!(r1, Relation::Eq | Relation::Ne)
                    && term_eq(l1, h2, env)
                    && term_eq(h1, l2, env))
        }
        (Formula::Not(x), Formula::Not(y)) => alpha_eq(x, y, env),
        (Formula::And(xs), Formula::And(ys)) | (Formula::Or(xs), Formula::Or(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq(x, y, env))
        }
        (Formula::Implies(a1, b1), Formula::Implies(a2, b2))
        | (Formula::Iff(a1, b1), Formula::Iff(a2, b2)) => {
            alpha_eq(a1, a2, env) && alpha_eq(b1, b2, env)
        }
        (Formula::Forall(v1, f1), Formula::Forall(v2, f2))
        | (Formula::Exists(v1, f1), Formula::Exists(v2, f2)) => {
            if v1.len() != v2.len() || v1.iter().zip(v2).any(|(x, y)| x.sort != y.sort) {
                return false;
            }
            let depth = env.len();
            env.extend(v1.iter().cloned().zip(v2.iter().cloned()));
            let result = alpha_eq(f1, f2, env);
            env.truncate(depth);
            result
        }
        _ => false,
    }
}

fn term_eq(a: &Term, b: &Term, env: &[(Variable, Variable)]) -> bool {
    match (a, b) {
        (Term::Numeral(m), Term::Numeral(n)) => m == n,
        (Term::Symbol(s), Term::Symbol(t)) => s == t,
        (Term::Var(x), Term::Var(y)) => {
            // innermost binding wins
            let bx = env.iter().rposition(|(l, _)| l == x);
            let by = env.iter().rposition(|(_, r)| r == y);
            match (bx, by) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Binary(o1, l1, r1), Term::Binary(o2, l2, r2)) => {
            o1 == o2 && term_eq(l1, l2, env) && term_eq(r1, r2, env)
        }
        _ => false,
    }
}
