//! Abstract syntax of regular programs.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// Binary arithmetic operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn apply(self, lhs: i64, rhs: i64) -> Option<i64> {
        match self {
            BinOp::Add => lhs.checked_add(rhs),
            BinOp::Sub => lhs.checked_sub(rhs),
            BinOp::Mul => lhs.checked_mul(rhs),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

/// Comparison symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Relation {
    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    /// The relation with its arguments swapped: `a < b` iff `b > a`.
    pub fn flip(self) -> Relation {
        match self {
            Relation::Eq => Relation::Eq,
            Relation::Ne => Relation::Ne,
            Relation::Lt => Relation::Gt,
            Relation::Gt => Relation::Lt,
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
        }
    }

    /// The complementary relation: `not (a < b)` iff `a >= b`.
    pub fn negate(self) -> Relation {
        match self {
            Relation::Eq => Relation::Ne,
            Relation::Ne => Relation::Eq,
            Relation::Lt => Relation::Ge,
            Relation::Gt => Relation::Le,
            Relation::Le => Relation::Gt,
            Relation::Ge => Relation::Lt,
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }

    pub fn unicode(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "≠",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Le => "≤",
            Relation::Ge => "≥",
        }
    }
}

/// Term built from numerals and variables with `+`, `-` and `*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegularTerm {
    Numeral(i64),
    Variable(String),
    Binary(BinOp, Box<RegularTerm>, Box<RegularTerm>),
}

impl RegularTerm {
    pub fn var(name: impl Into<String>) -> Self {
        RegularTerm::Variable(name.into())
    }

    pub fn binary(op: BinOp, lhs: RegularTerm, rhs: RegularTerm) -> Self {
        RegularTerm::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn is_arithmetic(&self) -> bool {
        matches!(self, RegularTerm::Binary(..))
    }

    /// Variables in order of first occurrence, appended to `out`.
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            RegularTerm::Numeral(_) => {}
            RegularTerm::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            RegularTerm::Binary(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    pub fn collect_numerals(&self, out: &mut BTreeSet<i64>) {
        match self {
            RegularTerm::Numeral(n) => {
                out.insert(*n);
            }
            RegularTerm::Variable(_) => {}
            RegularTerm::Binary(_, l, r) => {
                l.collect_numerals(out);
                r.collect_numerals(out);
            }
        }
    }
}

/// Argument of an atom or side of a relational comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArgTerm {
    Symbol(String),
    Regular(RegularTerm),
}

impl ArgTerm {
    pub fn var(name: impl Into<String>) -> Self {
        ArgTerm::Regular(RegularTerm::var(name))
    }

    pub fn numeral(n: i64) -> Self {
        ArgTerm::Regular(RegularTerm::Numeral(n))
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        ArgTerm::Symbol(name.into())
    }

    pub fn as_variable(&self) -> Option<&str> {
        match self {
            ArgTerm::Regular(RegularTerm::Variable(v)) => Some(v),
            _ => None,
        }
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        if let ArgTerm::Regular(t) = self {
            t.collect_variables(out);
        }
    }
}

impl From<RegularTerm> for ArgTerm {
    fn from(t: RegularTerm) -> Self {
        ArgTerm::Regular(t)
    }
}

/// Predicate symbol `p/n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PredicateSymbol {
    pub name: String,
    pub arity: usize,
}

impl PredicateSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        PredicateSymbol {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegularAtom {
    pub predicate: String,
    pub args: Vec<ArgTerm>,
}

impl RegularAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<ArgTerm>) -> Self {
        RegularAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn symbol(&self) -> PredicateSymbol {
        PredicateSymbol::new(self.predicate.clone(), self.args.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Relational {
        lhs: ArgTerm,
        rel: Relation,
        rhs: ArgTerm,
    },
    /// `lhs = low..high`
    Interval {
        lhs: RegularTerm,
        low: RegularTerm,
        high: RegularTerm,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BodyLiteral {
    Positive(RegularAtom),
    Negated(RegularAtom),
    Comparison(Comparison),
}

impl BodyLiteral {
    pub fn atom(&self) -> Option<&RegularAtom> {
        match self {
            BodyLiteral::Positive(a) | BodyLiteral::Negated(a) => Some(a),
            BodyLiteral::Comparison(_) => None,
        }
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            BodyLiteral::Positive(a) | BodyLiteral::Negated(a) => {
                a.args.iter().for_each(|t| t.collect_variables(out))
            }
            BodyLiteral::Comparison(Comparison::Relational { lhs, rhs, .. }) => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
            BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => {
                lhs.collect_variables(out);
                low.collect_variables(out);
                high.collect_variables(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Basic(RegularAtom),
    Choice(RegularAtom),
    /// Constraint.
    None,
}

impl Head {
    pub fn atom(&self) -> Option<&RegularAtom> {
        match self {
            Head::Basic(a) | Head::Choice(a) => Some(a),
            Head::None => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyLiteral>,
}

impl Rule {
    pub fn new(head: Head, body: Vec<BodyLiteral>) -> Self {
        Rule { head, body }
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self.head, Head::None)
    }

    /// All variables of the rule in textual order (head first).
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(atom) = self.head.atom() {
            atom.args.iter().for_each(|t| t.collect_variables(&mut out));
        }
        self.body.iter().for_each(|l| l.collect_variables(&mut out));
        out
    }

    pub fn atoms(&self) -> impl Iterator<Item = &RegularAtom> {
        self.head
            .atom()
            .into_iter()
            .chain(self.body.iter().filter_map(BodyLiteral::atom))
    }
}

/// A finite, ordered list of regular rules.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Predicate symbols occurring in the program, in order of first occurrence.
    pub fn predicate_symbols(&self) -> Vec<PredicateSymbol> {
        let mut out: Vec<PredicateSymbol> = Vec::new();
        for atom in self.rules.iter().flat_map(Rule::atoms) {
            let sym = atom.symbol();
            if !out.contains(&sym) {
                out.push(sym);
            }
        }
        out
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.rules.iter().flat_map(|r| r.variables()).collect()
    }

    /// Symbolic constants occurring as arguments of atoms or comparisons.
    pub fn symbolic_constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut visit = |t: &ArgTerm| {
            if let ArgTerm::Symbol(s) = t {
                out.insert(s.clone());
            }
        };
        for rule in &self.rules {
            for atom in rule.atoms() {
                atom.args.iter().for_each(&mut visit);
            }
            for lit in &rule.body {
                if let BodyLiteral::Comparison(Comparison::Relational { lhs, rhs, .. }) = lit {
                    visit(lhs);
                    visit(rhs);
                }
            }
        }
        out
    }

    pub fn numerals(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        let visit_arg = |t: &ArgTerm, out: &mut BTreeSet<i64>| {
            if let ArgTerm::Regular(r) = t {
                r.collect_numerals(out);
            }
        };
        for rule in &self.rules {
            for atom in rule.atoms() {
                atom.args.iter().for_each(|t| visit_arg(t, &mut out));
            }
            for lit in &rule.body {
                match lit {
                    BodyLiteral::Comparison(Comparison::Relational { lhs, rhs, .. }) => {
                        visit_arg(lhs, &mut out);
                        visit_arg(rhs, &mut out);
                    }
                    BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => {
                        lhs.collect_numerals(&mut out);
                        low.collect_numerals(&mut out);
                        high.collect_numerals(&mut out);
                    }
                    _ => {}
                }
            }
        }
        out
    }

    /// Rules whose head is `p(t)` or `{p(t)}` with `p/n` equal to `sym`.
    pub fn definition<'a>(
        &'a self,
        sym: &'a PredicateSymbol,
    ) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.head.atom().is_some_and(|a| a.symbol() == *sym))
    }

    pub fn constraints(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_constraint())
    }
}
