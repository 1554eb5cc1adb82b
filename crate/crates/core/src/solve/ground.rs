//! Instantiation of regular programs over a bounded integer window.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::syntax::{
    ArgTerm, BinOp, BodyLiteral, Comparison, Head, PredicateSymbol, Program, RegularAtom,
    RegularTerm, Relation, Rule,
};
use crate::term::Precomputed;

/// The finite stand-in for the integer sort: numerals `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IntWindow {
    /// Panics if `lo > hi`.
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty integer window {lo}..{hi}");
        IntWindow { lo, hi }
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn width(&self) -> u64 {
        self.hi.abs_diff(self.lo) + 1
    }

    pub fn numerals(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// `[min - 1, max + 1]` over the numerals of `p`, or `[0, 0]` if there are none.
    pub fn around(p: &Program) -> IntWindow {
        let numerals = p.numerals();
        match (numerals.first(), numerals.last()) {
            (Some(lo), Some(hi)) => IntWindow::new(lo.saturating_sub(1), hi.saturating_add(1)),
            _ => IntWindow::new(0, 0),
        }
    }
}

impl fmt::Display for IntWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// An atom whose arguments are precomputed terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Precomputed>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Precomputed>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn symbol(&self) -> PredicateSymbol {
        PredicateSymbol::new(self.predicate.clone(), self.args.len())
    }

    /// Whether every numeral argument lies in `w` and every symbolic one in `consts`.
    pub fn within(&self, w: IntWindow, consts: &BTreeSet<String>) -> bool {
        self.args.iter().all(|a| match a {
            Precomputed::Numeral(n) => w.contains(*n),
            Precomputed::Symbol(s) => consts.contains(s),
        })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

pub type AtomId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroundHead {
    Basic(AtomId),
    Choice(AtomId),
    None,
}

impl GroundHead {
    pub fn atom(&self) -> Option<AtomId> {
        match self {
            GroundHead::Basic(a) | GroundHead::Choice(a) => Some(*a),
            GroundHead::None => None,
        }
    }
}

/// A rule without variables; comparisons have been evaluated away.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: GroundHead,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroundWarning {
    /// Instances of a rule were dropped because a head argument fell outside the window.
    WindowTooSmall {
        rule: usize,
        dropped: usize,
        example: String,
    },
    /// Variables that no literal binds, so they range over the whole window.
    WindowEnumerated { rule: usize, variables: Vec<String> },
    /// Arithmetic overflowed `i64`; the affected instances were discarded.
    Overflow { rule: usize },
}

impl fmt::Display for GroundWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundWarning::WindowTooSmall {
                rule,
                dropped,
                example,
            } => write!(
                f,
                "window_too_small: rule {} lost {dropped} instance(s) with heads outside the window, e.g. {example}",
                rule + 1
            ),
            GroundWarning::WindowEnumerated { rule, variables } => write!(
                f,
                "rule {}: variable(s) {} are not bound by the body and range over the window",
                rule + 1,
                variables.join(", ")
            ),
            GroundWarning::Overflow { rule } => {
                write!(f, "rule {}: integer overflow, instances discarded", rule + 1)
            }
        }
    }
}

/// The instantiated program together with the universe it was built over.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    pub atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    pub rules: Vec<GroundRule>,
    pub warnings: Vec<GroundWarning>,
    pub constants: BTreeSet<String>,
    pub window: Option<IntWindow>,
}

impl GroundProgram {
    pub fn id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = self.atoms.len();
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }

    /// Builds a ground program directly from rules over named atoms.
    pub fn from_rules(
        rules: impl IntoIterator<Item = (Option<(GroundAtom, bool)>, Vec<GroundAtom>, Vec<GroundAtom>)>,
    ) -> Self {
        let mut g = GroundProgram::default();
        for (head, pos, neg) in rules {
            let head = match head {
                Some((a, true)) => GroundHead::Choice(g.intern(a)),
                Some((a, false)) => GroundHead::Basic(g.intern(a)),
                None => GroundHead::None,
            };
            let pos = pos.into_iter().map(|a| g.intern(a)).collect();
            let neg = neg.into_iter().map(|a| g.intern(a)).collect();
            g.rules.push(GroundRule { head, pos, neg });
        }
        g
    }

    /// Atoms occurring as heads, in increasing id order.
    pub fn head_atoms(&self) -> Vec<AtomId> {
        let set: BTreeSet<AtomId> = self.rules.iter().filter_map(|r| r.head.atom()).collect();
        set.into_iter().collect()
    }

    pub fn has_choice(&self) -> bool {
        self.rules
            .iter()
            .any(|r| matches!(r.head, GroundHead::Choice(_)))
    }

    pub fn rule_to_string(&self, r: &GroundRule) -> String {
        let head = match r.head {
            GroundHead::Basic(a) => self.atoms[a].to_string(),
            GroundHead::Choice(a) => format!("{{{}}}", self.atoms[a]),
            GroundHead::None => String::new(),
        };
        let body: Vec<String> = r
            .pos
            .iter()
            .map(|a| self.atoms[*a].to_string())
            .chain(r.neg.iter().map(|a| format!("not {}", self.atoms[*a])))
            .collect();
        match (head.is_empty(), body.is_empty()) {
            (false, true) => format!("{head}."),
            (_, false) => format!("{head} :- {}.", body.join(", ")),
            (true, true) => ":-.".to_string(),
        }
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", self.rule_to_string(r))?;
        }
        Ok(())
    }
}

/// Instantiates `p` with numerals from `w` and the symbolic constants of `p`
/// together with `extra_constants`.
///
/// Variables bound by an equation `X = t` take the value of `t` even outside
/// the window; all other variables range over the universe. An instance in
/// which arithmetic is applied to a symbolic constant is discarded, and an
/// instance whose head leaves the window is dropped with a warning. Atoms
/// that are known to hold in every stable model are removed from bodies, so
/// stratified programs ground to facts.
pub fn ground(p: &Program, w: IntWindow, extra_constants: &BTreeSet<String>) -> GroundProgram {
    let mut constants = p.symbolic_constants();
    constants.extend(extra_constants.iter().cloned());
    let mut state = State {
        g: GroundProgram {
            constants: constants.clone(),
            window: Some(w),
            ..GroundProgram::default()
        },
        possible: HashMap::new(),
        possible_set: HashSet::new(),
        certain: HashSet::new(),
        seen: HashSet::new(),
        dropped: BTreeMap::new(),
        overflow: BTreeSet::new(),
    };
    let consts: Vec<Precomputed> = constants.iter().map(Precomputed::symbol).collect();
    let plans: Vec<Plan> = p.rules.iter().map(|r| Plan::new(r, &consts, w)).collect();
    for (idx, plan) in plans.iter().enumerate() {
        if !plan.window_vars.is_empty() {
            state.g.warnings.push(GroundWarning::WindowEnumerated {
                rule: idx,
                variables: plan.window_vars.clone(),
            });
        }
    }

    for component in components(p) {
        let rules: Vec<usize> = p
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                r.head
                    .atom()
                    .is_some_and(|a| component.members.contains(&a.symbol()))
            })
            .map(|(i, _)| i)
            .collect();
        loop {
            let before = state.possible_count();
            for &idx in &rules {
                state.ground_rule(idx, &plans[idx], &component.members);
            }
            if !component.recursive || state.possible_count() == before {
                break;
            }
        }
    }
    let none = BTreeSet::new();
    for (idx, _) in p.constraints() {
        state.ground_rule(idx, &plans[idx], &none);
    }
    state.finish()
}

struct Component {
    members: BTreeSet<PredicateSymbol>,
    recursive: bool,
}

/// Strongly connected components of the predicate dependency graph with
/// both positive and negative edges, dependencies first.
fn components(p: &Program) -> Vec<Component> {
    let mut graph = DiGraph::<PredicateSymbol, ()>::new();
    let mut nodes = HashMap::new();
    for sym in p.predicate_symbols() {
        nodes.insert(sym.clone(), graph.add_node(sym));
    }
    let mut self_loops = HashSet::new();
    for rule in &p.rules {
        let Some(head) = rule.head.atom() else {
            continue;
        };
        for atom in rule.body.iter().filter_map(BodyLiteral::atom) {
            let (h, b) = (nodes[&head.symbol()], nodes[&atom.symbol()]);
            if h == b {
                self_loops.insert(h);
            }
            graph.update_edge(h, b, ());
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|scc| Component {
            recursive: scc.len() > 1 || self_loops.contains(&scc[0]),
            members: scc.iter().map(|n| graph[*n].clone()).collect(),
        })
        .collect()
}

/// A term with variables replaced by slot numbers.
#[derive(Clone, Debug)]
enum Slot {
    Num(i64),
    Sym(String),
    Var(usize),
    Bin(BinOp, Box<Slot>, Box<Slot>),
}

/// Why a term has no value under an assignment.
#[derive(Debug, PartialEq, Eq)]
enum Undefined {
    /// Arithmetic on a symbolic constant.
    IllFormed,
    Overflow,
}

impl Slot {
    fn from_regular(t: &RegularTerm, vars: &[String]) -> Slot {
        match t {
            RegularTerm::Numeral(n) => Slot::Num(*n),
            RegularTerm::Variable(v) => Slot::Var(vars.iter().position(|w| w == v).unwrap()),
            RegularTerm::Binary(op, l, r) => Slot::Bin(
                *op,
                Box::new(Slot::from_regular(l, vars)),
                Box::new(Slot::from_regular(r, vars)),
            ),
        }
    }

    fn from_arg(t: &ArgTerm, vars: &[String]) -> Slot {
        match t {
            ArgTerm::Symbol(s) => Slot::Sym(s.clone()),
            ArgTerm::Regular(r) => Slot::from_regular(r, vars),
        }
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            Slot::Var(v) => out.push(*v),
            Slot::Bin(_, l, r) => {
                l.collect(out);
                r.collect(out);
            }
            _ => {}
        }
    }

    fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn bare(&self) -> Option<usize> {
        match self {
            Slot::Var(v) => Some(*v),
            _ => None,
        }
    }

    fn value(&self, env: &[Option<Precomputed>]) -> Result<Precomputed, Undefined> {
        match self {
            Slot::Num(n) => Ok(Precomputed::Numeral(*n)),
            Slot::Sym(s) => Ok(Precomputed::Symbol(s.clone())),
            Slot::Var(v) => Ok(env[*v].clone().expect("planned variable is bound")),
            Slot::Bin(op, l, r) => {
                let (Precomputed::Numeral(a), Precomputed::Numeral(b)) =
                    (l.value(env)?, r.value(env)?)
                else {
                    return Err(Undefined::IllFormed);
                };
                op.apply(a, b)
                    .map(Precomputed::Numeral)
                    .ok_or(Undefined::Overflow)
            }
        }
    }

    fn numeral(&self, env: &[Option<Precomputed>]) -> Result<i64, Undefined> {
        self.value(env)?.as_numeral().ok_or(Undefined::IllFormed)
    }

    /// Views the term as `sign * X + rest` for the variable `x`, where `rest`
    /// does not mention `x`.
    fn linear_in(&self, x: usize) -> Option<(i64, Option<&Slot>, bool)> {
        // (sign, rest, rest is subtracted)
        match self {
            Slot::Var(v) if *v == x => Some((1, None, false)),
            Slot::Bin(BinOp::Add, l, r) => match (l.as_ref(), r.as_ref()) {
                (Slot::Var(v), u) | (u, Slot::Var(v)) if *v == x && !u.vars().contains(&x) => {
                    Some((1, Some(u), false))
                }
                _ => None,
            },
            Slot::Bin(BinOp::Sub, l, r) => match (l.as_ref(), r.as_ref()) {
                (Slot::Var(v), u) if *v == x && !u.vars().contains(&x) => Some((1, Some(u), true)),
                (u, Slot::Var(v)) if *v == x && !u.vars().contains(&x) => {
                    Some((-1, Some(u), false))
                }
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Lit {
    Pos(String, Vec<Slot>),
    Neg(String, Vec<Slot>),
    Rel(Slot, Relation, Slot),
    Interval(Slot, Slot, Slot),
}

impl Lit {
    fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        match self {
            Lit::Pos(_, args) | Lit::Neg(_, args) => args.iter().for_each(|a| a.collect(&mut out)),
            Lit::Rel(l, _, r) => {
                l.collect(&mut out);
                r.collect(&mut out);
            }
            Lit::Interval(x, l, h) => {
                x.collect(&mut out);
                l.collect(&mut out);
                h.collect(&mut out);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Step {
    /// A comparison whose variables are all bound.
    Filter(usize),
    BindEq(usize, Slot),
    /// A positive atom; bare unbound arguments get bound by matching.
    Match(usize),
    BindInterval(usize, Slot, Slot),
    /// Enumerate a variable, narrowing its range with the listed comparisons.
    Enumerate(usize, Vec<usize>),
}

#[derive(Clone, Debug)]
struct Plan {
    head: Option<(String, Vec<Slot>, bool)>,
    lits: Vec<Lit>,
    steps: Vec<Step>,
    nvars: usize,
    /// Variables occurring under arithmetic or in an interval: a symbolic
    /// value for them makes the instance ill-formed.
    numeric: Vec<bool>,
    consts: Vec<Precomputed>,
    window: IntWindow,
    window_vars: Vec<String>,
}

impl Plan {
    fn new(rule: &Rule, consts: &[Precomputed], window: IntWindow) -> Plan {
        let vars = rule.variables();
        let head = rule.head.atom().map(|a| {
            (
                a.predicate.clone(),
                a.args.iter().map(|t| Slot::from_arg(t, &vars)).collect(),
                matches!(rule.head, Head::Choice(_)),
            )
        });
        let lits: Vec<Lit> = rule
            .body
            .iter()
            .map(|l| match l {
                BodyLiteral::Positive(a) => Lit::Pos(a.predicate.clone(), args(a, &vars)),
                BodyLiteral::Negated(a) => Lit::Neg(a.predicate.clone(), args(a, &vars)),
                BodyLiteral::Comparison(Comparison::Relational { lhs, rel, rhs }) => {
                    Lit::Rel(Slot::from_arg(lhs, &vars), *rel, Slot::from_arg(rhs, &vars))
                }
                BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => Lit::Interval(
                    Slot::from_regular(lhs, &vars),
                    Slot::from_regular(low, &vars),
                    Slot::from_regular(high, &vars),
                ),
            })
            .collect();
        let numeric = numeric_variables(rule, &vars);
        let mut plan = Plan {
            head,
            lits,
            steps: Vec::new(),
            nvars: vars.len(),
            numeric,
            consts: consts.to_vec(),
            window,
            window_vars: Vec::new(),
        };
        plan.schedule(&vars);
        plan
    }

    fn schedule(&mut self, names: &[String]) {
        let mut bound = vec![false; self.nvars];
        let mut pending: Vec<usize> = (0..self.lits.len())
            .filter(|&i| !matches!(self.lits[i], Lit::Neg(..)))
            .collect();
        let all_bound = |vs: &[usize], bound: &[bool]| vs.iter().all(|v| bound[*v]);
        loop {
            if let Some(k) = pending.iter().position(|&i| {
                matches!(self.lits[i], Lit::Rel(..) | Lit::Interval(..))
                    && all_bound(&self.lits[i].vars(), &bound)
            }) {
                self.steps.push(Step::Filter(pending.remove(k)));
                continue;
            }
            let eq = pending
                .iter()
                .enumerate()
                .find_map(|(k, &i)| match &self.lits[i] {
                    Lit::Rel(l, Relation::Eq, r) => {
                        [(l, r), (r, l)].into_iter().find_map(|(x, t)| {
                            let x = x.bare()?;
                            (!bound[x] && all_bound(&t.vars(), &bound)).then(|| (k, x, t.clone()))
                        })
                    }
                    _ => None,
                });
            if let Some((k, x, t)) = eq {
                pending.remove(k);
                bound[x] = true;
                self.steps.push(Step::BindEq(x, t));
                continue;
            }
            let matchable = pending.iter().position(|&i| match &self.lits[i] {
                Lit::Pos(_, args) => args
                    .iter()
                    .all(|a| a.bare().is_some() || all_bound(&a.vars(), &bound)),
                _ => false,
            });
            if let Some(k) = matchable {
                let i = pending.remove(k);
                self.lits[i]
                    .vars()
                    .into_iter()
                    .for_each(|v| bound[v] = true);
                self.steps.push(Step::Match(i));
                continue;
            }
            let interval = pending
                .iter()
                .enumerate()
                .find_map(|(k, &i)| match &self.lits[i] {
                    Lit::Interval(x, l, h) => {
                        let x = x.bare()?;
                        let ok = !bound[x]
                            && all_bound(&l.vars(), &bound)
                            && all_bound(&h.vars(), &bound);
                        ok.then(|| (k, x, l.clone(), h.clone()))
                    }
                    _ => None,
                });
            if let Some((k, x, l, h)) = interval {
                pending.remove(k);
                bound[x] = true;
                self.steps.push(Step::BindInterval(x, l, h));
                continue;
            }
            let unbound: Vec<usize> = (0..self.nvars).filter(|v| !bound[*v]).collect();
            if unbound.is_empty() {
                debug_assert!(pending.is_empty());
                break;
            }
            let bounds_for = |x: usize| -> Vec<usize> {
                pending
                    .iter()
                    .copied()
                    .filter(|&i| match &self.lits[i] {
                        Lit::Rel(l, _, r) => [(l, r), (r, l)].into_iter().any(|(side, other)| {
                            side.linear_in(x).is_some_and(|(_, rest, _)| {
                                rest.is_none_or(|u| all_bound(&u.vars(), &bound))
                            }) && all_bound(&other.vars(), &bound)
                        }),
                        _ => false,
                    })
                    .collect()
            };
            let x = unbound
                .iter()
                .copied()
                .find(|&x| !bounds_for(x).is_empty())
                .unwrap_or(unbound[0]);
            let bounds = bounds_for(x);
            self.window_vars.push(names[x].clone());
            bound[x] = true;
            self.steps.push(Step::Enumerate(x, bounds));
        }
    }

    /// Candidate values for an enumerated variable.
    fn candidates(
        &self,
        x: usize,
        bounds: &[usize],
        env: &[Option<Precomputed>],
    ) -> Vec<Precomputed> {
        let (mut lo, mut hi) = (self.window.lo, self.window.hi);
        let mut symbols = !self.numeric[x];
        for &i in bounds {
            let Lit::Rel(l, rel, r) = &self.lits[i] else {
                continue;
            };
            for (side, rel, other) in [(l, *rel, r), (r, rel.flip(), l)] {
                let Some((sign, rest, subtracted)) = side.linear_in(x) else {
                    continue;
                };
                let Ok(v) = other.value(env) else { continue };
                let Precomputed::Numeral(v) = v else { continue };
                let c = match rest.map(|u| u.numeral(env)) {
                    None => 0,
                    Some(Ok(c)) if subtracted => -(c as i128) as i64,
                    Some(Ok(c)) => c,
                    Some(Err(_)) => continue,
                };
                // sign * X + c rel v
                let (rel, n) = if sign == 1 {
                    (rel, v as i128 - c as i128)
                } else {
                    (rel.flip(), c as i128 - v as i128)
                };
                let n = n.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
                let bare = rest.is_none() && sign == 1;
                match rel {
                    Relation::Lt => hi = hi.min(n.saturating_sub(1)),
                    Relation::Le => hi = hi.min(n),
                    Relation::Gt => lo = lo.max(n.saturating_add(1)),
                    Relation::Ge => lo = lo.max(n),
                    Relation::Eq => {
                        lo = lo.max(n);
                        hi = hi.min(n);
                    }
                    Relation::Ne => continue,
                }
                if !bare || matches!(rel, Relation::Lt | Relation::Le | Relation::Eq) {
                    symbols = false;
                }
            }
        }
        let mut out: Vec<Precomputed> = if lo <= hi {
            (lo..=hi).map(Precomputed::Numeral).collect()
        } else {
            Vec::new()
        };
        if symbols {
            out.extend(self.consts.iter().cloned());
        }
        out
    }
}

fn args(a: &RegularAtom, vars: &[String]) -> Vec<Slot> {
    a.args.iter().map(|t| Slot::from_arg(t, vars)).collect()
}

fn numeric_variables(rule: &Rule, vars: &[String]) -> Vec<bool> {
    let mut numeric = vec![false; vars.len()];
    let mut mark = |t: &RegularTerm| {
        let mut vs = Vec::new();
        t.collect_variables(&mut vs);
        for v in vs {
            numeric[vars.iter().position(|w| *w == v).unwrap()] = true;
        }
    };
    let visit = |t: &ArgTerm, mark: &mut dyn FnMut(&RegularTerm)| {
        if let ArgTerm::Regular(r) = t {
            if r.is_arithmetic() {
                mark(r);
            }
        }
    };
    for atom in rule.atoms() {
        atom.args.iter().for_each(|t| visit(t, &mut mark));
    }
    for lit in &rule.body {
        match lit {
            BodyLiteral::Comparison(Comparison::Relational { lhs, rhs, .. }) => {
                visit(lhs, &mut mark);
                visit(rhs, &mut mark);
            }
            BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => {
                mark(lhs);
                mark(low);
                mark(high);
            }
            _ => {}
        }
    }
    numeric
}

struct State {
    g: GroundProgram,
    possible: HashMap<PredicateSymbol, Vec<AtomId>>,
    possible_set: HashSet<AtomId>,
    certain: HashSet<AtomId>,
    seen: HashSet<GroundRule>,
    dropped: BTreeMap<usize, (usize, String)>,
    overflow: BTreeSet<usize>,
}

/// One instance found by the enumeration, before interning.
struct Instance {
    head: Option<(GroundAtom, bool)>,
    pos: Vec<AtomId>,
    neg: Vec<GroundAtom>,
}

impl State {
    fn possible_count(&self) -> usize {
        self.possible_set.len()
    }

    fn is_possible(&self, atom: &GroundAtom) -> Option<AtomId> {
        let id = self.g.id(atom)?;
        self.possible_set.contains(&id).then_some(id)
    }

    fn ground_rule(&mut self, idx: usize, plan: &Plan, component: &BTreeSet<PredicateSymbol>) {
        let mut found = Vec::new();
        let mut env = vec![None; plan.nvars];
        let mut pos = Vec::new();
        let mut failure = None;
        {
            let mut search = Search {
                state: self,
                plan,
                component,
                out: &mut found,
                failure: &mut failure,
            };
            search.run(0, &mut env, &mut pos);
        }
        if let Some(Undefined::Overflow) = failure {
            self.overflow.insert(idx);
        }
        for inst in found {
            self.commit(idx, inst, component);
        }
    }

    fn commit(&mut self, idx: usize, inst: Instance, component: &BTreeSet<PredicateSymbol>) {
        let w = self.g.window.expect("window is set while grounding");
        let head = match inst.head {
            Some((atom, choice)) => {
                if !atom.within(w, &self.g.constants) {
                    let entry = self.dropped.entry(idx).or_insert((0, atom.to_string()));
                    entry.0 += 1;
                    return;
                }
                let sym = atom.symbol();
                let id = self.g.intern(atom);
                if self.certain.contains(&id) {
                    return;
                }
                if self.possible_set.insert(id) {
                    self.possible.entry(sym).or_default().push(id);
                }
                Some((id, choice))
            }
            None => None,
        };
        let mut neg = Vec::new();
        for atom in inst.neg {
            let sym = atom.symbol();
            match self.is_possible(&atom) {
                Some(id) if self.certain.contains(&id) => return,
                Some(id) => neg.push(id),
                None if component.contains(&sym) => neg.push(self.g.intern(atom)),
                None => {}
            }
        }
        neg.sort_unstable();
        neg.dedup();
        let mut pos = inst.pos;
        pos.retain(|a| !self.certain.contains(a));
        pos.sort_unstable();
        pos.dedup();
        let head = match head {
            Some((id, false)) => GroundHead::Basic(id),
            Some((id, true)) => GroundHead::Choice(id),
            None => GroundHead::None,
        };
        if let GroundHead::Basic(id) = head {
            if pos.is_empty() && neg.is_empty() {
                self.certain.insert(id);
            }
        }
        let rule = GroundRule { head, pos, neg };
        if self.seen.insert(rule.clone()) {
            self.g.rules.push(rule);
        }
    }

    fn finish(mut self) -> GroundProgram {
        // rules added before their head became certain are now redundant
        let certain = &self.certain;
        self.g.rules.retain(|r| match r.head {
            GroundHead::Basic(a) | GroundHead::Choice(a) if certain.contains(&a) => {
                r.pos.is_empty() && r.neg.is_empty() && matches!(r.head, GroundHead::Basic(_))
            }
            _ => true,
        });
        for r in &mut self.g.rules {
            r.pos.retain(|a| !certain.contains(a));
        }
        let mut seen = HashSet::new();
        self.g.rules.retain(|r| seen.insert(r.clone()));
        for (rule, (dropped, example)) in self.dropped {
            self.g.warnings.push(GroundWarning::WindowTooSmall {
                rule,
                dropped,
                example,
            });
        }
        for rule in self.overflow {
            self.g.warnings.push(GroundWarning::Overflow { rule });
        }
        self.g
    }
}

struct Search<'a> {
    state: &'a State,
    plan: &'a Plan,
    component: &'a BTreeSet<PredicateSymbol>,
    out: &'a mut Vec<Instance>,
    failure: &'a mut Option<Undefined>,
}

impl Search<'_> {
    fn note(&mut self, e: Undefined) {
        if e == Undefined::Overflow {
            *self.failure = Some(e);
        }
    }

    fn run(&mut self, step: usize, env: &mut Vec<Option<Precomputed>>, pos: &mut Vec<AtomId>) {
        let Some(s) = self.plan.steps.get(step) else {
            self.leaf(env, pos);
            return;
        };
        match s {
            Step::Filter(i) => match self.holds(*i, env) {
                Ok(true) => self.run(step + 1, env, pos),
                Ok(false) => {}
                Err(e) => self.note(e),
            },
            Step::BindEq(x, t) => match t.value(env) {
                Ok(v) => {
                    if self.plan.numeric[*x] && !v.is_numeral() {
                        return;
                    }
                    env[*x] = Some(v);
                    self.run(step + 1, env, pos);
                    env[*x] = None;
                }
                Err(e) => self.note(e),
            },
            Step::BindInterval(x, l, h) => {
                let (lo, hi) = match (l.numeral(env), h.numeral(env)) {
                    (Ok(lo), Ok(hi)) => (lo, hi),
                    (Err(e), _) | (_, Err(e)) => return self.note(e),
                };
                let w = self.plan.window;
                for n in lo.max(w.lo)..=hi.min(w.hi) {
                    env[*x] = Some(Precomputed::Numeral(n));
                    self.run(step + 1, env, pos);
                }
                env[*x] = None;
            }
            Step::Enumerate(x, bounds) => {
                for v in self.plan.candidates(*x, bounds, env) {
                    env[*x] = Some(v);
                    self.run(step + 1, env, pos);
                }
                env[*x] = None;
            }
            Step::Match(i) => {
                let Lit::Pos(pred, args) = &self.plan.lits[*i] else {
                    unreachable!("only positive atoms are matched")
                };
                let sym = PredicateSymbol::new(pred.clone(), args.len());
                let open: Vec<usize> = args
                    .iter()
                    .filter_map(|a| a.bare().filter(|v| env[*v].is_none()))
                    .collect();
                if open.is_empty() {
                    let mut values = Vec::with_capacity(args.len());
                    for a in args {
                        match a.value(env) {
                            Ok(v) => values.push(v),
                            Err(e) => return self.note(e),
                        }
                    }
                    if let Some(id) = self
                        .state
                        .is_possible(&GroundAtom::new(pred.clone(), values))
                    {
                        pos.push(id);
                        self.run(step + 1, env, pos);
                        pos.pop();
                    }
                    return;
                }
                let candidates = self.state.possible.get(&sym).cloned().unwrap_or_default();
                let mut fixed = Vec::with_capacity(args.len());
                for a in args {
                    fixed.push(match a.bare() {
                        Some(v) if env[v].is_none() => None,
                        _ => match a.value(env) {
                            Ok(v) => Some(v),
                            Err(e) => return self.note(e),
                        },
                    });
                }
                for id in candidates {
                    let atom = &self.state.g.atoms[id];
                    let mut assigned = Vec::new();
                    let mut ok = true;
                    for (k, a) in args.iter().enumerate() {
                        let value = &atom.args[k];
                        match &fixed[k] {
                            Some(f) => ok = f == value,
                            None => {
                                let v = a.bare().unwrap();
                                match &env[v] {
                                    Some(bound) => ok = bound == value,
                                    None => {
                                        if self.plan.numeric[v] && !value.is_numeral() {
                                            ok = false;
                                        } else {
                                            env[v] = Some(value.clone());
                                            assigned.push(v);
                                        }
                                    }
                                }
                            }
                        }
                        if !ok {
                            break;
                        }
                    }
                    if ok {
                        pos.push(id);
                        self.run(step + 1, env, pos);
                        pos.pop();
                    }
                    for v in assigned {
                        env[v] = None;
                    }
                }
            }
        }
    }

    fn holds(&self, i: usize, env: &[Option<Precomputed>]) -> Result<bool, Undefined> {
        match &self.plan.lits[i] {
            Lit::Rel(l, rel, r) => Ok(rel.holds(&l.value(env)?, &r.value(env)?)),
            Lit::Interval(x, l, h) => {
                let (x, l, h) = (x.numeral(env)?, l.numeral(env)?, h.numeral(env)?);
                Ok(l <= x && x <= h)
            }
            _ => unreachable!("atoms are not filters"),
        }
    }

    fn leaf(&mut self, env: &[Option<Precomputed>], pos: &[AtomId]) {
        let mut neg = Vec::new();
        for lit in &self.plan.lits {
            let Lit::Neg(pred, args) = lit else { continue };
            let mut values = Vec::with_capacity(args.len());
            for a in args {
                match a.value(env) {
                    Ok(v) => values.push(v),
                    Err(e) => return self.note(e),
                }
            }
            let atom = GroundAtom::new(pred.clone(), values);
            let w = self.plan.window;
            if !atom.within(w, &self.state.g.constants) {
                // never derivable, so the literal holds
                continue;
            }
            if let Some(id) = self.state.is_possible(&atom) {
                if self.state.certain.contains(&id) {
                    return;
                }
            } else if !self.component.contains(&atom.symbol()) {
                // an impossible atom from a finished component: the literal holds
                continue;
            }
            neg.push(atom);
        }
        let head = match &self.plan.head {
            Some((pred, args, choice)) => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    match a.value(env) {
                        Ok(v) => values.push(v),
                        Err(e) => return self.note(e),
                    }
                }
                Some((GroundAtom::new(pred.clone(), values), *choice))
            }
            None => None,
        };
        self.out.push(Instance {
            head,
            pos: pos.to_vec(),
            neg,
        });
    }
}
