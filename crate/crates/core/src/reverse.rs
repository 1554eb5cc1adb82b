//! Turning a chain of explicit first-order definitions into a regular
//! program whose completion is equivalent to the chain.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, Sort, Term, Variable};
use crate::parser::{formula_to_string, Style};
use crate::syntax::{
    ArgTerm, BinOp, BodyLiteral, Comparison, Head, PredicateSymbol, Program, RegularAtom,
    RegularTerm, Relation, Rule,
};

/// `∀ args (predicate(args) ↔ body)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinitionAxiom {
    pub predicate: String,
    pub args: Vec<Variable>,
    pub body: Formula,
}

impl DefinitionAxiom {
    pub fn symbol(&self) -> PredicateSymbol {
        PredicateSymbol::new(self.predicate.clone(), self.args.len())
    }

    /// The axiom as a sentence.
    pub fn sentence(&self) -> Formula {
        let head = Formula::atom(
            self.predicate.clone(),
            self.args.iter().map(Term::var).collect(),
        );
        Formula::forall(self.args.clone(), Formula::iff(head, self.body.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefinitionFault {
    WrongShape(String),
    RepeatedHeadArgument(String),
    Recursion(String),
    ForwardReference(String),
    UndefinedPredicate(String),
}

impl fmt::Display for DefinitionFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefinitionFault::WrongShape(why) => write!(f, "wrong shape: {why}"),
            DefinitionFault::RepeatedHeadArgument(v) => {
                write!(f, "variable {v} occurs twice in the head")
            }
            DefinitionFault::Recursion(p) => write!(f, "{p} is defined in terms of itself"),
            DefinitionFault::ForwardReference(p) => {
                write!(f, "{p} is used before its definition")
            }
            DefinitionFault::UndefinedPredicate(p) => write!(f, "{p} is never defined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReverseError {
    #[error("axiom {} is not a definition: {reason}", .index + 1)]
    NotADefinition {
        index: usize,
        reason: DefinitionFault,
    },
    #[error("axiom {} cannot be turned into a rule: {location}", .index + 1)]
    UnsupportedShape { index: usize, location: String },
}

fn not_a_definition(index: usize, reason: DefinitionFault) -> ReverseError {
    ReverseError::NotADefinition { index, reason }
}

/// Validates that each sentence defines a new predicate in terms of the
/// predicates defined before it.
pub fn parse_axiom_chain(sentences: &[Formula]) -> Result<Vec<DefinitionAxiom>, ReverseError> {
    let mut chain: Vec<DefinitionAxiom> = Vec::new();
    for (index, s) in sentences.iter().enumerate() {
        chain.push(definition(index, s)?);
    }
    let position: BTreeMap<PredicateSymbol, usize> = chain
        .iter()
        .enumerate()
        .rev()
        .map(|(k, d)| (d.symbol(), k))
        .collect();
    for (index, d) in chain.iter().enumerate() {
        if position[&d.symbol()] != index {
            let why = format!("{} is defined twice", d.symbol());
            return Err(not_a_definition(index, DefinitionFault::WrongShape(why)));
        }
        for (name, arity) in d.body.predicates() {
            let sym = PredicateSymbol::new(name, arity);
            let fault = match position.get(&sym) {
                Some(&k) if k < index => continue,
                Some(&k) if k == index => DefinitionFault::Recursion(sym.to_string()),
                Some(_) => DefinitionFault::ForwardReference(sym.to_string()),
                None => DefinitionFault::UndefinedPredicate(sym.to_string()),
            };
            return Err(not_a_definition(index, fault));
        }
    }
    Ok(chain)
}

fn definition(index: usize, s: &Formula) -> Result<DefinitionAxiom, ReverseError> {
    let wrong = |why: String| not_a_definition(index, DefinitionFault::WrongShape(why));
    let mut f = s;
    while let Formula::Forall(_, body) = f {
        f = body;
    }
    let Formula::Iff(head, body) = f else {
        return Err(wrong(
            "expected an equivalence with an atom on the left".into(),
        ));
    };
    let Formula::Atom { predicate, args } = head.as_ref() else {
        return Err(wrong(
            "the left side of the equivalence is not an atom".into(),
        ));
    };
    let mut vars: Vec<Variable> = Vec::new();
    for a in args {
        let Term::Var(v) = a else {
            return Err(wrong(format!(
                "head argument {} is not a variable",
                crate::parser::term_to_string(a, Style::Ascii)
            )));
        };
        if vars.contains(v) {
            return Err(not_a_definition(
                index,
                DefinitionFault::RepeatedHeadArgument(v.name.clone()),
            ));
        }
        vars.push(v.clone());
    }
    // the quantifier prefix may only close the head variables
    let mut g = s;
    while let Formula::Forall(vs, body) = g {
        if let Some(v) = vs.iter().find(|v| !vars.contains(v)) {
            return Err(wrong(format!(
                "{} is quantified but not a head argument",
                v.name
            )));
        }
        g = body;
    }
    if let Some(v) = body
        .free_variables()
        .into_iter()
        .find(|v| !vars.contains(v))
    {
        return Err(wrong(format!(
            "{} is free in the body but not a head argument",
            v.name
        )));
    }
    Ok(DefinitionAxiom {
        predicate: predicate.clone(),
        args: vars,
        body: body.as_ref().clone(),
    })
}

/// `M` becomes `XM`.
pub fn variable_rename_for_generality(v: &Variable) -> String {
    format!("X{}", v.name)
}

/// One rule per definition: `↔` becomes `←`, the existential quantifiers
/// at the top of the body are dropped, integer variables become general
/// ones and `¬` becomes `not`.
pub fn reverse_completion(chain: &[DefinitionAxiom]) -> Result<Program, ReverseError> {
    let rules = chain
        .iter()
        .enumerate()
        .map(|(index, d)| reverse_rule(index, d))
        .collect::<Result<_, _>>()?;
    Ok(Program::new(rules))
}

fn reverse_rule(index: usize, d: &DefinitionAxiom) -> Result<Rule, ReverseError> {
    let unsupported = |location: String| ReverseError::UnsupportedShape { index, location };
    let mut bound: Vec<Variable> = d.args.clone();
    let mut matrix = &d.body;
    while let Formula::Exists(vs, inner) = matrix {
        for v in vs {
            if bound.contains(v) {
                return Err(unsupported(format!("variable {} is bound twice", v.name)));
            }
            bound.push(v.clone());
        }
        matrix = inner;
    }
    let names = Names::new(&bound);
    let head = RegularAtom::new(
        d.predicate.clone(),
        d.args.iter().map(|v| ArgTerm::var(names.of(v))).collect(),
    );
    let mut body = Vec::new();
    for (k, part) in flatten(matrix).into_iter().enumerate() {
        let at = |what: &str| {
            format!(
                "conjunct {} `{}`: {what}",
                k + 1,
                formula_to_string(part, Style::Ascii)
            )
        };
        let literal = match part {
            Formula::True => continue,
            Formula::Atom { .. } => BodyLiteral::Positive(names.atom(part).map_err(|e| unsupported(at(&e)))?),
            Formula::Compare { lhs, rel, rhs } => {
                names.comparison(lhs, *rel, rhs).map_err(|e| unsupported(at(&e)))?
            }
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom { .. } => {
                    BodyLiteral::Negated(names.atom(inner).map_err(|e| unsupported(at(&e)))?)
                }
                Formula::Compare { lhs, rel, rhs } => names
                    .comparison(lhs, rel.negate(), rhs)
                    .map_err(|e| unsupported(at(&e)))?,
                Formula::Exists(..) => {
                    return Err(unsupported(at(
                        "negated existential quantifier; this needs a conditional literal or a separate definition of the quantified formula",
                    )))
                }
                _ => return Err(unsupported(at("negation of a formula that is not an atom"))),
            },
            Formula::Or(_) => return Err(unsupported(at("disjunction"))),
            Formula::Exists(..) | Formula::Forall(..) => {
                return Err(unsupported(at("quantifier below the top of the body")))
            }
            Formula::Implies(..) | Formula::Iff(..) => {
                return Err(unsupported(at("implication or equivalence")))
            }
            Formula::False => return Err(unsupported(at("falsity"))),
            Formula::And(_) => unreachable!("conjunctions are flattened"),
        };
        body.push(literal);
    }
    Ok(Rule::new(Head::Basic(head), body))
}

fn flatten(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(parts) => parts.iter().flat_map(flatten).collect(),
        other => vec![other],
    }
}

/// Program variable names for the variables of one axiom.
struct Names {
    map: HashMap<Variable, String>,
}

impl Names {
    fn new(vars: &[Variable]) -> Names {
        let mut map = HashMap::new();
        let mut taken = HashSet::new();
        for v in vars.iter().filter(|v| v.sort == Sort::Integer) {
            let name = variable_rename_for_generality(v);
            taken.insert(name.clone());
            map.insert(v.clone(), name);
        }
        for v in vars.iter().filter(|v| v.sort == Sort::General) {
            let mut name = v.name.clone();
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            map.insert(v.clone(), name);
        }
        Names { map }
    }

    fn of(&self, v: &Variable) -> String {
        self.map[v].clone()
    }

    fn atom(&self, f: &Formula) -> Result<RegularAtom, String> {
        let Formula::Atom { predicate, args } = f else {
            unreachable!("only called on atoms")
        };
        let args = args.iter().map(|t| self.arg(t)).collect::<Result<_, _>>()?;
        Ok(RegularAtom::new(predicate.clone(), args))
    }

    fn comparison(&self, lhs: &Term, rel: Relation, rhs: &Term) -> Result<BodyLiteral, String> {
        Ok(BodyLiteral::Comparison(Comparison::Relational {
            lhs: self.arg(lhs)?,
            rel,
            rhs: self.arg(rhs)?,
        }))
    }

    fn arg(&self, t: &Term) -> Result<ArgTerm, String> {
        Ok(match t {
            Term::Symbol(s) => ArgTerm::symbol(s.clone()),
            other => ArgTerm::Regular(self.regular(other)?),
        })
    }

    fn regular(&self, t: &Term) -> Result<RegularTerm, String> {
        Ok(match t {
            Term::Numeral(n) => RegularTerm::Numeral(*n),
            Term::Var(v) => RegularTerm::var(self.of(v)),
            Term::Binary(op, l, r) => RegularTerm::binary(*op, self.regular(l)?, self.regular(r)?),
            Term::Symbol(s) => return Err(format!("symbolic constant {s} inside arithmetic")),
        })
    }
}

/// Variables of `rule` that are not bound under the classic safety
/// condition: by occurring as an argument of a positive atom, or on the left
/// of `X = t` or `X = a..b` whose right side only has bound variables.
/// Bounds from inequalities do not count.
pub fn strictly_unsafe_variables(rule: &Rule) -> Vec<String> {
    let mut bound: HashSet<String> = HashSet::new();
    for l in &rule.body {
        if let BodyLiteral::Positive(a) = l {
            for arg in &a.args {
                if let Some(v) = arg.as_variable() {
                    bound.insert(v.to_string());
                }
            }
        }
    }
    let all_bound = |t: &RegularTerm, bound: &HashSet<String>| {
        let mut vs = Vec::new();
        t.collect_variables(&mut vs);
        vs.iter().all(|v| bound.contains(v))
    };
    let mut changed = true;
    while changed {
        changed = false;
        for l in &rule.body {
            let BodyLiteral::Comparison(c) = l else {
                continue;
            };
            let bindings: Vec<(&RegularTerm, Vec<&RegularTerm>)> = match c {
                Comparison::Relational {
                    lhs: ArgTerm::Regular(a),
                    rel: Relation::Eq,
                    rhs,
                } => {
                    let mut out = Vec::new();
                    if let ArgTerm::Regular(b) = rhs {
                        out.push((a, vec![b]));
                        out.push((b, vec![a]));
                    } else {
                        out.push((a, vec![]));
                    }
                    out
                }
                Comparison::Relational {
                    lhs: ArgTerm::Symbol(_),
                    rel: Relation::Eq,
                    rhs: ArgTerm::Regular(b),
                } => vec![(b, vec![])],
                Comparison::Interval { lhs, low, high } => vec![(lhs, vec![low, high])],
                _ => vec![],
            };
            for (target, sources) in bindings {
                let RegularTerm::Variable(v) = target else {
                    continue;
                };
                if !bound.contains(v) && sources.iter().all(|s| all_bound(s, &bound)) {
                    bound.insert(v.clone());
                    changed = true;
                }
            }
        }
    }
    let mut out: Vec<String> = rule
        .variables()
        .into_iter()
        .filter(|v| !bound.contains(v))
        .collect();
    out.dedup();
    out
}

/// Replaces a pair of comparisons `lo < X` and `X < hi` (or their
/// non-strict and flipped forms) by `X = lo+1..hi-1`, for each variable that
/// is unsafe under the classic condition. The result agrees with the input
/// on integers; it differs when a bound evaluates to a symbolic constant.
pub fn interval_rewrite(rule: &Rule) -> Rule {
    let mut rule = rule.clone();
    for v in strictly_unsafe_variables(&rule) {
        let mut lower = None;
        let mut upper = None;
        for (k, l) in rule.body.iter().enumerate() {
            let Some((rel, other)) = bound_on(l, &v) else {
                continue;
            };
            match rel {
                Relation::Gt | Relation::Ge if lower.is_none() => lower = Some((k, rel, other)),
                Relation::Lt | Relation::Le if upper.is_none() => upper = Some((k, rel, other)),
                _ => {}
            }
        }
        let (Some((kl, rl, lo)), Some((ku, ru, hi))) = (lower, upper) else {
            continue;
        };
        let low = if rl == Relation::Gt { shift(lo, 1) } else { lo };
        let high = if ru == Relation::Lt {
            shift(hi, -1)
        } else {
            hi
        };
        let interval = BodyLiteral::Comparison(Comparison::Interval {
            lhs: RegularTerm::var(v.clone()),
            low,
            high,
        });
        let first = kl.min(ku);
        rule.body[first] = interval;
        rule.body.remove(kl.max(ku));
    }
    rule
}

/// `X rel t` read off a comparison literal, with `t` free of `X`.
fn bound_on(l: &BodyLiteral, v: &str) -> Option<(Relation, RegularTerm)> {
    let BodyLiteral::Comparison(Comparison::Relational {
        lhs: ArgTerm::Regular(a),
        rel,
        rhs: ArgTerm::Regular(b),
    }) = l
    else {
        return None;
    };
    let mentions = |t: &RegularTerm| {
        let mut vs = Vec::new();
        t.collect_variables(&mut vs);
        vs.iter().any(|w| w == v)
    };
    let is_v = |t: &RegularTerm| matches!(t, RegularTerm::Variable(w) if w == v);
    if is_v(a) && !mentions(b) {
        Some((*rel, b.clone()))
    } else if is_v(b) && !mentions(a) {
        Some((rel.flip(), a.clone()))
    } else {
        None
    }
}

fn shift(t: RegularTerm, by: i64) -> RegularTerm {
    match t {
        RegularTerm::Numeral(n) => RegularTerm::Numeral(n + by),
        other if by < 0 => RegularTerm::binary(BinOp::Sub, other, RegularTerm::Numeral(-by)),
        other => RegularTerm::binary(BinOp::Add, other, RegularTerm::Numeral(by)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_equivalent;
    use crate::parser::{parse_axioms, parse_program, print_rule};
    use crate::puzzle::{AXIOMS, PROGRAM};
    use crate::tightness::is_tight;

    fn chain(text: &str) -> Result<Vec<DefinitionAxiom>, ReverseError> {
        parse_axiom_chain(&parse_axioms(text).unwrap())
    }

    fn fault(text: &str) -> DefinitionFault {
        match chain(text) {
            Err(ReverseError::NotADefinition { reason, .. }) => reason,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn puzzle_chain_reverses_to_the_puzzle_program() {
        let c = chain(AXIOMS).unwrap();
        let names: Vec<&str> = c.iter().map(|d| d.predicate.as_str()).collect();
        assert_eq!(
            names,
            [
                "b0",
                "puzzling0",
                "possibly_easy",
                "b1",
                "puzzling1",
                "b2",
                "puzzling2",
                "b3"
            ]
        );
        let p = reverse_completion(&c).unwrap();
        assert_eq!(p, parse_program(PROGRAM).unwrap());
        assert!(is_tight(&p).is_tight());
    }

    #[test]
    fn sentences_round_trip() {
        for (d, s) in chain(AXIOMS)
            .unwrap()
            .iter()
            .zip(parse_axioms(AXIOMS).unwrap())
        {
            assert!(alpha_equivalent(&d.sentence(), &s));
        }
    }

    #[test]
    fn bounded_existential_becomes_two_comparisons() {
        let c = chain("forall N (even(N) <-> exists I (-10 <= I <= 10 & N = 2 * I)).").unwrap();
        let p = reverse_completion(&c).unwrap();
        assert_eq!(
            print_rule(&p.rules[0]),
            "even(XN) :- -10 <= XI, XI <= 10, XN = 2*XI."
        );
        assert_eq!(strictly_unsafe_variables(&p.rules[0]), ["XN", "XI"]);
        let r = interval_rewrite(&p.rules[0]);
        assert_eq!(print_rule(&r), "even(XN) :- XI = -10..10, XN = 2*XI.");
        assert!(strictly_unsafe_variables(&r).is_empty());
    }

    #[test]
    fn empty_chain() {
        assert_eq!(chain("").unwrap(), vec![]);
        assert_eq!(reverse_completion(&[]).unwrap(), Program::new(vec![]));
    }

    #[test]
    fn chain_discipline() {
        assert_eq!(
            fault("forall M (q(M) <-> q(M))."),
            DefinitionFault::Recursion("q/1".into())
        );
        assert_eq!(
            fault("forall M (p(M) <-> q(M)).\nforall M (q(M) <-> M > 0)."),
            DefinitionFault::ForwardReference("q/1".into())
        );
        assert_eq!(
            fault("forall M (p(M) <-> r(M))."),
            DefinitionFault::UndefinedPredicate("r/1".into())
        );
        assert_eq!(
            fault("forall M (p(M, M) <-> M > 0)."),
            DefinitionFault::RepeatedHeadArgument("M".into())
        );
        assert!(matches!(
            fault("forall M (M > 0 -> p(M))."),
            DefinitionFault::WrongShape(_)
        ));
        assert!(matches!(
            fault("forall M (p(M + 1) <-> M > 0)."),
            DefinitionFault::WrongShape(_)
        ));
        assert!(matches!(
            fault("forall M (p(M) <-> M > N)."),
            DefinitionFault::WrongShape(_)
        ));
        assert!(matches!(
            fault("forall M (p(M) <-> M > 0).\nforall M (p(M) <-> M > 1)."),
            DefinitionFault::WrongShape(_)
        ));
    }

    fn unsupported(text: &str) -> String {
        match reverse_completion(&chain(text).unwrap()) {
            Err(ReverseError::UnsupportedShape { location, .. }) => location,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsupported_shapes() {
        let base = "forall M N (b(M, N) <-> 0 < M < N < 9).\n";
        let negated_exists = format!(
            "{base}forall M N (c(M, N) <-> b(M, N) & ~exists J K (b(J, K) & J + K = M + N & J != M))."
        );
        assert!(unsupported(&negated_exists).contains("conditional literal"));
        assert!(unsupported(&format!(
            "{base}forall M (d(M) <-> exists N b(M, N) | M = 0)."
        ))
        .contains("disjunction"));
        assert!(
            unsupported(&format!("{base}forall M (d(M) <-> ~(M > 0 & M < 3))."))
                .contains("not an atom")
        );
        assert!(unsupported(&format!(
            "{base}forall M (d(M) <-> M > 0 & exists N b(M, N))."
        ))
        .contains("quantifier"));
    }

    #[test]
    fn negated_comparisons_flip() {
        let p =
            reverse_completion(&chain("forall M (d(M) <-> 0 < M & ~(M = 3)).").unwrap()).unwrap();
        assert_eq!(print_rule(&p.rules[0]), "d(XM) :- 0 < XM, XM != 3.");
    }

    #[test]
    fn renaming() {
        assert_eq!(
            variable_rename_for_generality(&Variable::integer("J1")),
            "XJ1"
        );
        let c = chain("forall M (d(M) <-> exists gen:XM (XM = M)).").unwrap();
        let p = reverse_completion(&c).unwrap();
        assert_eq!(print_rule(&p.rules[0]), "d(XM) :- XM_ = XM.");
    }

    #[test]
    fn puzzle_rule_one_is_strictly_unsafe() {
        let p = parse_program(PROGRAM).unwrap();
        assert_eq!(strictly_unsafe_variables(&p.rules[0]), ["XM", "XN"]);
        for r in &p.rules[1..] {
            assert!(strictly_unsafe_variables(r).is_empty(), "{}", print_rule(r));
        }
        assert_eq!(
            print_rule(&interval_rewrite(&p.rules[0])),
            "b0(XM,XN) :- XM = 2..XN - 1, XM + XN <= 100."
        );
    }
}
