//! Natural completion: critical variables, the renaming `f_R`, completed
//! definitions and NCOMP.

mod simplify;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{Formula, NameGen, Sort, Term, Variable};
use crate::syntax::{
    ArgTerm, BodyLiteral, Comparison, Head, PredicateSymbol, Program, RegularTerm, Relation, Rule,
};

pub use simplify::simplify;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("renaming covers {found:?} but the critical variables are {expected:?}")]
    RenamingDomainMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("predicate {0} does not occur in the program")]
    UnknownPredicate(PredicateSymbol),
}

/// Variables of `rule` that occur under `+`, `-`, `*` or anywhere in an
/// interval comparison.
pub fn critical_variables(rule: &Rule) -> BTreeSet<String> {
    let mut out = Vec::new();
    let under_arith = |t: &RegularTerm, out: &mut Vec<String>| {
        if t.is_arithmetic() {
            t.collect_variables(out);
        }
    };
    let arg = |t: &ArgTerm, out: &mut Vec<String>| {
        if let ArgTerm::Regular(r) = t {
            under_arith(r, out);
        }
    };
    for atom in rule.atoms() {
        atom.args.iter().for_each(|t| arg(t, &mut out));
    }
    for lit in &rule.body {
        match lit {
            BodyLiteral::Comparison(Comparison::Relational { lhs, rhs, .. }) => {
                arg(lhs, &mut out);
                arg(rhs, &mut out);
            }
            BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => {
                lhs.collect_variables(&mut out);
                low.collect_variables(&mut out);
                high.collect_variables(&mut out);
            }
            _ => {}
        }
    }
    out.into_iter().collect()
}

/// The function `f_R`: critical variables of one rule mapped to pairwise
/// distinct fresh integer variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Renaming {
    pub rule_index: Option<usize>,
    pub map: BTreeMap<String, Variable>,
}

impl Renaming {
    /// Renames the critical variables of `rule` in order of first occurrence.
    pub fn fresh(rule: &Rule, rule_index: Option<usize>, names: &mut NameGen) -> Renaming {
        let critical = critical_variables(rule);
        let mut map = BTreeMap::new();
        for v in rule.variables() {
            if critical.contains(&v) && !map.contains_key(&v) {
                map.insert(v, names.fresh("I", Sort::Integer));
            }
        }
        Renaming { rule_index, map }
    }
}

/// Applies `f_R` to the head arguments and the body of `rule`.
pub fn apply_renaming(
    rule: &Rule,
    renaming: &Renaming,
) -> Result<(Vec<Term>, Formula), CompletionError> {
    let expected: Vec<String> = critical_variables(rule).into_iter().collect();
    let found: Vec<String> = renaming.map.keys().cloned().collect();
    if expected != found {
        return Err(CompletionError::RenamingDomainMismatch { expected, found });
    }
    let head = rule
        .head
        .atom()
        .map(|a| a.args.iter().map(|t| rename_arg(t, renaming)).collect())
        .unwrap_or_default();
    let body = Formula::conjunction(rule.body.iter().map(|l| rename_literal(l, renaming)));
    Ok((head, body))
}

fn rename_regular(t: &RegularTerm, f: &Renaming) -> Term {
    match t {
        RegularTerm::Numeral(n) => Term::Numeral(*n),
        RegularTerm::Variable(v) => match f.map.get(v) {
            Some(i) => Term::Var(i.clone()),
            None => Term::Var(Variable::general(v.clone())),
        },
        RegularTerm::Binary(op, l, r) => {
            Term::binary(*op, rename_regular(l, f), rename_regular(r, f))
        }
    }
}

fn rename_arg(t: &ArgTerm, f: &Renaming) -> Term {
    match t {
        ArgTerm::Symbol(s) => Term::Symbol(s.clone()),
        ArgTerm::Regular(r) => rename_regular(r, f),
    }
}

fn rename_literal(l: &BodyLiteral, f: &Renaming) -> Formula {
    match l {
        BodyLiteral::Positive(a) => Formula::atom(
            a.predicate.clone(),
            a.args.iter().map(|t| rename_arg(t, f)).collect(),
        ),
        BodyLiteral::Negated(a) => Formula::not(Formula::atom(
            a.predicate.clone(),
            a.args.iter().map(|t| rename_arg(t, f)).collect(),
        )),
        BodyLiteral::Comparison(Comparison::Relational { lhs, rel, rhs }) => {
            Formula::compare(rename_arg(lhs, f), *rel, rename_arg(rhs, f))
        }
        BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => {
            let x = rename_regular(lhs, f);
            Formula::And(vec![
                Formula::compare(rename_regular(low, f), Relation::Le, x.clone()),
                Formula::compare(x, Relation::Le, rename_regular(high, f)),
            ])
        }
    }
}

/// One rule's contribution `∃U_R F_R` to a completed definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub rule_index: usize,
    pub prefix: Vec<Variable>,
    pub body: Formula,
}

impl Disjunct {
    pub fn formula(&self) -> Formula {
        Formula::exists(self.prefix.clone(), self.body.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletedDefinition {
    pub predicate: PredicateSymbol,
    /// The variables `V` bound by the outer universal quantifier.
    pub head_variables: Vec<Variable>,
    pub disjuncts: Vec<Disjunct>,
    pub sentence: Formula,
}

fn check_occurs(p: &Program, sym: &PredicateSymbol) -> Result<(), CompletionError> {
    if p.predicate_symbols().contains(sym) {
        Ok(())
    } else {
        Err(CompletionError::UnknownPredicate(sym.clone()))
    }
}

pub fn completed_definition(
    p: &Program,
    sym: &PredicateSymbol,
) -> Result<CompletedDefinition, CompletionError> {
    check_occurs(p, sym)?;
    let mut names = NameGen::new(p.variables());
    let vs: Vec<Variable> = (0..sym.arity)
        .map(|_| names.fresh("V", Sort::General))
        .collect();
    let head_atom = Formula::atom(sym.name.clone(), vs.iter().map(Term::var).collect());
    let mut disjuncts = Vec::new();
    for (idx, rule) in p.definition(sym) {
        let renaming = Renaming::fresh(rule, Some(idx), &mut names);
        let (args, body) = apply_renaming(rule, &renaming)?;
        let mut prefix = body.free_variables();
        for t in &args {
            t.collect_variables(&mut prefix);
        }
        let mut parts = vec![body];
        parts.extend(
            vs.iter()
                .zip(args)
                .map(|(v, t)| Formula::eq(Term::var(v), t)),
        );
        if matches!(rule.head, Head::Choice(_)) {
            parts.push(head_atom.clone());
        }
        disjuncts.push(Disjunct {
            rule_index: idx,
            prefix,
            body: Formula::conjunction(parts),
        });
    }
    let definiens = Formula::disjunction(disjuncts.iter().map(Disjunct::formula));
    let sentence = Formula::forall(vs.clone(), Formula::iff(head_atom, definiens));
    Ok(CompletedDefinition {
        predicate: sym.clone(),
        head_variables: vs,
        disjuncts,
        sentence,
    })
}

/// The completed definition with its outer general variables replaced by
/// fresh integer variables.
pub fn arithmetic_completed_definition(
    p: &Program,
    sym: &PredicateSymbol,
) -> Result<Formula, CompletionError> {
    let def = completed_definition(p, sym)?;
    let mut names = NameGen::new(def.sentence.all_variables().into_iter().map(|v| v.name));
    let mut map = HashMap::new();
    let mut ns = Vec::new();
    for v in &def.head_variables {
        let n = names.fresh("N", Sort::Integer);
        map.insert(v.clone(), Term::var(&n));
        ns.push(n);
    }
    let inner = match &def.sentence {
        Formula::Forall(_, body) => body.as_ref().clone(),
        other => other.clone(),
    };
    // the fresh names avoid every variable of the sentence, so nothing is captured
    let inner = inner
        .substitute(&map)
        .expect("fresh integer variables cannot be captured");
    Ok(Formula::forall(ns, inner))
}

/// The universal closure of `¬f(Body)` for a constraint.
pub fn constraint_sentence(p: &Program, rule_index: usize) -> Formula {
    let rule = &p.rules[rule_index];
    let mut names = NameGen::new(p.variables());
    let renaming = Renaming::fresh(rule, Some(rule_index), &mut names);
    let (_, body) = apply_renaming(rule, &renaming).expect("renaming built from the rule itself");
    Formula::not(body).universal_closure()
}

/// NCOMP: one completed definition per predicate symbol in order of first
/// occurrence, then one sentence per constraint in program order.
pub fn ncomp(p: &Program) -> Vec<Formula> {
    let mut out: Vec<Formula> = p
        .predicate_symbols()
        .iter()
        .map(|sym| {
            completed_definition(p, sym)
                .expect("symbol taken from the program")
                .sentence
        })
        .collect();
    out.extend(p.constraints().map(|(idx, _)| constraint_sentence(p, idx)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_equivalent;
    use crate::parser::{parse_formula, parse_program};
    use crate::sorts::check_sorts;

    const EVEN_FOO: &str = "even(2*X) :- X = -10..10.\n{foo(X)} :- even(X).\n:- not foo(0).";

    fn sym(name: &str, arity: usize) -> PredicateSymbol {
        PredicateSymbol::new(name, arity)
    }

    #[test]
    fn critical_variables_of_examples() {
        let p = parse_program(EVEN_FOO).unwrap();
        let crit: Vec<_> = p.rules.iter().map(critical_variables).collect();
        assert_eq!(crit[0], BTreeSet::from(["X".to_string()]));
        assert!(crit[1].is_empty());
        assert!(crit[2].is_empty());
        let q = parse_program("p(Y) :- q(X), Y = Z + 1, r(Z).").unwrap();
        assert_eq!(
            critical_variables(&q.rules[0]),
            BTreeSet::from(["Z".to_string()])
        );
    }

    #[test]
    fn renaming_the_even_rule() {
        let p = parse_program(EVEN_FOO).unwrap();
        let mut names = NameGen::new(p.variables());
        let f = Renaming::fresh(&p.rules[0], Some(0), &mut names);
        let (head, body) = apply_renaming(&p.rules[0], &f).unwrap();
        let i = Term::Var(Variable::integer("I1"));
        assert_eq!(
            head,
            vec![Term::binary(
                crate::syntax::BinOp::Mul,
                Term::Numeral(2),
                i.clone()
            )]
        );
        assert_eq!(
            body,
            Formula::And(vec![
                Formula::compare(Term::Numeral(-10), Relation::Le, i.clone()),
                Formula::compare(i, Relation::Le, Term::Numeral(10)),
            ])
        );
        let (_, body) =
            apply_renaming(&p.rules[2], &Renaming::fresh(&p.rules[2], None, &mut names)).unwrap();
        assert_eq!(
            body,
            Formula::not(Formula::atom("foo", vec![Term::Numeral(0)]))
        );
    }

    #[test]
    fn renaming_without_arithmetic_is_identity() {
        let p = parse_program("p :- X = Y, q(X,Y).").unwrap();
        let f = Renaming::fresh(&p.rules[0], None, &mut NameGen::default());
        assert!(f.map.is_empty());
        let (_, body) = apply_renaming(&p.rules[0], &f).unwrap();
        let Formula::And(parts) = body else { panic!() };
        assert_eq!(
            parts[0],
            Formula::eq(
                Term::Var(Variable::general("X")),
                Term::Var(Variable::general("Y"))
            )
        );
    }

    #[test]
    fn mismatched_renaming_is_rejected() {
        let p = parse_program(EVEN_FOO).unwrap();
        let empty = Renaming {
            rule_index: None,
            map: BTreeMap::new(),
        };
        assert!(matches!(
            apply_renaming(&p.rules[0], &empty),
            Err(CompletionError::RenamingDomainMismatch { .. })
        ));
    }

    #[test]
    fn completed_definition_of_even() {
        let p = parse_program("even(2*X) :- X = -10..10.").unwrap();
        let def = completed_definition(&p, &sym("even", 1)).unwrap();
        let expected =
            parse_formula("forall V (even(V) <-> exists I (-10 <= I & I <= 10 & V = 2*I))")
                .unwrap();
        assert!(
            alpha_equivalent(&def.sentence, &expected),
            "{:?}",
            def.sentence
        );
    }

    #[test]
    fn completed_definition_of_foo() {
        let p = parse_program(EVEN_FOO).unwrap();
        let def = completed_definition(&p, &sym("foo", 1)).unwrap();
        let expected =
            parse_formula("forall V (foo(V) <-> exists X (even(X) & X = V & foo(V)))").unwrap();
        assert!(alpha_equivalent(&def.sentence, &expected));
    }

    #[test]
    fn empty_definition_is_false() {
        let p = parse_program("p :- q.").unwrap();
        let def = completed_definition(&p, &sym("q", 0)).unwrap();
        assert_eq!(
            def.sentence,
            Formula::iff(Formula::atom("q", vec![]), Formula::False)
        );
        assert_eq!(
            arithmetic_completed_definition(&p, &sym("q", 0)).unwrap(),
            def.sentence
        );
    }

    #[test]
    fn unknown_predicate_is_an_error() {
        let p = parse_program("p.").unwrap();
        assert_eq!(
            completed_definition(&p, &sym("p", 2)),
            Err(CompletionError::UnknownPredicate(sym("p", 2)))
        );
    }

    #[test]
    fn arithmetic_completed_definition_of_even() {
        let p = parse_program("even(2*X) :- X = -10..10.").unwrap();
        let f = arithmetic_completed_definition(&p, &sym("even", 1)).unwrap();
        let expected =
            parse_formula("forall N (even(N) <-> exists I (-10 <= I & I <= 10 & N = 2*I))")
                .unwrap();
        assert!(alpha_equivalent(&f, &expected), "{f:?}");
    }

    #[test]
    fn ncomp_of_the_worked_example() {
        let p = parse_program(EVEN_FOO).unwrap();
        let sentences = ncomp(&p);
        assert_eq!(sentences.len(), 3);
        assert_eq!(
            sentences[2],
            Formula::not(Formula::not(Formula::atom("foo", vec![Term::Numeral(0)])))
        );
        for s in &sentences {
            assert!(check_sorts(s).is_ok());
            assert!(s.is_sentence());
        }
        assert!(ncomp(&Program::default()).is_empty());
    }

    #[test]
    fn constraint_variables_are_closed() {
        let p = parse_program(":- p(X), q(X+1).").unwrap();
        let s = &ncomp(&p)[2];
        let expected = parse_formula("forall I (~(p(I) & q(I + 1)))").unwrap();
        assert!(alpha_equivalent(s, &expected), "{s:?}");
    }
}
