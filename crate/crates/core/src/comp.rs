//! The completion COMP: `val` formulas, the body
//! translation `τ^B`, and completed definitions quantifying over all rule
//! variables.

use thiserror::Error;

use crate::completion::CompletionError;
use crate::formula::{Formula, NameGen, Sort, Term, Variable};
use crate::syntax::{
    ArgTerm, BodyLiteral, Comparison, Head, PredicateSymbol, Program, RegularTerm, Relation, Rule,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompError {
    #[error("variable {0} occurs in the term it should stand for")]
    VariableCapture(String),
    #[error(transparent)]
    Completion(#[from] CompletionError),
}

/// A program term or an interval `t1..t2`, as accepted by [`val`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValSource {
    Term(ArgTerm),
    Interval(RegularTerm, RegularTerm),
}

impl From<ArgTerm> for ValSource {
    fn from(t: ArgTerm) -> Self {
        ValSource::Term(t)
    }
}

/// `val_t(Z)`: a formula expressing that `Z` is a value of `t`.
pub fn val(t: &ValSource, z: &Variable, names: &mut NameGen) -> Result<Formula, CompError> {
    let mut vars = Vec::new();
    match t {
        ValSource::Term(a) => a.collect_variables(&mut vars),
        ValSource::Interval(l, h) => {
            l.collect_variables(&mut vars);
            h.collect_variables(&mut vars);
        }
    }
    if vars.contains(&z.name) {
        return Err(CompError::VariableCapture(z.name.clone()));
    }
    Ok(match t {
        ValSource::Term(ArgTerm::Symbol(s)) => Formula::eq(Term::var(z), Term::Symbol(s.clone())),
        ValSource::Term(ArgTerm::Regular(r)) => val_regular(r, z, names),
        ValSource::Interval(low, high) => {
            let i = names.fresh("I", Sort::Integer);
            let j = names.fresh("J", Sort::Integer);
            let k = names.fresh("K", Sort::Integer);
            let body = Formula::conjunction([
                val_regular(low, &i, names),
                val_regular(high, &j, names),
                Formula::compare(Term::var(&i), Relation::Le, Term::var(&k)),
                Formula::compare(Term::var(&k), Relation::Le, Term::var(&j)),
                Formula::eq(Term::var(z), Term::var(&k)),
            ]);
            Formula::exists(vec![i, j, k], body)
        }
    })
}

fn val_regular(t: &RegularTerm, z: &Variable, names: &mut NameGen) -> Formula {
    match t {
        RegularTerm::Numeral(n) => Formula::eq(Term::var(z), Term::Numeral(*n)),
        RegularTerm::Variable(v) => Formula::eq(Term::var(z), Term::Var(Variable::general(v))),
        RegularTerm::Binary(op, l, r) => {
            let i = names.fresh("I", Sort::Integer);
            let j = names.fresh("J", Sort::Integer);
            let body = Formula::conjunction([
                Formula::eq(
                    Term::var(z),
                    Term::binary(*op, Term::var(&i), Term::var(&j)),
                ),
                val_regular(l, &i, names),
                val_regular(r, &j, names),
            ]);
            Formula::exists(vec![i, j], body)
        }
    }
}

fn val_term(t: &ArgTerm, z: &Variable, names: &mut NameGen) -> Formula {
    match t {
        ArgTerm::Symbol(s) => Formula::eq(Term::var(z), Term::Symbol(s.clone())),
        ArgTerm::Regular(r) => val_regular(r, z, names),
    }
}

/// `τ^B` of one body literal.
pub fn tau_b(l: &BodyLiteral, names: &mut NameGen) -> Formula {
    match l {
        BodyLiteral::Positive(a) | BodyLiteral::Negated(a) => {
            let zs: Vec<Variable> = a
                .args
                .iter()
                .map(|_| names.fresh("Z", Sort::General))
                .collect();
            let mut parts: Vec<Formula> = a
                .args
                .iter()
                .zip(&zs)
                .map(|(t, z)| val_term(t, z, names))
                .collect();
            let atom = Formula::atom(a.predicate.clone(), zs.iter().map(Term::var).collect());
            parts.push(if matches!(l, BodyLiteral::Negated(_)) {
                Formula::not(atom)
            } else {
                atom
            });
            Formula::exists(zs, Formula::conjunction(parts))
        }
        BodyLiteral::Comparison(Comparison::Relational { lhs, rel, rhs }) => {
            let z1 = names.fresh("Z", Sort::General);
            let z2 = names.fresh("Z", Sort::General);
            let body = Formula::conjunction([
                val_term(lhs, &z1, names),
                val_term(rhs, &z2, names),
                Formula::compare(Term::var(&z1), *rel, Term::var(&z2)),
            ]);
            Formula::exists(vec![z1, z2], body)
        }
        BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => {
            let z1 = names.fresh("Z", Sort::General);
            let z2 = names.fresh("Z", Sort::General);
            let interval = ValSource::Interval(low.clone(), high.clone());
            let body = Formula::conjunction([
                val_regular(lhs, &z1, names),
                val(&interval, &z2, names).expect("z2 is fresh"),
                Formula::eq(Term::var(&z1), Term::var(&z2)),
            ]);
            Formula::exists(vec![z1, z2], body)
        }
    }
}

fn tau_body(rule: &Rule, names: &mut NameGen) -> Formula {
    let parts: Vec<Formula> = rule.body.iter().map(|l| tau_b(l, names)).collect();
    Formula::conjunction(parts)
}

pub fn comp_completed_definition(p: &Program, sym: &PredicateSymbol) -> Result<Formula, CompError> {
    if !p.predicate_symbols().contains(sym) {
        return Err(CompletionError::UnknownPredicate(sym.clone()).into());
    }
    let mut names = NameGen::new(p.variables());
    let vs: Vec<Variable> = (0..sym.arity)
        .map(|_| names.fresh("V", Sort::General))
        .collect();
    let head_atom = Formula::atom(sym.name.clone(), vs.iter().map(Term::var).collect());
    let mut disjuncts = Vec::new();
    for (_, rule) in p.definition(sym) {
        let head = rule.head.atom().expect("definition rules have heads");
        let mut parts = vec![tau_body(rule, &mut names)];
        for (t, v) in head.args.iter().zip(&vs) {
            parts.push(val_term(t, v, &mut names));
        }
        if matches!(rule.head, Head::Choice(_)) {
            parts.push(head_atom.clone());
        }
        let prefix: Vec<Variable> = rule
            .variables()
            .into_iter()
            .map(Variable::general)
            .collect();
        disjuncts.push(Formula::exists(prefix, Formula::conjunction(parts)));
    }
    Ok(Formula::forall(
        vs,
        Formula::iff(head_atom, Formula::disjunction(disjuncts)),
    ))
}

/// COMP: completed definitions per predicate symbol, then the closures of
/// `¬τ^B(Body)` for the constraints.
pub fn comp(p: &Program) -> Vec<Formula> {
    let mut out: Vec<Formula> = p
        .predicate_symbols()
        .iter()
        .map(|sym| comp_completed_definition(p, sym).expect("symbol taken from the program"))
        .collect();
    for (_, rule) in p.constraints() {
        let mut names = NameGen::new(p.variables());
        out.push(Formula::not(tau_body(rule, &mut names)).universal_closure());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_equivalent;
    use crate::parser::{parse_formula, parse_program};
    use crate::sorts::check_sorts;
    use crate::syntax::{BinOp, RegularAtom};

    fn fresh() -> NameGen {
        NameGen::new(["X"])
    }

    #[test]
    fn val_of_a_product() {
        let t = ValSource::Term(ArgTerm::Regular(RegularTerm::binary(
            BinOp::Mul,
            RegularTerm::Numeral(2),
            RegularTerm::var("X"),
        )));
        let f = val(&t, &Variable::general("V"), &mut fresh()).unwrap();
        let expected = parse_formula("exists I J (V = I*J & I = 2 & J = X)").unwrap();
        assert!(alpha_equivalent(&f, &expected), "{f:?}");
    }

    #[test]
    fn val_of_an_interval() {
        let t = ValSource::Interval(RegularTerm::Numeral(-10), RegularTerm::Numeral(10));
        let f = val(&t, &Variable::general("Z2"), &mut fresh()).unwrap();
        let expected =
            parse_formula("exists I J K (I = -10 & J = 10 & I <= K & K <= J & Z2 = K)").unwrap();
        assert!(alpha_equivalent(&f, &expected), "{f:?}");
    }

    #[test]
    fn val_of_a_constant() {
        let t = ValSource::Term(ArgTerm::symbol("a"));
        let f = val(&t, &Variable::general("Z"), &mut fresh()).unwrap();
        assert_eq!(f, parse_formula("Z = a").unwrap());
    }

    #[test]
    fn val_rejects_capture() {
        let t = ValSource::Term(ArgTerm::var("Z"));
        assert_eq!(
            val(&t, &Variable::general("Z"), &mut fresh()),
            Err(CompError::VariableCapture("Z".into()))
        );
    }

    #[test]
    fn tau_of_literals() {
        let even = BodyLiteral::Positive(RegularAtom::new("even", vec![ArgTerm::var("X")]));
        let f = tau_b(&even, &mut fresh());
        let expected = parse_formula("exists Z (Z = X & even(Z))").unwrap();
        assert!(alpha_equivalent(&f, &expected));

        let neg = BodyLiteral::Negated(RegularAtom::new("foo", vec![ArgTerm::numeral(0)]));
        let f = tau_b(&neg, &mut fresh());
        let expected = parse_formula("exists Z (Z = 0 & ~foo(Z))").unwrap();
        assert!(alpha_equivalent(&f, &expected));

        let p = parse_program("p :- X = -10..10.").unwrap();
        let f = tau_b(&p.rules[0].body[0], &mut fresh());
        let expected = parse_formula(
            "exists Z1 Z2 (Z1 = X & (exists I J K (I = -10 & J = 10 & I <= K & K <= J & Z2 = K)) & Z1 = Z2)",
        )
        .unwrap();
        assert!(alpha_equivalent(&f, &expected), "{f:?}");
    }

    #[test]
    fn completed_definition_of_even() {
        let p = parse_program("even(2*X) :- X = -10..10.").unwrap();
        let f = comp_completed_definition(&p, &PredicateSymbol::new("even", 1)).unwrap();
        let expected = parse_formula(
            "forall V (even(V) <-> exists X ((exists Z1 Z2 (Z1 = X & \
             (exists I J K (I = -10 & J = 10 & I <= K & K <= J & Z2 = K)) & Z1 = Z2)) \
             & exists I J (V = I*J & I = 2 & J = X)))",
        )
        .unwrap();
        assert!(alpha_equivalent(&f, &expected), "{f:?}");
        assert_eq!(comp(&p), vec![f]);
    }

    #[test]
    fn completed_definition_of_foo() {
        let p = parse_program("even(2*X) :- X = -10..10.\n{foo(X)} :- even(X).\n:- not foo(0).")
            .unwrap();
        let f = comp_completed_definition(&p, &PredicateSymbol::new("foo", 1)).unwrap();
        let expected = parse_formula(
            "forall V (foo(V) <-> exists X ((exists Z (Z = X & even(Z))) & V = X & foo(V)))",
        )
        .unwrap();
        assert!(alpha_equivalent(&f, &expected), "{f:?}");
        let all = comp(&p);
        assert_eq!(all.len(), 3);
        assert!(all
            .iter()
            .all(|s| check_sorts(s).is_ok() && s.is_sentence()));
    }

    #[test]
    fn empty_definition_and_empty_program() {
        let p = parse_program("p :- q.").unwrap();
        let f = comp_completed_definition(&p, &PredicateSymbol::new("q", 0)).unwrap();
        assert_eq!(f, Formula::iff(Formula::atom("q", vec![]), Formula::False));
        assert!(comp(&Program::default()).is_empty());
    }
}
