//! Pretty-printing of programs and formulas.

use std::fmt::Write;

use serde::Serialize;

use crate::formula::{Formula, Sort, Term, Variable};
use crate::syntax::{
    ArgTerm, BinOp, BodyLiteral, Comparison, Head, Program, RegularAtom, RegularTerm, Relation,
    Rule,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Style {
    Unicode,
    Ascii,
    /// First-order TPTP syntax with integer sorts erased to `is_int` guards.
    Tptp,
}

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for rule in &p.rules {
        out.push_str(&print_rule(rule));
        out.push('\n');
    }
    out
}

pub fn print_rule(rule: &Rule) -> String {
    let mut out = match &rule.head {
        Head::Basic(a) => print_atom(a),
        Head::Choice(a) => format!("{{{}}}", print_atom(a)),
        Head::None => String::new(),
    };
    if !rule.body.is_empty() || rule.is_constraint() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(":-");
        let body: Vec<String> = rule.body.iter().map(print_literal).collect();
        if !body.is_empty() {
            out.push(' ');
            out.push_str(&body.join(", "));
        }
    }
    out.push('.');
    out
}

fn print_atom(a: &RegularAtom) -> String {
    if a.args.is_empty() {
        return a.predicate.clone();
    }
    let args: Vec<String> = a.args.iter().map(print_arg).collect();
    format!("{}({})", a.predicate, args.join(","))
}

fn print_literal(l: &BodyLiteral) -> String {
    match l {
        BodyLiteral::Positive(a) => print_atom(a),
        BodyLiteral::Negated(a) => format!("not {}", print_atom(a)),
        BodyLiteral::Comparison(Comparison::Relational { lhs, rel, rhs }) => {
            format!("{} {} {}", print_arg(lhs), rel.ascii(), print_arg(rhs))
        }
        BodyLiteral::Comparison(Comparison::Interval { lhs, low, high }) => format!(
            "{} = {}..{}",
            print_regular(lhs, 0),
            print_regular(low, 0),
            print_regular(high, 0)
        ),
    }
}

fn print_arg(t: &ArgTerm) -> String {
    match t {
        ArgTerm::Symbol(s) => s.clone(),
        ArgTerm::Regular(r) => print_regular(r, 0),
    }
}

/// Binding strength of an operator; higher binds tighter.
fn op_level(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul => 2,
    }
}

fn op_text(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => " + ",
        BinOp::Sub => " - ",
        BinOp::Mul => "*",
    }
}

fn print_regular(t: &RegularTerm, min_level: u8) -> String {
    match t {
        RegularTerm::Numeral(n) => n.to_string(),
        RegularTerm::Variable(v) => v.clone(),
        RegularTerm::Binary(op, l, r) => {
            let level = op_level(*op);
            let s = format!(
                "{}{}{}",
                print_regular(l, level),
                op_text(*op),
                print_regular(r, level + 1)
            );
            if level < min_level {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

/// Prints a term; variables appear by name only.
pub fn term_to_string(t: &Term, style: Style) -> String {
    let mut out = String::new();
    write_term(&mut out, t, style, 0, &[]);
    out
}

fn variable_name(v: &Variable, scope: &[Variable]) -> String {
    if scope.iter().rev().find(|w| w.name == v.name) == Some(v) {
        return v.name.clone();
    }
    if scope.iter().any(|w| w.name == v.name) || Sort::from_name(&v.name) != v.sort {
        return sorted_name(v);
    }
    v.name.clone()
}

fn sorted_name(v: &Variable) -> String {
    match v.sort {
        Sort::Integer => format!("int:{}", v.name),
        Sort::General => format!("gen:{}", v.name),
    }
}

fn write_term(out: &mut String, t: &Term, style: Style, min_level: u8, scope: &[Variable]) {
    match t {
        Term::Numeral(n) => write!(out, "{n}").unwrap(),
        Term::Symbol(s) => out.push_str(s),
        Term::Var(v) => {
            if style == Style::Tptp {
                out.push_str(&v.name)
            } else {
                out.push_str(&variable_name(v, scope))
            }
        }
        Term::Binary(op, l, r) if style == Style::Tptp => {
            let f = match op {
                BinOp::Add => "$sum",
                BinOp::Sub => "$difference",
                BinOp::Mul => "$product",
            };
            out.push_str(f);
            out.push('(');
            write_term(out, l, style, 0, scope);
            out.push(',');
            write_term(out, r, style, 0, scope);
            out.push(')');
        }
        Term::Binary(op, l, r) => {
            let level = op_level(*op);
            let paren = level < min_level;
            if paren {
                out.push('(');
            }
            write_term(out, l, style, level, scope);
            out.push_str(match (op, style) {
                (BinOp::Mul, Style::Unicode) => "*",
                _ => op_text(*op),
            });
            write_term(out, r, style, level + 1, scope);
            if paren {
                out.push(')');
            }
        }
    }
}

pub fn formula_to_string(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    let mut scope = Vec::new();
    if style == Style::Tptp {
        write_tptp(&mut out, f);
    } else {
        write_formula(&mut out, f, style, 0, true, &mut scope);
    }
    out
}

/// Prints a formula; in TPTP style the result is a complete annotated axiom.
pub fn print_formula(f: &Formula, style: Style) -> String {
    match style {
        Style::Tptp => tptp_annotated("sentence", f),
        _ => formula_to_string(f, style),
    }
}

/// `fof(name, axiom, F).` with free variables universally closed.
pub fn tptp_annotated(name: &str, f: &Formula) -> String {
    let closed = f.clone().universal_closure();
    format!(
        "fof({name}, axiom, {}).",
        formula_to_string(&closed, Style::Tptp)
    )
}

/// Precedence of the top connective; higher binds tighter.
fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(gs) if gs.len() > 1 => 3,
        Formula::And(gs) if gs.len() > 1 => 4,
        Formula::Or(gs) | Formula::And(gs) => gs.first().map_or(6, formula_level),
        Formula::Not(_) => 5,
        _ => 6,
    }
}

struct Symbols {
    top: &'static str,
    bottom: &'static str,
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    iff: &'static str,
    forall: &'static str,
    exists: &'static str,
}

const ASCII: Symbols = Symbols {
    top: "true",
    bottom: "false",
    not: "~",
    and: " & ",
    or: " | ",
    implies: " -> ",
    iff: " <-> ",
    forall: "forall ",
    exists: "exists ",
};

const UNICODE: Symbols = Symbols {
    top: "⊤",
    bottom: "⊥",
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
    implies: " → ",
    iff: " ↔ ",
    forall: "∀",
    exists: "∃",
};

fn relation_text(rel: Relation, style: Style) -> &'static str {
    match style {
        Style::Unicode => rel.unicode(),
        _ => rel.ascii(),
    }
}

fn write_formula(
    out: &mut String,
    f: &Formula,
    style: Style,
    min_level: u8,
    tail: bool,
    scope: &mut Vec<Variable>,
) {
    let sym = if style == Style::Unicode {
        &UNICODE
    } else {
        &ASCII
    };
    let level = formula_level(f);
    // a quantifier extends as far right as possible, so one followed by
    // more text needs parentheses
    let quantifier = matches!(f, Formula::Forall(..) | Formula::Exists(..));
    let paren = level < min_level || (quantifier && !tail);
    let tail = tail || paren;
    if paren {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str(sym.top),
        Formula::False => out.push_str(sym.bottom),
        Formula::Atom { predicate, args } => {
            out.push_str(predicate);
            if !args.is_empty() {
                out.push('(');
                for (k, t) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write_term(out, t, style, 0, scope);
                }
                out.push(')');
            }
        }
        Formula::Compare { lhs, rel, rhs } => {
            write_term(out, lhs, style, 0, scope);
            write!(out, " {} ", relation_text(*rel, style)).unwrap();
            write_term(out, rhs, style, 0, scope);
        }
        Formula::Not(g) => {
            out.push_str(sym.not);
            write_formula(out, g, style, 5, tail, scope);
        }
        Formula::And(gs) | Formula::Or(gs) if gs.is_empty() => {
            out.push_str(if matches!(f, Formula::And(_)) {
                sym.top
            } else {
                sym.bottom
            })
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let (sep, child_level) = if matches!(f, Formula::And(_)) {
                (sym.and, 5)
            } else {
                (sym.or, 4)
            };
            for (k, g) in gs.iter().enumerate() {
                if k > 0 {
                    out.push_str(sep);
                }
                let need = if gs.len() == 1 { 0 } else { child_level };
                write_formula(out, g, style, need, tail && k + 1 == gs.len(), scope);
            }
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, style, 3, false, scope);
            out.push_str(sym.implies);
            write_formula(out, b, style, 2, tail, scope);
        }
        Formula::Iff(a, b) => {
            write_formula(out, a, style, 2, false, scope);
            out.push_str(sym.iff);
            write_formula(out, b, style, 2, tail, scope);
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            out.push_str(if matches!(f, Formula::Forall(..)) {
                sym.forall
            } else {
                sym.exists
            });
            let names: Vec<String> = vs
                .iter()
                .map(|v| {
                    if Sort::from_name(&v.name) == v.sort {
                        v.name.clone()
                    } else {
                        sorted_name(v)
                    }
                })
                .collect();
            out.push_str(&names.join(" "));
            if style == Style::Ascii {
                out.push(' ');
            }
            out.push('(');
            let depth = scope.len();
            scope.extend(vs.iter().cloned());
            write_formula(out, g, style, 0, true, scope);
            scope.truncate(depth);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_tptp(out: &mut String, f: &Formula) {
    let scope: &[Variable] = &[];
    match f {
        Formula::True => out.push_str("$true"),
        Formula::False => out.push_str("$false"),
        Formula::Atom { predicate, args } => {
            out.push_str(predicate);
            if !args.is_empty() {
                out.push('(');
                for (k, t) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write_term(out, t, Style::Tptp, 0, scope);
                }
                out.push(')');
            }
        }
        Formula::Compare { lhs, rel, rhs } => {
            let mut l = String::new();
            let mut r = String::new();
            write_term(&mut l, lhs, Style::Tptp, 0, scope);
            write_term(&mut r, rhs, Style::Tptp, 0, scope);
            match rel {
                Relation::Eq => write!(out, "{l} = {r}"),
                Relation::Ne => write!(out, "{l} != {r}"),
                Relation::Lt => write!(out, "$less({l},{r})"),
                Relation::Gt => write!(out, "$greater({l},{r})"),
                Relation::Le => write!(out, "$lesseq({l},{r})"),
                Relation::Ge => write!(out, "$greatereq({l},{r})"),
            }
            .unwrap();
        }
        Formula::Not(g) => {
            out.push_str("~ (");
            write_tptp(out, g);
            out.push(')');
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let is_and = matches!(f, Formula::And(_));
            if gs.is_empty() {
                out.push_str(if is_and { "$true" } else { "$false" });
                return;
            }
            out.push('(');
            for (k, g) in gs.iter().enumerate() {
                if k > 0 {
                    out.push_str(if is_and { " & " } else { " | " });
                }
                write_tptp(out, g);
            }
            out.push(')');
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            out.push('(');
            write_tptp(out, a);
            out.push_str(if matches!(f, Formula::Implies(..)) {
                " => "
            } else {
                " <=> "
            });
            write_tptp(out, b);
            out.push(')');
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let names: Vec<&str> = vs.iter().map(|v| v.name.as_str()).collect();
            write!(
                out,
                "{} [{}] : (",
                if universal { "!" } else { "?" },
                names.join(",")
            )
            .unwrap();
            let guards: Vec<String> = vs
                .iter()
                .filter(|v| v.sort == Sort::Integer)
                .map(|v| format!("is_int({})", v.name))
                .collect();
            if !guards.is_empty() {
                out.push('(');
                out.push_str(&guards.join(" & "));
                out.push_str(if universal { ") => " } else { ") & " });
            }
            write_tptp(out, g);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_equivalent;
    use crate::parser::{parse_formula, parse_formula_unchecked, parse_program};
    use proptest::prelude::*;

    const FORMULA_TWO: &str = "forall V (even(V) <-> exists I (-10 <= I & I <= 10 & V = 2*I))";

    #[test]
    fn prints_the_even_program() {
        let p = parse_program("even(2*X) :- X = -10..10.").unwrap();
        assert_eq!(print_program(&p), "even(2*X) :- X = -10..10.\n");
    }

    #[test]
    fn prints_truth_in_ascii() {
        assert_eq!(print_formula(&Formula::True, Style::Ascii), "true");
    }

    #[test]
    fn prints_formula_two() {
        let f = parse_formula(FORMULA_TWO).unwrap();
        assert_eq!(
            print_formula(&f, Style::Unicode),
            "∀V(even(V) ↔ ∃I(-10 ≤ I ∧ I ≤ 10 ∧ V = 2*I))"
        );
        assert_eq!(print_formula(&f, Style::Ascii), FORMULA_TWO);
    }

    #[test]
    fn tptp_guards_integer_variables() {
        let f = parse_formula(FORMULA_TWO).unwrap();
        let s = print_formula(&f, Style::Tptp);
        assert!(s.starts_with("fof(sentence, axiom, ! [V] : ("));
        assert!(s.contains("? [I] : ((is_int(I)) & "));
        assert!(s.contains("$lesseq(-10,I)"));
        assert!(s.contains("$product(2,I)"));
        assert!(s.ends_with(")."));
    }

    #[test]
    fn rule_forms() {
        for text in [
            "p.",
            "{q(X)} :- p(X).",
            ":- not p, q.",
            ":-.",
            "{r}.",
            "s(a,1) :- t(X,Y), X != Y, X < 3 - (Y - 1).",
            "u(X*(Y + 1)) :- X = 1..2*3, Y = -2..-1.",
        ] {
            let p = parse_program(text).unwrap();
            let printed = print_program(&p);
            assert_eq!(printed.trim_end(), text);
        }
    }

    #[test]
    fn mismatched_sorts_are_marked() {
        let f = parse_formula("forall gen:I exists int:X (p(I) & X = 1 & q(int:V))").unwrap();
        let s = formula_to_string(&f, Style::Ascii);
        assert_eq!(s, "forall gen:I (exists int:X (p(I) & X = 1 & q(int:V)))");
        assert_eq!(parse_formula(&s).unwrap(), f);
    }

    #[test]
    fn minimal_parentheses() {
        for text in [
            "p -> q -> r",
            "(p -> q) -> r",
            "(p <-> q) <-> r",
            "p & (q | r)",
            "~(p & q)",
            "(p | q) & ~r",
            "X - (Y - 1) = (X + 1)*2",
        ] {
            let f = parse_formula_unchecked(text).unwrap();
            assert_eq!(formula_to_string(&f, Style::Ascii), text);
        }
    }

    fn arb_var() -> impl Strategy<Value = Variable> {
        prop_oneof![
            prop::sample::select(vec!["X", "Y", "V"]).prop_map(Variable::general),
            prop::sample::select(vec!["I", "J", "N"]).prop_map(Variable::integer),
        ]
    }

    fn arb_int_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (-20i64..20).prop_map(Term::Numeral),
            prop::sample::select(vec!["I", "J", "N"]).prop_map(|n| Term::Var(Variable::integer(n))),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            (
                prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul]),
                inner.clone(),
                inner,
            )
                .prop_map(|(op, l, r)| Term::binary(op, l, r))
        })
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            arb_int_term(),
            prop::sample::select(vec!["a", "b"]).prop_map(|s| Term::Symbol(s.to_string())),
            arb_var().prop_map(Term::Var),
        ]
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let rel = prop::sample::select(vec![
            Relation::Eq,
            Relation::Ne,
            Relation::Lt,
            Relation::Gt,
            Relation::Le,
            Relation::Ge,
        ]);
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            (
                prop::sample::select(vec!["p", "q"]),
                prop::collection::vec(arb_term(), 0..3)
            )
                .prop_map(|(p, args)| Formula::atom(p, args)),
            (arb_term(), rel, arb_term()).prop_map(|(l, r, h)| Formula::compare(l, r, h)),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (prop::collection::vec(arb_var(), 1..3), inner.clone())
                    .prop_map(|(vs, g)| Formula::Forall(vs, Box::new(g))),
                (prop::collection::vec(arb_var(), 1..3), inner)
                    .prop_map(|(vs, g)| Formula::Exists(vs, Box::new(g))),
            ]
        })
    }

    proptest! {
        #[test]
        fn formula_round_trip(f in arb_formula(), unicode in any::<bool>()) {
            let style = if unicode { Style::Unicode } else { Style::Ascii };
            let printed = formula_to_string(&f, style);
            let parsed = parse_formula_unchecked(&printed)
                .map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
            prop_assert!(alpha_equivalent(&parsed, &f), "{} reparsed as {:?}", printed, parsed);
        }
    }
}
