#![allow(dead_code)]

use std::collections::BTreeSet;

use natcomp::modelcheck::{herbrand_base, lift, Interpretation};
use natcomp::parser::parse_program;
use natcomp::solve::{GroundAtom, IntWindow};
use natcomp::syntax::Program;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub struct Case {
    pub name: String,
    pub text: String,
    pub program: Program,
    pub window: IntWindow,
    pub extra_constants: BTreeSet<String>,
}

impl Case {
    pub fn new(name: &str, text: &str, lo: i64, hi: i64) -> Case {
        let program = parse_program(text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        Case {
            name: name.to_string(),
            text: text.to_string(),
            program,
            window: IntWindow::new(lo, hi),
            extra_constants: BTreeSet::new(),
        }
    }

    pub fn with_constants(mut self, consts: &[&str]) -> Case {
        self.extra_constants = consts.iter().map(|c| c.to_string()).collect();
        self
    }

    /// Symbolic constants of the universe.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut c = self.program.symbolic_constants();
        c.extend(self.extra_constants.iter().cloned());
        c
    }

    pub fn base(&self) -> Vec<GroundAtom> {
        herbrand_base(&self.program, self.window, &self.constants())
    }

    pub fn interpretation(&self, atoms: impl IntoIterator<Item = GroundAtom>) -> Interpretation {
        lift(atoms, self.window, &self.constants()).expect("atoms come from the base")
    }

    /// Each atom of the base independently with probability one half.
    pub fn random_interpretation(&self, base: &[GroundAtom], rng: &mut StdRng) -> Interpretation {
        let atoms: Vec<GroundAtom> = base.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        self.interpretation(atoms)
    }
}

pub fn hand_written() -> Vec<Case> {
    vec![
        Case::new("even", "even(2*X) :- X = -10..10.", -3, 3),
        Case::new(
            "even_foo",
            "even(2*X) :- X = -10..10.\n{foo(X)} :- even(X).\n:- not foo(0).",
            -3,
            3,
        ),
        Case::new("even_odd_loop", "p :- not q.\nq :- not p.", 0, 0),
        Case::new("positive_loop", "p :- p.", 0, 0),
        Case::new("definite", "a.\nb :- a.\nc :- b, d.\nd :- c.", 0, 0),
        Case::new("negation", "p(X) :- X = 0..2, not q(X).\nq(1).", 0, 2),
        Case::new("counter", "r(0).\nr(X+1) :- r(X), X < 3.", 0, 4),
        Case::new(
            "choice_step",
            "{s(X)} :- X = 1..2.\nt(X) :- s(X), not s(X+1).",
            0,
            3,
        ),
        Case::new(
            "colours",
            "col(red).\ncol(green).\npick(X) :- col(X), not skip(X).\nskip(red).",
            0,
            0,
        ),
        Case::new("symbol_arithmetic", "q(a).\nq(1).\np(X*2) :- q(X).", 0, 3),
        Case::new(
            "symbol_order",
            "item(1).\nitem(5).\nitem(b).\nbig(X) :- item(X), X > 2.",
            0,
            6,
        ),
        Case::new(
            "no_neighbours",
            "{x(N)} :- N = 1..3.\n:- x(N), x(M), N < M, M - N = 1.",
            0,
            3,
        ),
        Case::new("choices", "{a}.\n{b}.\n:- a, b.", 0, 0),
        Case::new("negation_chain", "p :- not q.\nq :- not r.\nr.", 0, 0),
        Case::new(
            "differences",
            "n(1).\nn(3).\nn(4).\nd(X - Y) :- n(X), n(Y), X > Y.",
            0,
            4,
        ),
        Case::new(
            "interval_bounds",
            "s(0).\ns(2).\nr(X, Y) :- s(X), Y = X..X+1.",
            0,
            3,
        ),
        Case::new("empty", "", 0, 0),
        Case::new("forced", ":- not a.\na :- not b.\nb :- not a.", 0, 0),
        Case::new("odd_loop", "p :- not p.", 0, 0),
        Case::new(
            "game",
            "move(1,2).\nmove(2,3).\nwin(X) :- move(X,Y), not win(Y).",
            1,
            3,
        ),
        Case::new(
            "extra_constant",
            "p(X) :- X != 1, not q(X).\n{q(X)} :- X = 0..1.",
            0,
            1,
        )
        .with_constants(&["c"]),
    ]
}

const ARGS: [&str; 8] = ["X", "Y", "X", "0", "1", "2", "a", "X+1"];

fn random_rule(rng: &mut StdRng) -> String {
    let atom = |rng: &mut StdRng| -> String {
        match rng.gen_range(0..5) {
            0 => "s".to_string(),
            1 => "t".to_string(),
            k => format!("{}({})", ["p", "q", "r"][k - 2], ARGS.choose(rng).unwrap()),
        }
    };
    let mut body = Vec::new();
    for _ in 0..rng.gen_range(0..4) {
        let lit = match rng.gen_range(0..10) {
            0..=3 => atom(rng),
            4..=5 => format!("not {}", atom(rng)),
            6 => format!("X {} Y", ["<", "!=", "<=", ">"].choose(rng).unwrap()),
            7 => format!(
                "X {} {}",
                ["!=", "<", ">="].choose(rng).unwrap(),
                rng.gen_range(0..3)
            ),
            // Y is only ever defined in terms of X, so equalities are never circular
            8 => format!(
                "Y = {}",
                ["X + 1", "X - 1", "2*X", "X"].choose(rng).unwrap()
            ),
            _ => format!("X = {}..{}", rng.gen_range(0..2), rng.gen_range(1..3)),
        };
        body.push(lit);
    }
    let head = match rng.gen_range(0..20) {
        0..=9 => atom(rng),
        10..=13 => format!("{{{}}}", atom(rng)),
        14..=16 => String::new(),
        _ => ["s", "t"].choose(rng).unwrap().to_string(),
    };
    match (head.is_empty(), body.is_empty()) {
        (true, true) => ":- s, t.".to_string(),
        (false, true) => format!("{head}."),
        (true, false) => format!(":- {}.", body.join(", ")),
        (false, false) => format!("{head} :- {}.", body.join(", ")),
    }
}

/// Programs over unary `p`, `q`, `r` and nullary `s`, `t` on the window
/// `0..2`, with arithmetic nested at most once.
pub fn random_programs(seed: u64, n: usize) -> Vec<Case> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let rules: Vec<String> = (0..rng.gen_range(2..6))
                .map(|_| random_rule(&mut rng))
                .collect();
            Case::new(&format!("random_{k}"), &rules.join("\n"), 0, 2).with_constants(&["a"])
        })
        .collect()
}

pub fn corpus() -> Vec<Case> {
    let mut out = hand_written();
    out.extend(random_programs(7, 16));
    out
}

/// A chain of five definitions `c0`..`c4` over integer variables with
/// numerals of absolute value at most 20.
pub fn random_chain(rng: &mut StdRng) -> String {
    let mut arities = Vec::new();
    let mut axioms = Vec::new();
    for k in 0..5 {
        let arity = rng.gen_range(1..3);
        let head: Vec<&str> = ["M", "N"][..arity].to_vec();
        let exists: Vec<&str> = ["I", "J"][..rng.gen_range(0..3)].to_vec();
        let vars: Vec<&str> = head.iter().chain(&exists).copied().collect();
        let term = |rng: &mut StdRng| -> String {
            let v = vars.choose(rng).unwrap();
            match rng.gen_range(0..6) {
                0 => format!("{v} + {}", rng.gen_range(1..4)),
                1 => format!("{v} - {}", rng.gen_range(1..4)),
                2 => format!("2 * {v}"),
                3 => format!("{}", rng.gen_range(-20..=20)),
                _ => v.to_string(),
            }
        };
        let mut parts = Vec::new();
        // every existential variable is tied to something
        for v in &exists {
            parts.push(match rng.gen_range(0..3) {
                0 if k > 0 => {
                    let j = rng.gen_range(0..k);
                    let args: Vec<String> = (0..arities[j])
                        .map(|a| if a == 0 { v.to_string() } else { term(rng) })
                        .collect();
                    format!("c{j}({})", args.join(", "))
                }
                1 => format!("{v} = {}", term(rng)),
                _ => format!("0 <= {v} <= {}", rng.gen_range(1..=20)),
            });
        }
        for _ in 0..rng.gen_range(1..4) {
            let part = match rng.gen_range(0..4) {
                0 | 1 if k > 0 => {
                    let j = rng.gen_range(0..k);
                    let args: Vec<String> = (0..arities[j]).map(|_| term(rng)).collect();
                    let neg = if rng.gen_bool(0.4) { "~" } else { "" };
                    format!("{neg}c{j}({})", args.join(", "))
                }
                2 => format!(
                    "{} {} {}",
                    term(rng),
                    ["<", "<=", "!=", "=", ">", ">="].choose(rng).unwrap(),
                    term(rng)
                ),
                _ => format!("{} != {}", vars.choose(rng).unwrap(), rng.gen_range(0..8)),
            };
            parts.push(part);
        }
        let body = parts.join(" & ");
        let body = if exists.is_empty() {
            body
        } else {
            format!("exists {} ({body})", exists.join(" "))
        };
        axioms.push(format!(
            "forall {} (c{k}({}) <-> {body}).",
            head.join(" "),
            head.join(", ")
        ));
        arities.push(arity);
    }
    axioms.join("\n")
}
