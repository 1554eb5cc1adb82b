//! Executable checks of the correspondence between stable models and
//! models of the natural completion, over a bounded universe.

use std::collections::BTreeSet;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use super::eval::{lift, ModelCheckError};
use crate::completion::ncomp;
use crate::formula::Formula;
use crate::parser::{formula_to_string, Style};
use crate::solve::{ground, is_stable, stable_models, GroundAtom, IntWindow, Method, SolveError};
use crate::syntax::Program;
use crate::term::Precomputed;
use crate::tightness::is_tight;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    ModelCheck(#[from] ModelCheckError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Bases with more atoms than this are sampled instead of enumerated.
    pub max_base: usize,
    pub samples: usize,
    pub seed: u64,
    pub extra_constants: BTreeSet<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_base: 20,
            samples: 4096,
            seed: 0,
            extra_constants: BTreeSet::new(),
        }
    }
}

/// A stable model whose lift falsifies a completion sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub model: Vec<String>,
    pub sentence: String,
    pub boundary_warning: bool,
}

/// A set of atoms on which stability and satisfaction of the completion differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub atoms: Vec<String>,
    pub stable: bool,
    pub satisfies_completion: bool,
    pub boundary_warning: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Correspondence {
    /// The program is tight: every candidate set was stable iff it
    /// satisfied the completion, except for the listed counterexamples.
    Checked {
        coverage: Coverage,
        candidates: usize,
        counterexamples: Vec<Mismatch>,
        /// Set when the base was too large to enumerate.
        notice: Option<String>,
    },
    /// The program is not tight, so the correspondence is not claimed;
    /// sets satisfying the completion without being stable are listed.
    NotApplicable {
        cycle: Vec<String>,
        coverage: Coverage,
        gap_witnesses: Vec<Mismatch>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub window: IntWindow,
    pub constants: Vec<String>,
    pub base_size: usize,
    pub sentences: Vec<String>,
    pub stable_models: Vec<Vec<String>>,
    pub grounding_warnings: Vec<String>,
    pub model_violations: Vec<Violation>,
    pub correspondence: Correspondence,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.model_violations.is_empty()
            && match &self.correspondence {
                Correspondence::Checked {
                    counterexamples, ..
                } => counterexamples.is_empty(),
                Correspondence::NotApplicable { .. } => true,
            }
    }

    /// One JSON object per line: a summary, then stable models, violations
    /// and mismatches.
    pub fn json_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let summary = serde_json::json!({
            "record": "summary",
            "window": self.window,
            "constants": self.constants,
            "base_size": self.base_size,
            "stable_models": self.stable_models.len(),
            "model_violations": self.model_violations.len(),
            "correspondence": self.correspondence,
            "passed": self.passed(),
        });
        out.push(summary.to_string());
        for m in &self.stable_models {
            out.push(serde_json::json!({"record": "stable_model", "atoms": m}).to_string());
        }
        for v in &self.model_violations {
            out.push(serde_json::json!({"record": "model_violation", "violation": v}).to_string());
        }
        for w in &self.grounding_warnings {
            out.push(serde_json::json!({"record": "grounding_warning", "message": w}).to_string());
        }
        out
    }
}

fn shown(atoms: &BTreeSet<GroundAtom>) -> Vec<String> {
    atoms.iter().map(ToString::to_string).collect()
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |atoms: &[String]| format!("{{{}}}", atoms.join(", "));
        writeln!(
            f,
            "window {}, constants {}",
            self.window,
            set(&self.constants)
        )?;
        writeln!(f, "stable models: {}", self.stable_models.len())?;
        for m in &self.stable_models {
            writeln!(f, "  {}", set(m))?;
        }
        for w in &self.grounding_warnings {
            writeln!(f, "warning: {w}")?;
        }
        if self.model_violations.is_empty() {
            writeln!(f, "every stable model satisfies the completion")?;
        } else {
            writeln!(
                f,
                "{} stable model(s) falsify the completion",
                self.model_violations.len()
            )?;
            for v in &self.model_violations {
                writeln!(f, "  {} falsifies {}", set(&v.model), v.sentence)?;
            }
        }
        match &self.correspondence {
            Correspondence::Checked {
                coverage,
                candidates,
                counterexamples,
                notice,
            } => {
                if let Some(n) = notice {
                    writeln!(f, "notice: {n}")?;
                }
                let how = match coverage {
                    Coverage::Exhaustive => "all",
                    Coverage::Sampled => "sampled",
                };
                writeln!(
                    f,
                    "stable iff completion model: {how} {candidates} subsets of a base of {} atoms checked, {} counterexample(s)",
                    self.base_size,
                    counterexamples.len()
                )?;
                for m in counterexamples {
                    writeln!(
                        f,
                        "  {} stable={} completion={}",
                        set(&m.atoms),
                        m.stable,
                        m.satisfies_completion
                    )?;
                }
            }
            Correspondence::NotApplicable {
                cycle,
                gap_witnesses,
                ..
            } => {
                writeln!(
                    f,
                    "stable iff completion model: not claimed, the program is not tight (cycle {})",
                    cycle.join(" -> ")
                )?;
                for m in gap_witnesses {
                    writeln!(
                        f,
                        "  {} satisfies the completion but is not stable",
                        set(&m.atoms)
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// The atoms of the predicates of `p` over the universe, in order.
pub fn herbrand_base(p: &Program, w: IntWindow, consts: &BTreeSet<String>) -> Vec<GroundAtom> {
    let universe: Vec<Precomputed> = w
        .numerals()
        .map(Precomputed::Numeral)
        .chain(consts.iter().map(Precomputed::symbol))
        .collect();
    let mut out = Vec::new();
    for sym in p.predicate_symbols() {
        let mut tuples: Vec<Vec<Precomputed>> = vec![Vec::new()];
        for _ in 0..sym.arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    universe.iter().map(move |u| {
                        let mut t = t.clone();
                        t.push(u.clone());
                        t
                    })
                })
                .collect();
        }
        out.extend(
            tuples
                .into_iter()
                .map(|args| GroundAtom::new(sym.name.clone(), args)),
        );
    }
    out
}

/// Checks that the lift of every stable model satisfies NCOMP and, for
/// tight programs, that a subset of the Herbrand base is stable exactly when
/// its lift satisfies NCOMP.
pub fn verify_correspondence(
    p: &Program,
    w: IntWindow,
    options: &VerifyOptions,
) -> Result<Report, VerifyError> {
    let g = ground(p, w, &options.extra_constants);
    let consts = g.constants.clone();
    let sentences = ncomp(p);
    let models = stable_models(&g, Method::Auto)?;

    let satisfies =
        |atoms: &BTreeSet<GroundAtom>| -> Result<(bool, bool, Option<usize>), VerifyError> {
            let i = lift(atoms.iter().cloned(), w, &consts)?;
            let mut boundary = false;
            for (k, s) in sentences.iter().enumerate() {
                let e = i.eval(s)?;
                boundary |= e.boundary_warning;
                if !e.holds {
                    return Ok((false, boundary, Some(k)));
                }
            }
            Ok((true, boundary, None))
        };

    let mut violations = Vec::new();
    for m in &models {
        let atoms: BTreeSet<GroundAtom> = m.atoms.iter().cloned().collect();
        let (_, boundary, failed) = satisfies(&atoms)?;
        if let Some(k) = failed {
            violations.push(Violation {
                model: shown(&atoms),
                sentence: formula_to_string(&sentences[k], Style::Ascii),
                boundary_warning: boundary,
            });
        }
    }

    let base = herbrand_base(p, w, &consts);
    let (coverage, candidates) = candidate_sets(&base, options);
    let mut mismatches = Vec::new();
    let mut count = 0;
    for s in candidates {
        count += 1;
        let stable = is_stable(&g, &s);
        let (completion, boundary, _) = satisfies(&s)?;
        if stable != completion {
            mismatches.push(Mismatch {
                atoms: shown(&s),
                stable,
                satisfies_completion: completion,
                boundary_warning: boundary,
            });
        }
    }
    let correspondence = match is_tight(p) {
        crate::tightness::Tightness::Tight => Correspondence::Checked {
            coverage,
            candidates: count,
            counterexamples: mismatches,
            notice: (coverage == Coverage::Sampled).then(|| {
                format!(
                    "search_space_too_large: 2^{} candidate sets exceed the cap of 2^{}",
                    base.len(),
                    options.max_base
                )
            }),
        },
        crate::tightness::Tightness::NotTight(cycle) => Correspondence::NotApplicable {
            cycle: cycle.iter().map(ToString::to_string).collect(),
            coverage,
            gap_witnesses: mismatches,
        },
    };
    Ok(Report {
        window: w,
        constants: consts.iter().cloned().collect(),
        base_size: base.len(),
        sentences: sentences
            .iter()
            .map(|s| formula_to_string(s, Style::Ascii))
            .collect(),
        stable_models: models
            .iter()
            .map(|m| m.atoms.iter().map(ToString::to_string).collect())
            .collect(),
        grounding_warnings: g.warnings.iter().map(ToString::to_string).collect(),
        model_violations: violations,
        correspondence,
    })
}

fn candidate_sets(
    base: &[GroundAtom],
    options: &VerifyOptions,
) -> (Coverage, Vec<BTreeSet<GroundAtom>>) {
    let subset = |mask: &dyn Fn(usize) -> bool| -> BTreeSet<GroundAtom> {
        base.iter()
            .enumerate()
            .filter(|(k, _)| mask(*k))
            .map(|(_, a)| a.clone())
            .collect()
    };
    if base.len() <= options.max_base {
        let sets = (0u64..1 << base.len())
            .map(|m| subset(&|k| m >> k & 1 == 1))
            .collect();
        (Coverage::Exhaustive, sets)
    } else {
        let mut rng = StdRng::seed_from_u64(options.seed);
        let sets = (0..options.samples)
            .map(|_| {
                let bits: Vec<bool> = (0..base.len()).map(|_| rng.gen_bool(0.5)).collect();
                subset(&|k| bits[k])
            })
            .collect();
        (Coverage::Sampled, sets)
    }
}

/// Evaluates every sentence; true iff all hold.
pub fn satisfies_all(
    i: &super::Interpretation,
    sentences: &[Formula],
) -> Result<bool, ModelCheckError> {
    for s in sentences {
        if !i.eval(s)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn report(text: &str, lo: i64, hi: i64) -> Report {
        let p = parse_program(text).unwrap();
        verify_correspondence(&p, IntWindow::new(lo, hi), &VerifyOptions::default()).unwrap()
    }

    #[test]
    fn tight_program_passes_exhaustively() {
        let r = report("p(X) :- X = 0..1, not q(X).\nq(1).", 0, 2);
        assert!(r.passed(), "{r}");
        assert_eq!(r.base_size, 6);
        match &r.correspondence {
            Correspondence::Checked {
                coverage,
                candidates,
                ..
            } => {
                assert_eq!(*coverage, Coverage::Exhaustive);
                assert_eq!(*candidates, 64);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            r.stable_models,
            vec![vec!["p(0)".to_string(), "q(1)".to_string()]]
        );
    }

    #[test]
    fn positive_loop_shows_the_gap() {
        let r = report("p :- p.", 0, 0);
        assert!(r.passed());
        match &r.correspondence {
            Correspondence::NotApplicable { gap_witnesses, .. } => {
                assert_eq!(gap_witnesses.len(), 1);
                assert_eq!(gap_witnesses[0].atoms, ["p"]);
                assert!(gap_witnesses[0].satisfies_completion);
            }
            other => panic!("{other:?}"),
        }
        assert!(r.to_string().contains("not tight"));
    }

    #[test]
    fn large_bases_are_sampled() {
        let r = report(
            "p(X) :- X = 0..4, not q(X).\nq(X) :- X = 0..4, not p(X).",
            0,
            12,
        );
        assert!(r.passed());
        assert!(matches!(
            r.correspondence,
            Correspondence::Checked {
                coverage: Coverage::Sampled,
                notice: Some(_),
                ..
            }
        ));
        let lines = r.json_lines();
        let summary: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
        assert_eq!(summary["stable_models"], 32);
        assert_eq!(summary["correspondence"]["coverage"], "sampled");
        assert_eq!(lines.len(), 33);
    }
}
