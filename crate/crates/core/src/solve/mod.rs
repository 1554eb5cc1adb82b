//! Grounding over a bounded window and stable model enumeration.

mod ground;
mod sat;
mod stable;
mod stratified;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use ground::{
    ground, AtomId, GroundAtom, GroundHead, GroundProgram, GroundRule, GroundWarning, IntWindow,
};
pub use sat::ground_tight;
pub use stable::least_model_of_reduct;

/// Subsets of more head atoms than this are not enumerated by `brute`.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    Brute,
    Completion,
    Stratified,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Brute => "brute",
            Method::Completion => "completion",
            Method::Stratified => "stratified",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "brute" => Ok(Method::Brute),
            "completion" => Ok(Method::Completion),
            "stratified" => Ok(Method::Stratified),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("method {method} is not applicable: {reason}")]
    MethodInapplicable { method: Method, reason: String },
}

/// A stable model as a sorted set of ground atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StableModel {
    pub atoms: Vec<GroundAtom>,
}

impl StableModel {
    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.binary_search(atom).is_ok()
    }

    /// Atoms of predicate `name`, in order.
    pub fn extent<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a GroundAtom> + 'a {
        self.atoms.iter().filter(move |a| a.predicate == name)
    }
}

impl fmt::Display for StableModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        f.write_str(&atoms.join(" "))
    }
}

fn to_model(g: &GroundProgram, flags: &[bool]) -> StableModel {
    let mut atoms: Vec<GroundAtom> = flags
        .iter()
        .enumerate()
        .filter(|(_, v)| **v)
        .map(|(a, _)| g.atoms[a].clone())
        .collect();
    atoms.sort();
    StableModel { atoms }
}

fn flags(g: &GroundProgram, s: &BTreeSet<GroundAtom>) -> Option<Vec<bool>> {
    let mut out = vec![false; g.atoms.len()];
    for atom in s {
        out[g.id(atom)?] = true;
    }
    Some(out)
}

/// Whether `s` is a stable model of `g`. Atoms that `g` does not mention
/// cannot belong to a stable model.
pub fn is_stable(g: &GroundProgram, s: &BTreeSet<GroundAtom>) -> bool {
    match flags(g, s) {
        Some(f) => {
            let heads: BTreeSet<AtomId> = g.head_atoms().into_iter().collect();
            f.iter().enumerate().all(|(a, v)| !v || heads.contains(&a))
                && stable::is_stable_assignment(g, &f)
        }
        None => false,
    }
}

/// Whether `s` satisfies the propositional completion of `g`.
pub fn satisfies_completion(g: &GroundProgram, s: &BTreeSet<GroundAtom>) -> bool {
    let Some(m) = flags(g, s) else { return false };
    let holds = |r: &GroundRule| r.pos.iter().all(|a| m[*a]) && r.neg.iter().all(|a| !m[*a]);
    let mut supported = vec![false; g.atoms.len()];
    for r in &g.rules {
        let body = holds(r);
        match r.head {
            GroundHead::Basic(a) => {
                if body && !m[a] {
                    return false;
                }
                supported[a] |= body;
            }
            GroundHead::Choice(a) => supported[a] |= body,
            GroundHead::None if body => return false,
            GroundHead::None => {}
        }
    }
    m.iter().zip(&supported).all(|(v, s)| !v || *s)
}

/// The stable models of `g`, sorted and without duplicates.
pub fn stable_models(g: &GroundProgram, method: Method) -> Result<Vec<StableModel>, SolveError> {
    let inapplicable = |method, reason: String| SolveError::MethodInapplicable { method, reason };
    let flags = match method {
        Method::Auto => {
            return if stratified::is_stratified(g).is_ok() {
                stable_models(g, Method::Stratified)
            } else if ground_tight(g) {
                stable_models(g, Method::Completion)
            } else {
                stable_models(g, Method::Brute)
            };
        }
        Method::Brute => {
            let heads = g.head_atoms().len();
            if heads > BRUTE_FORCE_LIMIT {
                return Err(inapplicable(
                    method,
                    format!("{heads} head atoms exceed the limit of {BRUTE_FORCE_LIMIT}"),
                ));
            }
            stable::brute_force(g)
        }
        Method::Completion => {
            if !ground_tight(g) {
                return Err(inapplicable(
                    method,
                    "the ground program has a positive cycle".into(),
                ));
            }
            sat::completion_models(g)
        }
        Method::Stratified => stratified::stratified_model(g)
            .map_err(|reason| inapplicable(method, reason))?
            .into_iter()
            .collect(),
    };
    let mut models: Vec<StableModel> = flags.iter().map(|f| to_model(g, f)).collect();
    models.sort();
    models.dedup();
    Ok(models)
}
