//! The reduct-based stability check and the brute-force enumerator.

use super::ground::{GroundHead, GroundProgram};

/// Whether `s` (one flag per atom of `g`) is a stable model of `g`.
///
/// A choice instance `{a} :- B` is read as `a :- B, not not a`, so it
/// survives the reduct exactly when `a` is in `s`.
pub fn is_stable_assignment(g: &GroundProgram, s: &[bool]) -> bool {
    let satisfied = |pos: &[usize], neg: &[usize], m: &[bool]| {
        pos.iter().all(|a| m[*a]) && neg.iter().all(|a| !s[*a])
    };
    for r in &g.rules {
        if r.head == GroundHead::None && satisfied(&r.pos, &r.neg, s) {
            return false;
        }
    }
    least_model_of_reduct(g, s) == s
}

/// The least model of the reduct of `g` relative to `s`.
pub fn least_model_of_reduct(g: &GroundProgram, s: &[bool]) -> Vec<bool> {
    let mut m = vec![false; g.atoms.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for r in &g.rules {
            let head = match r.head {
                GroundHead::Basic(a) => a,
                GroundHead::Choice(a) if s[a] => a,
                _ => continue,
            };
            if !m[head] && r.pos.iter().all(|a| m[*a]) && r.neg.iter().all(|a| !s[*a]) {
                m[head] = true;
                changed = true;
            }
        }
    }
    m
}

/// All stable models by trying every subset of the head atoms.
pub fn brute_force(g: &GroundProgram) -> Vec<Vec<bool>> {
    let heads = g.head_atoms();
    let mut out = Vec::new();
    let mut s = vec![false; g.atoms.len()];
    for mask in 0u64..(1u64 << heads.len()) {
        for (k, a) in heads.iter().enumerate() {
            s[*a] = mask >> k & 1 == 1;
        }
        if is_stable_assignment(g, &s) {
            out.push(s.clone());
        }
    }
    out
}
