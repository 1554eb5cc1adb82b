//! Bottom-up evaluation of ground programs with stratified negation.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::ground::{GroundHead, GroundProgram};

/// Components of the atom dependency graph in evaluation order, or the
/// reason the program is not stratified.
fn strata(g: &GroundProgram) -> Result<Vec<Vec<usize>>, String> {
    if g.has_choice() {
        return Err("the program has choice rules".into());
    }
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..g.atoms.len()).map(|a| graph.add_node(a)).collect();
    for r in &g.rules {
        if let Some(h) = r.head.atom() {
            for b in r.pos.iter().chain(&r.neg) {
                graph.update_edge(nodes[h], nodes[*b], ());
            }
        }
    }
    let sccs = tarjan_scc(&graph);
    let mut component = vec![0; g.atoms.len()];
    for (k, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[graph[*n]] = k;
        }
    }
    for r in &g.rules {
        if let Some(h) = r.head.atom() {
            if let Some(b) = r.neg.iter().find(|b| component[**b] == component[h]) {
                return Err(format!(
                    "{} depends negatively on {} within a cycle",
                    g.atoms[h], g.atoms[*b]
                ));
            }
        }
    }
    Ok(sccs
        .into_iter()
        .map(|scc| scc.into_iter().map(|n| graph[n]).collect())
        .collect())
}

pub fn is_stratified(g: &GroundProgram) -> Result<(), String> {
    strata(g).map(|_| ())
}

/// The unique stable model, or none if a constraint is violated.
pub fn stratified_model(g: &GroundProgram) -> Result<Option<Vec<bool>>, String> {
    let strata = strata(g)?;
    let mut rules_by_head: Vec<Vec<usize>> = vec![Vec::new(); g.atoms.len()];
    for (i, r) in g.rules.iter().enumerate() {
        if let GroundHead::Basic(a) = r.head {
            rules_by_head[a].push(i);
        }
    }
    let mut m = vec![false; g.atoms.len()];
    for stratum in strata {
        let mut changed = true;
        while changed {
            changed = false;
            for &a in &stratum {
                if m[a] {
                    continue;
                }
                let fires = rules_by_head[a].iter().any(|&i| {
                    let r = &g.rules[i];
                    r.pos.iter().all(|b| m[*b]) && r.neg.iter().all(|b| !m[*b])
                });
                if fires {
                    m[a] = true;
                    changed = true;
                }
            }
        }
    }
    let violated = g.rules.iter().any(|r| {
        r.head == GroundHead::None && r.pos.iter().all(|b| m[*b]) && r.neg.iter().all(|b| !m[*b])
    });
    Ok((!violated).then_some(m))
}
