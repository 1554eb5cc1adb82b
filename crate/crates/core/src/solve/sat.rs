//! Stable models of tight ground programs as models of their completion,
//! enumerated by a small backtracking satisfiability procedure.

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;

use super::ground::{GroundHead, GroundProgram};

/// A literal over variable `v`: `2v` is positive, `2v + 1` negative.
type Lit = usize;

fn lit(v: usize, positive: bool) -> Lit {
    2 * v + usize::from(!positive)
}

/// Whether the positive atom dependency graph of `g` is acyclic.
pub fn ground_tight(g: &GroundProgram) -> bool {
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..g.atoms.len()).map(|_| graph.add_node(())).collect();
    for r in &g.rules {
        if let Some(h) = r.head.atom() {
            for b in &r.pos {
                graph.add_edge(nodes[h], nodes[*b], ());
            }
        }
    }
    !is_cyclic_directed(&graph)
}

/// Clauses of the completion of `g`, one auxiliary variable per rule body.
/// Atom `a` is variable `a`; the body of rule `i` is variable `atoms + i`.
fn completion_clauses(g: &GroundProgram) -> (usize, Vec<Vec<Lit>>) {
    let n = g.atoms.len();
    let mut clauses = Vec::new();
    // a -> some body of a rule with head a
    let mut support: Vec<Vec<Lit>> = (0..n).map(|a| vec![lit(a, false)]).collect();
    for (i, r) in g.rules.iter().enumerate() {
        let b = n + i;
        let body: Vec<Lit> = r
            .pos
            .iter()
            .map(|a| lit(*a, true))
            .chain(r.neg.iter().map(|a| lit(*a, false)))
            .collect();
        // b <-> body
        for l in &body {
            clauses.push(vec![lit(b, false), *l]);
        }
        let mut back: Vec<Lit> = body.iter().map(|l| l ^ 1).collect();
        back.push(lit(b, true));
        clauses.push(back);
        match r.head {
            GroundHead::Basic(a) => {
                clauses.push(vec![lit(b, false), lit(a, true)]);
                support[a].push(lit(b, true));
            }
            GroundHead::Choice(a) => support[a].push(lit(b, true)),
            GroundHead::None => clauses.push(vec![lit(b, false)]),
        }
    }
    clauses.extend(support);
    (n + g.rules.len(), clauses)
}

struct Dpll {
    clauses: Vec<Vec<Lit>>,
    /// Clauses containing the complement of each literal, i.e. those that
    /// may become unit or empty when the literal is made true.
    watching: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
    atoms: usize,
    models: Vec<Vec<bool>>,
}

impl Dpll {
    fn new(vars: usize, atoms: usize, clauses: Vec<Vec<Lit>>) -> Dpll {
        let mut watching = vec![Vec::new(); 2 * vars];
        for (c, clause) in clauses.iter().enumerate() {
            for l in clause {
                watching[l ^ 1].push(c);
            }
        }
        Dpll {
            clauses,
            watching,
            value: vec![None; vars],
            trail: Vec::new(),
            atoms,
            models: Vec::new(),
        }
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l / 2].map(|v| v == l.is_multiple_of(2))
    }

    fn assign(&mut self, l: Lit) {
        self.value[l / 2] = Some(l.is_multiple_of(2));
        self.trail.push(l);
    }

    fn undo(&mut self, mark: usize) {
        for l in self.trail.drain(mark..) {
            self.value[l / 2] = None;
        }
    }

    fn check_clause(&mut self, c: usize) -> bool {
        let mut unassigned = None;
        let mut count = 0;
        for &l in &self.clauses[c] {
            match self.lit_value(l) {
                Some(true) => return true,
                Some(false) => {}
                None => {
                    count += 1;
                    unassigned = Some(l);
                }
            }
        }
        match count {
            0 => false,
            1 => {
                self.assign(unassigned.unwrap());
                true
            }
            _ => true,
        }
    }

    /// Unit propagation from trail position `head`; false on conflict.
    fn propagate(&mut self, mut head: usize) -> bool {
        while head < self.trail.len() {
            let l = self.trail[head];
            head += 1;
            for k in 0..self.watching[l].len() {
                let c = self.watching[l][k];
                if !self.check_clause(c) {
                    return false;
                }
            }
        }
        true
    }

    fn search(&mut self, from: usize) {
        if !self.propagate(from) {
            return;
        }
        match (0..self.value.len()).find(|v| self.value[*v].is_none()) {
            None => self.models.push(
                (0..self.atoms)
                    .map(|v| self.value[v] == Some(true))
                    .collect(),
            ),
            Some(v) => {
                for positive in [false, true] {
                    let mark = self.trail.len();
                    self.assign(lit(v, positive));
                    self.search(mark);
                    self.undo(mark);
                }
            }
        }
    }

    fn solve(mut self) -> Vec<Vec<bool>> {
        for c in 0..self.clauses.len() {
            if !self.check_clause(c) {
                return Vec::new();
            }
        }
        self.search(0);
        self.models
    }
}

/// All models of the completion of `g`, projected onto its atoms.
///
/// Auxiliary variables are fixed by the atoms, so each projection is found
/// once. For tight programs these are exactly the stable models.
pub fn completion_models(g: &GroundProgram) -> Vec<Vec<bool>> {
    let (vars, clauses) = completion_clauses(g);
    Dpll::new(vars, g.atoms.len(), clauses).solve()
}
