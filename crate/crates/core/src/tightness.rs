//! The positive predicate dependency graph and tightness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

use crate::syntax::{BodyLiteral, PredicateSymbol, Program};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    /// Predicate symbols in order of first occurrence.
    pub vertices: Vec<PredicateSymbol>,
    /// Edge from a head predicate to a positive body predicate, with the
    /// indices of the rules producing it.
    pub edges: BTreeMap<(PredicateSymbol, PredicateSymbol), Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tightness {
    Tight,
    /// A witnessing cycle, listed once without repeating the first vertex.
    NotTight(Vec<PredicateSymbol>),
}

impl Tightness {
    pub fn is_tight(&self) -> bool {
        matches!(self, Tightness::Tight)
    }
}

pub fn dependency_graph(p: &Program) -> DependencyGraph {
    let mut edges: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (idx, rule) in p.rules.iter().enumerate() {
        let Some(head) = rule.head.atom() else {
            continue;
        };
        for lit in &rule.body {
            if let BodyLiteral::Positive(a) = lit {
                let list = edges.entry((head.symbol(), a.symbol())).or_default();
                if !list.contains(&idx) {
                    list.push(idx);
                }
            }
        }
    }
    DependencyGraph {
        vertices: p.predicate_symbols(),
        edges,
    }
}

impl DependencyGraph {
    fn successors(&self, v: &PredicateSymbol) -> Vec<&PredicateSymbol> {
        // edges are kept sorted, so successors come out in symbol order
        self.edges
            .keys()
            .filter(|(from, _)| from == v)
            .map(|(_, to)| to)
            .collect()
    }

    /// Length of the shortest path from `from` to `to` using at least one edge.
    fn distance(&self, from: &PredicateSymbol, to: &PredicateSymbol) -> Option<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for s in self.successors(from) {
            if seen.insert(s.clone()) {
                queue.push_back((s, 1));
            }
        }
        while let Some((v, d)) = queue.pop_front() {
            if v == to {
                return Some(d);
            }
            for s in self.successors(v) {
                if seen.insert(s.clone()) {
                    queue.push_back((s, d + 1));
                }
            }
        }
        None
    }

    /// The lexicographically least vertex sequence among the shortest cycles.
    pub fn shortest_cycle(&self) -> Option<Vec<PredicateSymbol>> {
        let mut sorted = self.vertices.clone();
        sorted.sort();
        let length = sorted.iter().filter_map(|v| self.distance(v, v)).min()?;
        for start in &sorted {
            if self.distance(start, start) != Some(length) {
                continue;
            }
            let mut path = vec![start.clone()];
            if self.extend_cycle(start, length, &mut path) {
                return Some(path);
            }
        }
        None
    }

    fn extend_cycle(
        &self,
        start: &PredicateSymbol,
        length: usize,
        path: &mut Vec<PredicateSymbol>,
    ) -> bool {
        let current = path.last().unwrap().clone();
        let remaining = length - (path.len() - 1);
        for next in self.successors(&current) {
            if remaining == 1 {
                if next == start {
                    return true;
                }
                continue;
            }
            if next == start || path.contains(next) {
                continue;
            }
            if self.distance(next, start).is_some_and(|d| d < remaining) {
                path.push(next.clone());
                if self.extend_cycle(start, length, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependencies {\n");
        for v in &self.vertices {
            writeln!(out, "  \"{v}\";").unwrap();
        }
        for ((from, to), rules) in &self.edges {
            let labels: Vec<String> = rules.iter().map(|r| format!("r{}", r + 1)).collect();
            writeln!(
                out,
                "  \"{from}\" -> \"{to}\" [label=\"{}\"];",
                labels.join(",")
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// A program is tight when its positive dependency graph is acyclic.
pub fn is_tight(p: &Program) -> Tightness {
    match dependency_graph(p).shortest_cycle() {
        None => Tightness::Tight,
        Some(cycle) => Tightness::NotTight(cycle),
    }
}
