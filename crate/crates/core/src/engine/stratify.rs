//! Predicate-level stratification.

use std::collections::{BTreeMap, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::syntax::{BodyElement, Pred, Program};

/// Predicates partitioned into evaluation layers, lowest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strata {
    pub layers: Vec<Vec<Pred>>,
}

impl Strata {
    /// Layer number of `pred`, if it occurs in the program.
    pub fn level_of(&self, pred: &Pred) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(pred))
    }
}

/// A cycle through negation, described as `p ⇄ q` (members sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotStratified(pub String);

impl std::fmt::Display for NotStratified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "negative cycle through {}", self.0)
    }
}

fn short(p: &Pred) -> String {
    let sign = if p.negated { "-" } else { "" };
    format!("{sign}{}", p.name)
}

pub fn stratify(program: &Program) -> Result<Strata, NotStratified> {
    let mut graph: DiGraph<Pred, bool> = DiGraph::new();
    let mut nodes: HashMap<Pred, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<Pred, bool>, p: Pred| {
        *nodes.entry(p).or_insert_with(|| g.add_node(p))
    };
    for rule in &program.rules {
        let head = rule.head.map(|h| node(&mut graph, h.pred()));
        for b in &rule.body {
            let (lit, negative) = match b {
                BodyElement::Pos(l) => (l, false),
                BodyElement::Naf(l) => (l, true),
                _ => continue,
            };
            let dep = node(&mut graph, lit.pred());
            if let Some(h) = head {
                graph.add_edge(h, dep, negative);
            }
        }
    }

    // Edges point from a predicate to what it depends on, so Tarjan emits
    // dependencies before dependents.
    let sccs = tarjan_scc(&graph);
    let mut scc_of = vec![0usize; graph.node_count()];
    for (i, scc) in sccs.iter().enumerate() {
        for n in scc {
            scc_of[n.index()] = i;
        }
    }
    let mut level = vec![0usize; sccs.len()];
    for (i, scc) in sccs.iter().enumerate() {
        let mut lv = 0;
        for &n in scc {
            for e in graph.edges(n) {
                use petgraph::visit::EdgeRef;
                let j = scc_of[e.target().index()];
                let negative = *e.weight();
                if j == i {
                    if negative {
                        let mut names: Vec<String> = scc.iter().map(|n| short(&graph[*n])).collect();
                        names.sort();
                        names.dedup();
                        return Err(NotStratified(names.join(" ⇄ ")));
                    }
                    continue;
                }
                lv = lv.max(level[j] + negative as usize);
            }
        }
        level[i] = lv;
    }

    let mut by_level: BTreeMap<usize, Vec<Pred>> = BTreeMap::new();
    for (i, scc) in sccs.iter().enumerate() {
        by_level
            .entry(level[i])
            .or_default()
            .extend(scc.iter().map(|n| graph[*n]));
    }
    let top = by_level.keys().next_back().copied().unwrap_or(0);
    let mut layers = vec![Vec::new(); top + 1];
    for (lv, mut preds) in by_level {
        preds.sort();
        layers[lv] = preds;
    }
    Ok(Strata { layers })
}
