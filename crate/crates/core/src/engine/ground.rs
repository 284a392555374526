//! Ground programs and stable-model search for non-stratified programs.
//!
//! Grounding over-approximates: every rule is instantiated against the
//! facts derivable when each `not` is assumed true. The search then walks
//! the strongly connected components of the ground atom graph,
//! dependencies first. Components whose rules negate one of their own atoms
//! branch over those atoms; all others are settled by a least fixpoint.

use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::syntax::{BodyElement, Literal, Program};
use crate::term::compare;

use super::EngineError;

/// A rule without variables. Comparisons and assignments are gone.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroundRule {
    pub head: Option<Literal>,
    pub pos: Vec<Literal>,
    pub neg: Vec<Literal>,
    /// Index of the source rule it was instantiated from.
    pub origin: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    /// Every literal occurring in `rules`, in first-occurrence order.
    pub atoms: Vec<Literal>,
}

impl GroundProgram {
    pub fn new(rules: Vec<GroundRule>) -> GroundProgram {
        let mut seen = HashSet::new();
        let mut atoms = Vec::new();
        for r in &rules {
            for l in r.head.iter().chain(&r.pos).chain(&r.neg) {
                if seen.insert(*l) {
                    atoms.push(*l);
                }
            }
        }
        GroundProgram { rules, atoms }
    }

    /// Converts a program that is already ground. Comparisons are evaluated
    /// (a false one drops the rule); assignments and variables are rejected.
    pub fn from_ground_program(p: &Program) -> Result<GroundProgram, EngineError> {
        let mut rules = Vec::new();
        'rules: for (origin, r) in p.rules.iter().enumerate() {
            let mut g = GroundRule {
                head: r.head,
                pos: Vec::new(),
                neg: Vec::new(),
                origin,
            };
            if r.head.is_some_and(|h| !h.is_ground()) {
                return Err(EngineError::NotGround(r.to_string()));
            }
            for b in &r.body {
                match b {
                    BodyElement::Pos(l) if l.is_ground() => g.pos.push(*l),
                    BodyElement::Naf(l) if l.is_ground() => g.neg.push(*l),
                    BodyElement::Comparison { op, lhs, rhs } if lhs.is_ground() && rhs.is_ground() => {
                        if !op.holds(compare(*lhs, *rhs)) {
                            continue 'rules;
                        }
                    }
                    _ => return Err(EngineError::NotGround(r.to_string())),
                }
            }
            rules.push(g);
        }
        Ok(GroundProgram::new(rules))
    }
}

struct IRule {
    head: Option<u32>,
    pos: Vec<u32>,
    neg: Vec<u32>,
    origin: usize,
}

struct Component {
    rules: Vec<usize>,
    /// Own atoms that occur under `not` in own rules.
    guess: Vec<u32>,
}

/// Outcome of the component search.
pub(crate) struct Search {
    pub models: Vec<Vec<Literal>>,
    /// Source indices of constraints that rejected some candidate.
    pub violated: Vec<usize>,
    pub inconsistent: bool,
}

pub(crate) fn stable_models(g: &GroundProgram, naf_budget: usize) -> Result<Search, EngineError> {
    let index: HashMap<Literal, u32> = g
        .atoms
        .iter()
        .enumerate()
        .map(|(i, l)| (*l, i as u32))
        .collect();
    let n = g.atoms.len();
    let rules: Vec<IRule> = g
        .rules
        .iter()
        .map(|r| IRule {
            head: r.head.map(|h| index[&h]),
            pos: r.pos.iter().map(|l| index[l]).collect(),
            neg: r.neg.iter().map(|l| index[l]).collect(),
            origin: r.origin,
        })
        .collect();

    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    for r in &rules {
        if let Some(h) = r.head {
            for b in r.pos.iter().chain(&r.neg) {
                graph.add_edge(h.into(), (*b).into(), ());
            }
        }
    }
    // Dependencies come out first.
    let sccs = tarjan_scc(&graph);
    let mut comp_of = vec![0usize; n];
    for (i, c) in sccs.iter().enumerate() {
        for a in c {
            comp_of[a.index()] = i;
        }
    }
    let mut comps: Vec<Component> = (0..sccs.len())
        .map(|_| Component {
            rules: Vec::new(),
            guess: Vec::new(),
        })
        .collect();
    let mut constraints = Vec::new();
    for (ri, r) in rules.iter().enumerate() {
        match r.head {
            Some(h) => {
                let c = comp_of[h as usize];
                comps[c].rules.push(ri);
                for b in &r.neg {
                    if comp_of[*b as usize] == c && !comps[c].guess.contains(b) {
                        comps[c].guess.push(*b);
                    }
                }
            }
            None => constraints.push(ri),
        }
    }
    for c in &mut comps {
        c.guess.sort_unstable();
        if c.guess.len() > naf_budget {
            return Err(EngineError::NafBudgetExceeded {
                atoms: c.guess.len(),
                budget: naf_budget,
            });
        }
    }

    let complement: Vec<Option<u32>> = g
        .atoms
        .iter()
        .map(|l| index.get(&l.complement()).copied())
        .collect();

    let mut search = Search {
        models: Vec::new(),
        violated: Vec::new(),
        inconsistent: false,
    };
    // Explicit stack of (next component, truth assignment so far).
    let mut stack: Vec<(usize, Vec<bool>)> = vec![(0, vec![false; n])];
    while let Some((mut ci, mut truth)) = stack.pop() {
        loop {
            if ci == comps.len() {
                accept(&rules, &constraints, &complement, &truth, g, &mut search);
                break;
            }
            let comp = &comps[ci];
            if comp.guess.is_empty() {
                settle(&rules, comp, &comp_of, ci, &mut truth, None);
                ci += 1;
                continue;
            }
            let mut branches = Vec::new();
            for mask in 0u64..(1u64 << comp.guess.len()) {
                let assumed: HashSet<u32> = comp
                    .guess
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, a)| *a)
                    .collect();
                let mut t = truth.clone();
                settle(&rules, comp, &comp_of, ci, &mut t, Some(&assumed));
                if comp.guess.iter().all(|a| t[*a as usize] == assumed.contains(a)) {
                    branches.push(t);
                }
            }
            // Reverse so the all-false guess is explored first.
            for t in branches.into_iter().rev() {
                stack.push((ci + 1, t));
            }
            break;
        }
    }
    search.violated.sort_unstable();
    search.violated.dedup();
    Ok(search)
}

/// Least fixpoint of one component's rules. `not b` for an own atom `b`
/// reads the assumption; for a lower atom it reads the settled truth.
fn settle(
    rules: &[IRule],
    comp: &Component,
    comp_of: &[usize],
    ci: usize,
    truth: &mut [bool],
    assumed: Option<&HashSet<u32>>,
) {
    loop {
        let mut changed = false;
        for &ri in &comp.rules {
            let r = &rules[ri];
            let h = r.head.expect("component rules have heads") as usize;
            if truth[h] {
                continue;
            }
            let pos_ok = r.pos.iter().all(|b| truth[*b as usize]);
            let neg_ok = r.neg.iter().all(|b| {
                if comp_of[*b as usize] == ci {
                    !assumed.is_some_and(|a| a.contains(b))
                } else {
                    !truth[*b as usize]
                }
            });
            if pos_ok && neg_ok {
                truth[h] = true;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

fn accept(
    rules: &[IRule],
    constraints: &[usize],
    complement: &[Option<u32>],
    truth: &[bool],
    g: &GroundProgram,
    search: &mut Search,
) {
    let mut ok = true;
    for &ri in constraints {
        let r = &rules[ri];
        if r.pos.iter().all(|b| truth[*b as usize]) && r.neg.iter().all(|b| !truth[*b as usize]) {
            search.violated.push(r.origin);
            ok = false;
        }
    }
    let clash = truth
        .iter()
        .enumerate()
        .any(|(i, t)| *t && complement[i].is_some_and(|c| truth[c as usize]));
    if clash {
        search.inconsistent = true;
        ok = false;
    }
    if ok {
        search.models.push(
            truth
                .iter()
                .enumerate()
                .filter(|(_, t)| **t)
                .map(|(i, _)| g.atoms[i])
                .collect(),
        );
    }
}
