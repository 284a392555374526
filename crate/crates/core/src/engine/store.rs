//! Append-only fact relations with per-argument indexes.

use std::collections::HashMap;

use crate::syntax::{Literal, Pred};
use crate::term::{match_into, Subst, Term};

/// Rows of one predicate. Row ids are insertion positions and never move,
/// so a half-open id range identifies "facts derived before round k".
#[derive(Default, Clone)]
pub(crate) struct Relation {
    rows: Vec<Term>,
    lookup: HashMap<Term, u32>,
    index: Vec<HashMap<Term, Vec<u32>>>,
}

impl Relation {
    fn insert(&mut self, atom: Term) -> bool {
        if self.lookup.contains_key(&atom) {
            return false;
        }
        let id = self.rows.len() as u32;
        let args = atom.args();
        if self.index.len() < args.len() {
            self.index.resize_with(args.len(), HashMap::new);
        }
        for (i, a) in args.iter().enumerate() {
            self.index[i].entry(*a).or_default().push(id);
        }
        self.rows.push(atom);
        self.lookup.insert(atom, id);
        true
    }

    pub(crate) fn len(&self) -> u32 {
        self.rows.len() as u32
    }
}

/// A set of ground literals grouped by predicate.
#[derive(Default, Clone)]
pub struct FactBase {
    rels: HashMap<Pred, Relation>,
    count: usize,
}

impl FactBase {
    pub fn new() -> FactBase {
        FactBase::default()
    }

    pub fn from_literals(lits: impl IntoIterator<Item = Literal>) -> FactBase {
        let mut fb = FactBase::new();
        for l in lits {
            fb.insert(l);
        }
        fb
    }

    /// Adds a ground literal; returns whether it was new.
    pub fn insert(&mut self, lit: Literal) -> bool {
        debug_assert!(lit.is_ground());
        let fresh = self.rels.entry(lit.pred()).or_default().insert(lit.atom);
        self.count += fresh as usize;
        fresh
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.rels
            .get(&lit.pred())
            .is_some_and(|r| r.lookup.contains_key(&lit.atom))
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub(crate) fn relation(&self, pred: &Pred) -> Option<&Relation> {
        self.rels.get(pred)
    }

    pub(crate) fn row_count(&self, pred: &Pred) -> u32 {
        self.rels.get(pred).map_or(0, Relation::len)
    }

    /// All literals in insertion order per predicate; predicate order is
    /// unspecified.
    pub fn iter(&self) -> impl Iterator<Item = Literal> + '_ {
        self.rels.iter().flat_map(|(p, r)| {
            r.rows.iter().map(move |a| Literal {
                negated: p.negated,
                atom: *a,
            })
        })
    }

    /// Literals of one predicate, in insertion order.
    pub fn of_pred(&self, pred: &Pred) -> impl Iterator<Item = Literal> + '_ {
        let negated = pred.negated;
        self.rels
            .get(pred)
            .into_iter()
            .flat_map(move |r| r.rows.iter().map(move |a| Literal { negated, atom: *a }))
    }

    /// Every extension of `seed` that makes `pattern` a member.
    pub fn query(&self, pattern: &Literal, seed: &Subst) -> Vec<Subst> {
        let mut out = Vec::new();
        let Some(rel) = self.rels.get(&pattern.pred()) else {
            return out;
        };
        let mut s = seed.clone();
        let base = s.len();
        for_candidates(rel, pattern.atom, &s.clone(), 0, rel.len(), |row| {
            if match_into(pattern.atom, row, &mut s) {
                out.push(s.clone());
            }
            s.truncate(base);
        });
        out
    }

    /// Every extension of `seed` satisfying all of `body` (conjunction).
    pub fn join(&self, body: &[Literal], seed: &Subst) -> Vec<Subst> {
        let mut frontier = vec![seed.clone()];
        for lit in body {
            frontier = frontier.iter().flat_map(|s| self.query(lit, s)).collect();
            if frontier.is_empty() {
                break;
            }
        }
        frontier
    }
}

/// Calls `f` on every row of `rel` with id in `lo..hi` that could match
/// `pattern` under `subst`, using the most selective bound argument.
pub(crate) fn for_candidates(
    rel: &Relation,
    pattern: Term,
    subst: &Subst,
    lo: u32,
    hi: u32,
    mut f: impl FnMut(Term),
) {
    if lo >= hi {
        return;
    }
    if pattern.is_ground() {
        if let Some(&id) = rel.lookup.get(&pattern) {
            if id >= lo && id < hi {
                f(pattern);
            }
        }
        return;
    }
    let mut best: Option<&Vec<u32>> = None;
    for (i, a) in pattern.args().iter().enumerate() {
        let Some(v) = subst.resolve_shallow(*a) else {
            continue;
        };
        match rel.index.get(i).and_then(|ix| ix.get(&v)) {
            None => return,
            Some(ids) => {
                if best.is_none_or(|b| ids.len() < b.len()) {
                    best = Some(ids);
                }
            }
        }
    }
    match best {
        Some(ids) => {
            let start = ids.partition_point(|&id| id < lo);
            for &id in &ids[start..] {
                if id >= hi {
                    break;
                }
                f(rel.rows[id as usize]);
            }
        }
        None => {
            for id in lo..hi {
                f(rel.rows[id as usize]);
            }
        }
    }
}
