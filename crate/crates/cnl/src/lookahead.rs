//! Predictive look-ahead: `$lah$` pseudo-tokens are appended to a prefix
//! and the look-ahead program selects chart edges that span from the first
//! token to the last pseudo-token.
//!
//! `depth_used` and `fragments` come from the smallest depth that yields a
//! fragment. Suggestions are collected from every depth up to the limit,
//! since a longer completion can admit a word that a shorter one cannot.

use std::collections::{BTreeMap, HashSet};

use cnlasp_core::par::{self, Exec};
use cnlasp_core::syntax::BodyElement;
use cnlasp_core::term::{compare, match_term};
use cnlasp_core::{EngineConfig, FactBase, Literal, Subst, Term};

use crate::assets::Assets;
use crate::error::CnlError;
use crate::frontend::TokenFact;
use crate::grammar::chart;
use crate::lexicon::{Agreement, Category, Semantics, LAH};

pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suggestion {
    pub category: Category,
    pub agreement: Agreement,
    pub surfaces: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookaheadResult {
    pub depth_used: usize,
    pub fragments: Vec<Term>,
    pub suggestions: Vec<Suggestion>,
}

impl LookaheadResult {
    pub fn surfaces(&self) -> Vec<&str> {
        self.suggestions
            .iter()
            .flat_map(|s| s.surfaces.iter().map(String::as_str))
            .collect()
    }
}

type Slot = (Category, Agreement, Semantics);

struct DepthOutcome {
    fragments: Vec<Term>,
    slots: HashSet<Slot>,
}

/// Suggests next words after `prefix`, which holds the tokens of the
/// sentence being written (possibly none).
pub fn suggest(
    prefix: &[TokenFact],
    assets: &Assets,
    max_depth: usize,
    cfg: &EngineConfig,
) -> Result<LookaheadResult, CnlError> {
    let sentence = prefix.first().map_or(1, |t| t.sentence_no);
    let first_free = prefix.len() as u32 + 1;
    let runs = par::map_range(cfg.exec, max_depth, |i| {
        let inner = EngineConfig {
            exec: Exec::Sequential,
            ..*cfg
        };
        run_depth(prefix, sentence, first_free, i + 1, assets, &inner)
    });
    let mut depth_used = None;
    let mut slots = HashSet::new();
    for (i, run) in runs.into_iter().enumerate() {
        let Some(out) = run? else { continue };
        if depth_used.is_none() {
            depth_used = Some((i + 1, out.fragments));
        }
        slots.extend(out.slots);
    }
    let Some((depth_used, fragments)) = depth_used else {
        return Err(CnlError::NoContinuation { max_depth });
    };
    Ok(LookaheadResult {
        depth_used,
        fragments,
        suggestions: expand(&slots, assets),
    })
}

/// Runs the look-ahead program with `depth` pseudo-tokens. `None` when no
/// sentence-initial fragment spans them.
fn run_depth(
    prefix: &[TokenFact],
    sentence: u32,
    first_free: u32,
    depth: usize,
    assets: &Assets,
    cfg: &EngineConfig,
) -> Result<Option<DepthOutcome>, CnlError> {
    let mut tokens: Vec<TokenFact> = prefix.to_vec();
    for k in 0..depth as u32 {
        tokens.push(TokenFact::new(LAH, sentence, first_free + k));
    }
    let out = chart(&tokens, Some(&assets.lookahead), assets, cfg)?;
    if !out.is_satisfiable() {
        return Ok(None);
    }
    let lah = Literal::pos(Term::compound(
        "lah",
        ["C", "T", "Y", "M", "N", "P1", "P2"].iter().map(|v| Term::var(v)).collect(),
    ));
    let mut fragments = Vec::new();
    let mut walker = Walker {
        assets,
        chart: &out.facts,
        target: first_free as i64,
        seen: HashSet::new(),
        slots: HashSet::new(),
    };
    for fact in out.facts.of_pred(&lah.pred()).collect::<Vec<_>>() {
        let args = fact.atom.args();
        let starts_sentence = args[0]
            .as_constant()
            .is_some_and(|c| assets.sentence_starts.contains(c));
        if !starts_sentence {
            continue;
        }
        fragments.push(args[1]);
        walker.walk(Term::compound("rule", args.to_vec()));
    }
    if fragments.is_empty() {
        return Ok(None);
    }
    fragments.sort_by(|a, b| compare(*a, *b));
    fragments.dedup();
    Ok(Some(DepthOutcome {
        fragments,
        slots: walker.slots,
    }))
}

/// Descends from a spanning edge to the preterminal at `target`, replaying
/// grammar rules against the chart so agreement and semantics come from
/// the derivation actually used.
struct Walker<'a> {
    assets: &'a Assets,
    chart: &'a FactBase,
    target: i64,
    seen: HashSet<Term>,
    slots: HashSet<Slot>,
}

impl Walker<'_> {
    fn walk(&mut self, edge: Term) {
        let a = edge.args();
        let (Some(from), Some(to)) = (a[5].as_int(), a[6].as_int()) else {
            return;
        };
        if !(from <= self.target && self.target < to) || !self.seen.insert(edge) {
            return;
        }
        let tree = a[1];
        if tree.arity() == 1 && tree.args()[0].as_text() == Some(LAH) {
            let slot = (
                a[0].as_constant().and_then(Category::parse),
                a[2].as_constant().and_then(Agreement::parse),
                a[3].as_constant().and_then(Semantics::parse),
            );
            if let (Some(c), Some(y), Some(m)) = slot {
                self.slots.insert((c, y, m));
            }
            return;
        }
        let mut children = Vec::new();
        for rule in &self.assets.grammar.rules {
            let Some(head) = rule.head else { continue };
            let Some(seed) = match_term(head.atom, edge, &Subst::new()) else {
                continue;
            };
            let body: Vec<Literal> = rule
                .body
                .iter()
                .filter_map(|b| match b {
                    BodyElement::Pos(l) => Some(*l),
                    _ => None,
                })
                .collect();
            for s in self.chart.join(&body, &seed) {
                for l in &body {
                    if l.atom.functor().is_some_and(|f| f.as_str() == "rule") {
                        if let Ok(child) = s.apply(l.atom) {
                            children.push(child);
                        }
                    }
                }
            }
        }
        for c in children {
            self.walk(c);
        }
    }
}

/// Groups slots by (category, agreement) and lists matching surfaces.
fn expand(slots: &HashSet<Slot>, assets: &Assets) -> Vec<Suggestion> {
    let mut groups: BTreeMap<(Category, Agreement), Vec<String>> = BTreeMap::new();
    let mut sorted: Vec<&Slot> = slots.iter().collect();
    sorted.sort();
    for (c, y, m) in sorted {
        let entry = groups.entry((*c, *y)).or_default();
        for s in assets.lexicon.surfaces(*c, *y, *m) {
            if !entry.iter().any(|e| e == s) {
                entry.push(s.to_owned());
            }
        }
    }
    groups
        .into_iter()
        .filter(|(_, surfaces)| !surfaces.is_empty())
        .map(|((category, agreement), surfaces)| Suggestion {
            category,
            agreement,
            surfaces,
        })
        .collect()
}
