//! Translation of syntax trees into reified rules.
//!
//! The translation program runs as one engine pass per sentence, with
//! `@rule_num` and `@sk_num` bound to the state's counters. Anaphors come
//! out as `ana(Base)` placeholders and are resolved here against the
//! current rule body and the committed facts.

use std::collections::BTreeMap;
use std::sync::atomic::Ordering;

use cnlasp_core::term::compare;
use cnlasp_core::{evaluate_stratified, EngineConfig, ExternalRegistry, Literal, Program, Rule, Term};

use crate::assets::Assets;
use crate::error::CnlError;
use crate::lexicon::Category;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReifiedRule {
    pub id: i64,
    pub head: Option<Term>,
    /// Sorted by term order.
    pub pbl: Vec<Term>,
    pub nbl: Vec<Term>,
    pub is_constraint: bool,
}

impl ReifiedRule {
    pub fn is_fact(&self) -> bool {
        !self.is_constraint && self.pbl.is_empty() && self.nbl.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReifierState {
    pub next_rule_num: i64,
    pub next_sk_num: i64,
    pub committed: Vec<ReifiedRule>,
}

impl Default for ReifierState {
    fn default() -> Self {
        ReifierState {
            next_rule_num: 1,
            next_sk_num: 1,
            committed: Vec::new(),
        }
    }
}

fn lit_arg(lit: Term) -> Option<Term> {
    (lit.functor()?.as_str() == "lit" && lit.arity() == 2).then(|| lit.args()[1])
}

fn lit_functor(lit: Term) -> Option<Term> {
    (lit.functor()?.as_str() == "lit").then(|| lit.args()[0])
}

/// Finds the argument of the closest antecedent with noun base `base`:
/// first the current rule's positive body, then heads of bodyless rules by
/// descending id.
pub fn resolve_anaphora(base: &str, body: &[Term], committed: &[ReifiedRule]) -> Option<Term> {
    let functor = Term::compound("func", vec![Term::constant(base)]);
    let matches = |l: &Term| lit_functor(*l) == Some(functor) && l.arity() == 2;
    if let Some(l) = body.iter().find(|l| matches(l)) {
        return lit_arg(*l).map(|a| a.args()[0]);
    }
    let mut facts: Vec<&ReifiedRule> = committed.iter().filter(|r| r.is_fact()).collect();
    facts.sort_by_key(|r| std::cmp::Reverse(r.id));
    facts
        .into_iter()
        .filter_map(|r| r.head)
        .find(|h| matches(h))
        .and_then(|h| lit_arg(h).map(|a| a.args()[0]))
}

/// Translates one tree. The input state is left untouched; the advanced
/// state is returned with the new rules committed.
pub fn reify(
    tree: Term,
    sentence_no: u32,
    state: &ReifierState,
    assets: &Assets,
    cfg: &EngineConfig,
) -> Result<(Vec<ReifiedRule>, ReifierState), CnlError> {
    check_vocabulary(tree, assets)?;
    let mut p = assets.reify.clone();
    p.extend(assets.lexicon_facts.clone());
    p.push(Rule::fact(Literal::pos(Term::compound(
        "sentence",
        vec![Term::int(sentence_no as i64), tree],
    ))));
    let mut ext = ExternalRegistry::new();
    let rule_num = ext.register_counter("rule_num", state.next_rule_num);
    let sk_num = ext.register_counter("sk_num", state.next_sk_num);
    let out = evaluate_stratified(&p, &mut ext, cfg)?;

    let unsupported = |reason: &str| CnlError::Unsupported {
        sentence: sentence_no,
        reason: reason.to_owned(),
    };
    let mut rules: BTreeMap<i64, ReifiedRule> = BTreeMap::new();
    let mut heads: BTreeMap<i64, Vec<Term>> = BTreeMap::new();
    for fact in out.facts.iter() {
        let a = fact.atom.args();
        let Some(name) = fact.atom.functor().map(|f| f.as_str()) else {
            continue;
        };
        let id = match (name, a.len()) {
            ("rule" | "cstr", 1) | ("head" | "pbl" | "nbl", 2) => a[0].as_int(),
            _ => None,
        };
        let Some(id) = id else { continue };
        let r = rules.entry(id).or_insert_with(|| ReifiedRule {
            id,
            head: None,
            pbl: Vec::new(),
            nbl: Vec::new(),
            is_constraint: false,
        });
        match name {
            "cstr" => r.is_constraint = true,
            "head" => heads.entry(id).or_default().push(a[1]),
            "pbl" => r.pbl.push(a[1]),
            "nbl" => r.nbl.push(a[1]),
            _ => {}
        }
    }
    if rules.is_empty() {
        return Err(unsupported("no translation for this sentence form"));
    }
    let mut committed = state.committed.clone();
    let mut produced = Vec::new();
    for (id, mut r) in rules {
        let hs = heads.remove(&id).unwrap_or_default();
        match (r.is_constraint, hs.len()) {
            (true, 0) => {}
            (false, 1) => r.head = Some(hs[0]),
            (false, 0) => return Err(unsupported("the predicate cannot become a rule head")),
            _ => return Err(unsupported("more than one head literal")),
        }
        if r.pbl.is_empty() && !r.nbl.is_empty() {
            return Err(unsupported("negated condition without a positive one"));
        }
        r.pbl.sort_by(|a, b| compare(*a, *b));
        r.nbl.sort_by(|a, b| compare(*a, *b));
        if let Some(h) = r.head {
            r.head = Some(resolve_head(h, &r.pbl, &committed, sentence_no)?);
        }
        committed.push(r.clone());
        produced.push(r);
    }
    let next = ReifierState {
        next_rule_num: rule_num.load(Ordering::SeqCst),
        next_sk_num: sk_num.load(Ordering::SeqCst),
        committed,
    };
    Ok((produced, next))
}

fn resolve_head(head: Term, body: &[Term], committed: &[ReifiedRule], sentence: u32) -> Result<Term, CnlError> {
    let Some(arg) = lit_arg(head) else {
        return Ok(head);
    };
    let inner = arg.args()[0];
    if inner.functor().map(|f| f.as_str()) != Some("ana") {
        return Ok(head);
    }
    let base = inner.args()[0].as_constant().unwrap_or_default();
    let antecedent = resolve_anaphora(base, body, committed).ok_or_else(|| CnlError::UnresolvedAnaphor {
        surface: base.to_owned(),
        sentence,
    })?;
    Ok(Term::compound(
        "lit",
        vec![head.args()[0], Term::compound("arg", vec![antecedent])],
    ))
}

/// Every content-word leaf must have a lexicon entry.
fn check_vocabulary(tree: Term, assets: &Assets) -> Result<(), CnlError> {
    let Some(f) = tree.functor() else { return Ok(()) };
    if let (Some(cat), [leaf]) = (Category::parse(f.as_str()), tree.args()) {
        if let Some(surface) = leaf.as_text() {
            if cat.is_content() && assets.lexicon.base_of(cat, surface).is_none() {
                return Err(CnlError::LexiconGap(surface.to_owned()));
            }
            return Ok(());
        }
    }
    tree.args().iter().try_for_each(|a| check_vocabulary(*a, assets))
}

fn fact(name: &str, args: Vec<Term>) -> Rule {
    Rule::fact(Literal::pos(Term::compound(name, args)))
}

/// Renders rules as `rule/1`, `head/2`, `pbl/2`, `nbl/2` and `cstr/1` facts.
pub fn emit_facts(rules: &[ReifiedRule]) -> Program {
    let mut out = Vec::new();
    for r in rules {
        let id = Term::int(r.id);
        out.push(fact("rule", vec![id]));
        if r.is_constraint {
            out.push(fact("cstr", vec![id]));
        }
        if let Some(h) = r.head {
            out.push(fact("head", vec![id, h]));
        }
        out.extend(r.pbl.iter().map(|l| fact("pbl", vec![id, *l])));
        out.extend(r.nbl.iter().map(|l| fact("nbl", vec![id, *l])));
    }
    Program::new(out)
}

/// Inverse of [`emit_facts`]; other facts are ignored. Body literals come
/// back in term order.
pub fn read_facts(p: &Program) -> Vec<ReifiedRule> {
    let mut rules: BTreeMap<i64, ReifiedRule> = BTreeMap::new();
    for r in p.rules.iter().filter(|r| r.is_fact()) {
        let Some(h) = r.head else { continue };
        let a = h.atom.args();
        let Some(id) = a.first().and_then(|t| t.as_int()) else { continue };
        let e = rules.entry(id).or_insert_with(|| ReifiedRule {
            id,
            head: None,
            pbl: Vec::new(),
            nbl: Vec::new(),
            is_constraint: false,
        });
        match (h.atom.functor().map(|f| f.as_str()), a.len()) {
            (Some("cstr"), 1) => e.is_constraint = true,
            (Some("head"), 2) => e.head = Some(a[1]),
            (Some("pbl"), 2) => e.pbl.push(a[1]),
            (Some("nbl"), 2) => e.nbl.push(a[1]),
            _ => {}
        }
    }
    let mut out: Vec<ReifiedRule> = rules.into_values().collect();
    for r in &mut out {
        r.pbl.sort_by(|a, b| compare(*a, *b));
        r.nbl.sort_by(|a, b| compare(*a, *b));
    }
    out
}
