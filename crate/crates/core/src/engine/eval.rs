//! Rule compilation and semi-naive bottom-up saturation.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::par::{self, Exec};
use crate::syntax::{BodyElement, CmpOp, ExternalCall, Literal, Pred, Rule};
use crate::term::{compare, match_into, Subst, Sym, Term};

use super::external::{ExternalRegistry, MemoKey};
use super::ground::GroundRule;
use super::store::{for_candidates, FactBase};
use super::EngineError;

#[derive(Clone, Debug)]
pub(crate) enum Step {
    Pos(usize, Literal),
    Naf(Literal),
    Cmp(CmpOp, Term, Term),
    Assign(Arc<str>, Sym, ExternalCall),
}

#[derive(Debug)]
pub(crate) struct CompiledRule {
    pub index: usize,
    pub head: Option<Literal>,
    pub positives: Vec<Literal>,
    pub negatives: Vec<Literal>,
    pub has_assign: bool,
    /// Step order for a full evaluation.
    pub full: Vec<Step>,
    /// Step order when the i-th positive literal reads only the delta.
    pub seeded: Vec<Vec<Step>>,
}

fn step_vars(step: &Step) -> Vec<Sym> {
    let mut out = Vec::new();
    match step {
        Step::Pos(_, l) | Step::Naf(l) => l.atom.collect_vars(&mut out),
        Step::Cmp(_, a, b) => {
            a.collect_vars(&mut out);
            b.collect_vars(&mut out);
        }
        Step::Assign(_, _, call) => call.args.iter().for_each(|a| a.collect_vars(&mut out)),
    }
    out
}

/// Orders steps: positives in the given order, each filter as soon as its
/// variables are bound, assignments after all positives.
fn order_steps(positives: &[Step], others: &[Step]) -> Vec<Step> {
    let mut bound: HashSet<Sym> = HashSet::new();
    let mut pending: Vec<Step> = others
        .iter()
        .filter(|s| !matches!(s, Step::Assign(..)))
        .cloned()
        .collect();
    let assigns: Vec<Step> = others
        .iter()
        .filter(|s| matches!(s, Step::Assign(..)))
        .cloned()
        .collect();
    let mut out = Vec::new();
    let flush = |bound: &HashSet<Sym>, pending: &mut Vec<Step>, out: &mut Vec<Step>| {
        let mut i = 0;
        while i < pending.len() {
            if step_vars(&pending[i]).iter().all(|v| bound.contains(v)) {
                out.push(pending.remove(i));
            } else {
                i += 1;
            }
        }
    };
    flush(&bound, &mut pending, &mut out);
    for p in positives {
        bound.extend(step_vars(p));
        out.push(p.clone());
        flush(&bound, &mut pending, &mut out);
    }
    for a in assigns {
        if let Step::Assign(_, v, _) = &a {
            bound.insert(*v);
        }
        out.push(a);
        flush(&bound, &mut pending, &mut out);
    }
    out.extend(pending);
    out
}

impl CompiledRule {
    pub fn new(index: usize, rule: &Rule) -> CompiledRule {
        let text: Arc<str> = Arc::from(rule.to_string());
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        let mut pos_steps = Vec::new();
        let mut others = Vec::new();
        for (i, b) in rule.body.iter().enumerate() {
            match b {
                BodyElement::Pos(l) => {
                    pos_steps.push(Step::Pos(positives.len(), *l));
                    positives.push(*l);
                }
                BodyElement::Naf(l) => {
                    negatives.push(*l);
                    others.push(Step::Naf(*l));
                }
                BodyElement::Comparison { op, lhs, rhs } => others.push(Step::Cmp(*op, *lhs, *rhs)),
                BodyElement::Assign { var, call } => {
                    others.push(Step::Assign(format!("{text}#{i}").into(), *var, call.clone()))
                }
            }
        }
        let full = order_steps(&pos_steps, &others);
        let seeded = (0..pos_steps.len())
            .map(|k| {
                let mut order = vec![pos_steps[k].clone()];
                order.extend(pos_steps.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, s)| s.clone()));
                order_steps(&order, &others)
            })
            .collect();
        CompiledRule {
            index,
            head: rule.head,
            has_assign: others.iter().any(|s| matches!(s, Step::Assign(..))),
            positives,
            negatives,
            full,
            seeded,
        }
    }
}

/// How NAF and outputs are treated during a join.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Mode {
    /// NAF checked against the store (lower strata are complete).
    Exact,
    /// NAF assumed true; used to over-approximate for grounding.
    Optimistic,
}

/// Row-id windows frozen at the start of a round: `old..new` is the delta,
/// `0..new` is everything visible.
#[derive(Clone, Default)]
pub(crate) struct Window {
    bounds: HashMap<Pred, (u32, u32)>,
}

impl Window {
    fn all(&self, p: &Pred) -> (u32, u32) {
        (0, self.bounds.get(p).map_or(0, |b| b.1))
    }

    fn delta(&self, p: &Pred) -> (u32, u32) {
        self.bounds.get(p).copied().unwrap_or((0, 0))
    }

    fn has_delta(&self, p: &Pred) -> bool {
        let (a, b) = self.delta(p);
        a < b
    }
}

struct Join<'a> {
    rule: &'a CompiledRule,
    store: &'a FactBase,
    window: &'a Window,
    mode: Mode,
    seed: Option<usize>,
    ext: Option<&'a mut ExternalRegistry>,
}

type Sink<'s> = dyn FnMut(&Subst) -> Result<(), EngineError> + 's;

impl Join<'_> {
    fn run(&mut self, steps: &[Step], k: usize, subst: &mut Subst, sink: &mut Sink<'_>) -> Result<(), EngineError> {
        let Some(step) = steps.get(k) else {
            return sink(subst);
        };
        match step {
            Step::Pos(idx, lit) => {
                let pred = lit.pred();
                let Some(rel) = self.store.relation(&pred) else {
                    return Ok(());
                };
                let (lo, hi) = if self.seed == Some(*idx) {
                    self.window.delta(&pred)
                } else {
                    self.window.all(&pred)
                };
                let mut rows = Vec::new();
                for_candidates(rel, lit.atom, subst, lo, hi, |row| rows.push(row));
                let base = subst.len();
                for row in rows {
                    if match_into(lit.atom, row, subst) {
                        self.run(steps, k + 1, subst, sink)?;
                    }
                    subst.truncate(base);
                }
                Ok(())
            }
            Step::Naf(lit) => {
                if self.mode == Mode::Optimistic {
                    return self.run(steps, k + 1, subst, sink);
                }
                let atom = subst.apply(lit.atom).map_err(EngineError::from)?;
                let ground = Literal { negated: lit.negated, atom };
                if self.store.contains(&ground) {
                    Ok(())
                } else {
                    self.run(steps, k + 1, subst, sink)
                }
            }
            Step::Cmp(op, lhs, rhs) => {
                let a = subst.apply(*lhs)?;
                let b = subst.apply(*rhs)?;
                if op.holds(compare(a, b)) {
                    self.run(steps, k + 1, subst, sink)
                } else {
                    Ok(())
                }
            }
            Step::Assign(site, var, call) => {
                let args = call
                    .args
                    .iter()
                    .map(|a| subst.apply(*a))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut binding: Vec<(Sym, Term)> = Vec::new();
                for l in &self.rule.positives {
                    for v in l.atom.vars() {
                        if let Some(t) = subst.get(v) {
                            if !binding.iter().any(|(b, _)| *b == v) {
                                binding.push((v, t));
                            }
                        }
                    }
                }
                binding.sort_by_key(|a| a.0);
                let key = MemoKey {
                    name: call.name,
                    site: site.clone(),
                    binding,
                    args,
                };
                let ext = self
                    .ext
                    .as_deref_mut()
                    .expect("rules with assignments are evaluated with the registry");
                let value = ext
                    .call(key)
                    .ok_or_else(|| EngineError::MissingExternal(call.name.to_string()))?;
                let base = subst.len();
                let ok = match subst.get(*var) {
                    Some(t) => t == value,
                    None => {
                        subst.push_unchecked(*var, value);
                        true
                    }
                };
                if ok {
                    self.run(steps, k + 1, subst, sink)?;
                }
                subst.truncate(base);
                Ok(())
            }
        }
    }
}

/// Output of one rule firing.
pub(crate) enum Fired {
    Head(Literal),
    Instance(GroundRule),
    Violation,
}

fn instantiate(lit: &Literal, s: &Subst, max_depth: u32) -> Result<Literal, EngineError> {
    let atom = s.apply(lit.atom)?;
    if atom.depth() > max_depth + 1 {
        return Err(EngineError::TermDepthExceeded(max_depth));
    }
    Ok(Literal { negated: lit.negated, atom })
}

/// Evaluates one rule (fully, or seeded by the delta of positive `seed`).
fn fire(
    rule: &CompiledRule,
    seed: Option<usize>,
    store: &FactBase,
    window: &Window,
    mode: Mode,
    max_depth: u32,
    ext: Option<&mut ExternalRegistry>,
) -> Result<Vec<Fired>, EngineError> {
    let steps = match seed {
        Some(k) => &rule.seeded[k],
        None => &rule.full,
    };
    let mut join = Join {
        rule,
        store,
        window,
        mode,
        seed,
        ext,
    };
    let mut out = Vec::new();
    let mut sink = |s: &Subst| -> Result<(), EngineError> {
        match mode {
            Mode::Exact => match &rule.head {
                Some(h) => out.push(Fired::Head(instantiate(h, s, max_depth)?)),
                None => out.push(Fired::Violation),
            },
            Mode::Optimistic => {
                let head = rule.head.as_ref().map(|h| instantiate(h, s, max_depth)).transpose()?;
                let pos = rule
                    .positives
                    .iter()
                    .map(|l| instantiate(l, s, max_depth))
                    .collect::<Result<Vec<_>, _>>()?;
                let neg = rule
                    .negatives
                    .iter()
                    .map(|l| instantiate(l, s, max_depth))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(Fired::Instance(GroundRule {
                    head,
                    pos,
                    neg,
                    origin: rule.index,
                }));
            }
        }
        Ok(())
    };
    join.run(steps, 0, &mut Subst::new(), &mut sink)?;
    Ok(out)
}

pub(crate) struct Saturator<'a> {
    pub exec: Exec,
    pub mode: Mode,
    pub max_depth: u32,
    pub ext: &'a mut ExternalRegistry,
}

impl Saturator<'_> {
    /// Runs `rules` to fixpoint over `store`. Heads (or ground instances, in
    /// optimistic mode) are merged in rule order after each round, so the
    /// result is independent of the execution mode.
    pub fn saturate(
        &mut self,
        rules: &[&CompiledRule],
        store: &mut FactBase,
        mut on_instance: impl FnMut(GroundRule),
    ) -> Result<(), EngineError> {
        let mut window = Window::default();
        let mut first = true;
        loop {
            let mut next = Window::default();
            let preds: HashSet<Pred> = rules
                .iter()
                .flat_map(|r| r.positives.iter().map(|l| l.pred()))
                .collect();
            for p in preds {
                let old = window.bounds.get(&p).map_or(0, |b| b.1);
                next.bounds.insert(p, (old, store.row_count(&p)));
            }
            window = next;

            let mut tasks: Vec<(&CompiledRule, Option<usize>)> = Vec::new();
            for r in rules {
                if first {
                    tasks.push((r, None));
                } else {
                    for (k, l) in r.positives.iter().enumerate() {
                        if window.has_delta(&l.pred()) {
                            tasks.push((r, Some(k)));
                        }
                    }
                }
            }
            if tasks.is_empty() {
                return Ok(());
            }
            first = false;

            let (mode, max_depth) = (self.mode, self.max_depth);
            let store_ref: &FactBase = store;
            let window_ref = &window;
            let pure: Vec<Option<Result<Vec<Fired>, EngineError>>> = par::map(self.exec, &tasks, |(r, seed)| {
                (!r.has_assign).then(|| fire(r, *seed, store_ref, window_ref, mode, max_depth, None))
            });
            let mut results = Vec::with_capacity(tasks.len());
            for ((r, seed), res) in tasks.iter().zip(pure) {
                results.push(match res {
                    Some(res) => res?,
                    None => fire(r, *seed, store_ref, window_ref, mode, max_depth, Some(self.ext))?,
                });
            }

            let mut changed = false;
            for fired in results.into_iter().flatten() {
                match fired {
                    Fired::Head(l) => changed |= store.insert(l),
                    Fired::Instance(g) => {
                        if let Some(h) = g.head {
                            changed |= store.insert(h);
                        }
                        on_instance(g);
                    }
                    Fired::Violation => {}
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }
}

/// Whether some instance of constraint `rule` holds in `store`.
pub(crate) fn violated(
    rule: &CompiledRule,
    store: &FactBase,
    max_depth: u32,
    ext: &mut ExternalRegistry,
) -> Result<bool, EngineError> {
    let mut window = Window::default();
    for l in &rule.positives {
        let p = l.pred();
        window.bounds.insert(p, (0, store.row_count(&p)));
    }
    let fired = fire(rule, None, store, &window, Mode::Exact, max_depth, Some(ext))?;
    Ok(fired.iter().any(|f| matches!(f, Fired::Violation)))
}

/// All instances of `rule` over `store`, treating NAF as true.
pub(crate) fn instances(
    rule: &CompiledRule,
    store: &FactBase,
    max_depth: u32,
    ext: &mut ExternalRegistry,
) -> Result<Vec<GroundRule>, EngineError> {
    let mut window = Window::default();
    for l in &rule.positives {
        let p = l.pred();
        window.bounds.insert(p, (0, store.row_count(&p)));
    }
    let fired = fire(rule, None, store, &window, Mode::Optimistic, max_depth, Some(ext))?;
    Ok(fired
        .into_iter()
        .filter_map(|f| match f {
            Fired::Instance(g) => Some(g),
            _ => None,
        })
        .collect())
}
