//! Bottom-up evaluation and answer-set search.
//!
//! Stratified programs are saturated stratum by stratum with semi-naive
//! evaluation and have exactly one candidate model. Other programs are
//! grounded by over-approximation and searched component by component.
//! Integrity constraints and the `l` / `-l` consistency check filter models
//! in both cases.

mod eval;
mod external;
mod ground;
mod oracle;
mod store;
mod stratify;

use std::collections::HashSet;

use thiserror::Error;

use crate::par::Exec;
use crate::syntax::{Literal, Program, SafetyError};
use crate::term::TermError;

use eval::{instances, violated, CompiledRule, Mode, Saturator};

pub use external::{ExternalFn, ExternalRegistry};
pub use ground::{GroundProgram, GroundRule};
pub use oracle::{brute_force_oracle, ORACLE_MAX_ATOMS};
pub use store::FactBase;
pub use stratify::{stratify, NotStratified, Strata};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Deepest argument nesting a derived literal may carry.
    pub max_term_depth: u32,
    pub max_models: usize,
    /// Largest number of self-negated atoms in one component of the
    /// ground atom graph.
    pub naf_atom_budget: usize,
    pub exec: Exec,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_term_depth: 16,
            max_models: 8,
            naf_atom_budget: 24,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("term depth exceeded the limit of {0}")]
    TermDepthExceeded(u32),
    #[error("{atoms} atoms under negation in one component exceed the budget of {budget}")]
    NafBudgetExceeded { atoms: usize, budget: usize },
    #[error("external function @{0} is not registered")]
    MissingExternal(String),
    #[error("{atoms} atoms exceed the oracle limit of {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("rule is not ground: {0}")]
    NotGround(String),
    #[error("program is not stratified: {0}")]
    NotStratified(NotStratified),
    #[error(transparent)]
    Unsafe(#[from] SafetyError),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Satisfiable,
    Unsatisfiable,
}

/// Why candidate models were discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    ConstraintViolated { rule: usize },
    Inconsistent,
}

/// Answer sets, each sorted by canonical rendering, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelResult {
    pub status: Status,
    pub models: Vec<Vec<Literal>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ModelResult {
    pub fn is_satisfiable(&self) -> bool {
        self.status == Status::Satisfiable
    }

    /// Models as sorted lists of rendered literals.
    pub fn rendered(&self) -> Vec<Vec<String>> {
        self.models
            .iter()
            .map(|m| m.iter().map(|l| l.to_string()).collect())
            .collect()
    }

    /// One literal per line, models separated by a blank line.
    pub fn render(&self) -> String {
        self.rendered()
            .iter()
            .map(|m| m.iter().map(|l| format!("{l}\n")).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Source indices of constraints that discarded a candidate.
    pub fn violated_constraints(&self) -> Vec<usize> {
        self.diagnostics
            .iter()
            .filter_map(|d| match d {
                Diagnostic::ConstraintViolated { rule } => Some(*rule),
                _ => None,
            })
            .collect()
    }
}

fn sort_model(mut m: Vec<Literal>) -> (Vec<String>, Vec<Literal>) {
    let mut keyed: Vec<(String, Literal)> = m.drain(..).map(|l| (l.to_string(), l)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().unzip()
}

pub(crate) fn finish(models: Vec<Vec<Literal>>, violated: Vec<usize>, max_models: usize) -> ModelResult {
    finish_with(models, violated, false, max_models)
}

fn finish_with(models: Vec<Vec<Literal>>, violated: Vec<usize>, inconsistent: bool, max_models: usize) -> ModelResult {
    let mut keyed: Vec<(Vec<String>, Vec<Literal>)> = models.into_iter().map(sort_model).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.truncate(max_models);
    let models: Vec<Vec<Literal>> = keyed.into_iter().map(|k| k.1).collect();
    let status = if models.is_empty() {
        Status::Unsatisfiable
    } else {
        Status::Satisfiable
    };
    let mut diagnostics = Vec::new();
    if status == Status::Unsatisfiable {
        diagnostics.extend(violated.into_iter().map(|rule| Diagnostic::ConstraintViolated { rule }));
        if inconsistent {
            diagnostics.push(Diagnostic::Inconsistent);
        }
    }
    ModelResult {
        status,
        models,
        diagnostics,
    }
}

fn prepare(p: &Program, ext: &ExternalRegistry) -> Result<Vec<CompiledRule>, EngineError> {
    p.check_safety()?;
    if let Some(missing) = p.required_externals.iter().find(|n| !ext.contains(n)) {
        return Err(EngineError::MissingExternal(missing.clone()));
    }
    Ok(p.rules.iter().enumerate().map(|(i, r)| CompiledRule::new(i, r)).collect())
}

fn consistent(store: &FactBase) -> bool {
    !store.iter().any(|l| l.negated && store.contains(&l.complement()))
}

/// Result of evaluating a stratified program: its unique candidate model
/// and what rejects it, if anything.
#[derive(Clone)]
pub struct StratifiedOutcome {
    pub facts: FactBase,
    /// Source indices of constraints whose body holds.
    pub violated: Vec<usize>,
    pub consistent: bool,
}

impl StratifiedOutcome {
    pub fn is_satisfiable(&self) -> bool {
        self.violated.is_empty() && self.consistent
    }
}

/// Evaluates a stratified program stratum by stratum. Unlike [`solve`] the
/// model stays an indexed fact base, which is cheaper for large charts.
pub fn evaluate_stratified(
    p: &Program,
    ext: &mut ExternalRegistry,
    cfg: &EngineConfig,
) -> Result<StratifiedOutcome, EngineError> {
    let strata = stratify(p).map_err(EngineError::NotStratified)?;
    let rules = prepare(p, ext)?;
    run_strata(&rules, &strata, ext, cfg)
}

fn run_strata(
    rules: &[CompiledRule],
    strata: &Strata,
    ext: &mut ExternalRegistry,
    cfg: &EngineConfig,
) -> Result<StratifiedOutcome, EngineError> {
    let mut store = FactBase::new();
    let mut sat = Saturator {
        exec: cfg.exec,
        mode: Mode::Exact,
        max_depth: cfg.max_term_depth,
        ext,
    };
    for layer in &strata.layers {
        let layer: HashSet<_> = layer.iter().collect();
        let active: Vec<&CompiledRule> = rules
            .iter()
            .filter(|r| r.head.is_some_and(|h| layer.contains(&h.pred())))
            .collect();
        sat.saturate(&active, &mut store, |_| {})?;
    }
    let mut broken = Vec::new();
    for r in rules.iter().filter(|r| r.head.is_none()) {
        if violated(r, &store, cfg.max_term_depth, sat.ext)? {
            broken.push(r.index);
        }
    }
    let consistent = consistent(&store);
    Ok(StratifiedOutcome {
        facts: store,
        violated: broken,
        consistent,
    })
}

/// Computes the answer sets of `p`.
pub fn solve(p: &Program, ext: &mut ExternalRegistry, cfg: &EngineConfig) -> Result<ModelResult, EngineError> {
    let rules = prepare(p, ext)?;
    match stratify(p) {
        Ok(strata) => {
            let out = run_strata(&rules, &strata, ext, cfg)?;
            let models = if out.is_satisfiable() {
                vec![out.facts.iter().collect()]
            } else {
                Vec::new()
            };
            Ok(finish_with(models, out.violated, !out.consistent, cfg.max_models))
        }
        Err(_) => {
            let g = ground_compiled(&rules, ext, cfg)?;
            let search = ground::stable_models(&g, cfg.naf_atom_budget)?;
            Ok(finish_with(search.models, search.violated, search.inconsistent, cfg.max_models))
        }
    }
}

/// Instantiates `p` over the facts derivable with every `not` assumed
/// true. NAF literals that can never hold are dropped from rule bodies.
pub fn ground(p: &Program, ext: &mut ExternalRegistry, cfg: &EngineConfig) -> Result<GroundProgram, EngineError> {
    let rules = prepare(p, ext)?;
    ground_compiled(&rules, ext, cfg)
}

fn ground_compiled(
    rules: &[CompiledRule],
    ext: &mut ExternalRegistry,
    cfg: &EngineConfig,
) -> Result<GroundProgram, EngineError> {
    let normal: Vec<&CompiledRule> = rules.iter().filter(|r| r.head.is_some()).collect();
    let mut store = FactBase::new();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut sat = Saturator {
        exec: cfg.exec,
        mode: Mode::Optimistic,
        max_depth: cfg.max_term_depth,
        ext,
    };
    sat.saturate(&normal, &mut store, |g| {
        if seen.insert(g.clone()) {
            out.push(g);
        }
    })?;
    for r in rules.iter().filter(|r| r.head.is_none()) {
        for g in instances(r, &store, cfg.max_term_depth, sat.ext)? {
            if seen.insert(g.clone()) {
                out.push(g);
            }
        }
    }
    for g in &mut out {
        g.neg.retain(|l| store.contains(l));
    }
    Ok(GroundProgram::new(out))
}
