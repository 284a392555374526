//! Evaluation of reified rules with the meta-interpreter.

use std::collections::BTreeSet;

use cnlasp_core::term::{compare, match_term};
use cnlasp_core::{solve, BodyElement, EngineConfig, ExternalRegistry, Literal, Program, Status, Subst, Term};

use crate::assets::Assets;
use crate::error::CnlError;
use crate::reifier::{emit_facts, ReifiedRule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaResult {
    pub status: Status,
    /// `in_AS(lit(..))` atoms of the first answer set, in term order. Empty
    /// when unsatisfiable.
    pub model: Vec<Term>,
    /// Every answer set, first one equal to `model`.
    pub models: Vec<Vec<Term>>,
    /// Constraint rule ids that fired in some discarded candidate.
    pub violated: Vec<i64>,
    /// Some candidate held a literal together with its strong negation.
    pub inconsistent: bool,
}

impl MetaResult {
    pub fn is_satisfiable(&self) -> bool {
        self.status == Status::Satisfiable
    }

    /// One `in_AS` literal per line.
    pub fn render(&self) -> String {
        self.model.iter().map(|t| format!("{t}\n")).collect()
    }
}

/// Runs the meta-interpreter over `kb`. Candidates carrying a `violated` or
/// `inconsistent` marker are discarded.
pub fn evaluate(kb: &[ReifiedRule], assets: &Assets, cfg: &EngineConfig) -> Result<MetaResult, CnlError> {
    evaluate_facts(emit_facts(kb), assets, cfg)
}

/// As [`evaluate`], over a KB already rendered as facts in any order.
pub fn evaluate_facts(facts: Program, assets: &Assets, cfg: &EngineConfig) -> Result<MetaResult, CnlError> {
    let mut p = assets.meta.clone();
    p.extend(facts);
    let cfg = EngineConfig {
        max_models: usize::MAX,
        ..*cfg
    };
    let out = solve(&p, &mut ExternalRegistry::new(), &cfg)?;
    let mut violated = BTreeSet::new();
    let mut inconsistent = false;
    let mut models = Vec::new();
    for m in &out.models {
        let mut clean = true;
        let mut in_as = Vec::new();
        for l in m.iter().filter(|l| !l.negated) {
            match (l.atom.functor().map(|f| f.as_str()), l.atom.args()) {
                (Some("in_AS"), [t]) => in_as.push(*t),
                (Some("violated"), [r]) => {
                    clean = false;
                    violated.extend(r.as_int());
                }
                (Some("inconsistent"), _) => {
                    clean = false;
                    inconsistent = true;
                }
                _ => {}
            }
        }
        if clean {
            in_as.sort_by(|a, b| compare(*a, *b));
            models.push(in_as);
        }
    }
    let status = if models.is_empty() {
        Status::Unsatisfiable
    } else {
        Status::Satisfiable
    };
    Ok(MetaResult {
        status,
        model: models.first().cloned().unwrap_or_default(),
        models,
        violated: violated.into_iter().collect(),
        inconsistent,
    })
}

/// Matches `pattern` against the model's `lit(..)` terms, in model order.
pub fn query(result: &MetaResult, pattern: Term) -> Result<Vec<Subst>, CnlError> {
    if !result.is_satisfiable() {
        return Err(CnlError::QueryOnUnsat);
    }
    Ok(result
        .model
        .iter()
        .filter_map(|t| match_term(pattern, *t, &Subst::new()))
        .collect())
}

fn functor_of(l: &Literal) -> Term {
    let name = Term::constant(l.atom.functor().expect("literal atoms have a name").as_str());
    let name = if l.negated {
        Term::compound("neg", vec![name])
    } else {
        name
    };
    Term::compound("func", vec![name])
}

fn arg(t: Term) -> Term {
    Term::compound("arg", vec![t])
}

/// Reified form of an object literal. `var` is replaced by `skolem`; a
/// two-argument literal with the variable in one place becomes a one-argument
/// view keyed by the other.
fn reify_literal(l: &Literal, var: Option<Term>, skolem: Term) -> Result<Term, String> {
    let f = functor_of(l);
    let is_var = |t: &Term| Some(*t) == var;
    for a in l.atom.args() {
        if !a.is_ground() && !is_var(a) {
            return Err(format!("argument {a} of {l}"));
        }
    }
    match l.atom.args() {
        [x] if is_var(x) => Ok(Term::compound("lit", vec![f, arg(skolem)])),
        [x] => Ok(Term::compound("lit", vec![f, arg(*x)])),
        [x, y] => match (is_var(x), is_var(y)) {
            (false, false) => Ok(Term::compound("lit", vec![f, arg(*x), arg(*y)])),
            (true, false) => Ok(Term::compound("lit", vec![Term::compound("fst", vec![f, arg(*y)]), arg(skolem)])),
            (false, true) => Ok(Term::compound("lit", vec![Term::compound("snd", vec![f, arg(*x)]), arg(skolem)])),
            (true, true) => Err(format!("repeated variable in {l}")),
        },
        _ => Err(format!("{l} has arity other than one or two")),
    }
}

/// Reifies a hand-written program of unconditional ground facts and rules
/// over exactly one variable, each body literal mentioning it. Rule ids
/// follow source order from 1; the skolem of rule `R` is `sk(R)`.
pub fn reify_program(p: &Program) -> Result<Vec<ReifiedRule>, CnlError> {
    let mut out = Vec::new();
    for (i, r) in p.rules.iter().enumerate() {
        let id = i as i64 + 1;
        let unsupported = |reason: String| CnlError::UnsupportedRule {
            rule: r.to_string(),
            reason,
        };
        let skolem = Term::compound("sk", vec![Term::int(id)]);
        if r.body.is_empty() {
            let head = r.head.expect("an empty rule has a head or a body");
            if !head.is_ground() {
                return Err(unsupported("non-ground fact".into()));
            }
            out.push(ReifiedRule {
                id,
                head: Some(reify_literal(&head, None, skolem).map_err(unsupported)?),
                pbl: Vec::new(),
                nbl: Vec::new(),
                is_constraint: false,
            });
            continue;
        }
        let mut vars = Vec::new();
        for b in &r.body {
            vars.extend(b.vars());
        }
        if let Some(h) = &r.head {
            vars.extend(h.atom.vars());
        }
        vars.sort();
        vars.dedup();
        let [var] = vars[..] else {
            return Err(unsupported("a rule body needs exactly one variable".into()));
        };
        let var = Term::var(var.as_str());
        let mut pbl = Vec::new();
        let mut nbl = Vec::new();
        for b in &r.body {
            let (l, into) = match b {
                BodyElement::Pos(l) => (l, &mut pbl),
                BodyElement::Naf(l) => (l, &mut nbl),
                _ => return Err(unsupported("only literals may occur in a body".into())),
            };
            if l.atom.vars().is_empty() {
                return Err(unsupported(format!("body literal {l} has no variable")));
            }
            into.push(reify_literal(l, Some(var), skolem).map_err(unsupported)?);
        }
        if pbl.is_empty() {
            return Err(unsupported("no positive body literal".into()));
        }
        let head = match &r.head {
            Some(h) if h.atom.vars().is_empty() => return Err(unsupported("ground head on a rule".into())),
            Some(h) => Some(reify_literal(h, Some(var), skolem).map_err(unsupported)?),
            None => None,
        };
        for v in [&mut pbl, &mut nbl] {
            v.sort_by(|a, b| compare(*a, *b));
            v.dedup();
        }
        out.push(ReifiedRule {
            id,
            head,
            pbl,
            nbl,
            is_constraint: r.head.is_none(),
        });
    }
    Ok(out)
}

/// Object literal denoted by a model term: `lit(func(P), arg(C))` is `P(C)`
/// and `func(neg(P))` is `-P`. Keyed views give `None`.
pub fn object_literal(t: Term) -> Option<Literal> {
    if t.functor()?.as_str() != "lit" {
        return None;
    }
    let f = t.args()[0];
    if f.functor()?.as_str() != "func" {
        return None;
    }
    let name = f.args()[0];
    let (negated, name) = match name.functor().map(|s| s.as_str()) {
        Some("neg") if name.arity() == 1 => (true, name.args()[0]),
        _ => (false, name),
    };
    let args: Option<Vec<Term>> = t.args()[1..]
        .iter()
        .map(|a| (a.functor()?.as_str() == "arg" && a.arity() == 1).then(|| a.args()[0]))
        .collect();
    let atom = Term::compound(name.as_constant()?, args?);
    Some(Literal { negated, atom })
}

/// Object literals of a model, rendered and sorted.
pub fn object_model(model: &[Term]) -> Vec<String> {
    let mut v: Vec<String> = model
        .iter()
        .filter_map(|t| object_literal(*t))
        .map(|l| l.to_string())
        .collect();
    v.sort();
    v.dedup();
    v
}
