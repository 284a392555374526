//! Bottom-up chart parsing with the grammar program, and tree rendering.

use std::fmt::Write;

use cnlasp_core::engine::StratifiedOutcome;
use cnlasp_core::term::compare;
use cnlasp_core::{evaluate_stratified, EngineConfig, ExternalRegistry, Literal, Program, Subst, Term};

use crate::assets::Assets;
use crate::error::CnlError;
use crate::frontend::{to_facts, TokenFact};

/// Grammar, lexicon and token facts as one program.
pub fn chart_program(tokens: &[TokenFact], assets: &Assets) -> Program {
    let mut p = assets.grammar.clone();
    p.extend(assets.lexicon_facts.clone());
    p.extend(to_facts(tokens));
    p
}

/// Saturates the chart for `tokens`, optionally with more rules on top.
pub fn chart(
    tokens: &[TokenFact],
    extra: Option<&Program>,
    assets: &Assets,
    cfg: &EngineConfig,
) -> Result<StratifiedOutcome, CnlError> {
    let mut p = chart_program(tokens, assets);
    if let Some(extra) = extra {
        p.extend(extra.clone());
    }
    Ok(evaluate_stratified(&p, &mut ExternalRegistry::new(), cfg)?)
}

/// `rule(C, T, Y, M, N, From, To)` with the given bound arguments; the
/// others are variables named after their role.
pub fn edge_pattern(category: Option<&str>, sentence: u32, from: Option<u32>, to: Option<u32>) -> Literal {
    let int_or = |v: Option<u32>, name: &str| v.map_or_else(|| Term::var(name), |v| Term::int(v as i64));
    Literal::pos(Term::compound(
        "rule",
        vec![
            category.map_or_else(|| Term::var("C"), Term::constant),
            Term::var("T"),
            Term::var("Y"),
            Term::var("M"),
            Term::int(sentence as i64),
            int_or(from, "P1"),
            int_or(to, "P2"),
        ],
    ))
}

/// Trees of every `s` edge spanning all of `tokens`, in term order.
pub fn parse_sentence(tokens: &[TokenFact], assets: &Assets, cfg: &EngineConfig) -> Result<Vec<Term>, CnlError> {
    let Some(last) = tokens.iter().map(|t| t.end).max() else {
        return Ok(Vec::new());
    };
    let sentence = tokens[0].sentence_no;
    let out = chart(tokens, None, assets, cfg)?;
    let pattern = edge_pattern(Some("s"), sentence, Some(1), Some(last));
    let mut trees: Vec<Term> = out
        .facts
        .query(&pattern, &Subst::new())
        .into_iter()
        .filter_map(|s| s.get_name("T"))
        .collect();
    trees.sort_by(|a, b| compare(*a, *b));
    trees.dedup();
    Ok(trees)
}

/// Renders a tree in indented form: the first argument stays on the line
/// of its functor, later ones align under it.
pub fn render_tree(tree: Term) -> String {
    let mut out = String::new();
    render_at(tree, 0, &mut out);
    out
}

fn render_at(t: Term, col: usize, out: &mut String) {
    let Some(f) = t.functor() else {
        write!(out, "{t}").expect("writing to a String");
        return;
    };
    let name = f.as_str();
    out.push_str(name);
    out.push('(');
    let inner = col + name.chars().count() + 1;
    for (i, a) in t.args().iter().enumerate() {
        if i > 0 {
            out.push_str(",\n");
            out.push_str(&" ".repeat(inner));
        }
        render_at(*a, inner, out);
    }
    out.push(')');
}
