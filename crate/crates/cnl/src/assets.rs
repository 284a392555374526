//! The shipped rule programs and lexicon, and loading of replacements.

use std::collections::BTreeSet;

use cnlasp_core::{parse_program, Program, Term};

use crate::error::CnlError;
use crate::lexicon::Lexicon;

pub const GRAMMAR: &str = include_str!("../assets/grammar.lp");
pub const LOOKAHEAD: &str = include_str!("../assets/lookahead.lp");
pub const REIFY: &str = include_str!("../assets/reify.lp");
pub const META: &str = include_str!("../assets/meta.lp");
pub const LEXICON: &str = include_str!("../assets/lexicon.lp");
pub const ENGINE_DEMO: &str = include_str!("../assets/engine_demo.lp");
pub const ENGINE_DEMO_EXTRA: &str = include_str!("../assets/engine_demo_extra.lp");
/// The six-sentence student text.
pub const STUDENTS: &str = include_str!("../assets/students.cnl");

/// Source texts, each replaceable independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssetSources {
    pub grammar: String,
    pub lookahead: String,
    pub reify: String,
    pub meta: String,
    pub lexicon: String,
}

impl Default for AssetSources {
    fn default() -> Self {
        AssetSources {
            grammar: GRAMMAR.to_owned(),
            lookahead: LOOKAHEAD.to_owned(),
            reify: REIFY.to_owned(),
            meta: META.to_owned(),
            lexicon: LEXICON.to_owned(),
        }
    }
}

/// Parsed and validated assets.
#[derive(Clone, Debug)]
pub struct Assets {
    pub grammar: Program,
    pub lookahead: Program,
    pub reify: Program,
    pub meta: Program,
    pub lexicon: Lexicon,
    /// `lexicon/5` facts of `lexicon`, including `$lah$` entries.
    pub lexicon_facts: Program,
    /// Categories that can begin a sentence, `s` included.
    pub sentence_starts: BTreeSet<String>,
}

fn program(name: &str, src: &str) -> Result<Program, CnlError> {
    let p = parse_program(src).map_err(|source| CnlError::Asset {
        name: name.to_owned(),
        source,
    })?;
    p.check_safety().map_err(|e| CnlError::UnsafeAsset {
        name: name.to_owned(),
        message: e.to_string(),
    })?;
    Ok(p)
}

impl Assets {
    pub fn builtin() -> Assets {
        Assets::load(&AssetSources::default()).expect("shipped assets are valid")
    }

    pub fn load(src: &AssetSources) -> Result<Assets, CnlError> {
        let lexicon = Lexicon::load(&src.lexicon)?;
        let grammar = program("grammar.lp", &src.grammar)?;
        Ok(Assets {
            sentence_starts: left_corners(&grammar, "s"),
            lookahead: program("lookahead.lp", &src.lookahead)?,
            reify: program("reify.lp", &src.reify)?,
            meta: program("meta.lp", &src.meta)?,
            lexicon_facts: lexicon.to_program(),
            lexicon,
            grammar,
        })
    }

    /// Same programs with a different lexicon.
    pub fn with_lexicon(&self, lexicon: Lexicon) -> Assets {
        Assets {
            lexicon_facts: lexicon.to_program(),
            lexicon,
            ..self.clone()
        }
    }
}

fn chart_edge(t: Term) -> Option<(&'static str, Term)> {
    if t.functor()?.as_str() != "rule" || t.arity() != 7 {
        return None;
    }
    Some((t.args()[0].as_constant()?, t.args()[5]))
}

/// Closure of `root` under "may begin with": a rule for category C whose
/// first body edge starts where C starts makes that edge's category a left
/// corner of C.
pub fn left_corners(grammar: &Program, root: &str) -> BTreeSet<String> {
    let mut pairs = Vec::new();
    for rule in &grammar.rules {
        let Some((head_cat, head_from)) = rule.head.and_then(|h| chart_edge(h.atom)) else {
            continue;
        };
        let first = rule.body.iter().find_map(|b| match b {
            cnlasp_core::BodyElement::Pos(l) => chart_edge(l.atom),
            _ => None,
        });
        if let Some((cat, from)) = first {
            if from == head_from {
                pairs.push((head_cat, cat));
            }
        }
    }
    let mut out = BTreeSet::from([root.to_owned()]);
    loop {
        let before = out.len();
        for (h, c) in &pairs {
            if out.contains(*h) {
                out.insert((*c).to_owned());
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_assets_load() {
        let a = Assets::builtin();
        assert!(a.grammar.rules.len() > 20);
        assert!(a.meta.rules.iter().any(|r| r.to_string().contains("A1 != A2")));
        assert!(a.lookahead.rules.iter().any(|r| r.is_constraint()));
    }

    #[test]
    fn sentence_starts() {
        let a = Assets::builtin();
        let got: Vec<&str> = a.sentence_starts.iter().map(String::as_str).collect();
        assert_eq!(got, vec!["cond", "det", "excl", "np", "pname", "s"]);
    }

    #[test]
    fn render_parse_render_is_stable() {
        for src in [GRAMMAR, LOOKAHEAD, REIFY, META, LEXICON, ENGINE_DEMO, ENGINE_DEMO_EXTRA] {
            let once = parse_program(src).unwrap();
            let again = parse_program(&once.to_string()).unwrap();
            assert_eq!(once, again);
            assert_eq!(once.to_string(), again.to_string());
        }
    }
}
