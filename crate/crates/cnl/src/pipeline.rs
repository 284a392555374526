//! The authoring workbench: committed sentences, their reified rules and
//! the current meta-level result.

use std::sync::Arc;

use cnlasp_core::{EngineConfig, Term};

use crate::assets::Assets;
use crate::error::CnlError;
use crate::frontend::{is_terminated, sentences, tokenize, TokenFact};
use crate::grammar::parse_sentence;
use crate::lookahead::{suggest, LookaheadResult, DEFAULT_MAX_DEPTH};
use crate::meta::{evaluate, MetaResult};
use crate::reifier::{emit_facts, reify, ReifiedRule, ReifierState};

#[derive(Clone, Debug)]
pub struct WorkbenchConfig {
    pub engine: EngineConfig,
    pub lookahead_depth: usize,
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        WorkbenchConfig {
            engine: EngineConfig {
                max_term_depth: 64,
                ..EngineConfig::default()
            },
            lookahead_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Committed {
    pub text: String,
    pub tree: Term,
    pub rules: Vec<ReifiedRule>,
}

/// Outcome of committing one or more sentences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commit {
    pub sentences: Vec<Committed>,
    pub result: MetaResult,
}

#[derive(Clone, Debug)]
pub struct Workbench {
    assets: Arc<Assets>,
    config: WorkbenchConfig,
    committed: Vec<Committed>,
    state: ReifierState,
    result: MetaResult,
}

fn text_of(tokens: &[TokenFact]) -> String {
    let mut out = String::new();
    for t in tokens {
        if !out.is_empty() && !is_terminated(std::slice::from_ref(t)) {
            out.push(' ');
        }
        out.push_str(&t.surface);
    }
    out
}

impl Workbench {
    pub fn new(assets: Arc<Assets>, config: WorkbenchConfig) -> Result<Workbench, CnlError> {
        let result = evaluate(&[], &assets, &config.engine)?;
        Ok(Workbench {
            assets,
            config,
            committed: Vec::new(),
            state: ReifierState::default(),
            result,
        })
    }

    pub fn builtin() -> Workbench {
        Workbench::new(Arc::new(Assets::builtin()), WorkbenchConfig::default()).expect("empty KB evaluates")
    }

    pub fn assets(&self) -> &Assets {
        &self.assets
    }

    pub fn config(&self) -> &WorkbenchConfig {
        &self.config
    }

    pub fn sentences(&self) -> &[Committed] {
        &self.committed
    }

    pub fn rules(&self) -> &[ReifiedRule] {
        &self.state.committed
    }

    pub fn result(&self) -> &MetaResult {
        &self.result
    }

    /// The KB as `rule/head/pbl/nbl/cstr` facts, one per line.
    pub fn kb_text(&self) -> String {
        emit_facts(&self.state.committed).to_string()
    }

    /// Commits one terminated sentence. An unsatisfiable KB is still
    /// committed; on error nothing changes.
    pub fn add_sentence(&mut self, text: &str) -> Result<Commit, CnlError> {
        let tokens = tokenize(text, &self.assets.lexicon)?;
        let groups = sentences(&tokens);
        let terminated = groups.iter().filter(|g| is_terminated(g)).count();
        if groups.len() != 1 || terminated != 1 {
            return Err(CnlError::NotOneSentence(terminated));
        }
        self.add_groups(groups)
    }

    /// Commits every sentence of `text`, or none of them.
    pub fn add_text(&mut self, text: &str) -> Result<Commit, CnlError> {
        let tokens = tokenize(text, &self.assets.lexicon)?;
        self.add_groups(sentences(&tokens))
    }

    fn add_groups(&mut self, groups: Vec<Vec<TokenFact>>) -> Result<Commit, CnlError> {
        let cfg = &self.config.engine;
        let mut state = self.state.clone();
        let mut added = Vec::new();
        for mut toks in groups {
            let no = (self.committed.len() + added.len() + 1) as u32;
            for t in &mut toks {
                t.sentence_no = no;
            }
            let trees = parse_sentence(&toks, &self.assets, cfg)?;
            let tree = match trees[..] {
                [tree] => tree,
                [] => return Err(CnlError::NoParse { sentence: no }),
                _ => {
                    return Err(CnlError::AmbiguousParse {
                        sentence: no,
                        trees: trees.len(),
                    })
                }
            };
            let (rules, next) = reify(tree, no, &state, &self.assets, cfg)?;
            state = next;
            added.push(Committed {
                text: text_of(&toks),
                tree,
                rules,
            });
        }
        let result = evaluate(&state.committed, &self.assets, cfg)?;
        self.state = state;
        self.committed.extend(added.iter().cloned());
        self.result = result.clone();
        Ok(Commit { sentences: added, result })
    }

    /// Removes the last sentence and rebuilds the state from the rest.
    pub fn retract_last(&mut self) -> Result<Option<Committed>, CnlError> {
        let Some(last) = self.committed.last().cloned() else {
            return Ok(None);
        };
        let cfg = &self.config.engine;
        let mut state = ReifierState::default();
        for (i, c) in self.committed[..self.committed.len() - 1].iter().enumerate() {
            state = reify(c.tree, i as u32 + 1, &state, &self.assets, cfg)?.1;
        }
        self.result = evaluate(&state.committed, &self.assets, cfg)?;
        self.state = state;
        self.committed.pop();
        Ok(Some(last))
    }

    /// Suggestions after `prefix`. Only its last sentence counts; a
    /// terminated prefix asks for a sentence start.
    pub fn lookahead(&self, prefix: &str) -> Result<LookaheadResult, CnlError> {
        let tokens = tokenize(prefix, &self.assets.lexicon)?;
        let mut current = sentences(&tokens).pop().unwrap_or_default();
        if is_terminated(&current) {
            current.clear();
        }
        let no = self.committed.len() as u32 + 1;
        for (i, t) in current.iter_mut().enumerate() {
            t.sentence_no = no;
            t.start = i as u32 + 1;
            t.end = i as u32 + 2;
        }
        suggest(&current, &self.assets, self.config.lookahead_depth, &self.config.engine)
    }
}
