//! Controlled natural language on top of the answer-set engine: text is
//! tokenized, parsed by a grammar program, translated into reified rules
//! and evaluated by a meta-interpreter program. A look-ahead program
//! predicts admissible next words.

pub mod assets;
pub mod error;
pub mod frontend;
pub mod grammar;
pub mod lexicon;
pub mod lookahead;
pub mod meta;
pub mod pipeline;
pub mod reifier;

pub use assets::{AssetSources, Assets};
pub use error::CnlError;
pub use frontend::{tokenize, TokenFact};
pub use grammar::{parse_sentence, render_tree};
pub use lexicon::{Agreement, Category, LexEntry, Lexicon, Semantics};
pub use lookahead::{suggest, LookaheadResult, Suggestion};
pub use meta::{evaluate, query, MetaResult};
pub use pipeline::{Commit, Committed, Workbench, WorkbenchConfig};
pub use reifier::{emit_facts, reify, ReifiedRule, ReifierState};
