use cnlasp_core::syntax::ParseError;
use cnlasp_core::EngineError;
use thiserror::Error;

use crate::frontend::FrontendError;
use crate::lexicon::LexiconError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnlError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("asset {name}: {source}")]
    Asset { name: String, source: ParseError },
    #[error("asset {name} has an unsafe rule: {message}")]
    UnsafeAsset { name: String, message: String },
    #[error("expected exactly one terminated sentence, found {0}")]
    NotOneSentence(usize),
    #[error("sentence {sentence} has no parse")]
    NoParse { sentence: u32 },
    #[error("sentence {sentence} has {trees} parses")]
    AmbiguousParse { sentence: u32, trees: usize },
    #[error("no antecedent for \"the {surface}\" in sentence {sentence}")]
    UnresolvedAnaphor { surface: String, sentence: u32 },
    #[error("no lexicon entry for {0:?}")]
    LexiconGap(String),
    #[error("sentence {sentence} cannot be translated: {reason}")]
    Unsupported { sentence: u32, reason: String },
    #[error("rule {rule} is outside the reifiable fragment: {reason}")]
    UnsupportedRule { rule: String, reason: String },
    #[error("no continuation within {max_depth} words")]
    NoContinuation { max_depth: usize },
    #[error("query on an unsatisfiable result")]
    QueryOnUnsat,
}
