//! Sentence splitting and tokenization into `token/4` facts.
//!
//! Positions index token boundaries and restart at 1 in every sentence.

use cnlasp_core::{Literal, Program, Rule, Term};
use thiserror::Error;

use crate::lexicon::Lexicon;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TokenFact {
    pub surface: String,
    pub sentence_no: u32,
    pub start: u32,
    pub end: u32,
}

impl TokenFact {
    pub fn new(surface: &str, sentence_no: u32, start: u32) -> TokenFact {
        TokenFact {
            surface: surface.to_owned(),
            sentence_no,
            start,
            end: start + 1,
        }
    }

    pub fn to_fact(&self) -> Rule {
        Rule::fact(Literal::pos(Term::compound(
            "token",
            vec![
                Term::text(&self.surface),
                Term::int(self.sentence_no as i64),
                Term::int(self.start as i64),
                Term::int(self.end as i64),
            ],
        )))
    }

    /// Inverse of [`TokenFact::to_fact`].
    pub fn from_fact(rule: &Rule) -> Option<TokenFact> {
        let h = rule.head.filter(|h| rule.is_fact() && !h.negated)?.atom;
        if h.functor()?.as_str() != "token" || h.arity() != 4 {
            return None;
        }
        let a = h.args();
        let num = |t: Term| t.as_int().and_then(|v| u32::try_from(v).ok());
        Some(TokenFact {
            surface: a[0].as_text()?.to_owned(),
            sentence_no: num(a[1])?,
            start: num(a[2])?,
            end: num(a[3])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("unknown word {surface:?} in sentence {sentence}, position {position}")]
    UnknownToken {
        surface: String,
        sentence: u32,
        position: u32,
    },
}

const TERMINATORS: [char; 2] = ['.', '?'];

/// Splits `text` into words, detaching terminal punctuation.
fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let mut word = String::new();
        for c in raw.chars() {
            if TERMINATORS.contains(&c) {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            } else {
                word.push(c);
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

/// Tokenizes `text` with greedy longest match over multiword surfaces. A
/// trailing unterminated sentence is kept as the last sentence.
pub fn tokenize(text: &str, lex: &Lexicon) -> Result<Vec<TokenFact>, FrontendError> {
    let words = words(text);
    let multi: Vec<Vec<&str>> = lex
        .multiword_index
        .iter()
        .map(|s| s.split(' ').collect())
        .collect();
    let mut out = Vec::new();
    let (mut sentence, mut pos) = (1u32, 1u32);
    let mut i = 0;
    while i < words.len() {
        let matched = multi
            .iter()
            .find(|m| words.len() - i >= m.len() && m.iter().zip(&words[i..]).all(|(a, b)| a == b));
        let (surface, width) = match matched {
            Some(m) => (m.join(" "), m.len()),
            None => (words[i].clone(), 1),
        };
        if !lex.knows(&surface) {
            return Err(FrontendError::UnknownToken {
                surface,
                sentence,
                position: pos,
            });
        }
        let terminal = width == 1 && surface.chars().all(|c| TERMINATORS.contains(&c));
        out.push(TokenFact::new(&surface, sentence, pos));
        pos += 1;
        i += width;
        if terminal {
            sentence += 1;
            pos = 1;
        }
    }
    Ok(out)
}

/// Groups tokens by sentence number, in order.
pub fn sentences(tokens: &[TokenFact]) -> Vec<Vec<TokenFact>> {
    let mut out: Vec<Vec<TokenFact>> = Vec::new();
    for t in tokens {
        match out.last_mut() {
            Some(s) if s[0].sentence_no == t.sentence_no => s.push(t.clone()),
            _ => out.push(vec![t.clone()]),
        }
    }
    out
}

/// Whether the token list ends with terminal punctuation.
pub fn is_terminated(tokens: &[TokenFact]) -> bool {
    tokens
        .last()
        .is_some_and(|t| t.surface.chars().all(|c| TERMINATORS.contains(&c)))
}

pub fn to_facts(tokens: &[TokenFact]) -> Program {
    Program::new(tokens.iter().map(TokenFact::to_fact).collect())
}
