//! Terms, the rule language and the answer-set engine.

pub mod engine;
pub mod par;
pub mod syntax;
pub mod term;

pub use engine::{
    brute_force_oracle, evaluate_stratified, solve, stratify, EngineConfig, EngineError, ExternalRegistry, FactBase, GroundProgram,
    ModelResult, Status, StratifiedOutcome,
};
pub use par::Exec;
pub use syntax::{parse_program, parse_term, BodyElement, Literal, Program, Rule};
pub use term::{Subst, Sym, Term};
