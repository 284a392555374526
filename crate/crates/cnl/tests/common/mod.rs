//! Program generators and a grounding referee shared by integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cnlasp_core::{brute_force_oracle, parse_program, GroundProgram, ModelResult, Program};
use rand::Rng;

pub const CONSTANTS: [&str; 3] = ["a", "b", "c"];

fn maybe_neg(rng: &mut impl Rng, p: f64) -> &'static str {
    if rng.random_bool(p) {
        "-"
    } else {
        ""
    }
}

/// Ground normal program text over `atoms` propositions, strong negation
/// and constraints included.
pub fn ground_program(rng: &mut impl Rng, atoms: usize, max_rules: usize) -> String {
    let lit = |rng: &mut dyn rand::RngCore| {
        let neg = if rng.random_bool(0.2) { "-" } else { "" };
        format!("{neg}a{}", rng.random_range(0..atoms))
    };
    let mut out = String::new();
    for _ in 0..rng.random_range(0..=max_rules) {
        let mut body: Vec<String> = (0..rng.random_range(0..3)).map(|_| lit(rng)).collect();
        body.extend((0..rng.random_range(0..2)).map(|_| format!("not {}", lit(rng))));
        let head = if rng.random_bool(0.85) { lit(rng) } else { String::new() };
        match (head.is_empty(), body.is_empty()) {
            (true, true) => continue,
            (false, true) => out.push_str(&format!("{head}.\n")),
            _ => out.push_str(&format!("{head} :- {}.\n", body.join(", "))),
        }
    }
    out
}

/// A literal over the variable `X` or a constant: unary `p`, `q`, `r`, or
/// binary `e` with one constant argument.
fn object_literal(rng: &mut impl Rng, arg: &str, binary: bool) -> String {
    let neg = maybe_neg(rng, 0.2);
    if binary && rng.random_bool(0.25) {
        let k = CONSTANTS[rng.random_range(0..CONSTANTS.len())];
        if rng.random_bool(0.5) {
            format!("{neg}e({arg}, {k})")
        } else {
            format!("{neg}e({k}, {arg})")
        }
    } else {
        format!("{neg}{}({arg})", ["p", "q", "r"][rng.random_range(0..3)])
    }
}

/// Ground facts plus rules over the single variable `X`.
pub fn single_variable_program(rng: &mut impl Rng, binary: bool) -> String {
    let mut out = String::new();
    for _ in 0..rng.random_range(1..=5) {
        let k = CONSTANTS[rng.random_range(0..CONSTANTS.len())];
        out.push_str(&format!("{}.\n", object_literal(rng, k, binary)));
    }
    for _ in 0..rng.random_range(0..=4) {
        let pos: Vec<String> = (0..rng.random_range(1..3)).map(|_| object_literal(rng, "X", binary)).collect();
        let naf: Vec<String> = (0..rng.random_range(0..3))
            .map(|_| format!("not {}", object_literal(rng, "X", binary)))
            .collect();
        let head = if rng.random_bool(0.85) {
            object_literal(rng, "X", binary)
        } else {
            String::new()
        };
        let body: Vec<String> = pos.into_iter().chain(naf).collect();
        out.push_str(&format!("{head} :- {}.\n", body.join(", ")));
    }
    out
}

/// Replaces `X` by each constant in turn.
pub fn ground_over_constants(src: &str) -> Program {
    let mut out = String::new();
    for line in src.lines() {
        if line.contains('X') {
            for k in CONSTANTS {
                out.push_str(&line.replace('X', k));
                out.push('\n');
            }
        } else {
            out.push_str(line);
            out.push('\n');
        }
    }
    parse_program(&out).expect("grounded text parses")
}

/// Brute-force answer sets of a single-variable program, or `None` when
/// its grounding has more than `max_atoms` atoms.
pub fn referee(src: &str, max_atoms: usize) -> Option<ModelResult> {
    let g = GroundProgram::from_ground_program(&ground_over_constants(src)).expect("ground");
    (g.atoms.len() <= max_atoms).then(|| brute_force_oracle(&g).expect("within the oracle limit"))
}

pub fn model_set(r: &ModelResult) -> BTreeSet<Vec<String>> {
    r.rendered()
        .into_iter()
        .map(|mut m| {
            m.sort();
            m
        })
        .collect()
}
