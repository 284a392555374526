//! Reference semantics by exhaustive subset enumeration.
//!
//! Deliberately naive and independent of the grounder and of the
//! component search: a candidate set is an answer set iff it equals the
//! least model of its reduct, violates no constraint and holds no
//! complementary pair.

use crate::par::{self, Exec};

use super::ground::GroundProgram;
use super::{finish, EngineError, ModelResult};

pub const ORACLE_MAX_ATOMS: usize = 20;

fn least_model_of_reduct(g: &GroundProgram, candidate: u32, index: &dyn Fn(&crate::syntax::Literal) -> usize) -> u32 {
    let mut m = 0u32;
    loop {
        let before = m;
        for r in &g.rules {
            let Some(h) = &r.head else { continue };
            if r.neg.iter().any(|l| candidate >> index(l) & 1 == 1) {
                continue;
            }
            if r.pos.iter().all(|l| m >> index(l) & 1 == 1) {
                m |= 1 << index(h);
            }
        }
        if m == before {
            return m;
        }
    }
}

/// All answer sets of `g`, in canonical order, untruncated.
pub fn brute_force_oracle(g: &GroundProgram) -> Result<ModelResult, EngineError> {
    let n = g.atoms.len();
    if n > ORACLE_MAX_ATOMS {
        return Err(EngineError::TooManyAtoms {
            atoms: n,
            limit: ORACLE_MAX_ATOMS,
        });
    }
    let index = |l: &crate::syntax::Literal| {
        g.atoms
            .iter()
            .position(|a| a == l)
            .expect("ground program lists all its atoms")
    };
    let hits: Vec<Option<(u32, Vec<usize>)>> = par::map_range(Exec::default(), 1usize << n, |c| {
        let c = c as u32;
        if least_model_of_reduct(g, c, &index) != c {
            return None;
        }
        let mut violated = Vec::new();
        for r in g.rules.iter().filter(|r| r.head.is_none()) {
            let fires = r.pos.iter().all(|l| c >> index(l) & 1 == 1)
                && r.neg.iter().all(|l| c >> index(l) & 1 == 0);
            if fires {
                violated.push(r.origin);
            }
        }
        let clash = g.atoms.iter().enumerate().any(|(i, l)| {
            c >> i & 1 == 1 && g.atoms.iter().position(|a| *a == l.complement()).is_some_and(|j| c >> j & 1 == 1)
        });
        Some((if violated.is_empty() && !clash { c } else { u32::MAX }, violated))
    });
    let mut models = Vec::new();
    let mut violated = Vec::new();
    for (c, v) in hits.into_iter().flatten() {
        violated.extend(v);
        if c != u32::MAX {
            models.push((0..n).filter(|i| c >> i & 1 == 1).map(|i| g.atoms[i]).collect());
        }
    }
    violated.sort_unstable();
    violated.dedup();
    Ok(finish(models, violated, usize::MAX))
}
