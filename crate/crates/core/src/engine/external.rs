//! Value-inventing external functions called as `V := @name(args)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use crate::term::{Sym, Term};

pub type ExternalFn = Box<dyn FnMut(&[Term]) -> Term + Send>;

/// Identifies one logical invocation: the function, the rule and position
/// it was called from, and the bindings of the variables bound before it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct MemoKey {
    pub name: Sym,
    pub site: Arc<str>,
    pub binding: Vec<(Sym, Term)>,
    pub args: Vec<Term>,
}

/// Named external functions plus the memo that keeps them idempotent.
///
/// The memo outlives a single `solve`: solving the same program again with
/// the same registry re-uses every previously invented value.
#[derive(Default)]
pub struct ExternalRegistry {
    functions: HashMap<String, ExternalFn>,
    memo: HashMap<MemoKey, Term>,
}

impl fmt::Debug for ExternalRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<&str> = self.functions.keys().map(String::as_str).collect();
        names.sort_unstable();
        f.debug_struct("ExternalRegistry")
            .field("functions", &names)
            .field("memoized", &self.memo.len())
            .finish()
    }
}

impl ExternalRegistry {
    pub fn new() -> ExternalRegistry {
        ExternalRegistry::default()
    }

    pub fn register(&mut self, name: &str, f: impl FnMut(&[Term]) -> Term + Send + 'static) {
        self.functions.insert(name.to_owned(), Box::new(f));
    }

    /// Registers a function returning `start`, `start + 1`, ... on successive
    /// fresh calls. The handle holds the next value to be handed out.
    pub fn register_counter(&mut self, name: &str, start: i64) -> Arc<AtomicI64> {
        let next = Arc::new(AtomicI64::new(start));
        let handle = next.clone();
        self.register(name, move |_| Term::int(next.fetch_add(1, Ordering::SeqCst)));
        handle
    }

    pub fn contains(&self, name: &str) -> bool {
        self.functions.contains_key(name)
    }

    /// Number of distinct invocations remembered so far.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn clear_memo(&mut self) {
        self.memo.clear();
    }

    pub(crate) fn call(&mut self, key: MemoKey) -> Option<Term> {
        if let Some(t) = self.memo.get(&key) {
            return Some(*t);
        }
        let f = self.functions.get_mut(key.name.as_str())?;
        let value = f(&key.args);
        self.memo.insert(key, value);
        Some(value)
    }
}
