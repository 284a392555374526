//! Interned first-order terms, substitutions and one-way matching.
//!
//! Every term is hash-consed into a process-wide table, so a [`Term`] is a
//! single pointer: copying is free and structural equality is pointer
//! equality. Interned nodes are never freed.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use dashmap::DashMap;
use once_cell::sync::Lazy;
use thiserror::Error;

static SYMBOLS: Lazy<DashMap<&'static str, ()>> = Lazy::new(DashMap::new);
static TERMS: Lazy<DashMap<TermKind, Term>> = Lazy::new(DashMap::new);

/// An interned string.
#[derive(Clone, Copy)]
pub struct Sym(&'static str);

impl Sym {
    pub fn new(name: &str) -> Sym {
        if let Some(entry) = SYMBOLS.get(name) {
            return Sym(entry.key());
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let entry = SYMBOLS.entry(leaked).or_insert(());
        Sym(entry.key())
    }

    pub fn as_str(self) -> &'static str {
        self.0
    }
}

impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state)
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Sym {
        Sym::new(s)
    }
}

/// The shape of a term node. Children are already interned.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TermKind {
    Integer(i64),
    Text(Sym),
    Constant(Sym),
    Variable(Sym),
    Compound(Sym, Box<[Term]>),
}

struct Node {
    kind: TermKind,
    depth: u32,
    ground: bool,
}

/// A hash-consed first-order term.
#[derive(Clone, Copy)]
pub struct Term(&'static Node);

impl Term {
    fn intern(kind: TermKind) -> Term {
        if let Some(t) = TERMS.get(&kind) {
            return *t;
        }
        let (depth, ground) = match &kind {
            TermKind::Compound(_, args) => (
                1 + args.iter().map(|a| a.depth()).max().unwrap_or(0),
                args.iter().all(|a| a.is_ground()),
            ),
            TermKind::Variable(_) => (1, false),
            _ => (1, true),
        };
        *TERMS.entry(kind.clone()).or_insert_with(|| {
            Term(Box::leak(Box::new(Node {
                kind,
                depth,
                ground,
            })))
        })
    }

    pub fn int(value: i64) -> Term {
        Term::intern(TermKind::Integer(value))
    }

    pub fn text(value: &str) -> Term {
        Term::intern(TermKind::Text(Sym::new(value)))
    }

    pub fn constant(name: &str) -> Term {
        Term::intern(TermKind::Constant(Sym::new(name)))
    }

    pub fn var(name: &str) -> Term {
        Term::intern(TermKind::Variable(Sym::new(name)))
    }

    /// Builds `functor(args..)`; an empty argument list yields a constant.
    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        Term::compound_sym(Sym::new(functor), args)
    }

    pub fn compound_sym(functor: Sym, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::intern(TermKind::Constant(functor))
        } else {
            Term::intern(TermKind::Compound(functor, args.into_boxed_slice()))
        }
    }

    pub fn kind(&self) -> &'static TermKind {
        &self.0.kind
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// True iff no variable occurs at any depth.
    pub fn is_ground(&self) -> bool {
        self.0.ground
    }

    pub fn is_var(&self) -> bool {
        matches!(self.0.kind, TermKind::Variable(_))
    }

    /// Name of a constant or functor of a compound.
    pub fn functor(&self) -> Option<Sym> {
        match &self.0.kind {
            TermKind::Constant(s) | TermKind::Compound(s, _) => Some(*s),
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    pub fn args(&self) -> &'static [Term] {
        match &self.0.kind {
            TermKind::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.0.kind {
            TermKind::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&'static str> {
        match self.0.kind {
            TermKind::Text(s) => Some(s.as_str()),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<&'static str> {
        match self.0.kind {
            TermKind::Constant(s) => Some(s.as_str()),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<Sym> {
        match self.0.kind {
            TermKind::Variable(s) => Some(s),
            _ => None,
        }
    }

    /// Variables in first-occurrence order, without repeats.
    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Sym>) {
        if self.is_ground() {
            return;
        }
        match &self.0.kind {
            TermKind::Variable(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            TermKind::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    /// String leaves in left-to-right order.
    pub fn text_leaves(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        self.walk_texts(&mut out);
        out
    }

    fn walk_texts(&self, out: &mut Vec<&'static str>) {
        match &self.0.kind {
            TermKind::Text(s) => out.push(s.as_str()),
            TermKind::Compound(_, args) => args.iter().for_each(|a| a.walk_texts(out)),
            _ => {}
        }
    }

    fn rank(&self) -> u8 {
        match self.0.kind {
            TermKind::Integer(_) => 0,
            TermKind::Text(_) => 1,
            TermKind::Constant(_) => 2,
            TermKind::Compound(..) => 3,
            TermKind::Variable(_) => 4,
        }
    }
}

/// Total order over terms: integers < strings < constants < compounds <
/// variables. Integers compare numerically, names by code point, compounds
/// by functor, then arity, then argument-wise.
pub fn compare(a: Term, b: Term) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    match (a.kind(), b.kind()) {
        (TermKind::Integer(x), TermKind::Integer(y)) => x.cmp(y),
        (TermKind::Text(x), TermKind::Text(y))
        | (TermKind::Constant(x), TermKind::Constant(y))
        | (TermKind::Variable(x), TermKind::Variable(y)) => x.cmp(y),
        (TermKind::Compound(f, xs), TermKind::Compound(g, ys)) => f
            .cmp(g)
            .then(xs.len().cmp(&ys.len()))
            .then_with(|| {
                xs.iter()
                    .zip(ys.iter())
                    .map(|(x, y)| compare(*x, *y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
        _ => a.rank().cmp(&b.rank()),
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0 as *const Node as usize).hash(state)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(*self, *other)
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::Integer(v) => write!(f, "{v}"),
            TermKind::Text(s) => write_quoted(f, s.as_str()),
            TermKind::Constant(s) | TermKind::Variable(s) => f.write_str(s.as_str()),
            TermKind::Compound(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("binding {0} to a non-ground term")]
    NonGroundBinding(String),
    #[error("conflicting binding for {0}")]
    Conflict(String),
}

/// Bindings from variable names to ground terms.
///
/// Kept as a small vector: rule bodies bind a handful of variables, and the
/// engine undoes bindings by truncating.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Subst {
    bindings: Vec<(Sym, Term)>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn get(&self, var: Sym) -> Option<Term> {
        self.bindings
            .iter()
            .rev()
            .find(|(v, _)| *v == var)
            .map(|(_, t)| *t)
    }

    pub fn get_name(&self, var: &str) -> Option<Term> {
        self.get(Sym::new(var))
    }

    pub fn bind(&mut self, var: Sym, value: Term) -> Result<(), TermError> {
        if !value.is_ground() {
            return Err(TermError::NonGroundBinding(var.to_string()));
        }
        match self.get(var) {
            Some(t) if t != value => Err(TermError::Conflict(var.to_string())),
            Some(_) => Ok(()),
            None => {
                self.bindings.push((var, value));
                Ok(())
            }
        }
    }

    pub(crate) fn push_unchecked(&mut self, var: Sym, value: Term) {
        self.bindings.push((var, value));
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.bindings.truncate(len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, Term)> + '_ {
        self.bindings.iter().copied()
    }

    /// Bindings sorted by variable name; a canonical form for comparisons.
    pub fn sorted(&self) -> Vec<(Sym, Term)> {
        let mut v = self.bindings.clone();
        v.sort_by_key(|a| a.0);
        v
    }

    /// Instantiates `t`; every variable in it must be bound.
    pub fn apply(&self, t: Term) -> Result<Term, TermError> {
        if t.is_ground() {
            return Ok(t);
        }
        match t.kind() {
            TermKind::Variable(v) => self
                .get(*v)
                .ok_or_else(|| TermError::UnboundVariable(v.to_string())),
            TermKind::Compound(f, args) => {
                let args = args
                    .iter()
                    .map(|a| self.apply(*a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::compound_sym(*f, args))
            }
            _ => Ok(t),
        }
    }

    /// Resolves a pattern to a ground term without interning anything new,
    /// when that is possible (ground pattern or bound variable).
    pub(crate) fn resolve_shallow(&self, t: Term) -> Option<Term> {
        if t.is_ground() {
            Some(t)
        } else {
            t.as_var().and_then(|v| self.get(v))
        }
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.sorted().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        f.write_str("}")
    }
}

/// Extends `subst` so that `pattern` instantiates to `ground`. On failure
/// the substitution may hold partial bindings; callers truncate.
pub(crate) fn match_into(pattern: Term, ground: Term, subst: &mut Subst) -> bool {
    if pattern.is_ground() {
        return pattern == ground;
    }
    match pattern.kind() {
        TermKind::Variable(v) => match subst.get(*v) {
            Some(bound) => bound == ground,
            None => {
                subst.push_unchecked(*v, ground);
                true
            }
        },
        TermKind::Compound(f, pargs) => match ground.kind() {
            TermKind::Compound(g, gargs) if f == g && pargs.len() == gargs.len() => pargs
                .iter()
                .zip(gargs.iter())
                .all(|(p, g)| match_into(*p, *g, subst)),
            _ => false,
        },
        _ => false,
    }
}

/// One-way matching of `pattern` against a ground term, extending `seed`.
/// Returns `None` when no extension of `seed` makes the two equal.
pub fn match_term(pattern: Term, ground: Term, seed: &Subst) -> Option<Subst> {
    if !ground.is_ground() {
        return None;
    }
    let mut s = seed.clone();
    match_into(pattern, ground, &mut s).then_some(s)
}
