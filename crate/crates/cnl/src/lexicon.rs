//! The closed vocabulary: `lexicon/5` facts with category, surface, base
//! form, agreement and semantics.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use cnlasp_core::syntax::quote;
use cnlasp_core::{parse_program, Literal, Program, Rule, Term};
use thiserror::Error;

/// Surface of the look-ahead pseudo-token.
pub const LAH: &str = "$lah$";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Det,
    Noun,
    Pname,
    Iv,
    Adj,
    Cop,
    Rp,
    Cnj,
    Neg,
    Adv,
    Pm,
    Aux,
    Cond,
    Cons,
    Excl,
    Comp,
}

impl Category {
    pub const ALL: [Category; 16] = [
        Category::Det,
        Category::Noun,
        Category::Pname,
        Category::Iv,
        Category::Adj,
        Category::Cop,
        Category::Rp,
        Category::Cnj,
        Category::Neg,
        Category::Adv,
        Category::Pm,
        Category::Aux,
        Category::Cond,
        Category::Cons,
        Category::Excl,
        Category::Comp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Det => "det",
            Category::Noun => "noun",
            Category::Pname => "pname",
            Category::Iv => "iv",
            Category::Adj => "adj",
            Category::Cop => "cop",
            Category::Rp => "rp",
            Category::Cnj => "cnj",
            Category::Neg => "neg",
            Category::Adv => "adv",
            Category::Pm => "pm",
            Category::Aux => "aux",
            Category::Cond => "cond",
            Category::Cons => "cons",
            Category::Excl => "excl",
            Category::Comp => "comp",
        }
    }

    pub fn parse(name: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.as_str() == name)
    }

    /// Content words carry a base form; function words carry `n`.
    pub fn is_content(self) -> bool {
        matches!(self, Category::Noun | Category::Pname | Category::Iv | Category::Adj)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agreement {
    Sg,
    Pl,
    N,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Sg => "sg",
            Agreement::Pl => "pl",
            Agreement::N => "n",
        }
    }

    pub fn parse(name: &str) -> Option<Agreement> {
        match name {
            "sg" => Some(Agreement::Sg),
            "pl" => Some(Agreement::Pl),
            "n" => Some(Agreement::N),
            _ => None,
        }
    }
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Semantics {
    Forall,
    N,
}

impl Semantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Forall => "forall",
            Semantics::N => "n",
        }
    }

    pub fn parse(name: &str) -> Option<Semantics> {
        match name {
            "forall" => Some(Semantics::Forall),
            "n" => Some(Semantics::N),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexEntry {
    pub category: Category,
    pub surface: String,
    /// `None` renders as `n`.
    pub base: Option<String>,
    pub agreement: Agreement,
    pub semantics: Semantics,
}

impl LexEntry {
    pub fn is_lookahead(&self) -> bool {
        self.surface == LAH
    }

    pub fn to_fact(&self) -> Rule {
        let base = Term::constant(self.base.as_deref().unwrap_or("n"));
        Rule::fact(Literal::pos(Term::compound(
            "lexicon",
            vec![
                Term::constant(self.category.as_str()),
                Term::text(&self.surface),
                base,
                Term::constant(self.agreement.as_str()),
                Term::constant(self.semantics.as_str()),
            ],
        )))
    }
}

impl fmt::Display for LexEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lexicon({}, {}, {}, {}, {}).",
            self.category,
            quote(&self.surface),
            self.base.as_deref().unwrap_or("n"),
            self.agreement,
            self.semantics.as_str()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error(transparent)]
    Parse(#[from] cnlasp_core::syntax::ParseError),
    #[error("unknown lexical category {0}")]
    BadCategory(String),
    #[error("duplicate entry for {category} {surface:?}")]
    DuplicateEntry { category: Category, surface: String },
    #[error("not a lexicon/5 fact: {0}")]
    BadEntry(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    pub entries: Vec<LexEntry>,
    /// Surfaces containing spaces, longest first by word count.
    pub multiword_index: Vec<String>,
}

impl Lexicon {
    /// Parses `lexicon/5` facts and validates them. Every category without
    /// a `$lah$` entry gets one per (agreement, semantics) pair it uses.
    pub fn load(source: &str) -> Result<Lexicon, LexiconError> {
        let program = parse_program(source)?;
        let mut entries = Vec::with_capacity(program.rules.len());
        for rule in &program.rules {
            entries.push(entry_of(rule)?);
        }
        Lexicon::from_entries(entries)
    }

    pub fn from_entries(mut entries: Vec<LexEntry>) -> Result<Lexicon, LexiconError> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !e.is_lookahead() && !seen.insert((e.category, e.surface.as_str())) {
                return Err(LexiconError::DuplicateEntry {
                    category: e.category,
                    surface: e.surface.clone(),
                });
            }
            if e.category.is_content() != e.base.is_some() && !e.is_lookahead() {
                return Err(LexiconError::BadEntry(e.to_string()));
            }
            if e.semantics == Semantics::Forall && e.category != Category::Det {
                return Err(LexiconError::BadEntry(e.to_string()));
            }
        }
        for cat in Category::ALL {
            if entries.iter().any(|e| e.category == cat && e.is_lookahead()) {
                continue;
            }
            let mut shapes: BTreeSet<(Agreement, Semantics)> = entries
                .iter()
                .filter(|e| e.category == cat)
                .map(|e| (e.agreement, e.semantics))
                .collect();
            if shapes.is_empty() {
                shapes.insert((Agreement::N, Semantics::N));
            }
            entries.extend(shapes.into_iter().map(|(agreement, semantics)| LexEntry {
                category: cat,
                surface: LAH.to_owned(),
                base: None,
                agreement,
                semantics,
            }));
        }
        let mut multiword_index: Vec<String> = entries
            .iter()
            .filter(|e| e.surface.contains(' '))
            .map(|e| e.surface.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        multiword_index.sort_by_key(|s| std::cmp::Reverse(s.split(' ').count()));
        Ok(Lexicon {
            entries,
            multiword_index,
        })
    }

    pub fn lookup(&self, category: Category, surface: &str) -> Vec<&LexEntry> {
        self.entries
            .iter()
            .filter(|e| e.category == category && e.surface == surface)
            .collect()
    }

    /// Whether any entry of any category has this surface.
    pub fn knows(&self, surface: &str) -> bool {
        self.entries.iter().any(|e| e.surface == surface)
    }

    /// Real surfaces of a category with the given agreement and semantics.
    pub fn surfaces(&self, category: Category, agreement: Agreement, semantics: Semantics) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| {
                !e.is_lookahead() && e.category == category && e.agreement == agreement && e.semantics == semantics
            })
            .map(|e| e.surface.as_str())
            .collect()
    }

    /// Base form of a content word.
    pub fn base_of(&self, category: Category, surface: &str) -> Option<&str> {
        self.lookup(category, surface).into_iter().find_map(|e| e.base.as_deref())
    }

    pub fn to_program(&self) -> Program {
        Program::new(self.entries.iter().map(LexEntry::to_fact).collect())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn entry_of(rule: &Rule) -> Result<LexEntry, LexiconError> {
    let bad = || LexiconError::BadEntry(rule.to_string());
    let head = match rule.head {
        Some(h) if rule.is_fact() && !h.negated => h.atom,
        _ => return Err(bad()),
    };
    if head.functor().map(|f| f.as_str()) != Some("lexicon") || head.arity() != 5 {
        return Err(bad());
    }
    let a = head.args();
    let cat_name = a[0].as_constant().ok_or_else(bad)?;
    let category = Category::parse(cat_name).ok_or_else(|| LexiconError::BadCategory(cat_name.to_owned()))?;
    let surface = a[1].as_text().ok_or_else(bad)?.to_owned();
    let base = match a[2].as_constant().ok_or_else(bad)? {
        "n" => None,
        b => Some(b.to_owned()),
    };
    let agreement = a[3].as_constant().and_then(Agreement::parse).ok_or_else(bad)?;
    let semantics = a[4].as_constant().and_then(Semantics::parse).ok_or_else(bad)?;
    Ok(LexEntry {
        category,
        surface,
        base,
        agreement,
        semantics,
    })
}
