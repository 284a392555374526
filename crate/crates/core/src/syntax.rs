//! The textual rule language: facts, normal rules, integrity constraints,
//! strong negation `-`, negation as failure `not`, comparisons and
//! external-call assignments `V := @name()`.
//!
//! Comments run from `%` to the end of the line.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::term::{write_quoted, Sym, Term};

/// An atom, optionally under strong negation.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub negated: bool,
    pub atom: Term,
}

/// Predicate identity: name, arity and strong-negation flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Pred {
    pub name: Sym,
    pub arity: usize,
    pub negated: bool,
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negated { "-" } else { "" };
        write!(f, "{sign}{}/{}", self.name, self.arity)
    }
}

impl Literal {
    pub fn pos(atom: Term) -> Literal {
        Literal {
            negated: false,
            atom,
        }
    }

    pub fn neg(atom: Term) -> Literal {
        Literal {
            negated: true,
            atom,
        }
    }

    pub fn pred(&self) -> Pred {
        Pred {
            name: self.atom.functor().expect("literal atoms are constants or compounds"),
            arity: self.atom.arity(),
            negated: self.negated,
        }
    }

    /// The literal of opposite strong polarity.
    pub fn complement(&self) -> Literal {
        Literal {
            negated: !self.negated,
            atom: self.atom,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.atom
            .cmp(&other.atom)
            .then(self.negated.cmp(&other.negated))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExternalCall {
    pub name: Sym,
    pub args: Vec<Term>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum BodyElement {
    Pos(Literal),
    Naf(Literal),
    Comparison { op: CmpOp, lhs: Term, rhs: Term },
    Assign { var: Sym, call: ExternalCall },
}

impl BodyElement {
    /// Variables that this element reads (for `Assign`, the call arguments).
    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        match self {
            BodyElement::Pos(l) | BodyElement::Naf(l) => l.atom.collect_vars(&mut out),
            BodyElement::Comparison { lhs, rhs, .. } => {
                lhs.collect_vars(&mut out);
                rhs.collect_vars(&mut out);
            }
            BodyElement::Assign { call, .. } => {
                call.args.iter().for_each(|a| a.collect_vars(&mut out))
            }
        }
        out
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Pos(l) => write!(f, "{l}"),
            BodyElement::Naf(l) => write!(f, "not {l}"),
            BodyElement::Comparison { op, lhs, rhs } => {
                write!(f, "{lhs} {} {rhs}", op.symbol())
            }
            BodyElement::Assign { var, call } => {
                write!(f, "{var} := @{}(", call.name)?;
                for (i, a) in call.args.iter().enumerate() {
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

#[derive(Clone, Debug)]
pub struct Rule {
    pub head: Option<Literal>,
    pub body: Vec<BodyElement>,
    pub span: Range<usize>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body
    }
}

impl Eq for Rule {}

impl Rule {
    pub fn fact(head: Literal) -> Rule {
        Rule {
            head: Some(head),
            body: Vec::new(),
            span: 0..0,
        }
    }

    pub fn new(head: Option<Literal>, body: Vec<BodyElement>) -> Rule {
        Rule {
            head,
            body,
            span: 0..0,
        }
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.body.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_none_or(|h| h.is_ground()) && self.body.iter().all(|b| b.vars().is_empty())
            && !self.body.iter().any(|b| matches!(b, BodyElement::Assign { .. }))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
            if !self.body.is_empty() {
                f.write_str(" ")?;
            }
        }
        if !self.body.is_empty() {
            f.write_str(":- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub required_externals: BTreeSet<String>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Program {
        let mut p = Program {
            rules,
            required_externals: BTreeSet::new(),
        };
        p.refresh_externals();
        p
    }

    pub fn extend(&mut self, other: Program) {
        self.rules.extend(other.rules);
        self.refresh_externals();
    }

    pub fn push(&mut self, rule: Rule) {
        for b in &rule.body {
            if let BodyElement::Assign { call, .. } = b {
                self.required_externals.insert(call.name.to_string());
            }
        }
        self.rules.push(rule);
    }

    fn refresh_externals(&mut self) {
        self.required_externals = self
            .rules
            .iter()
            .flat_map(|r| r.body.iter())
            .filter_map(|b| match b {
                BodyElement::Assign { call, .. } => Some(call.name.to_string()),
                _ => None,
            })
            .collect();
    }

    /// Checks every rule; returns the first unsafe variable found.
    pub fn check_safety(&self) -> Result<(), SafetyError> {
        self.rules.iter().try_for_each(check_safety)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("disjunctive heads are not supported (bytes {}..{})", span.start, span.end)]
    DisjunctiveHeadUnsupported { span: Range<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SafetyError {
    #[error("unsafe variable {0}")]
    UnsafeVariable(String),
}

/// Every variable of the head, of a `not` element, of a comparison or of an
/// external call must be bound by a positive literal or an assignment.
pub fn check_safety(rule: &Rule) -> Result<(), SafetyError> {
    let mut bound: Vec<Sym> = Vec::new();
    for b in &rule.body {
        match b {
            BodyElement::Pos(l) => l.atom.collect_vars(&mut bound),
            BodyElement::Assign { var, .. } => bound.push(*var),
            _ => {}
        }
    }
    let mut reads: Vec<Sym> = Vec::new();
    if let Some(h) = &rule.head {
        h.atom.collect_vars(&mut reads);
    }
    for b in &rule.body {
        if !matches!(b, BodyElement::Pos(_)) {
            for v in b.vars() {
                if !reads.contains(&v) {
                    reads.push(v);
                }
            }
        }
    }
    match reads.into_iter().find(|v| !bound.contains(v)) {
        Some(v) => Err(SafetyError::UnsafeVariable(v.to_string())),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    If,
    Assign,
    At,
    Semi,
    Minus,
    Not,
    Cmp(CmpOp),
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    /// Each `_` becomes a distinct variable `_N`.
    anonymous: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0, anonymous: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_trivia();
            let start = lx.pos;
            let tok = lx.next_tok()?;
            let eof = tok == Tok::Eof;
            out.push((tok, start));
            if eof {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, at: usize, message: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.src, at);
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn next_tok(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let Some(c) = self.bump() else {
            return Ok(Tok::Eof);
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ';' => Tok::Semi,
            '@' => Tok::At,
            '-' => Tok::Minus,
            ':' => match self.bump() {
                Some('-') => Tok::If,
                Some('=') => Tok::Assign,
                _ => return Err(self.err(start, "expected ':-' or ':='")),
            },
            '<' => {
                if self.peek() == Some('=') {
                    self.bump();
                    Tok::Cmp(CmpOp::Le)
                } else {
                    Tok::Cmp(CmpOp::Lt)
                }
            }
            '>' => {
                if self.peek() == Some('=') {
                    self.bump();
                    Tok::Cmp(CmpOp::Ge)
                } else {
                    Tok::Cmp(CmpOp::Gt)
                }
            }
            '=' => Tok::Cmp(CmpOp::Eq),
            '!' => {
                if self.bump() == Some('=') {
                    Tok::Cmp(CmpOp::Ne)
                } else {
                    return Err(self.err(start, "expected '!='"));
                }
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some(c @ ('"' | '\\')) => s.push(c),
                            _ => return Err(self.err(self.pos, "bad escape in string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() => {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                Tok::Int(
                    text.parse()
                        .map_err(|_| self.err(start, "integer out of range"))?,
                )
            }
            c if c.is_alphabetic() || c == '_' => {
                while self
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || c == '_')
                {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                if c == '_' && text.len() == 1 {
                    self.anonymous += 1;
                    return Ok(Tok::Var(format!("_{}", self.anonymous)));
                }
                if c.is_uppercase() || c == '_' {
                    Tok::Var(text.to_owned())
                } else if text == "not" {
                    Tok::Not
                } else {
                    Tok::Ident(text.to_owned())
                }
            }
            other => return Err(self.err(start, format!("unexpected character {other:?}"))),
        };
        Ok(tok)
    }
}

fn line_col(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            src,
            toks: Lexer::tokens(src)?,
            i: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.src, self.offset());
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut rules = Vec::new();
        while *self.peek() != Tok::Eof {
            rules.push(self.rule()?);
        }
        Ok(Program::new(rules))
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let start = self.offset();
        let head = if *self.peek() == Tok::If {
            None
        } else {
            Some(self.literal()?)
        };
        if *self.peek() == Tok::Semi {
            while !matches!(self.peek(), Tok::Dot | Tok::Eof) {
                self.bump();
            }
            let end = self.offset() + 1;
            return Err(ParseError::DisjunctiveHeadUnsupported {
                span: start..end.min(self.src.len()),
            });
        }
        let mut body = Vec::new();
        if *self.peek() == Tok::If {
            self.bump();
            loop {
                body.push(self.body_element()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    _ => break,
                }
            }
        } else if head.is_none() {
            return Err(self.err("expected a rule"));
        }
        let dot_at = self.offset();
        self.expect(Tok::Dot, "'.'")?;
        Ok(Rule {
            head,
            body,
            span: start..dot_at + 1,
        })
    }

    fn body_element(&mut self) -> Result<BodyElement, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(BodyElement::Naf(self.literal()?))
            }
            Tok::Var(name) if *self.peek_at(1) == Tok::Assign => {
                self.bump();
                self.bump();
                if *self.peek() != Tok::At {
                    return Err(self.err("assignment requires an external call '@name()'"));
                }
                self.bump();
                let Tok::Ident(fname) = self.bump() else {
                    return Err(self.err("expected external function name"));
                };
                self.expect(Tok::LParen, "'('")?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args = self.term_list()?;
                }
                self.expect(Tok::RParen, "')'")?;
                Ok(BodyElement::Assign {
                    var: Sym::new(&name),
                    call: ExternalCall {
                        name: Sym::new(&fname),
                        args,
                    },
                })
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Ident(_)) => {
                Ok(BodyElement::Pos(self.literal()?))
            }
            _ => {
                let lhs = self.term()?;
                if let Tok::Cmp(op) = *self.peek() {
                    self.bump();
                    let rhs = self.term()?;
                    return Ok(BodyElement::Comparison { op, lhs, rhs });
                }
                if lhs.functor().is_none() {
                    return Err(self.err("expected a literal or comparison"));
                }
                Ok(BodyElement::Pos(Literal::pos(lhs)))
            }
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let negated = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek() {
            Tok::Ident(_) => {}
            other => return Err(self.err(format!("expected an atom, found {}", describe(other)))),
        }
        let atom = self.term()?;
        Ok(Literal { negated, atom })
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Tok::Var(v) => Ok(Term::var(&v)),
            Tok::Int(n) => Ok(Term::int(n)),
            Tok::Minus => match self.bump() {
                Tok::Int(n) => Ok(Term::int(-n)),
                _ => Err(self.err("expected an integer after '-'")),
            },
            Tok::Str(s) => Ok(Term::text(&s)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.term_list()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Term::compound(&name, args))
                } else {
                    Ok(Term::constant(&name))
                }
            }
            other => {
                self.i = self.i.saturating_sub(1);
                Err(self.err(format!("expected a term, found {}", describe(&other))))
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Var(s) => format!("'{s}'"),
        Tok::Int(n) => format!("'{n}'"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

/// Parses a complete program.
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    Parser::new(source)?.program()
}

/// Parses a single term, e.g. `lit(func(F), arg(X))`.
pub fn parse_term(source: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(source)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err("trailing input after term"));
    }
    Ok(t)
}

/// Renders a string the way the rule language spells it.
pub fn quote(s: &str) -> String {
    let mut out = String::new();
    write_quoted(&mut out, s).expect("writing to a String");
    out
}
