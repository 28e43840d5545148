//! Signatures and terms of the free prop over a monoidal signature extended
//! with a commutative monoid (`mu : 2 -> 1`, `eta : 0 -> 1`).
//!
//! Surface syntax:
//!
//! ```text
//! term := atom | "(" term ";" term ")" | "(" term "+" term ")"
//! atom := name | "mu" | "eta" | "id_" nat | "sym_" nat "_" nat
//! ```
//!
//! Signature files are line based, `gen <name> : <m> -> <n>`, with `#`
//! starting a comment.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Maximum parenthesis nesting accepted by the parser.
pub const MAX_NESTING: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigTermError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown generator `{name}`")]
    UnknownGenerator { name: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid generator name `{name}`: {reason}")]
    InvalidName { name: String, reason: String },
    #[error("generator `{name}` declared twice")]
    DuplicateGenerator { name: String },
}

impl SigTermError {
    pub fn code(&self) -> &'static str {
        match self {
            SigTermError::Syntax { .. } => "SyntaxError",
            SigTermError::UnknownGenerator { .. } => "UnknownGenerator",
            SigTermError::TypeMismatch(_) => "TypeMismatch",
            SigTermError::InvalidName { .. } => "InvalidName",
            SigTermError::DuplicateGenerator { .. } => "DuplicateGenerator",
        }
    }

    /// `(line, column)` of the offending input, when known.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            SigTermError::Syntax { line, column, .. } => Some((*line, *column)),
            _ => None,
        }
    }
}

/// Arity and coarity of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arity {
    pub inputs: usize,
    pub outputs: usize,
}

/// A monoidal signature: generator names with arity and coarity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    generators: BTreeMap<String, Arity>,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Checks that `name` is a legal, non-reserved generator name.
pub fn validate_generator_name(name: &str) -> Result<(), SigTermError> {
    let invalid = |reason: &str| SigTermError::InvalidName {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let mut chars = name.chars();
    match chars.next() {
        None => return Err(invalid("empty name")),
        Some(c) if !is_ident_start(c) => return Err(invalid("must start with a letter or `_`")),
        _ => {}
    }
    if !chars.all(is_ident_char) {
        return Err(invalid("only ASCII letters, digits, `_` and `'` are allowed"));
    }
    if name == "mu" || name == "eta" || name.starts_with("id_") || name.starts_with("sym_") {
        return Err(invalid("reserved name"));
    }
    Ok(())
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a generator. Names must be unique, nonempty and not reserved.
    pub fn declare(
        &mut self,
        name: impl Into<String>,
        inputs: usize,
        outputs: usize,
    ) -> Result<(), SigTermError> {
        let name = name.into();
        validate_generator_name(&name)?;
        if self.generators.contains_key(&name) {
            return Err(SigTermError::DuplicateGenerator { name });
        }
        self.generators.insert(name, Arity { inputs, outputs });
        Ok(())
    }

    /// Builder-style variant of [`Signature::declare`] for fixtures; panics on
    /// invalid names.
    pub fn with(mut self, name: &str, inputs: usize, outputs: usize) -> Self {
        self.declare(name, inputs, outputs)
            .expect("invalid generator declaration");
        self
    }

    pub fn arity(&self, name: &str) -> Option<Arity> {
        self.generators.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.generators.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Arity)> {
        self.generators.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Inserts a generator without name validation. Used for internal
    /// placeholder boxes whose names cannot clash with parsed ones.
    pub(crate) fn insert_unchecked(&mut self, name: &str, inputs: usize, outputs: usize) {
        self.generators
            .insert(name.to_string(), Arity { inputs, outputs });
    }

    /// Parses the line-based signature format.
    pub fn parse(src: &str) -> Result<Self, SigTermError> {
        let mut sig = Signature::new();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: &str| SigTermError::Syntax {
                line: line_no,
                column: 1,
                message: message.to_string(),
            };
            let rest = line
                .trim()
                .strip_prefix("gen")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| err("expected `gen <name> : <m> -> <n>`"))?;
            let (name, ty) = rest
                .split_once(':')
                .ok_or_else(|| err("missing `:` after generator name"))?;
            let (m, n) = ty
                .split_once("->")
                .ok_or_else(|| err("missing `->` in generator type"))?;
            let parse_nat = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| err("arity must be a natural number"))
            };
            let (m, n) = (parse_nat(m)?, parse_nat(n)?);
            sig.declare(name.trim(), m, n)?;
        }
        Ok(sig)
    }

    /// Renders the signature back into its file format.
    pub fn to_source(&self) -> String {
        self.generators
            .iter()
            .map(|(name, a)| format!("gen {name} : {} -> {}\n", a.inputs, a.outputs))
            .collect()
    }
}

/// Terms over a signature plus the commutative monoid structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Gen(String),
    Id(usize),
    Sym(usize, usize),
    Mu,
    Eta,
    Seq(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
}

impl Term {
    pub fn gen(name: &str) -> Term {
        Term::Gen(name.to_string())
    }

    pub fn seq(a: Term, b: Term) -> Term {
        Term::Seq(Box::new(a), Box::new(b))
    }

    pub fn par(a: Term, b: Term) -> Term {
        Term::Par(Box::new(a), Box::new(b))
    }

    /// Right-nested sequential composite; `Id(width)` when empty.
    pub fn seq_all(terms: Vec<Term>, width: usize) -> Term {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => Term::Id(width),
            Some(last) => it.fold(last, |acc, t| Term::seq(t, acc)),
        }
    }

    /// Right-nested parallel composite; `Id(0)` when empty.
    pub fn par_all(terms: Vec<Term>) -> Term {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => Term::Id(0),
            Some(last) => it.fold(last, |acc, t| Term::par(t, acc)),
        }
    }

    /// Number of syntax tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Seq(a, b) | Term::Par(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Infers `(dom, cod)` against `sig`.
    pub fn typecheck(&self, sig: &Signature) -> Result<(usize, usize), SigTermError> {
        match self {
            Term::Gen(name) => sig
                .arity(name)
                .map(|a| (a.inputs, a.outputs))
                .ok_or_else(|| SigTermError::UnknownGenerator { name: name.clone() }),
            Term::Id(n) => Ok((*n, *n)),
            Term::Sym(m, n) => Ok((m + n, n + m)),
            Term::Mu => Ok((2, 1)),
            Term::Eta => Ok((0, 1)),
            Term::Seq(a, b) => {
                let (ad, ac) = a.typecheck(sig)?;
                let (bd, bc) = b.typecheck(sig)?;
                if ac != bd {
                    return Err(SigTermError::TypeMismatch(format!(
                        "cannot compose {a} : {ad} -> {ac} with {b} : {bd} -> {bc}"
                    )));
                }
                Ok((ad, bc))
            }
            Term::Par(a, b) => {
                let (ad, ac) = a.typecheck(sig)?;
                let (bd, bc) = b.typecheck(sig)?;
                Ok((ad + bd, ac + bc))
            }
        }
    }

    /// Replaces every occurrence of generator `name` with `with`.
    pub fn substitute(&self, name: &str, with: &Term) -> Term {
        match self {
            Term::Gen(g) if g == name => with.clone(),
            Term::Seq(a, b) => Term::seq(a.substitute(name, with), b.substitute(name, with)),
            Term::Par(a, b) => Term::par(a.substitute(name, with), b.substitute(name, with)),
            other => other.clone(),
        }
    }

    /// Occurrence counts of signature generators (monoid structure excluded).
    pub fn generator_counts(&self) -> BTreeMap<String, usize> {
        fn walk(t: &Term, acc: &mut BTreeMap<String, usize>) {
            match t {
                Term::Gen(g) => *acc.entry(g.clone()).or_default() += 1,
                Term::Seq(a, b) | Term::Par(a, b) => {
                    walk(a, acc);
                    walk(b, acc);
                }
                _ => {}
            }
        }
        let mut acc = BTreeMap::new();
        walk(self, &mut acc);
        acc
    }

    pub fn contains_generator(&self) -> bool {
        match self {
            Term::Gen(_) => true,
            Term::Seq(a, b) | Term::Par(a, b) => a.contains_generator() || b.contains_generator(),
            _ => false,
        }
    }
}

/// `(dom, cod)` of a term.
pub fn term_type(t: &Term, sig: &Signature) -> Result<(usize, usize), SigTermError> {
    t.typecheck(sig)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Gen(name) => f.write_str(name),
            Term::Id(n) => write!(f, "id_{n}"),
            Term::Sym(m, n) => write!(f, "sym_{m}_{n}"),
            Term::Mu => f.write_str("mu"),
            Term::Eta => f.write_str("eta"),
            Term::Seq(a, b) => write!(f, "({a} ; {b})"),
            Term::Par(a, b) => write!(f, "({a} + {b})"),
        }
    }
}

/// Fully parenthesised rendering; inverse of [`parse_term`].
pub fn pretty_print(t: &Term) -> String {
    t.to_string()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, at: usize, message: impl Into<String>) -> SigTermError {
        let before = &self.src[..at.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        SigTermError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), SigTermError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(d) => Err(self.error(self.pos, format!("expected `{c}`, found `{d}`"))),
            None => Err(self.error(self.pos, format!("expected `{c}`, found end of input"))),
        }
    }

    fn term(&mut self, sig: &Signature) -> Result<Term, SigTermError> {
        match self.peek() {
            Some('(') => {
                self.depth += 1;
                if self.depth > MAX_NESTING {
                    return Err(self.error(self.pos, "nesting too deep"));
                }
                self.pos += 1;
                let lhs = self.term(sig)?;
                let op_at = self.pos;
                let op = self.peek();
                let combine: fn(Term, Term) -> Term = match op {
                    Some(';') => Term::seq,
                    Some('+') => Term::par,
                    _ => return Err(self.error(op_at, "expected `;` or `+`")),
                };
                self.pos += 1;
                let rhs = self.term(sig)?;
                self.expect(')')?;
                self.depth -= 1;
                Ok(combine(lhs, rhs))
            }
            Some(c) if is_ident_start(c) => self.atom(sig),
            Some(c) => Err(self.error(self.pos, format!("unexpected `{c}`"))),
            None => Err(self.error(self.pos, "unexpected end of input")),
        }
    }

    fn atom(&mut self, sig: &Signature) -> Result<Term, SigTermError> {
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !is_ident_char(c))
            .unwrap_or(self.src.len() - start);
        self.pos += len;
        let word = &self.src[start..start + len];
        let nat = |s: &str| -> Result<usize, SigTermError> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(self.error(start, format!("malformed atom `{word}`")));
            }
            s.parse()
                .map_err(|_| self.error(start, format!("number out of range in `{word}`")))
        };
        match word {
            "mu" => Ok(Term::Mu),
            "eta" => Ok(Term::Eta),
            _ => {
                if let Some(n) = word.strip_prefix("id_") {
                    Ok(Term::Id(nat(n)?))
                } else if let Some(rest) = word.strip_prefix("sym_") {
                    let (m, n) = rest
                        .split_once('_')
                        .ok_or_else(|| self.error(start, format!("malformed atom `{word}`")))?;
                    Ok(Term::Sym(nat(m)?, nat(n)?))
                } else if sig.contains(word) {
                    Ok(Term::Gen(word.to_string()))
                } else {
                    Err(SigTermError::UnknownGenerator {
                        name: word.to_string(),
                    })
                }
            }
        }
    }
}

/// Parses without typechecking; generator names must still be declared.
pub fn parse_term_untyped(src: &str, sig: &Signature) -> Result<Term, SigTermError> {
    let mut p = Parser { src, pos: 0, depth: 0 };
    let t = p.term(sig)?;
    if let Some(c) = p.peek() {
        return Err(p.error(p.pos, format!("trailing input starting at `{c}`")));
    }
    Ok(t)
}

/// Parses and typechecks a term.
pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, SigTermError> {
    let t = parse_term_untyped(src, sig)?;
    t.typecheck(sig)?;
    Ok(t)
}

/// Removes `#` comments from a term file.
pub fn strip_comments(src: &str) -> String {
    src.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}
