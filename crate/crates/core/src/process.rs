//! Process terms of the BCCSP fragment (prefix, choice, nil, named references)
//! and their textual syntax.
//!
//! ```text
//! file       := (definition NEWLINE)*
//! definition := PNAME "=" term
//! term       := prefix ("+" prefix)*
//! prefix     := ACTION "." prefix | atom
//! atom       := "0" | PNAME | ACTION | "(" term ")"
//! ```
//!
//! A bare `ACTION` in atom position abbreviates `ACTION.0`. Line comments
//! start with `//`. Newlines end a definition unless they occur inside
//! parentheses or directly after `=`, `+` or `.`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// An action label. Names start with a lowercase letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(Arc<str>);

impl Action {
    pub fn new(name: &str) -> Action {
        Action(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A process identifier. Names start with an uppercase letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessName(Arc<str>);

impl ProcessName {
    pub fn new(name: &str) -> ProcessName {
        ProcessName(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ProcessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ProcessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Abstract syntax of a process term.
///
/// `Choice` is n-ary: its branches are never `Choice` nodes themselves and
/// there are at least two of them. The derived ordering is the term order
/// used to canonicalize choices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessTerm {
    Nil,
    Prefix(Action, Arc<ProcessTerm>),
    Choice(Vec<ProcessTerm>),
    Reference(ProcessName),
}

impl ProcessTerm {
    pub fn prefix(action: Action, continuation: ProcessTerm) -> ProcessTerm {
        ProcessTerm::Prefix(action, Arc::new(continuation))
    }

    /// Builds a choice, splicing nested choices. Zero branches give `Nil`,
    /// one branch gives the branch itself.
    pub fn choice<I: IntoIterator<Item = ProcessTerm>>(branches: I) -> ProcessTerm {
        let mut flat = Vec::new();
        for b in branches {
            match b {
                ProcessTerm::Choice(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => ProcessTerm::Nil,
            1 => flat.pop().unwrap(),
            _ => ProcessTerm::Choice(flat),
        }
    }

    pub fn reference(name: &str) -> ProcessTerm {
        ProcessTerm::Reference(ProcessName::new(name))
    }

    /// Calls `f` on every action occurring syntactically in the term.
    pub fn for_each_action(&self, f: &mut impl FnMut(&Action)) {
        match self {
            ProcessTerm::Nil | ProcessTerm::Reference(_) => {}
            ProcessTerm::Prefix(a, cont) => {
                f(a);
                cont.for_each_action(f);
            }
            ProcessTerm::Choice(bs) => bs.iter().for_each(|b| b.for_each_action(f)),
        }
    }

    fn for_each_reference(&self, f: &mut impl FnMut(&ProcessName)) {
        match self {
            ProcessTerm::Nil => {}
            ProcessTerm::Reference(n) => f(n),
            ProcessTerm::Prefix(_, cont) => cont.for_each_reference(f),
            ProcessTerm::Choice(bs) => bs.iter().for_each(|b| b.for_each_reference(f)),
        }
    }
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessTerm::Nil => f.write_str("0"),
            ProcessTerm::Reference(n) => write!(f, "{n}"),
            ProcessTerm::Prefix(a, cont) => match &**cont {
                ProcessTerm::Nil => write!(f, "{a}"),
                ProcessTerm::Choice(_) => write!(f, "{a}.({cont})"),
                _ => write!(f, "{a}.{cont}"),
            },
            ProcessTerm::Choice(bs) => {
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{b}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Named process bindings in definition order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProcessDefinitions {
    bindings: Vec<(ProcessName, ProcessTerm)>,
    index: BTreeMap<ProcessName, usize>,
}

impl ProcessDefinitions {
    pub fn new() -> ProcessDefinitions {
        ProcessDefinitions::default()
    }

    /// Adds a binding. Returns `false` (and changes nothing) if the name is
    /// already bound.
    pub fn insert(&mut self, name: ProcessName, term: ProcessTerm) -> bool {
        if self.index.contains_key(&name) {
            return false;
        }
        self.index.insert(name.clone(), self.bindings.len());
        self.bindings.push((name, term));
        true
    }

    pub fn get(&self, name: &ProcessName) -> Option<&ProcessTerm> {
        self.index.get(name).map(|&i| &self.bindings[i].1)
    }

    pub fn get_str(&self, name: &str) -> Option<&ProcessTerm> {
        self.get(&ProcessName::new(name))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get_str(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProcessName, &ProcessTerm)> {
        self.bindings.iter().map(|(n, t)| (n, t))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// The alphabet: every action occurring in some binding, sorted by name.
    pub fn actions(&self) -> Vec<Action> {
        let mut acts = Vec::new();
        for (_, t) in &self.bindings {
            t.for_each_action(&mut |a| acts.push(a.clone()));
        }
        acts.sort();
        acts.dedup();
        acts
    }

    /// Names referenced somewhere but not bound.
    pub fn unresolved(&self) -> Vec<ProcessName> {
        let mut missing = Vec::new();
        for (_, t) in &self.bindings {
            t.for_each_reference(&mut |n| {
                if !self.index.contains_key(n) && !missing.contains(n) {
                    missing.push(n.clone());
                }
            });
        }
        missing
    }
}

impl fmt::Display for ProcessDefinitions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in &self.bindings {
            writeln!(f, "{n} = {t}")?;
        }
        Ok(())
    }
}

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Location, message: String },
    #[error("syntax error at {at}: unclosed parenthesis")]
    UnclosedParenthesis { at: Location },
    #[error("unresolved reference to process `{name}` at {at}")]
    UnresolvedReference { name: String, at: Location },
    #[error("process `{name}` defined twice (second definition at {at})")]
    DuplicateDefinition { name: String, at: Location },
}

impl ParseError {
    pub fn location(&self) -> Location {
        match self {
            ParseError::Syntax { at, .. }
            | ParseError::UnclosedParenthesis { at }
            | ParseError::UnresolvedReference { at, .. }
            | ParseError::DuplicateDefinition { at, .. } => *at,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Action(String),
    Process(String),
    Zero,
    Equals,
    Plus,
    Dot,
    Open,
    Close,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Action(s) => write!(f, "action `{s}`"),
            Tok::Process(s) => write!(f, "process name `{s}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Location)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at = Location { line, column: col };
        match c {
            '\n' => {
                out.push((Tok::Newline, at));
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '=' => out.push((Tok::Equals, at)),
            '+' => out.push((Tok::Plus, at)),
            '.' => out.push((Tok::Dot, at)),
            '(' => out.push((Tok::Open, at)),
            ')' => out.push((Tok::Close, at)),
            '0' => out.push((Tok::Zero, at)),
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                if c.is_ascii_lowercase() {
                    out.push((Tok::Action(word), at));
                } else {
                    out.push((Tok::Process(word), at));
                }
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    at,
                    message: alloc::format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    out.push((Tok::Eof, Location { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Location)>,
    pos: usize,
    depth: usize,
    references: Vec<(ProcessName, Location)>,
}

impl Parser {
    fn peek(&mut self) -> &(Tok, Location) {
        if self.depth > 0 {
            self.skip_newlines();
        }
        &self.toks[self.pos]
    }

    fn skip_newlines(&mut self) {
        while self.toks[self.pos].0 == Tok::Newline {
            self.pos += 1;
        }
    }

    fn bump(&mut self) -> (Tok, Location) {
        let t = self.peek().clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, tok: &Tok, at: Location, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            at,
            message: alloc::format!("expected {expected}, found {tok}"),
        })
    }

    fn file(&mut self) -> Result<ProcessDefinitions, ParseError> {
        let mut defs = ProcessDefinitions::new();
        loop {
            self.skip_newlines();
            let (tok, at) = self.bump();
            match tok {
                Tok::Eof => break,
                Tok::Process(name) => {
                    let (eq, eq_at) = self.bump();
                    if eq != Tok::Equals {
                        return self.unexpected(&eq, eq_at, "`=`");
                    }
                    self.skip_newlines();
                    let term = self.term()?;
                    let (end, end_at) = self.bump();
                    if end != Tok::Newline && end != Tok::Eof {
                        return self.unexpected(&end, end_at, "`+` or end of line");
                    }
                    if !defs.insert(ProcessName::new(&name), term) {
                        return Err(ParseError::DuplicateDefinition { name, at });
                    }
                    if end == Tok::Eof {
                        break;
                    }
                }
                other => return self.unexpected(&other, at, "a process name"),
            }
        }
        if let Some((name, at)) = self.references.iter().find(|(n, _)| defs.get(n).is_none()) {
            return Err(ParseError::UnresolvedReference {
                name: name.as_str().to_string(),
                at: *at,
            });
        }
        Ok(defs)
    }

    fn term(&mut self) -> Result<ProcessTerm, ParseError> {
        let mut branches = alloc::vec![self.prefix()?];
        while self.peek().0 == Tok::Plus {
            self.bump();
            self.skip_newlines();
            branches.push(self.prefix()?);
        }
        Ok(ProcessTerm::choice(branches))
    }

    fn prefix(&mut self) -> Result<ProcessTerm, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Action(a) => {
                if self.peek().0 == Tok::Dot {
                    self.bump();
                    self.skip_newlines();
                    let cont = self.prefix()?;
                    Ok(ProcessTerm::prefix(Action::new(&a), cont))
                } else {
                    Ok(ProcessTerm::prefix(Action::new(&a), ProcessTerm::Nil))
                }
            }
            Tok::Zero => Ok(ProcessTerm::Nil),
            Tok::Process(n) => {
                let name = ProcessName::new(&n);
                self.references.push((name.clone(), at));
                Ok(ProcessTerm::Reference(name))
            }
            Tok::Open => {
                self.depth += 1;
                let inner = self.term()?;
                let (close, close_at) = self.bump();
                self.depth -= 1;
                match close {
                    Tok::Close => Ok(inner),
                    Tok::Eof => Err(ParseError::UnclosedParenthesis { at }),
                    other => self.unexpected(&other, close_at, "`)`"),
                }
            }
            Tok::Eof if self.depth > 0 => {
                // report the innermost open parenthesis
                let open_at = self.toks[..self.pos]
                    .iter()
                    .rev()
                    .find(|(t, _)| *t == Tok::Open)
                    .map(|(_, l)| *l)
                    .unwrap_or(at);
                Err(ParseError::UnclosedParenthesis { at: open_at })
            }
            other => self.unexpected(&other, at, "a process term"),
        }
    }
}

/// Parses a definitions file.
pub fn parse(text: &str) -> Result<ProcessDefinitions, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        references: Vec::new(),
    };
    p.file()
}

/// Parses a single term, e.g. `a.(b + c) + a.d`. References are not checked.
pub fn parse_term(text: &str) -> Result<ProcessTerm, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        references: Vec::new(),
    };
    p.skip_newlines();
    let t = p.term()?;
    p.skip_newlines();
    let (end, at) = p.bump();
    if end != Tok::Eof {
        return p.unexpected(&end, at, "end of input");
    }
    Ok(t)
}
