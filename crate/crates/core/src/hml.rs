//! Hennessy–Milner logic: formulas, evaluation and the HML game.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::game::{GameBuilder, Player, ReachabilityGame};
use crate::lts::{Lts, StateId, StateSet};
use crate::process::Action;

/// The conjuncts of a conjunction, kept sorted and duplicate free so that
/// equality is set equality. Nested conjunctions are spliced in.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Conjunction(Vec<Formula>);

impl Conjunction {
    pub fn as_slice(&self) -> &[Formula] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Formula> {
        self.0.iter()
    }
}

/// An HML formula. `T` is the empty conjunction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Obs(Action, Arc<Formula>),
    Conj(Conjunction),
    Neg(Arc<Formula>),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Conj(Conjunction::default())
    }

    pub fn obs(a: Action, body: Formula) -> Formula {
        Formula::Obs(a, Arc::new(body))
    }

    /// `⟨a⟩T`.
    pub fn obs_top(a: &str) -> Formula {
        Formula::obs(Action::new(a), Formula::top())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(body: Formula) -> Formula {
        Formula::Neg(Arc::new(body))
    }

    /// Conjunction of the given formulas. Conjunctions among them are
    /// flattened into the result; the conjunct set is sorted and deduplicated.
    /// A single remaining conjunct is returned as is, since `⋀{φ}` means `φ`.
    pub fn conj<I: IntoIterator<Item = Formula>>(conjuncts: I) -> Formula {
        let mut v = Vec::new();
        for c in conjuncts {
            match c {
                Formula::Conj(inner) => v.extend(inner.0),
                other => v.push(other),
            }
        }
        v.sort();
        v.dedup();
        if v.len() == 1 {
            return v.pop().unwrap();
        }
        Formula::Conj(Conjunction(v))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Conj(c) if c.is_empty())
    }

    pub fn is_obs(&self) -> bool {
        matches!(self, Formula::Obs(..))
    }

    pub fn is_neg(&self) -> bool {
        matches!(self, Formula::Neg(_))
    }

    /// `⟨a⟩T` for some `a`.
    pub fn is_flat_obs(&self) -> bool {
        matches!(self, Formula::Obs(_, body) if body.is_top())
    }

    /// Wraps negations into a singleton conjunction; other formulas are
    /// returned unchanged.
    pub fn hat(&self) -> Formula {
        match self {
            Formula::Neg(_) => Formula::Conj(Conjunction(alloc::vec![self.clone()])),
            _ => self.clone(),
        }
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Obs(_, b) | Formula::Neg(b) => 1 + b.size(),
            Formula::Conj(c) => 1 + c.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// True if some `¬¬φ` occurs.
    pub fn has_double_negation(&self) -> bool {
        match self {
            Formula::Neg(b) => b.is_neg() || b.has_double_negation(),
            Formula::Obs(_, b) => b.has_double_negation(),
            Formula::Conj(c) => c.iter().any(Formula::has_double_negation),
        }
    }

    /// True if some `¬⋀Φ` occurs, including `¬T`.
    pub fn has_negated_conjunction(&self) -> bool {
        match self {
            Formula::Neg(b) => matches!(**b, Formula::Conj(_)) || b.has_negated_conjunction(),
            Formula::Obs(_, b) => b.has_negated_conjunction(),
            Formula::Conj(c) => c.iter().any(Formula::has_negated_conjunction),
        }
    }

    /// True if a conjunction occurs as an immediate conjunct of another.
    pub fn has_nested_conjunction(&self) -> bool {
        match self {
            Formula::Neg(b) | Formula::Obs(_, b) => b.has_nested_conjunction(),
            Formula::Conj(c) => c
                .iter()
                .any(|x| matches!(x, Formula::Conj(_)) || x.has_nested_conjunction()),
        }
    }

    /// Renders with ASCII operators: `<a>phi`, `/\{phi1, phi2}`, `!phi`, `T`.
    pub fn to_ascii(&self) -> String {
        let mut s = String::new();
        write_formula(&mut s, self, &ASCII).unwrap();
        s
    }
}

struct Symbols {
    open: &'static str,
    close: &'static str,
    conj: &'static str,
    neg: &'static str,
    top: &'static str,
}

const UNICODE: Symbols = Symbols {
    open: "⟨",
    close: "⟩",
    conj: "⋀",
    neg: "¬",
    top: "⊤",
};

const ASCII: Symbols = Symbols {
    open: "<",
    close: ">",
    conj: "/\\",
    neg: "!",
    top: "T",
};

fn write_formula(out: &mut impl fmt::Write, phi: &Formula, sym: &Symbols) -> fmt::Result {
    match phi {
        Formula::Obs(a, body) => {
            write!(out, "{}{}{}", sym.open, a, sym.close)?;
            if body.is_top() {
                Ok(())
            } else {
                write_formula(out, body, sym)
            }
        }
        Formula::Neg(body) => {
            out.write_str(sym.neg)?;
            write_formula(out, body, sym)
        }
        Formula::Conj(c) => match c.as_slice() {
            [] => out.write_str(sym.top),
            [only] => write_formula(out, only, sym),
            many => {
                write!(out, "{}{{", sym.conj)?;
                for (i, x) in many.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    write_formula(out, x, sym)?;
                }
                out.write_str("}")
            }
        },
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, &UNICODE)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, &UNICODE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula syntax error at offset {offset}: {message}")]
pub struct FormulaParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses the ASCII rendering (the Unicode operators are accepted too).
/// `<a>` without a body abbreviates `<a>T`; parentheses may group.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaParseError> {
    let mut p = FormulaParser {
        chars: text.char_indices().collect(),
        pos: 0,
        len: text.len(),
    };
    let phi = p.formula()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(phi)
}

struct FormulaParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl FormulaParser {
    fn error(&self, message: &str) -> FormulaParseError {
        FormulaParseError {
            offset: self.chars.get(self.pos).map_or(self.len, |&(o, _)| o),
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormulaParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected `{c}`")))
        }
    }

    fn starts_formula(&mut self) -> bool {
        matches!(self.peek(), Some('<' | '⟨' | '!' | '¬' | '/' | '⋀' | 'T' | '⊤' | '('))
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek() {
            Some('<' | '⟨') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].1.is_ascii_alphanumeric() || self.chars[self.pos].1 == '_')
                {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected an action name"));
                }
                let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                if !self.eat('>') && !self.eat('⟩') {
                    return Err(self.error("expected `>`"));
                }
                let body = if self.starts_formula() {
                    self.formula()?
                } else {
                    Formula::top()
                };
                Ok(Formula::obs(Action::new(&name), body))
            }
            Some('!' | '¬') => {
                self.pos += 1;
                Ok(Formula::neg(self.formula()?))
            }
            Some('T' | '⊤') => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Some('(') => {
                self.pos += 1;
                let phi = self.formula()?;
                self.expect(')')?;
                Ok(phi)
            }
            Some('/') => {
                self.pos += 1;
                if self.chars.get(self.pos).map(|&(_, c)| c) != Some('\\') {
                    return Err(self.error("expected `/\\`"));
                }
                self.pos += 1;
                self.conjuncts()
            }
            Some('⋀') => {
                self.pos += 1;
                self.conjuncts()
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    fn conjuncts(&mut self) -> Result<Formula, FormulaParseError> {
        self.expect('{')?;
        let mut cs = Vec::new();
        if !self.eat('}') {
            loop {
                cs.push(self.formula()?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        // keep the conjunct list as written (sorted, deduplicated) without
        // splicing, so that parsed nested conjunctions stay observable
        cs.sort();
        cs.dedup();
        if cs.len() == 1 {
            return Ok(cs.pop().unwrap());
        }
        Ok(Formula::Conj(Conjunction(cs)))
    }
}

/// Whether `p` satisfies `phi`, by structural recursion.
pub fn satisfies(lts: &Lts, p: StateId, phi: &Formula) -> bool {
    match phi {
        Formula::Obs(a, body) => match lts.action_index(a) {
            Some(ai) => lts
                .successors(p)
                .iter()
                .any(|&(b, t)| b == ai && satisfies(lts, t, body)),
            None => false,
        },
        Formula::Conj(c) => c.iter().all(|x| satisfies(lts, p, x)),
        Formula::Neg(body) => !satisfies(lts, p, body),
    }
}

/// True iff `p` satisfies `phi` and no member of `q` does.
pub fn distinguishes(lts: &Lts, phi: &Formula, p: StateId, q: &StateSet) -> bool {
    satisfies(lts, p, phi) && q.iter().all(|s| !satisfies(lts, s, phi))
}

/// The HML game for `(p, phi)`. Positions carry a state and the formula
/// still to be checked there; the defender wins exactly when `p` satisfies
/// `phi`. The initial position is set.
pub fn build_hml_game(lts: &Lts, p: StateId, phi: &Formula) -> (ReachabilityGame, Vec<(StateId, Formula)>) {
    let mut builder = GameBuilder::new();
    let mut index: HashMap<(StateId, Formula), usize> = HashMap::new();
    let mut positions: Vec<(StateId, Formula)> = Vec::new();
    let mut todo = Vec::new();

    fn owner_of(phi: &Formula) -> Player {
        match phi {
            Formula::Obs(..) => Player::Defender,
            Formula::Conj(_) => Player::Attacker,
            Formula::Neg(b) => match **b {
                Formula::Conj(_) => Player::Defender,
                _ => Player::Attacker,
            },
        }
    }

    fn intern(
        builder: &mut GameBuilder,
        index: &mut HashMap<(StateId, Formula), usize>,
        positions: &mut Vec<(StateId, Formula)>,
        todo: &mut Vec<usize>,
        s: StateId,
        f: Formula,
    ) -> usize {
        if let Some(&g) = index.get(&(s, f.clone())) {
            return g;
        }
        let g = builder.add_position(owner_of(&f));
        index.insert((s, f.clone()), g);
        positions.push((s, f));
        todo.push(g);
        g
    }

    let g0 = intern(&mut builder, &mut index, &mut positions, &mut todo, p, phi.clone());
    builder.set_initial(g0);
    while let Some(g) = todo.pop() {
        let (s, f) = positions[g].clone();
        let mut next: Vec<(StateId, Formula)> = Vec::new();
        match &f {
            Formula::Obs(a, body) => {
                if let Some(ai) = lts.action_index(a) {
                    for &(b, t) in lts.successors(s) {
                        if b == ai {
                            next.push((t, (**body).clone()));
                        }
                    }
                }
            }
            Formula::Conj(c) => next.extend(c.iter().map(|x| (s, x.clone()))),
            Formula::Neg(inner) => match &**inner {
                Formula::Obs(a, body) => {
                    if let Some(ai) = lts.action_index(a) {
                        for &(b, t) in lts.successors(s) {
                            if b == ai {
                                next.push((t, Formula::Neg(body.clone())));
                            }
                        }
                    }
                }
                Formula::Conj(c) => next.extend(c.iter().map(|x| (s, Formula::neg(x.clone())))),
                Formula::Neg(body) => next.push((s, (**body).clone())),
            },
        }
        for (t, x) in next {
            let h = intern(&mut builder, &mut index, &mut positions, &mut todo, t, x);
            builder.add_move(g, h, ());
        }
    }
    (builder.build(), positions)
}
