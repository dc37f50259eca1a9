//! Expressiveness prices of formulas, the budgets of the spectrum notions,
//! and classification of a price front into verdicts.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::hml::Formula;

/// Value used for ∞ in a price coordinate.
pub const INF: u32 = u32::MAX;

/// A six-dimensional price: observation depth, conjunction depth, positive
/// deep branches, positive branches, negation depth and negated observation
/// depth. Coordinates equal to [`INF`] are infinite.
///
/// Prices are only partially ordered, so `Price` deliberately has no
/// `PartialOrd`; use [`Price::leq`] and [`Price::lt`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Price(pub [u32; 6]);

impl Price {
    pub const ZERO: Price = Price([0; 6]);
    pub const INFINITE: Price = Price([INF; 6]);

    pub const fn new(v: [u32; 6]) -> Price {
        Price(v)
    }

    /// The `i`-th coordinate, 1-based as in the usual notation.
    pub fn dim(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn leq(&self, other: &Price) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn lt(&self, other: &Price) -> bool {
        self.leq(other) && self != other
    }

    pub fn join(&self, other: &Price) -> Price {
        let mut v = self.0;
        for (x, y) in v.iter_mut().zip(other.0.iter()) {
            *x = (*x).max(*y);
        }
        Price(v)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|&x| x != INF)
    }

    /// Lexicographic comparison of the coordinates, for deterministic sorting.
    pub fn cmp_lex(&self, other: &Price) -> core::cmp::Ordering {
        self.0.cmp(&other.0)
    }
}

/// `1 + x` with `1 + ∞ = ∞`.
pub fn succ(x: u32) -> u32 {
    if x == INF {
        INF
    } else {
        x + 1
    }
}

/// Join of a set of prices; the join of no prices is zero.
pub fn price_join<'a, I: IntoIterator<Item = &'a Price>>(prices: I) -> Price {
    prices.into_iter().fold(Price::ZERO, |acc, p| acc.join(p))
}

pub fn price_leq(a: &Price, b: &Price) -> bool {
    a.leq(b)
}

pub fn price_lt(a: &Price, b: &Price) -> bool {
    a.lt(b)
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if x == INF {
                f.write_str("∞")?;
            } else {
                write!(f, "{x}")?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Price of `⟨a⟩φ` from `expr(φ)` and `expr(hat φ)`.
pub fn obs_expr(body: &Price, body_hat: &Price) -> Price {
    Price([succ(body.0[0]), 0, 0, 0, 0, 0]).join(body_hat)
}

/// Price of `¬φ` from `expr(φ)`.
pub fn neg_expr(body: &Price) -> Price {
    Price([0, 0, 0, 0, succ(body.0[4]), body.0[0]]).join(body)
}

/// Price of `hat(φ)` for a negation `φ` from `expr(φ)`.
pub fn neg_hat_expr(neg: &Price) -> Price {
    Price([0, succ(neg.0[1]), 0, 0, 0, 0]).join(neg)
}

/// Accumulates the price of a conjunction one conjunct at a time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConjPrice {
    join: Price,
    conj_depth: u32,
    positive: u32,
    flat: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjunctKind {
    /// `⟨a⟩T`
    FlatObs,
    /// any other non-negated formula
    Positive,
    Negation,
}

impl ConjunctKind {
    pub fn of(phi: &Formula) -> ConjunctKind {
        if phi.is_neg() {
            ConjunctKind::Negation
        } else if phi.is_flat_obs() {
            ConjunctKind::FlatObs
        } else {
            ConjunctKind::Positive
        }
    }
}

impl ConjPrice {
    pub fn new() -> ConjPrice {
        ConjPrice::default()
    }

    /// Adds a conjunct of the given kind whose price is `expr`.
    pub fn push(&mut self, kind: ConjunctKind, expr: &Price) {
        self.join = self.join.join(expr);
        self.conj_depth = self.conj_depth.max(succ(expr.0[1]));
        match kind {
            ConjunctKind::FlatObs => {
                self.positive += 1;
                self.flat += 1;
            }
            ConjunctKind::Positive => self.positive += 1,
            ConjunctKind::Negation => {}
        }
    }

    pub fn finish(&self) -> Price {
        Price([0, self.conj_depth, self.positive - self.flat, self.positive, 0, 0]).join(&self.join)
    }

    /// Join of the conjunct prices so far.
    pub fn conjunct_join(&self) -> &Price {
        &self.join
    }

    pub fn conj_depth(&self) -> u32 {
        self.conj_depth
    }

    pub fn positive(&self) -> u32 {
        self.positive
    }

    pub fn deep_positive(&self) -> u32 {
        self.positive - self.flat
    }
}

/// The expressiveness price of a formula.
pub fn expr(phi: &Formula) -> Price {
    match phi {
        Formula::Obs(_, body) => obs_expr(&expr(body), &standalone_price(body)),
        Formula::Neg(body) => neg_expr(&expr(body)),
        Formula::Conj(c) => {
            let mut acc = ConjPrice::new();
            for x in c.iter() {
                acc.push(ConjunctKind::of(x), &expr(x));
            }
            acc.finish()
        }
    }
}

/// The price of a formula used on its own: `expr(hat φ)`.
pub fn standalone_price(phi: &Formula) -> Price {
    let e = expr(phi);
    if phi.is_neg() {
        neg_hat_expr(&e)
    } else {
        e
    }
}

/// A notion of the linear-time–branching-time spectrum.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Notion {
    Enabledness,
    Traces,
    Failures,
    Readiness,
    FailureTraces,
    ReadyTraces,
    ImpossibleFutures,
    PossibleFutures,
    ReadySimulation,
    /// n-nested simulation for n ≥ 1; `NestedSimulation(1)` is simulation.
    NestedSimulation(u32),
    Bisimulation,
}

impl Notion {
    pub const SIMULATION: Notion = Notion::NestedSimulation(1);

    /// Short label: E, T, F, R, FT, RT, IF, PF, S1, RS, S2, ..., B.
    pub fn label(&self) -> String {
        match self {
            Notion::Enabledness => "E".into(),
            Notion::Traces => "T".into(),
            Notion::Failures => "F".into(),
            Notion::Readiness => "R".into(),
            Notion::FailureTraces => "FT".into(),
            Notion::ReadyTraces => "RT".into(),
            Notion::ImpossibleFutures => "IF".into(),
            Notion::PossibleFutures => "PF".into(),
            Notion::ReadySimulation => "RS".into(),
            Notion::NestedSimulation(n) => alloc::format!("S{n}"),
            Notion::Bisimulation => "B".into(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Notion::Enabledness => "enabledness".into(),
            Notion::Traces => "trace".into(),
            Notion::Failures => "failure".into(),
            Notion::Readiness => "readiness".into(),
            Notion::FailureTraces => "failure-trace".into(),
            Notion::ReadyTraces => "ready-trace".into(),
            Notion::ImpossibleFutures => "impossible-future".into(),
            Notion::PossibleFutures => "possible-future".into(),
            Notion::ReadySimulation => "ready-simulation".into(),
            Notion::NestedSimulation(1) => "simulation".into(),
            Notion::NestedSimulation(n) => alloc::format!("{n}-nested-simulation"),
            Notion::Bisimulation => "bisimulation".into(),
        }
    }

    /// Parses a short label as produced by [`Notion::label`].
    pub fn from_label(s: &str) -> Option<Notion> {
        Some(match s {
            "E" => Notion::Enabledness,
            "T" => Notion::Traces,
            "F" => Notion::Failures,
            "R" => Notion::Readiness,
            "FT" => Notion::FailureTraces,
            "RT" => Notion::ReadyTraces,
            "IF" => Notion::ImpossibleFutures,
            "PF" => Notion::PossibleFutures,
            "RS" => Notion::ReadySimulation,
            "B" => Notion::Bisimulation,
            _ => {
                let n: u32 = s.strip_prefix('S')?.parse().ok()?;
                if n == 0 {
                    return None;
                }
                Notion::NestedSimulation(n)
            }
        })
    }

    /// The least upper bound of the prices of the notion's observations.
    pub fn budget(&self) -> Price {
        const I: u32 = INF;
        Price(match self {
            Notion::Enabledness => [1, 0, 0, 0, 0, 0],
            Notion::Traces => [I, 0, 0, 0, 0, 0],
            Notion::Failures => [I, 1, 0, 0, 1, 1],
            Notion::Readiness => [I, 1, 0, I, 1, 1],
            Notion::FailureTraces => [I, I, 1, 1, 1, 1],
            Notion::ReadyTraces => [I, I, 1, I, 1, 1],
            Notion::ImpossibleFutures => [I, 1, 0, 0, 1, I],
            Notion::PossibleFutures => [I, 1, I, I, 1, I],
            Notion::ReadySimulation => [I, I, I, I, 1, 1],
            Notion::NestedSimulation(n) => [I, I, I, I, n.saturating_sub(1), I],
            Notion::Bisimulation => [I; 6],
        })
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn budget(x: Notion) -> Price {
    x.budget()
}

/// Whether `phi` belongs to the observation language of `x`.
pub fn in_language(phi: &Formula, x: Notion) -> bool {
    standalone_price(phi).leq(&x.budget())
}

/// The notions reported by default, coarsest first; `with_s3` adds
/// 3-nested simulation.
pub fn reporting_set(with_s3: bool) -> Vec<Notion> {
    let mut v = alloc::vec![
        Notion::Enabledness,
        Notion::Traces,
        Notion::Failures,
        Notion::Readiness,
        Notion::FailureTraces,
        Notion::ReadyTraces,
        Notion::ImpossibleFutures,
        Notion::PossibleFutures,
        Notion::SIMULATION,
        Notion::ReadySimulation,
        Notion::NestedSimulation(2),
    ];
    if with_s3 {
        v.push(Notion::NestedSimulation(3));
    }
    v.push(Notion::Bisimulation);
    v
}

/// Hasse diagram of the spectrum as (finer, coarser) pairs.
pub fn spectrum_edges(with_s3: bool) -> Vec<(Notion, Notion)> {
    use Notion::*;
    let s2 = NestedSimulation(2);
    let mut v = alloc::vec![
        (s2, ReadySimulation),
        (s2, PossibleFutures),
        (ReadySimulation, ReadyTraces),
        (ReadySimulation, Notion::SIMULATION),
        (ReadyTraces, FailureTraces),
        (ReadyTraces, Readiness),
        (PossibleFutures, Readiness),
        (PossibleFutures, ImpossibleFutures),
        (Notion::SIMULATION, Traces),
        (FailureTraces, Failures),
        (Readiness, Failures),
        (ImpossibleFutures, Failures),
        (Failures, Traces),
        (Traces, Enabledness),
    ];
    if with_s3 {
        let s3 = NestedSimulation(3);
        v.insert(0, (s3, s2));
        v.insert(0, (Bisimulation, s3));
    } else {
        v.insert(0, (Bisimulation, s2));
    }
    v
}

/// True if `finer` reaches `coarser` in the spectrum order (reflexive).
pub fn is_finer_or_equal(finer: Notion, coarser: Notion, with_s3: bool) -> bool {
    let edges = spectrum_edges(with_s3);
    let mut seen = alloc::vec![finer];
    let mut stack = alloc::vec![finer];
    while let Some(x) = stack.pop() {
        if x == coarser {
            return true;
        }
        for &(a, b) in &edges {
            if a == x && !seen.contains(&b) {
                seen.push(b);
                stack.push(b);
            }
        }
    }
    false
}

/// The notions among `notions` whose budget is above `price`.
pub fn languages(price: &Price, notions: &[Notion]) -> Vec<Notion> {
    notions.iter().copied().filter(|x| price.leq(&x.budget())).collect()
}

/// The ⊑-minimal elements of a price list, deduplicated, in input order.
pub fn pareto_front(prices: &[Price]) -> Vec<Price> {
    let mut out: Vec<Price> = Vec::new();
    for p in prices {
        if prices.iter().any(|q| q.lt(p)) || out.contains(p) {
            continue;
        }
        out.push(*p);
    }
    out
}

/// Pareto front of the standalone prices of `formulas`, one witness per
/// minimal price (the formula with the smallest ASCII rendering), sorted by
/// price.
pub fn minimal_prices<'a, I: IntoIterator<Item = &'a Formula>>(formulas: I) -> Vec<(Price, Formula)> {
    let priced: Vec<(Price, &Formula)> = formulas.into_iter().map(|f| (standalone_price(f), f)).collect();
    let mut best: Vec<(Price, Formula, String)> = Vec::new();
    for (p, f) in &priced {
        if priced.iter().any(|(q, _)| q.lt(p)) {
            continue;
        }
        let text = f.to_ascii();
        match best.iter_mut().find(|(q, _, _)| q == p) {
            Some(entry) => {
                if text < entry.2 {
                    entry.1 = (*f).clone();
                    entry.2 = text;
                }
            }
            None => best.push((*p, (*f).clone(), text)),
        }
    }
    best.sort_by(|a, b| a.0.cmp_lex(&b.0).then_with(|| a.2.cmp(&b.2)));
    best.into_iter().map(|(p, f, _)| (p, f)).collect()
}

/// Result of classifying a price front against the reporting set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Verdict {
    pub distinguished: Vec<Notion>,
    pub preordered: Vec<Notion>,
    pub coarsest_distinguishing: Vec<Notion>,
    pub finest_preorders: Vec<Notion>,
}

/// Classifies `front`: a notion distinguishes if some front price lies within
/// its budget; the remaining notions preorder.
pub fn classify(front: &[Price], with_s3: bool) -> Verdict {
    let notions = reporting_set(with_s3);
    let (distinguished, preordered): (Vec<Notion>, Vec<Notion>) =
        notions.iter().partition(|x| front.iter().any(|m| m.leq(&x.budget())));
    let coarsest_distinguishing = distinguished
        .iter()
        .copied()
        .filter(|&x| {
            !distinguished
                .iter()
                .any(|&y| y != x && is_finer_or_equal(x, y, with_s3))
        })
        .collect();
    let finest_preorders = preordered
        .iter()
        .copied()
        .filter(|&x| !preordered.iter().any(|&y| y != x && is_finer_or_equal(y, x, with_s3)))
        .collect();
    Verdict {
        distinguished,
        preordered,
        coarsest_distinguishing,
        finest_preorders,
    }
}
