//! Brute-force reference implementations for small instances: formula
//! enumeration, Pareto fronts of distinguishing formulas, bisimilarity by
//! signature refinement and a naive reachability-game solver.
//!
//! Nothing here uses the spectroscopy game.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::game::{Player, ReachabilityGame};
use crate::hml::{satisfies, Formula};
use crate::lts::{Lts, StateId, StateSet};
use crate::pricing::{
    minimal_prices, neg_expr, neg_hat_expr, obs_expr, standalone_price, ConjPrice, ConjunctKind, Price,
};
use crate::process::Action;

/// Bounds of an enumeration: every formula's standalone price must be below
/// `cap`, and conjunctions have at most `max_conjuncts` conjuncts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub cap: Price,
    pub max_conjuncts: usize,
}

impl EnumerationBudget {
    /// Panics if a component of `cap` is infinite.
    pub fn new(cap: Price, max_conjuncts: usize) -> EnumerationBudget {
        assert!(cap.is_finite(), "enumeration cap must be finite");
        EnumerationBudget { cap, max_conjuncts }
    }

    /// `max_conjuncts` defaults to the number of states of `lts`.
    pub fn for_lts(cap: Price, lts: &Lts) -> EnumerationBudget {
        EnumerationBudget::new(cap, lts.num_states())
    }
}

/// May `phi` be a conjunct: an observation or a negation.
fn conjunct_eligible(phi: &Formula) -> bool {
    !matches!(phi, Formula::Conj(_))
}

/// All formulas with standalone price below the cap, at most
/// `max_conjuncts` conjuncts per conjunction, no double negations and no
/// negated conjunctions (`¬T` included), built by increasing height.
/// Conjunctions have at least two conjuncts, as `⋀{φ}` means `φ`.
pub fn enumerate_formulas(alphabet: &[Action], budget: &EnumerationBudget) -> Vec<Formula> {
    let cap = budget.cap;
    let mut all: BTreeSet<Formula> = BTreeSet::new();
    all.insert(Formula::top());
    loop {
        let current: Vec<Formula> = all.iter().cloned().collect();
        let mut next = all.clone();
        for phi in &current {
            for a in alphabet {
                let obs = Formula::obs(a.clone(), phi.clone());
                if standalone_price(&obs).leq(&cap) {
                    next.insert(obs);
                }
            }
            if phi.is_obs() {
                let neg = Formula::neg(phi.clone());
                if standalone_price(&neg).leq(&cap) {
                    next.insert(neg);
                }
            }
        }
        let eligible: Vec<Formula> = current.iter().filter(|f| conjunct_eligible(f)).cloned().collect();
        let mut chosen = Vec::new();
        subsets(&eligible, 0, &mut chosen, ConjPrice::new(), budget, &mut next);
        if next.len() == all.len() {
            return all.into_iter().collect();
        }
        all = next;
    }
}

fn subsets(
    items: &[Formula],
    from: usize,
    chosen: &mut Vec<Formula>,
    acc: ConjPrice,
    budget: &EnumerationBudget,
    out: &mut BTreeSet<Formula>,
) {
    if chosen.len() >= 2 {
        out.insert(Formula::conj(chosen.iter().cloned()));
    }
    if chosen.len() == budget.max_conjuncts {
        return;
    }
    for i in from..items.len() {
        let mut next = acc;
        next.push(ConjunctKind::of(&items[i]), &crate::pricing::expr(&items[i]));
        if !next.finish().leq(&budget.cap) {
            continue;
        }
        chosen.push(items[i].clone());
        subsets(items, i + 1, chosen, next, budget, out);
        chosen.pop();
    }
}

/// Front of [`enumerate_formulas`] restricted to formulas distinguishing
/// `p` from every member of `q`.
pub fn naive_front(lts: &Lts, p: StateId, q: &StateSet, budget: &EnumerationBudget) -> Vec<(Price, Formula)> {
    let formulas = enumerate_formulas(lts.actions(), budget);
    let dist: Vec<&Formula> = formulas
        .iter()
        .filter(|f| satisfies(lts, p, f) && q.iter().all(|s| !satisfies(lts, s, f)))
        .collect();
    minimal_prices(dist)
}

/// Syntactic shape of a formula, as far as prices of enclosing formulas
/// depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    FlatObs,
    DeepObs,
    Neg,
    Conj,
}

impl Kind {
    pub fn of(phi: &Formula) -> Kind {
        match phi {
            Formula::Obs(..) if phi.is_flat_obs() => Kind::FlatObs,
            Formula::Obs(..) => Kind::DeepObs,
            Formula::Neg(_) => Kind::Neg,
            Formula::Conj(_) => Kind::Conj,
        }
    }

    pub fn is_obs(self) -> bool {
        matches!(self, Kind::FlatObs | Kind::DeepObs)
    }

    fn conjunct_kind(self) -> ConjunctKind {
        match self {
            Kind::FlatObs => ConjunctKind::FlatObs,
            Kind::Neg => ConjunctKind::Negation,
            _ => ConjunctKind::Positive,
        }
    }
}

/// What matters about a formula on a fixed LTS: its shape, its price in
/// contexts and the set of states satisfying it (bit `i` for state `i`).
/// Formulas with equal signatures are interchangeable in every context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub kind: Kind,
    pub expr: Price,
    pub truth: u64,
}

impl Signature {
    pub fn standalone(&self) -> Price {
        if self.kind == Kind::Neg {
            neg_hat_expr(&self.expr)
        } else {
            self.expr
        }
    }
}

/// The cheapest signatures realizable by formulas within a budget, one
/// witness formula each.
///
/// For a fixed shape and truth set only the ⊑-minimal prices are kept: all
/// price contributions to enclosing formulas are monotone in the price of a
/// subformula of fixed shape, so the dropped signatures can never lead to a
/// cheaper formula. Fronts therefore agree with those of
/// [`enumerate_formulas`].
#[derive(Clone, Debug)]
pub struct SignatureSpace {
    pub entries: Vec<(Signature, Formula)>,
    num_states: usize,
}

/// Antichains of prices per (kind, truth).
#[derive(Default)]
struct Antichains {
    classes: HashMap<(Kind, u64), Vec<(Price, Formula)>>,
}

impl Antichains {
    /// Inserts unless dominated; drops entries the new one dominates.
    fn insert(&mut self, sig: Signature, phi: Formula) -> bool {
        let class = self.classes.entry((sig.kind, sig.truth)).or_default();
        if class.iter().any(|(e, _)| e.leq(&sig.expr)) {
            return false;
        }
        class.retain(|(e, _)| !sig.expr.leq(e));
        class.push((sig.expr, phi));
        true
    }

    fn entries(&self) -> Vec<(Signature, Formula)> {
        let mut v: Vec<(Signature, Formula)> = self
            .classes
            .iter()
            .flat_map(|(&(kind, truth), class)| {
                class.iter().map(move |(expr, phi)| {
                    (
                        Signature {
                            kind,
                            expr: *expr,
                            truth,
                        },
                        phi.clone(),
                    )
                })
            })
            .collect();
        // deterministic order for witnesses
        v.sort_by(|a, b| a.1.cmp(&b.1));
        v
    }
}

impl SignatureSpace {
    /// Panics if the LTS has more than 64 states.
    pub fn compute(lts: &Lts, budget: &EnumerationBudget) -> SignatureSpace {
        let n = lts.num_states();
        assert!(n <= 64, "signature oracle handles at most 64 states");
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let cap = budget.cap;
        // succ_mask[a][s]: the a-successors of s as a bit mask
        let succ_mask: Vec<Vec<u64>> = (0..lts.actions().len())
            .map(|a| {
                lts.states()
                    .map(|s| {
                        lts.successors(s)
                            .iter()
                            .filter(|&&(b, _)| b == a)
                            .fold(0u64, |m, &(_, t)| m | (1 << t.index()))
                    })
                    .collect()
            })
            .collect();

        let mut space = Antichains::default();
        let top = Signature {
            kind: Kind::Conj,
            expr: Price::ZERO,
            truth: full,
        };
        space.insert(top, Formula::top());

        loop {
            let entries = space.entries();
            let mut changed = false;
            for (sig, phi) in &entries {
                for (a, masks) in succ_mask.iter().enumerate() {
                    let truth = (0..n)
                        .filter(|&s| masks[s] & sig.truth != 0)
                        .fold(0u64, |m, s| m | (1 << s));
                    let expr = obs_expr(&sig.expr, &sig.standalone());
                    let kind = if phi.is_top() { Kind::FlatObs } else { Kind::DeepObs };
                    if expr.leq(&cap) {
                        let new = Signature { kind, expr, truth };
                        changed |= space.insert(new, Formula::obs(lts.action(a).clone(), phi.clone()));
                    }
                }
                if sig.kind.is_obs() {
                    let new = Signature {
                        kind: Kind::Neg,
                        expr: neg_expr(&sig.expr),
                        truth: !sig.truth & full,
                    };
                    if new.standalone().leq(&cap) {
                        changed |= space.insert(new, Formula::neg(phi.clone()));
                    }
                }
            }
            for (new, phi) in conjunctions(&entries, budget, n, full) {
                changed |= space.insert(new, phi);
            }
            if !changed {
                return SignatureSpace {
                    entries: space.entries(),
                    num_states: n,
                };
            }
        }
    }

    /// Pareto front over the formulas of the accepted kinds distinguishing
    /// `p` from every member of `q`.
    pub fn front_where(&self, p: StateId, q: &StateSet, accept: impl Fn(Kind) -> bool) -> Vec<(Price, Formula)> {
        debug_assert!(q.iter().all(|s| s.index() < self.num_states));
        let qmask = q.iter().fold(0u64, |m, s| m | (1 << s.index()));
        let witnesses: Vec<&Formula> = self
            .entries
            .iter()
            .filter(|(sig, _)| accept(sig.kind) && sig.truth & (1 << p.index()) != 0 && sig.truth & qmask == 0)
            .map(|(_, f)| f)
            .collect();
        minimal_prices(witnesses)
    }

    pub fn front(&self, p: StateId, q: &StateSet) -> Vec<(Price, Formula)> {
        self.front_where(p, q, |_| true)
    }
}

/// Can the conjunction built so far in `a` end up cheaper than the same
/// extension of `b`? If not, `a` is covered by `b`.
fn conj_covered(a: &ConjPrice, b: &ConjPrice) -> bool {
    b.conjunct_join().leq(a.conjunct_join())
        && b.conj_depth() <= a.conj_depth()
        && b.positive() <= a.positive()
        && b.deep_positive() <= a.deep_positive()
}

/// Cheapest conjunction signatures over sets of at least two distinct
/// conjunct signatures, by a subset dynamic program. Partial conjunctions
/// with equal conjunct count and truth are compared by [`conj_covered`];
/// conjuncts come from distinct signatures and are added in a fixed order,
/// so an extension never repeats a conjunct of either partial conjunction.
///
/// At most `max_conjuncts` conjuncts are used. When that bound is at least
/// the number of states it cannot matter (a conjunction is false exactly
/// where one of its conjuncts is, so one conjunct per state suffices) and
/// counts are only tracked up to two.
fn conjunctions(
    entries: &[(Signature, Formula)],
    budget: &EnumerationBudget,
    n: usize,
    full: u64,
) -> Vec<(Signature, Formula)> {
    let exact_count = budget.max_conjuncts < n;
    let limit = if exact_count { budget.max_conjuncts } else { usize::MAX };
    type Partial = (ConjPrice, Vec<usize>);
    let mut table: HashMap<(usize, u64), Vec<Partial>> = HashMap::new();
    table.insert((0, full), alloc::vec![(ConjPrice::new(), Vec::new())]);
    for (i, (sig, _)) in entries.iter().enumerate() {
        if sig.kind == Kind::Conj {
            continue;
        }
        let mut keys: Vec<(usize, u64)> = table.keys().copied().collect();
        keys.sort_unstable();
        let mut additions: Vec<((usize, u64), Partial)> = Vec::new();
        for key in keys {
            for (acc, items) in &table[&key] {
                if items.len() >= limit {
                    continue;
                }
                let mut next = *acc;
                next.push(sig.kind.conjunct_kind(), &sig.expr);
                if !next.finish().leq(&budget.cap) {
                    continue;
                }
                let count = if exact_count { key.0 + 1 } else { (key.0 + 1).min(2) };
                let mut witness = items.clone();
                witness.push(i);
                additions.push(((count, key.1 & sig.truth), (next, witness)));
            }
        }
        for (key, (acc, witness)) in additions {
            let class = table.entry(key).or_default();
            if class.iter().any(|(b, _)| conj_covered(&acc, b)) {
                continue;
            }
            class.retain(|(b, _)| !conj_covered(b, &acc));
            class.push((acc, witness));
        }
    }
    let mut out = Vec::new();
    for ((count, truth), class) in table {
        if count < 2 {
            continue;
        }
        for (acc, items) in class {
            let sig = Signature {
                kind: Kind::Conj,
                expr: acc.finish(),
                truth,
            };
            out.push((sig, Formula::conj(items.iter().map(|&i| entries[i].1.clone()))));
        }
    }
    out
}

/// Pareto front of distinguishing formulas for `p` against every member of
/// `q`, by exhaustive search modulo signatures.
pub fn brute_force_front(lts: &Lts, p: StateId, q: &StateSet, budget: &EnumerationBudget) -> Vec<(Price, Formula)> {
    SignatureSpace::compute(lts, budget).front(p, q)
}

/// Bisimilarity classes by naive signature refinement: `class[s]` is the
/// block of state `s`.
pub fn bisimulation_classes(lts: &Lts) -> Vec<usize> {
    let n = lts.num_states();
    let mut class = alloc::vec![0usize; n];
    let mut blocks = 1;
    loop {
        let mut ids: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let mut next = alloc::vec![0usize; n];
        for s in lts.states() {
            let mut sig: Vec<(usize, usize)> = lts.successors(s).iter().map(|&(a, t)| (a, class[t.index()])).collect();
            sig.sort_unstable();
            sig.dedup();
            let len = ids.len();
            next[s.index()] = *ids.entry((class[s.index()], sig)).or_insert(len);
        }
        let count = ids.len();
        class = next;
        if count == blocks {
            return class;
        }
        blocks = count;
    }
}

pub fn bisimilar(lts: &Lts, p: StateId, q: StateId) -> bool {
    let c = bisimulation_classes(lts);
    c[p.index()] == c[q.index()]
}

/// Attacker winning region as a least fixed point, recomputed round by
/// round until nothing changes.
pub fn naive_winning_region<L>(game: &ReachabilityGame<L>) -> Vec<bool> {
    let n = game.num_positions();
    let mut win = alloc::vec![false; n];
    loop {
        let mut changed = false;
        for g in 0..n {
            if win[g] {
                continue;
            }
            let now = match game.owner(g) {
                Player::Attacker => game.successors(g).any(|t| win[t]),
                Player::Defender => game.successors(g).all(|t| win[t]),
            };
            if now {
                win[g] = true;
                changed = true;
            }
        }
        if !changed {
            return win;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hml::parse_formula;
    use crate::lts::derive_lts;
    use crate::process::parse;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let a = [Action::new("a")];
        let got = enumerate_formulas(&a, &EnumerationBudget::new(Price([1, 0, 0, 0, 0, 0]), 2));
        assert_eq!(got, alloc::vec![f("<a>"), Formula::top()]);
        let got = enumerate_formulas(&a, &EnumerationBudget::new(Price([1, 1, 0, 0, 1, 1]), 1));
        assert!(got.contains(&f("!<a>")));
        let ab = [Action::new("a"), Action::new("b")];
        let got = enumerate_formulas(&ab, &EnumerationBudget::new(Price([2, 1, 0, 2, 0, 0]), 2));
        assert!(got.contains(&f("<a>/\\{<b>, <a>}")));
        for phi in &got {
            assert!(standalone_price(phi).leq(&Price([2, 1, 0, 2, 0, 0])));
        }
    }

    #[test]
    fn fronts_on_examples() {
        let defs = parse("P1 = a.(b + c) + a.d\nP2 = a.(b + d) + a.(c + d)\nA = a\nZ = 0\n").unwrap();
        let lts = derive_lts(&defs, &["P1", "P2", "A", "Z"]).unwrap();
        let id = |n| lts.root(n).unwrap();
        let budget = EnumerationBudget::for_lts(Price([3; 6]), &lts);
        let front = brute_force_front(&lts, id("P1"), &StateSet::singleton(id("P2")), &budget);
        let prices: Vec<Price> = front.iter().map(|(p, _)| *p).collect();
        assert!(prices.contains(&Price([2, 1, 0, 0, 1, 1])));
        assert!(prices.contains(&Price([2, 1, 0, 2, 0, 0])));
        assert!(brute_force_front(&lts, id("P1"), &StateSet::singleton(id("P1")), &budget).is_empty());
        let small = EnumerationBudget::for_lts(Price([1, 0, 0, 0, 0, 0]), &lts);
        assert_eq!(
            brute_force_front(&lts, id("A"), &StateSet::singleton(id("Z")), &small),
            alloc::vec![(Price([1, 0, 0, 0, 0, 0]), f("<a>"))]
        );
    }

    #[test]
    fn signature_space_matches_enumeration() {
        let defs = parse("P = a.b + a\nQ = a.b + b.a\n").unwrap();
        let lts = derive_lts(&defs, &["P", "Q"]).unwrap();
        for cap in [
            Price([2, 1, 0, 1, 1, 1]),
            Price([2, 1, 1, 2, 1, 1]),
            Price([2, 2, 1, 1, 1, 2]),
        ] {
            let budget = EnumerationBudget::for_lts(cap, &lts);
            let space = SignatureSpace::compute(&lts, &budget);
            for p in lts.states() {
                for q in lts.states() {
                    let qs = StateSet::singleton(q);
                    let a: Vec<Price> = space.front(p, &qs).into_iter().map(|(x, _)| x).collect();
                    let b: Vec<Price> = naive_front(&lts, p, &qs, &budget).into_iter().map(|(x, _)| x).collect();
                    assert_eq!(a, b, "cap {cap:?}, {p:?} vs {q:?}");
                }
            }
        }
    }

    #[test]
    fn refinement_separates_failures() {
        let defs = parse("P = a.b + a\nQ = a.b\nR = a.b\n").unwrap();
        let lts = derive_lts(&defs, &["P", "Q", "R"]).unwrap();
        let id = |n| lts.root(n).unwrap();
        assert!(!bisimilar(&lts, id("P"), id("Q")));
        assert!(bisimilar(&lts, id("Q"), id("R")));
    }
}
