//! Cheapest distinguishing formulas from the attacker's winning strategy
//! graph, computed by a worklist fixed point over per-position formula sets.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::game::WinningRegion;
use crate::hml::{distinguishes, Formula};
use crate::lts::{Lts, StateId, StateSet};
use crate::pricing::{
    classify, minimal_prices, neg_expr, neg_hat_expr, obs_expr, reporting_set, standalone_price, ConjPrice,
    ConjunctKind, Notion, Price, Verdict,
};
use crate::spectroscopy::{
    build_game, build_pair_game, extract_bisimulation, GameConfig, MoveLabel, SpecPosition, SpectroscopyGame,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("the attacker does not win the initial position")]
    NotAttackerWon,
}

/// The moves of the spectroscopy game reachable from an attacker-won
/// position without leaving the attacker's winning region.
#[derive(Clone, Debug)]
pub struct StrategyGraph {
    nodes: Vec<usize>,
    node_of: HashMap<usize, usize>,
    succ: Vec<Vec<(MoveLabel, usize)>>,
    pred: Vec<Vec<usize>>,
}

impl StrategyGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Game position of a node.
    pub fn position(&self, node: usize) -> usize {
        self.nodes[node]
    }

    /// Node of a game position, if it belongs to the graph.
    pub fn node(&self, g: usize) -> Option<usize> {
        self.node_of.get(&g).copied()
    }

    pub fn successors(&self, node: usize) -> &[(MoveLabel, usize)] {
        &self.succ[node]
    }

    /// Distinct predecessor nodes.
    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.pred[node]
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }
}

/// Restricts the game to what is reachable from `g0` through moves into the
/// attacker winning region.
pub fn winning_strategy_graph(
    game: &SpectroscopyGame,
    region: &WinningRegion,
    g0: usize,
) -> Result<StrategyGraph, SynthesisError> {
    if !region.attacker_wins(g0) {
        return Err(SynthesisError::NotAttackerWon);
    }
    let mut graph = StrategyGraph {
        nodes: alloc::vec![g0],
        node_of: HashMap::new(),
        succ: alloc::vec![Vec::new()],
        pred: alloc::vec![Vec::new()],
    };
    graph.node_of.insert(g0, 0);
    let mut next = 0;
    while next < graph.nodes.len() {
        let g = graph.nodes[next];
        for (t, label) in game.game().moves(g) {
            let t = *t as usize;
            if !region.attacker_wins(t) {
                continue;
            }
            let node = match graph.node_of.get(&t) {
                Some(&n) => n,
                None => {
                    let n = graph.nodes.len();
                    graph.nodes.push(t);
                    graph.node_of.insert(t, n);
                    graph.succ.push(Vec::new());
                    graph.pred.push(Vec::new());
                    n
                }
            };
            graph.succ[next].push((label.clone(), node));
            if !graph.pred[node].contains(&next) {
                graph.pred[node].push(next);
            }
        }
        next += 1;
    }
    Ok(graph)
}

/// A formula together with its price inside contexts (`expr`) and its
/// standalone price.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub formula: Formula,
    pub expr: Price,
    pub price: Price,
}

impl Candidate {
    pub fn new(formula: Formula) -> Candidate {
        let expr = crate::pricing::expr(&formula);
        let price = standalone_price(&formula);
        Candidate { formula, expr, price }
    }

    fn observe(&self, a: crate::process::Action) -> Candidate {
        let expr = obs_expr(&self.expr, &self.price);
        Candidate {
            formula: Formula::obs(a, self.formula.clone()),
            expr,
            price: expr,
        }
    }

    fn negate(&self) -> Candidate {
        let expr = neg_expr(&self.expr);
        Candidate {
            formula: Formula::neg(self.formula.clone()),
            expr,
            price: neg_hat_expr(&expr),
        }
    }

    fn is_double_negation(&self) -> bool {
        matches!(&self.formula, Formula::Neg(b) if b.is_neg())
    }
}

/// Drops double negations, then every formula for which a strictly cheaper
/// one of the same shape exists: observations only yield to observations,
/// negations only to negations, conjunctions to anything.
///
/// Dominators are taken from the formulas without double negation, since
/// the double negations themselves do not survive.
pub fn prune_candidates(cands: Vec<Candidate>) -> Vec<Candidate> {
    let base: Vec<Candidate> = cands.into_iter().filter(|c| !c.is_double_negation()).collect();
    let keep: Vec<bool> = base
        .iter()
        .map(|phi| {
            !base.iter().any(|psi| {
                psi.price.lt(&phi.price)
                    && (!phi.formula.is_obs() || psi.formula.is_obs())
                    && (!phi.formula.is_neg() || psi.formula.is_neg())
            })
        })
        .collect();
    base.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

/// [`prune_candidates`] on plain formulas.
pub fn prune_dominated(formulas: &[Formula]) -> Vec<Formula> {
    prune_candidates(formulas.iter().cloned().map(Candidate::new).collect())
        .into_iter()
        .map(|c| c.formula)
        .collect()
}

fn normalize(mut v: Vec<Candidate>) -> Vec<Candidate> {
    v.sort_by(|a, b| a.formula.cmp(&b.formula));
    v.dedup_by(|a, b| a.formula == b.formula);
    v
}

/// A partially chosen conjunction at a defender position.
#[derive(Clone)]
struct Partial {
    conjuncts: Vec<Formula>,
    positive: Vec<Formula>,
    price: ConjPrice,
}

impl Partial {
    fn with(&self, c: &Candidate) -> Partial {
        if self.conjuncts.contains(&c.formula) {
            return self.clone();
        }
        let mut next = self.clone();
        let kind = ConjunctKind::of(&c.formula);
        next.price.push(kind, &c.expr);
        next.conjuncts.push(c.formula.clone());
        if kind != ConjunctKind::Negation {
            let at = next.positive.binary_search(&c.formula).unwrap_err();
            next.positive.insert(at, c.formula.clone());
        }
        next
    }

    /// Every extension of `self` costs at least as much as the same
    /// extension of `other`.
    fn covered_by(&self, other: &Partial) -> bool {
        other.price.conjunct_join().leq(self.price.conjunct_join())
            && other.price.conj_depth() <= self.price.conj_depth()
            && other.positive.iter().all(|f| self.positive.binary_search(f).is_ok())
    }
}

fn prune_partials(partials: Vec<Partial>) -> Vec<Partial> {
    let mut kept: Vec<Partial> = Vec::with_capacity(partials.len());
    'outer: for (i, a) in partials.iter().enumerate() {
        for (j, b) in partials.iter().enumerate() {
            if i == j || !a.covered_by(b) {
                continue;
            }
            // mutual coverage keeps the first of the two
            if !b.covered_by(a) || j < i {
                continue 'outer;
            }
        }
        kept.push(a.clone());
    }
    kept
}

/// Tunables of [`spectroscope`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectroscopyConfig {
    pub game: GameConfig,
    /// Upper bound on the standalone price of every formula kept. `None`
    /// uses twice the number of strategy-graph nodes on every dimension.
    pub cap: Option<Price>,
    /// Report 3-nested simulation as well.
    pub with_s3: bool,
    /// Re-check every stored formula against the transition system.
    pub check_soundness: bool,
}

impl Default for SpectroscopyConfig {
    fn default() -> Self {
        SpectroscopyConfig {
            game: GameConfig::default(),
            cap: None,
            with_s3: false,
            check_soundness: cfg!(debug_assertions),
        }
    }
}

/// Results for one comparison direction.
#[derive(Clone, Debug)]
pub struct Direction {
    pub from: StateId,
    pub to: StateId,
    /// Every formula stored at `[from,{to}]`.
    pub formulas: Vec<Formula>,
    /// Pareto front of their standalone prices with one witness each.
    pub front: Vec<(Price, Formula)>,
    pub verdict: Verdict,
}

/// The outcome of [`spectroscope`].
#[derive(Clone, Debug)]
pub struct Spectroscopy {
    pub game: SpectroscopyGame,
    pub region: WinningRegion,
    pub graph: Option<StrategyGraph>,
    strats: Vec<Option<Vec<Candidate>>>,
    pub forward: Direction,
    pub backward: Direction,
    /// Present when the initial position is defender-won.
    pub bisimulation: Option<Vec<(StateId, StateId)>>,
    pub cap: Price,
    /// Whether the cap removed any formula.
    pub cap_filtered: bool,
    /// Number of worklist iterations.
    pub iterations: usize,
    pub with_s3: bool,
}

impl Spectroscopy {
    pub fn is_bisimilar(&self) -> bool {
        self.bisimulation.is_some()
    }

    /// Formulas stored for a game position, if it is in the strategy graph.
    pub fn strats_at(&self, g: usize) -> Option<&[Candidate]> {
        let node = self.graph.as_ref()?.node(g)?;
        self.strats[node].as_deref()
    }

    /// Notions that preorder in both directions.
    pub fn equivalences_holding(&self) -> Vec<Notion> {
        reporting_set(self.with_s3)
            .into_iter()
            .filter(|x| self.forward.verdict.preordered.contains(x) && self.backward.verdict.preordered.contains(x))
            .collect()
    }
}

struct Fixpoint<'a> {
    lts: &'a Lts,
    game: &'a SpectroscopyGame,
    graph: &'a StrategyGraph,
    strats: Vec<Option<Vec<Candidate>>>,
    cap: Price,
    cap_filtered: bool,
}

impl Fixpoint<'_> {
    fn set(&self, node: usize) -> &[Candidate] {
        self.strats[node].as_deref().unwrap_or(&[])
    }

    /// Next tentative formulas of a node from its successors' sets.
    fn step(&mut self, node: usize) -> Vec<Candidate> {
        let pos = self.game.position(self.graph.position(node));
        let mut out = Vec::new();
        match pos {
            SpecPosition::Defender { .. } => {
                let mut partials = alloc::vec![Partial {
                    conjuncts: Vec::new(),
                    positive: Vec::new(),
                    price: ConjPrice::new(),
                }];
                for (_, succ) in self.graph.successors(node) {
                    let mut next = Vec::new();
                    for part in &partials {
                        for c in self.set(*succ) {
                            next.push(part.with(c));
                        }
                    }
                    next.retain(|p| {
                        let ok = p.price.finish().leq(&self.cap);
                        self.cap_filtered |= !ok;
                        ok
                    });
                    partials = prune_partials(next);
                }
                for mut p in partials {
                    // equal answers to all blocks leave a single conjunct
                    if p.conjuncts.len() == 1 {
                        out.push(Candidate::new(p.conjuncts.pop().unwrap()));
                        continue;
                    }
                    let expr = p.price.finish();
                    out.push(Candidate {
                        formula: Formula::conj(p.conjuncts),
                        expr,
                        price: expr,
                    });
                }
            }
            _ => {
                let mut filtered = false;
                for (label, succ) in self.graph.successors(node) {
                    for c in self.set(*succ) {
                        let next = match label {
                            MoveLabel::Obs(a) => c.observe(a.clone()),
                            MoveLabel::Neg => c.negate(),
                            MoveLabel::Conj => c.clone(),
                            MoveLabel::Star => unreachable!("conjunct answers belong to the defender"),
                        };
                        if next.price.leq(&self.cap) {
                            out.push(next);
                        } else {
                            filtered = true;
                        }
                    }
                }
                self.cap_filtered |= filtered;
            }
        }
        normalize(out)
    }

    fn update(&mut self, node: usize) -> Vec<Candidate> {
        let next = self.step(node);
        normalize(prune_candidates(next))
    }

    fn run(&mut self, root: usize) -> usize {
        let n = self.graph.num_nodes();
        let mut todo: VecDeque<usize> = VecDeque::new();
        let mut queued = alloc::vec![false; n];
        todo.push_back(root);
        queued[root] = true;
        let mut iterations = 0;
        loop {
            while let Some(g) = todo.pop_front() {
                iterations += 1;
                queued[g] = false;
                if self.strats[g].is_none() {
                    self.strats[g] = Some(Vec::new());
                }
                let mut undefined: Vec<usize> = self
                    .graph
                    .successors(g)
                    .iter()
                    .map(|&(_, t)| t)
                    .filter(|&t| self.strats[t].is_none())
                    .collect();
                undefined.dedup();
                if undefined.is_empty() {
                    let next = self.update(g);
                    if self.strats[g].as_ref() != Some(&next) {
                        self.strats[g] = Some(next);
                        for &p in self.graph.predecessors(g) {
                            if !queued[p] {
                                queued[p] = true;
                                todo.push_back(p);
                            }
                        }
                    }
                } else {
                    for &t in undefined.iter().rev() {
                        if !queued[t] {
                            queued[t] = true;
                            todo.push_front(t);
                        }
                    }
                }
            }
            // A position whose successors were unexplored when it was visited
            // is revisited only if a successor's set changes afterwards; make
            // sure every node has really reached its fixed point.
            let stale: Vec<usize> = (0..n)
                .filter(|&g| match &self.strats[g] {
                    None => true,
                    Some(cur) => {
                        let cur = cur.clone();
                        self.graph.successors(g).iter().all(|&(_, t)| self.strats[t].is_some()) && self.update(g) != cur
                    }
                })
                .collect();
            if stale.is_empty() {
                return iterations;
            }
            for g in stale {
                queued[g] = true;
                todo.push_back(g);
            }
        }
    }

    fn check_soundness(&self) {
        for node in 0..self.graph.num_nodes() {
            let pos = self.game.position(self.graph.position(node));
            if let Some(q) = pos.attacked_set() {
                for c in self.set(node) {
                    assert!(
                        distinguishes(self.lts, &c.formula, pos.state(), q),
                        "stored formula {} does not distinguish {}",
                        c.formula,
                        pos.describe(self.lts)
                    );
                }
            }
        }
    }
}

fn direction(from: StateId, to: StateId, formulas: Vec<Formula>, with_s3: bool) -> Direction {
    let front = minimal_prices(formulas.iter());
    let prices: Vec<Price> = front.iter().map(|(p, _)| *p).collect();
    Direction {
        from,
        to,
        verdict: classify(&prices, with_s3),
        formulas,
        front,
    }
}

/// Strategy graph and final formula sets for an attacker-won initial
/// position.
struct Solved {
    graph: StrategyGraph,
    strats: Vec<Option<Vec<Candidate>>>,
    cap: Price,
    cap_filtered: bool,
    iterations: usize,
}

impl Solved {
    fn formulas_at(&self, g: usize) -> Vec<Formula> {
        self.graph
            .node(g)
            .and_then(|n| self.strats[n].as_ref())
            .map(|set| set.iter().map(|c| c.formula.clone()).collect())
            .unwrap_or_default()
    }
}

fn solve_from(lts: &Lts, game: &SpectroscopyGame, region: &WinningRegion, config: &SpectroscopyConfig) -> Solved {
    let graph = winning_strategy_graph(game, region, game.initial()).expect("initial position is attacker-won");
    let cap = config.cap.unwrap_or_else(|| {
        let n = (2 * graph.num_nodes()) as u32;
        Price([n; 6])
    });
    let mut fp = Fixpoint {
        lts,
        game,
        graph: &graph,
        strats: alloc::vec![None; graph.num_nodes()],
        cap,
        cap_filtered: false,
    };
    let iterations = fp.run(0);
    if config.check_soundness {
        fp.check_soundness();
    }
    let (strats, cap_filtered) = (fp.strats, fp.cap_filtered);
    Solved {
        graph,
        strats,
        cap,
        cap_filtered,
        iterations,
    }
}

/// Computes the cheapest formulas distinguishing `p0` from `q0` and `q0`
/// from `p0`, or a bisimulation relating them.
pub fn spectroscope(lts: &Lts, p0: StateId, q0: StateId, config: SpectroscopyConfig) -> Spectroscopy {
    let game = build_pair_game(lts, p0, q0, config.game);
    let region = game.solve();
    let g0 = game.initial();
    // the backward position is always reachable through the negation move
    let g1 = game.find_pair(q0, p0).expect("negation move target");

    if region.defender_wins(g0) {
        let rel = extract_bisimulation(&game, &region);
        return Spectroscopy {
            forward: direction(p0, q0, Vec::new(), config.with_s3),
            backward: direction(q0, p0, Vec::new(), config.with_s3),
            game,
            region,
            graph: None,
            strats: Vec::new(),
            bisimulation: Some(rel),
            cap: config.cap.unwrap_or(Price::ZERO),
            cap_filtered: false,
            iterations: 0,
            with_s3: config.with_s3,
        };
    }

    let solved = solve_from(lts, &game, &region, &config);
    let forward = direction(p0, q0, solved.formulas_at(g0), config.with_s3);
    let backward = direction(q0, p0, solved.formulas_at(g1), config.with_s3);
    Spectroscopy {
        game,
        region,
        graph: Some(solved.graph),
        strats: solved.strats,
        forward,
        backward,
        bisimulation: None,
        cap: solved.cap,
        cap_filtered: solved.cap_filtered,
        iterations: solved.iterations,
        with_s3: config.with_s3,
    }
}

/// The outcome of [`distinguish_set`].
#[derive(Clone, Debug)]
pub struct SetDistinction {
    pub game: SpectroscopyGame,
    pub region: WinningRegion,
    pub graph: Option<StrategyGraph>,
    strats: Vec<Option<Vec<Candidate>>>,
    /// Every formula stored at `[p0,Q0]`; empty if the defender wins.
    pub formulas: Vec<Formula>,
    pub front: Vec<(Price, Formula)>,
    pub cap: Price,
    pub cap_filtered: bool,
}

impl SetDistinction {
    /// Formulas stored for a game position, if it is in the strategy graph.
    pub fn strats_at(&self, g: usize) -> Option<&[Candidate]> {
        let node = self.graph.as_ref()?.node(g)?;
        self.strats[node].as_deref()
    }
}

/// Computes the cheapest formulas distinguishing `p0` from every member of
/// `q0`.
pub fn distinguish_set(lts: &Lts, p0: StateId, q0: &StateSet, config: SpectroscopyConfig) -> SetDistinction {
    let game = build_game(lts, p0, q0, config.game);
    let region = game.solve();
    let g0 = game.initial();
    if region.defender_wins(g0) {
        return SetDistinction {
            game,
            region,
            graph: None,
            strats: Vec::new(),
            formulas: Vec::new(),
            front: Vec::new(),
            cap: config.cap.unwrap_or(Price::ZERO),
            cap_filtered: false,
        };
    }
    let solved = solve_from(lts, &game, &region, &config);
    let formulas = solved.formulas_at(g0);
    SetDistinction {
        front: minimal_prices(formulas.iter()),
        formulas,
        game,
        region,
        graph: Some(solved.graph),
        strats: solved.strats,
        cap: solved.cap,
        cap_filtered: solved.cap_filtered,
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

    fn run(src: &str, p: &str, q: &str) -> (Lts, Spectroscopy) {
        let defs = parse(src).unwrap();
        let lts = derive_lts(&defs, &[p, q]).unwrap();
        let (sp, sq) = (lts.root(p).unwrap(), lts.root(q).unwrap());
        let s = spectroscope(&lts, sp, sq, SpectroscopyConfig::default());
        (lts, s)
    }

    fn prices(front: &[(Price, Formula)]) -> Vec<Price> {
        front.iter().map(|(p, _)| *p).collect()
    }

    #[test]
    fn prune_examples() {
        let kept = prune_dominated(&[f("!!<a><a>"), f("<a><a>")]);
        assert_eq!(kept, alloc::vec![f("<a><a>")]);
        let both = [f("<b>!<b>"), f("!<b><b>")];
        assert_eq!(prune_dominated(&both).len(), 2);
        assert_eq!(prune_dominated(&[f("<b>")]), alloc::vec![f("<b>")]);
        let big = f("/\\{!<a>, <b>!<b>, <b>}");
        let small = f("/\\{!<a>, <b>!<b>}");
        assert_eq!(standalone_price(&big), Price([2, 2, 1, 2, 1, 1]));
        assert_eq!(standalone_price(&small), Price([2, 2, 1, 1, 1, 1]));
        let a = crate::process::Action::new("a");
        assert_eq!(
            standalone_price(&Formula::obs(a.clone(), big.clone())),
            Price([3, 2, 1, 2, 1, 1])
        );
        assert_eq!(
            standalone_price(&Formula::obs(a, small.clone())),
            Price([3, 2, 1, 1, 1, 1])
        );
        let pruned = prune_dominated(&[big, small.clone()]);
        assert_eq!(pruned, alloc::vec![small]);
    }

    #[test]
    fn failure_row() {
        let (lts, s) = run("P = a.b + a\nQ = a.b\n", "P", "Q");
        assert!(!s.is_bisimilar());
        assert!(s.forward.formulas.contains(&f("<a>!<b>")));
        let _ = lts;
        assert!(s.forward.verdict.distinguished.contains(&Notion::Failures));
    }

    #[test]
    fn example_4_6() {
        let (_, s) = run("L = a.b\nR = a.(a + b) + a.b.b + a\n", "L", "R");
        let ps = prices(&s.forward.front);
        assert!(ps.contains(&Price([3, 2, 1, 1, 1, 1])), "{ps:?}");
        assert!(ps.contains(&Price([2, 1, 0, 0, 1, 2])), "{ps:?}");
        assert!(!s.cap_filtered);
    }

    #[test]
    fn identical_states() {
        let (lts, s) = run("P = a.(b + c)\n", "P", "P");
        assert!(s.is_bisimilar());
        let p = lts.root("P").unwrap();
        assert!(s.bisimulation.as_ref().unwrap().contains(&(p, p)));
        assert!(s.forward.front.is_empty());
    }

    #[test]
    fn p3_p4_trio() {
        let (_, s) = run(
            "P3 = a.(b + c.d) + a.(f + c.e)\nP4 = a.(b + c.e) + a.(f + c.d)\n",
            "P3",
            "P4",
        );
        let ps = prices(&s.forward.front);
        for p in [
            Price([3, 1, 1, 2, 0, 0]),
            Price([3, 1, 1, 1, 1, 1]),
            Price([3, 1, 0, 0, 1, 2]),
        ] {
            assert!(ps.contains(&p), "{p:?} missing from {ps:?}");
        }
    }

    #[test]
    fn stuck_defender_carries_top() {
        let lts = Lts::from_transitions(2, [(0, "a", 1)]).unwrap();
        let s = spectroscope(&lts, StateId(0), StateId(1), SpectroscopyConfig::default());
        assert_eq!(s.forward.formulas, alloc::vec![f("<a>")]);
        let g = s
            .game
            .find(&SpecPosition::Defender {
                p: StateId(1),
                parts: Vec::new(),
            })
            .unwrap();
        assert_eq!(s.strats_at(g).unwrap()[0].formula, Formula::top());
        assert_eq!(s.backward.formulas, alloc::vec![f("!<a>")]);
    }
}
