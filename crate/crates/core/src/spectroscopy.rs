//! The spectroscopy game: attacker positions `[p,Q]`, post-conjunction
//! attacker positions `[p,Q]^∧̸` and defender positions `⟨p,𝒬⟩` with moves
//! labeled by observations, conjunct challenges (`∧`), conjunct answers
//! (`*`) and negations (`¬`).

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use hashbrown::HashMap;

use crate::game::{compute_winning_region, GameBuilder, Player, ReachabilityGame, WinningRegion};
use crate::lts::{Lts, StateId, StateSet};
use crate::process::Action;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SpecPosition {
    Attacker {
        p: StateId,
        q: StateSet,
    },
    /// Reached by a conjunct answer; `q` has at least two elements.
    AttackerConj {
        p: StateId,
        q: StateSet,
    },
    /// Blocks are nonempty and pairwise disjoint.
    Defender {
        p: StateId,
        parts: Vec<StateSet>,
    },
}

impl SpecPosition {
    pub fn attacker(p: StateId, q: StateSet) -> SpecPosition {
        SpecPosition::Attacker { p, q }
    }

    pub fn state(&self) -> StateId {
        match self {
            SpecPosition::Attacker { p, .. }
            | SpecPosition::AttackerConj { p, .. }
            | SpecPosition::Defender { p, .. } => *p,
        }
    }

    pub fn owner(&self) -> Player {
        match self {
            SpecPosition::Defender { .. } => Player::Defender,
            _ => Player::Attacker,
        }
    }

    /// The set the attacker wants to distinguish `p` from, for attacker
    /// positions.
    pub fn attacked_set(&self) -> Option<&StateSet> {
        match self {
            SpecPosition::Attacker { q, .. } | SpecPosition::AttackerConj { q, .. } => Some(q),
            SpecPosition::Defender { .. } => None,
        }
    }

    /// Renders the position with state labels, e.g. `[b,{a + b,0}]`,
    /// `[b,{a + b,0}]^` or `<b,{{a + b},{0}}>`.
    pub fn describe(&self, lts: &Lts) -> String {
        let mut s = String::new();
        let set = |s: &mut String, q: &StateSet| {
            s.push('{');
            for (i, x) in q.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(lts.label(x));
            }
            s.push('}');
        };
        match self {
            SpecPosition::Attacker { p, q } | SpecPosition::AttackerConj { p, q } => {
                let _ = write!(s, "[{},", lts.label(*p));
                set(&mut s, q);
                s.push(']');
                if matches!(self, SpecPosition::AttackerConj { .. }) {
                    s.push('^');
                }
            }
            SpecPosition::Defender { p, parts } => {
                let _ = write!(s, "<{},{{", lts.label(*p));
                for (i, b) in parts.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    set(&mut s, b);
                }
                s.push_str("}>");
            }
        }
        s
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum MoveLabel {
    Obs(Action),
    Conj,
    Star,
    Neg,
}

impl fmt::Display for MoveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveLabel::Obs(a) => write!(f, "<{a}>"),
            MoveLabel::Conj => f.write_str("/\\"),
            MoveLabel::Star => f.write_str("*"),
            MoveLabel::Neg => f.write_str("!"),
        }
    }
}

/// Which conjunct challenges the attacker may pose.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ConjunctChallenges {
    /// Every nontrivial partition of `Q`.
    #[default]
    AllPartitions,
    /// Only the partition into singletons. This is the incomplete variant of
    /// the game and exists to demonstrate what it misses.
    FinestOnly,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct GameConfig {
    pub challenges: ConjunctChallenges,
}

/// All partitions of `q` except `{q}`, in restricted-growth-string order.
/// The empty set has exactly one partition, the empty one, and it counts as
/// nontrivial; singletons have none.
pub fn nontrivial_partitions(q: &StateSet) -> Vec<Vec<StateSet>> {
    let elems = q.as_slice();
    let n = elems.len();
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    // rgs[i] is the block index of elems[i]
    let mut rgs = alloc::vec![0usize; n];
    loop {
        let blocks = rgs.iter().copied().max().unwrap() + 1;
        if blocks > 1 {
            let mut parts = alloc::vec![Vec::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                parts[b].push(elems[i]);
            }
            out.push(parts.into_iter().map(StateSet::from_sorted).collect());
        }
        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in &mut rgs[i + 1..] {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// The partition of `q` into singletons, if it is nontrivial.
fn finest_partition(q: &StateSet) -> Vec<Vec<StateSet>> {
    match q.len() {
        1 => Vec::new(),
        _ => alloc::vec![q.iter().map(StateSet::singleton).collect()],
    }
}

/// The reachable part of a spectroscopy game.
#[derive(Clone, Debug)]
pub struct SpectroscopyGame {
    game: ReachabilityGame<MoveLabel>,
    positions: Vec<SpecPosition>,
    index: HashMap<SpecPosition, usize>,
}

impl SpectroscopyGame {
    pub fn game(&self) -> &ReachabilityGame<MoveLabel> {
        &self.game
    }

    pub fn num_positions(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, g: usize) -> &SpecPosition {
        &self.positions[g]
    }

    pub fn positions(&self) -> &[SpecPosition] {
        &self.positions
    }

    pub fn find(&self, pos: &SpecPosition) -> Option<usize> {
        self.index.get(pos).copied()
    }

    /// The position `[p,{q}]`, if reachable.
    pub fn find_pair(&self, p: StateId, q: StateId) -> Option<usize> {
        self.find(&SpecPosition::attacker(p, StateSet::singleton(q)))
    }

    pub fn initial(&self) -> usize {
        self.game.initial().expect("initial position")
    }

    pub fn solve(&self) -> WinningRegion {
        compute_winning_region(&self.game)
    }

    /// Number of conjunct-answer moves.
    pub fn num_conjunct_answers(&self) -> usize {
        (0..self.positions.len())
            .flat_map(|g| self.game.moves(g))
            .filter(|(_, l)| *l == MoveLabel::Star)
            .count()
    }
}

struct Construction {
    builder: GameBuilder<MoveLabel>,
    positions: Vec<SpecPosition>,
    index: HashMap<SpecPosition, usize>,
    todo: VecDeque<usize>,
}

impl Construction {
    fn intern(&mut self, pos: SpecPosition) -> usize {
        if let Some(&g) = self.index.get(&pos) {
            return g;
        }
        let g = self.builder.add_position(pos.owner());
        self.index.insert(pos.clone(), g);
        self.positions.push(pos);
        self.todo.push_back(g);
        g
    }
}

/// Builds the part of the spectroscopy game reachable from `[p0,Q0]`.
pub fn build_game(lts: &Lts, p0: StateId, q0: &StateSet, config: GameConfig) -> SpectroscopyGame {
    let mut c = Construction {
        builder: GameBuilder::new(),
        positions: Vec::new(),
        index: HashMap::new(),
        todo: VecDeque::new(),
    };
    let g0 = c.intern(SpecPosition::attacker(p0, q0.clone()));
    c.builder.set_initial(g0);
    let mut moves: Vec<(SpecPosition, MoveLabel)> = Vec::new();
    while let Some(g) = c.todo.pop_front() {
        moves.clear();
        match &c.positions[g] {
            SpecPosition::Attacker { p, q } | SpecPosition::AttackerConj { p, q } => {
                let (p, q) = (*p, q.clone());
                let mut last_action = None;
                let mut post = StateSet::new();
                for &(a, p2) in lts.successors(p) {
                    if last_action != Some(a) {
                        post = lts.post_set_index(&q, a);
                        last_action = Some(a);
                    }
                    moves.push((
                        SpecPosition::attacker(p2, post.clone()),
                        MoveLabel::Obs(lts.action(a).clone()),
                    ));
                }
                if matches!(c.positions[g], SpecPosition::Attacker { .. }) {
                    let partitions = match config.challenges {
                        ConjunctChallenges::AllPartitions => nontrivial_partitions(&q),
                        ConjunctChallenges::FinestOnly => finest_partition(&q),
                    };
                    for parts in partitions {
                        moves.push((SpecPosition::Defender { p, parts }, MoveLabel::Conj));
                    }
                    if let Some(q1) = q.as_singleton() {
                        moves.push((SpecPosition::attacker(q1, StateSet::singleton(p)), MoveLabel::Neg));
                    }
                }
            }
            SpecPosition::Defender { p, parts } => {
                for block in parts {
                    let target = if block.len() == 1 {
                        SpecPosition::attacker(*p, block.clone())
                    } else {
                        SpecPosition::AttackerConj {
                            p: *p,
                            q: block.clone(),
                        }
                    };
                    moves.push((target, MoveLabel::Star));
                }
            }
        }
        for (pos, label) in moves.drain(..) {
            let h = c.intern(pos);
            c.builder.add_move(g, h, label);
        }
    }
    SpectroscopyGame {
        game: c.builder.build(),
        positions: c.positions,
        index: c.index,
    }
}

/// Builds the game for comparing `p` with `q`; it also contains `[q,{p}]`.
pub fn build_pair_game(lts: &Lts, p: StateId, q: StateId, config: GameConfig) -> SpectroscopyGame {
    build_game(lts, p, &StateSet::singleton(q), config)
}

/// The pairs `(p,q)` whose position `[p,{q}]` occurs in the game and is won
/// by the defender, sorted.
pub fn extract_bisimulation(game: &SpectroscopyGame, region: &WinningRegion) -> Vec<(StateId, StateId)> {
    let mut rel: Vec<(StateId, StateId)> = game
        .positions
        .iter()
        .enumerate()
        .filter(|(g, _)| region.defender_wins(*g))
        .filter_map(|(_, pos)| match pos {
            SpecPosition::Attacker { p, q } => q.as_singleton().map(|q| (*p, q)),
            _ => None,
        })
        .collect();
    rel.sort_unstable();
    rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::derive_lts;
    use crate::process::parse;

    fn set(v: &[u32]) -> StateSet {
        v.iter().map(|&s| StateId(s)).collect()
    }

    #[test]
    fn partitions_of_small_sets() {
        assert_eq!(
            nontrivial_partitions(&set(&[1, 2])),
            alloc::vec![alloc::vec![set(&[1]), set(&[2])]]
        );
        assert_eq!(nontrivial_partitions(&set(&[1, 2, 3])).len(), 4);
        assert_eq!(nontrivial_partitions(&set(&[1, 2, 3, 4])).len(), 14);
        assert_eq!(nontrivial_partitions(&set(&[])), alloc::vec![Vec::<StateSet>::new()]);
        assert!(nontrivial_partitions(&set(&[7])).is_empty());
    }

    #[test]
    fn partitions_are_partitions() {
        let q = set(&[0, 1, 2, 3, 4]);
        let ps = nontrivial_partitions(&q);
        assert_eq!(ps.len(), 52 - 1);
        for parts in &ps {
            let mut all: Vec<StateId> = parts.iter().flat_map(|b| b.iter()).collect();
            all.sort();
            assert_eq!(all, q.as_slice());
            assert!(parts.iter().all(|b| !b.is_empty()));
        }
        let mut dedup = ps.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), ps.len());
    }

    fn fig3() -> (Lts, StateId, StateId) {
        let defs = parse("L = a.b\nR = a.(a + b) + a.b.b + a\n").unwrap();
        let lts = derive_lts(&defs, &["L", "R"]).unwrap();
        let l = lts.root("L").unwrap();
        let r = lts.root("R").unwrap();
        (lts, l, r)
    }

    #[test]
    fn fig3_conjunct_challenges() {
        let (lts, l, r) = fig3();
        let game = build_pair_game(&lts, l, r, GameConfig::default());
        let st = |label: &str| lts.state_by_label(label).unwrap();
        let pos = SpecPosition::attacker(st("b"), [st("a + b"), st("b.b"), st("0")].into_iter().collect());
        let g = game.find(&pos).expect("[b,{a+b,b.b,0}] reachable");
        let blocks = |parts: &[StateSet]| -> Vec<Vec<String>> {
            let mut v: Vec<Vec<String>> = parts
                .iter()
                .map(|b| {
                    let mut names: Vec<String> = b.iter().map(|s| lts.label(s).into()).collect();
                    names.sort();
                    names
                })
                .collect();
            v.sort();
            v
        };
        let mut conj: Vec<Vec<Vec<String>>> = game
            .game()
            .moves(g)
            .iter()
            .filter(|(_, l)| *l == MoveLabel::Conj)
            .map(|&(t, _)| match game.position(t as usize) {
                SpecPosition::Defender { p, parts } => {
                    assert_eq!(*p, st("b"));
                    blocks(parts)
                }
                _ => panic!("conjunct challenge to a non-defender position"),
            })
            .collect();
        conj.sort();
        let named = |bs: &[&[&str]]| -> Vec<Vec<String>> {
            let mut v: Vec<Vec<String>> = bs
                .iter()
                .map(|b| {
                    let mut x: Vec<String> = b.iter().map(|s| String::from(*s)).collect();
                    x.sort();
                    x
                })
                .collect();
            v.sort();
            v
        };
        let mut expected = alloc::vec![
            named(&[&["a + b"], &["b.b", "0"]]),
            named(&[&["a + b"], &["b.b"], &["0"]]),
            named(&[&["a + b", "b.b"], &["0"]]),
            named(&[&["a + b", "0"], &["b.b"]]),
        ];
        expected.sort();
        assert_eq!(conj, expected);
        let obs: Vec<String> = game
            .game()
            .moves(g)
            .iter()
            .filter(|(_, l)| matches!(l, MoveLabel::Obs(_)))
            .map(|&(t, _)| game.position(t as usize).describe(&lts))
            .collect();
        assert_eq!(obs, alloc::vec!["[0,{b,0}]"]);

        let w = game.solve();
        let zero = st("0");
        let g00 = game.find_pair(zero, zero).unwrap();
        assert!(w.defender_wins(g00));
        assert!(w.attacker_wins(g));
        assert!(w.attacker_wins(game.initial()));
    }

    #[test]
    fn empty_set_gives_stuck_defender() {
        let lts = Lts::from_transitions(1, []).unwrap();
        let game = build_game(&lts, StateId(0), &StateSet::new(), GameConfig::default());
        assert_eq!(game.num_positions(), 2);
        let w = game.solve();
        assert!(w.attacker_wins(0));
        assert!(w.attacker_wins(1));
    }

    #[test]
    fn negation_moves_only_from_singletons() {
        let (lts, l, r) = fig3();
        let game = build_pair_game(&lts, l, r, GameConfig::default());
        for g in 0..game.num_positions() {
            for (t, label) in game.game().moves(g) {
                if *label == MoveLabel::Neg {
                    let (SpecPosition::Attacker { p, q }, SpecPosition::Attacker { p: p2, q: q2 }) =
                        (game.position(g), game.position(*t as usize))
                    else {
                        panic!("negation between non-attacker positions");
                    };
                    assert_eq!(q.as_singleton(), Some(*p2));
                    assert_eq!(q2.as_singleton(), Some(*p));
                }
                if *label == MoveLabel::Conj {
                    assert!(game.position(g).attacked_set().unwrap().len() != 1);
                }
            }
        }
    }

    #[test]
    fn identical_processes_are_bisimilar() {
        let defs = parse("P = a.b\nQ = a.b\n").unwrap();
        let lts = derive_lts(&defs, &["P", "Q"]).unwrap();
        let p = lts.root("P").unwrap();
        let q = lts.root("Q").unwrap();
        let game = build_pair_game(&lts, p, q, GameConfig::default());
        let w = game.solve();
        assert!(w.defender_wins(game.initial()));
        let rel = extract_bisimulation(&game, &w);
        let b = lts.state_by_label("b").unwrap();
        let z = lts.state_by_label("0").unwrap();
        for pair in [(p, q), (q, p), (b, b), (z, z)] {
            assert!(rel.contains(&pair), "{pair:?}");
        }
    }
}
