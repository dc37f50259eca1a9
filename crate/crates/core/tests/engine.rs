use ltbt_core::game::{compute_winning_region, GameBuilder, Player};
use ltbt_core::hml::{distinguishes, Formula};
use ltbt_core::lts::{Lts, StateId, StateSet};
use ltbt_core::oracle::{bisimilar, naive_winning_region, EnumerationBudget, Kind, SignatureSpace};
use ltbt_core::pricing::{standalone_price, Price};
use ltbt_core::spectroscopy::{
    build_pair_game, extract_bisimulation, ConjunctChallenges, GameConfig, SpecPosition, SpectroscopyGame,
};
use ltbt_core::synthesis::{distinguish_set, spectroscope, Candidate, SpectroscopyConfig, StrategyGraph};
use proptest::prelude::*;

const CAP: Price = Price([3, 2, 2, 2, 2, 2]);

fn arb_lts() -> impl Strategy<Value = Lts> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..2usize, 0..n), 0..=6).prop_map(move |ts| {
            Lts::from_transitions(n, ts.into_iter().map(|(s, a, t)| (s, ["a", "b"][a], t))).unwrap()
        })
    })
}

fn arb_game() -> impl Strategy<Value = (Vec<bool>, Vec<(usize, usize)>)> {
    (1usize..=60).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((0..n, 0..n), 0..=3 * n),
        )
    })
}

fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row[0]
}

/// Checks that for every price of `oracle`, `found` has a price at most as
/// high.
fn covers(found: &[Price], oracle: &[(Price, Formula)]) -> Result<(), String> {
    for (m, witness) in oracle {
        if !found.iter().any(|p| p.leq(m)) {
            return Err(format!("nothing as cheap as {witness} {m} among {found:?}"));
        }
    }
    Ok(())
}

fn prices<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<Price> {
    fs.into_iter().map(standalone_price).collect()
}

fn hygiene(f: &Formula) -> bool {
    !f.has_double_negation() && !f.has_negated_conjunction() && !f.has_nested_conjunction()
}

/// The completeness claims at every position of a strategy graph.
fn check_claims<'a>(
    lts: &Lts,
    game: &SpectroscopyGame,
    graph: Option<&StrategyGraph>,
    strats_at: impl Fn(usize) -> Option<&'a [Candidate]>,
    space: &SignatureSpace,
) -> Result<(), String> {
    let graph = match graph {
        Some(g) => g,
        None => return Ok(()),
    };
    for node in 0..graph.num_nodes() {
        let g = graph.position(node);
        let pos = game.position(g);
        let stored: Vec<&Formula> = strats_at(g).unwrap_or(&[]).iter().map(|c| &c.formula).collect();
        for f in &stored {
            if !hygiene(f) {
                return Err(format!("malformed {f}"));
            }
        }
        match pos {
            SpecPosition::Attacker { p, q } => {
                covers(&prices(stored.iter().copied()), &space.front(*p, q))?;
                if q.len() == 1 {
                    let obs: Vec<Price> = prices(stored.iter().copied().filter(|f| f.is_obs()));
                    covers(&obs, &space.front_where(*p, q, Kind::is_obs))?;
                    let neg: Vec<Price> = prices(stored.iter().copied().filter(|f| f.is_neg()));
                    covers(&neg, &space.front_where(*p, q, |k| k == Kind::Neg))?;
                }
            }
            SpecPosition::AttackerConj { p, q } => {
                if stored.iter().any(|f| !f.is_obs()) {
                    return Err(format!("non-observation at {}", pos.describe(lts)));
                }
                covers(&prices(stored.iter().copied()), &space.front_where(*p, q, Kind::is_obs))?;
            }
            SpecPosition::Defender { .. } => {}
        }
    }
    Ok(())
}

fn capped_front(front: &[(Price, Formula)]) -> Vec<Price> {
    let mut v: Vec<Price> = front.iter().map(|(p, _)| *p).filter(|p| p.leq(&CAP)).collect();
    v.sort_by(|a, b| a.cmp_lex(b));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solver_matches_naive_fixed_point((owners, moves) in arb_game()) {
        let mut b = GameBuilder::<()>::new();
        for &d in &owners {
            b.add_position(if d { Player::Defender } else { Player::Attacker });
        }
        for &(s, t) in &moves {
            b.add_move(s, t, ());
        }
        let game = b.build();
        let region = compute_winning_region(&game);
        prop_assert_eq!(region.as_slice(), &naive_winning_region(&game)[..]);
        prop_assert!(region.decrements <= game.num_moves());
    }

    #[test]
    fn spectroscope_agrees_with_oracles(lts in arb_lts(), p in 0u32..4, q in 0u32..4) {
        let n = lts.num_states() as u32;
        let (p, q) = (StateId(p % n), StateId(q % n));
        let s = spectroscope(&lts, p, q, SpectroscopyConfig::default());
        let space = SignatureSpace::compute(&lts, &EnumerationBudget::for_lts(CAP, &lts));

        prop_assert_eq!(s.is_bisimilar(), bisimilar(&lts, p, q));
        for dir in [&s.forward, &s.backward] {
            let q = StateSet::singleton(dir.to);
            let oracle: Vec<Price> = capped_front(&space.front(dir.from, &q));
            prop_assert_eq!(capped_front(&dir.front), oracle, "{:?} vs {:?}", dir.from, dir.to);
            for f in &dir.formulas {
                prop_assert!(hygiene(f), "{}", f);
                prop_assert!(distinguishes(&lts, f, dir.from, &q), "{}", f);
            }
        }
        if let Err(e) = check_claims(&lts, &s.game, s.graph.as_ref(), |g| s.strats_at(g), &space) {
            return Err(TestCaseError::fail(e));
        }

        let k = lts.num_states();
        prop_assert!(s.game.num_conjunct_answers() as u64 <= (k * k) as u64 * bell(k + 1));
    }

    #[test]
    fn set_distinctions_agree_with_oracle(lts in arb_lts(), p in 0u32..4, mask in 0u32..16) {
        let n = lts.num_states() as u32;
        let p = StateId(p % n);
        let q: StateSet = (0..n).filter(|i| mask & (1 << i) != 0).map(StateId).collect();
        let d = distinguish_set(&lts, p, &q, SpectroscopyConfig::default());
        let space = SignatureSpace::compute(&lts, &EnumerationBudget::for_lts(CAP, &lts));
        prop_assert_eq!(capped_front(&d.front), capped_front(&space.front(p, &q)));
        prop_assert_eq!(d.graph.is_none(), q.iter().any(|s| bisimilar(&lts, p, s)));
        if let Err(e) = check_claims(&lts, &d.game, d.graph.as_ref(), |g| d.strats_at(g), &space) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn extracted_relations_are_bisimulations(lts in arb_lts(), p in 0u32..4, q in 0u32..4) {
        let n = lts.num_states() as u32;
        let (p, q) = (StateId(p % n), StateId(q % n));
        let game = build_pair_game(&lts, p, q, GameConfig::default());
        let region = game.solve();
        let defender = region.defender_wins(game.initial());
        prop_assert_eq!(defender, bisimilar(&lts, p, q));
        if defender {
            let rel = extract_bisimulation(&game, &region);
            prop_assert!(rel.contains(&(p, q)));
            for &(x, y) in &rel {
                prop_assert!(rel.contains(&(y, x)));
                for &(a, x2) in lts.successors(x) {
                    let answered = lts
                        .successors(y)
                        .iter()
                        .any(|&(b, y2)| a == b && rel.contains(&(x2, y2)));
                    prop_assert!(answered, "{:?} -{}-> {:?} unanswered by {:?}", x, a, x2, y);
                }
            }
        }
    }
}

#[test]
fn negation_targets_are_singleton_attacker_positions() {
    let lts = Lts::from_transitions(4, [(0, "a", 1), (0, "a", 2), (1, "b", 3), (2, "a", 3), (3, "b", 0)]).unwrap();
    let game = build_pair_game(&lts, StateId(0), StateId(3), GameConfig::default());
    for g in 0..game.num_positions() {
        for (t, label) in game.game().moves(g) {
            if label.to_string() == "!" {
                let target = game.position(*t as usize);
                assert!(matches!(target, SpecPosition::Attacker { q, .. } if q.len() == 1));
            }
        }
    }
}

/// States `b`, `a+b`, `b.b` and `0`: telling `b` apart from the other three
/// at minimal price needs a conjunct challenge that groups `b.b` with `0`.
#[test]
fn coarse_partitions_are_needed_for_minimal_prices() {
    let lts = Lts::from_transitions(4, [(0, "b", 3), (1, "a", 3), (1, "b", 3), (2, "b", 0)]).unwrap();
    let q: StateSet = [1, 2, 3].into_iter().map(StateId).collect();
    let space = SignatureSpace::compute(&lts, &EnumerationBudget::for_lts(CAP, &lts));
    let oracle = capped_front(&space.front(StateId(0), &q));
    assert!(oracle.contains(&Price([2, 2, 1, 1, 1, 1])), "{oracle:?}");

    let full = distinguish_set(&lts, StateId(0), &q, SpectroscopyConfig::default());
    assert_eq!(capped_front(&full.front), oracle);

    let finest = SpectroscopyConfig {
        game: GameConfig {
            challenges: ConjunctChallenges::FinestOnly,
        },
        ..SpectroscopyConfig::default()
    };
    let restricted = distinguish_set(&lts, StateId(0), &q, finest);
    assert_ne!(capped_front(&restricted.front), oracle);
}
