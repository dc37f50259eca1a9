//! Reachability games and their linear-time solution.
//!
//! The attacker wins a play by reaching a position where the defender is
//! stuck; the defender wins if the attacker gets stuck or the play is
//! infinite.

use alloc::vec::Vec;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Player {
    Attacker,
    Defender,
}

/// A finite game graph with successor and predecessor lists in compressed
/// form. `L` is the move label type.
#[derive(Clone, Debug)]
pub struct ReachabilityGame<L = ()> {
    owner: Vec<Player>,
    succ_start: Vec<u32>,
    succ: Vec<(u32, L)>,
    pred_start: Vec<u32>,
    pred: Vec<u32>,
    initial: Option<usize>,
}

/// Incremental construction of a [`ReachabilityGame`].
#[derive(Clone, Debug)]
pub struct GameBuilder<L = ()> {
    owner: Vec<Player>,
    edges: Vec<(u32, u32, L)>,
    initial: Option<usize>,
}

impl<L> Default for GameBuilder<L> {
    fn default() -> Self {
        GameBuilder {
            owner: Vec::new(),
            edges: Vec::new(),
            initial: None,
        }
    }
}

impl<L: Clone> GameBuilder<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_position(&mut self, owner: Player) -> usize {
        self.owner.push(owner);
        self.owner.len() - 1
    }

    pub fn num_positions(&self) -> usize {
        self.owner.len()
    }

    /// Adds a move. Parallel moves between the same positions are kept.
    pub fn add_move(&mut self, from: usize, to: usize, label: L) {
        assert!(
            from < self.owner.len() && to < self.owner.len(),
            "move endpoint out of range"
        );
        self.edges.push((from as u32, to as u32, label));
    }

    pub fn set_initial(&mut self, g: usize) {
        assert!(g < self.owner.len());
        self.initial = Some(g);
    }

    pub fn build(self) -> ReachabilityGame<L> {
        let n = self.owner.len();
        let mut out_deg = alloc::vec![0u32; n + 1];
        let mut in_deg = alloc::vec![0u32; n + 1];
        for &(s, t, _) in &self.edges {
            out_deg[s as usize + 1] += 1;
            in_deg[t as usize + 1] += 1;
        }
        for i in 0..n {
            out_deg[i + 1] += out_deg[i];
            in_deg[i + 1] += in_deg[i];
        }
        // stable placement keeps moves in insertion order per source
        let mut edges = self.edges;
        edges.sort_by_key(|&(s, _, _)| s);
        let mut pred = alloc::vec![0u32; edges.len()];
        let mut fill = in_deg.clone();
        for &(s, t, _) in &edges {
            pred[fill[t as usize] as usize] = s;
            fill[t as usize] += 1;
        }
        let succ = edges.into_iter().map(|(_, t, l)| (t, l)).collect();
        ReachabilityGame {
            owner: self.owner,
            succ_start: out_deg,
            succ,
            pred_start: in_deg,
            pred,
            initial: self.initial,
        }
    }
}

impl<L> ReachabilityGame<L> {
    pub fn num_positions(&self) -> usize {
        self.owner.len()
    }

    pub fn num_moves(&self) -> usize {
        self.succ.len()
    }

    pub fn owner(&self, g: usize) -> Player {
        self.owner[g]
    }

    pub fn initial(&self) -> Option<usize> {
        self.initial
    }

    /// Outgoing moves of `g` as `(target, label)` in insertion order.
    pub fn moves(&self, g: usize) -> &[(u32, L)] {
        &self.succ[self.succ_start[g] as usize..self.succ_start[g + 1] as usize]
    }

    pub fn successors(&self, g: usize) -> impl Iterator<Item = usize> + '_ {
        self.moves(g).iter().map(|&(t, _)| t as usize)
    }

    /// Sources of moves into `g`, one entry per move.
    pub fn predecessors(&self, g: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred[self.pred_start[g] as usize..self.pred_start[g + 1] as usize]
            .iter()
            .map(|&s| s as usize)
    }

    pub fn out_degree(&self, g: usize) -> usize {
        (self.succ_start[g + 1] - self.succ_start[g]) as usize
    }
}

/// The attacker winning region of a game; the defender wins everywhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegion {
    attacker_win: Vec<bool>,
    /// Number of defender-option decrements performed while solving.
    pub decrements: usize,
}

impl WinningRegion {
    pub fn attacker_wins(&self, g: usize) -> bool {
        self.attacker_win[g]
    }

    pub fn defender_wins(&self, g: usize) -> bool {
        !self.attacker_win[g]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.attacker_win
    }

    pub fn attacker_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.attacker_win.iter().enumerate().filter(|(_, &w)| w).map(|(g, _)| g)
    }
}

/// Computes the attacker winning region in time linear in the number of
/// moves.
///
/// Starting from stuck defender positions, wins are propagated backwards:
/// an attacker position is won as soon as one successor is won, a defender
/// position once its last remaining option is won.
pub fn compute_winning_region<L>(game: &ReachabilityGame<L>) -> WinningRegion {
    let n = game.num_positions();
    let mut options: Vec<u32> = (0..n).map(|g| game.out_degree(g) as u32).collect();
    let mut win = alloc::vec![false; n];
    let mut decrements = 0;
    let mut stack = Vec::new();
    for g in 0..n {
        if game.owner(g) == Player::Defender && options[g] == 0 {
            win[g] = true;
            stack.push(g);
        }
    }
    while let Some(g) = stack.pop() {
        for p in game.predecessors(g) {
            if win[p] {
                continue;
            }
            match game.owner(p) {
                Player::Attacker => {
                    win[p] = true;
                    stack.push(p);
                }
                Player::Defender => {
                    options[p] -= 1;
                    decrements += 1;
                    if options[p] == 0 {
                        win[p] = true;
                        stack.push(p);
                    }
                }
            }
        }
    }
    WinningRegion {
        attacker_win: win,
        decrements,
    }
}
