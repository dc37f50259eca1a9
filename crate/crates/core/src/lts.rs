//! Finite labeled transition systems and their derivation from process terms.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::process::{Action, ProcessDefinitions, ProcessName, ProcessTerm};

/// Index of a state in an [`Lts`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for StateId {
    fn from(i: usize) -> StateId {
        StateId(i as u32)
    }
}

/// A finite set of states, kept sorted and duplicate free.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn new() -> StateSet {
        StateSet(Vec::new())
    }

    pub fn singleton(s: StateId) -> StateSet {
        StateSet(alloc::vec![s])
    }

    /// Builds a set from an already sorted, duplicate-free vector.
    pub(crate) fn from_sorted(v: Vec<StateId>) -> StateSet {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        StateSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.iter().all(|&s| other.contains(s))
    }

    /// The single element, if there is exactly one.
    pub fn as_singleton(&self) -> Option<StateId> {
        match self.0.as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> StateSet {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter().map(|s| s.0)).finish()
    }
}

#[derive(Clone, Debug)]
struct State {
    label: String,
    term: Option<ProcessTerm>,
}

/// A labeled transition system.
///
/// Actions are stored once in a sorted alphabet and referred to by index in
/// the successor lists.
#[derive(Clone, Debug)]
pub struct Lts {
    states: Vec<State>,
    actions: Vec<Action>,
    succ: Vec<Vec<(usize, StateId)>>,
    roots: Vec<(ProcessName, StateId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LtsError {
    #[error("process `{0}` is not defined")]
    UnknownProcess(String),
    #[error("transition references state {0}, but there are only {1} states")]
    StateOutOfRange(usize, usize),
    #[error("invalid action name `{0}`")]
    InvalidAction(String),
}

impl Lts {
    /// Builds an LTS over states `0..n` from explicit transitions. States are
    /// labeled `s0`, `s1`, ...; the alphabet is the set of used actions.
    pub fn from_transitions<'a, I>(n: usize, transitions: I) -> Result<Lts, LtsError>
    where
        I: IntoIterator<Item = (usize, &'a str, usize)>,
    {
        let transitions: Vec<(usize, &str, usize)> = transitions.into_iter().collect();
        let mut names: Vec<&str> = Vec::new();
        for &(s, a, t) in &transitions {
            for x in [s, t] {
                if x >= n {
                    return Err(LtsError::StateOutOfRange(x, n));
                }
            }
            if !a.starts_with(|c: char| c.is_ascii_lowercase()) {
                return Err(LtsError::InvalidAction(a.to_string()));
            }
            names.push(a);
        }
        names.sort_unstable();
        names.dedup();
        let actions: Vec<Action> = names.iter().map(|a| Action::new(a)).collect();
        let mut succ = alloc::vec![Vec::new(); n];
        for (s, a, t) in transitions {
            let ai = names.binary_search(&a).unwrap();
            succ[s].push((ai, StateId::from(t)));
        }
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        let states = (0..n)
            .map(|i| State {
                label: alloc::format!("s{i}"),
                term: None,
            })
            .collect();
        Ok(Lts {
            states,
            actions,
            succ,
            roots: Vec::new(),
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId::from)
    }

    /// The sorted alphabet.
    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, index: usize) -> &Action {
        &self.actions[index]
    }

    pub fn action_index(&self, a: &Action) -> Option<usize> {
        self.actions.binary_search(a).ok()
    }

    /// Outgoing transitions of `s` as `(action index, target)`, sorted.
    pub fn successors(&self, s: StateId) -> &[(usize, StateId)] {
        &self.succ[s.index()]
    }

    /// All transitions as `(source, action, target)`.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &Action, StateId)> + '_ {
        self.states()
            .flat_map(move |s| self.succ[s.index()].iter().map(move |&(a, t)| (s, &self.actions[a], t)))
    }

    /// Human-readable name of a state: the root name or the canonical term.
    pub fn label(&self, s: StateId) -> &str {
        &self.states[s.index()].label
    }

    /// The canonical term of a state, when derived from process terms.
    pub fn term(&self, s: StateId) -> Option<&ProcessTerm> {
        self.states[s.index()].term.as_ref()
    }

    /// The state of a root process given to [`derive_lts`].
    pub fn root(&self, name: &str) -> Option<StateId> {
        self.roots.iter().find(|(n, _)| n.as_str() == name).map(|(_, s)| *s)
    }

    pub fn roots(&self) -> &[(ProcessName, StateId)] {
        &self.roots
    }

    /// Looks up a state by its label.
    pub fn state_by_label(&self, label: &str) -> Option<StateId> {
        self.states.iter().position(|st| st.label == label).map(StateId::from)
    }

    /// The `a`-successors of the members of `q`, with `a` given by index.
    pub fn post_set_index(&self, q: &StateSet, a: usize) -> StateSet {
        q.iter()
            .flat_map(|s| {
                self.succ[s.index()]
                    .iter()
                    .filter(move |&&(b, _)| b == a)
                    .map(|&(_, t)| t)
            })
            .collect()
    }

    /// The `a`-successors of the members of `q`.
    pub fn post_set(&self, q: &StateSet, a: &Action) -> StateSet {
        match self.action_index(a) {
            Some(i) => self.post_set_index(q, i),
            None => StateSet::new(),
        }
    }
}

/// Canonical form of a term: choices flattened, branches sorted and
/// duplicates removed, applied at every depth. References stay symbolic.
pub fn canonicalize(term: &ProcessTerm) -> ProcessTerm {
    match term {
        ProcessTerm::Nil | ProcessTerm::Reference(_) => term.clone(),
        ProcessTerm::Prefix(a, cont) => ProcessTerm::Prefix(a.clone(), Arc::new(canonicalize(cont))),
        ProcessTerm::Choice(bs) => {
            let mut flat = Vec::with_capacity(bs.len());
            for b in bs {
                match canonicalize(b) {
                    ProcessTerm::Choice(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            flat.sort();
            flat.dedup();
            ProcessTerm::choice(flat)
        }
    }
}

struct Deriver<'a> {
    defs: &'a ProcessDefinitions,
    canonical_defs: HashMap<ProcessName, ProcessTerm>,
}

impl Deriver<'_> {
    fn body(&mut self, name: &ProcessName) -> ProcessTerm {
        if let Some(t) = self.canonical_defs.get(name) {
            return t.clone();
        }
        let t = canonicalize(self.defs.get(name).expect("reference closure"));
        self.canonical_defs.insert(name.clone(), t.clone());
        t
    }

    /// Outgoing transitions of a canonical term. `unfolding` holds the names
    /// currently being unfolded; meeting one again means unguarded recursion,
    /// which contributes nothing.
    fn step(&mut self, term: &ProcessTerm, unfolding: &mut Vec<ProcessName>, out: &mut Vec<(Action, ProcessTerm)>) {
        match term {
            ProcessTerm::Nil => {}
            ProcessTerm::Prefix(a, cont) => out.push((a.clone(), (**cont).clone())),
            ProcessTerm::Choice(bs) => {
                for b in bs {
                    self.step(b, unfolding, out);
                }
            }
            ProcessTerm::Reference(n) => {
                if unfolding.contains(n) {
                    return;
                }
                let body = self.body(n);
                unfolding.push(n.clone());
                self.step(&body, unfolding, out);
                unfolding.pop();
            }
        }
    }
}

/// Derives the LTS of the states reachable from `roots`.
///
/// States are canonical terms; a root `P` is the state `Reference(P)` and is
/// labeled `P`. Other states are labeled with their printed term.
pub fn derive_lts(defs: &ProcessDefinitions, roots: &[&str]) -> Result<Lts, LtsError> {
    for r in roots {
        if !defs.contains(r) {
            return Err(LtsError::UnknownProcess((*r).to_string()));
        }
    }
    let actions = defs.actions();
    let mut d = Deriver {
        defs,
        canonical_defs: HashMap::new(),
    };
    let mut index: HashMap<ProcessTerm, StateId> = HashMap::new();
    let mut terms: Vec<ProcessTerm> = Vec::new();
    let mut root_ids = Vec::new();
    for r in roots {
        let t = ProcessTerm::Reference(ProcessName::new(r));
        let id = *index.entry(t.clone()).or_insert_with(|| {
            terms.push(t);
            StateId::from(terms.len() - 1)
        });
        root_ids.push((ProcessName::new(r), id));
    }
    let mut succ: Vec<Vec<(usize, StateId)>> = Vec::new();
    let mut next = 0;
    let mut buf = Vec::new();
    let mut unfolding = Vec::new();
    while next < terms.len() {
        let t = terms[next].clone();
        buf.clear();
        d.step(&t, &mut unfolding, &mut buf);
        let mut out = Vec::with_capacity(buf.len());
        for (a, target) in buf.drain(..) {
            let ai = actions.binary_search(&a).expect("action in alphabet");
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = StateId::from(terms.len());
                    index.insert(target.clone(), id);
                    terms.push(target);
                    id
                }
            };
            out.push((ai, id));
        }
        out.sort_unstable();
        out.dedup();
        succ.push(out);
        next += 1;
    }
    let states = terms
        .into_iter()
        .map(|t| State {
            label: alloc::format!("{t}"),
            term: Some(t),
        })
        .collect();
    Ok(Lts {
        states,
        actions,
        succ,
        roots: root_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::parse;
    use alloc::vec;

    const FIG1: &str = "P1 = a.(b + c) + a.d\nP2 = a.(b + d) + a.(c + d)\n";

    fn set(lts: &Lts, labels: &[&str]) -> StateSet {
        labels.iter().map(|l| lts.state_by_label(l).unwrap()).collect()
    }

    #[test]
    fn fig1_p1() {
        let defs = parse(FIG1).unwrap();
        let lts = derive_lts(&defs, &["P1"]).unwrap();
        let mut labels: Vec<&str> = lts.states().map(|s| lts.label(s)).collect();
        labels.sort();
        assert_eq!(labels, vec!["0", "P1", "b + c", "d"]);
        assert_eq!(lts.num_transitions(), 5);
        let mut ts: Vec<(String, String, String)> = lts
            .transitions()
            .map(|(s, a, t)| (lts.label(s).into(), a.name().into(), lts.label(t).into()))
            .collect();
        ts.sort();
        let expected: Vec<(String, String, String)> = [
            ("P1", "a", "b + c"),
            ("P1", "a", "d"),
            ("b + c", "b", "0"),
            ("b + c", "c", "0"),
            ("d", "d", "0"),
        ]
        .iter()
        .map(|(a, b, c)| ((*a).into(), (*b).into(), (*c).into()))
        .collect();
        assert_eq!(ts, expected);
    }

    #[test]
    fn recursion_gives_self_loop() {
        let defs = parse("X = a.X").unwrap();
        let lts = derive_lts(&defs, &["X"]).unwrap();
        assert_eq!(lts.num_states(), 1);
        let x = lts.root("X").unwrap();
        assert_eq!(lts.successors(x), &[(0, x)]);
    }

    #[test]
    fn nil_root() {
        let defs = parse("Z = 0").unwrap();
        let lts = derive_lts(&defs, &["Z"]).unwrap();
        assert_eq!(lts.num_states(), 1);
        assert_eq!(lts.num_transitions(), 0);
    }

    #[test]
    fn unguarded_recursion_is_stuck() {
        let defs = parse("X = X + a\nY = Z\nZ = Y").unwrap();
        let lts = derive_lts(&defs, &["X", "Y"]).unwrap();
        let x = lts.root("X").unwrap();
        assert_eq!(lts.successors(x).len(), 1);
        assert!(lts.successors(lts.root("Y").unwrap()).is_empty());
    }

    #[test]
    fn post_sets() {
        let defs = parse(FIG1).unwrap();
        let lts = derive_lts(&defs, &["P1", "P2"]).unwrap();
        let a = Action::new("a");
        let d = Action::new("d");
        let p2 = lts.root("P2").unwrap();
        assert_eq!(
            lts.post_set(&StateSet::singleton(p2), &a),
            set(&lts, &["b + d", "c + d"])
        );
        assert_eq!(lts.post_set(&StateSet::new(), &a), StateSet::new());
        assert_eq!(lts.post_set(&set(&lts, &["b + c", "d"]), &d), set(&lts, &["0"]));
    }

    #[test]
    fn equal_branches_share_a_state() {
        let defs = parse("P = a.(b + c) + a.(c + b)").unwrap();
        let lts = derive_lts(&defs, &["P"]).unwrap();
        assert_eq!(lts.num_states(), 3);
        assert_eq!(lts.num_transitions(), 3);
    }

    #[test]
    fn unknown_root() {
        let defs = parse("P = a").unwrap();
        assert_eq!(
            derive_lts(&defs, &["Q"]).unwrap_err(),
            LtsError::UnknownProcess("Q".into())
        );
    }

    #[test]
    fn explicit_builder() {
        let lts = Lts::from_transitions(3, [(0, "a", 1), (0, "a", 1), (1, "b", 2)]).unwrap();
        assert_eq!(lts.num_transitions(), 2);
        assert_eq!(lts.actions().len(), 2);
        assert!(Lts::from_transitions(2, [(0, "a", 2)]).is_err());
    }
}
