//! Cross-checking the spectroscopy against the brute-force oracle.

use std::fmt::Write as _;

use ltbt_core::oracle::{EnumerationBudget, SignatureSpace};
use ltbt_core::synthesis::{spectroscope, SpectroscopyConfig};
use ltbt_core::{Formula, Price, StateSet};

use crate::{Error, Loaded};

/// The oracle handles at most this many states.
pub const MAX_STATES: usize = 64;

#[derive(Clone, Debug)]
pub struct DirectionCheck {
    pub from: String,
    pub to: String,
    /// The oracle front at the cap.
    pub oracle: Vec<(Price, Formula)>,
    /// The engine front restricted to the cap.
    pub engine: Vec<(Price, Formula)>,
}

impl DirectionCheck {
    pub fn matches(&self) -> bool {
        sorted_prices(&self.oracle) == sorted_prices(&self.engine)
    }
}

fn sorted_prices(front: &[(Price, Formula)]) -> Vec<Price> {
    let mut v: Vec<Price> = front.iter().map(|(p, _)| *p).collect();
    v.sort_by(|a, b| a.cmp_lex(b));
    v
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub cap: Price,
    pub directions: Vec<DirectionCheck>,
}

impl Verification {
    pub fn matches(&self) -> bool {
        self.directions.iter().all(DirectionCheck::matches)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cap {}", self.cap);
        for d in &self.directions {
            let _ = writeln!(out, "\n{} -> {}", d.from, d.to);
            for (name, front) in [("oracle", &d.oracle), ("engine", &d.engine)] {
                let _ = writeln!(out, "  {name}:");
                if front.is_empty() {
                    let _ = writeln!(out, "    (empty)");
                }
                for (p, f) in front {
                    let _ = writeln!(out, "    {p}  {f}");
                }
            }
            let _ = writeln!(out, "  {}", if d.matches() { "MATCH" } else { "MISMATCH" });
        }
        let _ = writeln!(out, "\n{}", if self.matches() { "MATCH" } else { "MISMATCH" });
        out
    }
}

/// Compares both directions' fronts at `cap`; the cap must be finite.
pub fn verify(loaded: &Loaded, cap: Price, config: SpectroscopyConfig) -> Result<Verification, Error> {
    if !cap.is_finite() {
        return Err(Error::Price {
            text: cap.to_string(),
            reason: "the oracle needs a finite cap".into(),
        });
    }
    let lts = &loaded.lts;
    if lts.num_states() > MAX_STATES {
        return Err(Error::TooLarge {
            states: lts.num_states(),
            max: MAX_STATES,
        });
    }
    let space = SignatureSpace::compute(lts, &EnumerationBudget::for_lts(cap, lts));
    let s = spectroscope(lts, loaded.lhs, loaded.rhs, config);
    let directions = [
        (&s.forward, loaded.lhs, loaded.rhs),
        (&s.backward, loaded.rhs, loaded.lhs),
    ]
    .into_iter()
    .map(|(d, from, to)| DirectionCheck {
        from: lts.label(from).to_string(),
        to: lts.label(to).to_string(),
        oracle: space.front(from, &StateSet::singleton(to)),
        engine: d.front.iter().filter(|(p, _)| p.leq(&cap)).cloned().collect(),
    })
    .collect();
    Ok(Verification { cap, directions })
}
