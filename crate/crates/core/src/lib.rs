//! Equivalence spectroscopy for finite-state processes.
//!
//! Given two states of a labeled transition system, this crate computes the
//! minimal-price Hennessy–Milner formulas that tell them apart and, from
//! those prices, every notion of the linear-time–branching-time spectrum
//! that distinguishes or preorders them.
//!
//! The pipeline is:
//!
//! 1. [`process::parse`] reads BCCSP-style definitions and
//!    [`lts::derive_lts`] unfolds them into an [`lts::Lts`].
//! 2. [`spectroscopy::build_game`] constructs the reachable spectroscopy game
//!    and [`game::compute_winning_region`] solves it.
//! 3. [`synthesis::spectroscope`] reads cheapest distinguishing formulas off
//!    the attacker's winning strategy graph and classifies them with
//!    [`pricing`].
//!
//! [`oracle`] holds brute-force reference implementations used by the test
//! suites.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod game;
pub mod hml;
pub mod lts;
pub mod oracle;
pub mod pricing;
pub mod process;
pub mod spectroscopy;
pub mod synthesis;

pub use hml::Formula;
pub use lts::{Lts, StateId, StateSet};
pub use pricing::{Notion, Price};
pub use process::{Action, ProcessDefinitions, ProcessName, ProcessTerm};
pub use synthesis::{spectroscope, Spectroscopy, SpectroscopyConfig};
