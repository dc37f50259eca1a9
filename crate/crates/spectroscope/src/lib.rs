//! File handling, reports and game dumps around `ltbt-core`.

use std::fs;
use std::path::{Path, PathBuf};

use ltbt_core::lts::{derive_lts, LtsError};
use ltbt_core::pricing::INF;
use ltbt_core::process::{parse, ParseError};
use ltbt_core::{Lts, Price, ProcessDefinitions, StateId};

pub mod dump;
pub mod report;
pub mod verify;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {source}")]
    Parse {
        origin: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error("invalid price `{text}`: {reason}")]
    Price { text: String, reason: String },
    #[error("the oracle handles at most {max} states, got {states}")]
    TooLarge { states: usize, max: usize },
}

/// Two processes of a definitions file and their joint transition system.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub defs: ProcessDefinitions,
    pub lts: Lts,
    pub lhs_name: String,
    pub rhs_name: String,
    pub lhs: StateId,
    pub rhs: StateId,
}

/// Parses definitions and derives the LTS reachable from `lhs` and `rhs`.
/// `origin` names the source in error messages.
pub fn load_source(origin: &str, text: &str, lhs: &str, rhs: &str) -> Result<Loaded, Error> {
    let defs = parse(text).map_err(|source| Error::Parse {
        origin: origin.to_string(),
        source,
    })?;
    let lts = derive_lts(&defs, &[lhs, rhs])?;
    let l = lts.root(lhs).ok_or_else(|| LtsError::UnknownProcess(lhs.to_string()))?;
    let r = lts.root(rhs).ok_or_else(|| LtsError::UnknownProcess(rhs.to_string()))?;
    Ok(Loaded {
        defs,
        lts,
        lhs_name: lhs.to_string(),
        rhs_name: rhs.to_string(),
        lhs: l,
        rhs: r,
    })
}

pub fn load_file(path: &Path, lhs: &str, rhs: &str) -> Result<Loaded, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_source(&path.display().to_string(), &text, lhs, rhs)
}

/// Parses six comma-separated components, each a natural number or `inf`
/// (also `∞`).
pub fn parse_price(text: &str) -> Result<Price, Error> {
    let fail = |reason: &str| Error::Price {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let parts: Vec<&str> = text
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .collect();
    if parts.len() != 6 {
        return Err(fail("expected six comma-separated components"));
    }
    let mut v = [0u32; 6];
    for (slot, part) in v.iter_mut().zip(parts) {
        let part = part.trim();
        *slot = match part {
            "inf" | "∞" => INF,
            _ => match part.parse::<u32>() {
                Ok(n) if n != INF => n,
                _ => return Err(fail(&format!("`{part}` is not a natural number or `inf`"))),
            },
        };
    }
    Ok(Price(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_parse() {
        assert_eq!(parse_price("3,2,2,2,2,2").unwrap(), Price([3, 2, 2, 2, 2, 2]));
        assert_eq!(
            parse_price("(inf, 1, 0, 0, 1, ∞)").unwrap(),
            Price([INF, 1, 0, 0, 1, INF])
        );
        assert!(parse_price("1,2,3").is_err());
        assert!(parse_price("1,2,3,4,5,-1").is_err());
    }

    #[test]
    fn missing_process_is_named() {
        let err = load_source("x", "P = a\n", "P", "Q").unwrap_err();
        assert!(err.to_string().contains("`Q`"), "{err}");
    }
}
