//! Comparison reports in text and JSON form.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use ltbt_core::hml::distinguishes;
use ltbt_core::pricing::{classify, languages, reporting_set, INF};
use ltbt_core::synthesis::{spectroscope, Direction, Spectroscopy, SpectroscopyConfig};
use ltbt_core::{Lts, Price, StateSet};

use crate::Loaded;

/// A price as six numbers, with `"inf"` for infinite components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JsonPrice(pub Price);

impl Serialize for JsonPrice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(6))?;
        for &x in &self.0 .0 {
            if x == INF {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element(&x)?;
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for JsonPrice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Component {
            Finite(u32),
            Named(String),
        }
        let parts = Vec::<Component>::deserialize(deserializer)?;
        if parts.len() != 6 {
            return Err(de::Error::invalid_length(parts.len(), &"six price components"));
        }
        let mut v = [0u32; 6];
        for (slot, part) in v.iter_mut().zip(parts) {
            *slot = match part {
                Component::Finite(n) => n,
                Component::Named(s) if s == "inf" => INF,
                Component::Named(s) => return Err(de::Error::custom(format!("bad price component `{s}`"))),
            };
        }
        Ok(JsonPrice(Price(v)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaReport {
    pub formula: String,
    pub ascii: String,
    pub price: JsonPrice,
    /// Notions whose observation language contains the formula.
    pub languages: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub from: String,
    pub to: String,
    /// The Pareto front, one witness per price.
    pub formulas: Vec<FormulaReport>,
    pub coarsest_distinguishing: Vec<String>,
    pub finest_preorders: Vec<String>,
    pub distinguished: Vec<String>,
    pub preordered: Vec<String>,
}

/// Verdicts on equivalences, combining both directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub coarsest_distinguishing: Vec<String>,
    pub finest_equivalences: Vec<String>,
    pub equivalences_holding: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub lhs: String,
    pub rhs: String,
    pub directions: Vec<DirectionReport>,
    pub verdicts: Verdicts,
    pub bisimilar: bool,
    /// A bisimulation relating `lhs` and `rhs`, by state labels.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bisimulation: Option<Vec<(String, String)>>,
    pub cap: JsonPrice,
    /// Whether the safety cap removed any formula during synthesis.
    pub cap_filtered: bool,
    pub states: usize,
    pub game_positions: usize,
    pub timing_ms: f64,
}

fn labels<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn direction_report(lts: &Lts, d: &Direction, with_s3: bool) -> DirectionReport {
    let notions = reporting_set(with_s3);
    let q = StateSet::singleton(d.to);
    let formulas = d
        .front
        .iter()
        .map(|(price, phi)| {
            assert!(
                distinguishes(lts, phi, d.from, &q),
                "reported formula {phi} does not distinguish"
            );
            FormulaReport {
                formula: phi.to_string(),
                ascii: phi.to_ascii(),
                price: JsonPrice(*price),
                languages: labels(&languages(price, &notions)),
            }
        })
        .collect();
    DirectionReport {
        from: lts.label(d.from).to_string(),
        to: lts.label(d.to).to_string(),
        formulas,
        coarsest_distinguishing: labels(&d.verdict.coarsest_distinguishing),
        finest_preorders: labels(&d.verdict.finest_preorders),
        distinguished: labels(&d.verdict.distinguished),
        preordered: labels(&d.verdict.preordered),
    }
}

impl Report {
    pub fn new(loaded: &Loaded, s: &Spectroscopy, elapsed: Duration) -> Report {
        let lts = &loaded.lts;
        let both: Vec<Price> = s
            .forward
            .front
            .iter()
            .chain(&s.backward.front)
            .map(|(p, _)| *p)
            .collect();
        let eq = classify(&both, s.with_s3);
        Report {
            lhs: loaded.lhs_name.clone(),
            rhs: loaded.rhs_name.clone(),
            directions: vec![
                direction_report(lts, &s.forward, s.with_s3),
                direction_report(lts, &s.backward, s.with_s3),
            ],
            verdicts: Verdicts {
                coarsest_distinguishing: labels(&eq.coarsest_distinguishing),
                finest_equivalences: labels(&eq.finest_preorders),
                equivalences_holding: labels(&s.equivalences_holding()),
            },
            bisimilar: s.is_bisimilar(),
            bisimulation: s.bisimulation.as_ref().map(|rel| {
                rel.iter()
                    .map(|&(p, q)| (lts.label(p).to_string(), lts.label(q).to_string()))
                    .collect()
            }),
            cap: JsonPrice(s.cap),
            cap_filtered: s.cap_filtered,
            states: lts.num_states(),
            game_positions: s.game.num_positions(),
            timing_ms: elapsed.as_secs_f64() * 1000.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = if self.bisimilar { "bisimilar" } else { "distinguished" };
        let _ = writeln!(out, "{} vs {}: {}", self.lhs, self.rhs, status);
        if let Some(rel) = &self.bisimulation {
            let _ = writeln!(out, "bisimulation of size {}:", rel.len());
            for (p, q) in rel {
                let _ = writeln!(out, "  {p} ~ {q}");
            }
        }
        for (d, name) in self
            .directions
            .iter()
            .zip([(&self.lhs, &self.rhs), (&self.rhs, &self.lhs)])
        {
            let _ = writeln!(out, "\n{} -> {}", name.0, name.1);
            if d.formulas.is_empty() {
                let _ = writeln!(out, "  no distinguishing formula: preordered by every notion");
                continue;
            }
            for f in &d.formulas {
                let _ = writeln!(out, "  {}  {}  in {}", f.formula, f.price.0, join(&f.languages));
            }
            let _ = writeln!(out, "  coarsest distinguishing: {}", join(&d.coarsest_distinguishing));
            let _ = writeln!(out, "  finest preorders: {}", join(&d.finest_preorders));
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "coarsest distinguishing equivalences: {}",
            join(&self.verdicts.coarsest_distinguishing)
        );
        let _ = writeln!(out, "finest equivalences: {}", join(&self.verdicts.finest_equivalences));
        let _ = writeln!(
            out,
            "equivalences holding: {}",
            join(&self.verdicts.equivalences_holding)
        );
        if self.cap_filtered {
            let _ = writeln!(out, "warning: the price cap {} removed formulas", self.cap.0);
        }
        let _ = writeln!(
            out,
            "{} states, {} game positions, {:.1} ms",
            self.states, self.game_positions, self.timing_ms
        );
        out
    }
}

fn join(xs: &[String]) -> String {
    if xs.is_empty() {
        "-".to_string()
    } else {
        xs.join(", ")
    }
}

/// Runs the spectroscopy on the two loaded processes.
pub fn compare(loaded: &Loaded, config: SpectroscopyConfig) -> (Spectroscopy, Report) {
    let start = Instant::now();
    let s = spectroscope(&loaded.lts, loaded.lhs, loaded.rhs, config);
    let report = Report::new(loaded, &s, start.elapsed());
    (s, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_serialize_with_inf() {
        let p = JsonPrice(Price([INF, 1, 0, 0, 1, 1]));
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"["inf",1,0,0,1,1]"#);
        assert_eq!(serde_json::from_str::<JsonPrice>(&text).unwrap(), p);
        assert!(serde_json::from_str::<JsonPrice>("[1,2]").is_err());
    }
}
