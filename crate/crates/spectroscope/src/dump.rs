//! Renderings of the reachable spectroscopy game.

use std::fmt::Write as _;

use ltbt_core::game::Player;
use ltbt_core::synthesis::Spectroscopy;
use ltbt_core::Lts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DumpFormat {
    Dot,
    Tsv,
}

fn owner(p: Player) -> &'static str {
    match p {
        Player::Attacker => "att",
        Player::Defender => "def",
    }
}

fn formulas(s: &Spectroscopy, g: usize) -> Vec<String> {
    s.strats_at(g)
        .map(|cs| cs.iter().map(|c| c.formula.to_string()).collect())
        .unwrap_or_default()
}

/// One line per position (`id owner winner position [formulas]`) and per
/// move (`src dst label`), each block preceded by a header line.
pub fn tsv(lts: &Lts, s: &Spectroscopy, annotate: bool) -> String {
    let game = s.game.game();
    let mut out = String::new();
    out.push_str("# id\towner\twinner\tposition");
    out.push_str(if annotate { "\tformulas\n" } else { "\n" });
    for g in 0..s.game.num_positions() {
        let winner = if s.region.attacker_wins(g) {
            "attacker"
        } else {
            "defender"
        };
        let _ = write!(
            out,
            "{g}\t{}\t{winner}\t{}",
            owner(game.owner(g)),
            s.game.position(g).describe(lts)
        );
        if annotate {
            let _ = write!(out, "\t{}", formulas(s, g).join("; "));
        }
        out.push('\n');
    }
    out.push_str("# src\tdst\tlabel\n");
    for g in 0..s.game.num_positions() {
        for (t, label) in game.moves(g) {
            let _ = writeln!(out, "{g}\t{t}\t{label}");
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: defender positions are ellipses, attacker positions
/// boxes; positions the defender wins are drawn red.
pub fn dot(lts: &Lts, s: &Spectroscopy, annotate: bool) -> String {
    let game = s.game.game();
    let mut out = String::from("digraph spectroscopy {\n  node [fontname=\"monospace\"];\n");
    for g in 0..s.game.num_positions() {
        let shape = match game.owner(g) {
            Player::Attacker => "box",
            Player::Defender => "ellipse",
        };
        let color = if s.region.attacker_wins(g) { "black" } else { "red" };
        let mut label = s.game.position(g).describe(lts);
        if annotate {
            for f in formulas(s, g) {
                label.push('\n');
                label.push_str(&f);
            }
        }
        let _ = writeln!(
            out,
            "  g{g} [shape={shape}, color={color}, fontcolor={color}, label=\"{}\"];",
            escape(&label).replace('\n', "\\n")
        );
    }
    for g in 0..s.game.num_positions() {
        for (t, label) in game.moves(g) {
            let color = if s.region.attacker_wins(*t as usize) {
                "black"
            } else {
                "red"
            };
            let _ = writeln!(
                out,
                "  g{g} -> g{t} [label=\"{}\", color={color}];",
                escape(&label.to_string())
            );
        }
    }
    out.push_str("}\n");
    out
}

pub fn render(format: DumpFormat, lts: &Lts, s: &Spectroscopy, annotate: bool) -> String {
    match format {
        DumpFormat::Dot => dot(lts, s, annotate),
        DumpFormat::Tsv => tsv(lts, s, annotate),
    }
}
