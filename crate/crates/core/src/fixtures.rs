//! Small hand-written games used as golden tests.

use crate::io::{parse_egs, parse_znf};
use crate::model::GameStructure;
use crate::normal_form::ReducedNormalForm;

pub const GAME_NAMES: &[&str] = &[
    "fig1_left",
    "fig1_right",
    "fig2_left",
    "fig2_right",
    "fig3",
    "fig4_left",
    "fig4_right",
    "fig5_left",
    "fig5_right",
    "fig6",
    "fig7_left",
    "fig7_right",
];

pub fn game_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1_left" => include_str!("../fixtures/fig1_left.egs"),
        "fig1_right" => include_str!("../fixtures/fig1_right.egs"),
        "fig2_left" => include_str!("../fixtures/fig2_left.egs"),
        "fig2_right" => include_str!("../fixtures/fig2_right.egs"),
        "fig3" => include_str!("../fixtures/fig3.egs"),
        "fig4_left" => include_str!("../fixtures/fig4_left.egs"),
        "fig4_right" => include_str!("../fixtures/fig4_right.egs"),
        "fig5_left" => include_str!("../fixtures/fig5_left.egs"),
        "fig5_right" => include_str!("../fixtures/fig5_right.egs"),
        "fig6" => include_str!("../fixtures/fig6.egs"),
        "fig7_left" => include_str!("../fixtures/fig7_left.egs"),
        "fig7_right" => include_str!("../fixtures/fig7_right.egs"),
        _ => return None,
    })
}

pub const FIG8_ZNF: &str = include_str!("../fixtures/fig8.znf");

/// Parses a fixture game. Panics on unknown names or broken fixtures.
pub fn load(name: &str) -> GameStructure {
    let text = game_text(name).unwrap_or_else(|| panic!("no fixture named {name}"));
    parse_egs(text).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn fig8() -> ReducedNormalForm {
    parse_znf(FIG8_ZNF).expect("fig8.znf")
}
