//! Z-normal and Z-reduced normal forms: tables from strategy profiles to terminals.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::GameStructure;
use crate::natord;
use crate::strategy::{advance, class_labels, play_choices, reduced_choices, strategies_of, Choices};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("no players")]
    NoPlayers,
    #[error("duplicate player `{0}`")]
    DuplicatePlayer(String),
    #[error("player `{0}` has no strategies")]
    NoStrategies(String),
    #[error("player `{player}` lists strategy `{label}` twice")]
    DuplicateStrategy { player: String, label: String },
    #[error("duplicate terminal `{0}`")]
    DuplicateTerminal(String),
    #[error("outcome table has {got} entries, expected {expected}")]
    WrongSize { got: usize, expected: usize },
    #[error("terminal index {0} out of range")]
    BadTerminal(usize),
    #[error("terminal `{0}` is not the outcome of any profile")]
    Unreached(String),
}

/// A table `ζ̃` from strategy profiles to terminal names.
///
/// Players, strategy labels and terminals are kept in natural order; the
/// outcome vector is row-major with the last player varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedNormalForm {
    players: Vec<String>,
    strategies: Vec<Vec<String>>,
    terminals: Vec<String>,
    outcomes: Vec<usize>,
}

fn sorted_perm(labels: &[String]) -> Vec<usize> {
    let mut ix: Vec<usize> = (0..labels.len()).collect();
    ix.sort_by(|&a, &b| natord::cmp(&labels[a], &labels[b]));
    ix
}

impl ReducedNormalForm {
    /// Builds a form, reordering everything canonically. The table must be
    /// total and every terminal must be some profile's outcome.
    pub fn new(
        players: Vec<String>,
        strategies: Vec<Vec<String>>,
        terminals: Vec<String>,
        outcomes: Vec<usize>,
    ) -> Result<Self, NormalFormError> {
        if players.is_empty() {
            return Err(NormalFormError::NoPlayers);
        }
        assert_eq!(players.len(), strategies.len(), "one strategy list per player");
        let mut seen = HashSet::new();
        for p in &players {
            if !seen.insert(p) {
                return Err(NormalFormError::DuplicatePlayer(p.clone()));
            }
        }
        for (p, ss) in players.iter().zip(&strategies) {
            if ss.is_empty() {
                return Err(NormalFormError::NoStrategies(p.clone()));
            }
            let mut seen = HashSet::new();
            for s in ss {
                if !seen.insert(s) {
                    return Err(NormalFormError::DuplicateStrategy {
                        player: p.clone(),
                        label: s.clone(),
                    });
                }
            }
        }
        let mut seen = HashSet::new();
        for z in &terminals {
            if !seen.insert(z) {
                return Err(NormalFormError::DuplicateTerminal(z.clone()));
            }
        }
        let expected: usize = strategies.iter().map(Vec::len).product();
        if outcomes.len() != expected {
            return Err(NormalFormError::WrongSize {
                got: outcomes.len(),
                expected,
            });
        }
        if let Some(&bad) = outcomes.iter().find(|&&z| z >= terminals.len()) {
            return Err(NormalFormError::BadTerminal(bad));
        }

        let pperm = sorted_perm(&players);
        let sperm: Vec<Vec<usize>> = pperm.iter().map(|&p| sorted_perm(&strategies[p])).collect();
        let zperm = sorted_perm(&terminals);
        let mut znew = vec![0; terminals.len()];
        for (new, &old) in zperm.iter().enumerate() {
            znew[old] = new;
        }
        let old_sizes: Vec<usize> = strategies.iter().map(Vec::len).collect();
        let nf = ReducedNormalForm {
            players: pperm.iter().map(|&p| players[p].clone()).collect(),
            strategies: pperm
                .iter()
                .zip(&sperm)
                .map(|(&p, perm)| perm.iter().map(|&k| strategies[p][k].clone()).collect())
                .collect(),
            terminals: zperm.iter().map(|&z| terminals[z].clone()).collect(),
            outcomes: Vec::with_capacity(expected),
        };
        let mut nf = nf;
        let mut idx = vec![0usize; players.len()];
        let mut old = vec![0usize; players.len()];
        loop {
            for (k, &p) in pperm.iter().enumerate() {
                old[p] = sperm[k][idx[k]];
            }
            nf.outcomes.push(znew[outcomes[flat(&old_sizes, &old)]]);
            if !advance(&mut idx, |k| nf.strategies[k].len()) {
                break;
            }
        }
        let mut hit = vec![false; nf.terminals.len()];
        for &z in &nf.outcomes {
            hit[z] = true;
        }
        if let Some(k) = hit.iter().position(|h| !h) {
            return Err(NormalFormError::Unreached(nf.terminals[k].clone()));
        }
        Ok(nf)
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn strategies(&self, player: usize) -> &[String] {
        &self.strategies[player]
    }

    pub fn all_strategies(&self) -> &[Vec<String>] {
        &self.strategies
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn profile_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    /// Terminal index for a profile of strategy indices.
    pub fn outcome(&self, profile: &[usize]) -> usize {
        self.outcomes[flat(&self.sizes(), profile)]
    }

    /// Profile of strategy indices at a flat table position.
    pub fn profile_at(&self, mut pos: usize) -> Vec<usize> {
        let mut out = vec![0; self.players.len()];
        for p in (0..self.players.len()).rev() {
            let n = self.strategies[p].len();
            out[p] = pos % n;
            pos /= n;
        }
        out
    }

    /// Human-readable table. Two-player forms are drawn as a matrix.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if self.players.len() == 2 {
            let rows = &self.strategies[0];
            let cols = &self.strategies[1];
            let w0 = rows
                .iter()
                .map(String::len)
                .chain([self.players[0].len() + self.players[1].len() + 1])
                .max()
                .unwrap_or(1);
            let cells: Vec<Vec<&str>> = (0..rows.len())
                .map(|r| {
                    (0..cols.len())
                        .map(|c| self.terminals[self.outcome(&[r, c])].as_str())
                        .collect()
                })
                .collect();
            let wc: Vec<usize> = (0..cols.len())
                .map(|c| cells.iter().map(|row| row[c].len()).chain([cols[c].len()]).max().unwrap_or(1))
                .collect();
            let corner = format!("{}\\{}", self.players[0], self.players[1]);
            let _ = write!(out, "{corner:<w0$}");
            for (c, label) in cols.iter().enumerate() {
                let _ = write!(out, " | {:<w$}", label, w = wc[c]);
            }
            out.push('\n');
            for (r, label) in rows.iter().enumerate() {
                let _ = write!(out, "{label:<w0$}");
                for (c, cell) in cells[r].iter().enumerate() {
                    let _ = write!(out, " | {:<w$}", cell, w = wc[c]);
                }
                out.push('\n');
            }
            return out;
        }
        let _ = writeln!(out, "{} -> outcome", self.players.join(" "));
        for pos in 0..self.outcomes.len() {
            let prof = self.profile_at(pos);
            let labels: Vec<&str> = prof
                .iter()
                .enumerate()
                .map(|(p, &k)| self.strategies[p][k].as_str())
                .collect();
            let _ = writeln!(out, "{} -> {}", labels.join(" "), self.terminals[self.outcomes[pos]]);
        }
        out
    }
}

fn flat(sizes: &[usize], profile: &[usize]) -> usize {
    sizes
        .iter()
        .zip(profile)
        .fold(0, |acc, (&n, &k)| acc * n + k)
}

fn table(g: &GameStructure, per_player: Vec<(Vec<String>, Vec<Choices>)>) -> ReducedNormalForm {
    let terminals: Vec<String> = g
        .terminals()
        .iter()
        .map(|t| g.terminal_name(*t).to_owned())
        .collect();
    let sizes: Vec<usize> = per_player.iter().map(|(l, _)| l.len()).collect();
    let mut outcomes = Vec::with_capacity(sizes.iter().product());
    let mut idx = vec![0usize; sizes.len()];
    loop {
        let prof: Vec<&Choices> = per_player
            .iter()
            .zip(&idx)
            .map(|((_, cs), &k)| &cs[k])
            .collect();
        let z = play_choices(g, &prof).expect("valid game");
        outcomes.push(g.terminal_position(z).expect("play ends at a terminal"));
        if !advance(&mut idx, |p| sizes[p]) {
            break;
        }
    }
    ReducedNormalForm::new(
        g.players().to_vec(),
        per_player.into_iter().map(|(l, _)| l).collect(),
        terminals,
        outcomes,
    )
    .expect("normal form of a valid game")
}

/// `rn_Z(G)`: reduced strategies labeled by their reachable choices.
pub fn reduced_normal_form(g: &GameStructure) -> ReducedNormalForm {
    let per_player = (0..g.players().len())
        .map(|p| {
            let cs = reduced_choices(g, p);
            (class_labels(g, &cs), cs)
        })
        .collect();
    table(g, per_player)
}

/// `n_Z(G)`: the unreduced table over all pure strategies.
pub fn normal_form(g: &GameStructure) -> ReducedNormalForm {
    let per_player = (0..g.players().len())
        .map(|p| {
            let ss = strategies_of(g, p);
            let labels = ss.iter().map(|s| s.label()).collect();
            (labels, ss.into_iter().map(|s| s.choices).collect())
        })
        .collect();
    table(g, per_player)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn fig8_table() {
        let nf = reduced_normal_form(&fixtures::load("fig7_right"));
        assert_eq!(nf.strategies(0), s(&["a", "b", "u"]));
        assert_eq!(nf.strategies(1), s(&["x", "y"]));
        let cell = |r, c| nf.terminals()[nf.outcome(&[r, c])].clone();
        assert_eq!(cell(0, 0), "z1");
        assert_eq!(cell(0, 1), "z3");
        assert_eq!(cell(1, 0), "z2");
        assert_eq!(cell(1, 1), "z4");
        assert_eq!(cell(2, 0), "z5");
        assert_eq!(cell(2, 1), "z5");
        assert_eq!(nf, fixtures::fig8());
    }

    #[test]
    fn fig1_forms_have_three_strategies() {
        for name in ["fig1_left", "fig1_right"] {
            let nf = reduced_normal_form(&fixtures::load(name));
            assert_eq!(nf.strategies(0).len(), 3, "{name}");
            assert_eq!(nf.terminals(), s(&["z1", "z2", "z3"]));
        }
        assert_eq!(normal_form(&fixtures::load("fig1_left")).strategies(0).len(), 4);
    }

    #[test]
    fn single_decision_gives_column() {
        let nf = reduced_normal_form(&fixtures::load("fig1_right"));
        assert_eq!(nf.sizes(), [3]);
        assert_eq!(nf.profile_count(), 3);
    }

    #[test]
    fn every_terminal_is_reached() {
        for name in fixtures::GAME_NAMES {
            let g = fixtures::load(name);
            let nf = reduced_normal_form(&g);
            assert_eq!(nf.terminals().len(), g.terminals().len(), "{name}");
        }
    }

    #[test]
    fn constructor_canonicalizes_and_checks() {
        let nf = ReducedNormalForm::new(
            s(&["2", "1"]),
            vec![s(&["y", "x"]), s(&["b", "a"])],
            s(&["z2", "z1"]),
            vec![0, 1, 1, 0],
        )
        .unwrap();
        assert_eq!(nf.players(), s(&["1", "2"]));
        assert_eq!(nf.terminals()[nf.outcome(&[1, 0])], "z1");
        assert_eq!(nf.terminals()[nf.outcome(&[0, 0])], "z2");
        assert_eq!(nf.terminals()[nf.outcome(&[0, 1])], "z1");

        let err = ReducedNormalForm::new(s(&["1"]), vec![s(&["a", "b"])], s(&["z1", "z2"]), vec![0, 0]);
        assert_eq!(err, Err(NormalFormError::Unreached("z2".into())));
        let err = ReducedNormalForm::new(s(&["1"]), vec![s(&["a", "b"])], s(&["z1"]), vec![0]);
        assert!(matches!(err, Err(NormalFormError::WrongSize { .. })));
    }

    #[test]
    fn matrix_rendering() {
        let nf = reduced_normal_form(&fixtures::load("fig7_right"));
        let t = nf.render_table();
        assert_eq!(t.lines().count(), 4);
        assert!(t.lines().nth(1).unwrap().starts_with("a "));
        assert!(t.contains("z5"));
    }
}
