//! The ZNF normal-form format.
//!
//! ```text
//! players 1 2
//! strategies 1: a b u
//! strategies 2: x y
//! terminals z1 z2 z3 z4 z5
//! outcome a x -> z1
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::normal_form::{NormalFormError, ReducedNormalForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZnfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("profile ({0}) uncovered")]
    Uncovered(String),
    #[error(transparent)]
    Table(#[from] NormalFormError),
}

fn syntax(line: usize, message: impl Into<String>) -> ZnfError {
    ZnfError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_znf(text: &str) -> Result<ReducedNormalForm, ZnfError> {
    let mut players: Option<Vec<String>> = None;
    let mut strategies: HashMap<String, Vec<String>> = HashMap::new();
    let mut terminals: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<String>, String)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "players" => {
                if players.is_some() {
                    return Err(syntax(line, "duplicate players line"));
                }
                if toks.len() < 2 {
                    return Err(syntax(line, "expected at least one player"));
                }
                players = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "strategies" => {
                let Some(p) = toks.get(1).and_then(|t| t.strip_suffix(':')) else {
                    return Err(syntax(line, "expected `strategies <player>: <label>...`"));
                };
                if toks.len() < 3 {
                    return Err(syntax(line, format!("no strategies for player {p}")));
                }
                if strategies
                    .insert(p.to_owned(), toks[2..].iter().map(|s| s.to_string()).collect())
                    .is_some()
                {
                    return Err(syntax(line, format!("strategies of player {p} listed twice")));
                }
            }
            "terminals" => {
                if terminals.is_some() {
                    return Err(syntax(line, "duplicate terminals line"));
                }
                terminals = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "outcome" => {
                let n = toks.len();
                if n < 4 || toks[n - 2] != "->" {
                    return Err(syntax(line, "expected `outcome <label>... -> <terminal>`"));
                }
                rows.push((
                    line,
                    toks[1..n - 2].iter().map(|s| s.to_string()).collect(),
                    toks[n - 1].to_owned(),
                ));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let players = players.ok_or_else(|| syntax(1, "players line missing"))?;
    let terminals = terminals.ok_or_else(|| syntax(1, "terminals line missing"))?;
    let mut lists = Vec::with_capacity(players.len());
    for p in &players {
        lists.push(
            strategies
                .remove(p)
                .ok_or_else(|| syntax(1, format!("no strategies line for player {p}")))?,
        );
    }
    if let Some(p) = strategies.keys().next() {
        return Err(syntax(1, format!("strategies for unknown player {p}")));
    }
    let zindex: HashMap<&str, usize> = terminals
        .iter()
        .enumerate()
        .map(|(i, z)| (z.as_str(), i))
        .collect();
    let sindex: Vec<HashMap<&str, usize>> = lists
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect())
        .collect();
    let sizes: Vec<usize> = lists.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    let mut table: Vec<Option<usize>> = vec![None; total];
    for (line, labels, z) in &rows {
        if labels.len() != players.len() {
            return Err(syntax(
                *line,
                format!("expected {} strategy labels, got {}", players.len(), labels.len()),
            ));
        }
        let mut pos = 0;
        for (p, l) in labels.iter().enumerate() {
            let &k = sindex[p]
                .get(l.as_str())
                .ok_or_else(|| syntax(*line, format!("unknown strategy `{l}` of player {}", players[p])))?;
            pos = pos * sizes[p] + k;
        }
        let &zi = zindex
            .get(z.as_str())
            .ok_or_else(|| syntax(*line, format!("unknown terminal `{z}`")))?;
        if table[pos].replace(zi).is_some() {
            return Err(syntax(*line, format!("profile ({}) listed twice", labels.join(","))));
        }
    }
    let mut outcomes = Vec::with_capacity(total);
    for (pos, cell) in table.iter().enumerate() {
        match cell {
            Some(z) => outcomes.push(*z),
            None => {
                let mut rest = pos;
                let mut labels = vec![""; players.len()];
                for p in (0..players.len()).rev() {
                    labels[p] = &lists[p][rest % sizes[p]];
                    rest /= sizes[p];
                }
                return Err(ZnfError::Uncovered(labels.join(",")));
            }
        }
    }
    Ok(ReducedNormalForm::new(players, lists, terminals, outcomes)?)
}

pub fn serialize_znf(nf: &ReducedNormalForm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "players {}", nf.players().join(" "));
    for (p, name) in nf.players().iter().enumerate() {
        let _ = writeln!(out, "strategies {}: {}", name, nf.strategies(p).join(" "));
    }
    let _ = writeln!(out, "terminals {}", nf.terminals().join(" "));
    for (pos, &z) in nf.outcomes().iter().enumerate() {
        let labels: Vec<&str> = nf
            .profile_at(pos)
            .iter()
            .enumerate()
            .map(|(p, &k)| nf.strategies(p)[k].as_str())
            .collect();
        let _ = writeln!(out, "outcome {} -> {}", labels.join(" "), nf.terminals()[z]);
    }
    out
}
