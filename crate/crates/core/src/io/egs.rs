//! The line-oriented EGS game format.
//!
//! ```text
//! game fig1_left
//! players 1
//! node root root
//! node x parent=root move=1:x
//! terminal x name=z1
//! infoset 1 h1 = root
//! ```
//!
//! Nodes may be listed in any order. Active nodes that appear in no
//! `infoset` line get a singleton information set.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::StructureError;
use crate::model::{GameBuilder, GameStructure, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EgsError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Structure {
        line: usize,
        #[source]
        source: StructureError,
    },
    #[error("invalid game structure:\n{0}")]
    Invalid(ValidationReport),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> EgsError {
    EgsError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok {
                    text: &body[s..i],
                    col: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok {
            text: &body[s..],
            col: s + 1,
        });
    }
    out
}

fn key_value<'a>(tok: &Tok<'a>, key: &str, line: usize) -> Result<&'a str, EgsError> {
    match tok.text.split_once('=') {
        Some((k, v)) if k == key && !v.is_empty() => Ok(v),
        _ => Err(syntax(line, tok.col, format!("expected `{key}=<value>`"))),
    }
}

struct PendingNode {
    line: usize,
    label: String,
    parent: Option<(String, usize, usize)>,
    mv: Vec<(String, String)>,
}

/// Parses and validates an EGS document.
pub fn parse_egs(text: &str) -> Result<GameStructure, EgsError> {
    let g = parse_egs_unchecked(text)?;
    let report = g.validate();
    if report.is_valid() {
        Ok(g)
    } else {
        Err(EgsError::Invalid(report))
    }
}

/// Parses an EGS document without running the validator.
pub fn parse_egs_unchecked(text: &str) -> Result<GameStructure, EgsError> {
    let mut name = None;
    let mut players: Option<Vec<String>> = None;
    let mut nodes: Vec<PendingNode> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut terminals: Vec<(usize, String, usize, String)> = Vec::new();
    let mut infosets: Vec<(usize, String, String, Vec<(String, usize)>)> = Vec::new();
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        if head.text != "game" && head.text != "players" && players.is_none() {
            return Err(syntax(line, head.col, "players line missing"));
        }
        match head.text {
            "game" => {
                if toks.len() != 2 {
                    return Err(syntax(line, head.col, "expected `game <name>`"));
                }
                name = Some(toks[1].text.to_owned());
            }
            "players" => {
                if players.is_some() {
                    return Err(syntax(line, head.col, "duplicate players line"));
                }
                if toks.len() < 2 {
                    return Err(syntax(line, head.col + 7, "expected at least one player id"));
                }
                players = Some(toks[1..].iter().map(|t| t.text.to_owned()).collect());
            }
            "node" => {
                if toks.len() < 3 {
                    return Err(syntax(line, head.col, "expected `node <id> root` or `node <id> parent=<id> move=<moves>`"));
                }
                let label = toks[1].text.to_owned();
                if index.contains_key(&label) {
                    return Err(EgsError::Structure {
                        line,
                        source: StructureError::DuplicateNode(label),
                    });
                }
                let pending = if toks[2].text == "root" {
                    if toks.len() != 3 {
                        return Err(syntax(line, toks[3].col, "unexpected token after `root`"));
                    }
                    PendingNode {
                        line,
                        label: label.clone(),
                        parent: None,
                        mv: Vec::new(),
                    }
                } else {
                    if toks.len() != 4 {
                        return Err(syntax(line, head.col, "expected `node <id> parent=<id> move=<moves>`"));
                    }
                    let parent = key_value(&toks[2], "parent", line)?;
                    let spec = key_value(&toks[3], "move", line)?;
                    let mut mv = Vec::new();
                    for part in spec.split(',') {
                        match part.split_once(':') {
                            Some((p, a)) if !p.is_empty() && !a.is_empty() => {
                                mv.push((p.to_owned(), a.to_owned()))
                            }
                            _ => {
                                return Err(syntax(
                                    line,
                                    toks[3].col,
                                    format!("malformed move entry `{part}`, expected `<player>:<action>`"),
                                ))
                            }
                        }
                    }
                    PendingNode {
                        line,
                        label: label.clone(),
                        parent: Some((parent.to_owned(), line, toks[2].col)),
                        mv,
                    }
                };
                index.insert(label, nodes.len());
                nodes.push(pending);
            }
            "terminal" => {
                if toks.len() != 3 {
                    return Err(syntax(line, head.col, "expected `terminal <id> name=<z>`"));
                }
                let z = key_value(&toks[2], "name", line)?;
                terminals.push((line, toks[1].text.to_owned(), toks[1].col, z.to_owned()));
            }
            "infoset" => {
                if toks.len() < 5 || toks[3].text != "=" {
                    return Err(syntax(line, head.col, "expected `infoset <player> <id> = <node>...`"));
                }
                let members = toks[4..]
                    .iter()
                    .map(|t| (t.text.to_owned(), t.col))
                    .collect();
                infosets.push((line, toks[1].text.to_owned(), toks[2].text.to_owned(), members));
            }
            other => {
                return Err(syntax(line, head.col, format!("unknown directive `{other}`")));
            }
        }
    }

    let players = players.ok_or_else(|| syntax(last_line.max(1), 1, "players line missing"))?;
    if nodes.is_empty() {
        return Err(syntax(last_line.max(1), 1, "no node lines"));
    }
    let lookup = |label: &str, line: usize, col: usize| -> Result<usize, EgsError> {
        index
            .get(label)
            .copied()
            .ok_or_else(|| syntax(line, col, format!("unknown node `{label}`")))
    };

    let mut b = GameBuilder::new(players);
    b.set_name(name);
    for nd in &nodes {
        let parent = match &nd.parent {
            None => None,
            Some((p, line, col)) => Some(lookup(p, *line, *col)?),
        };
        b.add_node(nd.label.clone(), parent, nd.mv.clone());
    }
    for (line, label, col, z) in terminals {
        let ix = lookup(&label, line, col)?;
        b.name_terminal(ix, z);
    }
    let first_line = infosets.first().map_or(0, |s| s.0);
    for (line, owner, label, members) in infosets {
        let mut ms = Vec::with_capacity(members.len());
        for (m, col) in members {
            ms.push(lookup(&m, line, col)?);
        }
        b.add_infoset(owner, label, ms);
    }
    b.build().map_err(|e| {
        let line = match &e {
            StructureError::MultipleRoots(_, second) => index.get(second).map(|&i| nodes[i].line),
            StructureError::RootWithMove(l)
            | StructureError::EmptyMove(l)
            | StructureError::Unreachable(l)
            | StructureError::DuplicateNode(l) => index.get(l).map(|&i| nodes[i].line),
            StructureError::DuplicateInfoset(_) | StructureError::EmptyInfoset(_) => Some(first_line),
            _ => None,
        };
        EgsError::Structure {
            line: line.unwrap_or(1),
            source: e,
        }
    })
}

/// Canonical EGS text for a game.
pub fn serialize_egs(g: &GameStructure) -> String {
    let mut out = String::new();
    if let Some(n) = g.name() {
        let _ = writeln!(out, "game {n}");
    }
    let _ = writeln!(out, "players {}", g.players().join(" "));
    for nd in g.nodes() {
        match nd.parent {
            None => {
                let _ = writeln!(out, "node {} root", nd.label);
            }
            Some(p) => {
                let _ = writeln!(
                    out,
                    "node {} parent={} move={}",
                    nd.label,
                    g.node(p).label,
                    g.move_string(&nd.mv)
                );
            }
        }
        if nd.is_terminal() {
            if let Some(z) = &nd.terminal_name {
                let _ = writeln!(out, "terminal {} name={}", nd.label, z);
            }
        }
    }
    for s in g.infosets() {
        let members: Vec<&str> = s.members.iter().map(|m| g.node(*m).label.as_str()).collect();
        let _ = writeln!(
            out,
            "infoset {} {} = {}",
            g.players()[s.owner],
            s.label,
            members.join(" ")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn empty_file_lacks_players() {
        let err = parse_egs("").unwrap_err();
        assert!(err.to_string().contains("players line missing"), "{err}");
        let err = parse_egs("# only a comment\n\nnode r root\n").unwrap_err();
        assert!(err.to_string().contains("players line missing"), "{err}");
    }

    #[test]
    fn duplicate_node_is_named() {
        let text = "players 1\nnode r root\nnode a parent=r move=1:x\nnode a parent=r move=1:y\n";
        let err = parse_egs(text).unwrap_err();
        match &err {
            EgsError::Structure { line, source } => {
                assert_eq!(*line, 4);
                assert_eq!(source, &StructureError::DuplicateNode("a".into()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("`a`"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_egs("players 1\nnode r root\nnode a parent=r move=1x\n").unwrap_err();
        assert!(matches!(err, EgsError::Syntax { line: 3, column: 17, .. }), "{err:?}");
        let err = parse_egs("players 1\nnode r root\nnode a parent=q move=1:x\n").unwrap_err();
        assert!(err.to_string().contains("unknown node `q`"), "{err}");
        let err = parse_egs("players 1\nbogus\n").unwrap_err();
        assert!(matches!(err, EgsError::Syntax { line: 2, column: 1, .. }));
    }

    #[test]
    fn validation_failures_are_forwarded() {
        let text = "players 1\nnode r root\nnode a parent=r move=1:x\n";
        assert!(matches!(parse_egs(text), Err(EgsError::Invalid(_))));
        assert!(parse_egs_unchecked(text).is_ok());
    }

    #[test]
    fn fixtures_round_trip() {
        for name in fixtures::GAME_NAMES {
            let g = fixtures::load(name);
            let text = serialize_egs(&g);
            let back = parse_egs(&text).unwrap();
            assert_eq!(back, g, "{name}");
            assert_eq!(serialize_egs(&back), text, "{name}");
        }
    }

    #[test]
    fn fig1_left_transcription() {
        let g = fixtures::load("fig1_left");
        assert_eq!(g.players(), ["1"]);
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.terminals().len(), 3);
        assert_eq!(g.infosets().len(), 2);
        assert_eq!(g.height(), 2);
    }
}
