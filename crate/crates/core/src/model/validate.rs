use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{GameStructure, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Terminal names must sit on terminals and be unique.
    TerminalName,
    /// All children of a node are reached by moves of the same players.
    MoveDomain,
    /// Child profiles form the full product of feasible action sets.
    Product,
    /// An active player has at least two feasible actions.
    MinActions,
    /// Information sets hold non-terminal nodes where the owner moves, once each.
    InfosetMembership,
    /// Feasible actions are constant across an information set.
    Measurability,
    /// No member of an information set precedes another.
    AbsentMindedness,
    /// Every player moves somewhere.
    InactivePlayer,
    /// A player's record is constant across each of their information sets.
    PerfectRecall,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::TerminalName => "terminal-name",
            Rule::MoveDomain => "move-domain",
            Rule::Product => "product",
            Rule::MinActions => "min-actions",
            Rule::InfosetMembership => "infoset-membership",
            Rule::Measurability => "measurability",
            Rule::AbsentMindedness => "absent-mindedness",
            Rule::InactivePlayer => "inactive-player",
            Rule::PerfectRecall => "perfect-recall",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    /// Offending node, information set or player.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: Rule, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "[{}] {}: {}", v.rule.name(), v.location, v.message)?;
        }
        Ok(())
    }
}

pub(super) fn validate(g: &GameStructure) -> ValidationReport {
    let mut r = ValidationReport::default();
    check_terminal_names(g, &mut r);
    check_moves(g, &mut r);
    check_infosets(g, &mut r);
    for (p, name) in g.players().iter().enumerate() {
        if !g.player_has_moves(p) {
            r.push(Rule::InactivePlayer, format!("player {name}"), "never active");
        }
    }
    r
}

fn check_terminal_names(g: &GameStructure, r: &mut ValidationReport) {
    let mut seen: HashMap<&str, &str> = HashMap::new();
    for nd in g.nodes() {
        let Some(name) = nd.terminal_name.as_deref() else {
            continue;
        };
        if !nd.is_terminal() {
            r.push(
                Rule::TerminalName,
                format!("node {}", nd.label),
                format!("terminal name `{name}` on a non-terminal node"),
            );
        } else if let Some(prev) = seen.insert(name, &nd.label) {
            r.push(
                Rule::TerminalName,
                format!("node {}", nd.label),
                format!("terminal name `{name}` already used by node {prev}"),
            );
        }
    }
}

fn check_moves(g: &GameStructure, r: &mut ValidationReport) {
    for (ix, nd) in g.nodes().iter().enumerate() {
        for w in nd.mv.windows(2) {
            if w[0].0 == w[1].0 {
                r.push(
                    Rule::MoveDomain,
                    format!("node {}", nd.label),
                    format!("player {} appears twice in the move", g.players()[w[0].0]),
                );
            }
        }
        if nd.is_terminal() {
            continue;
        }
        let mut consistent = true;
        for c in &nd.children {
            let dom: Vec<usize> = g.node(*c).mv.iter().map(|(p, _)| *p).collect();
            if dom != nd.active {
                consistent = false;
                r.push(
                    Rule::MoveDomain,
                    format!("node {}", g.node(*c).label),
                    format!(
                        "move {} does not cover exactly the players active at {}",
                        g.move_string(&g.node(*c).mv),
                        nd.label
                    ),
                );
            }
        }
        if !consistent {
            continue;
        }
        let feasible: Vec<Vec<&str>> = nd
            .active
            .iter()
            .map(|&p| g.feasible(NodeId(ix), p))
            .collect();
        for (k, &p) in nd.active.iter().enumerate() {
            if feasible[k].len() < 2 {
                r.push(
                    Rule::MinActions,
                    format!("node {}", nd.label),
                    format!(
                        "player {} has {} feasible action(s)",
                        g.players()[p],
                        feasible[k].len()
                    ),
                );
            }
        }
        let expected: usize = feasible.iter().map(Vec::len).product();
        let distinct: BTreeSet<Vec<&str>> = nd
            .children
            .iter()
            .map(|c| g.node(*c).mv.iter().map(|(_, a)| a.as_str()).collect())
            .collect();
        if distinct.len() != nd.children.len() {
            r.push(
                Rule::Product,
                format!("node {}", nd.label),
                "two children share the same move profile",
            );
        } else if distinct.len() != expected {
            r.push(
                Rule::Product,
                format!("node {}", nd.label),
                format!(
                    "{} child profiles but the product of feasible sets has {}",
                    distinct.len(),
                    expected
                ),
            );
        }
    }
}

fn check_infosets(g: &GameStructure, r: &mut ValidationReport) {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for set in g.infosets() {
        let loc = format!("infoset {}", set.label);
        let owner = &g.players()[set.owner];
        let mut ok = true;
        for &m in &set.members {
            *count.entry((m.0, set.owner)).or_default() += 1;
            let nd = g.node(m);
            if nd.is_terminal() {
                ok = false;
                r.push(
                    Rule::InfosetMembership,
                    loc.clone(),
                    format!("member {} is terminal", nd.label),
                );
            } else if !g.is_active(m, set.owner) {
                ok = false;
                r.push(
                    Rule::InfosetMembership,
                    loc.clone(),
                    format!("player {owner} is not active at member {}", nd.label),
                );
            }
        }
        if !ok {
            continue;
        }
        let first = set.members[0];
        let f0 = g.feasible(first, set.owner);
        for &m in &set.members[1..] {
            if g.feasible(m, set.owner) != f0 {
                r.push(
                    Rule::Measurability,
                    loc.clone(),
                    format!(
                        "feasible actions at {} differ from those at {}",
                        g.node(m).label,
                        g.node(first).label
                    ),
                );
            }
        }
        for (i, &a) in set.members.iter().enumerate() {
            for &b in &set.members[i + 1..] {
                if g.precedes(a, b) || g.precedes(b, a) {
                    r.push(
                        Rule::AbsentMindedness,
                        loc.clone(),
                        format!(
                            "members {} and {} lie on one path",
                            g.node(a).label,
                            g.node(b).label
                        ),
                    );
                }
            }
        }
        let rec0 = g.record(set.owner, first);
        for &m in &set.members[1..] {
            if g.record(set.owner, m) != rec0 {
                r.push(
                    Rule::PerfectRecall,
                    loc.clone(),
                    format!(
                        "player {owner} recalls different histories at {} and {}",
                        g.node(first).label,
                        g.node(m).label
                    ),
                );
            }
        }
    }
    let mut dups: Vec<_> = count.into_iter().filter(|(_, c)| *c > 1).collect();
    dups.sort();
    for ((node, owner), _) in dups {
        r.push(
            Rule::InfosetMembership,
            format!("node {}", g.node(NodeId(node)).label),
            format!(
                "listed in more than one information set of player {}",
                g.players()[owner]
            ),
        );
    }
}
