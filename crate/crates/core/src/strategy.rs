//! Pure strategies, the path function and strategy equivalence.
//!
//! Two strategies of a player are behaviorally equivalent when they lead to
//! the same terminal against every profile of the other players. Under perfect
//! recall this holds exactly when they reach the same own information sets and
//! choose alike there, which is what [`kuhn_equivalent`] checks and what the
//! reduced strategies are built from. [`behaviorally_equivalent`] is the
//! definitional brute force.

use std::collections::BTreeMap;

use crate::error::GameError;
use crate::model::{GameStructure, InfosetId, NodeId};

/// Choices of one player: an action display per information set.
pub type Choices = BTreeMap<InfosetId, String>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy {
    pub owner: usize,
    pub choices: Choices,
}

impl Strategy {
    /// Displays in information-set order joined by `.`, e.g. `y.a`.
    pub fn label(&self) -> String {
        join_displays(&self.choices)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedStrategy {
    pub owner: usize,
    /// Choices at the information sets this class can reach.
    pub choices: Choices,
    pub members: Vec<Strategy>,
    pub label: String,
}

fn join_displays(c: &Choices) -> String {
    c.values().map(String::as_str).collect::<Vec<_>>().join(".")
}

fn qualified(g: &GameStructure, c: &Choices) -> String {
    c.iter()
        .map(|(s, a)| format!("{}:{}", g.infoset(*s).label, a))
        .collect::<Vec<_>>()
        .join(".")
}

/// Labels for a list of reduced choice maps of one player. Plain display
/// signatures are used unless two of them coincide.
pub(crate) fn class_labels(g: &GameStructure, classes: &[Choices]) -> Vec<String> {
    let plain: Vec<String> = classes.iter().map(join_displays).collect();
    let mut sorted = plain.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() == plain.len() {
        plain
    } else {
        classes.iter().map(|c| qualified(g, c)).collect()
    }
}

fn player_sets(g: &GameStructure, player: usize) -> Vec<InfosetId> {
    g.infosets_of(player).collect()
}

/// `Sᵢ`: every assignment of a feasible action to each information set of `player`.
pub fn enumerate_strategies(g: &GameStructure, player: &str) -> Result<Vec<Strategy>, GameError> {
    let p = g.require_player(player)?;
    Ok(strategies_of(g, p))
}

pub(crate) fn strategies_of(g: &GameStructure, p: usize) -> Vec<Strategy> {
    let sets = player_sets(g, p);
    let mut out = vec![Choices::new()];
    for s in sets {
        let acts = &g.infoset(s).actions;
        out = out
            .into_iter()
            .flat_map(|c| {
                acts.iter().map(move |a| {
                    let mut c = c.clone();
                    c.insert(s, a.clone());
                    c
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|choices| Strategy { owner: p, choices })
        .collect()
}

/// Follows a profile of choice maps from the root. Every player active at a
/// visited node must have a choice for its information set there.
pub(crate) fn play_choices(g: &GameStructure, profile: &[&Choices]) -> Result<NodeId, GameError> {
    let mut h = g.root();
    loop {
        let nd = g.node(h);
        if nd.is_terminal() {
            return Ok(h);
        }
        let mut mv: Vec<(usize, &str)> = Vec::with_capacity(nd.active.len());
        for &p in &nd.active {
            let set = g.infoset_of(h, p).expect("active player has an information set");
            let a = profile[p].get(&set).ok_or_else(|| {
                GameError::BadProfile(format!(
                    "no choice for player {} at {}",
                    g.players()[p],
                    g.infoset(set).label
                ))
            })?;
            mv.push((p, a.as_str()));
        }
        h = g.child_by_move(h, &mv).ok_or_else(|| {
            GameError::BadProfile(format!("infeasible move at node {}", nd.label))
        })?;
    }
}

/// `ζ(s)`: the terminal reached by a full strategy profile (one per player, in player order).
pub fn play(g: &GameStructure, profile: &[Strategy]) -> Result<NodeId, GameError> {
    if profile.len() != g.players().len() {
        return Err(GameError::BadProfile(format!(
            "expected {} strategies, got {}",
            g.players().len(),
            profile.len()
        )));
    }
    for (p, s) in profile.iter().enumerate() {
        if s.owner != p {
            return Err(GameError::BadProfile(format!(
                "strategy {} belongs to player {}, expected {}",
                s.label(),
                g.players().get(s.owner).map_or("?", String::as_str),
                g.players()[p]
            )));
        }
    }
    let refs: Vec<&Choices> = profile.iter().map(|s| &s.choices).collect();
    play_choices(g, &refs)
}

fn same_owner(g: &GameStructure, s: &Strategy, t: &Strategy) -> Result<(), GameError> {
    if s.owner != t.owner {
        return Err(GameError::StrategyOwnerMismatch(
            g.players()[s.owner].clone(),
            g.players()[t.owner].clone(),
        ));
    }
    Ok(())
}

/// Definition-level check: same terminal against every co-player profile.
pub fn behaviorally_equivalent(g: &GameStructure, s: &Strategy, t: &Strategy) -> Result<bool, GameError> {
    same_owner(g, s, t)?;
    let i = s.owner;
    let all: Vec<Vec<Strategy>> = (0..g.players().len())
        .map(|p| if p == i { Vec::new() } else { strategies_of(g, p) })
        .collect();
    let mut idx = vec![0usize; all.len()];
    loop {
        let mut prof_s: Vec<&Choices> = Vec::with_capacity(all.len());
        let mut prof_t: Vec<&Choices> = Vec::with_capacity(all.len());
        for p in 0..all.len() {
            if p == i {
                prof_s.push(&s.choices);
                prof_t.push(&t.choices);
            } else {
                prof_s.push(&all[p][idx[p]].choices);
                prof_t.push(&all[p][idx[p]].choices);
            }
        }
        if play_choices(g, &prof_s)? != play_choices(g, &prof_t)? {
            return Ok(false);
        }
        if !advance(&mut idx, |p| if p == i { 1 } else { all[p].len() }) {
            return Ok(true);
        }
    }
}

/// Odometer step over mixed radices; false once every index wrapped.
pub(crate) fn advance(idx: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < radix(p) {
            return true;
        }
        idx[p] = 0;
    }
    false
}

/// Whether `choices` is compatible with the owner's record at the members of `set`.
pub(crate) fn reaches(g: &GameStructure, choices: &Choices, set: InfosetId) -> bool {
    let info = g.infoset(set);
    // records agree across members under perfect recall
    g.record(info.owner, info.members[0])
        .iter()
        .all(|(k, a)| choices.get(k) == Some(a))
}

/// The part of `s` that matters: choices at the information sets it reaches.
pub(crate) fn reduce(g: &GameStructure, s: &Strategy) -> Choices {
    s.choices
        .iter()
        .filter(|(k, _)| reaches(g, &s.choices, **k))
        .map(|(k, a)| (*k, a.clone()))
        .collect()
}

/// Same reachable information sets, same choices there.
pub fn kuhn_equivalent(g: &GameStructure, s: &Strategy, t: &Strategy) -> Result<bool, GameError> {
    same_owner(g, s, t)?;
    Ok(reduce(g, s) == reduce(g, t))
}

/// Reduced choice maps of `player`, enumerated directly without listing `Sᵢ`.
/// Information sets are visited in canonical order, which places every set
/// after the sets in its record.
pub(crate) fn reduced_choices(g: &GameStructure, player: usize) -> Vec<Choices> {
    let sets = player_sets(g, player);
    let mut out = Vec::new();
    let mut cur = Choices::new();
    fn rec(g: &GameStructure, sets: &[InfosetId], k: usize, cur: &mut Choices, out: &mut Vec<Choices>) {
        let Some(&s) = sets.get(k) else {
            out.push(cur.clone());
            return;
        };
        if !reaches(g, cur, s) {
            rec(g, sets, k + 1, cur, out);
            return;
        }
        for a in &g.infoset(s).actions {
            cur.insert(s, a.clone());
            rec(g, sets, k + 1, cur, out);
        }
        cur.remove(&s);
    }
    rec(g, &sets, 0, &mut cur, &mut out);
    out
}

/// `𝒮ᵢ = Sᵢ/∼ᵢ`, with each class listing its member strategies.
pub fn reduced_strategies(g: &GameStructure, player: &str) -> Result<Vec<ReducedStrategy>, GameError> {
    let p = g.require_player(player)?;
    let mut classes: BTreeMap<Choices, Vec<Strategy>> = BTreeMap::new();
    for s in strategies_of(g, p) {
        classes.entry(reduce(g, &s)).or_default().push(s);
    }
    let keys: Vec<Choices> = classes.keys().cloned().collect();
    let labels = class_labels(g, &keys);
    let mut out: Vec<ReducedStrategy> = classes
        .into_iter()
        .zip(labels)
        .map(|((choices, members), label)| ReducedStrategy {
            owner: p,
            choices,
            members,
            label,
        })
        .collect();
    out.sort_by(|a, b| crate::natord::cmp(&a.label, &b.label));
    Ok(out)
}

/// `𝒮ᵢ(𝐡ᵢ)`: the reduced strategies that can reach `set`.
pub fn consistent_strategies(g: &GameStructure, player: &str, set: InfosetId) -> Result<Vec<ReducedStrategy>, GameError> {
    let p = g.require_player(player)?;
    let info = g
        .infosets()
        .get(set.0)
        .ok_or_else(|| GameError::UnknownInfoset(format!("#{}", set.0)))?;
    if info.owner != p {
        return Err(GameError::OwnerMismatch {
            infoset: info.label.clone(),
            player: player.to_owned(),
        });
    }
    Ok(reduced_strategies(g, player)?
        .into_iter()
        .filter(|r| reaches(g, &r.choices, set))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn labels(v: &[Strategy]) -> Vec<String> {
        v.iter().map(Strategy::label).collect()
    }

    fn by_label(g: &GameStructure, player: &str, label: &str) -> Strategy {
        enumerate_strategies(g, player)
            .unwrap()
            .into_iter()
            .find(|s| s.label() == label)
            .unwrap()
    }

    #[test]
    fn strategy_sets_follow_fixtures() {
        let g = fixtures::load("fig1_left");
        assert_eq!(labels(&enumerate_strategies(&g, "1").unwrap()), ["x.a", "x.b", "y.a", "y.b"]);
        let g = fixtures::load("fig1_right");
        let mut l = labels(&enumerate_strategies(&g, "1").unwrap());
        l.sort();
        assert_eq!(l, ["a", "b", "x"]);
        let g = fixtures::load("fig2_left");
        assert_eq!(labels(&enumerate_strategies(&g, "2").unwrap()), ["a", "b"]);
        assert!(matches!(enumerate_strategies(&g, "9"), Err(GameError::UnknownPlayer(_))));
    }

    #[test]
    fn play_follows_fixtures() {
        let g = fixtures::load("fig1_left");
        let z = play(&g, &[by_label(&g, "1", "y.a")]).unwrap();
        assert_eq!(g.terminal_name(z), "z2");

        let g = fixtures::load("fig2_left");
        let z = play(&g, &[by_label(&g, "1", "x"), by_label(&g, "2", "a")]).unwrap();
        assert_eq!(g.terminal_name(z), "z1");

        let g = fixtures::load("fig3");
        for s3 in enumerate_strategies(&g, "3").unwrap() {
            let z = play(&g, &[by_label(&g, "1", "u"), by_label(&g, "2", "l"), s3]).unwrap();
            assert_eq!(g.terminal_name(z), "z1");
        }
        assert!(play(&g, &[by_label(&g, "1", "u")]).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let g = fixtures::load("fig1_left");
        let xa = by_label(&g, "1", "x.a");
        let xb = by_label(&g, "1", "x.b");
        let ya = by_label(&g, "1", "y.a");
        let yb = by_label(&g, "1", "y.b");
        assert!(behaviorally_equivalent(&g, &xa, &xb).unwrap());
        assert!(!behaviorally_equivalent(&g, &ya, &yb).unwrap());
        assert!(behaviorally_equivalent(&g, &ya, &ya).unwrap());
        assert!(kuhn_equivalent(&g, &xa, &xb).unwrap());
        assert!(!kuhn_equivalent(&g, &ya, &yb).unwrap());

        let g2 = fixtures::load("fig2_left");
        let a = by_label(&g2, "2", "a");
        let b = by_label(&g2, "2", "b");
        assert!(!kuhn_equivalent(&g2, &a, &b).unwrap());
        let x = by_label(&g2, "1", "x");
        assert!(matches!(
            kuhn_equivalent(&g2, &a, &x),
            Err(GameError::StrategyOwnerMismatch(..))
        ));
    }

    #[test]
    fn reduced_strategy_classes() {
        let g = fixtures::load("fig1_left");
        let r = reduced_strategies(&g, "1").unwrap();
        let view: Vec<(String, Vec<String>)> = r
            .iter()
            .map(|c| (c.label.clone(), labels(&c.members)))
            .collect();
        assert_eq!(
            view,
            [
                ("x".to_owned(), vec!["x.a".to_owned(), "x.b".to_owned()]),
                ("y.a".to_owned(), vec!["y.a".to_owned()]),
                ("y.b".to_owned(), vec!["y.b".to_owned()]),
            ]
        );

        let g = fixtures::load("fig7_right");
        let r: Vec<String> = reduced_strategies(&g, "1").unwrap().into_iter().map(|c| c.label).collect();
        assert_eq!(r, ["a", "b", "u"]);

        let g = fixtures::load("fig2_left");
        for c in reduced_strategies(&g, "2").unwrap() {
            assert_eq!(c.members.len(), 1);
        }
    }

    #[test]
    fn direct_enumeration_matches_classes() {
        for name in fixtures::GAME_NAMES {
            let g = fixtures::load(name);
            for (p, pname) in g.players().iter().enumerate() {
                let mut direct = reduced_choices(&g, p);
                direct.sort();
                let classes: Vec<Choices> = reduced_strategies(&g, pname)
                    .unwrap()
                    .into_iter()
                    .map(|c| c.choices)
                    .collect();
                let mut classes = classes;
                classes.sort();
                assert_eq!(direct, classes, "{name} player {pname}");
            }
        }
    }

    #[test]
    fn consistent_strategies_examples() {
        let g = fixtures::load("fig1_left");
        let y = g.node_by_label("y").unwrap();
        let post_y = g.infoset_of(y, 0).unwrap();
        let l: Vec<String> = consistent_strategies(&g, "1", post_y)
            .unwrap()
            .into_iter()
            .map(|c| c.label)
            .collect();
        assert_eq!(l, ["y.a", "y.b"]);
        let root = g.infoset_of(g.root(), 0).unwrap();
        assert_eq!(consistent_strategies(&g, "1", root).unwrap().len(), 3);

        let g4 = fixtures::load("fig4_left");
        let bottom = g4.infoset_by_label("2bot").unwrap();
        let top = g4.infoset_by_label("2top").unwrap();
        let c = consistent_strategies(&g4, "2", bottom).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|r| r.choices[&top] == "b"));
        assert!(matches!(
            consistent_strategies(&g4, "3", bottom),
            Err(GameError::OwnerMismatch { .. })
        ));
    }

    #[test]
    fn kuhn_matches_definition_on_fixtures() {
        for name in fixtures::GAME_NAMES {
            let g = fixtures::load(name);
            for p in 0..g.players().len() {
                let all = strategies_of(&g, p);
                for s in &all {
                    for t in &all {
                        assert_eq!(
                            kuhn_equivalent(&g, s, t).unwrap(),
                            behaviorally_equivalent(&g, s, t).unwrap(),
                            "{name}: {} vs {}",
                            s.label(),
                            t.label()
                        );
                    }
                }
            }
        }
    }
}
