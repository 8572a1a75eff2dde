//! Behavioral equivalence of game structures, isomorphism tests, and the
//! reconstruction of the minimal game from a reduced normal form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::{isomorphism, Graph};
use crate::model::GameStructure;
use crate::natord;
use crate::normal_form::{reduced_normal_form, ReducedNormalForm};
use crate::reduction::minimize;
use crate::transform::TransformTrace;

mod reconstruct;

pub use reconstruct::{reconstruct, ReconstructError};

/// Per-player strategy bijections and a terminal bijection between two forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormIsomorphism {
    /// Player of the second form matched to each player of the first.
    pub players: Vec<String>,
    pub strategy_maps: Vec<BTreeMap<String, String>>,
    pub terminal_map: BTreeMap<String, String>,
}

impl NormalFormIsomorphism {
    /// Recomputes `g(ζ̃(s)) = ζ̃′(f(s))` for every profile, and bijectivity.
    pub fn verify(&self, a: &ReducedNormalForm, b: &ReducedNormalForm) -> bool {
        let n = a.players().len();
        if b.players().len() != n || self.players.len() != n || self.strategy_maps.len() != n {
            return false;
        }
        let Some(pmap) = self
            .players
            .iter()
            .map(|p| b.players().iter().position(|q| q == p))
            .collect::<Option<Vec<usize>>>()
        else {
            return false;
        };
        if pmap.iter().collect::<BTreeSet<_>>().len() != n {
            return false;
        }
        let bij = |m: &BTreeMap<String, String>, from: &[String], to: &[String]| {
            m.len() == from.len()
                && from.iter().all(|x| m.get(x).is_some_and(|y| to.contains(y)))
                && m.values().collect::<BTreeSet<_>>().len() == to.len()
        };
        if !bij(&self.terminal_map, a.terminals(), b.terminals()) {
            return false;
        }
        let mut smaps: Vec<Vec<usize>> = Vec::with_capacity(n);
        for p in 0..n {
            let (sa, sb) = (a.strategies(p), b.strategies(pmap[p]));
            if !bij(&self.strategy_maps[p], sa, sb) {
                return false;
            }
            smaps.push(
                sa.iter()
                    .map(|s| sb.iter().position(|t| *t == self.strategy_maps[p][s]).unwrap())
                    .collect(),
            );
        }
        let zb: BTreeMap<&str, usize> = b
            .terminals()
            .iter()
            .enumerate()
            .map(|(i, z)| (z.as_str(), i))
            .collect();
        (0..a.profile_count()).all(|pos| {
            let prof = a.profile_at(pos);
            let mut image = vec![0; n];
            for p in 0..n {
                image[pmap[p]] = smaps[p][prof[p]];
            }
            let za = &a.terminals()[a.outcomes()[pos]];
            zb[self.terminal_map[za].as_str()] == b.outcome(&image)
        })
    }

    pub fn inverse(&self, a: &ReducedNormalForm) -> NormalFormIsomorphism {
        let flip = |m: &BTreeMap<String, String>| m.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
        let n = self.players.len();
        let mut players = vec![String::new(); n];
        let mut strategy_maps = vec![BTreeMap::new(); n];
        let mut order: Vec<(String, usize)> = self.players.iter().cloned().zip(0..n).collect();
        order.sort_by(|x, y| natord::cmp(&x.0, &y.0));
        for (k, (_, p)) in order.into_iter().enumerate() {
            players[k] = a.players()[p].clone();
            strategy_maps[k] = flip(&self.strategy_maps[p]);
        }
        NormalFormIsomorphism {
            players,
            strategy_maps,
            terminal_map: flip(&self.terminal_map),
        }
    }
}

#[derive(Default)]
struct Palette(BTreeMap<(u8, u64, u64), u32>);

impl Palette {
    fn color(&mut self, kind: u8, a: u64, b: u64) -> u32 {
        let n = self.0.len() as u32;
        *self.0.entry((kind, a, b)).or_insert(n)
    }
}

struct RnfGraph {
    graph: Graph,
    strategy: Vec<(usize, usize)>,
    terminal_base: usize,
    player_base: usize,
}

fn rnf_graph(nf: &ReducedNormalForm, pal: &mut Palette, permute_players: bool) -> RnfGraph {
    let mut g = Graph::default();
    let n = nf.players().len();
    let player_base = g.len();
    for p in 0..n {
        let c = pal.color(0, if permute_players { 0 } else { p as u64 }, 0);
        g.add_vertex(c);
    }
    let mut sid: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut strategy = Vec::new();
    for p in 0..n {
        let mut ids = Vec::new();
        for k in 0..nf.strategies(p).len() {
            let v = g.add_vertex(pal.color(1, 0, 0));
            g.add_edge(v, player_base + p, 0);
            ids.push(v);
            strategy.push((p, k));
        }
        sid.push(ids);
    }
    let terminal_base = g.len();
    for _ in nf.terminals() {
        g.add_vertex(pal.color(3, 0, 0));
    }
    for pos in 0..nf.profile_count() {
        let cell = g.add_vertex(pal.color(2, 0, 0));
        for (p, k) in nf.profile_at(pos).into_iter().enumerate() {
            g.add_edge(cell, sid[p][k], 1);
        }
        g.add_edge(cell, terminal_base + nf.outcomes()[pos], 2);
    }
    RnfGraph {
        graph: g,
        strategy,
        terminal_base,
        player_base,
    }
}

/// An isomorphism of reduced normal forms with players matched by name.
pub fn rnf_isomorphic(a: &ReducedNormalForm, b: &ReducedNormalForm) -> Option<NormalFormIsomorphism> {
    if a.players() != b.players() {
        return None;
    }
    rnf_isomorphism(a, b, false)
}

/// Like [`rnf_isomorphic`], but players may also be permuted.
pub fn rnf_isomorphic_permuting_players(a: &ReducedNormalForm, b: &ReducedNormalForm) -> Option<NormalFormIsomorphism> {
    rnf_isomorphism(a, b, true)
}

fn rnf_isomorphism(a: &ReducedNormalForm, b: &ReducedNormalForm, permute: bool) -> Option<NormalFormIsomorphism> {
    if a.players().len() != b.players().len() || a.terminals().len() != b.terminals().len() {
        return None;
    }
    let mut sa = a.sizes();
    let mut sb = b.sizes();
    if permute {
        sa.sort_unstable();
        sb.sort_unstable();
    }
    if sa != sb {
        return None;
    }
    let mut pal = Palette::default();
    let ga = rnf_graph(a, &mut pal, permute);
    let gb = rnf_graph(b, &mut pal, permute);
    let f = isomorphism(&ga.graph, &gb.graph)?;
    let n = a.players().len();
    let players: Vec<String> = (0..n)
        .map(|p| b.players()[f[ga.player_base + p] - gb.player_base].clone())
        .collect();
    let mut strategy_maps = vec![BTreeMap::new(); n];
    let sbase = ga.player_base + n;
    for (off, &(p, k)) in ga.strategy.iter().enumerate() {
        let (q, l) = gb.strategy[f[sbase + off] - sbase];
        debug_assert_eq!(b.players()[q], players[p]);
        strategy_maps[p].insert(a.strategies(p)[k].clone(), b.strategies(q)[l].clone());
    }
    let terminal_map = (0..a.terminals().len())
        .map(|z| {
            (
                a.terminals()[z].clone(),
                b.terminals()[f[ga.terminal_base + z] - gb.terminal_base].clone(),
            )
        })
        .collect();
    let iso = NormalFormIsomorphism {
        players,
        strategy_maps,
        terminal_map,
    };
    debug_assert!(iso.verify(a, b));
    Some(iso)
}

fn game_graph(g: &GameStructure, pal: &mut Palette) -> Graph {
    let mut out = Graph::default();
    for (ix, nd) in g.nodes().iter().enumerate() {
        let mask = nd.active.iter().fold(0u64, |m, p| m | 1 << p);
        out.add_vertex(pal.color(10, mask, (ix == 0) as u64));
    }
    for (ix, nd) in g.nodes().iter().enumerate() {
        for c in &nd.children {
            out.add_edge(ix, c.0, 0);
        }
    }
    let mut action_vertex: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for (sx, s) in g.infosets().iter().enumerate() {
        let v = out.add_vertex(pal.color(11, s.owner as u64, 0));
        for m in &s.members {
            out.add_edge(m.0, v, 1);
        }
        for a in &s.actions {
            let w = out.add_vertex(pal.color(12, s.owner as u64, 0));
            out.add_edge(w, v, 2);
            action_vertex.insert((sx, a.as_str()), w);
        }
    }
    for (ix, nd) in g.nodes().iter().enumerate() {
        let Some(parent) = nd.parent else { continue };
        for (p, a) in &nd.mv {
            let s = g.infoset_of(parent, *p).expect("mover has an information set");
            out.add_edge(ix, action_vertex[&(s.0, a.as_str())], 3 + *p as u32);
        }
    }
    out
}

/// Structural isomorphism with players fixed; action and terminal labels are free.
pub fn game_isomorphic(a: &GameStructure, b: &GameStructure) -> bool {
    if a.players() != b.players()
        || a.node_count() != b.node_count()
        || a.infosets().len() != b.infosets().len()
        || a.terminals().len() != b.terminals().len()
    {
        return false;
    }
    let mut pal = Palette::default();
    let ga = game_graph(a, &mut pal);
    let gb = game_graph(b, &mut pal);
    isomorphism(&ga, &gb).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Minimal,
    Direct,
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Minimal => "minimal",
            Method::Direct => "direct",
            Method::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub method: Method,
    pub isomorphism: Option<NormalFormIsomorphism>,
    /// Reductions of both inputs to their minimal games.
    pub traces: Option<(TransformTrace, TransformTrace)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("methods disagree: direct says {direct}, minimal says {minimal}")]
    Disagreement { direct: bool, minimal: bool },
}

/// Decides whether two structures share their reduced normal form up to isomorphism.
pub fn decide_equivalence(a: &GameStructure, b: &GameStructure, method: Method) -> Result<EquivalenceVerdict, EquivalenceError> {
    let direct = || rnf_isomorphic(&reduced_normal_form(a), &reduced_normal_form(b));
    let minimal = || {
        let (ra, rb) = (minimize(a), minimize(b));
        let eq = game_isomorphic(&ra.minimal_game, &rb.minimal_game);
        (eq, (ra.trace, rb.trace))
    };
    Ok(match method {
        Method::Direct => {
            let iso = direct();
            EquivalenceVerdict {
                equivalent: iso.is_some(),
                method,
                isomorphism: iso,
                traces: None,
            }
        }
        Method::Minimal => {
            let (eq, traces) = minimal();
            EquivalenceVerdict {
                equivalent: eq,
                method,
                isomorphism: None,
                traces: Some(traces),
            }
        }
        Method::Both => {
            let iso = direct();
            let (eq, traces) = minimal();
            if iso.is_some() != eq {
                return Err(EquivalenceError::Disagreement {
                    direct: iso.is_some(),
                    minimal: eq,
                });
            }
            EquivalenceVerdict {
                equivalent: eq,
                method,
                isomorphism: iso,
                traces: Some(traces),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::reduction::is_minimal;

    fn rnf(name: &str) -> ReducedNormalForm {
        reduced_normal_form(&fixtures::load(name))
    }

    #[test]
    fn fig1_forms_are_isomorphic() {
        let (a, b) = (rnf("fig1_left"), rnf("fig1_right"));
        let iso = rnf_isomorphic(&a, &b).unwrap();
        assert!(iso.verify(&a, &b));
        assert_eq!(iso.strategy_maps[0].len(), 3);
        let back = iso.inverse(&a);
        assert!(back.verify(&b, &a));
    }

    #[test]
    fn fig2_forms_are_isomorphic() {
        let (a, b) = (rnf("fig2_left"), rnf("fig2_right"));
        assert!(rnf_isomorphic(&a, &b).is_some_and(|i| i.verify(&a, &b)));
    }

    #[test]
    fn repeated_outcome_breaks_isomorphism() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let a = ReducedNormalForm::new(s(&["1", "2"]), vec![s(&["a", "b"]), s(&["x", "y"])], s(&["z1", "z2", "z3", "z4"]), vec![0, 1, 2, 3]).unwrap();
        let b = ReducedNormalForm::new(s(&["1", "2"]), vec![s(&["a", "b"]), s(&["x", "y"])], s(&["z1", "z2", "z3"]), vec![0, 1, 2, 2]).unwrap();
        assert!(rnf_isomorphic(&a, &b).is_none());
        let c = ReducedNormalForm::new(s(&["1", "3"]), vec![s(&["a", "b"]), s(&["x", "y"])], s(&["z1", "z2", "z3", "z4"]), vec![0, 1, 2, 3]).unwrap();
        assert!(rnf_isomorphic(&a, &c).is_none());
        assert!(rnf_isomorphic_permuting_players(&a, &c).is_some());
    }

    #[test]
    fn forms_that_differ_only_by_transposition() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        // three strategies against two: only with players swapped do these match
        let a = ReducedNormalForm::new(s(&["1", "2"]), vec![s(&["a", "b", "c"]), s(&["x", "y"])], s(&["z1", "z2", "z3", "z4", "z5", "z6"]), (0..6).collect()).unwrap();
        let b = ReducedNormalForm::new(s(&["1", "2"]), vec![s(&["a", "b"]), s(&["x", "y", "w"])], s(&["z1", "z2", "z3", "z4", "z5", "z6"]), (0..6).collect()).unwrap();
        assert!(rnf_isomorphic(&a, &b).is_none());
        let iso = rnf_isomorphic_permuting_players(&a, &b).unwrap();
        assert_eq!(iso.players, ["2", "1"]);
        assert!(iso.verify(&a, &b));
    }

    #[test]
    fn decide_examples() {
        for (x, y) in [("fig1_left", "fig1_right"), ("fig2_left", "fig2_right")] {
            let (a, b) = (fixtures::load(x), fixtures::load(y));
            for m in [Method::Direct, Method::Minimal, Method::Both] {
                assert!(decide_equivalence(&a, &b, m).unwrap().equivalent, "{x} {m}");
            }
        }
        let (a, b) = (fixtures::load("fig1_right"), fixtures::load("fig2_right"));
        let v = decide_equivalence(&a, &b, Method::Both).unwrap();
        assert!(!v.equivalent);
    }

    #[test]
    fn game_isomorphism_examples() {
        let g = fixtures::load("fig7_right");
        assert!(game_isomorphic(&g, &g));
        let relabeled = crate::io::parse_egs(
            &crate::io::serialize_egs(&g)
                .replace(":a", ":p")
                .replace(":x", ":q")
                .replace("=z1", "=w1"),
        )
        .unwrap();
        assert!(game_isomorphic(&g, &relabeled));
        assert!(!game_isomorphic(&fixtures::load("fig1_right"), &g));
        assert!(!game_isomorphic(&fixtures::load("fig5_left"), &fixtures::load("fig5_right")));
    }

    #[test]
    fn fig8_reconstructs_fig7_right() {
        let g = reconstruct(&fixtures::fig8()).unwrap();
        assert!(game_isomorphic(&g, &fixtures::load("fig7_right")));
        let p1 = g.player_index("1").unwrap();
        let p2 = g.player_index("2").unwrap();
        assert_eq!(g.feasible(g.root(), p1), ["a", "b", "u"]);
        assert!(!g.is_active(g.root(), p2));
        assert!(is_minimal(&g));
    }

    #[test]
    fn information_set_spanning_uneven_branches() {
        // player 2 cannot tell a2 from a3 but moves again only after a3
        let g = crate::io::parse_egs(
            "players 1 2
node n0 root
node n2 parent=n0 move=1:a1
node n12 parent=n0 move=1:a2
node n13 parent=n0 move=1:a3
node n3 parent=n12 move=2:a4
node n5 parent=n12 move=2:a5
node n4 parent=n13 move=2:a4
node n6 parent=n13 move=2:a5
node n7 parent=n4 move=2:a6
node n8 parent=n4 move=2:a7
terminal n2 name=z1
terminal n3 name=z2
terminal n5 name=z3
terminal n6 name=z4
terminal n7 name=z5
terminal n8 name=z6
infoset 2 h2 = n12 n13
",
        )
        .unwrap();
        assert!(is_minimal(&g));
        let r = reconstruct(&reduced_normal_form(&g)).unwrap();
        assert!(game_isomorphic(&r, &g));
    }

    #[test]
    fn single_profile_is_rejected() {
        let nf = ReducedNormalForm::new(vec!["1".into()], vec![vec!["a".into()]], vec!["z1".into()], vec![0]).unwrap();
        assert_eq!(reconstruct(&nf), Err(ReconstructError::Degenerate));
    }

    #[test]
    fn unrealizable_forms_are_reported() {
        // matching pennies outcomes with a shared terminal on the diagonal
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let nf = ReducedNormalForm::new(s(&["1", "2"]), vec![s(&["a", "b"]), s(&["x", "y"])], s(&["z1", "z2", "z3"]), vec![0, 1, 2, 0]).unwrap();
        let err = reconstruct(&nf).unwrap_err();
        assert!(err.to_string().contains("not the reduced normal form"), "{err}");
    }

    #[test]
    fn reconstruction_matches_minimal_games_of_fixtures() {
        for name in fixtures::GAME_NAMES {
            let g = fixtures::load(name);
            let r = reconstruct(&reduced_normal_form(&g)).unwrap();
            let m = minimize(&g).minimal_game;
            assert!(game_isomorphic(&r, &m), "{name}");
            let again = reconstruct(&reduced_normal_form(&r)).unwrap();
            assert!(game_isomorphic(&again, &r), "{name}");
        }
    }
}
