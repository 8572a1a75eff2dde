//! Tree rewriting shared by Coalescing and Simultanizing.
//!
//! Both transformations move player `i`'s choice at a set of target nodes
//! `T` up to a set of source nodes `S`. Below each affected child of a source,
//! the region down to `T` is rebuilt once per target action `b`: nodes in
//! between are replicated, and at a target node only the children where `i`
//! chose `b` survive, with `i` removed from their moves. A target node where
//! `i` moved alone disappears and its surviving child takes its place.
//!
//! New information sets follow the origin of each node: every replica of a
//! node joins the information set the node was in, so co-players cannot tell
//! the replicas apart.

use std::collections::{BTreeMap, HashSet};

use crate::error::GameError;
use crate::model::{GameBuilder, GameStructure, InfosetId, NodeId};

pub(super) enum Mode {
    /// Pivot display at the sources; the target displays may be renamed.
    Coalesce { pivot: String },
    Simultanize,
}

struct TNode {
    label: String,
    parent: Option<usize>,
    mv: Vec<(usize, String)>,
    origin: NodeId,
    children: usize,
}

pub(super) struct Lift<'g> {
    pub g: &'g GameStructure,
    pub player: usize,
    pub sources: Vec<NodeId>,
    pub targets: Vec<NodeId>,
    pub mode: Mode,
    /// Information set of `player` at the sources after the rewrite.
    pub source_set: InfosetId,
}

pub(super) struct Rewritten {
    pub game: GameStructure,
    pub node_map: Vec<(String, Vec<String>)>,
}

struct Run<'a, 'g> {
    lift: &'a Lift<'g>,
    sources: HashSet<NodeId>,
    targets: HashSet<NodeId>,
    /// Target actions as (display at the targets, display at the sources).
    actions: Vec<(String, String)>,
    out: Vec<TNode>,
    reserved: HashSet<String>,
}

impl<'a, 'g> Run<'a, 'g> {
    fn fresh(&mut self, base: String) -> String {
        let mut l = base;
        while self.reserved.contains(&l) {
            l.push('\'');
        }
        self.reserved.insert(l.clone());
        l
    }

    fn push(&mut self, label: String, parent: Option<usize>, mv: Vec<(usize, String)>, origin: NodeId) -> usize {
        if let Some(p) = parent {
            self.out[p].children += 1;
        }
        self.out.push(TNode {
            label,
            parent,
            mv,
            origin,
            children: 0,
        });
        self.out.len() - 1
    }

    fn copy(&mut self, n: NodeId, parent: Option<usize>, mv: Vec<(usize, String)>) -> Result<(), GameError> {
        let g = self.lift.g;
        let me = self.push(g.node(n).label.clone(), parent, mv, n);
        if self.sources.contains(&n) {
            return self.lift_source(n, me);
        }
        for &c in &g.node(n).children {
            self.copy(c, Some(me), g.node(c).mv.clone())?;
        }
        Ok(())
    }

    fn lift_source(&mut self, s: NodeId, me: usize) -> Result<(), GameError> {
        let g = self.lift.g;
        let i = self.lift.player;
        for &c in &g.node(s).children {
            let mv = &g.node(c).mv;
            if let Mode::Coalesce { pivot } = &self.lift.mode {
                if g.node(c).action_of(i) != Some(pivot.as_str()) {
                    self.copy(c, Some(me), mv.clone())?;
                    continue;
                }
            }
            for k in 0..self.actions.len() {
                let (b, shown) = self.actions[k].clone();
                let mut m: Vec<(usize, String)> = mv.iter().filter(|(p, _)| *p != i).cloned().collect();
                m.push((i, shown));
                m.sort_by_key(|(p, _)| *p);
                self.project(c, &b, Some(me), m)?;
            }
        }
        Ok(())
    }

    fn project(&mut self, n: NodeId, b: &str, parent: Option<usize>, mv: Vec<(usize, String)>) -> Result<(), GameError> {
        let g = self.lift.g;
        let i = self.lift.player;
        let nd = g.node(n);
        if self.targets.contains(&n) {
            let kept: Vec<NodeId> = nd
                .children
                .iter()
                .copied()
                .filter(|c| g.node(*c).action_of(i) == Some(b))
                .collect();
            if nd.active == [i] {
                debug_assert_eq!(kept.len(), 1);
                return self.copy(kept[0], parent, mv);
            }
            let label = self.fresh(format!("{}.{}", nd.label, b));
            let me = self.push(label, parent, mv, n);
            for c in kept {
                let m = g.node(c).mv.iter().filter(|(p, _)| *p != i).cloned().collect();
                self.copy(c, Some(me), m)?;
            }
            return Ok(());
        }
        if nd.is_terminal() {
            return Err(GameError::InvalidSite(format!(
                "terminal {} lies between the site and its targets",
                nd.label
            )));
        }
        let label = self.fresh(format!("{}.{}", nd.label, b));
        let me = self.push(label, parent, mv, n);
        for &c in &nd.children {
            self.project(c, b, Some(me), g.node(c).mv.clone())?;
        }
        Ok(())
    }
}

impl<'g> Lift<'g> {
    /// Target-action displays, renamed with primes where they would clash
    /// with the actions kept at the sources.
    fn actions(&self) -> Vec<(String, String)> {
        let g = self.g;
        let t = g
            .infoset_of(self.targets[0], self.player)
            .expect("player moves at the targets");
        let mut taken: HashSet<String> = match &self.mode {
            Mode::Coalesce { pivot } => g
                .infoset(self.source_set)
                .actions
                .iter()
                .filter(|a| *a != pivot)
                .cloned()
                .collect(),
            Mode::Simultanize => HashSet::new(),
        };
        g.infoset(t)
            .actions
            .iter()
            .map(|b| {
                let mut shown = b.clone();
                while taken.contains(&shown) {
                    shown.push('\'');
                }
                taken.insert(shown.clone());
                (b.clone(), shown)
            })
            .collect()
    }

    pub fn run(&self) -> Result<Rewritten, GameError> {
        let g = self.g;
        let mut run = Run {
            lift: self,
            sources: self.sources.iter().copied().collect(),
            targets: self.targets.iter().copied().collect(),
            actions: self.actions(),
            out: Vec::with_capacity(g.node_count() * 2),
            reserved: g.nodes().iter().map(|n| n.label.clone()).collect(),
        };
        run.copy(g.root(), None, Vec::new())?;
        let out = run.out;

        let mut active: Vec<Vec<usize>> = vec![Vec::new(); out.len()];
        for n in &out {
            if let Some(p) = n.parent {
                for (q, _) in &n.mv {
                    if !active[p].contains(q) {
                        active[p].push(*q);
                    }
                }
            }
        }
        let mut b = GameBuilder::new(g.players().iter().cloned());
        b.set_name(g.name().map(str::to_owned));
        let mut groups: BTreeMap<InfosetId, Vec<usize>> = BTreeMap::new();
        let mut node_map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (ix, n) in out.iter().enumerate() {
            let mv = n
                .mv
                .iter()
                .map(|(p, a)| (g.players()[*p].clone(), a.clone()))
                .collect();
            b.add_node(n.label.clone(), n.parent, mv);
            if n.children == 0 {
                if let Some(z) = &g.node(n.origin).terminal_name {
                    b.name_terminal(ix, z.clone());
                }
            }
            node_map
                .entry(g.node(n.origin).label.clone())
                .or_default()
                .push(n.label.clone());
            for &p in &active[ix] {
                let key = if p == self.player && run.sources.contains(&n.origin) {
                    self.source_set
                } else {
                    g.infoset_of(n.origin, p).ok_or_else(|| {
                        GameError::InvalidSite(format!(
                            "player {} gained a move at {}",
                            g.players()[p],
                            n.label
                        ))
                    })?
                };
                groups.entry(key).or_default().push(ix);
            }
        }
        for (k, members) in groups {
            let s = g.infoset(k);
            b.add_infoset(g.players()[s.owner].clone(), s.label.clone(), members);
        }
        let game = b.build()?;
        game.ensure_valid()?;
        let map = g
            .nodes()
            .iter()
            .map(|n| (n.label.clone(), node_map.remove(&n.label).unwrap_or_default()))
            .collect();
        Ok(Rewritten { game, node_map: map })
    }
}
