use serde::{Deserialize, Serialize};

use crate::model::{GameStructure, InfosetId, NodeId};
use crate::natord;

/// `𝐡ᵢ ≪ᵢ 𝐡ᵢ′`: after `pivot` at `source`, play always continues at `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoalescingSite {
    pub player: usize,
    pub source: InfosetId,
    pub target: InfosetId,
    pub pivot: String,
}

/// `h ⋖ᵢ 𝐝ᵢ`: every path through `node` meets `dominating`, where the player moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimultanizingSite {
    pub player: usize,
    pub node: NodeId,
    pub dominating: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Site {
    Coalesce(CoalescingSite),
    Simultanize(SimultanizingSite),
}

/// A site described by labels, stable across a replay of the same steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SiteRef {
    Coalesce {
        player: String,
        source: String,
        target: String,
        pivot: String,
    },
    Simultanize {
        player: String,
        node: String,
        dominating: Vec<String>,
    },
}

impl CoalescingSite {
    pub fn describe(&self, g: &GameStructure) -> SiteRef {
        SiteRef::Coalesce {
            player: g.players()[self.player].clone(),
            source: g.infoset(self.source).label.clone(),
            target: g.infoset(self.target).label.clone(),
            pivot: self.pivot.clone(),
        }
    }

    /// Checks `Z(source, pivot) = Z(target)` and ownership.
    pub fn is_valid(&self, g: &GameStructure) -> bool {
        let n = g.infosets().len();
        if self.source.0 >= n || self.target.0 >= n || self.source == self.target {
            return false;
        }
        let (hs, ht) = (g.infoset(self.source), g.infoset(self.target));
        if hs.owner != self.player || ht.owner != self.player {
            return false;
        }
        match g.terminal_after_action(self.source, &self.pivot) {
            Ok(z) => z == g.infoset_terminals(self.target),
            Err(_) => false,
        }
    }
}

impl SimultanizingSite {
    pub fn describe(&self, g: &GameStructure) -> SiteRef {
        SiteRef::Simultanize {
            player: g.players()[self.player].clone(),
            node: g.node(self.node).label.clone(),
            dominating: self.dominating.iter().map(|d| g.node(*d).label.clone()).collect(),
        }
    }

    /// Checks inactivity at `node`, a single information set, strict descent
    /// and `Z(node) = Z(dominating)`.
    pub fn is_valid(&self, g: &GameStructure) -> bool {
        let n = g.node_count();
        if self.player >= g.players().len()
            || self.node.0 >= n
            || self.dominating.is_empty()
            || self.dominating.iter().any(|d| d.0 >= n)
        {
            return false;
        }
        if g.node(self.node).is_terminal() || g.is_active(self.node, self.player) {
            return false;
        }
        let Some(k) = g.infoset_of(self.dominating[0], self.player) else {
            return false;
        };
        if self
            .dominating
            .iter()
            .any(|d| g.infoset_of(*d, self.player) != Some(k) || !g.precedes(self.node, *d))
        {
            return false;
        }
        g.terminal_set(&self.dominating).ok() == Some(g.terminals_below(self.node))
    }
}

impl Site {
    pub fn describe(&self, g: &GameStructure) -> SiteRef {
        match self {
            Site::Coalesce(s) => s.describe(g),
            Site::Simultanize(s) => s.describe(g),
        }
    }

    pub fn player(&self) -> usize {
        match self {
            Site::Coalesce(s) => s.player,
            Site::Simultanize(s) => s.player,
        }
    }
}

impl SiteRef {
    /// Looks the described site up in `g`.
    pub fn resolve(&self, g: &GameStructure) -> Option<Site> {
        match self {
            SiteRef::Coalesce {
                player,
                source,
                target,
                pivot,
            } => {
                let site = CoalescingSite {
                    player: g.player_index(player)?,
                    source: g.infoset_by_label(source)?,
                    target: g.infoset_by_label(target)?,
                    pivot: pivot.clone(),
                };
                site.is_valid(g).then_some(Site::Coalesce(site))
            }
            SiteRef::Simultanize {
                player,
                node,
                dominating,
            } => {
                let site = SimultanizingSite {
                    player: g.player_index(player)?,
                    node: g.node_by_label(node)?,
                    dominating: dominating
                        .iter()
                        .map(|d| g.node_by_label(d))
                        .collect::<Option<Vec<_>>>()?,
                };
                site.is_valid(g).then_some(Site::Simultanize(site))
            }
        }
    }
}

/// All coalescing opportunities, ordered by player, source set and pivot.
pub fn find_coalescing_sites(g: &GameStructure) -> Vec<CoalescingSite> {
    let mut out = Vec::new();
    for (src_ix, src) in g.infosets().iter().enumerate() {
        let source = InfosetId(src_ix);
        let mut pivots: Vec<&String> = src.actions.iter().collect();
        pivots.sort_by(|a, b| natord::cmp(a, b));
        for a in pivots {
            let after = g.terminal_after_action(source, a).expect("feasible action");
            for t in g.infosets_of(src.owner) {
                if t != source && g.infoset_terminals(t) == after {
                    out.push(CoalescingSite {
                        player: src.owner,
                        source,
                        target: t,
                        pivot: a.clone(),
                    });
                }
            }
        }
    }
    out
}

/// All simultanizing opportunities, ordered by node then player.
pub fn find_simultanizing_sites(g: &GameStructure) -> Vec<SimultanizingSite> {
    let mut out = Vec::new();
    for (ix, nd) in g.nodes().iter().enumerate() {
        if nd.is_terminal() {
            continue;
        }
        let h = NodeId(ix);
        let below = g.terminals_below(h);
        for p in 0..g.players().len() {
            if g.is_active(h, p) {
                continue;
            }
            for k in g.infosets_of(p) {
                let d: Vec<NodeId> = g
                    .infoset(k)
                    .members
                    .iter()
                    .copied()
                    .filter(|m| g.precedes(h, *m))
                    .collect();
                if !d.is_empty() && g.terminal_set(&d).expect("nonempty") == below {
                    out.push(SimultanizingSite {
                        player: p,
                        node: h,
                        dominating: d,
                    });
                }
            }
        }
    }
    out
}

/// Both kinds, coalescing sites first.
pub fn find_sites(g: &GameStructure) -> Vec<Site> {
    find_coalescing_sites(g)
        .into_iter()
        .map(Site::Coalesce)
        .chain(find_simultanizing_sites(g).into_iter().map(Site::Simultanize))
        .collect()
}
