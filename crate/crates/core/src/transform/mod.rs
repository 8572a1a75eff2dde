//! The invariant transformations: Coalescing (γ) and Simultanizing (σ), plus
//! the splitting of a simultaneous move used for classical interchanges.

mod sites;
mod surgery;
mod trace;

use std::collections::HashSet;

pub use sites::{
    find_coalescing_sites, find_simultanizing_sites, find_sites, CoalescingSite, SimultanizingSite, Site, SiteRef,
};
pub use trace::{TraceStep, TransformTrace};

use crate::error::GameError;
use crate::model::{GameBuilder, GameStructure, NodeId};
use surgery::{Lift, Mode};

fn identity_terminals(g: &GameStructure) -> Vec<(String, String)> {
    g.terminals()
        .iter()
        .map(|t| (g.terminal_name(*t).to_owned(), g.terminal_name(*t).to_owned()))
        .collect()
}

/// `γ(G; 𝐡ᵢ, 𝐡ᵢ′)`: the choice at `target` is made at `source` instead of
/// the pivot action.
pub fn coalesce(g: &GameStructure, site: &CoalescingSite) -> Result<(GameStructure, TraceStep), GameError> {
    if !site.is_valid(g) {
        return Err(GameError::InvalidSite(format!("{:?}", site.describe(g))));
    }
    let r = Lift {
        g,
        player: site.player,
        sources: g.infoset(site.source).members.clone(),
        targets: g.infoset(site.target).members.clone(),
        mode: Mode::Coalesce {
            pivot: site.pivot.clone(),
        },
        source_set: site.source,
    }
    .run()?;
    let step = TraceStep {
        site: site.describe(g),
        node_map: r.node_map,
        terminal_map: identity_terminals(g),
    };
    Ok((r.game, step))
}

/// `σ(G; h, 𝐝ᵢ)`: the player's move at `dominating` is shifted back to `node`.
pub fn simultanize(g: &GameStructure, site: &SimultanizingSite) -> Result<(GameStructure, TraceStep), GameError> {
    if !site.is_valid(g) {
        return Err(GameError::InvalidSite(format!("{:?}", site.describe(g))));
    }
    let k = g
        .infoset_of(site.dominating[0], site.player)
        .expect("checked by is_valid");
    let r = Lift {
        g,
        player: site.player,
        sources: vec![site.node],
        targets: site.dominating.clone(),
        mode: Mode::Simultanize,
        source_set: k,
    }
    .run()?;
    let step = TraceStep {
        site: site.describe(g),
        node_map: r.node_map,
        terminal_map: identity_terminals(g),
    };
    Ok((r.game, step))
}

pub fn apply(g: &GameStructure, site: &Site) -> Result<(GameStructure, TraceStep), GameError> {
    match site {
        Site::Coalesce(s) => coalesce(g, s),
        Site::Simultanize(s) => simultanize(g, s),
    }
}

/// Splits the simultaneous move at `node`: `first` move there, the other
/// movers move next without observing them. Every node of the split player
/// set is replaced in its information set by all of the new intermediate
/// nodes.
pub fn sequentialize(g: &GameStructure, node: NodeId, first: &[usize]) -> Result<GameStructure, GameError> {
    let nd = g.node(node);
    let movers = g.active_players(node)?;
    if first.is_empty() || first.iter().any(|p| !movers.contains(p)) {
        return Err(GameError::NoResequencing(format!(
            "first movers must be a nonempty subset of the players active at {}",
            nd.label
        )));
    }
    if movers.iter().all(|p| first.contains(p)) {
        return Err(GameError::NoResequencing(format!(
            "no player would move second at {}",
            nd.label
        )));
    }
    let mut b = GameBuilder::new(g.players().iter().cloned());
    b.set_name(g.name().map(str::to_owned));
    let mut reserved: HashSet<String> = g.nodes().iter().map(|n| n.label.clone()).collect();
    let mut new_of: Vec<usize> = vec![usize::MAX; g.node_count()];
    let mut intermediates: Vec<(Vec<(String, String)>, usize)> = Vec::new();
    let named = |mv: &[(usize, String)]| -> Vec<(String, String)> {
        mv.iter()
            .map(|(p, a)| (g.players()[*p].clone(), a.clone()))
            .collect()
    };
    for (ix, n) in g.nodes().iter().enumerate() {
        let parent = match n.parent {
            None => None,
            Some(p) if p == node => {
                let head: Vec<(usize, String)> = n.mv.iter().filter(|(q, _)| first.contains(q)).cloned().collect();
                let tail: Vec<(usize, String)> = n.mv.iter().filter(|(q, _)| !first.contains(q)).cloned().collect();
                let base = format!(
                    "{}.{}",
                    nd.label,
                    head.iter().map(|(_, a)| a.as_str()).collect::<Vec<_>>().join(".")
                );
                let existing = intermediates
                    .iter()
                    .find(|(h, _)| *h == named(&head))
                    .map(|(_, m)| *m);
                let mid = match existing {
                    Some(m) => m,
                    None => {
                        let mut label = base;
                        while reserved.contains(&label) {
                            label.push('\'');
                        }
                        reserved.insert(label.clone());
                        let m = b.add_node(label, Some(new_of[node.0]), named(&head));
                        intermediates.push((named(&head), m));
                        m
                    }
                };
                let me = b.add_node(n.label.clone(), Some(mid), named(&tail));
                new_of[ix] = me;
                if n.is_terminal() {
                    if let Some(z) = &n.terminal_name {
                        b.name_terminal(me, z.clone());
                    }
                }
                continue;
            }
            Some(p) => Some(new_of[p.0]),
        };
        let me = b.add_node(n.label.clone(), parent, named(&n.mv));
        new_of[ix] = me;
        if n.is_terminal() {
            if let Some(z) = &n.terminal_name {
                b.name_terminal(me, z.clone());
            }
        }
    }
    for s in g.infosets() {
        let mut members = Vec::new();
        for m in &s.members {
            if *m == node && !first.contains(&s.owner) {
                members.extend(intermediates.iter().map(|(_, m)| *m));
            } else {
                members.push(new_of[m.0]);
            }
        }
        b.add_infoset(g.players()[s.owner].clone(), s.label.clone(), members);
    }
    let out = b.build()?;
    out.ensure_valid()?;
    Ok(out)
}

/// Simultanize, then split the shifted player's move out first: the
/// classical interchange of two consecutive moves.
pub fn classic_interchange(g: &GameStructure, site: &SimultanizingSite) -> Result<GameStructure, GameError> {
    let (mid, _) = simultanize(g, site)?;
    let node = mid
        .node_by_label(&g.node(site.node).label)
        .ok_or_else(|| GameError::NoResequencing("simultanized node not found".into()))?;
    sequentialize(&mid, node, &[site.player])
}
