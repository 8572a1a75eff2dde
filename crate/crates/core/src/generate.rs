//! Random game structures with perfect recall, and random perturbations and
//! relabelings of them.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{GameBuilder, GameStructure, NodeId};
use crate::transform::{apply, classic_interchange, find_sites, sequentialize, Site};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub num_players: usize,
    pub max_depth: usize,
    pub max_actions: usize,
    /// Chance that another player joins a move.
    pub simultaneity_prob: f64,
    /// Chance that two compatible information sets are merged.
    pub infoset_merge_prob: f64,
    /// Soft cap on the number of nodes.
    pub max_nodes: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            num_players: 2,
            max_depth: 3,
            max_actions: 2,
            simultaneity_prob: 0.2,
            infoset_merge_prob: 0.5,
            max_nodes: 40,
        }
    }
}

struct Proto {
    parent: Option<usize>,
    depth: usize,
    /// (player, action index) on the incoming edge
    mv: Vec<(usize, usize)>,
    /// (player, action count) per mover
    movers: Vec<(usize, usize)>,
    children: Vec<usize>,
}

struct Tree {
    nodes: Vec<Proto>,
}

impl Tree {
    fn push(&mut self, parent: Option<usize>, mv: Vec<(usize, usize)>) -> usize {
        let depth = parent.map_or(0, |p| self.nodes[p].depth + 1);
        self.nodes.push(Proto {
            parent,
            depth,
            mv,
            movers: Vec::new(),
            children: Vec::new(),
        });
        if let Some(p) = parent {
            let ix = self.nodes.len() - 1;
            self.nodes[p].children.push(ix);
        }
        self.nodes.len() - 1
    }

    fn expand(&mut self, n: usize, movers: Vec<(usize, usize)>) {
        let mut idx = vec![0usize; movers.len()];
        'outer: loop {
            let mv = movers.iter().zip(&idx).map(|(&(p, _), &a)| (p, a)).collect();
            self.push(Some(n), mv);
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] < movers[k].1 {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        self.nodes[n].movers = movers;
    }

    /// `n`'s children must be leaves.
    fn add_mover(&mut self, n: usize, p: usize) {
        let kids = self.nodes[n].children.clone();
        for &c in &kids {
            let mut mv = self.nodes[c].mv.clone();
            self.nodes[c].mv.push((p, 0));
            self.nodes[c].mv.sort_unstable();
            mv.push((p, 1));
            mv.sort_unstable();
            self.push(Some(n), mv);
        }
        self.nodes[n].movers.push((p, 2));
        self.nodes[n].movers.sort_unstable();
    }

    fn ancestor_of(&self, a: usize, mut b: usize) -> bool {
        while let Some(p) = self.nodes[b].parent {
            if p == a {
                return true;
            }
            b = p;
        }
        false
    }
}

fn pick_movers(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Vec<(usize, usize)> {
    let mut players: Vec<usize> = (0..cfg.num_players).collect();
    players.shuffle(rng);
    let mut k = 1;
    while k < players.len() && rng.gen_bool(cfg.simultaneity_prob) {
        k += 1;
    }
    let mut movers: Vec<(usize, usize)> = players[..k]
        .iter()
        .map(|&p| (p, rng.gen_range(2..=cfg.max_actions.max(2))))
        .collect();
    movers.sort_unstable();
    movers
}

fn grow(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Tree {
    let mut t = Tree { nodes: Vec::new() };
    t.push(None, Vec::new());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let depth = t.nodes[n].depth;
        if depth >= cfg.max_depth || (n != 0 && rng.gen_bool(0.3)) {
            continue;
        }
        let mut movers = pick_movers(rng, cfg);
        let width = |m: &[(usize, usize)]| m.iter().map(|x| x.1).product::<usize>();
        if t.nodes.len() + width(&movers) > cfg.max_nodes {
            movers.truncate(1);
            movers[0].1 = 2;
            if n != 0 && t.nodes.len() + 2 > cfg.max_nodes {
                continue;
            }
        }
        let first = t.nodes.len();
        t.expand(n, movers);
        queue.extend(first..t.nodes.len());
    }
    // every player gets to move somewhere
    for p in 0..cfg.num_players {
        if t.nodes.iter().any(|nd| nd.movers.iter().any(|m| m.0 == p)) {
            continue;
        }
        let leaves: Vec<usize> = (1..t.nodes.len())
            .filter(|&n| t.nodes[n].children.is_empty() && t.nodes[n].depth < cfg.max_depth)
            .collect();
        if let Some(&n) = leaves.choose(rng) {
            t.expand(n, vec![(p, 2)]);
            continue;
        }
        // otherwise join a last move, doubling its leaves
        let last: Vec<usize> = (0..t.nodes.len())
            .filter(|&n| {
                let nd = &t.nodes[n];
                !nd.children.is_empty() && nd.children.iter().all(|&c| t.nodes[c].children.is_empty())
            })
            .collect();
        let n = *last.choose(rng).expect("a nonempty tree has a last move");
        t.add_mover(n, p);
    }
    t
}

impl GeneratorConfig {
    /// Range check: 2 to 5 players, depth 1 to 5, 2 or 3 actions, probabilities in [0, 1].
    pub fn check(&self) -> Result<(), String> {
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        if !(2..=5).contains(&self.num_players) {
            return Err(format!("num_players must be in 2..=5, got {}", self.num_players));
        }
        if !(1..=5).contains(&self.max_depth) {
            return Err(format!("max_depth must be in 1..=5, got {}", self.max_depth));
        }
        if !(2..=3).contains(&self.max_actions) {
            return Err(format!("max_actions must be 2 or 3, got {}", self.max_actions));
        }
        if !prob(self.simultaneity_prob) || !prob(self.infoset_merge_prob) {
            return Err("probabilities must lie in [0, 1]".into());
        }
        if self.max_nodes < 3 {
            return Err("max_nodes must be at least 3".into());
        }
        Ok(())
    }
}

/// Union-find over (node, player) decision points, keyed by representative.
struct Sets {
    parent: BTreeMap<(usize, usize), (usize, usize)>,
}

impl Sets {
    fn find(&self, mut x: (usize, usize)) -> (usize, usize) {
        while self.parent[&x] != x {
            x = self.parent[&x];
        }
        x
    }
}

fn record(t: &Tree, sets: &Sets, player: usize, n: usize) -> Vec<((usize, usize), usize)> {
    let mut out = Vec::new();
    let mut cur = n;
    while let Some(p) = t.nodes[cur].parent {
        if let Some(&(_, a)) = t.nodes[cur].mv.iter().find(|(q, _)| *q == player) {
            out.push((sets.find((p, player)), a));
        }
        cur = p;
    }
    out.reverse();
    out
}

fn merge_infosets(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig, t: &Tree) -> Sets {
    let points: Vec<(usize, usize)> = t
        .nodes
        .iter()
        .enumerate()
        .flat_map(|(n, nd)| nd.movers.iter().map(move |&(p, _)| (n, p)))
        .collect();
    let mut sets = Sets {
        parent: points.iter().map(|&x| (x, x)).collect(),
    };
    let count = |n: usize, p: usize| t.nodes[n].movers.iter().find(|m| m.0 == p).unwrap().1;
    // breadth-first order, so records above are settled first
    let mut order = points.clone();
    order.sort_by_key(|&(n, p)| (t.nodes[n].depth, n, p));
    for (k, &x) in order.iter().enumerate() {
        for &y in &order[k + 1..] {
            let (rx, ry) = (sets.find(x), sets.find(y));
            if rx == ry || x.1 != y.1 || count(x.0, x.1) != count(y.0, y.1) {
                continue;
            }
            let members = |r: (usize, usize)| -> Vec<usize> {
                points.iter().filter(|&&z| sets.find(z) == r).map(|z| z.0).collect()
            };
            let (mx, my) = (members(rx), members(ry));
            if mx.iter().any(|&a| my.iter().any(|&b| t.ancestor_of(a, b) || t.ancestor_of(b, a))) {
                continue;
            }
            if record(t, &sets, x.1, x.0) != record(t, &sets, y.1, y.0) {
                continue;
            }
            if rng.gen_bool(cfg.infoset_merge_prob) {
                sets.parent.insert(ry, rx);
            }
        }
    }
    sets
}

/// A random valid structure; every player moves somewhere.
///
/// # Panics
///
/// If the configuration fails [`GeneratorConfig::check`].
pub fn generate_random(cfg: &GeneratorConfig) -> GameStructure {
    if let Err(e) = cfg.check() {
        panic!("bad generator config: {e}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t = grow(&mut rng, cfg);
    let sets = merge_infosets(&mut rng, cfg, &t);
    let players: Vec<String> = (1..=cfg.num_players).map(|p| p.to_string()).collect();

    let mut reps: Vec<(usize, usize)> = sets.parent.keys().map(|&x| sets.find(x)).collect::<BTreeSet<_>>().into_iter().collect();
    reps.sort_by_key(|&(n, p)| (n, p));
    let mut next_action = 0;
    let mut displays: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for &r in &reps {
        let k = t.nodes[r.0].movers.iter().find(|m| m.0 == r.1).unwrap().1;
        displays.insert(r, (0..k).map(|a| format!("a{}", next_action + a)).collect());
        next_action += k;
    }

    let mut b = GameBuilder::new(players.clone());
    let mut terminals = 0;
    for (n, nd) in t.nodes.iter().enumerate() {
        let mv = nd
            .mv
            .iter()
            .map(|&(p, a)| {
                let r = sets.find((nd.parent.unwrap(), p));
                (players[p].clone(), displays[&r][a].clone())
            })
            .collect();
        b.add_node(format!("n{n}"), nd.parent, mv);
        if nd.children.is_empty() {
            terminals += 1;
            b.name_terminal(n, format!("z{terminals}"));
        }
    }
    for (k, &r) in reps.iter().enumerate() {
        let members = sets.parent.keys().filter(|&&x| sets.find(x) == r).map(|x| x.0).collect();
        b.add_infoset(players[r.1].clone(), format!("h{k}"), members);
    }
    let g = b.build().expect("generated tree is well formed");
    g.ensure_valid().expect("generated structure is valid");
    g
}

/// Renames nodes, terminals and action displays at random.
pub fn relabel(g: &GameStructure, rng: &mut impl Rng) -> GameStructure {
    let mut names: Vec<usize> = (0..g.node_count()).collect();
    names.shuffle(rng);
    let mut zs: Vec<usize> = (0..g.terminals().len()).collect();
    zs.shuffle(rng);
    let tag: u32 = rng.gen_range(0..1000);
    let shown = |set: usize, a: &str| format!("c{tag}_{set}_{a}");
    let mut b = GameBuilder::new(g.players().iter().cloned());
    b.set_name(g.name().map(str::to_owned));
    for (ix, nd) in g.nodes().iter().enumerate() {
        let mv = nd
            .mv
            .iter()
            .map(|(p, a)| {
                let s = g.infoset_of(nd.parent.unwrap(), *p).unwrap();
                (g.players()[*p].clone(), shown(s.0, a))
            })
            .collect();
        let me = b.add_node(format!("v{}", names[ix]), nd.parent.map(|p| p.0), mv);
        if let Some(pos) = g.terminal_position(NodeId(ix)) {
            b.name_terminal(me, format!("t{}", zs[pos]));
        }
    }
    for s in g.infosets() {
        b.add_infoset(g.players()[s.owner].clone(), s.label.clone(), s.members.iter().map(|m| m.0).collect());
    }
    b.build().expect("relabeling keeps the tree")
}

/// A behaviorally equivalent structure reached by `steps` random
/// transformations, splits of simultaneous moves, and a final relabeling.
pub fn equivalent_variant(g: &GameStructure, rng: &mut impl Rng, steps: usize) -> GameStructure {
    let mut cur = g.clone();
    for _ in 0..steps {
        let roll = rng.gen_range(0..3);
        let sites = find_sites(&cur);
        if roll == 0 && !sites.is_empty() {
            let site = sites.choose(rng).unwrap();
            cur = apply(&cur, site).expect("site from current game").0;
            continue;
        }
        if roll == 1 {
            let sim: Vec<_> = sites
                .iter()
                .filter_map(|s| match s {
                    Site::Simultanize(x) => Some(x.clone()),
                    _ => None,
                })
                .collect();
            if let Some(s) = sim.choose(rng) {
                if let Ok(next) = classic_interchange(&cur, s) {
                    cur = next;
                    continue;
                }
            }
        }
        let split: Vec<NodeId> = (0..cur.node_count())
            .map(NodeId)
            .filter(|&n| cur.node(n).active.len() >= 2)
            .collect();
        if let Some(&n) = split.choose(rng) {
            let active = cur.node(n).active.clone();
            let first = active[rng.gen_range(0..active.len())];
            if let Ok(next) = sequentialize(&cur, n, &[first]) {
                cur = next;
            }
        }
    }
    relabel(&cur, rng)
}

fn node_builder(g: &GameStructure, unnamed: Option<NodeId>) -> GameBuilder {
    let mut b = GameBuilder::new(g.players().iter().cloned());
    b.set_name(g.name().map(str::to_owned));
    for (ix, nd) in g.nodes().iter().enumerate() {
        let mv = nd.mv.iter().map(|(p, a)| (g.players()[*p].clone(), a.clone())).collect();
        let me = b.add_node(nd.label.clone(), nd.parent.map(|p| p.0), mv);
        if nd.is_terminal() && unnamed != Some(NodeId(ix)) {
            b.name_terminal(me, g.terminal_name(NodeId(ix)));
        }
    }
    b
}

/// A nearby structure that is usually not equivalent: an information set
/// is split in two, or a terminal becomes a two-way decision.
pub fn perturb(g: &GameStructure, rng: &mut impl Rng) -> GameStructure {
    let splittable: Vec<usize> = (0..g.infosets().len())
        .filter(|&s| g.infosets()[s].members.len() >= 2)
        .collect();
    if rng.gen_bool(0.5) {
        if let Some(&s) = splittable.choose(rng) {
            let mut b = node_builder(g, None);
            let cut = rng.gen_range(1..g.infosets()[s].members.len());
            for (k, set) in g.infosets().iter().enumerate() {
                let owner = g.players()[set.owner].clone();
                let ms: Vec<usize> = set.members.iter().map(|m| m.0).collect();
                if k == s {
                    b.add_infoset(owner.clone(), format!("{}_a", set.label), ms[..cut].to_vec());
                    b.add_infoset(owner, format!("{}_b", set.label), ms[cut..].to_vec());
                } else {
                    b.add_infoset(owner, set.label.clone(), ms);
                }
            }
            if let Ok(out) = b.build() {
                if out.validate().is_valid() {
                    return out;
                }
            }
        }
    }
    let leaf = *g.terminals().choose(rng).unwrap();
    let pname = g.players()[rng.gen_range(0..g.players().len())].clone();
    let mut b = node_builder(g, Some(leaf));
    let label = g.node(leaf).label.clone();
    let name = g.terminal_name(leaf).to_owned();
    for a in ["e1", "e2"] {
        let k = b.add_node(format!("{label}_{a}"), Some(leaf.0), vec![(pname.clone(), a.to_owned())]);
        b.name_terminal(k, if a == "e1" { name.clone() } else { format!("{name}_new") });
    }
    for set in g.infosets() {
        let ms = set.members.iter().map(|m| m.0).collect();
        b.add_infoset(g.players()[set.owner].clone(), set.label.clone(), ms);
    }
    b.add_infoset(pname, format!("{label}_set"), vec![leaf.0]);
    let out = b.build().expect("expanding a leaf keeps the tree");
    out.ensure_valid().expect("a fresh singleton decision keeps recall");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::rnf_isomorphic;
    use crate::normal_form::reduced_normal_form;

    fn configs() -> impl Iterator<Item = GeneratorConfig> {
        (0..60u64).map(|seed| GeneratorConfig {
            seed,
            num_players: 2 + (seed % 3) as usize,
            max_depth: 1 + (seed % 4) as usize,
            max_actions: 2 + (seed % 2) as usize,
            ..Default::default()
        })
    }

    #[test]
    fn generated_games_are_valid_and_use_every_player() {
        for cfg in configs() {
            let g = generate_random(&cfg);
            assert!(g.validate().is_valid());
            for p in 0..cfg.num_players {
                assert!(g.player_has_moves(p), "{cfg:?}");
            }
            assert!(g.height() <= cfg.max_depth + 1);
        }
    }

    #[test]
    fn thousand_games_validate() {
        for seed in 0..1000 {
            let cfg = GeneratorConfig {
                seed,
                num_players: 2 + (seed % 4) as usize,
                max_depth: 1 + (seed % 5) as usize,
                max_actions: 2 + (seed % 2) as usize,
                simultaneity_prob: 0.3,
                ..Default::default()
            };
            assert!(generate_random(&cfg).validate().is_valid(), "{cfg:?}");
        }
    }

    #[test]
    fn no_merging_means_singletons() {
        for seed in 0..50 {
            let cfg = GeneratorConfig { seed, num_players: 3, infoset_merge_prob: 0.0, ..Default::default() };
            let g = generate_random(&cfg);
            assert!(g.infosets().iter().all(|s| s.members.len() == 1));
        }
    }

    #[test]
    fn config_ranges() {
        assert!(GeneratorConfig::default().check().is_ok());
        assert!(GeneratorConfig { num_players: 1, ..Default::default() }.check().is_err());
        assert!(GeneratorConfig { max_actions: 4, ..Default::default() }.check().is_err());
        assert!(GeneratorConfig { max_depth: 0, ..Default::default() }.check().is_err());
        assert!(GeneratorConfig { simultaneity_prob: 1.5, ..Default::default() }.check().is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig { seed: 7, num_players: 3, ..Default::default() };
        assert_eq!(generate_random(&cfg), generate_random(&cfg));
    }

    #[test]
    fn merging_happens() {
        let merged = configs()
            .map(|c| generate_random(&c))
            .filter(|g| g.infosets().iter().any(|s| s.members.len() > 1))
            .count();
        assert!(merged > 5, "{merged}");
    }

    #[test]
    fn variants_keep_the_reduced_normal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for cfg in configs() {
            let g = generate_random(&cfg);
            let v = equivalent_variant(&g, &mut rng, 4);
            assert!(v.validate().is_valid());
            assert!(rnf_isomorphic(&reduced_normal_form(&g), &reduced_normal_form(&v)).is_some(), "{cfg:?}");
        }
    }

    #[test]
    fn perturbations_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for cfg in configs() {
            let g = generate_random(&cfg);
            assert!(perturb(&g, &mut rng).validate().is_valid());
        }
    }
}
