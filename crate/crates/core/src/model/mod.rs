//! Finite extensive game structures with simultaneous moves and imperfect
//! information.
//!
//! A [`GameStructure`] is an immutable rooted tree. Each non-root node carries
//! the action profile (one action per moving player) that leads to it from its
//! parent. Players active at a node are the players appearing in the moves of
//! its children. Information sets group the nodes of one player; an action is
//! identified by its display string together with the information set at which
//! it is taken, so equal display strings at distinct information sets denote
//! distinct actions.
//!
//! Nodes are stored in depth-first preorder with children sorted by their move
//! profile, so [`NodeId`]s are canonical for a given tree.

mod validate;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{GameError, StructureError};
use crate::natord;

pub use validate::{Rule, ValidationReport, Violation};

/// Index of a node in a [`GameStructure`]; the root is always `NodeId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Index of an information set in a [`GameStructure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfosetId(pub usize);

/// Set of terminal nodes, indexed by position in [`GameStructure::terminals`].
pub type TermSet = FixedBitSet;

/// A move: the actions chosen by the moving players, sorted by player index.
pub type Move = Vec<(usize, String)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    pub parent: Option<NodeId>,
    pub mv: Move,
    pub children: Vec<NodeId>,
    pub depth: usize,
    pub terminal_name: Option<String>,
    /// Players appearing in the moves of the children.
    pub active: Vec<usize>,
    /// One past the last preorder index of this node's subtree.
    pub subtree_end: usize,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        self.children.is_empty()
    }

    /// The action `player` took on the edge into this node, if any.
    pub fn action_of(&self, player: usize) -> Option<&str> {
        self.mv
            .iter()
            .find(|(p, _)| *p == player)
            .map(|(_, a)| a.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoSet {
    pub label: String,
    pub owner: usize,
    pub members: Vec<NodeId>,
    /// Display strings of the feasible actions, in natural order.
    pub actions: Vec<String>,
}

impl InfoSet {
    pub fn action_index(&self, display: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == display)
    }
}

/// A qualified action: display string plus owning information set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionLabel {
    pub infoset: InfosetId,
    pub display: String,
}

#[derive(Debug, Clone)]
struct RawNode {
    label: String,
    parent: Option<usize>,
    mv: Vec<(String, String)>,
    terminal_name: Option<String>,
}

#[derive(Debug, Clone)]
struct RawInfoset {
    owner: String,
    label: String,
    members: Vec<usize>,
}

/// Incremental constructor for [`GameStructure`].
///
/// The builder only enforces tree shape; everything else is checked by
/// [`GameStructure::validate`].
#[derive(Debug, Clone, Default)]
pub struct GameBuilder {
    name: Option<String>,
    players: Vec<String>,
    nodes: Vec<RawNode>,
    infosets: Vec<RawInfoset>,
}

impl GameBuilder {
    pub fn new<S: Into<String>>(players: impl IntoIterator<Item = S>) -> Self {
        GameBuilder {
            players: players.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn set_name(&mut self, name: Option<String>) {
        self.name = name;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Adds a node and returns its builder index.
    pub fn add_node(
        &mut self,
        label: impl Into<String>,
        parent: Option<usize>,
        mv: Vec<(String, String)>,
    ) -> usize {
        self.nodes.push(RawNode {
            label: label.into(),
            parent,
            mv,
            terminal_name: None,
        });
        self.nodes.len() - 1
    }

    pub fn name_terminal(&mut self, node: usize, name: impl Into<String>) {
        self.nodes[node].terminal_name = Some(name.into());
    }

    pub fn add_infoset(
        &mut self,
        owner: impl Into<String>,
        label: impl Into<String>,
        members: Vec<usize>,
    ) {
        self.infosets.push(RawInfoset {
            owner: owner.into(),
            label: label.into(),
            members,
        });
    }

    pub fn build(self) -> Result<GameStructure, StructureError> {
        GameStructure::assemble(self)
    }
}

/// An extensive game structure `⟨I, H̄, (Aᵢ, 𝐇ᵢ)⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameStructure {
    name: Option<String>,
    players: Vec<String>,
    nodes: Vec<Node>,
    infosets: Vec<InfoSet>,
    /// Per node: (player, infoset) for each infoset listing the node, by player.
    memberships: Vec<Vec<(usize, InfosetId)>>,
    terminals: Vec<NodeId>,
    /// Per node: half-open range of terminal positions below it.
    term_range: Vec<(usize, usize)>,
    labels: HashMap<String, NodeId>,
}

pub(crate) fn cmp_moves(a: &Move, b: &Move) -> Ordering {
    for ((pa, xa), (pb, xb)) in a.iter().zip(b.iter()) {
        let o = pa.cmp(pb).then_with(|| natord::cmp(xa, xb));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

impl GameStructure {
    fn assemble(b: GameBuilder) -> Result<Self, StructureError> {
        if b.players.is_empty() {
            return Err(StructureError::NoPlayers);
        }
        let mut players = b.players.clone();
        natord::sort(&mut players);
        for w in players.windows(2) {
            if w[0] == w[1] {
                return Err(StructureError::DuplicatePlayer(w[0].clone()));
            }
        }
        let pindex: HashMap<&str, usize> = players
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        if b.nodes.is_empty() {
            return Err(StructureError::NoNodes);
        }
        let mut seen = HashSet::new();
        for n in &b.nodes {
            if !seen.insert(n.label.as_str()) {
                return Err(StructureError::DuplicateNode(n.label.clone()));
            }
        }

        let n = b.nodes.len();
        let mut root = None;
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut moves: Vec<Move> = Vec::with_capacity(n);
        for (ix, raw) in b.nodes.iter().enumerate() {
            let mut mv = Move::new();
            for (p, a) in &raw.mv {
                let &pi = pindex
                    .get(p.as_str())
                    .ok_or_else(|| StructureError::UnknownPlayer(p.clone()))?;
                mv.push((pi, a.clone()));
            }
            mv.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
            match raw.parent {
                None => {
                    if let Some(r) = root {
                        let r: usize = r;
                        return Err(StructureError::MultipleRoots(
                            b.nodes[r].label.clone(),
                            raw.label.clone(),
                        ));
                    }
                    if !mv.is_empty() {
                        return Err(StructureError::RootWithMove(raw.label.clone()));
                    }
                    root = Some(ix);
                }
                Some(p) => {
                    if p >= n {
                        return Err(StructureError::UnknownNode(format!("#{p}")));
                    }
                    if mv.is_empty() {
                        return Err(StructureError::EmptyMove(raw.label.clone()));
                    }
                    kids[p].push(ix);
                }
            }
            moves.push(mv);
        }
        let root = root.ok_or(StructureError::NoRoot)?;
        for k in kids.iter_mut() {
            k.sort_by(|&x, &y| cmp_moves(&moves[x], &moves[y]).then(x.cmp(&y)));
        }

        // preorder renumbering
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(kids[v].iter().rev().copied());
        }
        if order.len() != n {
            let reached: HashSet<usize> = order.iter().copied().collect();
            let lost = (0..n).find(|v| !reached.contains(v)).unwrap();
            return Err(StructureError::Unreachable(b.nodes[lost].label.clone()));
        }
        let mut new_of = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }

        let mut nodes: Vec<Node> = order
            .iter()
            .map(|&old| {
                let raw = &b.nodes[old];
                Node {
                    label: raw.label.clone(),
                    parent: raw.parent.map(|p| NodeId(new_of[p])),
                    mv: moves[old].clone(),
                    children: kids[old].iter().map(|&c| NodeId(new_of[c])).collect(),
                    depth: 0,
                    terminal_name: raw.terminal_name.clone(),
                    active: Vec::new(),
                    subtree_end: 0,
                }
            })
            .collect();
        for v in 0..n {
            if let Some(p) = nodes[v].parent {
                nodes[v].depth = nodes[p.0].depth + 1;
            }
            let mut act: Vec<usize> = nodes[v]
                .children
                .iter()
                .flat_map(|c| nodes[c.0].mv.iter().map(|(p, _)| *p))
                .collect();
            act.sort_unstable();
            act.dedup();
            nodes[v].active = act;
        }
        for v in (0..n).rev() {
            nodes[v].subtree_end = nodes[v]
                .children
                .last()
                .map_or(v + 1, |c| nodes[c.0].subtree_end);
        }

        let terminals: Vec<NodeId> = (0..n)
            .filter(|&v| nodes[v].children.is_empty())
            .map(NodeId)
            .collect();
        let mut term_range = vec![(0, 0); n];
        {
            let mut pos = vec![0usize; n + 1];
            let mut k = 0;
            for v in 0..=n {
                pos[v] = k;
                if v < n && nodes[v].children.is_empty() {
                    k += 1;
                }
            }
            for v in 0..n {
                term_range[v] = (pos[v], pos[nodes[v].subtree_end]);
            }
        }

        // terminal names
        let used: HashSet<String> = nodes
            .iter()
            .filter_map(|nd| nd.terminal_name.clone())
            .collect();
        let mut counter = 1usize;
        for t in &terminals {
            if nodes[t.0].terminal_name.is_none() {
                let name = loop {
                    let cand = format!("z{counter}");
                    counter += 1;
                    if !used.contains(&cand) {
                        break cand;
                    }
                };
                nodes[t.0].terminal_name = Some(name);
            }
        }

        // information sets
        let mut raw_sets: Vec<(usize, String, Vec<NodeId>)> = Vec::new();
        let mut ilabels = HashSet::new();
        for rs in &b.infosets {
            let &owner = pindex
                .get(rs.owner.as_str())
                .ok_or_else(|| StructureError::UnknownPlayer(rs.owner.clone()))?;
            if !ilabels.insert(rs.label.clone()) {
                return Err(StructureError::DuplicateInfoset(rs.label.clone()));
            }
            if rs.members.is_empty() {
                return Err(StructureError::EmptyInfoset(rs.label.clone()));
            }
            let mut members = Vec::with_capacity(rs.members.len());
            for &m in &rs.members {
                if m >= n {
                    return Err(StructureError::UnknownNode(format!("#{m}")));
                }
                members.push(NodeId(new_of[m]));
            }
            members.sort_unstable();
            members.dedup();
            raw_sets.push((owner, rs.label.clone(), members));
        }
        let mut covered: HashSet<(usize, usize)> = raw_sets
            .iter()
            .flat_map(|(o, _, ms)| ms.iter().map(move |m| (m.0, *o)))
            .collect();
        for v in 0..n {
            for &p in &nodes[v].active {
                if covered.insert((v, p)) {
                    let mut label = format!("{}@{}", players[p], nodes[v].label);
                    while ilabels.contains(&label) {
                        label.push('\'');
                    }
                    ilabels.insert(label.clone());
                    raw_sets.push((p, label, vec![NodeId(v)]));
                }
            }
        }
        raw_sets.sort_by(|a, b| a.0.cmp(&b.0).then(a.2[0].cmp(&b.2[0])).then(a.1.cmp(&b.1)));
        let mut memberships: Vec<Vec<(usize, InfosetId)>> = vec![Vec::new(); n];
        let infosets: Vec<InfoSet> = raw_sets
            .into_iter()
            .enumerate()
            .map(|(ix, (owner, label, members))| {
                for m in &members {
                    memberships[m.0].push((owner, InfosetId(ix)));
                }
                let first = &nodes[members[0].0];
                let mut actions: Vec<String> = first
                    .children
                    .iter()
                    .filter_map(|c| nodes[c.0].action_of(owner).map(str::to_owned))
                    .collect();
                natord::sort(&mut actions);
                actions.dedup();
                InfoSet {
                    label,
                    owner,
                    members,
                    actions,
                }
            })
            .collect();
        for m in memberships.iter_mut() {
            m.sort();
        }
        let labels = nodes
            .iter()
            .enumerate()
            .map(|(i, nd)| (nd.label.clone(), NodeId(i)))
            .collect();

        Ok(GameStructure {
            name: b.name,
            players,
            nodes,
            infosets,
            memberships,
            terminals,
            term_range,
            labels,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub(crate) fn require_player(&self, name: &str) -> Result<usize, GameError> {
        self.player_index(name)
            .ok_or_else(|| GameError::UnknownPlayer(name.to_owned()))
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.get(label).copied()
    }

    pub fn infosets(&self) -> &[InfoSet] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &InfoSet {
        &self.infosets[id.0]
    }

    pub fn infoset_by_label(&self, label: &str) -> Option<InfosetId> {
        self.infosets
            .iter()
            .position(|s| s.label == label)
            .map(InfosetId)
    }

    /// Information sets of `player`, in canonical order.
    pub fn infosets_of(&self, player: usize) -> impl Iterator<Item = InfosetId> + '_ {
        self.infosets
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.owner == player)
            .map(|(i, _)| InfosetId(i))
    }

    /// The information set of `player` containing `node`, if the player moves there.
    pub fn infoset_of(&self, node: NodeId, player: usize) -> Option<InfosetId> {
        self.memberships[node.0]
            .iter()
            .find(|(p, _)| *p == player)
            .map(|(_, s)| *s)
    }

    /// Active players `I(h)` at a non-terminal node.
    pub fn active_players(&self, node: NodeId) -> Result<&[usize], GameError> {
        let nd = self.node(node);
        if nd.is_terminal() {
            return Err(GameError::TerminalNode(nd.label.clone()));
        }
        Ok(&nd.active)
    }

    pub fn is_active(&self, node: NodeId, player: usize) -> bool {
        self.nodes[node.0].active.binary_search(&player).is_ok()
    }

    /// `Fᵢ(h)`: the actions `player` can take at `node` (empty if inactive).
    pub fn feasible(&self, node: NodeId, player: usize) -> Vec<&str> {
        let nd = self.node(node);
        let mut acts: Vec<&str> = nd
            .children
            .iter()
            .filter_map(|c| self.nodes[c.0].action_of(player))
            .collect();
        acts.sort_by(|a, b| natord::cmp(a, b));
        acts.dedup();
        acts
    }

    /// Players who have at least one node of their own.
    pub fn player_has_moves(&self, player: usize) -> bool {
        self.nodes.iter().any(|n| n.active.contains(&player))
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn terminal_name(&self, node: NodeId) -> &str {
        self.nodes[node.0].terminal_name.as_deref().unwrap_or("")
    }

    /// Position of a terminal node in [`Self::terminals`].
    pub fn terminal_position(&self, node: NodeId) -> Option<usize> {
        let (lo, hi) = self.term_range[node.0];
        (hi == lo + 1 && self.nodes[node.0].is_terminal()).then_some(lo)
    }

    pub fn terminal_names(&self, set: &TermSet) -> Vec<String> {
        set.ones()
            .map(|k| self.terminal_name(self.terminals[k]).to_owned())
            .collect()
    }

    pub fn empty_termset(&self) -> TermSet {
        FixedBitSet::with_capacity(self.terminals.len())
    }

    /// `Z(h)`.
    pub fn terminals_below(&self, node: NodeId) -> TermSet {
        let mut s = self.empty_termset();
        let (lo, hi) = self.term_range[node.0];
        s.insert_range(lo..hi);
        s
    }

    /// `Z(U) = ⋃_{h∈U} Z(h)`.
    pub fn terminal_set(&self, nodes: &[NodeId]) -> Result<TermSet, GameError> {
        if nodes.is_empty() {
            return Err(GameError::EmptyNodeSet);
        }
        let mut s = self.empty_termset();
        for n in nodes {
            if n.0 >= self.nodes.len() {
                return Err(GameError::UnknownNode(format!("#{}", n.0)));
            }
            let (lo, hi) = self.term_range[n.0];
            s.insert_range(lo..hi);
        }
        Ok(s)
    }

    /// `Z(𝐡ᵢ, a)`: terminals following information set `set` and its action `action`.
    pub fn terminal_after_action(&self, set: InfosetId, action: &str) -> Result<TermSet, GameError> {
        let info = self.infoset(set);
        if info.action_index(action).is_none() {
            return Err(GameError::InfeasibleAction {
                infoset: info.label.clone(),
                action: action.to_owned(),
            });
        }
        let mut s = self.empty_termset();
        for &h in &info.members {
            for &c in &self.nodes[h.0].children {
                if self.nodes[c.0].action_of(info.owner) == Some(action) {
                    let (lo, hi) = self.term_range[c.0];
                    s.insert_range(lo..hi);
                }
            }
        }
        Ok(s)
    }

    pub fn infoset_terminals(&self, set: InfosetId) -> TermSet {
        let mut s = self.empty_termset();
        for &h in &self.infoset(set).members {
            let (lo, hi) = self.term_range[h.0];
            s.insert_range(lo..hi);
        }
        s
    }

    /// Strict precedence `a ≺ b`.
    pub fn precedes(&self, a: NodeId, b: NodeId) -> bool {
        a.0 < b.0 && b.0 < self.nodes[a.0].subtree_end
    }

    /// Nodes on the path from the root to `node`, both included.
    pub fn path(&self, node: NodeId) -> Vec<NodeId> {
        let mut p = vec![node];
        let mut cur = node;
        while let Some(par) = self.nodes[cur.0].parent {
            p.push(par);
            cur = par;
        }
        p.reverse();
        p
    }

    /// Nodes in the subtree of `node` (including it), in preorder.
    pub fn subtree(&self, node: NodeId) -> impl Iterator<Item = NodeId> {
        (node.0..self.nodes[node.0].subtree_end).map(NodeId)
    }

    /// The child of `node` reached by `mv`.
    pub fn child_by_move(&self, node: NodeId, mv: &[(usize, &str)]) -> Option<NodeId> {
        self.nodes[node.0].children.iter().copied().find(|c| {
            let cm = &self.nodes[c.0].mv;
            cm.len() == mv.len()
                && cm
                    .iter()
                    .zip(mv)
                    .all(|((p, a), (q, b))| p == q && a == b)
        })
    }

    /// Player `i`'s record at `node`: the (information set, action) pairs of `i`
    /// along the path from the root, excluding `node` itself.
    pub fn record(&self, player: usize, node: NodeId) -> Vec<(InfosetId, String)> {
        let path = self.path(node);
        let mut rec = Vec::new();
        for w in path.windows(2) {
            if let Some(set) = self.infoset_of(w[0], player) {
                if let Some(a) = self.nodes[w[1].0].action_of(player) {
                    rec.push((set, a.to_owned()));
                }
            }
        }
        rec
    }

    /// Longest root-to-terminal path length.
    pub fn height(&self) -> usize {
        self.terminals
            .iter()
            .map(|t| self.nodes[t.0].depth)
            .max()
            .unwrap_or(0)
    }

    /// `Σ |Fᵢ(𝐡ᵢ)|` over the information sets of `player`.
    pub fn action_count(&self, player: usize) -> usize {
        self.infosets_of(player)
            .map(|s| self.infoset(s).actions.len())
            .sum()
    }

    /// Human-readable move, e.g. `1:u,2:l`.
    pub fn move_string(&self, mv: &Move) -> String {
        mv.iter()
            .map(|(p, a)| format!("{}:{}", self.players[*p], a))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Terminal names keyed by node label.
    pub fn terminal_name_map(&self) -> BTreeMap<String, String> {
        self.terminals
            .iter()
            .map(|t| (self.nodes[t.0].label.clone(), self.terminal_name(*t).to_owned()))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    /// Fails with [`GameError::Invalid`] unless the structure validates.
    pub fn ensure_valid(&self) -> Result<(), GameError> {
        let r = self.validate();
        if r.is_valid() {
            Ok(())
        } else {
            Err(GameError::Invalid(r))
        }
    }

    /// Rebuilds a [`GameBuilder`] holding this game, preserving labels.
    pub fn to_builder(&self) -> GameBuilder {
        let mut b = GameBuilder::new(self.players.iter().cloned());
        b.set_name(self.name.clone());
        for nd in &self.nodes {
            let mv = nd
                .mv
                .iter()
                .map(|(p, a)| (self.players[*p].clone(), a.clone()))
                .collect();
            let ix = b.add_node(nd.label.clone(), nd.parent.map(|p| p.0), mv);
            if nd.is_terminal() {
                if let Some(z) = &nd.terminal_name {
                    b.name_terminal(ix, z.clone());
                }
            }
        }
        for s in &self.infosets {
            b.add_infoset(
                self.players[s.owner].clone(),
                s.label.clone(),
                s.members.iter().map(|m| m.0).collect(),
            );
        }
        b
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
