//! The minimal game of a reduced normal form.
//!
//! Each player's information sets are read off the table first. Against a
//! fixed profile of the others (a column), the player's strategies split
//! into outcome classes; columns whose classes admit a common nontrivial
//! coarsening meet the same information set, and that coarsening is its
//! action partition. Each action block is then analyzed again on the same
//! columns. The tree is grown cell by cell afterwards: a player moves at a
//! cell exactly when one of these sets carries the cell's strategies and
//! columns.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::model::{GameBuilder, GameStructure};
use crate::normal_form::{reduced_normal_form, ReducedNormalForm};
use crate::partition::finest_outcome_partition;
use crate::reduction::is_minimal;
use crate::strategy::advance;

use super::rnf_isomorphic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("a form with a single profile has no game structure: the root would be terminal")]
    Degenerate,
    #[error("input is not the reduced normal form of any structure in this class: cell {cell}: {reason}")]
    Unrealizable { cell: String, reason: String },
    #[error("reconstructed structure is invalid: {0}")]
    Invalid(String),
}

/// Profiles of everyone but `player`, numbered in mixed radix.
struct Columns<'a> {
    nf: &'a ReducedNormalForm,
    player: usize,
    others: Vec<usize>,
}

impl Columns<'_> {
    fn new(nf: &ReducedNormalForm, player: usize) -> Columns<'_> {
        let others = (0..nf.players().len()).filter(|&p| p != player).collect();
        Columns { nf, player, others }
    }

    fn count(&self) -> usize {
        self.others.iter().map(|&p| self.nf.strategies(p).len()).product()
    }

    fn outcome(&self, mut code: usize, s: usize) -> usize {
        let mut prof = vec![0; self.nf.players().len()];
        prof[self.player] = s;
        for &p in &self.others {
            let n = self.nf.strategies(p).len();
            prof[p] = code % n;
            code /= n;
        }
        self.nf.outcome(&prof)
    }

    /// Codes of all columns of a cell.
    fn of_cell(&self, cell: &[Vec<usize>]) -> Vec<usize> {
        let mut idx = vec![0usize; self.others.len()];
        let mut out = Vec::new();
        loop {
            let (mut code, mut scale) = (0, 1);
            for (k, &p) in self.others.iter().enumerate() {
                code += cell[p][idx[k]] * scale;
                scale *= self.nf.strategies(p).len();
            }
            out.push(code);
            if !advance(&mut idx, |k| cell[self.others[k]].len()) {
                break;
            }
        }
        out
    }
}

struct SetSpec {
    strategies: Vec<usize>,
    columns: FixedBitSet,
    blocks: Vec<Vec<usize>>,
}

fn unite(uf: &mut UnionFind<usize>, outcomes: &[usize]) {
    let mut first: HashMap<usize, usize> = HashMap::new();
    for (k, z) in outcomes.iter().enumerate() {
        match first.get(z) {
            Some(&j) => {
                uf.union(j, k);
            }
            None => {
                first.insert(*z, k);
            }
        }
    }
}

fn classes(uf: &UnionFind<usize>, n: usize) -> usize {
    (0..n).map(|k| uf.find(k)).collect::<BTreeSet<_>>().len()
}

fn analyze(cols: &Columns, strategies: Vec<usize>, columns: Vec<usize>, out: &mut Vec<SetSpec>) {
    let n = strategies.len();
    let mut groups: Vec<(Vec<usize>, UnionFind<usize>)> = Vec::new();
    for c in columns {
        let zs: Vec<usize> = strategies.iter().map(|&s| cols.outcome(c, s)).collect();
        if zs.iter().all(|z| *z == zs[0]) {
            continue;
        }
        let mut placed = false;
        for (members, uf) in groups.iter_mut() {
            let mut trial = uf.clone();
            unite(&mut trial, &zs);
            if classes(&trial, n) > 1 {
                *uf = trial;
                members.push(c);
                placed = true;
                break;
            }
        }
        if !placed {
            let mut uf = UnionFind::new(n);
            unite(&mut uf, &zs);
            groups.push((vec![c], uf));
        }
    }
    for (members, _) in groups {
        let mut outcomes: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &s in &strategies {
            let zs = outcomes.entry(s).or_default();
            zs.extend(members.iter().map(|&c| cols.outcome(c, s)));
        }
        let blocks = finest_outcome_partition(&outcomes)
            .expect("every strategy has an outcome")
            .blocks()
            .to_vec();
        if blocks.len() < 2 {
            // outcomes collide across columns: no game has this table
            continue;
        }
        let mut set = FixedBitSet::with_capacity(cols.count());
        for &c in &members {
            set.insert(c);
        }
        out.push(SetSpec {
            strategies: strategies.clone(),
            columns: set,
            blocks: blocks.clone(),
        });
        for b in blocks {
            analyze(cols, b, members.clone(), out);
        }
    }
}

struct Rebuild<'a> {
    nf: &'a ReducedNormalForm,
    specs: Vec<Vec<SetSpec>>,
    by_strategies: Vec<HashMap<Vec<usize>, Vec<usize>>>,
    b: GameBuilder,
    /// (player, set spec) -> members
    infosets: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Rebuild<'_> {
    fn describe(&self, cell: &[Vec<usize>]) -> String {
        let parts: Vec<String> = cell
            .iter()
            .enumerate()
            .map(|(p, ks)| {
                let ls: Vec<&str> = ks.iter().map(|&k| self.nf.strategies(p)[k].as_str()).collect();
                format!("{}: {}", self.nf.players()[p], ls.join(" "))
            })
            .collect();
        format!("{{{}}}", parts.join("; "))
    }

    fn image(&self, cell: &[Vec<usize>]) -> BTreeSet<usize> {
        let mut zs = BTreeSet::new();
        let mut idx = vec![0usize; cell.len()];
        let mut prof = vec![0usize; cell.len()];
        loop {
            for p in 0..cell.len() {
                prof[p] = cell[p][idx[p]];
            }
            zs.insert(self.nf.outcome(&prof));
            if !advance(&mut idx, |p| cell[p].len()) {
                break;
            }
        }
        zs
    }

    /// The information set of `p` at this cell, if `p` moves here.
    /// Otherwise the player moves further down, or not at all.
    fn set_at(&self, cell: &[Vec<usize>], p: usize) -> Option<usize> {
        let candidates = self.by_strategies[p].get(&cell[p])?;
        let codes = Columns::new(self.nf, p).of_cell(cell);
        candidates
            .iter()
            .copied()
            .find(|&k| codes.iter().all(|&c| self.specs[p][k].columns.contains(c)))
    }

    fn node(&mut self, cell: Vec<Vec<usize>>, parent: Option<usize>, mv: Vec<(String, String)>) -> Result<(), ReconstructError> {
        let me = self.b.add_node(format!("n{}", self.b.node_count()), parent, mv);
        let image = self.image(&cell);
        if image.len() == 1 {
            let z = *image.iter().next().unwrap();
            self.b.name_terminal(me, self.nf.terminals()[z].clone());
            return Ok(());
        }
        let mut movers: Vec<(usize, usize)> = Vec::new();
        for p in 0..cell.len() {
            if let Some(k) = self.set_at(&cell, p) {
                movers.push((p, k));
            }
        }
        if movers.is_empty() {
            return Err(ReconstructError::Unrealizable {
                cell: self.describe(&cell),
                reason: format!("{} outcomes but no player can separate them", image.len()),
            });
        }
        for &(p, k) in &movers {
            self.infosets.entry((p, k)).or_default().push(me);
        }
        let mut idx = vec![0usize; movers.len()];
        let mut seen = BTreeSet::new();
        let mut children = Vec::new();
        loop {
            let mut child = cell.clone();
            let mut mv = Vec::with_capacity(movers.len());
            for (m, &(p, k)) in movers.iter().enumerate() {
                let block = &self.specs[p][k].blocks[idx[m]];
                child[p] = block.clone();
                let shown = block
                    .iter()
                    .map(|&s| self.nf.strategies(p)[s].as_str())
                    .min()
                    .unwrap();
                mv.push((self.nf.players()[p].clone(), shown.to_owned()));
            }
            let zs = self.image(&child);
            if !seen.is_disjoint(&zs) {
                return Err(ReconstructError::Unrealizable {
                    cell: self.describe(&child),
                    reason: "outcomes of sibling cells overlap".into(),
                });
            }
            seen.extend(zs);
            children.push((child, mv));
            if !advance(&mut idx, |m| self.specs[movers[m].0][movers[m].1].blocks.len()) {
                break;
            }
        }
        for (child, mv) in children {
            self.node(child, Some(me), mv)?;
        }
        Ok(())
    }
}

/// Builds the minimal game whose reduced normal form is `nf`.
pub fn reconstruct(nf: &ReducedNormalForm) -> Result<GameStructure, ReconstructError> {
    if nf.profile_count() == 1 {
        return Err(ReconstructError::Degenerate);
    }
    let n = nf.players().len();
    let mut specs = Vec::with_capacity(n);
    let mut by_strategies = Vec::with_capacity(n);
    for p in 0..n {
        let cols = Columns::new(nf, p);
        let mut out = Vec::new();
        analyze(&cols, (0..nf.strategies(p).len()).collect(), (0..cols.count()).collect(), &mut out);
        let mut index: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (k, s) in out.iter().enumerate() {
            index.entry(s.strategies.clone()).or_default().push(k);
        }
        specs.push(out);
        by_strategies.push(index);
    }
    let mut r = Rebuild {
        nf,
        specs,
        by_strategies,
        b: GameBuilder::new(nf.players().iter().cloned()),
        infosets: BTreeMap::new(),
    };
    let root: Vec<Vec<usize>> = nf.sizes().into_iter().map(|k| (0..k).collect()).collect();
    r.node(root, None, Vec::new())?;

    let mut sets: Vec<(usize, usize, Vec<usize>)> = r
        .infosets
        .into_iter()
        .map(|((p, _), members)| (p, members[0], members))
        .collect();
    sets.sort();
    let mut count = vec![0usize; n];
    let mut b = r.b;
    for (p, _, members) in sets {
        count[p] += 1;
        b.add_infoset(nf.players()[p].clone(), format!("{}:{}", nf.players()[p], count[p]), members);
    }
    let g = b.build().map_err(|e| ReconstructError::Invalid(e.to_string()))?;
    let report = g.validate();
    if !report.is_valid() {
        return Err(ReconstructError::Unrealizable {
            cell: "root".into(),
            reason: report.to_string().trim_end().replace('\n', "; "),
        });
    }
    if rnf_isomorphic(&reduced_normal_form(&g), nf).is_none() {
        return Err(ReconstructError::Unrealizable {
            cell: "root".into(),
            reason: "the constructed structure has a different reduced normal form".into(),
        });
    }
    if !is_minimal(&g) {
        return Err(ReconstructError::Invalid("the constructed structure is not minimal".into()));
    }
    Ok(g)
}
