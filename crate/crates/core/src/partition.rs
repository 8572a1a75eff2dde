//! Finite partitions ordered by refinement.
//!
//! `refines(p, q)` holds when every block of `p` is a union of blocks of `q`,
//! so the coarsest partition is the bottom element and [`join`] is the common
//! refinement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("empty block")]
    EmptyBlock,
    #[error("element {0} appears in two blocks")]
    Overlap(String),
    #[error("partitions have different ground sets")]
    GroundMismatch,
    #[error("join of an empty collection")]
    EmptyCollection,
    #[error("label {0} has an empty outcome set")]
    EmptyOutcome(String),
}

/// A partition with blocks sorted internally and ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition<T> {
    blocks: Vec<Vec<T>>,
}

impl<T: Ord + Clone + Debug> Partition<T> {
    pub fn new(blocks: Vec<Vec<T>>) -> Result<Self, PartitionError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            b.sort();
            for x in &b {
                if !seen.insert(x.clone()) {
                    return Err(PartitionError::Overlap(format!("{x:?}")));
                }
            }
            out.push(b);
        }
        out.sort_by(|a, b| a[0].cmp(&b[0]));
        Ok(Partition { blocks: out })
    }

    /// The partition with one block, or no blocks for an empty ground set.
    pub fn coarsest(ground: impl IntoIterator<Item = T>) -> Self {
        let mut b: Vec<T> = ground.into_iter().collect();
        b.sort();
        b.dedup();
        let blocks = if b.is_empty() { vec![] } else { vec![b] };
        Partition { blocks }
    }

    /// The partition into singletons.
    pub fn discrete(ground: impl IntoIterator<Item = T>) -> Self {
        let mut b: Vec<T> = ground.into_iter().collect();
        b.sort();
        b.dedup();
        Partition {
            blocks: b.into_iter().map(|x| vec![x]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<T>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground(&self) -> BTreeSet<T> {
        self.blocks.iter().flatten().cloned().collect()
    }

    pub fn block_of(&self, x: &T) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(x).is_ok())
    }
}

fn block_index<T: Ord + Clone>(p: &Partition<T>) -> BTreeMap<T, usize> {
    p.blocks
        .iter()
        .enumerate()
        .flat_map(|(k, b)| b.iter().map(move |x| (x.clone(), k)))
        .collect()
}

/// True iff every block of `p` is a union of blocks of `q`.
pub fn refines<T: Ord + Clone + Debug>(p: &Partition<T>, q: &Partition<T>) -> Result<bool, PartitionError> {
    if p.ground() != q.ground() {
        return Err(PartitionError::GroundMismatch);
    }
    let pi = block_index(p);
    Ok(q.blocks.iter().all(|b| b.iter().all(|x| pi[x] == pi[&b[0]])))
}

/// Least upper bound: nonempty intersections of one block from each input.
pub fn join<T: Ord + Clone + Debug>(ps: &[Partition<T>]) -> Result<Partition<T>, PartitionError> {
    let (first, rest) = ps.split_first().ok_or(PartitionError::EmptyCollection)?;
    let ground = first.ground();
    let mut index: Vec<BTreeMap<T, usize>> = vec![block_index(first)];
    for p in rest {
        if p.ground() != ground {
            return Err(PartitionError::GroundMismatch);
        }
        index.push(block_index(p));
    }
    let mut cells: BTreeMap<Vec<usize>, Vec<T>> = BTreeMap::new();
    for x in ground {
        let key = index.iter().map(|ix| ix[&x]).collect();
        cells.entry(key).or_default().push(x);
    }
    Partition::new(cells.into_values().collect())
}

/// The finest partition of the labels whose blockwise unions of outcome sets
/// are pairwise disjoint: connected components of the overlap graph.
pub fn finest_outcome_partition<T, Z>(outcomes: &BTreeMap<T, BTreeSet<Z>>) -> Result<Partition<T>, PartitionError>
where
    T: Ord + Clone + Debug,
    Z: Ord,
{
    let labels: Vec<&T> = outcomes.keys().collect();
    let mut uf = UnionFind::<usize>::new(labels.len());
    let mut owner: BTreeMap<&Z, usize> = BTreeMap::new();
    for (k, (label, zs)) in outcomes.iter().enumerate() {
        if zs.is_empty() {
            return Err(PartitionError::EmptyOutcome(format!("{label:?}")));
        }
        for z in zs {
            match owner.get(z) {
                Some(&j) => {
                    uf.union(j, k);
                }
                None => {
                    owner.insert(z, k);
                }
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<T>> = BTreeMap::new();
    for (k, label) in labels.into_iter().enumerate() {
        comps.entry(uf.find(k)).or_default().push(label.clone());
    }
    Partition::new(comps.into_values().collect())
}
