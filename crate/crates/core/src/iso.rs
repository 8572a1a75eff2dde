//! Isomorphism of vertex-colored graphs with labeled directed edges, by color
//! refinement and individualization.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub(crate) struct Graph {
    colors: Vec<u32>,
    /// (neighbor, label); out-edges carry even labels, in-edges odd ones.
    adj: Vec<Vec<(usize, u32)>>,
}

impl Graph {
    pub fn add_vertex(&mut self, color: u32) -> usize {
        self.colors.push(color);
        self.adj.push(Vec::new());
        self.colors.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: u32) {
        self.adj[from].push((to, 2 * label));
        self.adj[to].push((from, 2 * label + 1));
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }
}

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Hash of a vertex's color and the multiset of (edge label, neighbor color).
/// Collisions only weaken pruning: the result is still an invariant.
fn signature(g: &Graph, colors: &[u32], v: usize) -> u64 {
    g.adj[v]
        .iter()
        .fold(0u64, |h, &(u, l)| h.wrapping_add(mix((l as u64) << 32 | colors[u] as u64)))
}

fn class_count(a: &[u32], b: &[u32]) -> Option<usize> {
    let mut ca = a.to_vec();
    let mut cb = b.to_vec();
    ca.sort_unstable();
    cb.sort_unstable();
    if ca != cb {
        return None;
    }
    ca.dedup();
    Some(ca.len())
}

/// Refines both colorings jointly until stable; `None` once the color
/// histograms differ.
fn refine(ga: &Graph, gb: &Graph, mut ca: Vec<u32>, mut cb: Vec<u32>) -> Option<(Vec<u32>, Vec<u32>)> {
    let mut classes = class_count(&ca, &cb)?;
    loop {
        let ka: Vec<(u32, u64)> = (0..ga.len()).map(|v| (ca[v], signature(ga, &ca, v))).collect();
        let kb: Vec<(u32, u64)> = (0..gb.len()).map(|v| (cb[v], signature(gb, &cb, v))).collect();
        let mut keys: Vec<(u32, u64)> = ka.iter().chain(&kb).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        let id = |k: &(u32, u64)| keys.binary_search(k).unwrap() as u32;
        let na: Vec<u32> = ka.iter().map(id).collect();
        let nb: Vec<u32> = kb.iter().map(id).collect();
        let n = class_count(&na, &nb)?;
        ca = na;
        cb = nb;
        if n == classes {
            return Some((ca, cb));
        }
        classes = n;
    }
}

fn verify(ga: &Graph, gb: &Graph, f: &[usize]) -> bool {
    (0..ga.len()).all(|v| {
        let mut x: Vec<(usize, u32)> = ga.adj[v].iter().map(|&(u, l)| (f[u], l)).collect();
        let mut y = gb.adj[f[v]].clone();
        x.sort_unstable();
        y.sort_unstable();
        x == y
    })
}

fn search(ga: &Graph, gb: &Graph, ca: Vec<u32>, cb: Vec<u32>) -> Option<Vec<usize>> {
    let (ca, cb) = refine(ga, gb, ca, cb)?;
    let mut size: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &ca {
        *size.entry(c).or_default() += 1;
    }
    let target = size
        .iter()
        .filter(|(_, &n)| n > 1)
        .min_by_key(|(&c, &n)| (n, c))
        .map(|(&c, _)| c);
    match target {
        None => {
            let mut pos: BTreeMap<u32, usize> = BTreeMap::new();
            for (w, &c) in cb.iter().enumerate() {
                pos.insert(c, w);
            }
            let f: Vec<usize> = ca.iter().map(|c| pos[c]).collect();
            verify(ga, gb, &f).then_some(f)
        }
        Some(c) => {
            let v = ca.iter().position(|&x| x == c).expect("class is nonempty");
            let fresh = ca.iter().chain(&cb).max().copied().unwrap_or(0) + 1;
            for w in (0..gb.len()).filter(|&w| cb[w] == c) {
                let mut na = ca.clone();
                let mut nb = cb.clone();
                na[v] = fresh;
                nb[w] = fresh;
                if let Some(f) = search(ga, gb, na, nb) {
                    return Some(f);
                }
            }
            None
        }
    }
}

/// A color-preserving, label-preserving bijection from `a` to `b`, if any.
/// Vertex colors of the two graphs must come from one shared palette.
pub(crate) fn isomorphism(a: &Graph, b: &Graph) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let ea: usize = a.adj.iter().map(Vec::len).sum();
    let eb: usize = b.adj.iter().map(Vec::len).sum();
    if ea != eb {
        return None;
    }
    search(a, b, a.colors.clone(), b.colors.clone())
}
