//! Reduction to the minimal game by repeated Coalescing and Simultanizing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::GameStructure;
use crate::transform::{apply, find_coalescing_sites, find_simultanizing_sites, find_sites, Site, TransformTrace};

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub minimal_game: GameStructure,
    pub trace: TransformTrace,
    pub levels_processed: usize,
}

/// No coalescing and no simultanizing opportunity.
pub fn is_minimal(g: &GameStructure) -> bool {
    find_coalescing_sites(g).is_empty() && find_simultanizing_sites(g).is_empty()
}

/// Termination measure: over all terminals, the sum along the path of
/// `|I(h)| · (depth(h) + 1)`. Both transformations decrease it strictly.
pub fn measure(g: &GameStructure) -> u64 {
    let mut below = vec![0u64; g.node_count()];
    for (ix, nd) in g.nodes().iter().enumerate().rev() {
        below[ix] = if nd.is_terminal() {
            1
        } else {
            nd.children.iter().map(|c| below[c.0]).sum()
        };
    }
    g.nodes()
        .iter()
        .enumerate()
        .map(|(ix, nd)| below[ix] * nd.active.len() as u64 * (nd.depth as u64 + 1))
        .sum()
}

fn step(cur: &GameStructure, site: &Site, trace: &mut TransformTrace) -> GameStructure {
    let (next, st) = apply(cur, site).expect("site taken from the current game");
    debug_assert!(measure(&next) < measure(cur), "measure must decrease");
    debug_assert!(next.height() <= cur.height(), "height must not grow");
    trace.steps.push(st);
    next
}

/// Level-ordered reduction: for depth `n = 0, 1, …` apply Coalescing at sites
/// whose source set starts at depth `n`, then Simultanizing at nodes of depth
/// `n`, recomputing sites after every step. Sweeps repeat until one changes
/// nothing.
pub fn minimize(g: &GameStructure) -> ReductionResult {
    let mut cur = g.clone();
    let mut trace = TransformTrace::default();
    let mut levels = 0;
    loop {
        let before = trace.len();
        let mut n = 0;
        while n <= cur.height() {
            levels += 1;
            loop {
                let site = find_coalescing_sites(&cur)
                    .into_iter()
                    .find(|s| cur.node(cur.infoset(s.source).members[0]).depth == n);
                let Some(site) = site else { break };
                cur = step(&cur, &Site::Coalesce(site), &mut trace);
            }
            loop {
                let site = find_simultanizing_sites(&cur)
                    .into_iter()
                    .find(|s| cur.node(s.node).depth == n);
                let Some(site) = site else { break };
                cur = step(&cur, &Site::Simultanize(site), &mut trace);
            }
            n += 1;
        }
        if trace.len() == before {
            break;
        }
    }
    ReductionResult {
        minimal_game: cur,
        trace,
        levels_processed: levels,
    }
}

/// Applies a uniformly chosen available site until none is left.
pub fn minimize_random_order(g: &GameStructure, seed: u64) -> ReductionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = g.clone();
    let mut trace = TransformTrace::default();
    loop {
        let sites = find_sites(&cur);
        if sites.is_empty() {
            break;
        }
        let k = rng.gen_range(0..sites.len());
        cur = step(&cur, &sites[k], &mut trace);
    }
    ReductionResult {
        minimal_game: cur,
        trace,
        levels_processed: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::game_isomorphic;
    use crate::fixtures;
    use crate::transform::{coalesce, simultanize, SimultanizingSite};

    #[test]
    fn minimality_examples() {
        assert!(is_minimal(&fixtures::load("fig7_right")));
        assert!(!is_minimal(&fixtures::load("fig1_left")));
        assert!(!is_minimal(&fixtures::load("fig5_left")));
    }

    #[test]
    fn fig1_takes_one_step() {
        let r = minimize(&fixtures::load("fig1_left"));
        assert_eq!(r.trace.len(), 1);
        assert!(r.trace.steps[0].is_coalesce());
        assert!(game_isomorphic(&r.minimal_game, &fixtures::load("fig1_right")));
    }

    #[test]
    fn fig7_converges_from_either_order() {
        let left = fixtures::load("fig7_left");
        let right = fixtures::load("fig7_right");
        let r = minimize(&left);
        assert_eq!(r.trace.len(), 1);
        assert!(game_isomorphic(&r.minimal_game, &right));

        let t = left.node_by_label("t").unwrap();
        let sigma = find_simultanizing_sites(&left)
            .into_iter()
            .find(|s: &SimultanizingSite| s.node == t)
            .unwrap();
        let (mid, _) = simultanize(&left, &sigma).unwrap();
        let r2 = minimize(&mid);
        assert!(game_isomorphic(&r2.minimal_game, &right));
        for seed in 0..8 {
            let r3 = minimize_random_order(&left, seed);
            assert!(game_isomorphic(&r3.minimal_game, &right), "seed {seed}");
        }
    }

    #[test]
    fn fig4_is_confluent() {
        let g = fixtures::load("fig4_left");
        let m = minimize(&g).minimal_game;
        for seed in 0..8 {
            assert!(game_isomorphic(&minimize_random_order(&g, seed).minimal_game, &m));
        }
    }

    #[test]
    fn minimal_input_is_unchanged() {
        let g = fixtures::load("fig7_right");
        let r = minimize(&g);
        assert!(r.trace.is_empty());
        assert_eq!(r.minimal_game, g);
        assert!(minimize_random_order(&g, 3).trace.is_empty());
    }

    #[test]
    fn measure_drops_on_fixture_steps() {
        for name in fixtures::GAME_NAMES {
            let g = fixtures::load(name);
            for site in find_sites(&g) {
                let (next, _) = apply(&g, &site).unwrap();
                assert!(measure(&next) < measure(&g), "{name} {site:?}");
                assert!(next.height() <= g.height(), "{name}");
            }
        }
        let g = fixtures::load("fig1_left");
        let site = find_coalescing_sites(&g).remove(0);
        let (next, _) = coalesce(&g, &site).unwrap();
        assert_eq!(measure(&g), 7);
        assert_eq!(measure(&next), 3);
    }

    #[test]
    fn fixpoint() {
        for name in fixtures::GAME_NAMES {
            let m = minimize(&fixtures::load(name)).minimal_game;
            assert!(is_minimal(&m), "{name}");
            assert!(minimize(&m).trace.is_empty(), "{name}");
        }
    }
}
