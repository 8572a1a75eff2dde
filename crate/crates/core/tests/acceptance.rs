//! Acceptance checks, one per criterion, each printing a PASS/FAIL line.
//! Runs without the libtest harness so the lines are never captured.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use egs_core::equivalence::{decide_equivalence, game_isomorphic, reconstruct, rnf_isomorphic, Method};
use egs_core::fixtures;
use egs_core::generate::{equivalent_variant, generate_random, perturb, GeneratorConfig};
use egs_core::normal_form::reduced_normal_form;
use egs_core::reduction::{minimize, minimize_random_order};
use egs_core::strategy::{behaviorally_equivalent, enumerate_strategies, kuhn_equivalent};
use egs_core::transform::{apply, coalesce, find_coalescing_sites, find_simultanizing_sites, find_sites, simultanize, Site};
use egs_core::GameStructure;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIXTURE_LIMIT: Duration = Duration::from_secs(1);
const INVARIANCE_LIMIT: Duration = Duration::from_secs(120);
const CONFLUENCE_LIMIT: Duration = Duration::from_secs(180);

fn report(n: u32, what: &str, ok: bool, detail: String) -> bool {
    println!("criterion {n} [{what}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

/// Players 2 to 4, depth 1 to 4, 2 or 3 actions.
fn suite_config(seed: u64, max_nodes: usize) -> GeneratorConfig {
    GeneratorConfig {
        seed,
        num_players: 2 + (seed % 3) as usize,
        max_depth: 1 + (seed / 3 % 4) as usize,
        max_actions: 2 + (seed / 12 % 2) as usize,
        simultaneity_prob: 0.25,
        infoset_merge_prob: 0.6,
        max_nodes,
    }
}

fn suite_games(count: u64) -> Vec<GameStructure> {
    (0..count).map(|s| generate_random(&suite_config(s, 40))).collect()
}

fn outcome_paths(g: &GameStructure) -> BTreeMap<String, Vec<String>> {
    g.terminals()
        .iter()
        .map(|&t| {
            let moves = g.path(t).into_iter().skip(1).map(|n| g.move_string(&g.node(n).mv)).collect();
            (g.terminal_name(t).to_owned(), moves)
        })
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn criterion_1_fixture_goldens() -> bool {
    let mut fails = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut check = |name: &str, f: &dyn Fn() -> bool| {
        let (ok, dt) = timed(f);
        slowest = slowest.max(dt);
        if !ok || dt >= FIXTURE_LIMIT {
            fails.push(format!("{name} ok={ok} {dt:?}"));
        }
    };
    check("fig1", &|| {
        let m = minimize(&fixtures::load("fig1_left")).minimal_game;
        game_isomorphic(&m, &fixtures::load("fig1_right"))
    });
    check("fig4", &|| {
        let g = fixtures::load("fig4_left");
        let site = find_coalescing_sites(&g).remove(0);
        let (out, _) = coalesce(&g, &site).unwrap();
        let right = fixtures::load("fig4_right");
        game_isomorphic(&out, &right) && outcome_paths(&out) == outcome_paths(&right)
    });
    check("fig5", &|| {
        let g = fixtures::load("fig5_left");
        let r = g.node_by_label("r").unwrap();
        let site = find_simultanizing_sites(&g).into_iter().find(|s| s.node == r).unwrap();
        let (out, _) = simultanize(&g, &site).unwrap();
        let right = fixtures::load("fig5_right");
        game_isomorphic(&out, &right) && outcome_paths(&out) == outcome_paths(&right)
    });
    check("fig7", &|| {
        let g = fixtures::load("fig7_left");
        let site = find_coalescing_sites(&g).remove(0);
        let (out, _) = coalesce(&g, &site).unwrap();
        game_isomorphic(&out, &fixtures::load("fig7_right"))
    });
    report(1, "fixture goldens", fails.is_empty(), format!("4 fixtures, slowest {slowest:?}, limit {FIXTURE_LIMIT:?}, failures {fails:?}"))
}

fn criterion_2_reconstruct_table() -> bool {
    let (ok, dt) = timed(|| {
        let g = reconstruct(&fixtures::fig8()).unwrap();
        game_isomorphic(&g, &fixtures::load("fig7_right"))
    });
    report(2, "reconstruction", ok && dt < FIXTURE_LIMIT, format!("{dt:?}, limit {FIXTURE_LIMIT:?}"))
}

fn criterion_3_site_interference() -> bool {
    let g = fixtures::load("fig7_left");
    let (gamma, sigma) = (find_coalescing_sites(&g), find_simultanizing_sites(&g));
    let (after, _) = coalesce(&g, &gamma[0]).unwrap();
    let left = find_simultanizing_sites(&after).len();
    let ok = gamma.len() == 1 && sigma.len() == 1 && left == 0;
    report(3, "site interference", ok, format!("γ sites {}, σ sites {}, σ after γ {left}", gamma.len(), sigma.len()))
}

fn criterion_4_invariance() -> bool {
    let t = Instant::now();
    let games = suite_games(200);
    let (mut steps, mut bad) = (0, Vec::new());
    for (k, g) in games.iter().enumerate() {
        let before = reduced_normal_form(g);
        for site in find_sites(g) {
            let (out, _) = apply(g, &site).unwrap();
            steps += 1;
            if rnf_isomorphic(&before, &reduced_normal_form(&out)).is_none() {
                bad.push(format!("game {k} {:?}", site.describe(g)));
            }
        }
    }
    let dt = t.elapsed();
    report(
        4,
        "invariance",
        bad.is_empty() && dt < INVARIANCE_LIMIT,
        format!("{} games, {steps} steps, {} failures, {dt:?}, limit {INVARIANCE_LIMIT:?}", games.len(), bad.len()),
    )
}

fn criterion_5_confluence() -> bool {
    let t = Instant::now();
    let games = suite_games(200);
    let mut bad = Vec::new();
    for (k, g) in games.iter().enumerate() {
        let mut results = vec![minimize(g).minimal_game];
        for seed in 0..5 {
            results.push(minimize_random_order(g, seed).minimal_game);
        }
        for a in 0..results.len() {
            for b in a + 1..results.len() {
                if !game_isomorphic(&results[a], &results[b]) {
                    bad.push(format!("game {k} runs {a}/{b}"));
                }
            }
        }
    }
    let dt = t.elapsed();
    report(
        5,
        "confluence",
        bad.is_empty() && dt < CONFLUENCE_LIMIT,
        format!("{} games x 6 reductions, {} failures {:?}, {dt:?}, limit {CONFLUENCE_LIMIT:?}", games.len(), bad.len(), bad.first()),
    )
}

fn criterion_6_kuhn_differential() -> bool {
    // a smaller node cap keeps the brute-force definition tractable
    let (mut pairs, mut bad) = (0u64, Vec::new());
    for seed in 0..500 {
        let g = generate_random(&suite_config(seed, 20));
        for p in g.players() {
            let s = enumerate_strategies(&g, p).unwrap();
            for a in 0..s.len() {
                for b in a..s.len() {
                    pairs += 1;
                    if kuhn_equivalent(&g, &s[a], &s[b]).unwrap() != behaviorally_equivalent(&g, &s[a], &s[b]).unwrap() {
                        bad.push(format!("seed {seed} {} {}", s[a].label(), s[b].label()));
                    }
                }
            }
        }
    }
    report(6, "kuhn differential", bad.is_empty(), format!("500 games, {pairs} pairs, {} disagreements", bad.len()))
}

fn criterion_7_round_trip_and_agreement() -> bool {
    let games = suite_games(200);
    let mut bad = Vec::new();
    for (k, g) in games.iter().enumerate() {
        match reconstruct(&reduced_normal_form(g)) {
            Ok(r) if game_isomorphic(&r, &minimize(g).minimal_game) => {}
            Ok(_) => bad.push(format!("game {k}: not isomorphic")),
            Err(e) => bad.push(format!("game {k}: {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut equivalent, mut inequivalent, mut disagreements) = (0, 0, 0);
    for (k, g) in games.iter().take(100).enumerate() {
        let v = equivalent_variant(g, &mut rng, 5);
        match decide_equivalence(g, &v, Method::Both) {
            Ok(verdict) if verdict.equivalent => equivalent += 1,
            Ok(_) => bad.push(format!("variant of game {k} judged inequivalent")),
            Err(_) => disagreements += 1,
        }
        let p = perturb(g, &mut rng);
        match decide_equivalence(g, &p, Method::Both) {
            Ok(verdict) if !verdict.equivalent => inequivalent += 1,
            Ok(_) => {}
            Err(_) => disagreements += 1,
        }
    }
    report(
        7,
        "round trip and agreement",
        bad.is_empty() && disagreements == 0,
        format!(
            "200 reconstructions, 100 variant pairs ({equivalent} equivalent), 100 perturbed pairs ({inequivalent} inequivalent), {disagreements} disagreements, problems {:?}",
            bad
        ),
    )
}

fn criterion_8_measures() -> bool {
    let games = suite_games(200);
    let (mut steps, mut bad) = (0, Vec::new());
    let mut check = |g: &GameStructure, site: &Site, out: &GameStructure, tag: String| {
        steps += 1;
        if out.height() > g.height() {
            bad.push(format!("{tag}: height grew"));
        }
        if let Site::Coalesce(c) = site {
            if out.action_count(c.player) >= g.action_count(c.player) {
                bad.push(format!("{tag}: Σ|F| did not drop"));
            }
        }
    };
    for (k, g) in games.iter().enumerate() {
        for site in find_sites(g) {
            let (out, _) = apply(g, &site).unwrap();
            check(g, &site, &out, format!("game {k}"));
        }
        // every step of the level-ordered and the random reductions
        let runs = std::iter::once(minimize(g).trace).chain((0..5).map(|s| minimize_random_order(g, s).trace));
        for trace in runs {
            let mut cur = g.clone();
            for step in &trace.steps {
                let site = step.site.resolve(&cur).expect("trace replays");
                let (out, _) = apply(&cur, &site).unwrap();
                check(&cur, &site, &out, format!("game {k} reduction"));
                cur = out;
            }
        }
    }
    report(8, "measure monotonicity", bad.is_empty(), format!("{steps} steps, {} failures {:?}", bad.len(), bad.first()))
}

fn main() {
    let results = [
        criterion_1_fixture_goldens(),
        criterion_2_reconstruct_table(),
        criterion_3_site_interference(),
        criterion_4_invariance(),
        criterion_5_confluence(),
        criterion_6_kuhn_differential(),
        criterion_7_round_trip_and_agreement(),
        criterion_8_measures(),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
