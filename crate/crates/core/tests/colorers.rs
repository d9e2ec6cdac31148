use vizing::checks::brute_force_proper;
use vizing::graph::{complete, cycle, grid, path, petersen, random_max_degree, random_regular, star};
use vizing::local::{run_distributed, stage, LocalConfig};
use vizing::sequential::{color_greedy, color_msva, color_vizing, MsvaRunOptions};
use vizing::{validate, Graph, PartialColoring};

fn small_corpus() -> Vec<Graph> {
    let mut gs = vec![complete(4), complete(6), petersen(), cycle(5), star(7), path(9), grid(6, 7)];
    for seed in 0..12 {
        gs.push(random_max_degree(150, 3 + seed as usize % 6, seed).unwrap());
    }
    gs.push(random_regular(200, 5, 3).unwrap());
    gs
}

#[test]
fn every_colorer_is_proper_on_the_corpus() {
    for (i, g) in small_corpus().iter().enumerate() {
        let delta = g.max_degree();
        let v = color_vizing(g, i as u64).unwrap();
        let r = validate(g, &v.coloring);
        assert!(r.is_total_and_proper() && r.max_color <= delta + 1, "vizing on graph {i}");
        assert!(brute_force_proper(g, &v.coloring.colors(), delta + 1));

        let opts = MsvaRunOptions { validate: true, ..MsvaRunOptions::for_graph(g) };
        let m = color_msva(g, opts, i as u64).unwrap();
        let r = validate(g, &m.coloring);
        assert!(r.is_total_and_proper() && r.max_color <= delta + 1, "msva on graph {i}");

        let (gr, _) = color_greedy(g);
        let r = validate(g, &gr);
        assert!(r.is_total_and_proper() && r.max_color < 2 * delta.max(1), "greedy on graph {i}");
    }
}

#[test]
fn stats_match_the_coloring() {
    let g = random_max_degree(500, 6, 12).unwrap();
    let run = color_vizing(&g, 4).unwrap();
    assert_eq!(run.stats.per_color_histogram.iter().sum::<usize>(), g.m());
    assert_eq!(run.path_lengths.len(), g.m());
    let json = serde_json::to_value(&run.stats).unwrap();
    assert_eq!(json["schema"], 1);
    for key in ["n", "m", "delta", "ell", "seed", "total_iterations", "restarts", "wall_ns", "per_color_histogram"] {
        assert!(json.get(key).is_some(), "{key} missing");
    }
}

#[test]
fn stages_shrink_by_exactly_the_winners() {
    let g = random_max_degree(600, 5, 21).unwrap();
    let cfg = LocalConfig { ell: 100, t: 64, stage_cap: 1, seed: 5 };
    let mut phi = PartialColoring::new(&g);
    for s in 1..=40 {
        if phi.uncolored_count() == 0 {
            break;
        }
        let before = phi.uncolored_count();
        let (trace, state) = stage(&mut phi, &cfg, s).unwrap();
        assert_eq!(phi.uncolored_count(), before - trace.winners);
        assert!(validate(&g, &phi).is_valid());
        for &w in &state.winners {
            assert!(state.gamma[w].iter().all(|u| !state.winners.contains(u)));
        }
        for (i, (_, a)) in state.chains.iter().enumerate() {
            let va = a.vertices(&g);
            for (j, (_, b)) in state.chains.iter().enumerate().skip(i + 1) {
                let meet = b.vertices(&g).iter().any(|v| va.contains(v));
                assert_eq!(meet, state.gamma[i].binary_search(&j).is_ok());
            }
        }
    }
}

#[test]
fn distributed_runs_finish_and_are_deterministic() {
    let g = random_max_degree(2000, 4, 2).unwrap();
    let cfg = LocalConfig { ell: 64, t: 64, stage_cap: 200, seed: 17 };
    let a = run_distributed(&g, &cfg).unwrap();
    let b = run_distributed(&g, &cfg).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.coloring, b.coloring);
    let r = validate(&g, &a.coloring);
    assert!(r.is_total_and_proper() && r.max_color <= 5);
    let sum: usize = a.trace.iter().map(|t| t.rounds_charged).sum();
    assert_eq!(a.trace.last().unwrap().cumulative_rounds, sum);
}
