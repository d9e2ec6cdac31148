//! End-to-end sequential colorers.

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{vizing_chain, ChainError};
use crate::coloring::{ColoringError, PartialColoring};
use crate::fan::FanScratch;
use crate::graph::{EdgeId, Graph, Vertex};
use crate::msva::{msva, FinishMode, MsvaConfig, MsvaError, MsvaOutcome, MsvaRecord, MsvaScratch};
use crate::seed::LazySubstream;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequentialError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Msva(#[from] MsvaError),
}

/// Run summary written as JSON by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub schema: u32,
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub ell: Option<usize>,
    pub seed: Option<u64>,
    pub total_iterations: u64,
    pub restarts: u64,
    /// Sum of all computed path lengths (Vizing colorer only).
    pub path_length_sum: Option<u64>,
    pub wall_ns: u64,
    /// Entry `c - 1` counts the edges colored `c`.
    pub per_color_histogram: Vec<usize>,
}

impl RunStats {
    fn new(algorithm: &str, g: &Graph, phi: &PartialColoring) -> Self {
        let mut hist = vec![0; phi.palette()];
        for e in 0..g.m() {
            if let Some(c) = phi.color(e) {
                hist[c - 1] += 1;
            }
        }
        while hist.last() == Some(&0) {
            hist.pop();
        }
        RunStats {
            schema: 1,
            algorithm: algorithm.to_string(),
            n: g.n(),
            m: g.m(),
            delta: g.max_degree(),
            ell: None,
            seed: None,
            total_iterations: 0,
            restarts: 0,
            path_length_sum: None,
            wall_ns: 0,
            per_color_histogram: hist,
        }
    }
}

/// Uncolored edges in a dense array for O(1) uniform sampling.
struct Pool {
    edges: Vec<EdgeId>,
}

impl Pool {
    fn all(g: &Graph) -> Self {
        Pool { edges: (0..g.m()).collect() }
    }

    fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Removes and returns a uniform edge and a uniform endpoint of it.
    fn draw<R: Rng>(&mut self, g: &Graph, rng: &mut R) -> (EdgeId, Vertex) {
        let i = rng.gen_range(0..self.edges.len());
        let e = self.edges.swap_remove(i);
        let (u, v) = g.endpoints(e);
        (e, if rng.gen_bool(0.5) { u } else { v })
    }
}

pub struct VizingRun<'g> {
    pub coloring: PartialColoring<'g>,
    pub stats: RunStats,
    /// `(length(P), length(P'))` per iteration, `(0, 0)` for a happy fan.
    pub path_lengths: Vec<(usize, usize)>,
}

/// Colors `g` one random edge at a time with Vizing chains.
pub fn color_vizing(g: &Graph, seed: u64) -> Result<VizingRun<'_>, SequentialError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = PartialColoring::new(g);
    let mut scratch = FanScratch::new();
    let mut pool = Pool::all(g);
    let mut path_lengths = Vec::with_capacity(g.m());
    while !pool.is_empty() {
        let (e, x) = pool.draw(g, &mut rng);
        let v = vizing_chain(&mut phi, e, x, &mut rng, &mut scratch)?;
        phi.augment(&v.chain.edges())?;
        path_lengths.push((v.path_len, v.alt_path_len));
    }
    let mut stats = RunStats::new("vizing", g, &phi);
    stats.seed = Some(seed);
    stats.total_iterations = g.m() as u64;
    stats.path_length_sum = Some(path_lengths.iter().map(|&(a, b)| (a + b) as u64).sum());
    stats.wall_ns = start.elapsed().as_nanos() as u64;
    Ok(VizingRun { coloring: phi, stats, path_lengths })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MsvaRunOptions {
    pub ell: usize,
    pub cap: usize,
    pub validate: bool,
    pub keep_records: bool,
}

impl MsvaRunOptions {
    pub fn for_graph(g: &Graph) -> Self {
        let cfg = MsvaConfig::for_graph(g);
        MsvaRunOptions { ell: cfg.ell, cap: cfg.cap, validate: false, keep_records: false }
    }

    pub fn ell(mut self, ell: usize) -> Self {
        self.ell = ell;
        self
    }
}

pub struct MsvaRun<'g> {
    pub coloring: PartialColoring<'g>,
    pub stats: RunStats,
    /// One record per call, restarts included, when requested.
    pub records: Vec<MsvaRecord>,
}

/// Colors `g` one random edge at a time with multi-step Vizing chains. A
/// call that hits the iteration cap is rerun on the same edge and vertex with
/// a fresh random substream.
pub fn color_msva(g: &Graph, opts: MsvaRunOptions, seed: u64) -> Result<MsvaRun<'_>, SequentialError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = PartialColoring::new(g);
    let mut scratch = MsvaScratch::new(g);
    let cfg = MsvaConfig::new(opts.ell, opts.cap).finish(FinishMode::Augment).validate(opts.validate);
    let mut pool = Pool::all(g);
    let mut records = Vec::new();
    let (mut total, mut restarts) = (0u64, 0u64);
    while !pool.is_empty() {
        let (e, x) = pool.draw(g, &mut rng);
        for attempt in 0u64.. {
            let mut sub = LazySubstream::new(seed, &[e as u64, attempt]);
            let r = msva(&mut phi, e, x, &cfg, &mut sub, &mut scratch)?;
            total += r.record.iterations as u64;
            let done = r.record.outcome == MsvaOutcome::Success;
            if opts.keep_records {
                records.push(r.record);
            }
            if done {
                break;
            }
            restarts += 1;
        }
    }
    let mut stats = RunStats::new("msva", g, &phi);
    stats.ell = Some(opts.ell);
    stats.seed = Some(seed);
    stats.total_iterations = total;
    stats.restarts = restarts;
    stats.wall_ns = start.elapsed().as_nanos() as u64;
    Ok(MsvaRun { coloring: phi, stats, records })
}

/// Colors edges in id order with the smallest color free at both ends,
/// from a palette of `2Δ − 1`.
pub fn color_greedy(g: &Graph) -> (PartialColoring<'_>, RunStats) {
    let start = Instant::now();
    let palette = (2 * g.max_degree()).saturating_sub(1).max(1);
    let mut phi = PartialColoring::with_palette(g, palette);
    for e in 0..g.m() {
        let (u, v) = g.endpoints(e);
        let c = phi.common_missing_min(u, v).expect("2Δ − 1 colors always leave one free");
        phi.try_assign(e, c).expect("common missing color");
    }
    let mut stats = RunStats::new("greedy", g, &phi);
    stats.total_iterations = g.m() as u64;
    stats.wall_ns = start.elapsed().as_nanos() as u64;
    (phi, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::validate;
    use crate::graph::{complete, cycle, path, petersen, random_max_degree, star};

    #[test]
    fn single_edge() {
        let g = path(2);
        assert_eq!(color_vizing(&g, 1).unwrap().coloring.color(0), Some(1));
        let run = color_msva(&g, MsvaRunOptions::for_graph(&g), 1).unwrap();
        assert_eq!(run.coloring.color(0), Some(1));
        assert_eq!(color_greedy(&g).0.color(0), Some(1));
    }

    #[test]
    fn five_cycle_with_three_colors() {
        let g = cycle(5);
        for seed in 0..20 {
            let r = validate(&g, &color_vizing(&g, seed).unwrap().coloring);
            assert!(r.is_total_and_proper());
            assert!(r.max_color <= 3);
        }
    }

    #[test]
    fn k4_and_petersen_with_msva() {
        for g in [complete(4), petersen()] {
            let delta = g.max_degree();
            for seed in 0..10 {
                let opts = MsvaRunOptions { validate: true, ..MsvaRunOptions::for_graph(&g) };
                let r = validate(&g, &color_msva(&g, opts, seed).unwrap().coloring);
                assert!(r.is_total_and_proper());
                assert!(r.max_color <= delta + 1);
            }
        }
    }

    #[test]
    fn msva_is_deterministic() {
        let g = random_max_degree(300, 5, 2).unwrap();
        let opts = MsvaRunOptions::for_graph(&g);
        let a = color_msva(&g, opts, 77).unwrap();
        let b = color_msva(&g, opts, 77).unwrap();
        assert_eq!(a.coloring, b.coloring);
        assert_eq!(a.stats.total_iterations, b.stats.total_iterations);
    }

    #[test]
    fn greedy_star_uses_one_color_per_leaf() {
        let g = star(5);
        let (phi, stats) = color_greedy(&g);
        assert_eq!(phi.colors(), (1..=5).map(Some).collect::<Vec<_>>());
        assert_eq!(stats.per_color_histogram, vec![1; 5]);
    }

    #[test]
    fn greedy_stays_within_two_delta_minus_one() {
        for seed in 0..10 {
            let g = random_max_degree(200, 6, seed).unwrap();
            let (phi, _) = color_greedy(&g);
            let r = validate(&g, &phi);
            assert!(r.is_total_and_proper());
            assert!(r.max_color < 2 * g.max_degree());
        }
    }

    #[test]
    fn records_cover_every_call() {
        let g = random_max_degree(200, 4, 8).unwrap();
        let opts = MsvaRunOptions { keep_records: true, ..MsvaRunOptions::for_graph(&g).ell(4) };
        let run = color_msva(&g, opts, 3).unwrap();
        assert!(validate(&g, &run.coloring).is_total_and_proper());
        assert_eq!(run.records.len() as u64, g.m() as u64 + run.stats.restarts);
        assert_eq!(run.stats.total_iterations, run.records.iter().map(|r| r.iterations as u64).sum::<u64>());
    }
}
