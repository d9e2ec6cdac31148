//! Stage-by-stage simulation of the randomized distributed colorer.
//!
//! In each stage every uncolored edge runs a capped multi-step search
//! against the same frozen coloring. Successful chains that share a vertex
//! conflict; a random independent set of the conflict graph is augmented all
//! at once, which is sound because its chains are vertex-disjoint.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{MultiStepChain, PartialColoring};
use crate::graph::{EdgeId, Graph, Vertex};
use crate::msva::{msva, FinishMode, MsvaConfig, MsvaError, MsvaOutcome, MsvaScratch};
use crate::seed::{mix, substream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalConfig {
    pub ell: usize,
    /// Iteration budget of each search.
    pub t: usize,
    pub stage_cap: usize,
    pub seed: u64,
}

/// One line of the stage trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub schema: u32,
    pub stage: usize,
    #[serde(rename = "U")]
    pub uncolored: usize,
    #[serde(rename = "S")]
    pub succeeded: usize,
    #[serde(rename = "W")]
    pub winners: usize,
    pub gamma_edges: usize,
    pub mean_conflict_degree: f64,
    pub rounds_charged: usize,
    pub cumulative_rounds: usize,
}

/// What one stage saw, kept for inspection by tests and experiments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageState {
    pub uncolored: Vec<EdgeId>,
    /// Chains of the successful edges, in the order of `uncolored`.
    pub chains: Vec<(EdgeId, MultiStepChain)>,
    /// Conflict graph on `chains` (indices into it), as sorted adjacency lists.
    pub gamma: Vec<Vec<usize>>,
    pub winners: Vec<usize>,
}

impl StageState {
    pub fn gamma_edges(&self) -> usize {
        self.gamma.iter().map(Vec::len).sum::<usize>() / 2
    }
}

#[derive(Debug, Error)]
pub enum LocalError<'g> {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("chains of edges {0} and {1} share a vertex")]
    SnapshotViolation(EdgeId, EdgeId),
    #[error(transparent)]
    Msva(#[from] MsvaError),
    #[error("{} edges still uncolored after {} stages", .0.coloring.uncolored_count(), .0.trace.len())]
    StageCapExceeded(Box<DistributedRun<'g>>),
}

#[derive(Debug)]
pub struct DistributedRun<'g> {
    pub coloring: PartialColoring<'g>,
    pub trace: Vec<StageTrace>,
}

impl DistributedRun<'_> {
    pub fn residual(&self) -> Vec<EdgeId> {
        (0..self.coloring.graph().m()).filter(|&e| self.coloring.is_blank(e)).collect()
    }
}

/// Keeps `v` iff `(x_v, v)` beats `(x_u, u)` for every neighbor `u`, with the
/// `x_v` drawn uniformly from `[0, 1)` in vertex order.
pub fn random_independent_set(adj: &[Vec<usize>], seed: u64) -> Vec<usize> {
    let mut rng = substream(seed, &[]);
    let x: Vec<f64> = (0..adj.len()).map(|_| rng.gen()).collect();
    (0..adj.len())
        .filter(|&v| adj[v].iter().all(|&u| (x[v], v) > (x[u], u)))
        .collect()
}

/// Conflict graph: chains `i` and `j` are adjacent iff their vertex sets
/// meet, found through an inverted vertex → chain index.
pub fn conflict_graph(n: usize, vertex_sets: &[Vec<Vertex>]) -> Vec<Vec<usize>> {
    let mut touching: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, vs) in vertex_sets.iter().enumerate() {
        for &v in vs {
            touching[v].push(i as u32);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertex_sets.len()];
    for list in &touching {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                adj[i as usize].push(j as usize);
                adj[j as usize].push(i as usize);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// Runs one stage on `phi` and applies the winning augmentations.
pub fn stage<'g>(
    phi: &mut PartialColoring<'g>,
    cfg: &LocalConfig,
    stage_index: usize,
) -> Result<(StageTrace, StageState), LocalError<'g>> {
    if cfg.ell < 2 || cfg.t == 0 {
        return Err(LocalError::InvalidConfig(format!(
            "need ell >= 2 and t >= 1, got ell = {}, t = {}",
            cfg.ell, cfg.t
        )));
    }
    let g: &'g Graph = phi.graph();
    let uncolored: Vec<EdgeId> = (0..g.m()).filter(|&e| phi.is_blank(e)).collect();
    let mcfg = MsvaConfig::new(cfg.ell, cfg.t).finish(FinishMode::Restore);
    let snapshot: &PartialColoring<'g> = phi;
    let results: Vec<Result<Option<MultiStepChain>, MsvaError>> = uncolored
        .par_iter()
        .map_init(
            || (snapshot.clone(), MsvaScratch::new(g)),
            |(local, scratch), &e| {
                let mut rng = substream(cfg.seed, &[stage_index as u64, e as u64]);
                let (a, b) = g.endpoints(e);
                let x = if rng.gen_bool(0.5) { a } else { b };
                let r = msva(local, e, x, &mcfg, &mut rng, scratch)?;
                Ok(match r.record.outcome {
                    MsvaOutcome::Success => r.chain,
                    MsvaOutcome::IterationCapHit => None,
                })
            },
        )
        .collect();
    let mut chains = Vec::new();
    for (&e, r) in uncolored.iter().zip(results) {
        if let Some(c) = r? {
            chains.push((e, c));
        }
    }
    let vertex_sets: Vec<Vec<Vertex>> = chains.iter().map(|(_, c)| c.vertices(g)).collect();
    let gamma = conflict_graph(g.n(), &vertex_sets);
    let winners = random_independent_set(&gamma, mix(cfg.seed, &[stage_index as u64, u64::MAX]));

    let mut owner: Vec<Option<EdgeId>> = vec![None; g.n()];
    for &w in &winners {
        for &v in &vertex_sets[w] {
            if let Some(other) = owner[v] {
                return Err(LocalError::SnapshotViolation(other, chains[w].0));
            }
            owner[v] = Some(chains[w].0);
        }
    }
    for &w in &winners {
        phi.augment(&chains[w].1.edges())
            .map_err(|err| MsvaError::InvariantViolated(format!("stage augmentation failed: {err}")))?;
    }

    let longest = chains.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    let state = StageState { uncolored, chains, gamma, winners };
    let gamma_edges = state.gamma_edges();
    let succeeded = state.chains.len();
    let trace = StageTrace {
        schema: 1,
        stage: stage_index,
        uncolored: state.uncolored.len(),
        succeeded,
        winners: state.winners.len(),
        gamma_edges,
        mean_conflict_degree: if succeeded == 0 { 0.0 } else { 2.0 * gamma_edges as f64 / succeeded as f64 },
        rounds_charged: 2 * longest,
        cumulative_rounds: 0,
    };
    Ok((trace, state))
}

/// Repeats [`stage`] until every edge is colored or `stage_cap` stages ran.
pub fn run_distributed<'g>(g: &'g Graph, cfg: &LocalConfig) -> Result<DistributedRun<'g>, LocalError<'g>> {
    if cfg.stage_cap == 0 {
        return Err(LocalError::InvalidConfig("stage_cap must be at least 1".into()));
    }
    let mut phi = PartialColoring::new(g);
    let mut trace = Vec::new();
    let mut rounds = 0;
    for s in 1..=cfg.stage_cap {
        if phi.uncolored_count() == 0 {
            break;
        }
        let (mut t, _) = stage(&mut phi, cfg, s)?;
        rounds += t.rounds_charged;
        t.cumulative_rounds = rounds;
        trace.push(t);
    }
    let run = DistributedRun { coloring: phi, trace };
    if run.coloring.uncolored_count() > 0 {
        return Err(LocalError::StageCapExceeded(Box::new(run)));
    }
    Ok(run)
}

pub fn trace_to_jsonl(trace: &[StageTrace]) -> String {
    let mut out = String::new();
    for t in trace {
        out.push_str(&serde_json::to_string(t).expect("trace serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::validate;
    use crate::graph::{cycle, path, random_max_degree, Graph};

    fn cfg(seed: u64) -> LocalConfig {
        LocalConfig { ell: 16, t: 32, stage_cap: 200, seed }
    }

    #[test]
    fn single_edge_one_stage() {
        let g = path(2);
        let run = run_distributed(&g, &cfg(0)).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!((run.trace[0].uncolored, run.trace[0].succeeded, run.trace[0].winners), (1, 1, 1));
        assert_eq!(run.coloring.color(0), Some(1));
    }

    #[test]
    fn far_apart_edges_both_colored() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let mut phi = PartialColoring::new(&g);
        let (t, s) = stage(&mut phi, &cfg(1), 1).unwrap();
        assert_eq!((t.winners, t.gamma_edges), (2, 0));
        assert!(s.gamma.iter().all(Vec::is_empty));
        assert_eq!(phi.uncolored_count(), 0);
    }

    #[test]
    fn adjacent_edges_conflict() {
        let g = path(3);
        let mut phi = PartialColoring::new(&g);
        let (t, _) = stage(&mut phi, &cfg(2), 1).unwrap();
        assert_eq!((t.succeeded, t.gamma_edges, t.winners), (2, 1, 1));
        assert_eq!(phi.uncolored_count(), 1);
    }

    #[test]
    fn independent_set_basics() {
        assert_eq!(random_independent_set(&[vec![], vec![], vec![]], 4), vec![0, 1, 2]);
        for seed in 0..50 {
            assert_eq!(random_independent_set(&[vec![1], vec![0]], seed).len(), 1);
        }
    }

    #[test]
    fn conflict_graph_via_shared_vertices() {
        let adj = conflict_graph(5, &[vec![0, 1], vec![1, 2], vec![3, 4], vec![0, 2]]);
        assert_eq!(adj, vec![vec![1, 3], vec![0, 3], vec![], vec![0, 1]]);
    }

    #[test]
    fn stage_cap_zero_is_invalid() {
        let g = cycle(4);
        let c = LocalConfig { stage_cap: 0, ..cfg(0) };
        assert!(matches!(run_distributed(&g, &c), Err(LocalError::InvalidConfig(_))));
    }

    #[test]
    fn runs_are_deterministic_and_proper() {
        let g = random_max_degree(400, 4, 5).unwrap();
        let a = run_distributed(&g, &cfg(9)).unwrap();
        let b = run_distributed(&g, &cfg(9)).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.coloring, b.coloring);
        assert!(validate(&g, &a.coloring).is_total_and_proper());
        let mut left = g.m();
        for t in &a.trace {
            assert_eq!(t.uncolored, left);
            left -= t.winners;
        }
        assert_eq!(left, 0);
    }

    #[test]
    fn stage_cap_exceeded_reports_residual() {
        let g = random_max_degree(200, 4, 1).unwrap();
        let c = LocalConfig { stage_cap: 1, ..cfg(0) };
        match run_distributed(&g, &c) {
            Err(LocalError::StageCapExceeded(run)) => {
                assert_eq!(run.trace.len(), 1);
                assert_eq!(run.residual().len(), run.coloring.uncolored_count());
                assert!(run.coloring.uncolored_count() > 0);
            }
            other => panic!("expected StageCapExceeded, got {:?}", other.map(|r| r.trace.len())),
        }
    }
}
