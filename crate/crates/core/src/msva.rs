//! The multi-step Vizing search: grow a non-intersecting chain of Vizing
//! chains, cutting each two-colored path at a random length in `[ℓ, 2ℓ)`,
//! and jump back to an earlier step whenever a new candidate runs into the
//! chain built so far.
//!
//! Shifts are applied to the caller's coloring as the chain grows and undone
//! on backtracking, so a call that hits its iteration cap leaves the
//! coloring exactly as it found it.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{first_chain, next_chain, Chain, ChainError};
use crate::checks;
use crate::coloring::{fan_plus_path, Color, Fan, MultiStepChain, PartialColoring, PathChain};
use crate::fan::FanScratch;
use crate::graph::{EdgeId, Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MsvaError {
    #[error("reached the failure branch on edge {edge} at iteration {iteration}")]
    InternalFailReached { edge: EdgeId, iteration: usize },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

impl From<ChainError> for MsvaError {
    fn from(e: ChainError) -> Self {
        MsvaError::InvariantViolated(e.to_string())
    }
}

/// What to do with the coloring once a happy chain is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinishMode {
    /// Undo every shift and hand back the chain.
    Restore,
    /// Shift along the chain and color its last edge.
    Augment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MsvaConfig {
    pub ell: usize,
    pub cap: usize,
    pub finish: FinishMode,
    /// Check the loop invariants against the pre-call coloring every iteration.
    pub validate: bool,
}

impl MsvaConfig {
    pub fn new(ell: usize, cap: usize) -> Self {
        MsvaConfig { ell, cap, finish: FinishMode::Augment, validate: false }
    }

    pub fn for_graph(g: &Graph) -> Self {
        Self::new(default_ell(g.max_degree()), default_cap(g.n()))
    }

    pub fn finish(mut self, finish: FinishMode) -> Self {
        self.finish = finish;
        self
    }

    pub fn validate(mut self, validate: bool) -> Self {
        self.validate = validate;
        self
    }
}

/// `max(16, 4Δ²)`.
pub fn default_ell(delta: usize) -> usize {
    (4 * delta * delta).max(16)
}

/// `64 · (1 + ⌊log₂ n⌋)`.
pub fn default_cap(n: usize) -> usize {
    64 * (1 + n.max(1).ilog2() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MsvaOutcome {
    Success,
    IterationCapHit,
}

/// The record of one call: `d_i = 1` for each append, `j − k` for each jump
/// back from step `k` to step `j`, and the terminus `(End(C), vEnd(C))` of
/// the committed chain when the call stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsvaRecord {
    pub edge: EdgeId,
    pub iterations: usize,
    pub d: Vec<i64>,
    pub terminus: (EdgeId, Vertex),
    pub outcome: MsvaOutcome,
}

impl MsvaRecord {
    /// Whether every prefix sum of `d` is nonnegative.
    pub fn prefix_sums_valid(&self) -> bool {
        let mut s = 0;
        self.d.iter().all(|&x| {
            s += x;
            s >= 0
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsvaResult {
    pub record: MsvaRecord,
    /// `C + F + P` on success.
    pub chain: Option<MultiStepChain>,
    /// Color given to the chain's last edge in [`FinishMode::Augment`].
    pub color: Option<Color>,
}

struct Step {
    fan: Fan,
    /// The candidate path `P` this step was cut from.
    full: PathChain,
    full_colors: (Color, Color),
    /// `P_k = P|ℓ'`.
    cut: PathChain,
    /// `F_k + P_k`.
    edges: Vec<EdgeId>,
}

/// Per-worker buffers: fan tables and epoch-stamped visited marks.
#[derive(Debug, Clone, Default)]
pub struct MsvaScratch {
    fan: FanScratch,
    epoch: u32,
    v_epoch: Vec<u32>,
    v_step: Vec<u32>,
    e_epoch: Vec<u32>,
    e_step: Vec<u32>,
}

impl MsvaScratch {
    pub fn new(g: &Graph) -> Self {
        let mut s = Self::default();
        s.ensure(g);
        s
    }

    fn ensure(&mut self, g: &Graph) {
        if self.v_epoch.len() < g.n() {
            self.v_epoch.resize(g.n(), 0);
            self.v_step.resize(g.n(), 0);
        }
        if self.e_epoch.len() < g.m() {
            self.e_epoch.resize(g.m(), 0);
            self.e_step.resize(g.m(), 0);
        }
    }

    fn begin(&mut self, g: &Graph) {
        self.ensure(g);
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.v_epoch.iter_mut().for_each(|x| *x = 0);
            self.e_epoch.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
    }

    fn mark(&mut self, step: &Step, k: usize) {
        for v in step.fan.vertices() {
            self.v_epoch[v] = self.epoch;
            self.v_step[v] = k as u32;
        }
        for &e in step.cut.internal_edges() {
            self.e_epoch[e] = self.epoch;
            self.e_step[e] = k as u32;
        }
    }

    fn unmark(&mut self, step: &Step) {
        for v in step.fan.vertices() {
            self.v_epoch[v] = 0;
        }
        for &e in step.cut.internal_edges() {
            self.e_epoch[e] = 0;
        }
    }

    fn vertex(&self, v: Vertex) -> Option<usize> {
        (self.v_epoch[v] == self.epoch).then(|| self.v_step[v] as usize)
    }

    fn edge(&self, e: EdgeId) -> Option<usize> {
        (self.e_epoch[e] == self.epoch).then(|| self.e_step[e] as usize)
    }

    /// The owner step of the first marked element of `F + P`, walked as:
    /// pivot, then each fan edge followed by its leaf, then each path edge
    /// after the first followed by its far endpoint. The flag tells whether
    /// the hit was a vertex.
    fn first_marked(&self, g: &Graph, cand: &Chain) -> Option<(usize, bool)> {
        if let Some(j) = self.vertex(cand.fan.pivot) {
            return Some((j, true));
        }
        for (&e, &y) in cand.fan.edges.iter().zip(&cand.fan.leaves) {
            if let Some(j) = self.edge(e) {
                return Some((j, false));
            }
            if let Some(j) = self.vertex(y) {
                return Some((j, true));
            }
        }
        let mut cur = cand.fan.vend();
        for &e in &cand.path.edges[1..] {
            if let Some(j) = self.edge(e) {
                return Some((j, false));
            }
            cur = g.other(e, cur);
            if let Some(j) = self.vertex(cur) {
                return Some((j, true));
            }
        }
        None
    }
}

fn terminus(g: &Graph, steps: &[Step], e: EdgeId, x: Vertex) -> (EdgeId, Vertex) {
    match steps.last() {
        Some(s) => (s.cut.end(), s.cut.vend),
        None => (e, g.other(e, x)),
    }
}

/// Runs the search for the uncolored edge `e` with starting vertex `x`.
///
/// On success the coloring is left per `cfg.finish`; on hitting the
/// iteration cap it is restored and the record is still returned.
pub fn msva<R: Rng + ?Sized>(
    phi: &mut PartialColoring,
    e: EdgeId,
    x: Vertex,
    cfg: &MsvaConfig,
    rng: &mut R,
    scratch: &mut MsvaScratch,
) -> Result<MsvaResult, MsvaError> {
    let g = phi.graph();
    let ell = cfg.ell;
    if e >= g.m() || !g.has_endpoint(e, x) || !phi.is_blank(e) {
        return Err(MsvaError::PreconditionViolated(format!(
            "edge {e} must be uncolored and contain {x}"
        )));
    }
    if ell < 2 || cfg.cap == 0 {
        return Err(MsvaError::PreconditionViolated(format!(
            "need ell >= 2 and cap >= 1, got ell = {ell}, cap = {}",
            cfg.cap
        )));
    }
    let original = cfg.validate.then(|| phi.clone());
    scratch.begin(g);
    let mut cand = first_chain(phi, e, x, ell, &mut scratch.fan)?;
    let mut steps: Vec<Step> = Vec::new();
    let mut d: Vec<i64> = Vec::new();
    let mut iterations = 0;
    loop {
        if iterations == cfg.cap {
            let terminus = terminus(g, &steps, e, x);
            for s in steps.iter().rev() {
                phi.unshift_chain(&s.edges).expect("undo of a committed step");
                scratch.unmark(s);
            }
            let record = MsvaRecord { edge: e, iterations, d, terminus, outcome: MsvaOutcome::IterationCapHit };
            return Ok(MsvaResult { record, chain: None, color: None });
        }
        iterations += 1;
        if let Some(phi0) = &original {
            check_loop_head(phi0, phi, &steps, &cand, e, x, ell)?;
        }

        if cand.path.len() < 2 * ell {
            let terminus = terminus(g, &steps, e, x);
            let mut chain = MultiStepChain {
                steps: steps.iter().map(|s| (s.fan.clone(), s.cut.clone())).collect(),
            };
            let cand_edges = cand.edges();
            chain.steps.push((cand.fan, cand.path));
            let color = match cfg.finish {
                FinishMode::Augment => Some(phi.augment(&cand_edges).map_err(|err| {
                    MsvaError::InvariantViolated(format!("final candidate is not happy: {err}"))
                })?),
                FinishMode::Restore => {
                    for s in steps.iter().rev() {
                        phi.unshift_chain(&s.edges).expect("undo of a committed step");
                    }
                    None
                }
            };
            for s in &steps {
                scratch.unmark(s);
            }
            let record = MsvaRecord { edge: e, iterations, d, terminus, outcome: MsvaOutcome::Success };
            return Ok(MsvaResult { record, chain: Some(chain), color });
        }

        let cut_len = rng.gen_range(ell..2 * ell);
        let cut = cand.path.prefix(g, cut_len);
        let colors = cand
            .colors
            .ok_or_else(|| MsvaError::InvariantViolated("long path on a happy fan".into()))?;
        // End(P_k) carries β; the other path color is α
        let beta = cand.path_color(cut_len - 1).expect("cut has at least two edges");
        let alpha = if beta == colors.0 { colors.1 } else { colors.0 };
        let edges = fan_plus_path(&cand.fan, &cut);
        phi.shift_chain(&edges).map_err(|err| {
            MsvaError::InvariantViolated(format!("candidate F + P_k is not shiftable: {err}"))
        })?;
        let k = steps.len();
        let step = Step { fan: cand.fan, full: cand.path, full_colors: colors, cut, edges };
        scratch.mark(&step, k);
        steps.push(step);
        if let Some(phi0) = &original {
            check_committed_paths(phi0, &steps)?;
        }

        let last = &steps[k].cut;
        let (uv, v) = (last.end(), last.vend);
        let u = g.other(uv, v);
        let next = next_chain(phi, uv, u, alpha, beta, ell, &mut scratch.fan)?;
        match scratch.first_marked(g, &next) {
            Some((j, at_vertex)) => {
                if original.is_some() && j == k && !at_vertex {
                    return Err(MsvaError::InvariantViolated(format!(
                        "jump back to the current step {k} caused by an edge"
                    )));
                }
                d.push(j as i64 - k as i64);
                let dropped = steps.split_off(j);
                for s in dropped.iter().rev() {
                    phi.unshift_chain(&s.edges).expect("undo of a committed step");
                    scratch.unmark(s);
                }
                let back = dropped.into_iter().next().expect("j <= k");
                cand = Chain { fan: back.fan, path: back.full, colors: Some(back.full_colors) };
            }
            None => {
                let len = next.path.len();
                if (2..2 * ell).contains(&len) && next.path.vend == next.fan.pivot {
                    for s in steps.iter().rev() {
                        phi.unshift_chain(&s.edges).expect("undo of a committed step");
                    }
                    return Err(MsvaError::InternalFailReached { edge: e, iteration: iterations });
                }
                d.push(1);
                cand = next;
            }
        }
    }
}

fn violation(msg: String) -> MsvaError {
    MsvaError::InvariantViolated(msg)
}

/// Loop-head invariants for `C = F_0 + P_0 + ⋯` and the candidate `F + P`.
fn check_loop_head(
    phi0: &PartialColoring,
    psi: &PartialColoring,
    steps: &[Step],
    cand: &Chain,
    e: EdgeId,
    x: Vertex,
    ell: usize,
) -> Result<(), MsvaError> {
    let g = phi0.graph();
    let (end_c, vend_c) = terminus(g, steps, e, x);
    if cand.fan.start() != end_c || cand.fan.vstart() != vend_c {
        return Err(violation(format!(
            "candidate starts at ({}, {}) but the chain ends at ({end_c}, {vend_c})",
            cand.fan.start(),
            cand.fan.vstart()
        )));
    }
    if cand.path.start() != cand.fan.end() || cand.path.vstart != cand.fan.pivot {
        return Err(violation("candidate path does not hang off the fan".into()));
    }
    let mut all: Vec<(Fan, PathChain)> = steps.iter().map(|s| (s.fan.clone(), s.cut.clone())).collect();
    all.push((cand.fan.clone(), cand.path.clone()));
    if !checks::is_non_intersecting(g, &all) {
        return Err(violation(format!("C + F + P intersects itself with {} steps", steps.len())));
    }
    let flat = MultiStepChain { steps: all }.edges();
    if !checks::is_shiftable(phi0, &flat) {
        return Err(violation("C + F + P is not shiftable in the original coloring".into()));
    }
    if !checks::is_fan_happy(psi, &cand.fan) {
        let Some((a, b)) = cand.colors else {
            return Err(violation("unhappy fan without path colors".into()));
        };
        match checks::fan_status(psi, &cand.fan, a, b) {
            checks::FanStatus::NotHopeful => {
                return Err(violation(format!("candidate fan is neither happy nor {a}{b}-hopeful")))
            }
            checks::FanStatus::Disappointed if cand.path.len() != 2 * ell => {
                return Err(violation(format!(
                    "disappointed candidate with path length {} < 2ℓ",
                    cand.path.len()
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// For every committed step `j`: `deg(vEnd(F_j); φ, α_jβ_j) = 1` and every
/// edge of `P_j` after the first is colored `α_j` or `β_j`, both in the
/// original coloring.
fn check_committed_paths(phi0: &PartialColoring, steps: &[Step]) -> Result<(), MsvaError> {
    for (j, s) in steps.iter().enumerate() {
        let (a, b) = s.full_colors;
        let deg = phi0.degree_in(s.fan.vend(), a, b);
        if deg != 1 {
            return Err(violation(format!("step {j}: vEnd(F_j) has {a}{b}-degree {deg}")));
        }
        if let Some(&f) = s.cut.edges[1..]
            .iter()
            .find(|&&f| !matches!(phi0.color(f), Some(c) if c == a || c == b))
        {
            return Err(violation(format!("step {j}: path edge {f} is not colored {a} or {b}")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Record statistics

/// Graph parameters for the reference tail `4m (1200Δ¹⁵/ℓ)^{t/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailParams {
    pub m: usize,
    pub delta: usize,
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub runs: usize,
    pub iterations_histogram: BTreeMap<usize, usize>,
    pub d_histogram: BTreeMap<i64, usize>,
    pub appends: usize,
    pub backtracks: usize,
    pub max_depth: usize,
    /// `(t, P[T ≥ t])` for `t = 1..=max T + 1`.
    pub tail: Vec<(usize, f64)>,
    /// Reference bound at the same `t`, present only when the base is below 1.
    pub theoretical_tail: Option<Vec<(usize, f64)>>,
    /// Indices of records with a negative prefix sum of `d`.
    pub invalid_records: Vec<usize>,
}

pub fn summarize_records(records: &[MsvaRecord], params: Option<TailParams>) -> RecordSummary {
    let mut iterations_histogram = BTreeMap::new();
    let mut d_histogram = BTreeMap::new();
    let (mut appends, mut backtracks, mut max_depth) = (0, 0, 0);
    let mut invalid_records = Vec::new();
    for (i, r) in records.iter().enumerate() {
        *iterations_histogram.entry(r.iterations).or_insert(0) += 1;
        for &x in &r.d {
            *d_histogram.entry(x).or_insert(0) += 1;
            if x > 0 {
                appends += 1;
            } else {
                backtracks += 1;
                max_depth = max_depth.max(x.unsigned_abs() as usize);
            }
        }
        if !r.prefix_sums_valid() {
            invalid_records.push(i);
        }
    }
    let max_t = records.iter().map(|r| r.iterations).max().unwrap_or(0);
    let total = records.len().max(1) as f64;
    let mut tail = Vec::with_capacity(max_t + 1);
    let mut at_least = records.len();
    for t in 1..=max_t + 1 {
        tail.push((t, at_least as f64 / total));
        at_least -= iterations_histogram.get(&t).copied().unwrap_or(0);
    }
    let theoretical_tail = params.and_then(|p| {
        let base = 1200.0 * (p.delta as f64).powi(15) / p.ell as f64;
        (base < 1.0).then(|| {
            tail.iter().map(|&(t, _)| (t, 4.0 * p.m as f64 * base.powf(t as f64 / 2.0))).collect()
        })
    });
    RecordSummary {
        runs: records.len(),
        iterations_histogram,
        d_histogram,
        appends,
        backtracks,
        max_depth,
        tail,
        theoretical_tail,
        invalid_records,
    }
}

/// One JSON object per line.
pub fn records_to_jsonl(records: &[MsvaRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::validate;
    use crate::graph::{path, random_max_degree, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn record(iterations: usize, d: Vec<i64>) -> MsvaRecord {
        MsvaRecord { edge: 0, iterations, d, terminus: (0, 0), outcome: MsvaOutcome::Success }
    }

    #[test]
    fn empty_coloring_succeeds_immediately() {
        let g = path(3);
        let mut phi = PartialColoring::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = MsvaConfig::new(4, 10).validate(true);
        let r = msva(&mut phi, 0, 0, &cfg, &mut rng, &mut MsvaScratch::new(&g)).unwrap();
        assert_eq!(r.record.outcome, MsvaOutcome::Success);
        assert_eq!(r.record.iterations, 1);
        assert!(r.record.d.is_empty());
        assert_eq!(r.record.terminus, (0, 1));
        assert_eq!(r.chain.unwrap().edges(), vec![0]);
        assert_eq!(r.color, Some(1));
    }

    /// Pivot 0 with the fan `(xy, xa, xb)` and a long `31`-path off `b`, as in
    /// the chain tests, sized so the first candidate is cut.
    fn long_instance(ell: usize) -> Graph {
        let len = 4 * ell + 3;
        let mut edges = vec![(0, 1), (0, 2), (0, 3)];
        let mut prev = 3;
        for i in 0..len {
            edges.push((prev, 4 + i));
            prev = 4 + i;
        }
        Graph::from_edges(4 + len, &edges).unwrap()
    }

    fn color_long<'g>(g: &'g Graph) -> PartialColoring<'g> {
        let mut phi = PartialColoring::new(g);
        phi.try_assign(1, 1).unwrap();
        phi.try_assign(2, 2).unwrap();
        for e in 3..g.m() {
            phi.try_assign(e, if e % 2 == 1 { 3 } else { 1 }).unwrap();
        }
        phi
    }

    #[test]
    fn long_first_path_appends_a_step() {
        let ell = 4;
        let g = long_instance(ell);
        let mut phi = color_long(&g);
        let before = phi.clone();
        let cfg = MsvaConfig::new(ell, 100).validate(true);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = before.clone();
            let r = msva(&mut p, 0, 0, &cfg, &mut rng, &mut MsvaScratch::new(&g)).unwrap();
            assert_eq!(r.record.outcome, MsvaOutcome::Success);
            assert_eq!(r.record.d.first(), Some(&1));
            assert!(r.chain.unwrap().steps.len() >= 2);
            assert!(validate(&g, &p).is_valid());
            assert_eq!(p.uncolored_count(), before.uncolored_count() - 1);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = msva(&mut phi, 0, 0, &cfg.finish(FinishMode::Restore), &mut rng, &mut MsvaScratch::new(&g))
            .unwrap();
        assert_eq!(phi, before);
        assert!(checks::is_chain_happy(&phi, &r.chain.unwrap().edges()));
    }

    #[test]
    fn cap_hit_restores_coloring() {
        let ell = 4;
        let g = long_instance(ell);
        let mut phi = color_long(&g);
        let before = phi.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = MsvaConfig::new(ell, 1);
        let r = msva(&mut phi, 0, 0, &cfg, &mut rng, &mut MsvaScratch::new(&g)).unwrap();
        assert_eq!(r.record.outcome, MsvaOutcome::IterationCapHit);
        assert_eq!(r.record.iterations, 1);
        assert_eq!(r.record.d, vec![1]);
        assert!(r.chain.is_none());
        assert_eq!(phi, before);
    }

    #[test]
    fn rejects_bad_input() {
        let g = path(3);
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = MsvaScratch::new(&g);
        let cfg = MsvaConfig::new(4, 4);
        assert!(matches!(msva(&mut phi, 0, 0, &cfg, &mut rng, &mut s), Err(MsvaError::PreconditionViolated(_))));
        assert!(matches!(msva(&mut phi, 1, 0, &cfg, &mut rng, &mut s), Err(MsvaError::PreconditionViolated(_))));
        let cfg = MsvaConfig::new(4, 0);
        assert!(matches!(msva(&mut phi, 1, 1, &cfg, &mut rng, &mut s), Err(MsvaError::PreconditionViolated(_))));
    }

    #[test]
    fn validated_runs_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..12 {
            let delta = 3 + seed as usize % 4;
            let g = random_max_degree(80, delta, seed).unwrap();
            let mut phi = PartialColoring::new(&g);
            let mut scratch = MsvaScratch::new(&g);
            let cfg = MsvaConfig::new(if seed % 2 == 0 { 4 } else { 8 }, 1000).validate(true);
            for e in 0..g.m() {
                let (a, b) = g.endpoints(e);
                let x = if rng.gen_bool(0.5) { a } else { b };
                let r = msva(&mut phi, e, x, &cfg, &mut rng, &mut scratch).unwrap();
                assert_eq!(r.record.outcome, MsvaOutcome::Success);
                assert!(r.record.prefix_sums_valid());
                assert_eq!(r.record.iterations, r.record.d.len() + 1);
            }
            assert!(validate(&g, &phi).is_total_and_proper());
        }
    }

    #[test]
    fn summary_counts() {
        let rs = vec![record(3, vec![1, 1]), record(5, vec![1, -1, 1, 1])];
        let s = summarize_records(&rs, None);
        assert_eq!((s.appends, s.backtracks, s.max_depth), (5, 1, 1));
        assert!(s.invalid_records.is_empty());
        assert_eq!(s.tail[0], (1, 1.0));
        assert_eq!(s.tail.last(), Some(&(6, 0.0)));
    }

    #[test]
    fn summary_of_immediate_successes() {
        let rs = vec![record(1, vec![]); 10];
        let s = summarize_records(&rs, None);
        assert_eq!(s.tail, vec![(1, 1.0), (2, 0.0)]);
    }

    #[test]
    fn summary_flags_negative_prefix() {
        let rs = vec![record(2, vec![1]), record(3, vec![0, -1])];
        let s = summarize_records(&rs, None);
        assert_eq!(s.invalid_records, vec![1]);
    }

    #[test]
    fn theoretical_tail_only_when_nontrivial() {
        let rs = vec![record(1, vec![])];
        let small = summarize_records(&rs, Some(TailParams { m: 10, delta: 3, ell: 100 }));
        assert!(small.theoretical_tail.is_none());
        let big = summarize_records(&rs, Some(TailParams { m: 10, delta: 2, ell: 1200 * 2usize.pow(16) }));
        let t = big.theoretical_tail.unwrap();
        assert!((t[0].1 - 40.0 * 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn records_round_trip_as_jsonl() {
        let rs = vec![record(2, vec![1]), record(1, vec![])];
        let text = records_to_jsonl(&rs);
        let back: Vec<MsvaRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(back, rs);
        assert!(text.contains("\"outcome\":\"success\""));
    }
}
