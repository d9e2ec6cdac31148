//! Immutable simple undirected graphs with dense integer ids.
//!
//! Vertices are `0..n` and edges are `0..m` in insertion order. Adjacency is
//! stored in CSR form as `(neighbor, edge id)` pairs so fan construction can
//! walk a pivot's neighborhood without indirection.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed edge, expected two non-negative integers")]
    MalformedLine { line: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: Vertex },
    #[error("endpoint {v} out of range for {n} vertices")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
    #[error("graph file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<[u32; 2]>,
    offsets: Vec<u32>,
    adj: Vec<(u32, u32)>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Edge `i` of the result is `edges[i]`.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { v: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line: i + 1, v: u });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { line: i + 1, u, v });
            }
        }
        Ok(Self::build(n, edges))
    }

    fn build(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        let mut deg = vec![0u32; n];
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill: Vec<u32> = offsets[..n].to_vec();
        let mut adj = vec![(0u32, 0u32); 2 * edges.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[fill[u] as usize] = (v as u32, e as u32);
            fill[u] += 1;
            adj[fill[v] as usize] = (u as u32, e as u32);
            fill[v] += 1;
        }
        let max_degree = deg.iter().copied().max().unwrap_or(0) as usize;
        Graph {
            n,
            edges: edges.iter().map(|&(u, v)| [u as u32, v as u32]).collect(),
            offsets,
            adj,
            max_degree,
        }
    }

    /// Parses whitespace-separated `u v` lines. Blank lines and lines starting
    /// with `#` are skipped; the vertex count is one more than the largest id.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        let mut n = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(GraphError::MalformedLine { line });
            };
            let (Ok(u), Ok(v)) = (a.parse::<u32>(), b.parse::<u32>()) else {
                return Err(GraphError::MalformedLine { line });
            };
            let (u, v) = (u as usize, v as usize);
            if u == v {
                return Err(GraphError::SelfLoop { line, v: u });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v));
        }
        Ok(Self::build(n, &edges))
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 12);
        for &[u, v] in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: Vertex) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        let [u, v] = self.edges[e];
        (u as usize, v as usize)
    }

    /// The endpoint of `e` that is not `v`. `v` must be an endpoint of `e`.
    #[inline]
    pub fn other(&self, e: EdgeId, v: Vertex) -> Vertex {
        let [a, b] = self.edges[e];
        debug_assert!(a as usize == v || b as usize == v);
        (a ^ b ^ v as u32) as usize
    }

    #[inline]
    pub fn has_endpoint(&self, e: EdgeId, v: Vertex) -> bool {
        let [a, b] = self.edges[e];
        a as usize == v || b as usize == v
    }

    /// Shared endpoint of two distinct edges, if they are adjacent.
    pub fn common_vertex(&self, e: EdgeId, f: EdgeId) -> Option<Vertex> {
        if e == f {
            return None;
        }
        let [a, b] = self.edges[e];
        let [c, d] = self.edges[f];
        if a == c || a == d {
            Some(a as usize)
        } else if b == c || b == d {
            Some(b as usize)
        } else {
            None
        }
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Vertex, EdgeId)> + '_ {
        let lo = self.offsets[v] as usize;
        let hi = self.offsets[v + 1] as usize;
        self.adj[lo..hi].iter().map(|&(w, e)| (w as usize, e as usize))
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.neighbors(u).find(|&(w, _)| w == v).map(|(_, e)| e)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().map(|&[u, v]| (u as usize, v as usize))
    }
}

// ---------------------------------------------------------------------------
// Named families

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::build(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::build(n, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::build(n, &edges)
}

/// `K_{1,leaves}` with center 0.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::build(leaves + 1, &edges)
}

pub fn grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::build(rows * cols, &edges)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::build(10, &edges)
}

// ---------------------------------------------------------------------------
// Random generators

/// Parameters recorded alongside a generated graph so a benchmark input can be
/// regenerated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub delta: usize,
    pub seed: u64,
    pub regular: bool,
}

/// Random simple graph with maximum degree at most `delta`.
///
/// Stubs of all vertices are shuffled and paired; loops and repeated pairs are
/// dropped and the remaining deficient stubs are re-paired for a few rounds.
pub fn random_max_degree(n: usize, delta: usize, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 || delta < 2 {
        return Err(GraphError::InfeasibleParameters(format!(
            "need n >= 2 and delta >= 2, got n={n}, delta={delta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = StubBuilder::new(n, delta.min(n - 1));
    builder.pair_rounds(&mut rng, 8);
    Ok(Graph::build(n, &builder.edges))
}

/// Random `delta`-regular simple graph.
pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 || delta < 2 || delta >= n {
        return Err(GraphError::InfeasibleParameters(format!(
            "need n > delta >= 2, got n={n}, delta={delta}"
        )));
    }
    if (n * delta) % 2 == 1 {
        return Err(GraphError::InfeasibleParameters(format!(
            "n*delta = {} is odd, no {delta}-regular graph on {n} vertices",
            n * delta
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = StubBuilder::new(n, delta);
    builder.pair_rounds(&mut rng, 8);
    builder.repair_to_regular(&mut rng)?;
    Ok(Graph::build(n, &builder.edges))
}

pub fn generate(params: GeneratorParams) -> Result<Graph, GraphError> {
    if params.regular {
        random_regular(params.n, params.delta, params.seed)
    } else {
        random_max_degree(params.n, params.delta, params.seed)
    }
}

struct StubBuilder {
    delta: usize,
    deg: Vec<usize>,
    edges: Vec<(Vertex, Vertex)>,
    present: HashSet<(Vertex, Vertex)>,
}

impl StubBuilder {
    fn new(n: usize, delta: usize) -> Self {
        StubBuilder {
            delta,
            deg: vec![0; n],
            edges: Vec::with_capacity(n * delta / 2),
            present: HashSet::with_capacity(n * delta / 2),
        }
    }

    fn key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
        (u.min(v), u.max(v))
    }

    fn try_add(&mut self, u: Vertex, v: Vertex) -> bool {
        if u == v || self.deg[u] >= self.delta || self.deg[v] >= self.delta {
            return false;
        }
        if !self.present.insert(Self::key(u, v)) {
            return false;
        }
        self.deg[u] += 1;
        self.deg[v] += 1;
        self.edges.push((u, v));
        true
    }

    fn pair_rounds(&mut self, rng: &mut ChaCha8Rng, rounds: usize) {
        for _ in 0..rounds {
            let mut stubs: Vec<Vertex> = Vec::new();
            for (v, &d) in self.deg.iter().enumerate() {
                stubs.extend(std::iter::repeat_n(v, self.delta - d));
            }
            if stubs.len() < 2 {
                return;
            }
            stubs.shuffle(rng);
            let before = self.edges.len();
            for pair in stubs.chunks_exact(2) {
                self.try_add(pair[0], pair[1]);
            }
            if self.edges.len() == before {
                return;
            }
        }
    }

    /// Edge switches: for deficient `u`, `v` pick a random edge `ab` with
    /// `ua`, `vb` absent, replace `ab` by `ua` and `vb`. When `u` and `v` are
    /// already adjacent or only `u` is deficient (twice), the same switch with
    /// `v = u` adds two stubs at `u`.
    fn repair_to_regular(&mut self, rng: &mut ChaCha8Rng) -> Result<(), GraphError> {
        let budget = 200 * self.deg.len().max(64);
        let mut attempts = 0usize;
        loop {
            let deficient: Vec<Vertex> =
                (0..self.deg.len()).filter(|&v| self.deg[v] < self.delta).collect();
            if deficient.is_empty() {
                return Ok(());
            }
            attempts += 1;
            if attempts > budget || self.edges.is_empty() {
                return Err(GraphError::InfeasibleParameters(
                    "edge-switch repair did not converge".into(),
                ));
            }
            let u = deficient[rng.gen_range(0..deficient.len())];
            let v = if self.delta - self.deg[u] >= 2 && rng.gen_bool(0.5) {
                u
            } else {
                match deficient.iter().copied().find(|&w| w != u) {
                    Some(w) => w,
                    None => u,
                }
            };
            if u != v && self.try_add(u, v) {
                continue;
            }
            let idx = rng.gen_range(0..self.edges.len());
            let (mut a, mut b) = self.edges[idx];
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut a, &mut b);
            }
            if a == u || a == v || b == u || b == v {
                continue;
            }
            if self.present.contains(&Self::key(u, a)) || self.present.contains(&Self::key(v, b)) {
                continue;
            }
            if u == v && self.delta - self.deg[u] < 2 {
                continue;
            }
            self.edges.swap_remove(idx);
            self.present.remove(&Self::key(a, b));
            self.deg[a] -= 1;
            self.deg[b] -= 1;
            let ok1 = self.try_add(u, a);
            let ok2 = self.try_add(v, b);
            debug_assert!(ok1 && ok2);
        }
    }
}

// ---------------------------------------------------------------------------
// Serialization

/// JSON form of a graph; `params` is present for generated graphs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphFile {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GeneratorParams>,
    pub edges: Vec<[u32; 2]>,
}

impl GraphFile {
    pub fn new(g: &Graph, params: Option<GeneratorParams>) -> Self {
        GraphFile {
            schema: 1,
            n: g.n,
            m: g.m(),
            delta: g.max_degree,
            params,
            edges: g.edges.clone(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let edges: Vec<_> = self.edges.iter().map(|&[u, v]| (u as usize, v as usize)).collect();
        let g = Graph::from_edges(self.n, &edges)?;
        if g.m() != self.m || g.max_degree() != self.delta {
            return Err(GraphError::Format("header does not match edge list".into()));
        }
        Ok(g)
    }
}

/// Reads either the JSON graph format or the plain edge-list format.
pub fn read_graph(text: &str) -> Result<Graph, GraphError> {
    if text.trim_start().starts_with('{') {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        file.to_graph()
    } else {
        Graph::parse_edge_list(text)
    }
}
