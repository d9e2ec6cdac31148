//! Partial edge-colorings with `Δ+1` colors and the chain mechanics built on
//! top of them: shifting, augmenting, and walking two-colored paths.
//!
//! Colors are `1..=Δ+1`. Alongside the per-edge color array the coloring keeps,
//! for every vertex, a bitset of present colors followed by an inverse index
//! `slot(v, c)` (the edge at `v` colored `c` and its other endpoint), in one row so that a vertex
//! costs one cache line for small Δ. Missing-color queries and `αβ`-path steps
//! are O(1) or O(Δ/32).

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};

pub type Color = usize;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(C, align(16))]
struct EdgeRec {
    u: u32,
    v: u32,
    color: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("edge {e} cannot take color {color}: {reason}")]
    InvalidAssignment { e: EdgeId, color: Color, reason: &'static str },
    #[error("M(φ, {v}) has no element besides the excluded color")]
    EmptyMissingSet { v: Vertex },
    #[error("chain is not shiftable at pair {index}")]
    NotShiftable { index: usize },
    #[error("chain end {e} has no common missing color after shifting")]
    NotHappy { e: EdgeId },
    #[error("vertex {v} already has both path colors")]
    DegreeTwoStart { v: Vertex },
    #[error("coloring text line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Clone)]
pub struct PartialColoring<'g> {
    graph: &'g Graph,
    palette: usize,
    /// Bitset words per row.
    words: usize,
    stride: usize,
    /// Endpoints and color of each edge, together for locality.
    rec: Vec<EdgeRec>,
    table: Vec<u32>,
    uncolored: usize,
}

impl PartialEq for PartialColoring<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.graph, other.graph)
            && self.palette == other.palette
            && self.rec == other.rec
            && self.table == other.table
            && self.uncolored == other.uncolored
    }
}

impl std::fmt::Debug for PartialColoring<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartialColoring")
            .field("palette", &self.palette)
            .field("uncolored", &self.uncolored)
            .field("colors", &self.colors())
            .finish()
    }
}

impl<'g> PartialColoring<'g> {
    /// The empty coloring with palette `[Δ+1]`.
    pub fn new(graph: &'g Graph) -> Self {
        Self::with_palette(graph, graph.max_degree() + 1)
    }

    pub fn with_palette(graph: &'g Graph, palette: usize) -> Self {
        assert!(palette >= 1);
        let words = palette / 32 + 1;
        let stride = words + 2 * palette;
        let n = graph.n();
        let mut template = vec![NONE; stride];
        template[..words].fill(0);
        // bit 0 and bits above the palette are permanently "present"
        template[0] |= 1;
        for c in palette + 1..words * 32 {
            template[c / 32] |= 1 << (c % 32);
        }
        let mut table = Vec::with_capacity(n * stride);
        for _ in 0..n {
            table.extend_from_slice(&template);
        }
        PartialColoring {
            graph,
            palette,
            words,
            stride,
            rec: graph.edges().map(|(u, v)| EdgeRec { u: u as u32, v: v as u32, color: 0 }).collect(),
            table,
            uncolored: graph.m(),
        }
    }

    /// Builds a coloring from explicit per-edge colors, rejecting conflicts.
    pub fn from_colors(graph: &'g Graph, colors: &[Option<Color>]) -> Result<Self, ColoringError> {
        assert_eq!(colors.len(), graph.m());
        let mut phi = Self::new(graph);
        for (e, c) in colors.iter().enumerate() {
            if let Some(c) = *c {
                phi.try_assign(e, c)?;
            }
        }
        Ok(phi)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Number of available colors, `Δ+1` for colorings made by [`Self::new`].
    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn uncolored_count(&self) -> usize {
        self.uncolored
    }

    #[inline]
    pub fn color(&self, e: EdgeId) -> Option<Color> {
        match self.rec[e].color {
            0 => None,
            c => Some(c as usize),
        }
    }

    pub fn colors(&self) -> Vec<Option<Color>> {
        self.rec.iter().map(|r| (r.color != 0).then_some(r.color as usize)).collect()
    }

    #[inline]
    pub fn is_blank(&self, e: EdgeId) -> bool {
        self.rec[e].color == 0
    }

    #[inline]
    fn ends(&self, e: EdgeId) -> (Vertex, Vertex) {
        let r = &self.rec[e];
        (r.u as usize, r.v as usize)
    }

    /// The edge at `v` colored `c`.
    #[inline]
    pub fn edge_at(&self, v: Vertex, c: Color) -> Option<EdgeId> {
        debug_assert!((1..=self.palette).contains(&c));
        match self.table[self.slot_index(v, c)] {
            NONE => None,
            e => Some(e as usize),
        }
    }

    /// The edge at `v` colored `c` together with its other endpoint.
    #[inline]
    pub fn neighbor_at(&self, v: Vertex, c: Color) -> Option<(EdgeId, Vertex)> {
        debug_assert!((1..=self.palette).contains(&c));
        let at = self.slot_index(v, c);
        match self.table[at] {
            NONE => None,
            e => Some((e as usize, self.table[at + 1] as usize)),
        }
    }

    #[inline]
    fn slot_index(&self, v: Vertex, c: Color) -> usize {
        v * self.stride + self.words + 2 * (c - 1)
    }

    #[inline]
    fn present_words(&self, v: Vertex) -> &[u32] {
        let at = v * self.stride;
        &self.table[at..at + self.words]
    }

    /// Whether `c ∈ M(φ, v)`.
    #[inline]
    pub fn is_missing(&self, v: Vertex, c: Color) -> bool {
        (1..=self.palette).contains(&c) && self.present_words(v)[c / 32] & (1 << (c % 32)) == 0
    }

    pub fn missing(&self, v: Vertex) -> Vec<Color> {
        (1..=self.palette).filter(|&c| self.is_missing(v, c)).collect()
    }

    /// Smallest color of `M(φ, v)`, optionally ignoring `exclude`.
    pub fn missing_min(&self, v: Vertex, exclude: Option<Color>) -> Result<Color, ColoringError> {
        let words = self.present_words(v);
        for (i, &w) in words.iter().enumerate() {
            let mut w = w;
            if let Some(x) = exclude {
                if x / 32 == i {
                    w |= 1 << (x % 32);
                }
            }
            if w != u32::MAX {
                return Ok(i * 32 + (!w).trailing_zeros() as usize);
            }
        }
        Err(ColoringError::EmptyMissingSet { v })
    }

    /// Smallest color missing at both `u` and `v`.
    pub fn common_missing_min(&self, u: Vertex, v: Vertex) -> Option<Color> {
        let (a, b) = (self.present_words(u), self.present_words(v));
        a.iter()
            .zip(b)
            .enumerate()
            .find(|(_, (x, y))| *x | *y != u32::MAX)
            .map(|(i, (x, y))| i * 32 + (!(x | y)).trailing_zeros() as usize)
    }

    /// An uncolored edge whose endpoints share a missing color.
    pub fn is_happy(&self, e: EdgeId) -> bool {
        let (u, v) = self.ends(e);
        self.is_blank(e) && self.common_missing_min(u, v).is_some()
    }

    /// `deg(v; φ, αβ)`.
    pub fn degree_in(&self, v: Vertex, alpha: Color, beta: Color) -> usize {
        usize::from(!self.is_missing(v, alpha)) + usize::from(!self.is_missing(v, beta))
    }

    #[inline]
    fn put(&mut self, e: EdgeId, c: Color) {
        let (u, v) = self.ends(e);
        debug_assert_eq!(self.rec[e].color, 0);
        debug_assert!(self.is_missing(u, c) && self.is_missing(v, c));
        self.rec[e].color = c as u32;
        for (w, far) in [(u, v), (v, u)] {
            let at = self.slot_index(w, c);
            self.table[at] = e as u32;
            self.table[at + 1] = far as u32;
            self.table[w * self.stride + c / 32] |= 1 << (c % 32);
        }
        self.uncolored -= 1;
    }

    #[inline]
    fn take(&mut self, e: EdgeId) -> Color {
        let c = self.rec[e].color as usize;
        debug_assert!(c != 0);
        let (u, v) = self.ends(e);
        self.rec[e].color = 0;
        for w in [u, v] {
            let at = self.slot_index(w, c);
            self.table[at] = NONE;
            self.table[at + 1] = NONE;
            self.table[w * self.stride + c / 32] &= !(1 << (c % 32));
        }
        self.uncolored += 1;
        c
    }

    /// Colors the blank edge `e` with `c`, which must be missing at both ends.
    pub fn try_assign(&mut self, e: EdgeId, c: Color) -> Result<(), ColoringError> {
        let (u, v) = self.ends(e);
        let reason = if !(1..=self.palette).contains(&c) {
            Some("color outside the palette")
        } else if !self.is_blank(e) {
            Some("edge already colored")
        } else if !self.is_missing(u, c) || !self.is_missing(v, c) {
            Some("color already present at an endpoint")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(ColoringError::InvalidAssignment { e, color: c, reason }),
            None => {
                self.put(e, c);
                Ok(())
            }
        }
    }

    /// Removes the color of `e`, returning it.
    pub fn clear(&mut self, e: EdgeId) -> Option<Color> {
        if self.is_blank(e) {
            None
        } else {
            Some(self.take(e))
        }
    }

    /// `Shift(φ, e0, e1)`: moves the color of `e1` onto the blank edge `e0`.
    pub fn shift_pair(&mut self, e0: EdgeId, e1: EdgeId) -> Result<(), ColoringError> {
        let not_shiftable = ColoringError::NotShiftable { index: 0 };
        if !self.is_blank(e0) || self.is_blank(e1) {
            return Err(not_shiftable);
        }
        let (a, b) = (self.rec[e0], self.rec[e1]);
        // y is the endpoint of e0 away from the shared vertex
        let y = if a.u == b.u || a.u == b.v {
            a.v
        } else if a.v == b.u || a.v == b.v {
            a.u
        } else {
            return Err(not_shiftable);
        };
        let (y, c) = (y as usize, b.color as usize);
        if !self.is_missing(y, c) {
            return Err(not_shiftable);
        }
        self.take(e1);
        self.put(e0, c);
        Ok(())
    }

    /// `Shift(φ, C)`. On failure at pair `i` the coloring is left unchanged.
    pub fn shift_chain(&mut self, chain: &[EdgeId]) -> Result<(), ColoringError> {
        for i in 0..chain.len().saturating_sub(1) {
            if self.shift_pair(chain[i], chain[i + 1]).is_err() {
                for k in (0..i).rev() {
                    self.shift_pair(chain[k + 1], chain[k])
                        .expect("reverse shift of a shifted pair");
                }
                return Err(ColoringError::NotShiftable { index: i });
            }
        }
        Ok(())
    }

    /// `Shift(φ, C*)`; undoes a previous [`Self::shift_chain`] of `chain`.
    pub fn unshift_chain(&mut self, chain: &[EdgeId]) -> Result<(), ColoringError> {
        let k = chain.len();
        for i in (1..k).rev() {
            if self.shift_pair(chain[i], chain[i - 1]).is_err() {
                for j in i + 1..k {
                    self.shift_pair(chain[j - 1], chain[j])
                        .expect("reverse shift of a shifted pair");
                }
                return Err(ColoringError::NotShiftable { index: k - 1 - i });
            }
        }
        Ok(())
    }

    /// `Aug(φ, C)`: shifts along `chain` and gives `End(C)` the smallest common
    /// missing color of its endpoints. Returns that color. On failure the
    /// coloring is left unchanged.
    pub fn augment(&mut self, chain: &[EdgeId]) -> Result<Color, ColoringError> {
        let Some(&end) = chain.last() else {
            return Err(ColoringError::NotShiftable { index: 0 });
        };
        self.shift_chain(chain)?;
        let (u, v) = self.ends(end);
        match self.common_missing_min(u, v) {
            Some(c) => {
                self.put(end, c);
                Ok(c)
            }
            None => {
                self.unshift_chain(chain).expect("undo of a successful shift");
                Err(ColoringError::NotHappy { e: end })
            }
        }
    }

    /// `P(start_edge; φ, αβ)` walked from `from`: `start_edge` followed by the
    /// maximal path in `G(φ, αβ)` leaving `from` along its `alpha` edge, cut to
    /// at most `cap` edges in total.
    pub fn walk_alternating(
        &self,
        start_edge: EdgeId,
        from: Vertex,
        alpha: Color,
        beta: Color,
        cap: usize,
    ) -> Result<PathChain, ColoringError> {
        if self.degree_in(from, alpha, beta) == 2 {
            return Err(ColoringError::DegreeTwoStart { v: from });
        }
        let vstart = self.graph.other(start_edge, from);
        let mut edges = vec![start_edge];
        let mut cur = from;
        let mut want = alpha;
        let mut truncated = false;
        while let Some((e, next)) = self.neighbor_at(cur, want) {
            if edges.len() >= cap {
                truncated = true;
                break;
            }
            edges.push(e);
            cur = next;
            want = if want == alpha { beta } else { alpha };
        }
        Ok(PathChain { edges, vstart, vend: cur, truncated })
    }

    /// `G(v; φ, αβ)` as a vertex list, walking both directions from `v`.
    pub fn component(&self, v: Vertex, alpha: Color, beta: Color) -> Vec<Vertex> {
        let mut out = vec![v];
        for first in [alpha, beta] {
            let mut cur = v;
            let mut want = first;
            while let Some(e) = self.edge_at(cur, want) {
                cur = self.graph.other(e, cur);
                if cur == v {
                    return out;
                }
                out.push(cur);
                want = if want == alpha { beta } else { alpha };
            }
        }
        out
    }

    /// Whether `u` and `v` lie in the same component of `G(φ, αβ)`.
    pub fn related(&self, u: Vertex, v: Vertex, alpha: Color, beta: Color) -> bool {
        u == v || self.component(u, alpha, beta).contains(&v)
    }

    /// Text form: one `edge_id color` line per edge, `-` for blank.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rec.len() * 8);
        for (e, c) in self.rec.iter().map(|r| r.color).enumerate() {
            if c == 0 {
                let _ = writeln!(out, "{e} -");
            } else {
                let _ = writeln!(out, "{e} {c}");
            }
        }
        out
    }

    pub fn from_text(graph: &'g Graph, text: &str) -> Result<Self, ColoringError> {
        let mut colors = vec![None; graph.m()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fmt = |reason: &str| ColoringError::Format { line, reason: reason.into() };
            let mut it = t.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(fmt("expected `edge_id color`"));
            };
            let e: usize = a.parse().map_err(|_| fmt("bad edge id"))?;
            if e >= graph.m() {
                return Err(fmt("edge id out of range"));
            }
            colors[e] = match b {
                "-" => None,
                c => Some(c.parse().map_err(|_| fmt("bad color"))?),
            };
        }
        Self::from_colors(graph, &colors)
    }

    pub(crate) fn raw_color(&self, e: EdgeId) -> u32 {
        self.rec[e].color
    }
}

// ---------------------------------------------------------------------------
// Chain objects

/// `(xy_0, …, xy_{k-1})` around `pivot`. `edges[i]` joins `pivot` and `leaves[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    pub pivot: Vertex,
    pub leaves: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

impl Fan {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> EdgeId {
        self.edges[0]
    }

    pub fn end(&self) -> EdgeId {
        *self.edges.last().unwrap()
    }

    pub fn vstart(&self) -> Vertex {
        self.leaves[0]
    }

    pub fn vend(&self) -> Vertex {
        *self.leaves.last().unwrap()
    }

    /// `F|j`, the first `j` edges.
    pub fn prefix(&self, j: usize) -> Fan {
        Fan {
            pivot: self.pivot,
            leaves: self.leaves[..j].to_vec(),
            edges: self.edges[..j].to_vec(),
        }
    }

    /// `V(F)`: the pivot and every leaf.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(self.pivot).chain(self.leaves.iter().copied())
    }
}

/// A chain `(e_0, e_1, …, e_{k-1})` whose edges `e_1..` form a path from
/// `vend(e_0)`; `vstart` is the endpoint of `e_0` off the path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathChain {
    pub edges: Vec<EdgeId>,
    pub vstart: Vertex,
    pub vend: Vertex,
    /// The underlying two-colored path continues past `vend`.
    pub truncated: bool,
}

impl PathChain {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> EdgeId {
        self.edges[0]
    }

    pub fn end(&self) -> EdgeId {
        *self.edges.last().unwrap()
    }

    /// `P|j` for `1 ≤ j ≤ len`.
    pub fn prefix(&self, g: &Graph, j: usize) -> PathChain {
        assert!((1..=self.len()).contains(&j));
        if j == self.len() {
            return self.clone();
        }
        // vertex after edge i (i >= 1) is reached by walking from vend(e_0)
        let mut cur = g.other(self.edges[0], self.vstart);
        for &e in &self.edges[1..j] {
            cur = g.other(e, cur);
        }
        PathChain { edges: self.edges[..j].to_vec(), vstart: self.vstart, vend: cur, truncated: true }
    }

    /// `E_int(P)`: edges other than the first and last.
    pub fn internal_edges(&self) -> &[EdgeId] {
        if self.edges.len() <= 2 {
            &[]
        } else {
            &self.edges[1..self.edges.len() - 1]
        }
    }

    /// Path vertices in order: `vstart`, then `x_1 = vend(e_0)`, `x_2`, ….
    pub fn vertices(&self, g: &Graph) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(self.vstart);
        let mut cur = g.other(self.edges[0], self.vstart);
        out.push(cur);
        for &e in &self.edges[1..] {
            cur = g.other(e, cur);
            out.push(cur);
        }
        out
    }
}

/// `F_0 + P_0 + ⋯ + F_{k-1} + P_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiStepChain {
    pub steps: Vec<(Fan, PathChain)>,
}

impl MultiStepChain {
    /// The chain as a flat edge sequence, shared junction edges listed once.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for (fan, path) in &self.steps {
            let skip = usize::from(!out.is_empty());
            out.extend_from_slice(&fan.edges[skip..]);
            out.extend_from_slice(&path.edges[1..]);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.edges().len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn vertices(&self, g: &Graph) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self
            .edges()
            .into_iter()
            .flat_map(|e| {
                let (u, v) = g.endpoints(e);
                [u, v]
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Concatenation `F + P` of a fan and the path hanging off its last edge.
pub fn fan_plus_path(fan: &Fan, path: &PathChain) -> Vec<EdgeId> {
    debug_assert_eq!(fan.end(), path.start());
    let mut out = fan.edges.clone();
    out.extend_from_slice(&path.edges[1..]);
    out
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AdjacentSameColor { e: EdgeId, f: EdgeId, color: Color },
    ColorOutOfRange { e: EdgeId, color: Color },
    SlotDesync { v: Vertex, color: Color },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub uncolored: usize,
    pub max_color: Color,
    pub colors_used: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_total_and_proper(&self) -> bool {
        self.violations.is_empty() && self.uncolored == 0
    }
}

/// Full scan of `phi` against `g`: adjacent equal colors, out-of-palette
/// colors, and disagreement between the color array and the slot index.
pub fn validate(g: &Graph, phi: &PartialColoring) -> ValidationReport {
    let palette = phi.palette();
    let mut violations = Vec::new();
    let mut uncolored = 0;
    let mut max_color = 0;
    let mut used = vec![false; palette + 1];
    for e in 0..g.m() {
        let c = phi.raw_color(e) as usize;
        if c == 0 {
            uncolored += 1;
        } else if c > palette {
            violations.push(Violation::ColorOutOfRange { e, color: c });
        } else {
            used[c] = true;
        }
        max_color = max_color.max(c);
    }
    let mut seen: Vec<Option<EdgeId>> = vec![None; palette + 1];
    for v in 0..g.n() {
        for (_, e) in g.neighbors(v) {
            let c = phi.raw_color(e) as usize;
            if c == 0 || c > palette {
                continue;
            }
            match seen[c] {
                Some(f) if f < e => violations.push(Violation::AdjacentSameColor { e: f, f: e, color: c }),
                Some(f) if f > e => violations.push(Violation::AdjacentSameColor { e, f, color: c }),
                _ => seen[c] = Some(e),
            }
        }
        for (c, seen_c) in seen.iter().enumerate().skip(1) {
            let slot_ok = match phi.neighbor_at(v, c) {
                None => seen_c.is_none(),
                Some((f, w)) => {
                    seen_c.is_some()
                        && g.has_endpoint(f, v)
                        && g.other(f, v) == w
                        && phi.raw_color(f) as usize == c
                }
            };
            if !slot_ok || phi.is_missing(v, c) != seen_c.is_none() {
                violations.push(Violation::SlotDesync { v, color: c });
            }
        }
        for (_, e) in g.neighbors(v) {
            let c = phi.raw_color(e) as usize;
            if c != 0 && c <= palette {
                seen[c] = None;
            }
        }
    }
    violations.sort_by_key(|v| format!("{v:?}"));
    violations.dedup();
    ValidationReport {
        violations,
        uncolored,
        max_color,
        colors_used: used.iter().filter(|&&u| u).count(),
    }
}
