//! Fan construction around a pivot.
//!
//! Both builders follow the same walk: from the current leaf `z` take the
//! color `η` assigned to `z`, stop if `η` is missing at the pivot, otherwise
//! move to the neighbor joined to the pivot by an `η`-colored edge. The walk
//! ends the first time it would revisit a leaf.

use thiserror::Error;

use crate::coloring::{Color, Fan, PartialColoring};
use crate::graph::{EdgeId, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("fan precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("fan invariant violated: {0}")]
    InvariantViolated(String),
}

/// `(F, η, j)`: the fan, the returned color and the prefix length `j`, with
/// `η ∈ M(φ, vEnd(F)) ∩ M(φ, vEnd(F|j))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanResult {
    pub fan: Fan,
    pub color: Color,
    pub index: usize,
}

impl FanResult {
    /// `F|j`.
    pub fn prefix_fan(&self) -> Fan {
        self.fan.prefix(self.index)
    }
}

/// Reusable `index(·)` table, keyed by the color of the edge joining the
/// pivot to a leaf and reset by bumping an epoch.
#[derive(Debug, Clone, Default)]
pub struct FanScratch {
    epoch: u32,
    stamp: Vec<u32>,
    index: Vec<u32>,
}

impl FanScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, palette: usize) {
        if self.stamp.len() < palette + 1 {
            self.stamp.resize(palette + 1, 0);
            self.index.resize(palette + 1, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    fn get(&self, c: Color) -> Option<usize> {
        (self.stamp[c] == self.epoch).then(|| self.index[c] as usize)
    }

    fn set(&mut self, c: Color, k: usize) {
        self.stamp[c] = self.epoch;
        self.index[c] = k as u32;
    }
}

fn check_start(phi: &PartialColoring, e: EdgeId, x: Vertex) -> Result<Vertex, FanError> {
    let g = phi.graph();
    if e >= g.m() || !g.has_endpoint(e, x) {
        return Err(FanError::PreconditionViolated(format!("{x} is not an endpoint of edge {e}")));
    }
    if !phi.is_blank(e) {
        return Err(FanError::PreconditionViolated(format!("edge {e} is colored")));
    }
    Ok(g.other(e, x))
}

fn build(
    phi: &PartialColoring,
    e: EdgeId,
    x: Vertex,
    y: Vertex,
    beta: Option<Color>,
    scratch: &mut FanScratch,
) -> Result<FanResult, FanError> {
    let g = phi.graph();
    scratch.reset(phi.palette());
    let mut fan = Fan { pivot: x, leaves: vec![y], edges: vec![e] };
    let mut z = y;
    let deg = g.degree(x);
    let mut k = 0;
    let color_of = |z: Vertex| -> Result<Color, FanError> {
        let exclude = if z == y { beta } else { None };
        phi.missing_min(z, exclude)
            .map_err(|err| FanError::InvariantViolated(err.to_string()))
    };
    while k < deg {
        let eta = color_of(z)?;
        if phi.is_missing(x, eta) || Some(eta) == beta {
            return Ok(FanResult { fan, color: eta, index: k + 1 });
        }
        let (xz, next) = phi.neighbor_at(x, eta).expect("η is present at the pivot");
        z = next;
        if let Some(j) = scratch.get(eta) {
            return Ok(FanResult { fan, color: eta, index: j });
        }
        k += 1;
        scratch.set(eta, k);
        fan.leaves.push(z);
        fan.edges.push(xz);
    }
    Err(FanError::InvariantViolated(format!(
        "fan around {x} exhausted all {deg} neighbors without returning"
    )))
}

/// First Fan on the uncolored edge `e = xy` with pivot `x`.
pub fn first_fan(phi: &PartialColoring, e: EdgeId, x: Vertex) -> Result<FanResult, FanError> {
    first_fan_with(phi, e, x, &mut FanScratch::new())
}

pub fn first_fan_with(
    phi: &PartialColoring,
    e: EdgeId,
    x: Vertex,
    scratch: &mut FanScratch,
) -> Result<FanResult, FanError> {
    let y = check_start(phi, e, x)?;
    build(phi, e, x, y, None, scratch)
}

/// Next Fan: as [`first_fan`], but the first leaf `y` is assigned
/// `min M(φ, y) \ {β}` and the walk also stops on reaching a leaf assigned `β`.
pub fn next_fan(
    phi: &PartialColoring,
    e: EdgeId,
    x: Vertex,
    beta: Color,
) -> Result<FanResult, FanError> {
    next_fan_with(phi, e, x, beta, &mut FanScratch::new())
}

pub fn next_fan_with(
    phi: &PartialColoring,
    e: EdgeId,
    x: Vertex,
    beta: Color,
    scratch: &mut FanScratch,
) -> Result<FanResult, FanError> {
    let y = check_start(phi, e, x)?;
    if !phi.is_missing(y, beta) {
        return Err(FanError::PreconditionViolated(format!("color {beta} is present at {y}")));
    }
    if (1..=phi.palette()).all(|c| !phi.is_missing(x, c) || phi.is_missing(y, c)) {
        return Err(FanError::PreconditionViolated(format!("M({x}) is contained in M({y})")));
    }
    build(phi, e, x, y, Some(beta), scratch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{self, FanStatus};
    use crate::graph::{random_max_degree, star, Graph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_coloring_gives_single_happy_edge() {
        let g = star(3);
        let phi = PartialColoring::new(&g);
        let r = first_fan(&phi, 0, 0).unwrap();
        assert_eq!(r.fan.edges, vec![0]);
        assert_eq!((r.color, r.index), (1, 1));
        assert!(checks::is_fan_happy(&phi, &r.fan));
    }

    /// Pure star, pivot 0, leaves y = 1, a = 2, b = 3 with φ(xa) = 1 and
    /// φ(xb) = 2. The walk goes y → a → b, and `min M(b) = 1` leads back to a.
    #[test]
    fn star_trace() {
        let g = star(3);
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(1, 1).unwrap();
        phi.try_assign(2, 2).unwrap();
        assert_eq!(phi.missing(0), vec![3, 4]);
        let r = first_fan(&phi, 0, 0).unwrap();
        assert_eq!(r.fan.leaves, vec![1, 2, 3]);
        assert_eq!((r.color, r.index), (1, 1));
    }

    /// Same star plus pendant edges so that `min M(b) = 3 ∈ M(x)`.
    #[test]
    fn star_trace_reaching_pivot_color() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (2, 4), (3, 5)]).unwrap();
        let mut phi = PartialColoring::new(&g);
        assert_eq!(phi.palette(), 4);
        phi.try_assign(1, 1).unwrap();
        phi.try_assign(2, 2).unwrap();
        phi.try_assign(4, 1).unwrap();
        // η(1) = 1 → leaf 2, η(2) = 2 → leaf 3, η(3) = 3 ∈ M(0) = {3, 4}
        let r = first_fan(&phi, 0, 0).unwrap();
        assert_eq!(r.fan.leaves, vec![1, 2, 3]);
        assert_eq!((r.color, r.index), (3, 3));
        assert!(checks::is_fan_happy(&phi, &r.fan));
    }

    #[test]
    fn repeated_leaf_points_at_earlier_index() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5)]).unwrap();
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(1, 1).unwrap();
        phi.try_assign(2, 2).unwrap();
        phi.try_assign(3, 3).unwrap();
        phi.try_assign(4, 1).unwrap();
        // η(1) = 2 → leaf 3, η(3) = 1 → leaf 2, η(2) = 2 → leaf 3 again
        let r = first_fan(&phi, 0, 0).unwrap();
        assert_eq!(r.fan.leaves, vec![1, 3, 2]);
        assert_eq!((r.color, r.index), (2, 1));
        assert!(phi.is_missing(r.fan.vend(), r.color));
        assert!(phi.is_missing(r.prefix_fan().vend(), r.color));
    }

    #[test]
    fn rejects_colored_start() {
        let g = star(2);
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(0, 1).unwrap();
        assert!(matches!(first_fan(&phi, 0, 0), Err(FanError::PreconditionViolated(_))));
        assert!(matches!(first_fan(&phi, 1, 1), Err(FanError::PreconditionViolated(_))));
    }

    #[test]
    fn next_fan_immediate_return() {
        // M(0) = {2, 3}, M(1) = {1, 3}; β = 1 and δ(y) = 3 ∈ M(0)
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(1, 1).unwrap();
        phi.try_assign(2, 2).unwrap();
        let r = next_fan(&phi, 0, 0, 1).unwrap();
        assert_eq!(r.fan.edges, vec![0]);
        assert_eq!((r.color, r.index), (3, 1));
    }

    #[test]
    fn next_fan_needs_a_pivot_color_present_at_y() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(1, 1).unwrap();
        // M(0) = {2, 3} ⊆ M(1) = {1, 2, 3}
        assert!(matches!(next_fan(&phi, 0, 0, 1), Err(FanError::PreconditionViolated(_))));
    }

    #[test]
    fn next_fan_beta_branch() {
        let g = Graph::from_edges(
            9,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7), (2, 8)],
        )
        .unwrap();
        let mut phi = PartialColoring::new(&g);
        assert_eq!(phi.palette(), 5);
        for (e, c) in [(1, 1), (2, 2), (3, 3), (4, 3), (5, 4), (6, 5)] {
            phi.try_assign(e, c).unwrap();
        }
        // M(0) = {4, 5}, M(1) = {1, 2}; β = 2, δ(y) = 1 → leaf 2, δ(2) = 2 = β
        let r = next_fan(&phi, 0, 0, 2).unwrap();
        assert_eq!(r.fan.leaves, vec![1, 2]);
        assert_eq!((r.color, r.index), (2, 2));
        for alpha in [4, 5] {
            assert!(r.fan.edges.iter().all(|&e| !matches!(phi.color(e), Some(c) if c == alpha || c == 2)));
        }
    }

    #[test]
    fn next_fan_rejects_beta_present_at_y() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 3)]).unwrap();
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(1, 1).unwrap();
        assert!(matches!(next_fan(&phi, 0, 0, 1), Err(FanError::PreconditionViolated(_))));
    }

    #[test]
    fn first_fan_contract_on_random_colorings() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..40 {
            let g = random_max_degree(40, 3 + seed as usize % 5, seed).unwrap();
            let phi = checks::random_partial_coloring(&g, 0.8, &mut rng);
            for e in (0..g.m()).filter(|&e| phi.is_blank(e)) {
                let (a, b) = g.endpoints(e);
                let x = if rng.gen_bool(0.5) { a } else { b };
                let r = first_fan(&phi, e, x).unwrap();
                assert!(checks::fan_result_contract(&phi, &r));
                if phi.is_missing(x, r.color) {
                    assert!(checks::is_fan_happy(&phi, &r.fan));
                } else {
                    let prefix = r.prefix_fan();
                    for alpha in phi.missing(x) {
                        let s = checks::fan_status(&phi, &r.fan, alpha, r.color);
                        let s2 = checks::fan_status(&phi, &prefix, alpha, r.color);
                        assert!(s == FanStatus::Successful || s2 == FanStatus::Successful);
                    }
                }
            }
        }
    }
}
