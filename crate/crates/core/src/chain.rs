//! Single Vizing chains `F + P`: the unbounded variant used by the
//! `O(n log n)` colorer and the `2ℓ`-truncated first/next chains that feed
//! the multi-step search.

use rand::Rng;
use thiserror::Error;

use crate::coloring::{fan_plus_path, Color, ColoringError, Fan, PartialColoring, PathChain};
use crate::fan::{first_fan_with, next_fan_with, FanError, FanScratch};
use crate::graph::{EdgeId, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("chain precondition violated: {0}")]
    PreconditionViolated(String),
}

/// A fan followed by the path hanging off its last edge. `colors` is
/// `(α, β)` with the path edges after `Start(P)` colored `α, β, α, …` in
/// `Shift(φ, F)`; it is `None` for a happy fan with `P = (End(F))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub fan: Fan,
    pub path: PathChain,
    pub colors: Option<(Color, Color)>,
}

impl Chain {
    fn happy(fan: Fan) -> Chain {
        let end = fan.end();
        let path = PathChain { edges: vec![end], vstart: fan.pivot, vend: fan.vend(), truncated: false };
        Chain { fan, path, colors: None }
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        fan_plus_path(&self.fan, &self.path)
    }

    pub fn len(&self) -> usize {
        self.fan.len() + self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether `P` was cut short of the maximal two-colored path.
    pub fn truncated(&self) -> bool {
        self.path.truncated
    }

    /// Color of path edge `e_i` for `i ≥ 1`.
    pub fn path_color(&self, i: usize) -> Option<Color> {
        let (a, b) = self.colors?;
        (i >= 1).then_some(if i % 2 == 1 { a } else { b })
    }
}

/// `P(End(F); Shift(φ, F), αβ)` cut to `cap` edges. `φ` is restored before
/// returning.
pub fn path_after_fan(
    phi: &mut PartialColoring,
    fan: &Fan,
    alpha: Color,
    beta: Color,
    cap: usize,
) -> Result<PathChain, ChainError> {
    phi.shift_chain(&fan.edges)?;
    let walked = phi.walk_alternating(fan.end(), fan.vend(), alpha, beta, cap);
    phi.unshift_chain(&fan.edges).expect("undo of a fan shift");
    Ok(walked?)
}

/// A happy Vizing chain together with the lengths of both candidate paths
/// (zero when the fan alone is happy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VizingChain {
    pub chain: Chain,
    pub path_len: usize,
    pub alt_path_len: usize,
}

/// Vizing Chain: a happy chain `F + P` starting at the uncolored edge `e`
/// with pivot `x`, with `α` drawn uniformly from `M(φ, x)`. Both `P` and
/// `P'` are computed in full.
pub fn vizing_chain<R: Rng + ?Sized>(
    phi: &mut PartialColoring,
    e: EdgeId,
    x: Vertex,
    rng: &mut R,
    scratch: &mut FanScratch,
) -> Result<VizingChain, ChainError> {
    let r = first_fan_with(phi, e, x, scratch)?;
    let beta = r.color;
    if phi.is_missing(x, beta) {
        return Ok(VizingChain { chain: Chain::happy(r.fan), path_len: 0, alt_path_len: 0 });
    }
    let missing = phi.missing(x);
    let alpha = missing[rng.gen_range(0..missing.len())];
    let alt_fan = r.prefix_fan();
    let p = path_after_fan(phi, &r.fan, alpha, beta, usize::MAX)?;
    let p_alt = path_after_fan(phi, &alt_fan, alpha, beta, usize::MAX)?;
    let (path_len, alt_path_len) = (p.len(), p_alt.len());
    let chain = if p.vend != x {
        Chain { fan: r.fan, path: p, colors: Some((alpha, beta)) }
    } else {
        Chain { fan: alt_fan, path: p_alt, colors: Some((alpha, beta)) }
    };
    Ok(VizingChain { chain, path_len, alt_path_len })
}

/// Picks between `F + P` and `F' + P'` for the `γδ` pair, walking at most
/// `2ℓ + 1` edges of `P` and `2ℓ` of `P'`.
fn choose_truncated(
    phi: &mut PartialColoring,
    fan: Fan,
    alt_fan: Fan,
    gamma: Color,
    delta: Color,
    ell: usize,
) -> Result<Chain, ChainError> {
    let x = fan.pivot;
    let g = phi.graph();
    let p = path_after_fan(phi, &fan, gamma, delta, 2 * ell + 1)?;
    if p.len() > 2 * ell || p.vend != x {
        let path = if p.len() > 2 * ell { p.prefix(g, 2 * ell) } else { p };
        Ok(Chain { fan, path, colors: Some((gamma, delta)) })
    } else {
        let path = path_after_fan(phi, &alt_fan, gamma, delta, 2 * ell)?;
        Ok(Chain { fan: alt_fan, path, colors: Some((gamma, delta)) })
    }
}

/// First Chain: as [`vizing_chain`] with `α = min M(φ, x)` and paths cut to
/// `2ℓ` edges.
pub fn first_chain(
    phi: &mut PartialColoring,
    e: EdgeId,
    x: Vertex,
    ell: usize,
    scratch: &mut FanScratch,
) -> Result<Chain, ChainError> {
    let r = first_fan_with(phi, e, x, scratch)?;
    let beta = r.color;
    if phi.is_missing(x, beta) {
        return Ok(Chain::happy(r.fan));
    }
    let alpha = phi.missing_min(x, None)?;
    let alt_fan = r.prefix_fan();
    choose_truncated(phi, r.fan, alt_fan, alpha, beta, ell)
}

/// Next Chain on the uncolored edge `e = xy` given the colors `α ∈ M(φ, x) \
/// M(φ, y)` and `β ∈ M(φ, y)` of the previous path.
pub fn next_chain(
    phi: &mut PartialColoring,
    e: EdgeId,
    x: Vertex,
    alpha: Color,
    beta: Color,
    ell: usize,
    scratch: &mut FanScratch,
) -> Result<Chain, ChainError> {
    let g = phi.graph();
    if e >= g.m() || !g.has_endpoint(e, x) {
        return Err(ChainError::PreconditionViolated(format!("{x} is not an endpoint of edge {e}")));
    }
    let y = g.other(e, x);
    if !phi.is_missing(x, alpha) || phi.is_missing(y, alpha) {
        return Err(ChainError::PreconditionViolated(format!(
            "color {alpha} must be missing at {x} and present at {y}"
        )));
    }
    if !phi.is_missing(y, beta) {
        return Err(ChainError::PreconditionViolated(format!("color {beta} is present at {y}")));
    }
    let r = next_fan_with(phi, e, x, beta, scratch)?;
    let delta = r.color;
    if phi.is_missing(x, delta) {
        return Ok(Chain::happy(r.fan));
    }
    if delta == beta {
        let path = path_after_fan(phi, &r.fan, alpha, beta, 2 * ell)?;
        return Ok(Chain { fan: r.fan, path, colors: Some((alpha, beta)) });
    }
    let gamma = phi.missing_min(x, Some(alpha))?;
    let alt_fan = r.prefix_fan();
    choose_truncated(phi, r.fan, alt_fan, gamma, delta, ell)
}
