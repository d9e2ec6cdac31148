//! Direct, definition-level checks of chain properties. These clone the
//! coloring and are meant for tests and validation runs, not hot loops.

use rand::Rng;

use crate::coloring::{Color, Fan, PartialColoring, PathChain};
use crate::fan::FanResult;
use crate::graph::{EdgeId, Graph};

pub fn is_shiftable(phi: &PartialColoring, chain: &[EdgeId]) -> bool {
    phi.clone().shift_chain(chain).is_ok()
}

/// Shiftable, and `End(C)` is happy after shifting.
pub fn is_chain_happy(phi: &PartialColoring, chain: &[EdgeId]) -> bool {
    let mut psi = phi.clone();
    match chain.last() {
        Some(&end) => psi.shift_chain(chain).is_ok() && psi.is_happy(end),
        None => false,
    }
}

pub fn is_fan_happy(phi: &PartialColoring, fan: &Fan) -> bool {
    is_chain_happy(phi, &fan.edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanStatus {
    NotHopeful,
    Successful,
    Disappointed,
}

/// Status of a shiftable fan with respect to `αβ`. The fan is not required
/// to be unhappy.
pub fn fan_status(phi: &PartialColoring, fan: &Fan, alpha: Color, beta: Color) -> FanStatus {
    let (x, y) = (fan.pivot, fan.vend());
    if phi.degree_in(x, alpha, beta) >= 2 || phi.degree_in(y, alpha, beta) >= 2 {
        return FanStatus::NotHopeful;
    }
    let mut psi = phi.clone();
    if psi.shift_chain(&fan.edges).is_err() {
        return FanStatus::NotHopeful;
    }
    if psi.related(x, y, alpha, beta) {
        FanStatus::Disappointed
    } else {
        FanStatus::Successful
    }
}

pub fn is_hopeful(phi: &PartialColoring, fan: &Fan, alpha: Color, beta: Color) -> bool {
    fan_status(phi, fan, alpha, beta) != FanStatus::NotHopeful
}

/// Structural fan checks plus `η ∈ M(φ, vEnd(F)) ∩ M(φ, vEnd(F|j))`.
pub fn fan_result_contract(phi: &PartialColoring, r: &FanResult) -> bool {
    let g = phi.graph();
    let f = &r.fan;
    if f.is_empty() || f.leaves.len() != f.edges.len() || r.index == 0 || r.index > f.len() {
        return false;
    }
    let mut leaves = f.leaves.clone();
    leaves.sort_unstable();
    leaves.dedup();
    if leaves.len() != f.len() {
        return false;
    }
    let shaped = f
        .edges
        .iter()
        .zip(&f.leaves)
        .all(|(&e, &y)| g.has_endpoint(e, f.pivot) && g.other(e, f.pivot) == y);
    shaped
        && phi.is_blank(f.start())
        && f.edges[1..].iter().all(|&e| !phi.is_blank(e))
        && is_shiftable(phi, &f.edges)
        && phi.is_missing(f.vend(), r.color)
        && phi.is_missing(f.leaves[r.index - 1], r.color)
}

/// First Fan outcome: happy with `η ∈ M(x)`, or for every `α ∈ M(x)` one of
/// `F`, `F|j` is `αη`-successful.
pub fn first_fan_outcome(phi: &PartialColoring, r: &FanResult) -> bool {
    let x = r.fan.pivot;
    if phi.is_missing(x, r.color) {
        return is_fan_happy(phi, &r.fan);
    }
    let prefix = r.prefix_fan();
    phi.missing(x).into_iter().all(|alpha| {
        fan_status(phi, &r.fan, alpha, r.color) == FanStatus::Successful
            || fan_status(phi, &prefix, alpha, r.color) == FanStatus::Successful
    })
}

/// Next Fan outcome for the given `α ∈ M(x) \ M(y)` and `β`: no fan edge is
/// colored `α` or `β`, and the fan is happy, or `δ = β` with `F` `αβ`-hopeful,
/// or `F` or `F|j` is `γδ`-successful for some `γ ∈ M(x) \ {α}`.
pub fn next_fan_outcome(phi: &PartialColoring, r: &FanResult, alpha: Color, beta: Color) -> bool {
    let f = &r.fan;
    let clean = f.edges.iter().all(|&e| !matches!(phi.color(e), Some(c) if c == alpha || c == beta));
    if !clean {
        return false;
    }
    if is_fan_happy(phi, f) {
        return true;
    }
    if r.color == beta && is_hopeful(phi, f, alpha, beta) {
        return true;
    }
    let prefix = r.prefix_fan();
    phi.missing(f.pivot).into_iter().filter(|&c| c != alpha).any(|gamma| {
        fan_status(phi, f, gamma, r.color) == FanStatus::Successful
            || fan_status(phi, &prefix, gamma, r.color) == FanStatus::Successful
    })
}

/// Vertices and edges of `F + P`.
fn fan_path_parts(g: &Graph, fan: &Fan, path: &PathChain) -> (Vec<usize>, Vec<EdgeId>) {
    let mut vs: Vec<usize> = fan.vertices().collect();
    vs.extend(path.vertices(g));
    let mut es = fan.edges.clone();
    es.extend_from_slice(&path.edges[1..]);
    (vs, es)
}

/// For all `i < j`: `V(F_i) ∩ V(F_j + P_j) = ∅` and `E_int(P_i) ∩ E(F_j + P_j) = ∅`.
pub fn is_non_intersecting(g: &Graph, steps: &[(Fan, PathChain)]) -> bool {
    for j in 0..steps.len() {
        let (vs, es) = fan_path_parts(g, &steps[j].0, &steps[j].1);
        for (fi, pi) in &steps[..j] {
            if fi.vertices().any(|v| vs.contains(&v)) {
                return false;
            }
            if pi.internal_edges().iter().any(|e| es.contains(e)) {
                return false;
            }
        }
    }
    true
}

/// Visits edges in id order and, with probability `density`, gives each a
/// uniform common missing color if there is one.
pub fn random_partial_coloring<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    density: f64,
    rng: &mut R,
) -> PartialColoring<'g> {
    let mut phi = PartialColoring::new(g);
    for e in 0..g.m() {
        if rng.gen_bool(density) {
            let (u, v) = g.endpoints(e);
            let common: Vec<_> = phi.missing(u).into_iter().filter(|&c| phi.is_missing(v, c)).collect();
            if !common.is_empty() {
                phi.try_assign(e, common[rng.gen_range(0..common.len())]).unwrap();
            }
        }
    }
    phi
}

/// Every proper total coloring check done the slow way: all pairs of edges.
pub fn brute_force_proper(g: &Graph, colors: &[Option<Color>], palette: usize) -> bool {
    for e in 0..g.m() {
        match colors[e] {
            Some(c) if (1..=palette).contains(&c) => {}
            _ => return false,
        }
        for f in e + 1..g.m() {
            if g.common_vertex(e, f).is_some() && colors[e] == colors[f] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle, path};

    #[test]
    fn brute_force_detects_conflict() {
        let g = cycle(3);
        assert!(brute_force_proper(&g, &[Some(1), Some(2), Some(3)], 3));
        assert!(!brute_force_proper(&g, &[Some(1), Some(1), Some(2)], 3));
        assert!(!brute_force_proper(&g, &[Some(1), None, Some(2)], 3));
    }

    #[test]
    fn statuses_on_a_path() {
        // 0-1 blank, 1-2 = 1, 2-3 = 2: from x = 0 the fan (01) with αβ = 21
        let g = path(4);
        let mut phi = PartialColoring::new(&g);
        phi.try_assign(1, 1).unwrap();
        phi.try_assign(2, 2).unwrap();
        let fan = Fan { pivot: 0, leaves: vec![1], edges: vec![0] };
        assert_eq!(fan_status(&phi, &fan, 2, 1), FanStatus::Successful);
        assert!(is_fan_happy(&phi, &fan));
        assert!(is_non_intersecting(&g, &[]));
    }
}
