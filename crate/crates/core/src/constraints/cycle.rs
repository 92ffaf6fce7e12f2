//! Cycle inequalities
//!
//! ```text
//! sum_{C \ F} delta + sum_F (1 - delta) >= 1,   |F| odd
//! ```
//!
//! separated by shortest paths in the two-layer cover of the projected graph:
//! same-layer arcs weigh `delta`, cross-layer arcs `1 - delta`, so a path
//! from `(s, 0)` to `(s, 1)` prices an odd `F` along a closed walk.

use std::collections::HashSet;

use super::cut::{cut_to_constraint, CutDescriptor};
use super::projection::{BinaryProjection, DeltaView};
use super::walk::{shortest_odd_walk, simplify_odd, Arc};
use super::{sort_violations, Violation};
use crate::error::Result;
use crate::sdp::PrimalPoint;

fn cover_arcs(proj: &BinaryProjection, delta: &[f64]) -> Vec<Vec<Arc>> {
    let mut adj = vec![Vec::new(); proj.num_nodes()];
    for (e, &(a, b)) in proj.edges().iter().enumerate() {
        let d = delta[e];
        for (x, y) in [(a, b), (b, a)] {
            adj[x].push(Arc { to: y, weight: d, flip: false });
            adj[x].push(Arc {
                to: y,
                weight: 1.0 - d,
                flip: true,
            });
        }
    }
    adj
}

/// Distinct cycle cuts found from the start nodes, each with its violation
/// evaluated on `delta`, most violated first.
pub fn cycle_cuts(delta: &DeltaView, eps: f64) -> Vec<(CutDescriptor, f64)> {
    let proj = delta.proj;
    let adj = cover_arcs(proj, &delta.values);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in 0..proj.num_nodes() {
        let Some(walk) = shortest_odd_walk(&adj, s, 1.0 - eps) else {
            continue;
        };
        let Some((nodes, flips)) = simplify_odd(walk.nodes, walk.flips) else {
            continue;
        };
        let cut = CutDescriptor::cycle(nodes, flips);
        if !seen.insert(cut.clone()) {
            continue;
        }
        let amount = cut.slack_violation(delta).expect("cycle follows projected edges");
        if amount > eps {
            out.push((cut, amount));
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

/// Distinct violated cycle inequalities, at most one per start node, most
/// violated first. Amounts are evaluated on the unclamped primal.
pub fn separate_cycle(primal: &PrimalPoint, proj: &BinaryProjection, eps: f64) -> Result<Vec<Violation>> {
    let delta = DeltaView::new(proj, proj.deltas(primal)?);
    to_violations(cycle_cuts(&delta, eps), primal, proj, eps)
}

pub(crate) fn to_violations(
    cuts: Vec<(CutDescriptor, f64)>,
    primal: &PrimalPoint,
    proj: &BinaryProjection,
    eps: f64,
) -> Result<Vec<Violation>> {
    let mut out = Vec::with_capacity(cuts.len());
    for (cut, _) in cuts {
        let constraint = cut_to_constraint(&cut, proj, &primal.index)?;
        let amount = constraint.residual(&primal.omega);
        if amount > eps {
            out.push(Violation { constraint, amount });
        }
    }
    sort_violations(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphModel;
    use crate::sdp::{OmegaIndex, SymMatrix};

    fn binary_triangle() -> GraphModel {
        let mut m = GraphModel::uniform(3, 2).unwrap();
        for (p, q) in [(0, 1), (1, 2), (0, 2)] {
            m.add_edge(p, q, vec![0.0; 4]).unwrap();
        }
        m
    }

    /// Half-half point on which every pair of source nodes disagrees.
    fn frustrated(m: &GraphModel) -> PrimalPoint {
        let idx = OmegaIndex::new(m.labels());
        let mut om = SymMatrix::zeros(idx.dim());
        om[(0, 0)] = 1.0;
        for p in 0..m.num_nodes() {
            for i in 0..2 {
                let r = idx.row(p, i);
                om[(0, r)] = 0.5;
                om[(r, 0)] = 0.5;
                om[(r, r)] = 0.5;
            }
        }
        for &(p, q) in m.edges() {
            for i in 0..2 {
                let (r, s) = (idx.row(p, i), idx.row(q, 1 - i));
                om[(r, s)] = 0.5;
                om[(s, r)] = 0.5;
            }
        }
        PrimalPoint::new(om, idx).unwrap()
    }

    #[test]
    fn all_cut_triangle_is_violated() {
        let m = binary_triangle();
        let pr = BinaryProjection::singleton(&m);
        let vs = separate_cycle(&frustrated(&m), &pr, 1e-4).unwrap();
        assert!(!vs.is_empty());
        assert!((vs[0].amount - 1.0).abs() < 1e-12);
        assert!(vs.iter().all(|v| v.amount <= 1.0 + 1e-12));
    }

    #[test]
    fn zero_delta_is_clean() {
        let m = binary_triangle();
        let pr = BinaryProjection::singleton(&m);
        // delta = 0 between same-label variables, but 1 between label-0 and
        // label-1 variables; that point is a vertex, so nothing is violated
        let pp = PrimalPoint::from_assignment(m.labels(), &[1, 1, 1]);
        assert!(separate_cycle(&pp, &pr, 1e-4).unwrap().is_empty());
    }

    #[test]
    fn reported_amount_matches_constraint() {
        let m = binary_triangle();
        let pr = BinaryProjection::singleton(&m);
        let pp = frustrated(&m);
        for v in separate_cycle(&pp, &pr, 1e-4).unwrap() {
            assert!((v.constraint.residual(&pp.omega) - v.amount).abs() < 1e-12);
        }
    }
}
