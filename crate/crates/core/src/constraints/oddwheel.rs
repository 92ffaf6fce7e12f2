//! Odd-wheel inequalities
//!
//! ```text
//! sum_C delta - sum_{v in V(C)} delta(v, r) <= (|C| - 1) / 2
//! ```
//!
//! for an odd rim cycle `C` around a hub `r`. Writing the violation as
//! `1/2 - sum_{(a,b) in C} w_ab` with
//! `w_ab = 1/2 - delta(a,b) + (delta(a,r) + delta(b,r)) / 2`
//! turns separation for a fixed hub into a shortest odd cycle search over
//! the hub's neighbourhood. The weights are non-negative whenever the
//! triangle inequalities through `r` hold; negative weights are clamped.

use std::collections::HashSet;

use super::cut::CutDescriptor;
use super::projection::{BinaryProjection, DeltaView};
use super::walk::{shortest_odd_walk, simplify_odd, Arc};
use super::cycle::to_violations;
use super::Violation;
use crate::error::Result;
use crate::sdp::PrimalPoint;

/// Hubs ordered by descending total spoke `delta`, ties by index.
pub fn hub_order(delta: &DeltaView) -> Vec<usize> {
    let proj = delta.proj;
    let mut score: Vec<(f64, usize)> = (0..proj.num_nodes())
        .map(|r| (proj.neighbors(r).iter().map(|&v| delta.at(v, r)).sum(), r))
        .collect();
    score.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    score.into_iter().map(|(_, r)| r).collect()
}

/// Odd-wheel cuts over at most `hub_budget` hubs, each with its violation
/// evaluated on `delta`, most violated first.
pub fn odd_wheel_cuts(delta: &DeltaView, eps: f64, hub_budget: usize) -> Vec<(CutDescriptor, f64)> {
    let proj = delta.proj;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut local = vec![usize::MAX; proj.num_nodes()];
    for r in hub_order(delta).into_iter().take(hub_budget) {
        let rim = proj.neighbors(r);
        if rim.len() < 3 {
            continue;
        }
        for (k, &v) in rim.iter().enumerate() {
            local[v] = k;
        }
        let mut adj = vec![Vec::new(); rim.len()];
        for (ka, &a) in rim.iter().enumerate() {
            for &b in proj.neighbors(a) {
                let kb = local[b];
                if kb == usize::MAX {
                    continue;
                }
                let w = 0.5 - delta.at(a, b) + 0.5 * (delta.at(a, r) + delta.at(b, r));
                adj[ka].push(Arc {
                    to: kb,
                    weight: w.max(0.0),
                    flip: true,
                });
            }
        }
        for &v in rim {
            local[v] = usize::MAX;
        }
        for s in 0..rim.len() {
            let Some(walk) = shortest_odd_walk(&adj, s, 0.5 - eps) else {
                continue;
            };
            let Some((cyc, _)) = simplify_odd(walk.nodes, walk.flips) else {
                continue;
            };
            let cut = CutDescriptor::odd_wheel(r, cyc.iter().map(|&k| rim[k]).collect());
            if !seen.insert(cut.clone()) {
                continue;
            }
            let amount = cut.slack_violation(delta).expect("wheel follows projected edges");
            if amount > eps {
                out.push((cut, amount));
            }
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

/// Most violated odd wheels over at most `hub_budget` hubs. Amounts are
/// evaluated on the unclamped primal.
pub fn separate_odd_wheel(
    primal: &PrimalPoint,
    proj: &BinaryProjection,
    eps: f64,
    hub_budget: usize,
) -> Result<Vec<Violation>> {
    let delta = DeltaView::new(proj, proj.deltas(primal)?);
    to_violations(odd_wheel_cuts(&delta, eps, hub_budget), primal, proj, eps)
}
