//! Triangle inequalities over mutually adjacent binary variables.

use super::cut::{CutDescriptor, TRIANGLE_VARIANTS};
use super::cycle::to_violations;
use super::projection::{BinaryProjection, DeltaView};
use super::Violation;
use crate::error::Result;
use crate::sdp::PrimalPoint;

/// Calls `f([a, b, c], [e_ab, e_bc, e_ac])` for every pairwise adjacent
/// triple `a < b < c`.
pub fn for_each_triangle(proj: &BinaryProjection, mut f: impl FnMut([usize; 3], [usize; 3])) {
    for a in 0..proj.num_nodes() {
        let (na, ea) = (proj.neighbors(a), proj.neighbor_edges(a));
        let start = na.partition_point(|&v| v <= a);
        for k in start..na.len() {
            let (b, e_ab) = (na[k], ea[k]);
            let (nb, eb) = (proj.neighbors(b), proj.neighbor_edges(b));
            // merge the parts of both neighbour lists above b
            let (mut i, mut j) = (k + 1, nb.partition_point(|&v| v <= b));
            while i < na.len() && j < nb.len() {
                match na[i].cmp(&nb[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        f([a, b, na[i]], [e_ab, eb[j], ea[i]]);
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
}

/// Sorted triples `a < b < c` that are pairwise adjacent.
pub fn triangles(proj: &BinaryProjection) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for_each_triangle(proj, |t, _| out.push(t));
    out
}

/// Violated triangle inequalities at `delta` with their `delta`-level amounts.
pub fn triangle_cuts(delta: &DeltaView, eps: f64) -> Vec<(CutDescriptor, f64)> {
    let mut hits = Vec::new();
    for_each_triangle(delta.proj, |t, es| {
        let d = es.map(|e| delta.values[e]);
        for (v, (signs, rhs)) in TRIANGLE_VARIANTS.iter().enumerate() {
            let lhs: f64 = signs.iter().zip(&d).map(|(s, x)| s * x).sum();
            if lhs - rhs > eps {
                hits.push((CutDescriptor::triangle(t, v as u8), lhs - rhs));
            }
        }
    });
    hits
}

/// Scans every triangle against all four sign patterns; the `max_return`
/// most violated (by more than `eps`) are returned.
pub fn enumerate_violated_triangles(
    primal: &PrimalPoint,
    proj: &BinaryProjection,
    eps: f64,
    max_return: usize,
) -> Result<Vec<Violation>> {
    let delta = DeltaView::new(proj, proj.deltas(primal)?);
    let mut out = to_violations(triangle_cuts(&delta, eps), primal, proj, eps)?;
    out.truncate(max_return);
    Ok(out)
}
