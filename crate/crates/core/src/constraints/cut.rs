//! Cut-polytope inequalities on the projected graph and their expansion
//! into moment-matrix constraints.

use serde::{Deserialize, Serialize};

use super::projection::{BinaryProjection, DeltaView};
use crate::error::{Error, Result};
use crate::sdp::{Constraint, ConstraintClass, ConstraintKind, OmegaIndex, SparseSymMatrix};

/// Triangle sign patterns over the edges `(a,b), (b,c), (a,c)` of a sorted
/// triple, with right-hand sides.
pub const TRIANGLE_VARIANTS: [([f64; 3], f64); 4] = [
    ([1.0, 1.0, 1.0], 2.0),
    ([1.0, -1.0, -1.0], 0.0),
    ([-1.0, 1.0, -1.0], 0.0),
    ([-1.0, -1.0, 1.0], 0.0),
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutDescriptor {
    /// `nodes` sorted ascending; `variant` indexes `TRIANGLE_VARIANTS`.
    Triangle { nodes: [usize; 3], variant: u8 },
    /// Closed cycle `nodes[0] -> nodes[1] -> ... -> nodes[0]`; `odd[k]`
    /// marks edge `k` (from `nodes[k]` to its successor) as a member of `F`.
    Cycle { nodes: Vec<usize>, odd: Vec<bool> },
    /// Odd rim cycle around `hub`.
    OddWheel { hub: usize, rim: Vec<usize> },
}

/// Rotates and reflects a closed cycle so its smallest node comes first and
/// the smaller of its two neighbours second. Edge labels follow the nodes.
pub fn canonical_cycle<T: Copy>(nodes: &[usize], labels: &[T]) -> (Vec<usize>, Vec<T>) {
    let n = nodes.len();
    let k = (0..n).min_by_key(|&i| nodes[i]).unwrap_or(0);
    let fwd = nodes[(k + 1) % n] <= nodes[(k + n - 1) % n];
    let mut ns = Vec::with_capacity(n);
    let mut ls = Vec::with_capacity(n);
    for step in 0..n {
        if fwd {
            ns.push(nodes[(k + step) % n]);
            ls.push(labels[(k + step) % n]);
        } else {
            ns.push(nodes[(k + n - step) % n]);
            // edge between nodes[k-step] and nodes[k-step-1]
            ls.push(labels[(k + 2 * n - step - 1) % n]);
        }
    }
    (ns, ls)
}

impl CutDescriptor {
    pub fn cycle(nodes: Vec<usize>, odd: Vec<bool>) -> Self {
        let (nodes, odd) = canonical_cycle(&nodes, &odd);
        CutDescriptor::Cycle { nodes, odd }
    }

    pub fn odd_wheel(hub: usize, rim: Vec<usize>) -> Self {
        let unit = vec![(); rim.len()];
        let (rim, _) = canonical_cycle(&rim, &unit);
        CutDescriptor::OddWheel { hub, rim }
    }

    pub fn triangle(mut nodes: [usize; 3], variant: u8) -> Self {
        nodes.sort_unstable();
        CutDescriptor::Triangle { nodes, variant }
    }

    pub fn class(&self) -> ConstraintClass {
        match self {
            CutDescriptor::Triangle { .. } => ConstraintClass::Triangle,
            CutDescriptor::Cycle { .. } => ConstraintClass::Cycle,
            CutDescriptor::OddWheel { .. } => ConstraintClass::OddWheel,
        }
    }

    /// `(sum_k coef_k * delta(a_k, b_k), rhs)` for the `<=` form.
    pub fn linear_form(&self) -> Result<(Vec<(usize, usize, f64)>, f64)> {
        match self {
            CutDescriptor::Triangle { nodes: [a, b, c], variant } => {
                let (signs, rhs) = TRIANGLE_VARIANTS
                    .get(*variant as usize)
                    .ok_or_else(|| Error::Projection(format!("triangle variant {variant}")))?;
                if !(a < b && b < c) {
                    return Err(Error::Projection("triangle nodes must be distinct and sorted".into()));
                }
                Ok((
                    vec![(*a, *b, signs[0]), (*b, *c, signs[1]), (*a, *c, signs[2])],
                    *rhs,
                ))
            }
            CutDescriptor::Cycle { nodes, odd } => {
                let n = nodes.len();
                let n_odd = odd.iter().filter(|&&f| f).count();
                if n < 3 || odd.len() != n || n_odd % 2 == 0 || !distinct(nodes) {
                    return Err(Error::Projection("malformed cycle cut".into()));
                }
                let terms = (0..n)
                    .map(|k| (nodes[k], nodes[(k + 1) % n], if odd[k] { 1.0 } else { -1.0 }))
                    .collect();
                Ok((terms, (n_odd - 1) as f64))
            }
            CutDescriptor::OddWheel { hub, rim } => {
                let n = rim.len();
                if n < 3 || n % 2 == 0 || !distinct(rim) || rim.contains(hub) {
                    return Err(Error::Projection("malformed odd-wheel cut".into()));
                }
                let mut terms: Vec<_> = (0..n).map(|k| (rim[k], rim[(k + 1) % n], 1.0)).collect();
                terms.extend(rim.iter().map(|&v| (v, *hub, -1.0)));
                Ok((terms, (n - 1) as f64 / 2.0))
            }
        }
    }

    fn key(&self) -> Vec<u64> {
        match self {
            CutDescriptor::Triangle { nodes, variant } => {
                vec![nodes[0] as u64, nodes[1] as u64, nodes[2] as u64, *variant as u64]
            }
            CutDescriptor::Cycle { nodes, odd } => nodes
                .iter()
                .zip(odd)
                .map(|(&v, &f)| ((v as u64) << 1) | f as u64)
                .collect(),
            CutDescriptor::OddWheel { hub, rim } => {
                std::iter::once(*hub as u64).chain(rim.iter().map(|&v| v as u64)).collect()
            }
        }
    }

    /// `lhs - rhs` evaluated on edge values `delta`.
    pub fn slack_violation(&self, delta: &DeltaView) -> Result<f64> {
        let (terms, rhs) = self.linear_form()?;
        let mut lhs = 0.0;
        for (a, b, c) in terms {
            let d = delta
                .get(a, b)
                .ok_or_else(|| Error::Projection(format!("binary nodes {a} and {b} are not adjacent")))?;
            lhs += c * d;
        }
        Ok(lhs - rhs)
    }
}

fn distinct(v: &[usize]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

/// Expands every `delta` of the cut into its `Y` entries.
pub fn cut_to_constraint(cut: &CutDescriptor, proj: &BinaryProjection, idx: &OmegaIndex) -> Result<Constraint> {
    let (terms, rhs) = cut.linear_form()?;
    let mut coefs = Vec::new();
    for (a, b, c) in terms {
        for (r, col, v) in proj.delta_terms(a, b, idx)? {
            coefs.push((r, col, c * v));
        }
    }
    Ok(Constraint::new(
        cut.class(),
        &cut.key(),
        ConstraintKind::Inequality,
        SparseSymMatrix::from_coefficients(coefs),
        rhs,
    ))
}
