//! Projection of a multi-label graph onto binary indicator variables.
//!
//! With singleton partitions, binary node `(p, s)` is `1[x_p = s]`. Two
//! binary nodes are adjacent when their source nodes share an edge, and
//!
//! ```text
//! delta((p,s),(q,t)) = sum_{i,j : [i=s] != [j=t]} Y_{pi,qj}
//! ```
//!
//! equals `1[pi_p^s != pi_q^t]` on integral points.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::GraphModel;
use crate::sdp::{OmegaIndex, PrimalPoint};

/// Values below this are treated as a broken primal rather than noise.
pub const DELTA_NEG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryProjection {
    /// `partitions[p][k]` is the label subset of the `k`-th binary variable of node `p`.
    pub partitions: Vec<Vec<Vec<usize>>>,
    /// binary node -> (source node, partition index)
    nodes: Vec<(usize, usize)>,
    first: Vec<usize>,
    /// Sorted neighbours, with `adj_edge[a][k]` the id of edge `(a, adj[a][k])`.
    adj: Vec<Vec<usize>>,
    adj_edge: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
}

impl BinaryProjection {
    /// One binary variable per label; nodes with a single label contribute none.
    pub fn singleton(model: &GraphModel) -> Self {
        let partitions = model
            .labels()
            .iter()
            .map(|&h| if h >= 2 { (0..h).map(|s| vec![s]).collect() } else { Vec::new() })
            .collect();
        Self::with_partitions(model, partitions).expect("singleton partitions are valid")
    }

    pub fn with_partitions(model: &GraphModel, partitions: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if partitions.len() != model.num_nodes() {
            return Err(Error::Projection(format!(
                "{} partition lists for {} nodes",
                partitions.len(),
                model.num_nodes()
            )));
        }
        let mut nodes = Vec::new();
        let mut first = Vec::with_capacity(partitions.len());
        for (p, parts) in partitions.iter().enumerate() {
            first.push(nodes.len());
            let h = model.num_labels(p);
            for (k, z) in parts.iter().enumerate() {
                if z.is_empty() || z.len() >= h || z.iter().any(|&i| i >= h) {
                    return Err(Error::Projection(format!(
                        "partition {k} of node {p} is not a non-empty proper label subset"
                    )));
                }
                nodes.push((p, k));
            }
        }
        let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
        let mut edges = Vec::new();
        for &(p, q) in model.edges() {
            for s in 0..partitions[p].len() {
                for t in 0..partitions[q].len() {
                    let (a, b) = (first[p] + s, first[q] + t);
                    let (a, b) = if a < b { (a, b) } else { (b, a) };
                    inc[a].push((b, edges.len()));
                    inc[b].push((a, edges.len()));
                    edges.push((a, b));
                }
            }
        }
        let mut adj = Vec::with_capacity(inc.len());
        let mut adj_edge = Vec::with_capacity(inc.len());
        for mut l in inc {
            l.sort_unstable();
            adj.push(l.iter().map(|&(b, _)| b).collect());
            adj_edge.push(l.iter().map(|&(_, e)| e).collect());
        }
        Ok(BinaryProjection {
            partitions,
            nodes,
            first,
            adj,
            adj_edge,
            edges,
            labels: model.labels().to_vec(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(source node, partition index)`
    pub fn node(&self, a: usize) -> (usize, usize) {
        self.nodes[a]
    }

    pub fn node_id(&self, p: usize, k: usize) -> usize {
        self.first[p] + k
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    /// Edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edge ids parallel to [`neighbors`](Self::neighbors).
    pub fn neighbor_edges(&self, a: usize) -> &[usize] {
        &self.adj_edge[a]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let k = self.adj.get(a)?.binary_search(&b).ok()?;
        Some(self.adj_edge[a][k])
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edge_id(a, b).is_some()
    }

    fn indicator(&self, a: usize) -> Vec<bool> {
        let (p, k) = self.nodes[a];
        let mut v = vec![false; self.labels[p]];
        for &i in &self.partitions[p][k] {
            v[i] = true;
        }
        v
    }

    /// Label pairs `(i, j)` of the source nodes whose product `Y_{pi,qj}`
    /// enters `delta(a, b)`, oriented as `(label of a, label of b)`.
    pub fn disagreeing_pairs(&self, a: usize, b: usize) -> Result<Vec<(usize, usize)>> {
        if !self.is_edge(a, b) {
            return Err(Error::Projection(format!("binary nodes {a} and {b} are not adjacent")));
        }
        let (ia, ib) = (self.indicator(a), self.indicator(b));
        let mut out = Vec::new();
        for (i, &za) in ia.iter().enumerate() {
            for (j, &zb) in ib.iter().enumerate() {
                if za != zb {
                    out.push((i, j));
                }
            }
        }
        Ok(out)
    }

    /// `(r, c, 1.0)` coefficient terms of `delta(a, b)` in the layout `idx`.
    pub fn delta_terms(&self, a: usize, b: usize, idx: &OmegaIndex) -> Result<Vec<(usize, usize, f64)>> {
        let (p, _) = self.nodes[a];
        let (q, _) = self.nodes[b];
        Ok(self
            .disagreeing_pairs(a, b)?
            .into_iter()
            .map(|(i, j)| (idx.row(p, i), idx.row(q, j), 1.0))
            .collect())
    }

    /// Unclamped `delta` for every projected edge, in `edges()` order.
    pub fn raw_deltas(&self, primal: &PrimalPoint) -> Vec<f64> {
        let mut out = vec![0.0; self.edges.len()];
        let singleton = self.partitions.iter().all(|ps| ps.iter().all(|z| z.len() == 1));
        if singleton {
            // delta = rowsum_s + colsum_t - 2 Y_st over the (p, q) block
            let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                by_pair.entry((self.nodes[a].0, self.nodes[b].0)).or_default().push(e);
            }
            for ((p, q), es) in by_pair {
                let (hp, hq) = (self.labels[p], self.labels[q]);
                let mut rows = vec![0.0; hp];
                let mut cols = vec![0.0; hq];
                for (i, row) in rows.iter_mut().enumerate() {
                    for (j, col) in cols.iter_mut().enumerate() {
                        let y = primal.pair(p, i, q, j);
                        *row += y;
                        *col += y;
                    }
                }
                for e in es {
                    let (a, b) = self.edges[e];
                    let s = self.partitions[p][self.nodes[a].1][0];
                    let t = self.partitions[q][self.nodes[b].1][0];
                    out[e] = rows[s] + cols[t] - 2.0 * primal.pair(p, s, q, t);
                }
            }
        } else {
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                let (p, q) = (self.nodes[a].0, self.nodes[b].0);
                out[e] = self
                    .disagreeing_pairs(a, b)
                    .expect("edge")
                    .into_iter()
                    .map(|(i, j)| primal.pair(p, i, q, j))
                    .sum();
            }
        }
        out
    }

    /// `delta` clamped to `[0, 1]`; values below `-DELTA_NEG_TOL` are an error.
    pub fn deltas(&self, primal: &PrimalPoint) -> Result<Vec<f64>> {
        self.deltas_with_tol(primal, DELTA_NEG_TOL)
    }

    /// As [`deltas`](Self::deltas) with a caller-chosen negativity tolerance.
    pub fn deltas_with_tol(&self, primal: &PrimalPoint, neg_tol: f64) -> Result<Vec<f64>> {
        self.raw_deltas(primal)
            .into_iter()
            .enumerate()
            .map(|(e, d)| {
                if d < -neg_tol {
                    let (a, b) = self.edges[e];
                    Err(Error::InconsistentPrimal(format!(
                        "delta({a}, {b}) = {d:.3e} is negative beyond tolerance"
                    )))
                } else {
                    Ok(d.clamp(0.0, 1.0))
                }
            })
            .collect()
    }
}

/// Edge-indexed `delta` values with symmetric lookup.
#[derive(Debug, Clone)]
pub struct DeltaView<'a> {
    pub proj: &'a BinaryProjection,
    pub values: Vec<f64>,
}

impl<'a> DeltaView<'a> {
    pub fn new(proj: &'a BinaryProjection, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), proj.num_edges());
        DeltaView { proj, values }
    }

    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.proj.edge_id(a, b).map(|e| self.values[e])
    }

    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.get(a, b).expect("projected edge")
    }
}
