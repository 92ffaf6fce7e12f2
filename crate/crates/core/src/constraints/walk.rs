//! Shortest odd closed walks via a two-layer cover, and their reduction to
//! simple cycles.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Arc to `to` with non-negative `weight`; `flip` arcs change layer.
#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub to: usize,
    pub weight: f64,
    pub flip: bool,
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Closed walk `nodes[0] -> ... -> nodes[k-1] -> nodes[0]`; `flips[i]` belongs
/// to the step leaving `nodes[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedWalk {
    pub weight: f64,
    pub nodes: Vec<usize>,
    pub flips: Vec<bool>,
}

/// Shortest walk from `(s, 0)` to `(s, 1)`, i.e. the lightest closed walk
/// through `s` using an odd number of flip arcs. Gives up once every
/// remaining label is at least `limit`.
pub fn shortest_odd_walk(adj: &[Vec<Arc>], s: usize, limit: f64) -> Option<ClosedWalk> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; 2 * n];
    let mut pred: Vec<Option<(usize, bool)>> = vec![None; 2 * n];
    let mut done = vec![false; 2 * n];
    let mut heap = BinaryHeap::new();
    let (src, dst) = (2 * s, 2 * s + 1);
    dist[src] = 0.0;
    heap.push(Item(0.0, src));
    while let Some(Item(d, v)) = heap.pop() {
        if done[v] {
            continue;
        }
        if d >= limit {
            return None;
        }
        done[v] = true;
        if v == dst {
            break;
        }
        let (node, layer) = (v / 2, v % 2);
        for arc in &adj[node] {
            let w = 2 * arc.to + (layer ^ arc.flip as usize);
            let nd = d + arc.weight;
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = Some((v, arc.flip));
                heap.push(Item(nd, w));
            }
        }
    }
    if !done[dst] {
        return None;
    }
    let mut nodes = Vec::new();
    let mut flips = Vec::new();
    let mut v = dst;
    while v != src {
        let (u, f) = pred[v].expect("reachable");
        nodes.push(u / 2);
        flips.push(f);
        v = u;
    }
    nodes.reverse();
    flips.reverse();
    Some(ClosedWalk {
        weight: dist[dst],
        nodes,
        flips,
    })
}

/// Splits a closed walk at repeated nodes, keeping the piece with an odd
/// number of flips, until the nodes are distinct. Returns `None` if that
/// piece degenerates to fewer than three nodes.
pub fn simplify_odd(mut nodes: Vec<usize>, mut flips: Vec<bool>) -> Option<(Vec<usize>, Vec<bool>)> {
    debug_assert_eq!(flips.iter().filter(|&&f| f).count() % 2, 1);
    loop {
        let k = nodes.len();
        let mut rep = None;
        'outer: for i in 0..k {
            for j in i + 1..k {
                if nodes[i] == nodes[j] {
                    rep = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = rep else { break };
        let inner_odd = flips[i..j].iter().filter(|&&f| f).count() % 2 == 1;
        if inner_odd {
            nodes = nodes[i..j].to_vec();
            flips = flips[i..j].to_vec();
        } else {
            let mut n2 = nodes[j..].to_vec();
            n2.extend_from_slice(&nodes[..i]);
            let mut f2 = flips[j..].to_vec();
            f2.extend_from_slice(&flips[..i]);
            nodes = n2;
            flips = f2;
        }
    }
    (nodes.len() >= 3).then_some((nodes, flips))
}
