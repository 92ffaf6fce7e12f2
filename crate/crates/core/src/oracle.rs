//! Brute-force and numerical reference implementations for testing.
//!
//! Nothing here calls into the solver; the separation oracles work on a
//! bare edge list so they share no code with the shortest-path separators.

use crate::error::{Error, Result};
use crate::model::{Assignment, Domain, GraphModel};
use crate::sdp::{evaluate_at, sym_eigen, Constraint, SparseSymMatrix, SymMatrix};

/// Largest domain `exhaustive_map` agrees to enumerate.
pub const ENUM_LIMIT: f64 = 1e7;

/// Relative eigenvalue threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub optimum: f64,
    pub argmins: Vec<Assignment>,
    pub enumerated: u64,
}

/// Minimum energy over `d` by full enumeration, with every minimizer.
pub fn exhaustive_map(model: &GraphModel, d: &Domain) -> Result<OracleReport> {
    d.validate(model)?;
    let size = d.size();
    if size > ENUM_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: ENUM_LIMIT,
        });
    }
    let mut optimum = f64::INFINITY;
    let mut argmins = Vec::new();
    let mut enumerated = 0;
    d.for_each_assignment(|x| {
        enumerated += 1;
        let e = model.energy_unchecked(x);
        if e < optimum {
            optimum = e;
            argmins.clear();
        }
        if e == optimum {
            argmins.push(Assignment(x.to_vec()));
        }
    });
    Ok(OracleReport {
        optimum,
        argmins,
        enumerated,
    })
}

/// Numerical rank (eigenvalues above `RANK_TOL` times the largest) and
/// Frobenius norm.
pub fn rank_and_norm(omega: &SymMatrix) -> Result<(usize, f64)> {
    let spec = sym_eigen(omega)?;
    let top = spec.values.iter().copied().fold(0.0, f64::max);
    let rank = if top > 0.0 {
        spec.values.iter().filter(|&&l| l > RANK_TOL * top).count()
    } else {
        0
    };
    Ok((rank, omega.frobenius_norm()))
}

/// Largest `|g_i - fd_i| / max(1, |fd_i|)` between `gradient` and central
/// differences of `value` at `u`.
pub fn fd_gradient_error(
    mut value: impl FnMut(&[f64]) -> Result<f64>,
    gradient: &[f64],
    u: &[f64],
    step: f64,
) -> Result<f64> {
    if gradient.len() != u.len() {
        return Err(Error::Dimension(format!(
            "gradient has {} entries for {} variables",
            gradient.len(),
            u.len()
        )));
    }
    let mut worst: f64 = 0.0;
    let mut x = u.to_vec();
    for i in 0..u.len() {
        x[i] = u[i] + step;
        let hi = value(&x)?;
        x[i] = u[i] - step;
        let lo = value(&x)?;
        x[i] = u[i];
        let fd = (hi - lo) / (2.0 * step);
        worst = worst.max((gradient[i] - fd).abs() / fd.abs().max(1.0));
    }
    Ok(worst)
}

/// Finite-difference check of the dual gradient.
pub fn fd_gradient_check(
    objective: &SparseSymMatrix,
    constraints: &[Constraint],
    dim: usize,
    u: &[f64],
    gamma: f64,
    eta: f64,
    step: f64,
) -> Result<f64> {
    let g = evaluate_at(u, gamma, eta, objective, constraints, dim)?.gradient;
    fd_gradient_error(
        |x| Ok(evaluate_at(x, gamma, eta, objective, constraints, dim)?.value),
        &g,
        u,
        step,
    )
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    adj
}

/// Calls `f(nodes, edge_ids)` once per simple cycle (length >= 3) of the
/// subgraph induced by `allowed`.
pub fn for_each_simple_cycle(
    n: usize,
    edges: &[(usize, usize)],
    allowed: &[bool],
    mut f: impl FnMut(&[usize], &[usize]),
) {
    let adj = adjacency(n, edges);
    let mut on_path = vec![false; n];
    let mut nodes = Vec::new();
    let mut eids = Vec::new();

    // cycles rooted at their smallest node, second node < last node
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        s: usize,
        v: usize,
        adj: &[Vec<(usize, usize)>],
        allowed: &[bool],
        on_path: &mut [bool],
        nodes: &mut Vec<usize>,
        eids: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize], &[usize]),
    ) {
        for &(w, e) in &adj[v] {
            if w == s && nodes.len() >= 3 && nodes[1] < v {
                eids.push(e);
                f(nodes, eids);
                eids.pop();
            } else if w > s && allowed[w] && !on_path[w] {
                on_path[w] = true;
                nodes.push(w);
                eids.push(e);
                dfs(s, w, adj, allowed, on_path, nodes, eids, f);
                eids.pop();
                nodes.pop();
                on_path[w] = false;
            }
        }
    }

    for s in 0..n {
        if !allowed[s] {
            continue;
        }
        on_path[s] = true;
        nodes.push(s);
        dfs(s, s, &adj, allowed, &mut on_path, &mut nodes, &mut eids, &mut f);
        nodes.pop();
        on_path[s] = false;
    }
}

/// Most violated cycle inequality over every simple cycle and odd subset.
/// Returns the violation `sum_F delta - sum_{C\F} delta - (|F| - 1)` and
/// the cycle's nodes, or `None` on a forest.
pub fn brute_force_cycle(n: usize, edges: &[(usize, usize)], delta: &[f64]) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_simple_cycle(n, edges, &vec![true; n], |nodes, eids| {
        let k = eids.len();
        let total: f64 = eids.iter().map(|&e| delta[e]).sum();
        for mask in 1u32..(1 << k) {
            if mask.count_ones() % 2 == 0 {
                continue;
            }
            let fsum: f64 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| delta[eids[i]]).sum();
            let amount = 2.0 * fsum - total - (mask.count_ones() as f64 - 1.0);
            if best.as_ref().is_none_or(|(b, _)| amount > *b) {
                best = Some((amount, nodes.to_vec()));
            }
        }
    });
    best
}

/// Most violated odd-wheel inequality over every hub and every odd simple
/// rim cycle inside the hub's neighbourhood. Returns the violation, hub and
/// rim.
pub fn brute_force_odd_wheel(
    n: usize,
    edges: &[(usize, usize)],
    delta: &[f64],
) -> Option<(f64, usize, Vec<usize>)> {
    let adj = adjacency(n, edges);
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for r in 0..n {
        let mut spoke = vec![None; n];
        for &(v, e) in &adj[r] {
            spoke[v] = Some(delta[e]);
        }
        let allowed: Vec<bool> = spoke.iter().map(Option::is_some).collect();
        for_each_simple_cycle(n, edges, &allowed, |nodes, eids| {
            if nodes.len() % 2 == 0 {
                return;
            }
            let rim: f64 = eids.iter().map(|&e| delta[e]).sum();
            let spokes: f64 = nodes.iter().map(|&v| spoke[v].unwrap_or(0.0)).sum();
            let amount = rim - spokes - (nodes.len() as f64 - 1.0) / 2.0;
            if best.as_ref().is_none_or(|(b, _, _)| amount > *b) {
                best = Some((amount, r, nodes.to_vec()));
            }
        });
    }
    best
}
