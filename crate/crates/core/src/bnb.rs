//! Branch-and-bound over label domains.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::time::{Duration, Instant};

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::bounding::{bound_with, is_exact, BoundConfig, BoundControl, BoundResult, ExitReason, WarmStart};
use crate::error::{Error, Result};
use crate::model::{Assignment, Domain, GraphModel};
use crate::sdp::ConstraintClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub bound: BoundConfig,
    /// Wall-clock budget in seconds; `None` runs to completion.
    pub budget_sec: Option<f64>,
    /// Cap on bound calls.
    pub max_nodes: Option<usize>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            bound: BoundConfig::default(),
            budget_sec: None,
            max_nodes: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BnbNode {
    pub domain: Domain,
    /// Valid lower bound on the subproblem, `-inf` at the root.
    pub lb: f64,
    pub warm: Option<WarmStart>,
    pub depth: usize,
    seq: u64,
}

impl PartialEq for BnbNode {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for BnbNode {}

impl Ord for BnbNode {
    // max-heap: the smallest lb, then the oldest node, pops first
    fn cmp(&self, o: &Self) -> Ordering {
        o.lb.total_cmp(&self.lb).then_with(|| o.seq.cmp(&self.seq))
    }
}

impl PartialOrd for BnbNode {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalTraceRow {
    pub t_sec: f64,
    pub glb: f64,
    pub gub: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub incumbent: Option<Assignment>,
    pub gub: f64,
    pub glb: f64,
    /// `is_exact(glb, gub)` at exit.
    pub exact: bool,
    pub timed_out: bool,
    pub trace: Vec<GlobalTraceRow>,
    pub nodes: usize,
    pub splits: usize,
    pub root_lb: f64,
    pub cuts: BTreeMap<ConstraintClass, usize>,
    pub wall_sec: f64,
}

/// Node with the least confident marginal: `argmin_p max_i y[p][i]` over
/// nodes with more than one allowed label, ties to the lowest index.
pub fn select_node(d: &Domain, y: &[Vec<f64>]) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for p in 0..d.num_nodes() {
        let allowed = d.allowed(p);
        if allowed.len() < 2 {
            continue;
        }
        let m = allowed
            .iter()
            .map(|&i| y.get(p).and_then(|r| r.get(i)).copied().unwrap_or(0.0))
            .fold(f64::NEG_INFINITY, f64::max);
        if best.is_none_or(|(b, _)| m < b) {
            best = Some((m, p));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::NoBranchableNode)
}

/// Splits the selected node's labels, ordered by descending `y` (ties to
/// the lower label), into the first `floor(k/2)` and the rest.
pub fn split(d: &Domain, y: &[Vec<f64>]) -> Result<(Domain, Domain)> {
    let phi = select_node(d, y)?;
    let yp = |i: usize| y.get(phi).and_then(|r| r.get(i)).copied().unwrap_or(0.0);
    let mut labels = d.allowed(phi).to_vec();
    labels.sort_by(|&a, &b| yp(b).total_cmp(&yp(a)).then(a.cmp(&b)));
    let k = labels.len() / 2;
    let (first, second) = labels.split_at(k);
    Ok((d.with_node(phi, first.to_vec())?, d.with_node(phi, second.to_vec())?))
}

pub fn solve(model: &GraphModel, cfg: &SolveConfig) -> Result<SolveResult> {
    solve_observed(model, cfg, &mut |_, _| {})
}

/// As [`solve`], calling `observer` with every bounded domain and its result.
pub fn solve_observed(
    model: &GraphModel,
    cfg: &SolveConfig,
    observer: &mut dyn FnMut(&Domain, &BoundResult),
) -> Result<SolveResult> {
    cfg.bound.validate()?;
    let start = Instant::now();
    let deadline = match cfg.budget_sec {
        Some(b) if b.is_finite() && b >= 0.0 => Some(start + Duration::from_secs_f64(b)),
        Some(b) if b < 0.0 || b.is_nan() => return Err(Error::Config(format!("budget {b} is not a valid time"))),
        _ => None,
    };
    let ctl = BoundControl { start, deadline };
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);

    let mut queue = BinaryHeap::new();
    let mut seq = 0;
    queue.push(BnbNode {
        domain: model.full_domain(),
        lb: f64::NEG_INFINITY,
        warm: None,
        depth: 0,
        seq,
    });
    let mut gub = f64::INFINITY;
    let mut glb = f64::NEG_INFINITY;
    let mut incumbent: Option<Assignment> = None;
    // smallest bound among subproblems closed by tolerance rather than by lb >= gub
    let mut floor = f64::INFINITY;
    let mut trace = vec![GlobalTraceRow {
        t_sec: 0.0,
        glb,
        gub,
    }];
    let mut nodes = 0;
    let mut splits = 0;
    let mut root_lb = f64::NEG_INFINITY;
    let mut cuts = BTreeMap::new();
    let mut timed_out = false;
    let bcfg = &cfg.bound;

    let closes = |lb: f64, gub: f64| lb >= gub || is_exact(lb, gub, bcfg);

    while let Some(node) = queue.pop() {
        if closes(node.lb, gub) {
            floor = floor.min(node.lb);
            continue;
        }
        if expired() || cfg.max_nodes.is_some_and(|m| nodes >= m) {
            timed_out = true;
            queue.push(node);
            break;
        }
        let res = bound_with(model, &node.domain, node.warm.as_ref(), gub, bcfg, &ctl)?;
        nodes += 1;
        observer(&node.domain, &res);
        for &(c, k) in &res.cuts_added {
            *cuts.entry(c).or_insert(0) += k;
        }
        let lb = node.lb.max(res.lb);
        if node.depth == 0 {
            root_lb = lb;
        }
        if res.ub < gub {
            gub = res.ub;
            incumbent = Some(res.x.clone());
        }
        debug!(
            "node {nodes} depth {} |D|={} lb={lb:.6} ub={:.6} gub={gub:.6} exit={:?}",
            node.depth,
            node.domain.size(),
            res.ub,
            res.exit_reason
        );

        if res.exit_reason == ExitReason::Interrupted {
            timed_out = true;
            queue.push(BnbNode { lb, ..node });
        } else if node.domain.size() <= 1.0 {
            // the only point of the domain has been evaluated
            floor = floor.min(res.ub.max(lb));
        } else if closes(lb, gub) {
            floor = floor.min(lb);
        } else {
            let (a, b) = split(&node.domain, &res.y)?;
            splits += 1;
            for child in [a, b] {
                seq += 1;
                queue.push(BnbNode {
                    domain: child,
                    lb,
                    warm: Some(res.final_warm_start.clone()),
                    depth: node.depth + 1,
                    seq,
                });
            }
        }

        // drop queued subproblems the new incumbent closes
        let mut kept = BinaryHeap::with_capacity(queue.len());
        for n in queue.drain() {
            if closes(n.lb, gub) {
                floor = floor.min(n.lb);
            } else {
                kept.push(n);
            }
        }
        queue = kept;

        let open = queue.iter().map(|n| n.lb).fold(f64::INFINITY, f64::min);
        glb = glb.max(open.min(floor)).min(gub);
        push_row(&mut trace, start.elapsed().as_secs_f64(), glb, gub);
        if timed_out {
            break;
        }
    }
    if !timed_out && queue.is_empty() {
        glb = glb.max(floor.min(gub)).min(gub);
        push_row(&mut trace, start.elapsed().as_secs_f64(), glb, gub);
    }
    let exact = is_exact(glb, gub, bcfg);
    info!("solve finished: nodes={nodes} splits={splits} glb={glb:.8} gub={gub:.8} exact={exact}");
    Ok(SolveResult {
        incumbent,
        gub,
        glb,
        exact,
        timed_out,
        trace,
        nodes,
        splits,
        root_lb,
        cuts,
        wall_sec: start.elapsed().as_secs_f64(),
    })
}

fn push_row(trace: &mut Vec<GlobalTraceRow>, t: f64, glb: f64, gub: f64) {
    let last = trace.last().copied();
    if let Some(l) = last {
        if l.glb == glb && l.gub == gub {
            return;
        }
    }
    let t = match last {
        Some(l) if t <= l.t_sec => l.t_sec + 1e-9,
        _ => t,
    };
    trace.push(GlobalTraceRow { t_sec: t, glb, gub });
}
