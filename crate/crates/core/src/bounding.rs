//! Bounding of one subproblem: dual ascent on the penalised SDP, cutting
//! planes with a growing penalty, and rounding for an upper bound.

use std::collections::VecDeque;
use std::time::Instant;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{
    base_constraints, domainfix_constraints, separate_all, BinaryProjection, ConstraintSet, CutCaps, FrameMap,
    SeparationConfig, EPS_CUT,
};
use crate::error::{Error, Result};
use crate::model::{Assignment, Domain, GraphModel};
use crate::sdp::{
    build_objective, initial_gamma, qn_maximize, recover_primal, Constraint, ConstraintClass, Control, DualState,
    OmegaIndex, PrimalPoint, QnConfig, QnExit, SparseSymMatrix,
};

/// How a subproblem's domain reaches the SDP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainMode {
    /// Solve the reduced model over the allowed labels.
    Restrict,
    /// Keep the full model and pin the domain with equalities.
    DomainFix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    /// `gamma0 = gamma0_scale * eta / max(1, ||A||_F)` of the unrestricted model.
    pub gamma0_scale: f64,
    /// Penalty multiplier per cutting-plane round.
    pub delta: f64,
    pub k_init: usize,
    pub k_inner: usize,
    pub k_outer: usize,
    pub lb_improve_tol: f64,
    pub exact_abs_tol: f64,
    pub exact_rel_tol: f64,
    pub ricm_flip_fraction: f64,
    pub ricm_repeats: usize,
    pub eps_cut: f64,
    pub cut_caps: CutCaps,
    pub hub_budget: usize,
    /// Negative `delta` allowed on an approximate primal before separation fails.
    pub delta_neg_tol: f64,
    pub qn_memory: usize,
    pub grad_tol: f64,
    pub warm_start: bool,
    pub domain_mode: DomainMode,
    pub seed: u64,
    /// Labels known to be optimal, applied before restriction.
    #[serde(default)]
    pub persistency: Option<Vec<Option<usize>>>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            gamma0_scale: 5.0,
            delta: 2.0,
            k_init: 500,
            k_inner: 200,
            k_outer: 10,
            lb_improve_tol: 1e-6,
            exact_abs_tol: 1e-5,
            exact_rel_tol: 1e-8,
            ricm_flip_fraction: 0.05,
            ricm_repeats: 10,
            eps_cut: EPS_CUT,
            cut_caps: CutCaps::default(),
            hub_budget: 5,
            delta_neg_tol: 0.25,
            qn_memory: 10,
            grad_tol: 1e-6,
            warm_start: true,
            domain_mode: DomainMode::Restrict,
            seed: 0,
            persistency: None,
        }
    }
}

impl BoundConfig {
    /// Base constraints only, no separation.
    pub fn without_cuts(mut self) -> Self {
        self.cut_caps = CutCaps::none();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.delta > 1.0) {
            return bad("delta must exceed 1");
        }
        if !(self.gamma0_scale > 0.0 && self.gamma0_scale.is_finite()) {
            return bad("gamma0 scale must be positive and finite");
        }
        let tols = [
            self.lb_improve_tol,
            self.exact_abs_tol,
            self.exact_rel_tol,
            self.eps_cut,
            self.grad_tol,
        ];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return bad("tolerances must be positive");
        }
        if !(0.0..=1.0).contains(&self.ricm_flip_fraction) {
            return bad("ricm flip fraction must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn separation(&self) -> SeparationConfig {
        SeparationConfig {
            eps: self.eps_cut,
            caps: self.cut_caps,
            hub_budget: self.hub_budget,
            neg_tol: self.delta_neg_tol,
        }
    }
}

/// Working set and multipliers handed from a parent to its children.
/// Constraints are in the frame of the unrestricted model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WarmStart {
    pub working_set: Vec<Constraint>,
    pub dual: Vec<f64>,
}

impl WarmStart {
    pub fn validate(&self) -> Result<()> {
        if self.working_set.len() != self.dual.len() {
            return Err(Error::Dimension(format!(
                "warm start has {} constraints and {} multipliers",
                self.working_set.len(),
                self.dual.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExitReason {
    /// The lower bound reached the incumbent.
    Pruned,
    Converged,
    IterationCap,
    Stalled,
    /// The deadline passed.
    Interrupted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t_sec: f64,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone)]
pub struct BoundResult {
    pub lb: f64,
    pub ub: f64,
    pub x: Assignment,
    /// Singleton pseudo-marginals of the full model; excluded labels are 0.
    pub y: Vec<Vec<f64>>,
    pub final_warm_start: WarmStart,
    pub trace: Vec<TraceRow>,
    pub exit_reason: ExitReason,
    pub iterations: usize,
    pub rounds: usize,
    pub gamma: f64,
    /// Cuts added over the call, per class.
    pub cuts_added: Vec<(ConstraintClass, usize)>,
}

/// Clock and deadline shared by the bound calls of one solve.
#[derive(Debug, Clone, Copy)]
pub struct BoundControl {
    pub start: Instant,
    pub deadline: Option<Instant>,
}

impl Default for BoundControl {
    fn default() -> Self {
        BoundControl {
            start: Instant::now(),
            deadline: None,
        }
    }
}

impl BoundControl {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Gap closed within the absolute or relative tolerance.
pub fn is_exact(lb: f64, ub: f64, cfg: &BoundConfig) -> bool {
    if !ub.is_finite() || !lb.is_finite() {
        return false;
    }
    let gap = ub - lb;
    gap < cfg.exact_abs_tol || gap / ub.abs().max(1.0) < cfg.exact_rel_tol
}

/// Per-node argmax, ties to the lowest label.
pub fn round_simple(y: &[Vec<f64>]) -> Assignment {
    Assignment(
        y.iter()
            .map(|row| {
                let mut best = 0;
                for (i, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = i;
                    }
                }
                best
            })
            .collect(),
    )
}

/// Greedy single-node descent until no move improves by more than 1e-12.
pub fn icm(model: &GraphModel, x: &mut [usize]) {
    loop {
        let mut changed = false;
        for p in 0..model.num_nodes() {
            let cur = model.local_energy(x, p, x[p]);
            let mut best = (cur, x[p]);
            for i in 0..model.num_labels(p) {
                let e = model.local_energy(x, p, i);
                if e < best.0 - 1e-12 {
                    best = (e, i);
                }
            }
            if best.1 != x[p] {
                x[p] = best.1;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

/// ICM from `x0`, then `repeats` restarts from `x0` with a random
/// `flip_fraction` of the nodes re-drawn from `y`; the best result wins.
pub fn ricm(
    model: &GraphModel,
    x0: &Assignment,
    y: &[Vec<f64>],
    repeats: usize,
    flip_fraction: f64,
    seed: u64,
) -> Result<Assignment> {
    model.validate(x0)?;
    let n = model.num_nodes();
    let mut best = x0.0.clone();
    icm(model, &mut best);
    let mut best_e = model.energy_unchecked(&best);
    if n == 0 {
        return Ok(Assignment(best));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = ((flip_fraction * n as f64).round() as usize).clamp(1, n);
    for _ in 0..repeats {
        let mut x = x0.0.clone();
        for p in rand::seq::index::sample(&mut rng, n, k) {
            x[p] = sample_label(&mut rng, y.get(p).map(Vec::as_slice), model.num_labels(p));
        }
        icm(model, &mut x);
        let e = model.energy_unchecked(&x);
        if e < best_e {
            best_e = e;
            best = x;
        }
    }
    Ok(Assignment(best))
}

fn sample_label(rng: &mut impl Rng, y: Option<&[f64]>, h: usize) -> usize {
    let weights: Vec<f64> = match y {
        Some(w) if w.len() == h => w.iter().map(|v| v.max(0.0)).collect(),
        _ => vec![0.0; h],
    };
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return rng.random_range(0..h);
    }
    let mut t = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if t < *w {
            return i;
        }
        t -= w;
    }
    h - 1
}

/// Relative improvement of the last `window` accepted values.
struct Plateau {
    window: usize,
    tol: f64,
    values: VecDeque<f64>,
}

impl Plateau {
    fn new(window: usize, tol: f64) -> Self {
        Plateau {
            window,
            tol,
            values: VecDeque::with_capacity(window + 1),
        }
    }

    fn push(&mut self, v: f64) -> bool {
        self.values.push_back(v);
        if self.values.len() > self.window + 1 {
            self.values.pop_front();
        }
        if self.values.len() <= self.window {
            return false;
        }
        let first = self.values[0];
        (v - first) / v.abs().max(1.0) < self.tol
    }
}

/// Everything one bound call keeps between phases.
struct Run<'a> {
    model: &'a GraphModel,
    cfg: &'a BoundConfig,
    ctl: &'a BoundControl,
    gub: f64,
    reduced: GraphModel,
    offset: f64,
    frame: FrameMap,
    lift: crate::model::IndexMap,
    objective: SparseSymMatrix,
    /// Full-frame constraints and their images in the reduced frame.
    full: ConstraintSet,
    mapped: Vec<Constraint>,
    state: DualState,
    lb: f64,
    ub: f64,
    x: Option<Assignment>,
    last_primal: Option<PrimalPoint>,
    trace: Vec<TraceRow>,
    iterations: usize,
    projection: Option<BinaryProjection>,
    cuts_added: Vec<(ConstraintClass, usize)>,
}

enum Phase {
    /// Used the full iteration allowance.
    Done,
    /// Converged or stopped improving.
    Settled,
    Pruned,
    Interrupted,
    Stalled,
}

impl Run<'_> {
    fn dim(&self) -> usize {
        self.frame.reduced.dim()
    }

    fn record(&mut self) {
        self.trace.push(TraceRow {
            t_sec: self.ctl.elapsed(),
            lb: self.lb,
            ub: self.ub,
        });
    }

    /// Ascent for at most `iters` steps; `Phase::Done` on a normal finish.
    fn ascend(&mut self, iters: usize, plateau: &mut Plateau) -> Result<Phase> {
        if iters == 0 {
            return Ok(Phase::Done);
        }
        let qcfg = QnConfig {
            max_iters: iters,
            grad_tol: self.cfg.grad_tol,
            ..QnConfig::default()
        };
        let (offset, gub, ctl) = (self.offset, self.gub, self.ctl);
        let mut lb = self.lb;
        let ub = self.ub;
        let mut rows = Vec::new();
        let mut why = Phase::Done;
        let report = qn_maximize(
            &mut self.state,
            &self.objective,
            &self.mapped,
            self.frame.reduced.dim(),
            &qcfg,
            |_, v| {
                lb = lb.max(offset + v);
                rows.push(TraceRow {
                    t_sec: ctl.elapsed(),
                    lb,
                    ub,
                });
                if lb >= gub {
                    why = Phase::Pruned;
                    return Control::Stop;
                }
                if ctl.expired() {
                    why = Phase::Interrupted;
                    return Control::Stop;
                }
                if plateau.push(offset + v) {
                    why = Phase::Settled;
                    return Control::Stop;
                }
                Control::Continue
            },
        )?;
        self.iterations += report.iterations;
        self.lb = lb.max(offset + report.value);
        self.trace.extend(rows);
        match report.exit {
            QnExit::Stalled => why = Phase::Stalled,
            QnExit::Converged => why = Phase::Settled,
            _ => {}
        }
        Ok(why)
    }

    fn primal(&mut self) -> Result<PrimalPoint> {
        let idx = self.frame.reduced.clone();
        let p = recover_primal(&mut self.state, &self.objective, &self.mapped, &idx)?;
        self.last_primal = Some(p.clone());
        Ok(p)
    }

    /// Simple rounding plus local search; keeps the best upper bound.
    fn round(&mut self) -> Result<()> {
        let primal = self.primal()?;
        let y = primal.marginals();
        let x0 = round_simple(&y);
        let xr = ricm(
            &self.reduced,
            &x0,
            &y,
            self.cfg.ricm_repeats,
            self.cfg.ricm_flip_fraction,
            self.cfg.seed,
        )?;
        let full_x = self.lift_assignment(&xr);
        let e = self.model.energy(&full_x)?;
        if e < self.ub {
            self.ub = e;
            self.x = Some(full_x);
        }
        self.record();
        Ok(())
    }

    fn lift_assignment(&self, xr: &Assignment) -> Assignment {
        match self.cfg.domain_mode {
            DomainMode::Restrict => self.lift.lift(&xr.0),
            DomainMode::DomainFix => xr.clone(),
        }
    }

    fn exact(&self) -> bool {
        is_exact(self.lb, self.ub, self.cfg)
    }

    /// One cutting-plane round: drop inactive cuts, add violated ones.
    /// Returns the number added.
    fn update_working_set(&mut self) -> Result<usize> {
        let primal = match &self.last_primal {
            Some(p) => p.clone(),
            None => self.primal()?,
        };
        let eps = self.cfg.eps_cut;
        let u = self.state.u.clone();
        let mut keep = vec![true; self.mapped.len()];
        for (i, c) in self.mapped.iter().enumerate() {
            if c.class.is_cut() && u[i] == 0.0 && c.violation(&primal.omega) <= eps {
                keep[i] = false;
            }
        }
        let mut new_u = Vec::with_capacity(u.len());
        let mut new_mapped = Vec::with_capacity(self.mapped.len());
        for (i, c) in self.mapped.drain(..).enumerate() {
            if keep[i] {
                new_u.push(u[i]);
                new_mapped.push(c);
            }
        }
        self.full.retain_indexed(|i, _| keep[i]);

        let mut added = 0;
        if !self.cfg.cut_caps.is_empty() {
            let full_primal = self.frame.lift_primal(&primal);
            let proj = self
                .projection
                .get_or_insert_with(|| BinaryProjection::singleton(self.model));
            let t = Instant::now();
            let found = match separate_all(&full_primal, self.model, proj, &self.cfg.separation(), &self.full) {
                Err(Error::InconsistentPrimal(msg)) => {
                    debug!("skipping separation this round: {msg}");
                    Vec::new()
                }
                r => r?,
            };
            debug!("separation found {} candidates in {:.3}s", found.len(), t.elapsed().as_secs_f64());
            for v in found {
                let Some(m) = self.frame.map_constraint(&v.constraint) else {
                    continue;
                };
                if self.full.push(v.constraint) {
                    added += 1;
                    bump(&mut self.cuts_added, m.class);
                    new_mapped.push(m);
                    new_u.push(0.0);
                }
            }
        }
        self.mapped = new_mapped;
        self.state.u = new_u;
        self.state.memory.clear();
        self.state.invalidate();
        Ok(added)
    }

    fn finish(mut self, exit_reason: ExitReason, rounds: usize) -> Result<BoundResult> {
        if self.x.is_none() {
            self.round()?;
        }
        let y = match &self.last_primal {
            Some(p) => self.frame.lift_marginals(p),
            None => Vec::new(),
        };
        let (lb, ub) = (self.lb, self.ub);
        let final_warm_start = WarmStart {
            working_set: self.full.as_slice().to_vec(),
            dual: self.state.u.clone(),
        };
        Ok(BoundResult {
            lb,
            ub,
            x: self.x.expect("rounded"),
            y,
            final_warm_start,
            trace: self.trace,
            exit_reason,
            iterations: self.iterations,
            rounds,
            gamma: self.state.gamma,
            cuts_added: self.cuts_added,
        })
    }
}

fn bump(counts: &mut Vec<(ConstraintClass, usize)>, class: ConstraintClass) {
    match counts.iter_mut().find(|(c, _)| *c == class) {
        Some((_, n)) => *n += 1,
        None => counts.push((class, 1)),
    }
}

/// Bounds `min_{x in d} E(x)` with default control.
pub fn bound(
    model: &GraphModel,
    d: &Domain,
    warm: Option<&WarmStart>,
    gub: f64,
    cfg: &BoundConfig,
) -> Result<BoundResult> {
    bound_with(model, d, warm, gub, cfg, &BoundControl::default())
}

fn apply_persistency(d: &Domain, mask: &[Option<usize>]) -> Result<Domain> {
    let mut out = d.clone();
    for (p, m) in mask.iter().enumerate().take(d.num_nodes()) {
        if let Some(l) = *m {
            if d.is_allowed(p, l) {
                out = out.with_node(p, vec![l])?;
            }
        }
    }
    Ok(out)
}

pub fn bound_with(
    model: &GraphModel,
    d: &Domain,
    warm: Option<&WarmStart>,
    gub: f64,
    cfg: &BoundConfig,
    ctl: &BoundControl,
) -> Result<BoundResult> {
    cfg.validate()?;
    d.validate(model).map_err(|e| Error::InvalidSubproblem(e.to_string()))?;
    let d = match &cfg.persistency {
        Some(mask) => apply_persistency(d, mask)?,
        None => d.clone(),
    };

    let full_objective = build_objective(model);
    let full_idx = OmegaIndex::new(model.labels());
    let gamma0 = initial_gamma(&full_objective, full_idx.eta(), cfg.gamma0_scale);

    let (reduced, offset, lift, frame) = match cfg.domain_mode {
        DomainMode::Restrict => {
            let r = model.restrict(&d)?;
            let frame = FrameMap::new(model, &r.map, r.model.labels());
            (r.model, r.offset, r.map, frame)
        }
        DomainMode::DomainFix => {
            let r = model.restrict(&model.full_domain())?;
            (model.clone(), 0.0, r.map, FrameMap::identity(model))
        }
    };

    // working set in the full frame: warm start first, then any missing base rows
    let mut full = ConstraintSet::new();
    let mut init_u = Vec::new();
    if let Some(w) = warm.filter(|_| cfg.warm_start) {
        w.validate()?;
        for (c, &u) in w.working_set.iter().zip(&w.dual) {
            if c.class == ConstraintClass::DomainFix {
                continue;
            }
            if full.push(c.clone()) {
                init_u.push(if c.is_inequality() { u.max(0.0) } else { u });
            }
        }
    }
    for c in base_constraints(model) {
        if full.push(c) {
            init_u.push(0.0);
        }
    }
    if cfg.domain_mode == DomainMode::DomainFix {
        for c in domainfix_constraints(&d, &full_idx) {
            if full.push(c) {
                init_u.push(0.0);
            }
        }
    }
    let mut mapped = Vec::with_capacity(full.len());
    let mut u = Vec::with_capacity(full.len());
    let mut keep = vec![false; full.len()];
    for (i, c) in full.iter().enumerate() {
        if let Some(m) = frame.map_constraint(c) {
            mapped.push(m);
            u.push(init_u[i]);
            keep[i] = true;
        }
    }
    full.retain_indexed(|i, _| keep[i]);

    let objective = build_objective(&reduced);
    let eta = frame.reduced.eta();
    let mut run = Run {
        model,
        cfg,
        ctl,
        gub,
        offset,
        frame,
        lift,
        objective,
        full,
        mapped,
        state: DualState::with_memory(u, gamma0, eta, cfg.qn_memory),
        lb: f64::NEG_INFINITY,
        ub: f64::INFINITY,
        x: None,
        last_primal: None,
        trace: Vec::new(),
        iterations: 0,
        projection: None,
        cuts_added: Vec::new(),
        reduced,
    };

    if run.reduced.num_nodes() == 0 {
        let x = run.lift.lift(&[]);
        let e = model.energy(&x)?;
        run.lb = e;
        run.ub = e;
        run.x = Some(x.clone());
        run.record();
        return Ok(BoundResult {
            lb: e,
            ub: e,
            y: (0..model.num_nodes())
                .map(|p| (0..model.num_labels(p)).map(|i| (x.0[p] == i) as u8 as f64).collect())
                .collect(),
            x,
            final_warm_start: WarmStart::default(),
            trace: run.trace,
            exit_reason: if e >= gub { ExitReason::Pruned } else { ExitReason::Converged },
            iterations: 0,
            rounds: 0,
            gamma: gamma0,
            cuts_added: Vec::new(),
        });
    }

    // value at the starting point is already a valid bound
    let dim = run.dim();
    run.state.project_feasible(&run.mapped);
    let v0 = run.state.evaluate(&run.objective, &run.mapped, dim)?.value;
    run.lb = offset + v0;
    run.record();
    if run.lb >= gub {
        return run.finish(ExitReason::Pruned, 0);
    }

    // initial pass with intermediate roundings
    let mut marks: Vec<usize> = [50, 100, cfg.k_init].into_iter().filter(|&k| k <= cfg.k_init).collect();
    marks.dedup();
    let mut plateau = Plateau::new(10, cfg.lb_improve_tol);
    let mut done = 0;
    for &mark in &marks {
        let phase = run.ascend(mark - done, &mut plateau)?;
        done = mark;
        match phase {
            Phase::Pruned => return run.finish(ExitReason::Pruned, 0),
            Phase::Interrupted => return run.finish(ExitReason::Interrupted, 0),
            _ => {}
        }
        run.round()?;
        if run.lb >= gub {
            return run.finish(ExitReason::Pruned, 0);
        }
        if run.exact() {
            return run.finish(ExitReason::Converged, 0);
        }
        if matches!(phase, Phase::Stalled | Phase::Settled) {
            break;
        }
    }
    if marks.is_empty() {
        run.round()?;
    }

    // cutting-plane rounds
    let mut rounds = 0;
    let mut exit = ExitReason::IterationCap;
    for _ in 0..cfg.k_outer {
        if ctl.expired() {
            exit = ExitReason::Interrupted;
            break;
        }
        let lb_before = run.lb;
        let added = run.update_working_set()?;
        run.state.gamma *= cfg.delta;
        let mut plateau = Plateau::new(10, cfg.lb_improve_tol);
        let phase = run.ascend(cfg.k_inner, &mut plateau)?;
        rounds += 1;
        match phase {
            Phase::Pruned => return run.finish(ExitReason::Pruned, rounds),
            Phase::Interrupted => return run.finish(ExitReason::Interrupted, rounds),
            _ => {}
        }
        run.round()?;
        if run.lb >= gub {
            return run.finish(ExitReason::Pruned, rounds);
        }
        if run.exact() {
            return run.finish(ExitReason::Converged, rounds);
        }
        if matches!(phase, Phase::Stalled) {
            exit = ExitReason::Stalled;
            break;
        }
        let gain = (run.lb - lb_before) / run.lb.abs().max(1.0);
        if added == 0 && gain < cfg.lb_improve_tol {
            exit = ExitReason::Converged;
            break;
        }
    }
    run.finish(exit, rounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::t3;

    #[test]
    fn exactness_thresholds() {
        let c = BoundConfig::default();
        assert!(is_exact(1.0, 1.0, &c));
        assert!(!is_exact(0.0, 0.001, &c));
        assert!(is_exact(-504.09, -504.09 + 5e-6, &c));
        assert!(!is_exact(0.0, f64::INFINITY, &c));
    }

    #[test]
    fn simple_rounding() {
        assert_eq!(round_simple(&[vec![0.9, 0.1], vec![0.2, 0.8]]).0, vec![0, 1]);
        assert_eq!(round_simple(&[vec![0.5, 0.5]]).0, vec![0]);
        assert_eq!(round_simple(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]).0, vec![2, 0]);
    }

    #[test]
    fn ricm_keeps_local_optimum() {
        let m = t3();
        let x0 = Assignment(vec![0, 1, 0]);
        let y = vec![vec![0.5, 0.5]; 3];
        assert_eq!(ricm(&m, &x0, &y, 0, 0.05, 1).unwrap(), x0);
    }

    #[test]
    fn ricm_on_zero_model() {
        let m = GraphModel::uniform(4, 3).unwrap();
        let x0 = Assignment(vec![2, 1, 0, 1]);
        let y = vec![vec![1.0, 0.0, 0.0]; 4];
        let x = ricm(&m, &x0, &y, 10, 0.05, 7).unwrap();
        assert_eq!(m.energy(&x).unwrap(), 0.0);
    }

    #[test]
    fn ricm_never_worse() {
        let m = crate::model::gen_synthetic(&crate::model::SyntheticConfig {
            n: 8,
            h: 3,
            kappa: 7.0,
            omega: 0.2,
            seed: 3,
        })
        .unwrap();
        let y = vec![vec![1.0 / 3.0; 3]; 8];
        for s in 0..10 {
            let x0 = Assignment((0..8).map(|p| (p + s) % 3).collect());
            let x = ricm(&m, &x0, &y, 5, 0.25, s as u64).unwrap();
            assert!(m.energy(&x).unwrap() <= m.energy(&x0).unwrap());
        }
    }

    #[test]
    fn plateau_window() {
        let mut p = Plateau::new(3, 1e-6);
        assert!(!p.push(1.0));
        assert!(!p.push(2.0));
        assert!(!p.push(3.0));
        assert!(!p.push(4.0));
        assert!(!p.push(4.0));
        assert!(!p.push(4.0));
        assert!(p.push(4.0));
    }

    #[test]
    fn singleton_domain_is_exact() {
        let m = t3();
        let d = Domain::singleton(&Assignment(vec![0, 1, 0]));
        let r = bound(&m, &d, None, f64::INFINITY, &BoundConfig::default()).unwrap();
        assert!((r.lb - 1.0).abs() < 1e-6);
        assert!((r.ub - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_model_bound() {
        // every feasible moment matrix has ||X||_F <= trace = eta, so the
        // penalized optimum lies in [-eta^2 / (2 gamma), 0]
        let m = GraphModel::uniform(3, 2).unwrap();
        let r = bound(&m, &m.full_domain(), None, f64::INFINITY, &BoundConfig::default()).unwrap();
        assert!(r.lb <= 1e-9, "{}", r.lb);
        assert!(r.lb >= -16.0 / (2.0 * r.gamma) - 1e-6, "{} {}", r.lb, r.gamma);
        assert_eq!(r.ub, 0.0);
    }

    #[test]
    fn neg_infinity_gub_prunes_immediately() {
        let m = t3();
        let r = bound(&m, &m.full_domain(), None, f64::NEG_INFINITY, &BoundConfig::default()).unwrap();
        assert_eq!(r.exit_reason, ExitReason::Pruned);
        assert!(r.iterations <= 5);
    }

    #[test]
    fn t3_root_bound_is_valid_and_tight() {
        let m = t3();
        let r = bound(&m, &m.full_domain(), None, f64::INFINITY, &BoundConfig::default()).unwrap();
        assert!(r.lb <= 1.0 + 1e-6);
        assert!((r.ub - 1.0).abs() < 1e-12);
        for row in &r.trace {
            assert!(row.lb <= 1.0 + 1e-6);
        }
        assert_eq!(r.y.len(), 3);
    }

    #[test]
    fn empty_domain_rejected() {
        let m = t3();
        let d = Domain::new(vec![vec![0], vec![0]]).unwrap();
        assert!(matches!(
            bound(&m, &d, None, f64::INFINITY, &BoundConfig::default()),
            Err(Error::InvalidSubproblem(_))
        ));
    }
}
