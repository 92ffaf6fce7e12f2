//! Verification suites: each check compares the solver against an
//! independent oracle on seeded random instances.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bnb::{solve_observed, SolveConfig};
use crate::bounding::{bound, bound_with, BoundConfig, BoundControl};
use crate::constraints::linear::{all_edge_marg, all_nonneg};
use crate::constraints::triangle::triangles;
use crate::constraints::{
    base_constraints, cut_to_constraint, odd_wheel_cuts, separate_all, separate_cycle, BinaryProjection,
    ConstraintSet, CutCaps, CutDescriptor, DeltaView, SeparationConfig, EPS_CUT,
};
use crate::error::{Error, Result};
use crate::model::{gen_synthetic, Assignment, Domain, GraphModel, SyntheticConfig};
use crate::oracle::{brute_force_cycle, brute_force_odd_wheel, exhaustive_map, fd_gradient_check, rank_and_norm};
use crate::sdp::{build_objective, Constraint, OmegaIndex, PrimalPoint, SymMatrix};

/// Central-difference step for the gradient check. Dual values reach 1e5 on
/// these instances, so cancellation dominates below this step.
pub const FD_STEP: f64 = 1e-3;

/// Slack allowed between an emitted lower bound and the true optimum.
pub const LB_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        CheckReport { id, name, passed, detail }
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "check {:>2} [{verdict}] {}: {}", self.id, self.name, self.detail)
    }
}

/// Lower bounds checked against the optimum of the domain they bound.
#[derive(Debug, Clone, Default)]
pub struct LbAudit {
    pub checked: usize,
    /// Largest `lb - optimum` seen.
    pub worst_excess: f64,
    pub failures: Vec<String>,
}

impl LbAudit {
    fn record(&mut self, lb: f64, optimum: f64, ctx: impl FnOnce() -> String) {
        self.checked += 1;
        let excess = lb - optimum;
        if self.checked == 1 || excess > self.worst_excess {
            self.worst_excess = excess;
        }
        if excess > LB_SLACK {
            self.failures.push(format!("{}: lb {lb:.9} > optimum {optimum:.9}", ctx()));
        }
    }

    fn merge(&mut self, other: LbAudit) {
        if other.checked == 0 {
            return;
        }
        if self.checked == 0 || other.worst_excess > self.worst_excess {
            self.worst_excess = other.worst_excess;
        }
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

/// The suites exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Exactness,
    Gradients,
    Separation,
    Propositions,
}

pub fn run_suite(suite: Suite) -> Result<Vec<CheckReport>> {
    Ok(match suite {
        Suite::Exactness => {
            let mut audit = LbAudit::default();
            let c1 = exactness_vs_brute_force(&mut audit)?;
            let c10 = binary_submodular_grids()?;
            vec![c1, lb_validity(audit), c10]
        }
        Suite::Gradients => vec![gradient_oracle()?],
        Suite::Separation => vec![separation_oracle()?, cut_validity()?],
        Suite::Propositions => {
            let mut audit = LbAudit::default();
            let c2 = singleton_domains_exact(&mut audit)?;
            let c3 = nested_domains_monotone(&mut audit)?;
            vec![c2, c3, lb_validity(audit), rank_one_norm()?]
        }
    })
}

/// Dense instance `k` of the shipped 50-instance exactness set.
pub fn exactness_instance(k: u64) -> Result<GraphModel> {
    let n = 4 + (k % 5) as usize;
    let h = 2 + (k % 2) as usize;
    let omega = [0.1, 0.25, 0.4][(k % 3) as usize];
    gen_synthetic(&SyntheticConfig {
        n,
        h,
        kappa: (n - 1) as f64,
        omega,
        seed: k,
    })
}

/// Solves the exactness set and compares with enumeration, feeding every
/// emitted lower bound into `audit`.
pub fn exactness_vs_brute_force(audit: &mut LbAudit) -> Result<CheckReport> {
    let runs: Vec<Result<(bool, bool, f64, LbAudit)>> = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let m = exactness_instance(k)?;
            let oracle = exhaustive_map(&m, &m.full_domain())?;
            let mut local = LbAudit::default();
            let mut err = None;
            let r = solve_observed(&m, &SolveConfig::default(), &mut |d, res| {
                match exhaustive_map(&m, d) {
                    Ok(o) => {
                        for row in &res.trace {
                            local.record(row.lb, o.optimum, || format!("instance {k}, |D| = {}", d.size()));
                        }
                        local.record(res.lb, o.optimum, || format!("instance {k}, |D| = {}", d.size()));
                    }
                    Err(e) => err = Some(e),
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            for row in &r.trace {
                local.record(row.glb, oracle.optimum, || format!("instance {k} glb trace"));
            }
            let matched = (r.gub - oracle.optimum).abs() <= 1e-9;
            Ok((matched, r.exact, r.gub - oracle.optimum, local))
        })
        .collect();
    let (mut matched, mut exact) = (0, 0);
    let mut worst: f64 = 0.0;
    for run in runs {
        let (m, e, diff, local) = run?;
        matched += m as usize;
        exact += e as usize;
        worst = worst.max(diff.abs());
        audit.merge(local);
    }
    let passed = matched == 50 && exact >= 48;
    Ok(CheckReport::new(
        1,
        "exactness vs brute force",
        passed,
        format!("{matched}/50 optimal energies (max |diff| {worst:.1e}), {exact}/50 certified"),
    ))
}

/// Summarizes the lower bounds collected by the other checks.
pub fn lb_validity(audit: LbAudit) -> CheckReport {
    let passed = audit.failures.is_empty() && audit.checked > 0;
    let mut detail = format!(
        "{} lower bounds checked, max lb - optimum = {:.2e}",
        audit.checked, audit.worst_excess
    );
    if let Some(f) = audit.failures.first() {
        detail.push_str(&format!("; {} violations, first: {f}", audit.failures.len()));
    }
    CheckReport::new(4, "lower-bound validity", passed, detail)
}

fn random_assignment(m: &GraphModel, rng: &mut ChaCha8Rng) -> Assignment {
    Assignment(m.labels().iter().map(|&h| rng.random_range(0..h)).collect())
}

/// Bounds over single-assignment domains are exact.
pub fn singleton_domains_exact(audit: &mut LbAudit) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = BoundConfig::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in 0..5u64 {
        let m = gen_synthetic(&SyntheticConfig {
            n: 6,
            h: 3,
            kappa: 3.0,
            omega: 0.25,
            seed: 200 + k,
        })?;
        for _ in 0..4 {
            let x = random_assignment(&m, &mut rng);
            let e = m.energy(&x)?;
            let r = bound(&m, &Domain::singleton(&x), None, f64::INFINITY, &cfg)?;
            for row in &r.trace {
                audit.record(row.lb, e, || format!("singleton domain {:?}", x.0));
            }
            audit.record(r.lb, e, || format!("singleton domain {:?}", x.0));
            worst = worst.max((r.lb - e).abs());
            count += 1;
        }
    }
    Ok(CheckReport::new(
        2,
        "singleton domains are exact",
        worst <= 1e-6,
        format!("{count} domains, max |lb - E(x)| = {worst:.2e}"),
    ))
}

fn random_nested(m: &GraphModel, rng: &mut ChaCha8Rng) -> Result<(Domain, Domain)> {
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for &h in m.labels() {
        let mut l: Vec<usize> = (0..h).filter(|_| rng.random_bool(0.8)).collect();
        if l.is_empty() {
            l.push(rng.random_range(0..h));
        }
        let mut s: Vec<usize> = l.iter().copied().filter(|_| rng.random_bool(0.7)).collect();
        if s.is_empty() {
            s.push(l[rng.random_range(0..l.len())]);
        }
        outer.push(l);
        inner.push(s);
    }
    Ok((Domain::new(inner)?, Domain::new(outer)?))
}

/// Shrinking the domain never lowers the converged bound.
pub fn nested_domains_monotone(audit: &mut LbAudit) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = BoundConfig::default();
    let mut worst = f64::INFINITY;
    let mut bad = 0;
    for k in 0..20u64 {
        let m = gen_synthetic(&SyntheticConfig {
            n: 5,
            h: 3,
            kappa: 4.0,
            omega: 0.25,
            seed: 300 + k % 5,
        })?;
        let (d1, d2) = random_nested(&m, &mut rng)?;
        let r1 = bound(&m, &d1, None, f64::INFINITY, &cfg)?;
        let r2 = bound(&m, &d2, None, f64::INFINITY, &cfg)?;
        for (d, r) in [(&d1, &r1), (&d2, &r2)] {
            let opt = exhaustive_map(&m, d)?.optimum;
            for row in &r.trace {
                audit.record(row.lb, opt, || format!("nested pair {k}"));
            }
            audit.record(r.lb, opt, || format!("nested pair {k}"));
        }
        let margin = r1.lb - r2.lb;
        worst = worst.min(margin);
        if margin < -1e-6 {
            bad += 1;
        }
    }
    Ok(CheckReport::new(
        3,
        "nested domains tighten the bound",
        bad == 0,
        format!("20 pairs, {bad} violations, min lb(D1) - lb(D2) = {worst:.2e}"),
    ))
}

/// Constraints whose gradients the finite-difference check exercises:
/// base rows, both linear families and every triangle.
fn gradient_constraints(m: &GraphModel, idx: &OmegaIndex) -> Result<Vec<Constraint>> {
    let mut cons = base_constraints(m);
    cons.extend(all_nonneg(m, idx));
    cons.extend(all_edge_marg(m, idx));
    let proj = BinaryProjection::singleton(m);
    for t in triangles(&proj) {
        cons.push(cut_to_constraint(&CutDescriptor::triangle(t, 0), &proj, idx)?);
    }
    Ok(cons)
}

/// Dual gradient against central differences on random dual points.
pub fn gradient_oracle() -> Result<CheckReport> {
    let errors: Vec<Result<f64>> = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + k);
            let h = rng.random_range(2..=4usize);
            let n = rng.random_range(2..=(29 / h).min(6));
            let m = gen_synthetic(&SyntheticConfig {
                n,
                h,
                kappa: rng.random_range(0.0..=(n - 1) as f64),
                omega: 0.5,
                seed: k,
            })?;
            let idx = OmegaIndex::new(m.labels());
            let cons = gradient_constraints(&m, &idx)?;
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let u: Vec<f64> = cons
                .iter()
                .map(|c| {
                    let z: f64 = normal.sample(&mut rng);
                    if c.is_inequality() {
                        z.abs()
                    } else {
                        z
                    }
                })
                .collect();
            let gamma = rng.random_range(0.5..20.0);
            fd_gradient_check(&build_objective(&m), &cons, idx.dim(), &u, gamma, idx.eta(), FD_STEP)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for e in errors {
        worst = worst.max(e?);
    }
    Ok(CheckReport::new(
        5,
        "dual gradient vs finite differences",
        worst <= 1e-5,
        format!("100 triples, max relative error {worst:.2e}"),
    ))
}

/// Trace-eta PSD matrices have Frobenius norm eta exactly when rank one.
pub fn rank_one_norm() -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut bad = Vec::new();
    for k in 0..100 {
        let dim = rng.random_range(3..=25usize);
        let eta = rng.random_range(2.0..12.0);
        let rank = if k % 2 == 0 { 1 } else { rng.random_range(2..=dim.min(5)) };
        let mut x = SymMatrix::zeros(dim);
        for _ in 0..rank {
            let v: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
            x.add_scaled(&SymMatrix::outer(&v), rng.random_range(0.2..1.0));
        }
        x.scale(eta / x.trace());
        let (r, norm) = rank_and_norm(&x)?;
        let ok = if rank == 1 {
            r == 1 && (norm - eta).abs() <= 1e-9
        } else {
            r >= 2 && norm <= eta - 1e-9
        };
        if !ok {
            bad.push(format!("case {k}: rank {rank} (numerical {r}), ||X|| = {norm}, eta = {eta}"));
        }
    }
    let detail = match bad.first() {
        None => "100 matrices (50 rank one), all consistent".to_string(),
        Some(b) => format!("{} failures, first: {b}", bad.len()),
    };
    Ok(CheckReport::new(6, "rank-one norm characterization", bad.is_empty(), detail))
}

/// Random PSD moment matrix with non-negative entries, scaled so every
/// projected `delta` lies in `[0, 1]`.
pub fn random_nonneg_primal(m: &GraphModel, proj: &BinaryProjection, rng: &mut ChaCha8Rng) -> PrimalPoint {
    let idx = OmegaIndex::new(m.labels());
    let dim = idx.dim();
    let mut om = SymMatrix::zeros(dim);
    for _ in 0..rng.random_range(1..=4) {
        let g: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        om.add_scaled(&SymMatrix::outer(&g), rng.random_range(0.1..1.0));
    }
    let pp = PrimalPoint { omega: om, index: idx };
    let top = proj.raw_deltas(&pp).into_iter().fold(0.0, f64::max);
    let mut omega = pp.omega;
    if top > 0.0 {
        omega.scale(rng.random_range(0.5..1.0) / top);
    }
    PrimalPoint { omega, index: pp.index }
}

/// Random pairwise model whose singleton projection has at most `max_binary` nodes.
fn small_binary_model(max_binary: usize, rng: &mut ChaCha8Rng) -> Result<GraphModel> {
    let h = rng.random_range(2..=(max_binary / 3).clamp(2, 3));
    let n = rng.random_range(3..=(max_binary / h).max(3));
    let mut m = GraphModel::uniform(n, h)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
    let k = rng.random_range(n.min(pairs.len())..=pairs.len());
    let mut picked = sample(rng, pairs.len(), k).into_vec();
    picked.sort_unstable();
    for i in picked {
        let (p, q) = pairs[i];
        m.add_edge(p, q, vec![0.0; h * h])?;
    }
    Ok(m)
}

/// Cycle and odd-wheel separation against exhaustive search.
pub fn separation_oracle() -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut issues = Vec::new();
    let mut nonempty = 0;
    for k in 0..30 {
        let m = small_binary_model(10, &mut rng)?;
        let proj = BinaryProjection::singleton(&m);
        let pp = random_nonneg_primal(&m, &proj, &mut rng);
        let found = separate_cycle(&pp, &proj, EPS_CUT)?;
        let delta = proj.deltas(&pp)?;
        let best = brute_force_cycle(proj.num_nodes(), proj.edges(), &delta).map(|b| b.0);
        match (found.first(), best) {
            (Some(v), Some(b)) if (v.amount - b).abs() <= 1e-9 => nonempty += 1,
            (None, b) if b.is_none_or(|b| b <= EPS_CUT) => {}
            (f, b) => issues.push(format!("cycle case {k}: separator {:?} vs oracle {b:?}", f.map(|v| v.amount))),
        }
    }
    let mut wheels = 0;
    for k in 0..30 {
        // odd rims need a triangle among the hub's neighbours, so use K4
        let mut m = GraphModel::uniform(4, 2)?;
        for p in 0..4 {
            for q in p + 1..4 {
                m.add_edge(p, q, vec![0.0; 4])?;
            }
        }
        let proj = BinaryProjection::singleton(&m);
        // shortest-path weights are exact when delta >= 1/2; a planted hub
        // with low spokes and a mostly high rim makes wheels violated
        let hub = rng.random_range(0..proj.num_nodes());
        let values: Vec<f64> = proj
            .edges()
            .iter()
            .map(|&(a, b)| {
                if (a == hub || b == hub) != rng.random_bool(0.15) {
                    rng.random_range(0.5..0.55)
                } else {
                    rng.random_range(0.9..=1.0)
                }
            })
            .collect();
        let delta = DeltaView::new(&proj, values);
        let found = odd_wheel_cuts(&delta, EPS_CUT, proj.num_nodes());
        let best = brute_force_odd_wheel(proj.num_nodes(), proj.edges(), &delta.values).map(|b| b.0);
        match (found.first(), best) {
            (Some((_, a)), Some(b)) if (a - b).abs() <= 1e-9 => wheels += 1,
            (None, b) if b.is_none_or(|b| b <= EPS_CUT) => {}
            (f, b) => issues.push(format!("wheel case {k}: separator {:?} vs oracle {b:?}", f.map(|v| v.1))),
        }
    }
    let mut detail = format!("30 cycle cases ({nonempty} violated), 30 odd-wheel cases ({wheels} violated)");
    if let Some(i) = issues.first() {
        detail.push_str(&format!("; {} mismatches, first: {i}", issues.len()));
    }
    Ok(CheckReport::new(7, "separation matches exhaustive oracles", issues.is_empty(), detail))
}

/// Constraints emitted by the separators and by bounding runs
/// hold at every integral point of their source instance.
pub fn cut_validity() -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let caps = CutCaps {
        nonneg: 10_000,
        edgemarg: 10_000,
        triangle: 10_000,
        cycle: 10_000,
        oddwheel: 10_000,
    };
    let mut pool: Vec<(usize, Constraint)> = Vec::new();
    let mut models = Vec::new();
    let mut seen = HashSet::new();
    for k in 0..8u64 {
        let n = rng.random_range(4..=6usize);
        let h = if n == 6 { 2 } else { rng.random_range(2..=3usize) };
        let m = gen_synthetic(&SyntheticConfig {
            n,
            h,
            kappa: rng.random_range(2.0..=(n - 1) as f64),
            omega: 0.25,
            seed: 800 + k,
        })?;
        let mi = models.len();
        let proj = BinaryProjection::singleton(&m);
        let mut push = |c: Constraint, pool: &mut Vec<(usize, Constraint)>| {
            if seen.insert((mi, c.id)) {
                pool.push((mi, c));
            }
        };
        for _ in 0..30 {
            let pp = random_nonneg_primal(&m, &proj, &mut rng);
            for hub_budget in [5, proj.num_nodes()] {
                let cfg = SeparationConfig {
                    caps,
                    hub_budget,
                    ..SeparationConfig::default()
                };
                for v in separate_all(&pp, &m, &proj, &cfg, &ConstraintSet::new())? {
                    push(v.constraint, &mut pool);
                }
            }
            let delta = DeltaView::new(&proj, proj.deltas(&pp)?);
            for (cut, _) in odd_wheel_cuts(&delta, -1.0, proj.num_nodes()) {
                push(cut_to_constraint(&cut, &proj, &pp.index)?, &mut pool);
            }
        }
        let r = bound(&m, &m.full_domain(), None, f64::INFINITY, &BoundConfig::default())?;
        for c in r.final_warm_start.working_set {
            push(c, &mut pool);
        }
        models.push(m);
    }
    let draws = 10_000;
    let picks: Vec<usize> = (0..draws).map(|_| rng.random_range(0..pool.len())).collect();
    let mut points: Vec<Vec<SymMatrix>> = Vec::new();
    for m in &models {
        let mut v = Vec::new();
        m.full_domain()
            .for_each_assignment(|x| v.push(PrimalPoint::from_assignment(m.labels(), x).omega));
        points.push(v);
    }
    let mut bad = Vec::new();
    let mut classes = std::collections::BTreeMap::new();
    for &i in &picks {
        let (mi, c) = &pool[i];
        *classes.entry(c.class.name()).or_insert(0usize) += 1;
        if let Some(om) = points[*mi].iter().find(|om| c.violation(om) > 1e-9) {
            bad.push(format!("{} constraint {:x} violated by {:.3e}", c.class.name(), c.id, c.violation(om)));
        }
    }
    let mut detail = format!("{draws} draws from {} distinct constraints, by class {classes:?}", pool.len());
    if let Some(b) = bad.first() {
        detail.push_str(&format!("; {} invalid, first: {b}", bad.len()));
    }
    Ok(CheckReport::new(8, "emitted cuts are valid", bad.is_empty(), detail))
}

/// Root bounds with and without cuts on tightening instance `k`.
pub fn root_bounds_with_and_without_cuts(k: u64) -> Result<(f64, f64)> {
    let m = gen_synthetic(&SyntheticConfig {
        n: 8,
        h: 3,
        kappa: 7.0,
        omega: 0.1,
        seed: 900 + k,
    })?;
    let with = bound(&m, &m.full_domain(), None, f64::INFINITY, &BoundConfig::default())?;
    let without = bound(
        &m,
        &m.full_domain(),
        None,
        f64::INFINITY,
        &BoundConfig::default().without_cuts(),
    )?;
    Ok((with.lb, without.lb))
}

/// Cuts never lower the root bound and usually raise it.
pub fn cutting_planes_tighten() -> Result<CheckReport> {
    let pairs: Vec<Result<(f64, f64)>> = (0..10u64).into_par_iter().map(root_bounds_with_and_without_cuts).collect();
    let (mut never_worse, mut strict) = (0, 0);
    let mut gains = Vec::new();
    for p in pairs {
        let (with, without) = p?;
        never_worse += (with >= without - 1e-6) as usize;
        strict += (with - without > 1e-4) as usize;
        gains.push(with - without);
    }
    let min_gain = gains.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CheckReport::new(
        9,
        "cutting planes tighten the root bound",
        never_worse == 10 && strict >= 6,
        format!("10 instances, {never_worse} not worse, {strict} strictly better, min gain {min_gain:.3e}"),
    ))
}

/// Random 3x4 grid with submodular pairwise terms.
pub fn submodular_grid(seed: u64) -> Result<GraphModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = (3, 4);
    let mut m = GraphModel::uniform(rows * cols, 2)?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    for p in 0..rows * cols {
        m.set_unary(p, vec![normal.sample(&mut rng), normal.sample(&mut rng)])?;
    }
    for r in 0..rows {
        for c in 0..cols {
            let p = r * cols + c;
            let mut nbrs = Vec::new();
            if c + 1 < cols {
                nbrs.push(p + 1);
            }
            if r + 1 < rows {
                nbrs.push(p + cols);
            }
            for q in nbrs {
                // theta(0,0) + theta(1,1) <= theta(0,1) + theta(1,0)
                let a: f64 = normal.sample(&mut rng);
                let d: f64 = normal.sample(&mut rng);
                let b: f64 = normal.sample(&mut rng);
                let c2 = a + d - b + rng.random_range(0.0..2.0);
                m.add_edge(p, q, vec![a, b, c2, d])?;
            }
        }
    }
    Ok(m)
}

/// Certified optima on submodular grids.
pub fn binary_submodular_grids() -> Result<CheckReport> {
    let runs: Vec<Result<(bool, bool)>> = (0..10u64)
        .into_par_iter()
        .map(|k| {
            let m = submodular_grid(1000 + k)?;
            let oracle = exhaustive_map(&m, &m.full_domain())?;
            let r = crate::bnb::solve(&m, &SolveConfig::default())?;
            Ok(((r.gub - oracle.optimum).abs() <= 1e-9, r.exact))
        })
        .collect();
    let (mut matched, mut exact) = (0, 0);
    for r in runs {
        let (a, b) = r?;
        matched += a as usize;
        exact += b as usize;
    }
    Ok(CheckReport::new(
        10,
        "binary submodular grids",
        matched == 10 && exact == 10,
        format!("10 grids, {matched} optimal, {exact} certified"),
    ))
}

/// Root bounding on a fully connected 64-node, 10-label model.
pub fn medium_scale_root(budget: Duration) -> Result<CheckReport> {
    let m = gen_synthetic(&SyntheticConfig {
        n: 64,
        h: 10,
        kappa: 63.0,
        omega: 0.2,
        seed: 1,
    })?;
    let start = Instant::now();
    let ctl = BoundControl {
        start,
        deadline: Some(start + budget),
    };
    let r = match bound_with(&m, &m.full_domain(), None, f64::INFINITY, &BoundConfig::default(), &ctl) {
        Ok(r) => r,
        Err(e @ (Error::Numerical(_) | Error::InconsistentPrimal(_))) => {
            return Ok(CheckReport::new(11, "medium-scale liveness", false, format!("numerical failure: {e}")))
        }
        Err(e) => return Err(e),
    };
    let ub_energy = m.energy(&r.x)?;
    let secs = start.elapsed().as_secs_f64();
    let passed =
        r.lb.is_finite() && r.ub.is_finite() && r.ub >= r.lb && (ub_energy - r.ub).abs() <= 1e-9 && secs <= budget.as_secs_f64() + 30.0;
    Ok(CheckReport::new(
        11,
        "medium-scale liveness",
        passed,
        format!(
            "lb {:.4}, ub {:.4}, exit {:?}, {} iterations, {} rounds, {secs:.0}s",
            r.lb, r.ub, r.exit_reason, r.iterations, r.rounds
        ),
    ))
}
