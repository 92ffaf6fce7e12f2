//! Projected limited-memory quasi-Newton ascent on the penalised dual.
//!
//! Works on `f(u) = -d(u)` internally and keeps `u_i >= 0` on inequality
//! rows by projection. Variables sitting on their bound with an outward
//! gradient are frozen for the step; the two-loop recursion runs on the rest.

use std::collections::VecDeque;

use super::constraint::Constraint;
use super::dual::{evaluate_at, DualState};
use super::sparse::SparseSymMatrix;
use crate::error::Result;

/// Curvature pairs `(s, y)` of the minimised function `-d`.
#[derive(Debug, Clone, Default)]
pub struct QnMemory {
    capacity: usize,
    pairs: VecDeque<(Vec<f64>, Vec<f64>)>,
}

impl QnMemory {
    pub const DEFAULT_CAPACITY: usize = 10;

    pub fn new(capacity: usize) -> Self {
        QnMemory {
            capacity,
            pairs: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    fn push(&mut self, s: Vec<f64>, y: Vec<f64>) {
        if self.capacity == 0 {
            return;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y));
    }

    /// `-H g` restricted to the free coordinates.
    fn direction(&self, g: &[f64], free: &[bool]) -> Option<Vec<f64>> {
        let (s_last, y_last) = self.pairs.back()?;
        let masked = |v: &[f64]| -> Vec<f64> { v.iter().zip(free).map(|(x, &f)| if f { *x } else { 0.0 }).collect() };
        let mut q = masked(g);
        let mut alpha = Vec::with_capacity(self.pairs.len());
        for (s, y) in self.pairs.iter().rev() {
            let rho = 1.0 / dot_masked(y, s, free);
            let a = rho * dot_masked(s, &q, free);
            for i in 0..q.len() {
                if free[i] {
                    q[i] -= a * y[i];
                }
            }
            alpha.push((a, rho));
        }
        let yy = dot_masked(y_last, y_last, free);
        let sy = dot_masked(s_last, y_last, free);
        let h0 = if yy > 0.0 && sy > 0.0 { sy / yy } else { return None };
        for v in q.iter_mut() {
            *v *= h0;
        }
        for ((s, y), (a, rho)) in self.pairs.iter().zip(alpha.into_iter().rev()) {
            let b = rho * dot_masked(y, &q, free);
            for i in 0..q.len() {
                if free[i] {
                    q[i] += (a - b) * s[i];
                }
            }
        }
        if q.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(q.into_iter().map(|v| -v).collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_masked(a: &[f64], b: &[f64], free: &[bool]) -> f64 {
    a.iter().zip(b).zip(free).filter(|(_, &f)| f).map(|((x, y), _)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnConfig {
    pub max_iters: usize,
    /// Stop once `||projected gradient|| <= grad_tol * (||b|| + 1)`.
    pub grad_tol: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for QnConfig {
    fn default() -> Self {
        QnConfig {
            max_iters: 500,
            grad_tol: 1e-6,
            armijo: 1e-4,
            max_backtracks: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QnExit {
    Converged,
    MaxIters,
    /// The callback asked to stop.
    Aborted,
    /// No acceptable step within the backtracking budget.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnReport {
    pub iterations: usize,
    pub exit: QnExit,
    /// Dual value at the final iterate.
    pub value: f64,
    pub projected_grad_norm: f64,
}

/// Gradient of `-d` with components frozen at an active bound zeroed.
fn projected_gradient(u: &[f64], g: &[f64], constraints: &[Constraint]) -> (Vec<f64>, Vec<bool>) {
    let mut pg = g.to_vec();
    let mut free = vec![true; g.len()];
    for i in 0..g.len() {
        if constraints[i].is_inequality() && u[i] <= 0.0 && g[i] > 0.0 {
            pg[i] = 0.0;
            free[i] = false;
        }
    }
    (pg, free)
}

/// Runs at most `cfg.max_iters` accepted ascent steps from `state.u`.
///
/// `callback(iteration, value)` fires after each accepted step; returning
/// [`Control::Stop`] ends the run. Accepted steps never decrease the dual.
pub fn qn_maximize(
    state: &mut DualState,
    objective: &SparseSymMatrix,
    constraints: &[Constraint],
    dim: usize,
    cfg: &QnConfig,
    mut callback: impl FnMut(usize, f64) -> Control,
) -> Result<QnReport> {
    state.stalled = false;
    if cfg.max_iters == 0 {
        let value = state.evaluate(objective, constraints, dim)?.value;
        return Ok(QnReport {
            iterations: 0,
            exit: QnExit::MaxIters,
            value,
            projected_grad_norm: f64::NAN,
        });
    }
    state.project_feasible(constraints);
    if state.memory.pairs.front().is_some_and(|(s, _)| s.len() != state.u.len()) {
        state.memory.clear();
    }

    let b_norm = norm(&constraints.iter().map(|c| c.rhs).collect::<Vec<_>>());
    let tol = cfg.grad_tol * (b_norm + 1.0);

    let eval = state.evaluate(objective, constraints, dim)?;
    let mut f = -eval.value;
    let mut g: Vec<f64> = eval.gradient.iter().map(|v| -v).collect();
    let mut iterations = 0;

    loop {
        let (pg, free) = projected_gradient(&state.u, &g, constraints);
        let pg_norm = norm(&pg);
        let report = |iterations, exit| QnReport {
            iterations,
            exit,
            value: -f,
            projected_grad_norm: pg_norm,
        };
        if pg_norm <= tol {
            return Ok(report(iterations, QnExit::Converged));
        }
        if iterations >= cfg.max_iters {
            return Ok(report(iterations, QnExit::MaxIters));
        }

        let steepest = |scale: f64| -> Vec<f64> { pg.iter().map(|v| -scale * v).collect() };
        let mut dir = match state.memory.direction(&g, &free) {
            Some(d) if dot(&d, &pg) < 0.0 => d,
            _ => {
                state.memory.clear();
                let scale = if iterations == 0 && state.step >= 1.0 {
                    (1.0 / pg_norm).min(1.0)
                } else {
                    state.step.min(1.0 / pg_norm).max(1e-12)
                };
                steepest(scale)
            }
        };
        for (d, &fr) in dir.iter_mut().zip(&free) {
            if !fr {
                *d = 0.0;
            }
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial: Vec<f64> = state
                .u
                .iter()
                .zip(&dir)
                .zip(constraints)
                .map(|((u, d), c)| {
                    let v = u + t * d;
                    if c.is_inequality() && v < 0.0 {
                        0.0
                    } else {
                        v
                    }
                })
                .collect();
            let s: Vec<f64> = trial.iter().zip(&state.u).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &s);
            if decrease < 0.0 {
                let e = evaluate_at(&trial, state.gamma, state.eta, objective, constraints, dim)?;
                let f_new = -e.value;
                if f_new <= f + cfg.armijo * decrease {
                    accepted = Some((s, e));
                    break;
                }
            }
            t *= 0.5;
        }

        let Some((s, e)) = accepted else {
            state.stalled = true;
            return Ok(report(iterations, QnExit::Stalled));
        };
        let g_new: Vec<f64> = e.gradient.iter().map(|v| -v).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            state.memory.push(s, y);
        }
        f = -e.value;
        g = g_new;
        state.step = t;
        state.accept(e);
        iterations += 1;

        if callback(iterations, -f) == Control::Stop {
            let (pg, _) = projected_gradient(&state.u, &g, constraints);
            return Ok(QnReport {
                iterations,
                exit: QnExit::Aborted,
                value: -f,
                projected_grad_norm: norm(&pg),
            });
        }
    }
}
