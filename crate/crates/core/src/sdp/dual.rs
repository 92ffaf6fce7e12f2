//! Penalised (SDCut) dual of the semidefinite relaxation.
//!
//! With `C(u) = -A - sum_i u_i B_i` and `Pi` the projection onto the PSD cone,
//!
//! ```text
//! d(u)      = -(gamma/2) ||Pi(C(u))||_F^2 - u.b - eta^2 / (2 gamma)
//! grad d(u) = gamma [<B_i, Pi(C(u))>]_i - b
//! X*(u)     = gamma Pi(C(u))
//! ```
//!
//! `d(u)` is a lower bound on the relaxation (and hence on the minimum
//! energy) for every `u` with `u_i >= 0` on inequality rows.

use std::sync::Once;

use faer::{Mat, Side};

use super::constraint::Constraint;
use super::dense::SymMatrix;
use super::index::OmegaIndex;
use super::qn::QnMemory;
use super::sparse::SparseSymMatrix;
use crate::error::{Error, Result};
use crate::model::GraphModel;

/// Eigenvalues with magnitude below this are treated as exact zeros.
pub const EIG_ZERO: f64 = 1e-12;

/// Objective matrix with `<Omega(x), A> = E(x)` for every integral moment matrix.
pub fn build_objective(model: &GraphModel) -> SparseSymMatrix {
    let idx = OmegaIndex::new(model.labels());
    let mut terms = Vec::new();
    for p in 0..model.num_nodes() {
        for (i, &v) in model.unary(p).iter().enumerate() {
            terms.push((0, idx.row(p, i), v));
        }
    }
    for (e, &(p, q)) in model.edges().iter().enumerate() {
        for i in 0..model.num_labels(p) {
            for j in 0..model.num_labels(q) {
                terms.push((idx.row(p, i), idx.row(q, j), model.pairwise(e, i, j)));
            }
        }
    }
    SparseSymMatrix::from_coefficients(terms)
}

/// Scale-invariant starting penalty `scale * eta / max(1, ||A||_F)`.
pub fn initial_gamma(objective: &SparseSymMatrix, eta: f64, scale: f64) -> f64 {
    scale * eta / objective.frobenius_norm().max(1.0)
}

/// `C(u) = -A - sum_i u_i B_i`
pub fn eval_c(u: &[f64], objective: &SparseSymMatrix, constraints: &[Constraint], dim: usize) -> Result<SymMatrix> {
    if u.len() != constraints.len() {
        return Err(Error::Dimension(format!(
            "dual vector has {} entries for {} constraints",
            u.len(),
            constraints.len()
        )));
    }
    let too_big = |m: &SparseSymMatrix| m.max_index().is_some_and(|k| k >= dim);
    if too_big(objective) || constraints.iter().any(|c| too_big(&c.matrix)) {
        return Err(Error::Dimension(format!("matrix index out of range for dimension {dim}")));
    }
    let mut c = SymMatrix::zeros(dim);
    objective.add_to(&mut c, -1.0);
    for (ui, con) in u.iter().zip(constraints) {
        if *ui != 0.0 {
            con.matrix.add_to(&mut c, -ui);
        }
    }
    Ok(c)
}

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    vectors: Mat<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `sum_k f(lambda_k) v_k v_k^T` over eigenvalues with `f(lambda) != 0`.
    fn reassemble(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let keep: Vec<(usize, f64)> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &l)| (k, f(l)))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        let mut out = SymMatrix::zeros(n);
        if keep.is_empty() {
            return out;
        }
        let vs = Mat::<f64>::from_fn(n, keep.len(), |i, c| self.vectors[(i, keep[c].0)]);
        let ws = Mat::<f64>::from_fn(n, keep.len(), |i, c| self.vectors[(i, keep[c].0)] * keep[c].1);
        let prod = &ws * vs.transpose();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = prod[(i, j)];
            }
        }
        out.symmetrize();
        out
    }

    pub fn positive_part(&self) -> SymMatrix {
        self.reassemble(clamp_positive)
    }
}

#[inline]
fn clamp_positive(l: f64) -> f64 {
    if l > EIG_ZERO {
        l
    } else {
        0.0
    }
}

fn diagnostics(x: &SymMatrix) -> String {
    let max_abs = x.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    format!(
        "dim {}, ||X||_F = {:.3e}, max |x_ij| = {:.3e}, asymmetry = {:.3e}",
        x.dim(),
        x.frobenius_norm(),
        max_abs,
        x.max_asymmetry()
    )
}

/// Symmetric eigendecomposition (reads the lower triangle).
pub fn sym_eigen(x: &SymMatrix) -> Result<Spectrum> {
    static SEQUENTIAL: Once = Once::new();
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));

    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite matrix entry ({})", diagnostics(x))));
    }
    let n = x.dim();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| x[(i, j)]);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?} ({})", diagnostics(x))))?;
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite eigenvalue ({})", diagnostics(x))));
    }
    Ok(Spectrum {
        values,
        vectors: evd.U().to_owned(),
    })
}

#[derive(Debug, Clone)]
pub struct PsdProjection {
    pub projection: SymMatrix,
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors, one per eigenvalue, in the same order.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Projection onto the PSD cone: `P diag(max(0, lambda)) P^T`.
pub fn psd_project(x: &SymMatrix) -> Result<PsdProjection> {
    let asym = x.max_asymmetry();
    let scale = x.frobenius_norm().max(1.0);
    if asym > 1e-8 * scale {
        return Err(Error::Numerical(format!("matrix is not symmetric ({})", diagnostics(x))));
    }
    let spec = sym_eigen(x)?;
    Ok(PsdProjection {
        projection: spec.positive_part(),
        eigenvectors: (0..spec.dim()).map(|k| spec.vector(k)).collect(),
        eigenvalues: spec.values,
    })
}

/// Cached evaluation of the dual at one point.
#[derive(Debug, Clone)]
pub struct DualEval {
    key: EvalKey,
    pub value: f64,
    pub gradient: Vec<f64>,
    /// `Pi(C(u))`
    pub projection: SymMatrix,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct EvalKey {
    u: Vec<f64>,
    gamma: f64,
    fingerprint: u64,
}

fn fingerprint(constraints: &[Constraint]) -> u64 {
    constraints
        .iter()
        .fold(constraints.len() as u64, |h, c| h.rotate_left(7) ^ c.id ^ c.rhs.to_bits())
}

/// Dual iterate together with its quasi-Newton memory.
#[derive(Debug, Clone)]
pub struct DualState {
    pub u: Vec<f64>,
    pub gamma: f64,
    /// Trace of the moment matrix, `n + 1`.
    pub eta: f64,
    pub memory: QnMemory,
    /// Last accepted step length.
    pub step: f64,
    /// Set when the last ascent stopped on a failed line search.
    pub stalled: bool,
    cache: Option<DualEval>,
}

impl DualState {
    pub fn new(u: Vec<f64>, gamma: f64, eta: f64) -> Self {
        Self::with_memory(u, gamma, eta, QnMemory::DEFAULT_CAPACITY)
    }

    pub fn with_memory(u: Vec<f64>, gamma: f64, eta: f64, memory: usize) -> Self {
        assert!(gamma > 0.0, "penalty must be positive");
        DualState {
            u,
            gamma,
            eta,
            memory: QnMemory::new(memory),
            step: 1.0,
            stalled: false,
            cache: None,
        }
    }

    pub fn zeros(m: usize, gamma: f64, eta: f64) -> Self {
        Self::new(vec![0.0; m], gamma, eta)
    }

    /// Clamps inequality multipliers to be non-negative.
    pub fn project_feasible(&mut self, constraints: &[Constraint]) {
        for (ui, c) in self.u.iter_mut().zip(constraints) {
            if c.is_inequality() && *ui < 0.0 {
                *ui = 0.0;
            }
        }
    }

    pub fn is_feasible(&self, constraints: &[Constraint]) -> bool {
        self.u.len() == constraints.len()
            && self.u.iter().zip(constraints).all(|(ui, c)| !c.is_inequality() || *ui >= 0.0)
    }

    pub fn cached(&self) -> Option<&DualEval> {
        self.cache.as_ref()
    }

    pub fn invalidate(&mut self) {
        self.cache = None;
    }

    /// Evaluates value, gradient and projection at `self.u`, reusing the
    /// cached decomposition when nothing changed.
    pub fn evaluate(&mut self, objective: &SparseSymMatrix, constraints: &[Constraint], dim: usize) -> Result<&DualEval> {
        let key = EvalKey {
            u: self.u.clone(),
            gamma: self.gamma,
            fingerprint: fingerprint(constraints),
        };
        let fresh = matches!(&self.cache, Some(c) if c.key == key);
        if !fresh {
            self.cache = Some(evaluate_at(&self.u, self.gamma, self.eta, objective, constraints, dim)?);
        }
        Ok(self.cache.as_ref().expect("just filled"))
    }

    /// Moves to the point an evaluation was taken at, keeping it as the cache.
    pub(crate) fn accept(&mut self, eval: DualEval) {
        self.u.clone_from(&eval.key.u);
        self.cache = Some(eval);
    }
}

/// Uncached evaluation of the dual at `u`.
pub fn evaluate_at(
    u: &[f64],
    gamma: f64,
    eta: f64,
    objective: &SparseSymMatrix,
    constraints: &[Constraint],
    dim: usize,
) -> Result<DualEval> {
    let c = eval_c(u, objective, constraints, dim)?;
    let spec = sym_eigen(&c)?;
    let norm_sq: f64 = spec.values.iter().map(|&l| clamp_positive(l).powi(2)).sum();
    let ub: f64 = u.iter().zip(constraints).map(|(ui, con)| ui * con.rhs).sum();
    let value = -0.5 * gamma * norm_sq - ub - eta * eta / (2.0 * gamma);
    let projection = spec.positive_part();
    let gradient = constraints
        .iter()
        .map(|con| gamma * con.matrix.inner(&projection) - con.rhs)
        .collect();
    Ok(DualEval {
        key: EvalKey {
            u: u.to_vec(),
            gamma,
            fingerprint: fingerprint(constraints),
        },
        value,
        gradient,
        projection,
        eigenvalues: spec.values,
    })
}

pub fn dual_value(state: &mut DualState, objective: &SparseSymMatrix, constraints: &[Constraint], dim: usize) -> Result<f64> {
    Ok(state.evaluate(objective, constraints, dim)?.value)
}

pub fn dual_gradient(
    state: &mut DualState,
    objective: &SparseSymMatrix,
    constraints: &[Constraint],
    dim: usize,
) -> Result<Vec<f64>> {
    Ok(state.evaluate(objective, constraints, dim)?.gradient.clone())
}

/// Moment matrix in the layout of an `OmegaIndex`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub omega: SymMatrix,
    pub index: OmegaIndex,
}

impl PrimalPoint {
    pub fn new(omega: SymMatrix, index: OmegaIndex) -> Result<Self> {
        if omega.dim() != index.dim() {
            return Err(Error::Dimension(format!(
                "moment matrix is {}x{}, layout needs {}",
                omega.dim(),
                omega.dim(),
                index.dim()
            )));
        }
        Ok(PrimalPoint { omega, index })
    }

    /// Rank-one moment matrix of an integral assignment.
    pub fn from_assignment(labels: &[usize], x: &[usize]) -> Self {
        let index = OmegaIndex::new(labels);
        let mut v = vec![0.0; index.dim()];
        v[0] = 1.0;
        for (p, &i) in x.iter().enumerate() {
            v[index.row(p, i)] = 1.0;
        }
        PrimalPoint {
            omega: SymMatrix::outer(&v),
            index,
        }
    }

    /// Singleton pseudo-marginal `y_{p,i}`.
    pub fn y(&self, p: usize, i: usize) -> f64 {
        self.omega[(0, self.index.row(p, i))]
    }

    /// Pairwise pseudo-marginal `Y_{pi,qj}`.
    pub fn pair(&self, p: usize, i: usize, q: usize, j: usize) -> f64 {
        self.omega[(self.index.row(p, i), self.index.row(q, j))]
    }

    pub fn marginals(&self) -> Vec<Vec<f64>> {
        self.index
            .labels()
            .iter()
            .enumerate()
            .map(|(p, &h)| (0..h).map(|i| self.y(p, i)).collect())
            .collect()
    }
}

/// `Omega = gamma * Pi(C(u))` at the current iterate.
pub fn recover_primal(
    state: &mut DualState,
    objective: &SparseSymMatrix,
    constraints: &[Constraint],
    index: &OmegaIndex,
) -> Result<PrimalPoint> {
    let gamma = state.gamma;
    let eval = state.evaluate(objective, constraints, index.dim())?;
    let mut omega = eval.projection.clone();
    omega.scale(gamma);
    PrimalPoint::new(omega, index.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::t3;
    use crate::sdp::constraint::{ConstraintClass, ConstraintKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut impl Rng) -> SymMatrix {
        let mut m = SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        m.symmetrize();
        m
    }

    #[test]
    fn objective_zero_model() {
        let m = GraphModel::uniform(3, 2).unwrap();
        assert!(build_objective(&m).is_empty());
    }

    #[test]
    fn objective_single_node_structure() {
        let mut m = GraphModel::uniform(1, 2).unwrap();
        m.set_unary(0, vec![3.0, -1.0]).unwrap();
        let a = build_objective(&m);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), 1.5);
        assert_eq!(a.get(2, 0), -0.5);
    }

    #[test]
    fn objective_reproduces_energy() {
        let m = t3();
        let a = build_objective(&m);
        m.full_domain().for_each_assignment(|x| {
            let omega = PrimalPoint::from_assignment(m.labels(), x).omega;
            assert!((a.inner(&omega) - m.energy_unchecked(x)).abs() < 1e-12);
        });
    }

    #[test]
    fn c_at_zero_is_minus_a() {
        let a = build_objective(&t3());
        let c = eval_c(&[], &a, &[], 7).unwrap();
        let mut expect = a.to_dense(7);
        expect.scale(-1.0);
        assert_eq!(c, expect);
    }

    #[test]
    fn c_cancels_with_matching_constraint() {
        let a = build_objective(&t3());
        let con = Constraint::new(ConstraintClass::Unit, &[], ConstraintKind::Equality, a.clone(), 0.0);
        let c = eval_c(&[-1.0], &a, &[con], 7).unwrap();
        assert!(c.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn c_inner_product_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = build_objective(&t3());
        let cons: Vec<Constraint> = (0..4)
            .map(|k| {
                let b = SparseSymMatrix::from_coefficients((0..5).map(|_| {
                    (rng.random_range(0..7), rng.random_range(0..7), rng.random_range(-1.0..1.0))
                }));
                Constraint::new(ConstraintClass::Cycle, &[k], ConstraintKind::Inequality, b, 0.0)
            })
            .collect();
        let u: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        let omega = random_sym(7, &mut rng);
        let c = eval_c(&u, &a, &cons, 7).unwrap();
        let direct = -a.inner(&omega) - u.iter().zip(&cons).map(|(ui, k)| ui * k.matrix.inner(&omega)).sum::<f64>();
        assert!((c.dot(&omega) - direct).abs() < 1e-12);
        assert!(matches!(eval_c(&u[..3], &a, &cons, 7), Err(Error::Dimension(_))));
    }

    #[test]
    fn projection_of_diagonal() {
        let mut x = SymMatrix::zeros(2);
        x[(0, 0)] = 1.0;
        x[(1, 1)] = -2.0;
        let p = psd_project(&x).unwrap();
        assert!((p.projection[(0, 0)] - 1.0).abs() < 1e-14);
        assert!(p.projection[(1, 1)].abs() < 1e-14);
        assert!(p.projection[(0, 1)].abs() < 1e-14);
        assert_eq!(p.eigenvalues.len(), 2);
        assert!(p.eigenvalues[0] <= p.eigenvalues[1]);
    }

    #[test]
    fn projection_keeps_psd_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<Vec<f64>> = (0..3).map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mut x = SymMatrix::zeros(6);
        for vi in &v {
            x.add_scaled(&SymMatrix::outer(vi), 1.0);
        }
        let p = psd_project(&x).unwrap();
        let mut d = p.projection.clone();
        d.add_scaled(&x, -1.0);
        assert!(d.frobenius_norm() < 1e-10);
    }

    #[test]
    fn projection_moreau_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_sym(20, &mut rng);
        let pos = psd_project(&x).unwrap().projection;
        let mut neg_x = x.clone();
        neg_x.scale(-1.0);
        let neg = psd_project(&neg_x).unwrap().projection;
        let mut r = x.clone();
        r.add_scaled(&pos, -1.0);
        r.add_scaled(&neg, 1.0);
        assert!(r.frobenius_norm() <= 1e-9);
        let min_eig = sym_eigen(&pos).unwrap().values[0];
        assert!(min_eig >= -1e-10);
    }

    #[test]
    fn projection_rejects_asymmetric_and_nan() {
        let mut x = SymMatrix::zeros(2);
        x[(0, 1)] = 1.0;
        assert!(matches!(psd_project(&x), Err(Error::Numerical(_))));
        let mut y = SymMatrix::zeros(2);
        y[(0, 0)] = f64::NAN;
        assert!(matches!(psd_project(&y), Err(Error::Numerical(_))));
    }

    #[test]
    fn dual_value_trivial_cases() {
        let a = SparseSymMatrix::new();
        let mut s = DualState::zeros(0, 1.0, 4.0);
        assert_eq!(dual_value(&mut s, &a, &[], 3).unwrap(), -8.0);

        let minus_identity = SparseSymMatrix::from_coefficients([(0, 0, -1.0), (1, 1, -1.0)]);
        let eta = 3.0;
        let mut s = DualState::zeros(0, 1.0, eta);
        let v = dual_value(&mut s, &minus_identity, &[], 2).unwrap();
        assert!((v - (-1.0 - eta * eta / 2.0)).abs() < 1e-12);
        assert!(dual_gradient(&mut s, &minus_identity, &[], 2).unwrap().is_empty());
    }

    #[test]
    fn zero_constraint_gradient_is_minus_rhs() {
        let a = build_objective(&t3());
        let con = Constraint::new(
            ConstraintClass::Unit,
            &[],
            ConstraintKind::Equality,
            SparseSymMatrix::new(),
            1.0,
        );
        let mut s = DualState::zeros(1, 2.0, 4.0);
        assert_eq!(dual_gradient(&mut s, &a, &[con], 7).unwrap(), vec![-1.0]);
    }

    #[test]
    fn primal_is_scaled_projection() {
        let minus_identity = SparseSymMatrix::from_coefficients((0..3).map(|i| (i, i, -1.0)));
        let mut s = DualState::zeros(0, 2.0, 3.0);
        let idx = OmegaIndex::new(&[2]);
        let p = recover_primal(&mut s, &minus_identity, &[], &idx).unwrap();
        let mut expect = SymMatrix::identity(3);
        expect.scale(2.0);
        let mut d = p.omega.clone();
        d.add_scaled(&expect, -1.0);
        assert!(d.frobenius_norm() < 1e-12);
    }

    #[test]
    fn evaluation_is_cached() {
        let a = build_objective(&t3());
        let mut s = DualState::zeros(0, 1.0, 4.0);
        let v1 = dual_value(&mut s, &a, &[], 7).unwrap();
        assert!(s.cached().is_some());
        let v2 = dual_value(&mut s, &a, &[], 7).unwrap();
        assert_eq!(v1, v2);
        s.gamma = 2.0;
        let v3 = dual_value(&mut s, &a, &[], 7).unwrap();
        assert_ne!(v1, v3);
    }
}
