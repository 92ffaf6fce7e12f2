//! Semidefinite relaxation data and the penalised dual solver.

pub mod constraint;
pub mod dense;
pub mod dual;
pub mod index;
pub mod qn;
pub mod sparse;

pub use constraint::{constraint_id, Constraint, ConstraintClass, ConstraintKind};
pub use dense::SymMatrix;
pub use dual::{
    build_objective, dual_gradient, dual_value, eval_c, evaluate_at, initial_gamma, psd_project, recover_primal, sym_eigen,
    DualEval, DualState, PrimalPoint, PsdProjection, Spectrum,
};
pub use index::OmegaIndex;
pub use qn::{qn_maximize, Control, QnConfig, QnExit, QnMemory, QnReport};
pub use sparse::SparseSymMatrix;
