use std::fmt;

use serde::{Deserialize, Serialize};

use super::dense::SymMatrix;
use super::sparse::SparseSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// `<B, X> = b`
    Equality,
    /// `<B, X> <= b`
    Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintClass {
    /// `X[0][0] = 1`
    Unit,
    Integer01,
    Normalization,
    Gangster,
    DomainFix,
    Nonneg,
    EdgeMarg,
    Triangle,
    Cycle,
    OddWheel,
}

impl ConstraintClass {
    pub const ALL: [ConstraintClass; 10] = [
        ConstraintClass::Unit,
        ConstraintClass::Integer01,
        ConstraintClass::Normalization,
        ConstraintClass::Gangster,
        ConstraintClass::DomainFix,
        ConstraintClass::Nonneg,
        ConstraintClass::EdgeMarg,
        ConstraintClass::Triangle,
        ConstraintClass::Cycle,
        ConstraintClass::OddWheel,
    ];

    /// Classes added by separation rather than present from the start.
    pub fn is_cut(self) -> bool {
        matches!(
            self,
            ConstraintClass::Nonneg
                | ConstraintClass::EdgeMarg
                | ConstraintClass::Triangle
                | ConstraintClass::Cycle
                | ConstraintClass::OddWheel
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstraintClass::Unit => "unit",
            ConstraintClass::Integer01 => "integer01",
            ConstraintClass::Normalization => "normalization",
            ConstraintClass::Gangster => "gangster",
            ConstraintClass::DomainFix => "domainfix",
            ConstraintClass::Nonneg => "nonneg",
            ConstraintClass::EdgeMarg => "edgemarg",
            ConstraintClass::Triangle => "triangle",
            ConstraintClass::Cycle => "cycle",
            ConstraintClass::OddWheel => "oddwheel",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for ConstraintClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stable 64-bit id of a constraint, FNV-1a over its class and index tuple.
pub fn constraint_id(class: ConstraintClass, key: &[u64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for word in std::iter::once(class.tag()).chain(key.iter().copied()) {
        for byte in word.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub matrix: SparseSymMatrix,
    pub rhs: f64,
    pub kind: ConstraintKind,
    pub class: ConstraintClass,
    pub id: u64,
}

impl Constraint {
    pub fn new(class: ConstraintClass, key: &[u64], kind: ConstraintKind, matrix: SparseSymMatrix, rhs: f64) -> Self {
        Constraint {
            matrix,
            rhs,
            kind,
            class,
            id: constraint_id(class, key),
        }
    }

    pub fn is_inequality(&self) -> bool {
        self.kind == ConstraintKind::Inequality
    }

    /// `<B, X> - b`
    pub fn residual(&self, x: &SymMatrix) -> f64 {
        self.matrix.inner(x) - self.rhs
    }

    /// How far `x` is from satisfying the constraint; positive means violated.
    pub fn violation(&self, x: &SymMatrix) -> f64 {
        let r = self.residual(x);
        match self.kind {
            ConstraintKind::Equality => r.abs(),
            ConstraintKind::Inequality => r,
        }
    }
}
