//! Base constraint sets and separation of tightening constraints.

pub mod base;
pub mod cut;
pub mod cycle;
pub mod frame;
pub mod linear;
pub mod oddwheel;
pub mod projection;
pub mod triangle;
mod walk;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

pub use base::{base_constraints, domainfix_constraints, unit_constraint};
pub use cut::{cut_to_constraint, CutDescriptor};
pub use cycle::{cycle_cuts, separate_cycle};
pub use frame::{FrameMap, RowImage};
pub use linear::enumerate_violated_linear;
pub use oddwheel::{odd_wheel_cuts, separate_odd_wheel};
pub use projection::{BinaryProjection, DeltaView, DELTA_NEG_TOL};
pub use triangle::{enumerate_violated_triangles, triangle_cuts};

use crate::error::Result;
use crate::model::GraphModel;
use crate::sdp::{Constraint, ConstraintClass, PrimalPoint};

/// Default violation threshold for reporting a cut.
pub const EPS_CUT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    /// `<B, X> - b` for inequalities, `|<B, X> - b|` for equalities.
    pub amount: f64,
}

/// Most violated first; ties by id for determinism.
pub fn sort_violations(v: &mut [Violation]) {
    v.sort_by(|a, b| {
        b.amount
            .total_cmp(&a.amount)
            .then(a.constraint.id.cmp(&b.constraint.id))
    });
}

/// Per-round limits on added cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCaps {
    pub nonneg: usize,
    pub edgemarg: usize,
    pub triangle: usize,
    pub cycle: usize,
    pub oddwheel: usize,
}

impl Default for CutCaps {
    fn default() -> Self {
        CutCaps {
            nonneg: 200,
            edgemarg: 200,
            triangle: 100,
            cycle: 50,
            oddwheel: 10,
        }
    }
}

impl CutCaps {
    pub fn none() -> Self {
        CutCaps {
            nonneg: 0,
            edgemarg: 0,
            triangle: 0,
            cycle: 0,
            oddwheel: 0,
        }
    }

    pub fn for_class(&self, class: ConstraintClass) -> usize {
        match class {
            ConstraintClass::Nonneg => self.nonneg,
            ConstraintClass::EdgeMarg => self.edgemarg,
            ConstraintClass::Triangle => self.triangle,
            ConstraintClass::Cycle => self.cycle,
            ConstraintClass::OddWheel => self.oddwheel,
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::none()
    }

    /// Parses `nonneg,edgemarg,triangle,cycle,oddwheel`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let v: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad cut cap {t:?}: {e}")))
            .collect::<std::result::Result<_, _>>()?;
        match v[..] {
            [nonneg, edgemarg, triangle, cycle, oddwheel] => Ok(CutCaps {
                nonneg,
                edgemarg,
                triangle,
                cycle,
                oddwheel,
            }),
            _ => Err(format!("expected 5 comma-separated caps, got {}", v.len())),
        }
    }
}

/// Working set with id-based duplicate suppression.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    items: Vec<Constraint>,
    ids: HashSet<u64>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vec(items: Vec<Constraint>) -> Self {
        let mut s = Self::new();
        for c in items {
            s.push(c);
        }
        s
    }

    /// Adds `c` unless a constraint with the same id is present.
    pub fn push(&mut self, c: Constraint) -> bool {
        if !self.ids.insert(c.id) {
            return false;
        }
        self.items.push(c);
        true
    }

    pub fn contains(&self, id: u64) -> bool {
        self.ids.contains(&id)
    }

    pub fn as_slice(&self) -> &[Constraint] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint> {
        self.items.iter()
    }

    /// Keeps the entries for which `keep(index, constraint)` holds.
    pub fn retain_indexed(&mut self, mut keep: impl FnMut(usize, &Constraint) -> bool) {
        let mut k = 0;
        let ids = &mut self.ids;
        self.items.retain(|c| {
            let keep_it = keep(k, c);
            k += 1;
            if !keep_it {
                ids.remove(&c.id);
            }
            keep_it
        });
    }

    pub fn counts(&self) -> BTreeMap<ConstraintClass, usize> {
        let mut m = BTreeMap::new();
        for c in &self.items {
            *m.entry(c.class).or_insert(0) += 1;
        }
        m
    }

    pub fn into_vec(self) -> Vec<Constraint> {
        self.items
    }
}

impl<'a> IntoIterator for &'a ConstraintSet {
    type Item = &'a Constraint;
    type IntoIter = std::slice::Iter<'a, Constraint>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Separation parameters for one cutting-plane round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationConfig {
    pub eps: f64,
    pub caps: CutCaps,
    pub hub_budget: usize,
    /// Negative `delta` beyond this is reported as an inconsistent primal.
    pub neg_tol: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig {
            eps: EPS_CUT,
            caps: CutCaps::default(),
            hub_budget: 5,
            neg_tol: DELTA_NEG_TOL,
        }
    }
}

/// Runs every separator on `primal` and returns the violated constraints not
/// already in `present`, capped per class. Odd wheels are searched only when
/// no cycle inequality is violated.
pub fn separate_all(
    primal: &PrimalPoint,
    model: &GraphModel,
    proj: &BinaryProjection,
    cfg: &SeparationConfig,
    present: &ConstraintSet,
) -> Result<Vec<Violation>> {
    let caps = cfg.caps;
    let mut out = Vec::new();
    let take = |vs: Vec<Violation>, class: ConstraintClass, out: &mut Vec<Violation>| {
        let cap = caps.for_class(class);
        out.extend(
            vs.into_iter()
                .filter(|v| v.constraint.class == class && !present.contains(v.constraint.id))
                .take(cap),
        );
    };
    if caps.nonneg > 0 || caps.edgemarg > 0 {
        let lin = enumerate_violated_linear(primal, model, cfg.eps);
        take(lin.clone(), ConstraintClass::Nonneg, &mut out);
        take(lin, ConstraintClass::EdgeMarg, &mut out);
    }
    if caps.triangle == 0 && caps.cycle == 0 && caps.oddwheel == 0 {
        return Ok(out);
    }
    let delta = DeltaView::new(proj, proj.deltas_with_tol(primal, cfg.neg_tol)?);
    let expand = |cands, cap| expand_capped(cands, cap, primal, proj, cfg.eps, present);
    if caps.triangle > 0 {
        out.extend(expand(triangle::triangle_cuts(&delta, cfg.eps), caps.triangle)?);
    }
    let mut cycles_found = false;
    if caps.cycle > 0 {
        let cyc = expand(cycle_cuts(&delta, cfg.eps), caps.cycle)?;
        cycles_found = !cyc.is_empty();
        out.extend(cyc);
    }
    if caps.oddwheel > 0 && !cycles_found {
        out.extend(expand(odd_wheel_cuts(&delta, cfg.eps, cfg.hub_budget), caps.oddwheel)?);
    }
    Ok(out)
}

/// Expands the most violated candidates (by their `delta`-level amount)
/// into constraints until `cap` new ones violated on `primal` are found.
fn expand_capped(
    mut cands: Vec<(CutDescriptor, f64)>,
    cap: usize,
    primal: &PrimalPoint,
    proj: &BinaryProjection,
    eps: f64,
    present: &ConstraintSet,
) -> Result<Vec<Violation>> {
    cands.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut out = Vec::new();
    for (cut, _) in cands {
        if out.len() >= cap {
            break;
        }
        let constraint = cut_to_constraint(&cut, proj, &primal.index)?;
        if present.contains(constraint.id) {
            continue;
        }
        let amount = constraint.residual(&primal.omega);
        if amount > eps {
            out.push(Violation { constraint, amount });
        }
    }
    sort_violations(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_parse() {
        assert_eq!(CutCaps::parse("200,200,100,50,10").unwrap(), CutCaps::default());
        assert!(CutCaps::parse("1,2").is_err());
        assert!(CutCaps::parse("a,1,1,1,1").is_err());
    }

    #[test]
    fn set_suppresses_duplicates() {
        let mut s = ConstraintSet::new();
        assert!(s.push(unit_constraint()));
        assert!(!s.push(unit_constraint()));
        assert_eq!(s.len(), 1);
        s.retain_indexed(|_, _| false);
        assert!(s.is_empty());
        assert!(s.push(unit_constraint()));
    }
}
