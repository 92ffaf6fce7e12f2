//! Moving constraints and moment matrices between a model and one of its
//! restrictions.
//!
//! Constraints are kept in the frame of the unrestricted model so cuts stay
//! meaningful across subproblems. Under a restriction, a row of a fixed
//! label coincides with the unit row, and a row of an excluded label is zero
//! on every point of the domain.

use crate::model::{GraphModel, IndexMap};
use crate::sdp::{Constraint, ConstraintClass, OmegaIndex, PrimalPoint, SparseSymMatrix, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowImage {
    Row(usize),
    Unit,
    Zero,
}

#[derive(Debug, Clone)]
pub struct FrameMap {
    pub full: OmegaIndex,
    pub reduced: OmegaIndex,
    image: Vec<RowImage>,
}

impl FrameMap {
    pub fn new(full_model: &GraphModel, map: &IndexMap, reduced_labels: &[usize]) -> Self {
        let full = OmegaIndex::new(full_model.labels());
        let reduced = OmegaIndex::new(reduced_labels);
        let mut image = vec![RowImage::Unit; full.dim()];
        for p in 0..full_model.num_nodes() {
            for i in 0..full_model.num_labels(p) {
                image[full.row(p, i)] = match (map.fixed[p], map.reduced_of[p]) {
                    (Some(f), _) if f == i => RowImage::Unit,
                    (Some(_), _) => RowImage::Zero,
                    (None, Some(rp)) => match map.labels[rp].iter().position(|&l| l == i) {
                        Some(k) => RowImage::Row(reduced.row(rp, k)),
                        None => RowImage::Zero,
                    },
                    (None, None) => RowImage::Zero,
                };
            }
        }
        FrameMap { full, reduced, image }
    }

    /// Identity map for an unrestricted model.
    pub fn identity(model: &GraphModel) -> Self {
        let full = OmegaIndex::new(model.labels());
        let image = (0..full.dim()).map(|r| if r == 0 { RowImage::Unit } else { RowImage::Row(r) }).collect();
        FrameMap {
            reduced: full.clone(),
            full,
            image,
        }
    }

    pub fn image(&self, full_row: usize) -> RowImage {
        self.image[full_row]
    }

    fn reduced_row(&self, r: usize) -> Option<usize> {
        match self.image[r] {
            RowImage::Row(k) => Some(k),
            RowImage::Unit => Some(0),
            RowImage::Zero => None,
        }
    }

    /// Same constraint on the reduced moment matrix, or `None` when it
    /// carries no information there (no entries left, or only the unit
    /// entry, which the unit constraint already pins).
    pub fn map_constraint(&self, c: &Constraint) -> Option<Constraint> {
        let terms: Vec<(usize, usize, f64)> = c
            .matrix
            .coefficients()
            .filter_map(|(r, col, k)| Some((self.reduced_row(r)?, self.reduced_row(col)?, k)))
            .collect();
        let matrix = SparseSymMatrix::from_coefficients(terms);
        let unit_only = matrix.entries().iter().all(|&(r, col, _)| r == 0 && col == 0);
        if matrix.is_empty() || (unit_only && c.class != ConstraintClass::Unit) {
            return None;
        }
        Some(Constraint { matrix, ..c.clone() })
    }

    /// Full-frame moment matrix agreeing with `reduced` on the domain.
    pub fn lift_primal(&self, reduced: &PrimalPoint) -> PrimalPoint {
        let rows: Vec<Option<usize>> = (0..self.full.dim()).map(|r| self.reduced_row(r)).collect();
        let omega = SymMatrix::from_fn(self.full.dim(), |r, c| match (rows[r], rows[c]) {
            (Some(a), Some(b)) => reduced.omega[(a, b)],
            _ => 0.0,
        });
        PrimalPoint {
            omega,
            index: self.full.clone(),
        }
    }

    /// Full-frame singleton marginals; excluded labels get 0.
    pub fn lift_marginals(&self, reduced: &PrimalPoint) -> Vec<Vec<f64>> {
        self.full
            .labels()
            .iter()
            .enumerate()
            .map(|(p, &h)| {
                (0..h)
                    .map(|i| match self.image[self.full.row(p, i)] {
                        RowImage::Row(k) => reduced.omega[(0, k)],
                        RowImage::Unit => 1.0,
                        RowImage::Zero => 0.0,
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{base_constraints, cut::cut_to_constraint, cut::CutDescriptor, BinaryProjection};
    use crate::model::tests::t3;
    use crate::model::Domain;

    #[test]
    fn identity_maps_everything() {
        let m = t3();
        let f = FrameMap::identity(&m);
        for c in base_constraints(&m) {
            assert_eq!(f.map_constraint(&c).unwrap(), c);
        }
    }

    #[test]
    fn mapped_constraints_agree_on_domain() {
        let m = t3();
        let d = Domain::new(vec![vec![1], vec![0, 1], vec![0, 1]]).unwrap();
        let r = m.restrict(&d).unwrap();
        let f = FrameMap::new(&m, &r.map, r.model.labels());
        let pr = BinaryProjection::singleton(&m);
        let v = |p| pr.node_id(p, 0);
        let mut cons = base_constraints(&m);
        cons.push(cut_to_constraint(&CutDescriptor::triangle([v(0), v(1), v(2)], 0), &pr, &f.full).unwrap());
        cons.push(
            cut_to_constraint(
                &CutDescriptor::cycle(vec![v(0), v(1), v(2)], vec![true, false, false]),
                &pr,
                &f.full,
            )
            .unwrap(),
        );
        let mapped: Vec<(Constraint, Option<Constraint>)> =
            cons.iter().map(|c| (c.clone(), f.map_constraint(c))).collect();
        r.model.full_domain().for_each_assignment(|xr| {
            let full_x = r.map.lift(xr);
            let om_full = PrimalPoint::from_assignment(m.labels(), &full_x.0);
            let om_red = PrimalPoint::from_assignment(r.model.labels(), xr);
            let lifted = f.lift_primal(&om_red);
            assert_eq!(lifted.omega, om_full.omega);
            for (c, mc) in &mapped {
                let full_val = c.residual(&om_full.omega);
                match mc {
                    Some(mc) => assert!((mc.residual(&om_red.omega) - full_val).abs() < 1e-12),
                    None => assert!(c.violation(&om_full.omega) <= 1e-12),
                }
            }
        });
        // node 0 is fixed: its integer and gangster rows vanish
        assert!(mapped.iter().any(|(_, m)| m.is_none()));
    }

    #[test]
    fn lift_marginals_marks_fixed_and_excluded() {
        let m = t3();
        let d = Domain::new(vec![vec![1], vec![0, 1], vec![0]]).unwrap();
        let r = m.restrict(&d).unwrap();
        let f = FrameMap::new(&m, &r.map, r.model.labels());
        let pp = PrimalPoint::from_assignment(r.model.labels(), &[1]);
        assert_eq!(
            f.lift_marginals(&pp),
            vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]
        );
    }
}
