//! Constraints present in every working set.

use crate::model::{Domain, GraphModel};
use crate::sdp::{Constraint, ConstraintClass, ConstraintKind, OmegaIndex, SparseSymMatrix};

fn eq(class: ConstraintClass, key: &[u64], terms: Vec<(usize, usize, f64)>, rhs: f64) -> Constraint {
    Constraint::new(
        class,
        key,
        ConstraintKind::Equality,
        SparseSymMatrix::from_coefficients(terms),
        rhs,
    )
}

/// `X00 = 1`
pub fn unit_constraint() -> Constraint {
    eq(ConstraintClass::Unit, &[], vec![(0, 0, 1.0)], 1.0)
}

/// Unit entry, `Y_{pi,pi} = y_{p,i}`, `sum_i y_{p,i} = 1` and `Y_{pi,pj} = 0`
/// for `i != j`, in that order.
pub fn base_constraints(model: &GraphModel) -> Vec<Constraint> {
    let idx = OmegaIndex::new(model.labels());
    let mut out = vec![unit_constraint()];
    for p in 0..model.num_nodes() {
        for i in 0..model.num_labels(p) {
            let r = idx.row(p, i);
            out.push(eq(
                ConstraintClass::Integer01,
                &[p as u64, i as u64],
                vec![(r, r, 1.0), (0, r, -1.0)],
                0.0,
            ));
        }
    }
    for p in 0..model.num_nodes() {
        let terms = (0..model.num_labels(p)).map(|i| (0, idx.row(p, i), 1.0)).collect();
        out.push(eq(ConstraintClass::Normalization, &[p as u64], terms, 1.0));
    }
    for p in 0..model.num_nodes() {
        let h = model.num_labels(p);
        for i in 0..h {
            for j in i + 1..h {
                out.push(eq(
                    ConstraintClass::Gangster,
                    &[p as u64, i as u64, j as u64],
                    vec![(idx.row(p, i), idx.row(p, j), 1.0)],
                    0.0,
                ));
            }
        }
    }
    out
}

/// Pins the domain through equalities instead of restricting the model:
/// `y_{p,i} = 0` for excluded labels and `y_{p,i} = 1` for singleton nodes.
pub fn domainfix_constraints(d: &Domain, idx: &OmegaIndex) -> Vec<Constraint> {
    let mut out = Vec::new();
    for p in 0..idx.num_nodes() {
        let allowed = d.allowed(p);
        for i in 0..idx.labels()[p] {
            let rhs = if !d.is_allowed(p, i) {
                0.0
            } else if allowed.len() == 1 {
                1.0
            } else {
                continue;
            };
            out.push(eq(
                ConstraintClass::DomainFix,
                &[p as u64, i as u64, rhs as u64],
                vec![(0, idx.row(p, i), 1.0)],
                rhs,
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::t3;
    use crate::sdp::PrimalPoint;

    fn counts(cs: &[Constraint]) -> (usize, usize, usize) {
        let c = |k| cs.iter().filter(|x| x.class == k).count();
        (
            c(ConstraintClass::Integer01),
            c(ConstraintClass::Normalization),
            c(ConstraintClass::Gangster),
        )
    }

    #[test]
    fn class_counts() {
        let m = GraphModel::uniform(3, 2).unwrap();
        let cs = base_constraints(&m);
        assert_eq!(counts(&cs), (6, 3, 3));
        assert_eq!(cs.len(), 13);

        let m = GraphModel::uniform(4, 1).unwrap();
        assert_eq!(counts(&base_constraints(&m)).2, 0);

        let m = GraphModel::new(vec![2, 3, 4]).unwrap();
        assert_eq!(counts(&base_constraints(&m)), (9, 3, 1 + 3 + 6));
    }

    #[test]
    fn integral_points_satisfy_base() {
        let m = t3();
        let cs = base_constraints(&m);
        m.full_domain().for_each_assignment(|x| {
            let om = PrimalPoint::from_assignment(m.labels(), x).omega;
            for c in &cs {
                assert_eq!(c.residual(&om), 0.0, "{:?} at {x:?}", c.class);
            }
        });
    }

    #[test]
    fn ids_are_unique() {
        let m = GraphModel::new(vec![3, 2, 4]).unwrap();
        let cs = base_constraints(&m);
        let mut ids: Vec<u64> = cs.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), cs.len());
    }

    #[test]
    fn domainfix_shapes() {
        let m = t3();
        let idx = OmegaIndex::new(m.labels());
        assert!(domainfix_constraints(&m.full_domain(), &idx).is_empty());

        let m3 = GraphModel::uniform(2, 3).unwrap();
        let idx3 = OmegaIndex::new(m3.labels());
        let d = Domain::new(vec![vec![0, 2], vec![0, 1, 2]]).unwrap();
        let cs = domainfix_constraints(&d, &idx3);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].rhs, 0.0);

        let d = Domain::new(vec![vec![1], vec![0, 1], vec![0, 1]]).unwrap();
        let cs = domainfix_constraints(&d, &idx);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.iter().filter(|c| c.rhs == 1.0).count(), 1);
    }
}
