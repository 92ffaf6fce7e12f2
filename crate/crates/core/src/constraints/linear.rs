//! Non-negativity and edge-marginalisation constraints, found by enumeration.

use super::Violation;
use crate::model::GraphModel;
use crate::sdp::{Constraint, ConstraintClass, ConstraintKind, OmegaIndex, PrimalPoint, SparseSymMatrix};

/// `-Y_{pi,qj} <= 0` for edge `(p, q)`.
pub fn nonneg(idx: &OmegaIndex, p: usize, i: usize, q: usize, j: usize) -> Constraint {
    Constraint::new(
        ConstraintClass::Nonneg,
        &[p as u64, i as u64, q as u64, j as u64],
        ConstraintKind::Inequality,
        SparseSymMatrix::from_coefficients([(idx.row(p, i), idx.row(q, j), -1.0)]),
        0.0,
    )
}

/// `sum_j Y_{pi,qj} - y_{p,i} = 0`: node `p`'s label `i` marginalised over
/// the other endpoint `q` of an edge.
pub fn edge_marg(idx: &OmegaIndex, p: usize, i: usize, q: usize) -> Constraint {
    let r = idx.row(p, i);
    let mut terms: Vec<(usize, usize, f64)> = (0..idx.labels()[q]).map(|j| (r, idx.row(q, j), 1.0)).collect();
    terms.push((0, r, -1.0));
    Constraint::new(
        ConstraintClass::EdgeMarg,
        &[p as u64, i as u64, q as u64],
        ConstraintKind::Equality,
        SparseSymMatrix::from_coefficients(terms),
        0.0,
    )
}

pub fn all_nonneg(model: &GraphModel, idx: &OmegaIndex) -> Vec<Constraint> {
    let mut out = Vec::new();
    for &(p, q) in model.edges() {
        for i in 0..model.num_labels(p) {
            for j in 0..model.num_labels(q) {
                out.push(nonneg(idx, p, i, q, j));
            }
        }
    }
    out
}

pub fn all_edge_marg(model: &GraphModel, idx: &OmegaIndex) -> Vec<Constraint> {
    let mut out = Vec::new();
    for &(p, q) in model.edges() {
        for i in 0..model.num_labels(p) {
            out.push(edge_marg(idx, p, i, q));
        }
        for j in 0..model.num_labels(q) {
            out.push(edge_marg(idx, q, j, p));
        }
    }
    out
}

/// Every non-negativity and marginalisation constraint violated by more than
/// `eps`, most violated first (ties by id).
pub fn enumerate_violated_linear(primal: &PrimalPoint, model: &GraphModel, eps: f64) -> Vec<Violation> {
    let idx = &primal.index;
    let mut out = Vec::new();
    for &(p, q) in model.edges() {
        let (hp, hq) = (model.num_labels(p), model.num_labels(q));
        for i in 0..hp {
            for j in 0..hq {
                let amount = -primal.pair(p, i, q, j);
                if amount > eps {
                    out.push(Violation {
                        constraint: nonneg(idx, p, i, q, j),
                        amount,
                    });
                }
            }
        }
        for i in 0..hp {
            let s: f64 = (0..hq).map(|j| primal.pair(p, i, q, j)).sum();
            let amount = (s - primal.y(p, i)).abs();
            if amount > eps {
                out.push(Violation {
                    constraint: edge_marg(idx, p, i, q),
                    amount,
                });
            }
        }
        for j in 0..hq {
            let s: f64 = (0..hp).map(|i| primal.pair(p, i, q, j)).sum();
            let amount = (s - primal.y(q, j)).abs();
            if amount > eps {
                out.push(Violation {
                    constraint: edge_marg(idx, q, j, p),
                    amount,
                });
            }
        }
    }
    super::sort_violations(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::t3;
    use crate::sdp::SymMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integral_point_has_no_violations() {
        let m = t3();
        m.full_domain().for_each_assignment(|x| {
            let pp = PrimalPoint::from_assignment(m.labels(), x);
            assert!(enumerate_violated_linear(&pp, &m, 1e-12).is_empty());
        });
    }

    #[test]
    fn counts() {
        let m = t3();
        let idx = OmegaIndex::new(m.labels());
        assert_eq!(all_nonneg(&m, &idx).len(), 3 * 4);
        assert_eq!(all_edge_marg(&m, &idx).len(), 2 * 3 * 2);
    }

    #[test]
    fn single_negative_entry() {
        let m = t3();
        let mut pp = PrimalPoint::from_assignment(m.labels(), &[0, 1, 0]);
        // a pair entry that is zero at this vertex; perturb it together with
        // compensating entries so both marginal sums stay intact
        let (a, b) = (pp.index.row(0, 1), pp.index.row(1, 0));
        let (c, d) = (pp.index.row(0, 0), pp.index.row(1, 1));
        for (r, s, v) in [(a, b, -0.2), (a, d, 0.2), (c, b, 0.2), (c, d, -0.2)] {
            pp.omega[(r, s)] += v;
            pp.omega[(s, r)] += v;
        }
        let vs = enumerate_violated_linear(&pp, &m, 1e-4);
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].constraint.class, ConstraintClass::Nonneg);
        assert!((vs[0].amount - 0.2).abs() < 1e-12);
    }

    #[test]
    fn matches_full_scan() {
        let m = t3();
        let idx = OmegaIndex::new(m.labels());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut all = all_nonneg(&m, &idx);
        all.extend(all_edge_marg(&m, &idx));
        for _ in 0..20 {
            let v: Vec<f64> = (0..7).map(|_| rng.random_range(-0.5..1.0)).collect();
            let w: Vec<f64> = (0..7).map(|_| rng.random_range(-0.5..1.0)).collect();
            let mut om = SymMatrix::outer(&v);
            om.add_scaled(&SymMatrix::outer(&w), 1.0);
            let pp = PrimalPoint::new(om, idx.clone()).unwrap();
            let mut got: Vec<(u64, f64)> = enumerate_violated_linear(&pp, &m, 1e-4)
                .into_iter()
                .map(|v| (v.constraint.id, v.amount))
                .collect();
            let mut expect: Vec<(u64, f64)> = all
                .iter()
                .map(|c| (c.id, c.violation(&pp.omega)))
                .filter(|&(_, a)| a > 1e-4)
                .collect();
            got.sort_by_key(|x| x.0);
            expect.sort_by_key(|x| x.0);
            assert_eq!(got.len(), expect.len());
            for (g, e) in got.iter().zip(&expect) {
                assert_eq!(g.0, e.0);
                assert!((g.1 - e.1).abs() < 1e-12);
            }
        }
    }
}
