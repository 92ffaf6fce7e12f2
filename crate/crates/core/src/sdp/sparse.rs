use std::collections::BTreeMap;

use super::dense::SymMatrix;

/// Sparse symmetric matrix stored as its upper triangle. An entry `(r, c, v)`
/// with `r < c` stands for `v` at both `(r, c)` and `(c, r)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSymMatrix {
    entries: Vec<(u32, u32, f64)>,
}

impl SparseSymMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from inner-product coefficients: the result satisfies
    /// `<B, X> = sum coef * X[r][c]` for symmetric `X`. Repeated positions
    /// are summed and exact zeros dropped.
    pub fn from_coefficients(terms: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut acc: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (r, c, coef) in terms {
            let (r, c) = if r <= c { (r, c) } else { (c, r) };
            let v = if r == c { coef } else { 0.5 * coef };
            *acc.entry((r as u32, c as u32)).or_insert(0.0) += v;
        }
        SparseSymMatrix {
            entries: acc.into_iter().filter(|&(_, v)| v != 0.0).map(|((r, c), v)| (r, c, v)).collect(),
        }
    }

    /// Entries of the upper triangle, sorted by position.
    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    /// Stored (upper-triangular) entry count.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Inverse of `from_coefficients`: `(r, c, coef)` with `r <= c`.
    pub fn coefficients(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|&(r, c, v)| {
            let coef = if r == c { v } else { 2.0 * v };
            (r as usize, c as usize, coef)
        })
    }

    /// Nonzero count of the full symmetric matrix.
    pub fn full_nnz(&self) -> usize {
        self.entries.iter().map(|&(r, c, _)| if r == c { 1 } else { 2 }).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.iter().map(|&(_, c, _)| c as usize).max()
    }

    /// Value at `(r, c)` of the full matrix.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (r, c) = if r <= c { (r as u32, c as u32) } else { (c as u32, r as u32) };
        self.entries
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&(r, c)))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }

    /// Frobenius inner product with a dense symmetric matrix.
    #[inline]
    pub fn inner(&self, x: &SymMatrix) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| {
                let (r, c) = (r as usize, c as usize);
                if r == c {
                    v * x[(r, c)]
                } else {
                    v * (x[(r, c)] + x[(c, r)])
                }
            })
            .sum()
    }

    /// `x += alpha * self`
    #[inline]
    pub fn add_to(&self, x: &mut SymMatrix, alpha: f64) {
        for &(r, c, v) in &self.entries {
            let (r, c) = (r as usize, c as usize);
            x[(r, c)] += alpha * v;
            if r != c {
                x[(c, r)] += alpha * v;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| if r == c { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_dense(&self, n: usize) -> SymMatrix {
        let mut m = SymMatrix::zeros(n);
        self.add_to(&mut m, 1.0);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_define_inner_product() {
        let b = SparseSymMatrix::from_coefficients([(0, 2, 3.0), (1, 1, -1.0), (2, 0, 1.0), (1, 2, 0.0)]);
        assert_eq!(b.nnz(), 2);
        assert_eq!(b.full_nnz(), 3);
        let x = SymMatrix::from_fn(3, |i, j| (1 + i + j) as f64 + if i == j { 0.5 } else { 0.0 });
        // 4 * X[0][2] - X[1][1]
        assert!((b.inner(&x) - (4.0 * 3.0 - 3.5)).abs() < 1e-12);
        assert!((b.inner(&x) - b.to_dense(3).dot(&x)).abs() < 1e-12);
        assert_eq!(b.get(2, 0), 2.0);
        assert_eq!(b.get(1, 1), -1.0);
        assert_eq!(b.get(0, 1), 0.0);
    }

    #[test]
    fn cancelling_terms_vanish() {
        let b = SparseSymMatrix::from_coefficients([(0, 1, 1.0), (1, 0, -1.0)]);
        assert!(b.is_empty());
    }
}
