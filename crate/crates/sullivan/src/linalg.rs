//! Exact linear algebra over the rationals and the integers.
//!
//! Everything in this module is deterministic: elimination scans rows top to
//! bottom and columns left to right, kernel bases set free variables to one in
//! ascending column order, and `solve` returns the canonical solution with all
//! free variables zero. Downstream golden tests rely on these conventions, so
//! they are part of the contract, not an implementation detail.
//!
//! Rational matrices are dense and row-major. Integer matrices exist for
//! presentation abelianization, where the Smith normal form provides invariant
//! factors with an enforced divisibility chain.

use crate::{Q, Z};
use num::{Signed, Zero};

// ---- Rational matrices ----

/// Dense row-major matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Q>,
}

impl QMatrix {
    /// Zero matrix of the given shape. Either dimension may be zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![Q::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row vectors; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "ragged rows in matrix construction"
        );
        QMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix from column vectors; all columns must share one length.
    pub fn from_columns(cols: Vec<Vec<Q>>) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        assert!(
            cols.iter().all(|c| c.len() == rows),
            "ragged columns in matrix construction"
        );
        let mut m = QMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Q::is_zero)
    }

    /// Matrix-vector product; `v` must have length `cols`.
    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !v[j].is_zero() {
                        acc += self.at(i, j) * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Result of Gauss-Jordan elimination: the reduced matrix, the pivot column
/// of each nonzero row in order, and the rank.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: QMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Reduced row echelon form by exact Gauss-Jordan elimination.
///
/// Pivots are chosen as the first nonzero entry scanning columns left to
/// right; no pivoting heuristics are applied, so the output is a pure function
/// of the input entries.
pub fn rref(m: &QMatrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a.at(i, col).is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a.at(row, col).recip();
        for j in col..a.cols {
            let v = a.at(row, j) * &inv;
            a.set(row, j, v);
        }
        for i in 0..a.rows {
            if i != row && !a.at(i, col).is_zero() {
                let f = a.at(i, col).clone();
                for j in col..a.cols {
                    let v = a.at(i, j) - &f * a.at(row, j);
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref {
        rank: pivots.len(),
        matrix: a,
        pivots,
    }
}

/// Basis of the null space `{ v : M v = 0 }`.
///
/// One basis vector per free column, in ascending column order, with the free
/// variable set to one. The zero matrix of shape `r x c` therefore yields the
/// `c` standard basis vectors, and a full-column-rank matrix yields an empty
/// list.
pub fn kernel_basis(m: &QMatrix) -> Vec<Vec<Q>> {
    let r = rref(m);
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if r.pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); m.cols];
        v[free] = Q::from(Z::from(1));
        for (row, &pc) in r.pivots.iter().enumerate() {
            v[pc] = -r.matrix.at(row, free).clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `M x = b` exactly. Returns the canonical solution with every free
/// variable equal to zero, or `None` when the system is inconsistent.
pub fn solve(m: &QMatrix, b: &[Q]) -> Option<Vec<Q>> {
    assert_eq!(b.len(), m.rows, "right-hand side length mismatch");
    let mut aug = QMatrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.at(i, j).clone());
        }
        aug.set(i, m.cols, b[i].clone());
    }
    let r = rref(&aug);
    if r.pivots.contains(&m.cols) {
        return None;
    }
    let mut x = vec![Q::zero(); m.cols];
    for (row, &pc) in r.pivots.iter().enumerate() {
        x[pc] = r.matrix.at(row, m.cols).clone();
    }
    Some(x)
}

/// Dimension of `span(ambient) / span(sub)` together with the ambient vectors
/// chosen to complete `sub` to a basis of `span(ambient)`.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub dimension: usize,
    pub representatives: Vec<Vec<Q>>,
}

/// Computes the quotient of `span(ambient)` by `span(sub)`.
///
/// The sub vectors are placed before the ambient vectors as columns of one
/// matrix; the ambient columns that become pivot columns are returned as
/// representatives, so the selection is deterministic and the representatives
/// extend `sub` to a basis of the ambient span.
///
/// Panics if some sub vector lies outside `span(ambient)`: for the intended
/// callers that means a coboundary escaped its cocycle space, which signals an
/// inconsistent complex rather than a recoverable state.
pub fn quotient_dimension(sub: &[Vec<Q>], ambient: &[Vec<Q>]) -> QuotientBasis {
    let len = sub
        .iter()
        .chain(ambient.iter())
        .map(Vec::len)
        .next()
        .unwrap_or(0);
    assert!(
        sub.iter().chain(ambient.iter()).all(|v| v.len() == len),
        "mixed vector lengths in quotient computation"
    );
    let ambient_rank = rref(&QMatrix::from_columns(ambient.to_vec())).rank;
    let mut all = sub.to_vec();
    all.extend(ambient.iter().cloned());
    let r = rref(&QMatrix::from_columns(all));
    assert!(
        r.rank == ambient_rank,
        "quotient sub vector outside the ambient span"
    );
    let representatives: Vec<Vec<Q>> = r
        .pivots
        .iter()
        .filter(|&&c| c >= sub.len())
        .map(|&c| ambient[c - sub.len()].clone())
        .collect();
    QuotientBasis {
        dimension: representatives.len(),
        representatives,
    }
}

// ---- Integer matrices and Smith normal form ----

/// Dense row-major matrix over arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Z>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix {
            rows,
            cols,
            entries: vec![Z::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Z>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "ragged rows in matrix construction"
        );
        ZMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Z::from(1));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Z {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Z) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = ZMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + self.at(i, k) * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &Z) {
        for j in 0..self.cols {
            let v = self.at(target, j) + factor * self.at(source, j);
            self.set(target, j, v);
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &Z) {
        for i in 0..self.rows {
            let v = self.at(i, target) + factor * self.at(i, source);
            self.set(i, target, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.at(i, j).clone();
            self.set(i, j, v);
        }
    }
}

/// Smith normal form data: the nonzero invariant factors in divisibility
/// order, the rank, and optionally the unimodular transforms with
/// `left * input * right` diagonal.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub diagonal: Vec<Z>,
    pub rank: usize,
    pub left: Option<ZMatrix>,
    pub right: Option<ZMatrix>,
}

/// Smith normal form by row/column gcd elimination.
///
/// The pivot at each step is a nonzero entry of minimal absolute value in the
/// remaining submatrix (first such scanning row-major), which keeps entry
/// growth modest at these sizes. Each diagonal entry is made to divide every
/// entry of the remaining submatrix before the elimination recurses, so the
/// returned diagonal `d1 | d2 | ...` is the invariant factor chain. All
/// diagonal entries are positive; a zero matrix yields an empty diagonal.
pub fn smith_normal_form(m: &ZMatrix, with_transforms: bool) -> SnfResult {
    let mut a = m.clone();
    let mut left = with_transforms.then(|| ZMatrix::identity(m.rows));
    let mut right = with_transforms.then(|| ZMatrix::identity(m.cols));
    let bound = m.rows.min(m.cols);
    let mut t = 0;
    while t < bound {
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            break;
        };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if let Some(l) = left.as_mut() {
            l.swap_rows(t, pi);
        }
        if let Some(r) = right.as_mut() {
            r.swap_cols(t, pj);
        }
        loop {
            // Clear the pivot column, re-selecting a smaller pivot whenever a
            // division leaves a remainder.
            let mut dirty = false;
            for i in t + 1..a.rows {
                if a.at(i, t).is_zero() {
                    continue;
                }
                let q = -(a.at(i, t) / a.at(t, t));
                a.add_row(i, t, &q);
                if let Some(l) = left.as_mut() {
                    l.add_row(i, t, &q);
                }
                if !a.at(i, t).is_zero() {
                    a.swap_rows(t, i);
                    if let Some(l) = left.as_mut() {
                        l.swap_rows(t, i);
                    }
                    dirty = true;
                }
            }
            for j in t + 1..a.cols {
                if a.at(t, j).is_zero() {
                    continue;
                }
                let q = -(a.at(t, j) / a.at(t, t));
                a.add_col(j, t, &q);
                if let Some(r) = right.as_mut() {
                    r.add_col(j, t, &q);
                }
                if !a.at(t, j).is_zero() {
                    a.swap_cols(t, j);
                    if let Some(r) = right.as_mut() {
                        r.swap_cols(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Enforce divisibility: fold any non-multiple into the pivot row
            // and restart the clearing loop.
            let offender = (t + 1..a.rows)
                .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(a.at(i, j) % a.at(t, t)).is_zero());
            match offender {
                Some((i, _)) => {
                    a.add_row(t, i, &Z::from(1));
                    if let Some(l) = left.as_mut() {
                        l.add_row(t, i, &Z::from(1));
                    }
                }
                None => break,
            }
        }
        if a.at(t, t).is_negative() {
            a.negate_row(t);
            if let Some(l) = left.as_mut() {
                l.negate_row(t);
            }
        }
        t += 1;
    }
    let diagonal: Vec<Z> = (0..t).map(|i| a.at(i, i).clone()).collect();
    SnfResult {
        rank: diagonal.len(),
        diagonal,
        left,
        right,
    }
}

/// First nonzero entry of minimal absolute value in the submatrix at `(t, t)`,
/// scanning row-major.
fn min_abs_entry(a: &ZMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let v = a.at(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.at(bi, bj).abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, q_ratio};

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    fn zm(rows: &[&[i64]]) -> ZMatrix {
        ZMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Z::from(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_identity_is_fixed() {
        let m = qm(&[&[1, 0], &[0, 1]]);
        let r = rref(&m);
        assert_eq!(r.matrix, m);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn rref_single_rank_matrix() {
        let r = rref(&qm(&[&[0, 2, 4], &[0, 1, 2]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![1]);
        assert_eq!(r.matrix, qm(&[&[0, 1, 2], &[0, 0, 0]]));
    }

    #[test]
    fn rref_with_fractions() {
        let m = QMatrix::from_rows(vec![
            vec![q_ratio(1, 2), q(1)],
            vec![q(1), q(3)],
        ]);
        let r = rref(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.matrix, qm(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn kernel_of_zero_matrix_is_standard_basis() {
        let basis = kernel_basis(&QMatrix::zeros(2, 3));
        assert_eq!(basis.len(), 3);
        for (i, v) in basis.iter().enumerate() {
            let mut e = vec![q(0); 3];
            e[i] = q(1);
            assert_eq!(v, &e);
        }
    }

    #[test]
    fn kernel_free_variables_in_column_order() {
        // x0 + x1 + x2 = 0 with pivot in column 0: free columns 1 and 2.
        let basis = kernel_basis(&qm(&[&[1, 1, 1]]));
        assert_eq!(basis, vec![vec![q(-1), q(1), q(0)], vec![q(-1), q(0), q(1)]]);
    }

    #[test]
    fn kernel_of_injective_map_is_empty() {
        assert!(kernel_basis(&qm(&[&[1, 0], &[0, 1], &[1, 1]])).is_empty());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = qm(&[&[2, -1, 3, 0], &[1, 1, 1, 1]]);
        for v in kernel_basis(&m) {
            assert!(m.mul_vec(&v).iter().all(Q::is_zero));
        }
    }

    #[test]
    fn solve_unique_system() {
        let m = qm(&[&[2, 0], &[0, 3]]);
        assert_eq!(solve(&m, &[q(4), q(9)]), Some(vec![q(2), q(3)]));
    }

    #[test]
    fn solve_underdetermined_zeroes_free_variables() {
        // x0 + x1 = 2 has canonical solution (2, 0).
        assert_eq!(solve(&qm(&[&[1, 1]]), &[q(2)]), Some(vec![q(2), q(0)]));
    }

    #[test]
    fn solve_reports_inconsistency() {
        let m = qm(&[&[1, 1], &[1, 1]]);
        assert_eq!(solve(&m, &[q(1), q(2)]), None);
    }

    #[test]
    fn quotient_of_plane_by_line() {
        let ambient = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let sub = vec![vec![q(1), q(1)]];
        let qb = quotient_dimension(&sub, &ambient);
        assert_eq!(qb.dimension, 1);
        // The first ambient vector already completes (1,1) to a basis.
        assert_eq!(qb.representatives, vec![vec![q(1), q(0)]]);
    }

    #[test]
    fn quotient_by_full_span_is_zero() {
        let ambient = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let sub = ambient.clone();
        assert_eq!(quotient_dimension(&sub, &ambient).dimension, 0);
    }

    #[test]
    fn quotient_with_empty_sub_returns_basis() {
        let ambient = vec![vec![q(1), q(1)], vec![q(2), q(2)], vec![q(0), q(1)]];
        let qb = quotient_dimension(&[], &ambient);
        assert_eq!(qb.dimension, 2);
        assert_eq!(
            qb.representatives,
            vec![vec![q(1), q(1)], vec![q(0), q(1)]]
        );
    }

    #[test]
    #[should_panic(expected = "outside the ambient span")]
    fn quotient_rejects_escaping_sub_vector() {
        let ambient = vec![vec![q(1), q(0)]];
        let sub = vec![vec![q(0), q(1)]];
        quotient_dimension(&sub, &ambient);
    }

    #[test]
    fn snf_of_diagonal_with_coprime_entries() {
        let r = smith_normal_form(&zm(&[&[2, 0], &[0, 3]]), false);
        assert_eq!(r.diagonal, vec![Z::from(1), Z::from(6)]);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn snf_of_zero_matrix_is_empty() {
        let r = smith_normal_form(&ZMatrix::zeros(2, 3), true);
        assert!(r.diagonal.is_empty());
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn snf_divisibility_chain_and_positivity() {
        let r = smith_normal_form(&zm(&[&[6, 4, 2], &[4, 8, 6], &[2, 6, 10]]), false);
        for w in r.diagonal.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "chain broken: {:?}", r.diagonal);
        }
        assert!(r.diagonal.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn snf_transforms_reconstruct_diagonal() {
        let m = zm(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let r = smith_normal_form(&m, true);
        let d = r.left.unwrap().mul(&m).mul(&r.right.unwrap());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expect = if i == j && i < r.diagonal.len() {
                    r.diagonal[i].clone()
                } else {
                    Z::zero()
                };
                assert_eq!(d.at(i, j), &expect, "at ({i},{j})");
            }
        }
    }

    #[test]
    fn snf_negative_entries_normalize_positive() {
        let r = smith_normal_form(&zm(&[&[-4]]), true);
        assert_eq!(r.diagonal, vec![Z::from(4)]);
    }
}
