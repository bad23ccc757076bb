//! Exact linear algebra over the rationals.
//!
//! Matrices are stored row-major with sorted sparse rows. Everything here is
//! exact; there is no floating point path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Ground field element.
pub type Scalar = BigRational;

/// Dense column vector.
pub type Vector = Vec<Scalar>;

/// Sparse vector keyed by basis index.
pub type SparseVec = BTreeMap<usize, Scalar>;

pub fn q(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Scalar::one();
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// `acc += c * v` on sparse vectors, dropping cancelled entries.
pub fn axpy(acc: &mut SparseVec, c: &Scalar, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        add_entry(acc, i, c * x);
    }
}

pub fn add_entry(acc: &mut SparseVec, i: usize, x: Scalar) {
    if x.is_zero() {
        return;
    }
    let slot = acc.entry(i).or_insert_with(Scalar::zero);
    *slot += x;
    if slot.is_zero() {
        acc.remove(&i);
    }
}

pub fn sparse_to_dense(v: &SparseVec, n: usize) -> Vector {
    let mut out = zero_vec(n);
    for (&i, x) in v {
        out[i] = x.clone();
    }
    out
}

pub fn dense_to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Row-major sparse matrix with canonical (sorted, zero-free) rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Scalar)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Scalar::one()));
        }
        m
    }

    /// Builds from triplets; duplicate positions are summed.
    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut acc: Vec<SparseVec> = vec![SparseVec::new(); rows];
        for (r, c, x) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of bounds {rows}x{cols}");
            add_entry(&mut acc[r], c, x);
        }
        SparseMatrix { rows, cols, data: acc.into_iter().map(|row| row.into_iter().collect()).collect() }
    }

    pub fn from_dense(rows: &[Vector]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols);
                r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect()
            })
            .collect();
        SparseMatrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let entries = columns.iter().enumerate().flat_map(|(j, col)| {
            assert_eq!(col.len(), rows);
            col.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(i, x)| (i, j, x.clone()))
        });
        Self::from_triplets(rows, columns.len(), entries)
    }

    pub fn from_sparse_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let entries = columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(&i, x)| (i, j, x.clone())));
        Self::from_triplets(rows, columns.len(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, Scalar)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.data[r].binary_search_by_key(&c, |(j, _)| *j) {
            Ok(k) => self.data[r][k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, x)| (r, *c, x)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn to_dense(&self) -> Vec<Vector> {
        let mut out = vec![zero_vec(self.cols); self.rows];
        for (r, c, x) in self.entries() {
            out[r][c] = x.clone();
        }
        out
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        let mut cols = vec![zero_vec(self.rows); self.cols];
        for (r, c, x) in self.entries() {
            cols[c][r] = x.clone();
        }
        cols
    }

    pub fn sparse_columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for (r, c, x) in self.entries() {
            cols[c].insert(r, x.clone());
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.entries().map(|(r, c, x)| (c, r, x.clone())))
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().fold(Scalar::zero(), |acc, (j, x)| if v[*j].is_zero() { acc } else { acc + x * &v[*j] }))
            .collect()
    }

    pub fn mul_sparse(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = Scalar::zero();
            for (j, x) in row {
                if let Some(y) = v.get(j) {
                    acc += x * y;
                }
            }
            if !acc.is_zero() {
                out.insert(r, acc);
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            let mut acc = SparseVec::new();
            for (k, x) in row {
                for (j, y) in &other.data[*k] {
                    add_entry(&mut acc, *j, x * y);
                }
            }
            data.push(acc.into_iter().collect());
        }
        SparseMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        self.lin_comb(&Scalar::one(), other, &Scalar::one())
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.lin_comb(&Scalar::one(), other, &-Scalar::one())
    }

    fn lin_comb(&self, a: &Scalar, other: &SparseMatrix, b: &Scalar) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries()
            .map(|(r, c, x)| (r, c, a * x))
            .chain(other.entries().map(|(r, c, x)| (r, c, b * x)))
            .collect::<Vec<_>>();
        Self::from_triplets(self.rows, self.cols, entries)
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        Self::from_triplets(self.rows, self.cols, self.entries().map(|(r, j, x)| (r, j, c * x)).collect::<Vec<_>>())
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut entries = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, x) in &self.data[r] {
                if let Some(&k) = col_pos.get(c) {
                    entries.push((i, k, x.clone()));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), entries)
    }
}

/// Output of [`row_reduce`].
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: SparseMatrix,
}

fn sub_scaled_row(target: &[(usize, Scalar)], factor: &Scalar, pivot_row: &[(usize, Scalar)]) -> Vec<(usize, Scalar)> {
    let mut out = Vec::with_capacity(target.len() + pivot_row.len());
    let (mut a, mut b) = (0, 0);
    while a < target.len() || b < pivot_row.len() {
        let ca = target.get(a).map(|e| e.0);
        let cb = pivot_row.get(b).map(|e| e.0);
        match (ca, cb) {
            (Some(x), Some(y)) if x == y => {
                let v = &target[a].1 - factor * &pivot_row[b].1;
                if !v.is_zero() {
                    out.push((x, v));
                }
                a += 1;
                b += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(target[a].clone());
                a += 1;
            }
            (Some(_), None) => {
                out.push(target[a].clone());
                a += 1;
            }
            (_, Some(y)) => {
                out.push((y, -(factor * &pivot_row[b].1)));
                b += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn magnitude_key(x: &Scalar) -> (u64, u64) {
    (x.numer().bits() + x.denom().bits(), 0)
}

/// Reduced row-echelon form. Columns are processed left to right; among
/// candidate rows the pivot is the entry of smallest size (numerator plus
/// denominator bit length, then absolute value), ties broken by row index.
pub fn row_reduce(m: &SparseMatrix) -> RowReduction {
    let mut rows: Vec<Vec<(usize, Scalar)>> = m.data.iter().filter(|r| !r.is_empty()).cloned().collect();
    let mut pivots = Vec::new();
    let mut done = 0usize;
    for col in 0..m.cols {
        if done == rows.len() {
            break;
        }
        let mut best: Option<usize> = None;
        for r in done..rows.len() {
            if let Some((c, x)) = rows[r].first() {
                if *c == col {
                    best = match best {
                        None => Some(r),
                        Some(b) => {
                            let xb = &rows[b][0].1;
                            let (kx, kb) = (magnitude_key(x), magnitude_key(xb));
                            if kx < kb || (kx == kb && x.abs() < xb.abs()) {
                                Some(r)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
        }
        let Some(p) = best else { continue };
        rows.swap(done, p);
        let lead = rows[done][0].1.clone();
        if !lead.is_one() {
            let inv = lead.recip();
            for e in rows[done].iter_mut() {
                e.1 = &e.1 * &inv;
            }
        }
        let pivot_row = rows[done].clone();
        for r in 0..rows.len() {
            if r == done {
                continue;
            }
            let factor = match rows[r].binary_search_by_key(&col, |e| e.0) {
                Ok(k) => rows[r][k].1.clone(),
                Err(_) => continue,
            };
            rows[r] = sub_scaled_row(&rows[r], &factor, &pivot_row);
        }
        pivots.push(col);
        done += 1;
        // Rows below `done` keep sorted leading entries >= col+1 after elimination.
        rows[done..].sort_by_key(|r| r.first().map_or(usize::MAX, |e| e.0));
    }
    rows.truncate(done);
    let rank = done;
    let mut reduced = SparseMatrix::zeros(rank, m.cols);
    reduced.data = rows;
    RowReduction { rank, pivots, reduced }
}

pub fn rank(m: &SparseMatrix) -> usize {
    row_reduce(m).rank
}

/// Basis of the null space. One vector per free column, with a 1 in that column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vector> {
    let rr = row_reduce(m);
    let pivot_set: BTreeMap<usize, usize> = rr.pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !pivot_set.contains_key(c)) {
        let mut v = zero_vec(m.cols);
        v[free] = Scalar::one();
        for (i, &pc) in rr.pivots.iter().enumerate() {
            let x = rr.reduced.get(i, free);
            if !x.is_zero() {
                v[pc] = -x;
            }
        }
        out.push(v);
    }
    out
}

/// Standard basis vectors completing `span(sub)` to the whole space.
pub fn quotient_representatives(sub: &[Vector], ambient_dim: usize) -> Vec<Vector> {
    complement_indices(sub, ambient_dim).into_iter().map(|j| unit_vec(ambient_dim, j)).collect()
}

/// Coordinates `j` such that `{e_j}` complements `span(sub)`.
pub fn complement_indices(sub: &[Vector], ambient_dim: usize) -> Vec<usize> {
    let m = if sub.is_empty() { SparseMatrix::zeros(0, ambient_dim) } else { SparseMatrix::from_dense(sub) };
    let rr = row_reduce(&m);
    (0..ambient_dim).filter(|j| !rr.pivots.contains(j)).collect()
}

/// A maximal independent subfamily of `vectors`, in order.
pub fn independent_subset(vectors: &[Vector]) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = SparseMatrix::from_columns(vectors[0].len(), vectors);
    row_reduce(&m).pivots
}

/// Basis of the row space of `rows` in reduced form.
pub fn span_basis(vectors: &[Vector], ambient_dim: usize) -> Vec<Vector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let rr = row_reduce(&SparseMatrix::from_dense(vectors));
    let _ = ambient_dim;
    rr.reduced.to_dense()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &SparseMatrix, b: &[Scalar]) -> Option<Vector> {
    assert_eq!(b.len(), m.rows);
    let mut entries: Vec<(usize, usize, Scalar)> = m.entries().map(|(r, c, x)| (r, c, x.clone())).collect();
    for (r, x) in b.iter().enumerate() {
        if !x.is_zero() {
            entries.push((r, m.cols, x.clone()));
        }
    }
    let aug = SparseMatrix::from_triplets(m.rows, m.cols + 1, entries);
    let rr = row_reduce(&aug);
    if rr.pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = zero_vec(m.cols);
    for (i, &pc) in rr.pivots.iter().enumerate() {
        x[pc] = rr.reduced.get(i, m.cols);
    }
    Some(x)
}

pub fn inverse(m: &SparseMatrix) -> Option<SparseMatrix> {
    if m.rows != m.cols {
        return None;
    }
    let n = m.rows;
    let entries = m
        .entries()
        .map(|(r, c, x)| (r, c, x.clone()))
        .chain((0..n).map(|i| (i, n + i, Scalar::one())))
        .collect::<Vec<_>>();
    let rr = row_reduce(&SparseMatrix::from_triplets(n, 2 * n, entries));
    if rr.rank < n || rr.pivots[n - 1] >= n {
        return None;
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Some(rr.reduced.select(&rows, &cols))
}

/// Coordinates with respect to a fixed independent family.
#[derive(Clone, Debug)]
pub struct CoordinateSystem {
    ambient: usize,
    basis: Vec<Vector>,
    pivot_rows: Vec<usize>,
    inv: SparseMatrix,
}

impl CoordinateSystem {
    /// Panics if the vectors are dependent.
    pub fn new(ambient: usize, basis: Vec<Vector>) -> Self {
        let k = basis.len();
        if k == 0 {
            return CoordinateSystem { ambient, basis, pivot_rows: Vec::new(), inv: SparseMatrix::zeros(0, 0) };
        }
        let rr = row_reduce(&SparseMatrix::from_dense(&basis));
        assert_eq!(rr.rank, k, "coordinate system on dependent vectors");
        let pivot_rows = rr.pivots.clone();
        let m = SparseMatrix::from_columns(ambient, &basis).select(&pivot_rows, &(0..k).collect::<Vec<_>>());
        let inv = inverse(&m).expect("pivot minor invertible");
        CoordinateSystem { ambient, basis, pivot_rows, inv }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Coordinates of `v` if it lies in the span.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient);
        let k = self.basis.len();
        if k == 0 {
            return if is_zero_vec(v) { Some(Vec::new()) } else { None };
        }
        let restricted: Vector = self.pivot_rows.iter().map(|&r| v[r].clone()).collect();
        let c = self.inv.mul_vec(&restricted);
        let mut back = zero_vec(self.ambient);
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for (i, x) in self.basis[j].iter().enumerate() {
                if !x.is_zero() {
                    back[i] += cj * x;
                }
            }
        }
        if back.as_slice() == v {
            Some(c)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn identity_and_zero() {
        let rr = row_reduce(&SparseMatrix::identity(2));
        assert_eq!((rr.rank, rr.pivots.clone()), (2, vec![0, 1]));
        let rr = row_reduce(&SparseMatrix::zeros(3, 4));
        assert_eq!(rr.rank, 0);
        assert!(rr.pivots.is_empty());
        assert!(kernel_basis(&SparseMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&SparseMatrix::zeros(3, 3)).len(), 3);
    }

    #[test]
    fn rank_one_by_hand() {
        // [[1,2],[2,4]]: second row is twice the first.
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_of_row_sum() {
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k, vec![vec![q(-1), q(1)]]);
    }

    #[test]
    fn quotient_reps() {
        assert!(quotient_representatives(&[unit_vec(2, 0), unit_vec(2, 1)], 2).is_empty());
        assert_eq!(quotient_representatives(&[], 2).len(), 2);
        let reps = quotient_representatives(&[vec![q(1), q(1)]], 2);
        assert_eq!(reps.len(), 1);
        assert_eq!(rank(&SparseMatrix::from_dense(&[vec![q(1), q(1)], reps[0].clone()])), 2);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = solve(&a, &[q(3), q(2)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), SparseMatrix::identity(2));
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[q(1), q(2)]).is_none());
        assert!(inverse(&m(&[&[1, 1], &[1, 1]])).is_none());
    }

    #[test]
    fn coordinates() {
        let cs = CoordinateSystem::new(3, vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]]);
        assert_eq!(cs.coords(&[q(1), q(3), q(2)]), Some(vec![q(1), q(2)]));
        assert_eq!(cs.coords(&[q(1), q(0), q(0)]), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = SparseMatrix> {
            (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r)
                    .prop_map(|rows| SparseMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>()))
            })
        }

        proptest! {
            #[test]
            fn rank_nullity(a in matrix()) {
                let k = kernel_basis(&a);
                prop_assert_eq!(rank(&a) + k.len(), a.cols());
                for v in &k {
                    prop_assert!(is_zero_vec(&a.mul_vec(v)));
                }
            }

            #[test]
            fn reduction_idempotent(a in matrix()) {
                let once = row_reduce(&a);
                let twice = row_reduce(&once.reduced);
                prop_assert_eq!(once.reduced, twice.reduced);
                prop_assert_eq!(once.pivots, twice.pivots);
            }
        }
    }
}
