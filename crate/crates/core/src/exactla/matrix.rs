use std::collections::BTreeMap;

use super::field::{Field, FieldTag, Gf2};
use super::rational::Rat;

/// Sparse exact matrix stored column by column; zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: Vec<Vec<(usize, F)>>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Matrix<F> {
        Matrix { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Matrix<F> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.cols[i].push((i, F::one()));
        }
        m
    }

    /// Build from sparse columns. Entries may arrive in any order; zeros and
    /// duplicates are folded (duplicates are summed).
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, F)>>) -> Matrix<F> {
        let cols = columns
            .into_iter()
            .map(|c| {
                let mut acc: BTreeMap<usize, F> = BTreeMap::new();
                for (r, v) in c {
                    assert!(r < rows, "row index {r} out of range {rows}");
                    let e = acc.entry(r).or_insert_with(F::zero);
                    *e = e.add(&v);
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Matrix { rows, cols }
    }

    pub fn from_dense(rows: &[Vec<F>]) -> Matrix<F> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.cols[c].push((r, v.clone()));
                }
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Matrix<F> {
        let dense: Vec<Vec<F>> = rows.iter().map(|r| r.iter().map(|&v| F::from_i64(v)).collect()).collect();
        Matrix::from_dense(&dense)
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn field(&self) -> FieldTag {
        F::TAG
    }

    pub fn column(&self, c: usize) -> &[(usize, F)] {
        &self.cols[c]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[(usize, F)]> {
        self.cols.iter().map(Vec::as_slice)
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        self.cols[c]
            .binary_search_by_key(&r, |(i, _)| *i)
            .map(|k| self.cols[c][k].1.clone())
            .unwrap_or_else(|_| F::zero())
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        assert!(r < self.rows && c < self.cols.len());
        let col = &mut self.cols[c];
        match col.binary_search_by_key(&r, |(i, _)| *i) {
            Ok(k) if v.is_zero() => {
                col.remove(k);
            }
            Ok(k) => col[k].1 = v,
            Err(_) if v.is_zero() => {}
            Err(k) => col.insert(k, (r, v)),
        }
    }

    pub fn push_column(&mut self, col: Vec<(usize, F)>) {
        let m = Matrix::from_columns(self.rows, vec![col]);
        self.cols.extend(m.cols);
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// All nonzero entries as `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut d = vec![vec![F::zero(); self.cols.len()]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut t = Matrix::zeros(self.cols.len(), self.rows);
        for (r, c, v) in self.triplets() {
            t.cols[r].push((c, v.clone()));
        }
        t
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix<F> {
        Matrix { rows: self.rows, cols: idx.iter().map(|&c| self.cols[c].clone()).collect() }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<F> {
        let mut pos = vec![usize::MAX; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            pos[r] = i;
        }
        let cols = cols
            .iter()
            .map(|&c| {
                let mut col: Vec<(usize, F)> = self.cols[c]
                    .iter()
                    .filter(|(r, _)| pos[*r] != usize::MAX)
                    .map(|(r, v)| (pos[*r], v.clone()))
                    .collect();
                col.sort_by_key(|(r, _)| *r);
                col
            })
            .collect();
        Matrix { rows: rows.len(), cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.num_cols(), other.num_rows(), "dimension mismatch");
        let cols = other
            .cols
            .iter()
            .map(|oc| {
                let mut acc: BTreeMap<usize, F> = BTreeMap::new();
                for (k, b) in oc {
                    for (r, a) in &self.cols[*k] {
                        let e = acc.entry(*r).or_insert_with(F::zero);
                        *e = e.add(&a.mul(b));
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Matrix { rows: self.rows, cols }
    }

    /// Reduced row echelon form of a dense copy.
    pub fn rref(&self) -> Rref<F> {
        let mut rows = self.to_dense();
        let pivots = F::eliminate(&mut rows, self.num_cols());
        Rref { rows, pivots, ncols: self.num_cols() }
    }

    pub fn rank(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        // Eliminate on the shorter side.
        if self.rows > self.cols.len() {
            let mut rows = self.transpose().to_dense();
            F::eliminate(&mut rows, self.rows).len()
        } else {
            self.rref().pivots.len()
        }
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        self.rref().kernel_basis()
    }

    /// Rank of the columns listed in `idx`.
    pub fn column_rank(&self, idx: &[usize]) -> usize {
        self.select_columns(idx).rank()
    }
}

impl Matrix<Rat> {
    /// Entrywise reduction mod 2. Panics on even denominators.
    pub fn mod2(&self) -> Matrix<Gf2> {
        let cols = self
            .cols
            .iter()
            .map(|c| {
                c.iter()
                    .filter_map(|(r, v)| {
                        let bit = v.mod2().expect("even denominator has no mod-2 reduction");
                        bit.then_some((*r, Gf2::ONE))
                    })
                    .collect()
            })
            .collect();
        Matrix { rows: self.rows, cols }
    }
}

impl Matrix<Gf2> {
    /// Lift a binary matrix to the rationals with every nonzero entry `+1`.
    pub fn lift(&self) -> Matrix<Rat> {
        let cols = self.cols.iter().map(|c| c.iter().map(|(r, _)| (*r, Rat::integer(1))).collect()).collect();
        Matrix { rows: self.rows, cols }
    }
}

/// Result of reduced row echelon elimination.
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    /// Dense rows after elimination (row order is the original one).
    pub rows: Vec<Vec<F>>,
    /// `(row, col)` pivots in increasing column order.
    pub pivots: Vec<(usize, usize)>,
    pub ncols: usize,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(_, c)| c).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &(_, c) in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![F::zero(); self.ncols];
                v[f] = F::one();
                for &(r, c) in &self.pivots {
                    v[c] = self.rows[r][f].neg();
                }
                v
            })
            .collect()
    }
}

/// Field-tagged matrix for code paths that must handle either coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactMatrix {
    Gf2(Matrix<Gf2>),
    Rational(Matrix<Rat>),
}

impl ExactMatrix {
    pub fn field(&self) -> FieldTag {
        match self {
            ExactMatrix::Gf2(_) => FieldTag::Gf2,
            ExactMatrix::Rational(_) => FieldTag::Rational,
        }
    }

    pub fn num_rows(&self) -> usize {
        match self {
            ExactMatrix::Gf2(m) => m.num_rows(),
            ExactMatrix::Rational(m) => m.num_rows(),
        }
    }

    pub fn num_cols(&self) -> usize {
        match self {
            ExactMatrix::Gf2(m) => m.num_cols(),
            ExactMatrix::Rational(m) => m.num_cols(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ExactMatrix::Gf2(m) => m.rank(),
            ExactMatrix::Rational(m) => m.rank(),
        }
    }

    pub fn nullity(&self) -> usize {
        self.num_cols() - self.rank()
    }

    pub fn as_gf2(&self) -> Option<&Matrix<Gf2>> {
        match self {
            ExactMatrix::Gf2(m) => Some(m),
            ExactMatrix::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Matrix<Rat>> {
        match self {
            ExactMatrix::Rational(m) => Some(m),
            ExactMatrix::Gf2(_) => None,
        }
    }
}

impl From<Matrix<Gf2>> for ExactMatrix {
    fn from(m: Matrix<Gf2>) -> Self {
        ExactMatrix::Gf2(m)
    }
}

impl From<Matrix<Rat>> for ExactMatrix {
    fn from(m: Matrix<Rat>) -> Self {
        ExactMatrix::Rational(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_identity_rank() {
        assert_eq!(Matrix::<Rat>::zeros(3, 4).rank(), 0);
        assert_eq!(Matrix::<Gf2>::identity(5).rank(), 5);
        assert!(Matrix::<Rat>::identity(4).kernel_basis().is_empty());
    }

    #[test]
    fn field_dependent_rank() {
        // [[1,1],[1,-1]] has determinant -2: full rank over Q, rank 1 over GF(2).
        let q = Matrix::<Rat>::from_i64_rows(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(q.rank(), 2);
        assert_eq!(q.mod2().rank(), 1);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = Matrix::<Rat>::from_i64_rows(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, -1, 2]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 4 - m.rank());
        for v in ker {
            let col: Vec<(usize, Rat)> = v.into_iter().enumerate().collect();
            let prod = m.mul(&Matrix::from_columns(4, vec![col]));
            assert!(prod.is_zero());
        }
    }

    #[test]
    fn set_get_roundtrip_and_zero_folding() {
        let mut m = Matrix::<Rat>::zeros(2, 2);
        m.set(1, 0, Rat::integer(3));
        assert_eq!(m.get(1, 0), Rat::integer(3));
        m.set(1, 0, Rat::integer(0));
        assert_eq!(m.nnz(), 0);
        let f = Matrix::<Gf2>::from_columns(2, vec![vec![(0, Gf2::ONE), (0, Gf2::ONE)], vec![]]);
        assert_eq!(f.nnz(), 0);
    }
}
