use serde::{Deserialize, Serialize};

use super::field::Field;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A representation `[I | A]` with the identity block suppressed.
///
/// Row `i` of `a` carries the label `basis[i]`; column `j` carries `cobasis[j]`.
/// Labels are indices into the source ground set, so `basis` and `cobasis`
/// together partition `0..ground_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm<F: Field> {
    pub basis: Vec<usize>,
    pub cobasis: Vec<usize>,
    /// Dense `basis.len() x cobasis.len()` block.
    pub a: Vec<Vec<F>>,
}

/// Column permutation record of a standard form, enough to rebuild the
/// ground-set order from `[I | A]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    /// `order[k]` is the source column placed at position `k` of `[I | A]`.
    pub order: Vec<usize>,
}

impl<F: Field> StandardForm<F> {
    /// Greedy column pivoting: the basis is the set of pivot columns of the
    /// reduced row echelon form, in column order.
    pub fn from_matrix(m: &Matrix<F>) -> StandardForm<F> {
        let rref = m.rref();
        let basis = rref.pivot_columns();
        let cobasis = rref.free_columns();
        let a = rref
            .pivots
            .iter()
            .map(|&(r, _)| cobasis.iter().map(|&c| rref.rows[r][c].clone()).collect())
            .collect();
        StandardForm { basis, cobasis, a }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ground_size(&self) -> usize {
        self.basis.len() + self.cobasis.len()
    }

    pub fn permutation(&self) -> Permutation {
        Permutation { order: self.basis.iter().chain(&self.cobasis).copied().collect() }
    }

    /// `A` as a sparse matrix.
    pub fn a_matrix(&self) -> Matrix<F> {
        if self.a.is_empty() {
            return Matrix::zeros(0, self.cobasis.len());
        }
        Matrix::from_dense(&self.a)
    }

    /// The full `[I | A]` representation with columns in ground-set order.
    pub fn full_matrix(&self) -> Matrix<F> {
        let r = self.rank();
        let mut cols = vec![Vec::new(); self.ground_size()];
        for (i, &b) in self.basis.iter().enumerate() {
            cols[b] = vec![(i, F::one())];
        }
        for (j, &c) in self.cobasis.iter().enumerate() {
            cols[c] = (0..r).filter(|&i| !self.a[i][j].is_zero()).map(|i| (i, self.a[i][j].clone())).collect();
        }
        Matrix::from_columns(r, cols)
    }

    /// `{e}` together with the basis elements whose row is nonzero in column `e`.
    pub fn fundamental_circuit(&self, e: usize) -> Result<Vec<usize>> {
        let j = self
            .cobasis
            .iter()
            .position(|&c| c == e)
            .ok_or_else(|| Error::UnknownLabel(format!("element {e} is not in the cobasis")))?;
        let mut out: Vec<usize> = (0..self.rank()).filter(|&i| !self.a[i][j].is_zero()).map(|i| self.basis[i]).collect();
        out.push(e);
        out.sort_unstable();
        Ok(out)
    }

    /// Pivot on `a[i][j]`: the cobasis element of column `j` enters the basis
    /// at row `i` and the old basis element of row `i` leaves to column `j`.
    pub fn pivot(&mut self, i: usize, j: usize) {
        let p = self.a[i][j].clone();
        assert!(!p.is_zero(), "pivot on a zero entry");
        let inv = F::one().div(&p);
        let r = self.a.len();
        let n = self.cobasis.len();
        // New column j equals old column j scaled: a'[k][j] = -a[k][j]/p for k != i, a'[i][j] = 1/p.
        let pivot_row: Vec<F> = self.a[i].clone();
        for k in 0..r {
            if k == i {
                continue;
            }
            let akj = self.a[k][j].clone();
            if akj.is_zero() {
                continue;
            }
            let factor = akj.mul(&inv);
            for l in 0..n {
                if l == j || pivot_row[l].is_zero() {
                    continue;
                }
                self.a[k][l] = self.a[k][l].sub_mul(&factor, &pivot_row[l]);
            }
            self.a[k][j] = factor.neg();
        }
        for l in 0..n {
            if l != j {
                self.a[i][l] = self.a[i][l].mul(&inv);
            }
        }
        self.a[i][j] = inv;
        std::mem::swap(&mut self.basis[i], &mut self.cobasis[j]);
    }

    /// Drop basis row `i` (contraction of a basis element).
    pub fn remove_row(&mut self, i: usize) -> usize {
        self.a.remove(i);
        self.basis.remove(i)
    }

    /// Drop cobasis column `j` (deletion of a cobasis element).
    pub fn remove_column(&mut self, j: usize) -> usize {
        for row in &mut self.a {
            row.remove(j);
        }
        self.cobasis.remove(j)
    }

    /// Rank of the element subset `s` (given by a membership mask over the ground set).
    pub fn subset_rank(&self, in_set: &[bool]) -> usize {
        let rows: Vec<usize> = (0..self.rank()).filter(|&i| !in_set[self.basis[i]]).collect();
        let cols: Vec<usize> = (0..self.cobasis.len()).filter(|&j| in_set[self.cobasis[j]]).collect();
        let in_basis = self.basis.iter().filter(|&&b| in_set[b]).count();
        if rows.is_empty() || cols.is_empty() {
            return in_basis;
        }
        let mut sub: Vec<Vec<F>> = rows.iter().map(|&i| cols.iter().map(|&j| self.a[i][j].clone()).collect()).collect();
        in_basis + F::eliminate(&mut sub, cols.len()).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{Gf2, Rat};

    #[test]
    fn identity_has_empty_a() {
        let sf = StandardForm::from_matrix(&Matrix::<Rat>::identity(2));
        assert_eq!(sf.basis, vec![0, 1]);
        assert!(sf.cobasis.is_empty());
    }

    #[test]
    fn duplicated_column() {
        let m = Matrix::<Rat>::from_i64_rows(&[vec![2, 2], vec![1, 1]]);
        let sf = StandardForm::from_matrix(&m);
        assert_eq!(sf.basis, vec![0]);
        assert_eq!(sf.a, vec![vec![Rat::integer(1)]]);
        assert_eq!(sf.fundamental_circuit(1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn triangle_incidence_gf2() {
        // Edges 01, 02, 12 of a triangle.
        let m = Matrix::<Gf2>::from_i64_rows(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        let sf = StandardForm::from_matrix(&m);
        assert_eq!(sf.rank(), 2);
        assert_eq!(sf.a, vec![vec![Gf2::ONE], vec![Gf2::ONE]]);
    }

    #[test]
    fn pivot_preserves_column_space() {
        let m = Matrix::<Rat>::from_i64_rows(&[vec![1, 0, 2, 1], vec![0, 1, 3, -1]]);
        let sf = StandardForm::from_matrix(&m);
        let mut piv = sf.clone();
        piv.pivot(0, 0);
        let full = piv.full_matrix();
        for mask in 0u32..16 {
            let set: Vec<bool> = (0..4).map(|i| mask >> i & 1 == 1).collect();
            let idx: Vec<usize> = (0..4).filter(|&i| set[i]).collect();
            assert_eq!(m.column_rank(&idx), full.column_rank(&idx));
            assert_eq!(sf.subset_rank(&set), m.column_rank(&idx));
        }
    }

    #[test]
    fn loop_column_circuit() {
        let m = Matrix::<Gf2>::from_i64_rows(&[vec![1, 0], vec![0, 0]]);
        let sf = StandardForm::from_matrix(&m);
        assert_eq!(sf.fundamental_circuit(1).unwrap(), vec![1]);
        assert!(matches!(sf.fundamental_circuit(0), Err(Error::UnknownLabel(_))));
    }
}
