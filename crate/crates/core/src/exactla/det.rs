use serde::{Deserialize, Serialize};

use super::field::Field;
use super::matrix::Matrix;
use super::rational::Rat;
use crate::error::{Error, Result};

/// Determinant of a square matrix over any field by elimination.
pub fn determinant<F: Field>(m: &Matrix<F>) -> F {
    assert_eq!(m.num_rows(), m.num_cols(), "determinant of a non-square matrix");
    let n = m.num_rows();
    let mut a = m.to_dense();
    let mut det = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return F::zero();
        };
        if p != c {
            a.swap(p, c);
            det = det.neg();
        }
        let pv = a[c][c].clone();
        det = det.mul(&pv);
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].div(&pv);
            for k in c..n {
                let v = a[c][k].clone();
                a[r][k] = a[r][k].sub_mul(&f, &v);
            }
        }
    }
    det
}

/// Fraction-free (Bareiss) determinant of a small integer matrix.
pub fn int_determinant(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Location of a square submatrix whose determinant lies outside {-1, 0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmatrixViolation {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub determinant: i64,
}

/// Entries of `m` as small integers, rejecting anything outside {-1, 0, 1}.
pub fn signed_entries(m: &Matrix<Rat>) -> Result<Vec<Vec<i64>>> {
    let mut out = vec![vec![0i64; m.num_cols()]; m.num_rows()];
    for (r, c, v) in m.triplets() {
        match v.to_i64() {
            Some(x @ (-1 | 1)) => out[r][c] = x,
            _ => return Err(Error::EntryOutOfRange(format!("entry ({r},{c}) = {v}"))),
        }
    }
    Ok(out)
}

/// Scan square submatrices of order `1..=max_order` (in lexicographic order of
/// row then column subsets) and return the first with `|det| >= 2`.
pub fn submatrix_determinant_scan(m: &Matrix<Rat>, max_order: usize) -> Result<Option<SubmatrixViolation>> {
    let a = signed_entries(m)?;
    Ok(scan_entries(&a, max_order))
}

pub(crate) fn scan_entries(a: &[Vec<i64>], max_order: usize) -> Option<SubmatrixViolation> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let max_order = max_order.min(nr).min(nc);
    // Order 1 is always fine for {-1,0,1} entries; start at 2.
    for k in 2..=max_order {
        let mut rows: Vec<usize> = (0..k).collect();
        loop {
            let mut cols: Vec<usize> = (0..k).collect();
            loop {
                let sub: Vec<Vec<i64>> = rows.iter().map(|&r| cols.iter().map(|&c| a[r][c]).collect()).collect();
                let d = int_determinant(&sub);
                if d.abs() >= 2 {
                    return Some(SubmatrixViolation { rows: rows.clone(), cols: cols.clone(), determinant: d as i64 });
                }
                if !next_combination(&mut cols, nc) {
                    break;
                }
            }
            if !next_combination(&mut rows, nr) {
                break;
            }
        }
    }
    None
}

/// Determinant scan after TU-preserving reductions: rows or columns with at
/// most one nonzero and repeated rows or columns (up to sign) are dropped,
/// and the rest is split into connected blocks. Returns `None` when the
/// blocks would need more than `limit` determinants.
pub(crate) fn scan_entries_blocks(a: &[Vec<i64>], limit: f64) -> Option<Option<SubmatrixViolation>> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut row_alive = vec![true; nr];
    let mut col_alive = vec![true; nc];
    loop {
        let mut changed = false;
        for r in 0..nr {
            if row_alive[r] && (0..nc).filter(|&c| col_alive[c] && a[r][c] != 0).count() <= 1 {
                row_alive[r] = false;
                changed = true;
            }
        }
        for c in 0..nc {
            if col_alive[c] && (0..nr).filter(|&r| row_alive[r] && a[r][c] != 0).count() <= 1 {
                col_alive[c] = false;
                changed = true;
            }
        }
        let rows: Vec<usize> = (0..nr).filter(|&r| row_alive[r]).collect();
        let cols: Vec<usize> = (0..nc).filter(|&c| col_alive[c]).collect();
        let mut seen = std::collections::HashSet::new();
        for &r in &rows {
            let v: Vec<i64> = cols.iter().map(|&c| a[r][c]).collect();
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            if seen.contains(&v) || seen.contains(&neg) {
                row_alive[r] = false;
                changed = true;
            } else {
                seen.insert(v);
            }
        }
        let rows: Vec<usize> = (0..nr).filter(|&r| row_alive[r]).collect();
        seen.clear();
        for &c in &cols {
            let v: Vec<i64> = rows.iter().map(|&r| a[r][c]).collect();
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            if seen.contains(&v) || seen.contains(&neg) {
                col_alive[c] = false;
                changed = true;
            } else {
                seen.insert(v);
            }
        }
        if !changed {
            break;
        }
    }
    // Connected blocks of the remaining support.
    let mut block_of_row = vec![usize::MAX; nr];
    let mut block_of_col = vec![usize::MAX; nc];
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for start in 0..nr {
        if !row_alive[start] || block_of_row[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let (mut rows, mut cols) = (vec![start], Vec::new());
        block_of_row[start] = id;
        let mut stack = vec![(true, start)];
        while let Some((is_row, i)) = stack.pop() {
            if is_row {
                for c in 0..nc {
                    if col_alive[c] && a[i][c] != 0 && block_of_col[c] == usize::MAX {
                        block_of_col[c] = id;
                        cols.push(c);
                        stack.push((false, c));
                    }
                }
            } else {
                for r in 0..nr {
                    if row_alive[r] && a[r][i] != 0 && block_of_row[r] == usize::MAX {
                        block_of_row[r] = id;
                        rows.push(r);
                        stack.push((true, r));
                    }
                }
            }
        }
        rows.sort_unstable();
        cols.sort_unstable();
        blocks.push((rows, cols));
    }
    let cost: f64 = blocks.iter().map(|(r, c)| scan_size(r.len(), c.len(), r.len().min(c.len()))).sum();
    if cost > limit {
        return None;
    }
    for (rows, cols) in &blocks {
        let sub: Vec<Vec<i64>> = rows.iter().map(|&r| cols.iter().map(|&c| a[r][c]).collect()).collect();
        if let Some(v) = scan_entries(&sub, rows.len().min(cols.len())) {
            return Some(Some(SubmatrixViolation {
                rows: v.rows.iter().map(|&i| rows[i]).collect(),
                cols: v.cols.iter().map(|&j| cols[j]).collect(),
                determinant: v.determinant,
            }));
        }
    }
    Some(None)
}

/// Advance a sorted k-subset of `0..n` to the next one in lexicographic order.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of `k x k` submatrices of an `nr x nc` matrix for k up to `max_order`.
pub fn scan_size(nr: usize, nc: usize, max_order: usize) -> f64 {
    let binom = |n: usize, k: usize| -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    (1..=max_order.min(nr).min(nc)).map(|k| binom(nr, k) * binom(nc, k)).sum()
}
