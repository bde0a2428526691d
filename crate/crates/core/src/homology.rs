//! Field homology of cell complexes and the homological side of matroid
//! connectivity.

use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, Simplex};
use crate::error::{Error, Result};
use crate::exactla::{Field, FieldTag, Gf2, Matrix};
use crate::matroid::SEPARATION_GUARD;

/// Reduced Betti numbers `b[0..=max_dim]` over a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub field: FieldTag,
    pub values: Vec<usize>,
}

impl BettiVector {
    pub fn get(&self, k: usize) -> usize {
        self.values.get(k).copied().unwrap_or(0)
    }
}

/// Ranks of `d_1..=d_max_dim` (index 0 unused).
fn boundary_ranks<F: Field>(x: &CellComplex) -> Vec<usize> {
    let mut ranks = vec![0; x.max_dim() + 2];
    for (k, r) in ranks.iter_mut().enumerate().take(x.max_dim() + 1).skip(1) {
        *r = x.boundary::<F>(k).rank();
    }
    ranks
}

pub fn betti<F: Field>(x: &CellComplex) -> BettiVector {
    let ranks = boundary_ranks::<F>(x);
    let values = (0..=x.max_dim())
        .map(|k| {
            let cells = x.num_cells(k);
            // Reduced degree 0: the augmentation has rank 1 on a nonempty complex.
            let down = if k == 0 { usize::from(cells > 0) } else { ranks[k] };
            cells - down - ranks[k + 1]
        })
        .collect();
    BettiVector { field: F::TAG, values }
}

/// Whether `R` with `l` glued along the fence ring has `H_2 != 0` over GF(2).
pub fn relative_h2_nonzero(r: &CellComplex, fence: &[usize]) -> Result<bool> {
    if !r.validate_fence(fence) {
        return Err(Error::InvalidFence);
    }
    let rp = r.attach_cell(r.ring_chain(fence)?)?;
    Ok(betti::<Gf2>(&rp).get(2) > 0)
}

/// Nullity of `H_{n-1}(E1bar cap E2bar) -> H_{n-1}(E1bar) + H_{n-1}(E2bar)`,
/// for a partition of the top cells (dimension `n = X.max_dim()`), given as
/// index lists into the `n`-cells.
///
/// The kernel consists of the classes of chains on the intersection that
/// bound on both sides, so its dimension is
/// `dim(B(E1bar) cap B(E2bar)) - dim B(K)` where every boundary space is the
/// image of an explicit inclusion into the chains of `X`.
pub fn mayer_vietoris_nullity<F: Field>(x: &CellComplex, e1: &[usize], e2: &[usize]) -> Result<usize> {
    let n = x.max_dim();
    if n == 0 {
        return Err(Error::PreconditionViolated("complex has no cells above dimension 0".into()));
    }
    check_partition(x.num_cells(n), e1, e2)?;
    let side1 = x.closure(n, e1);
    let side2 = x.closure(n, e2);
    let meet = intersection(&side1, &side2, n);
    let b1 = included_boundary::<F>(x, &side1, n);
    let b2 = included_boundary::<F>(x, &side2, n);
    let bk = included_boundary::<F>(x, &meet, n);
    let mut both = b1.clone();
    for col in b2.columns() {
        both.push_column(col.to_vec());
    }
    let (r1, r2, rsum, rk) = (b1.rank(), b2.rank(), both.rank(), bk.rank());
    Ok(r1 + r2 - rsum - rk)
}

fn check_partition(total: usize, e1: &[usize], e2: &[usize]) -> Result<()> {
    let mut seen = vec![0u8; total];
    for &i in e1.iter().chain(e2) {
        if i >= total {
            return Err(Error::PreconditionViolated(format!("cell index {i} out of range")));
        }
        seen[i] += 1;
    }
    if e1.is_empty() || e2.is_empty() || seen.iter().any(|&c| c != 1) {
        return Err(Error::PreconditionViolated("E1, E2 must be a partition into nonempty parts".into()));
    }
    Ok(())
}

/// Cells present in both subcomplexes (the attached cell is never shared
/// across a partition of the top cells, but is kept if it is).
fn intersection(a: &CellComplex, b: &CellComplex, n: usize) -> CellComplex {
    let mut simplices: Vec<Simplex> = Vec::new();
    for k in 0..=n {
        simplices.extend(a.simplices(k).iter().filter(|s| b.index_of(s).is_some()).cloned());
    }
    let meet = CellComplex::from_simplices(simplices, n);
    match (a.attached_cell(), b.attached_cell()) {
        (Some(_), Some(_)) if n >= 2 => {
            let chain = a.attached_cell().unwrap().boundary.iter().map(|&(e, s)| (meet.index_of(&a.simplices(1)[e]).unwrap(), s)).collect();
            meet.attach_cell(chain).expect("shared attached cell")
        }
        _ => meet,
    }
}

/// Image of `d_n` of a subcomplex, expressed in the `(n-1)`-chains of `X`.
fn included_boundary<F: Field>(x: &CellComplex, sub: &CellComplex, n: usize) -> Matrix<F> {
    let rows = x.num_cells(n - 1);
    let inclusion: Vec<usize> = sub.simplices(n - 1).iter().map(|s| x.index_of(s).expect("subcomplex of X")).collect();
    let cols = (0..sub.num_cells(n))
        .map(|i| sub.boundary_column(n, i).into_iter().map(|(r, s)| (inclusion[r], F::from_i64(s))).collect())
        .collect();
    Matrix::from_columns(rows, cols)
}

/// Homological connectivity test: for every `l < k` and every partition of
/// the top cells with both sides of size at least `l`, the nullity is at
/// least `l`.
pub fn connectivity_via_homology<F: Field>(x: &CellComplex, k: usize) -> Result<bool> {
    let n = x.max_dim();
    let cells = x.num_cells(n);
    if cells > SEPARATION_GUARD.min(20) {
        return Err(Error::TooLarge(format!("{cells} top cells; exhaustive partitions limited to 20")));
    }
    if cells < 2 || k < 2 {
        return Ok(true);
    }
    for m in 0u64..(1u64 << (cells - 1)) - 1 {
        let e1: Vec<usize> = (0..cells).filter(|&i| i == 0 || m >> (i - 1) & 1 == 1).collect();
        let e2: Vec<usize> = (0..cells).filter(|&i| i != 0 && m >> (i - 1) & 1 == 0).collect();
        let small = e1.len().min(e2.len());
        let lmax = small.min(k - 1);
        if lmax == 0 {
            continue;
        }
        let nu = mayer_vietoris_nullity::<F>(x, &e1, &e2)?;
        // The strongest requirement on this partition is l = lmax.
        if nu < lmax {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::simplex_skeleton;
    use crate::exactla::Rat;

    fn sphere() -> CellComplex {
        simplex_skeleton(4, 2)
    }

    #[test]
    fn basic_betti() {
        assert_eq!(betti::<Gf2>(&sphere()).values, vec![0, 0, 1]);
        let hollow = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![0, 2]], 1);
        assert_eq!(betti::<Rat>(&hollow).values, vec![0, 1]);
        assert_eq!(betti::<Gf2>(&simplex_skeleton(6, 2)).get(2), 10);
        let two_points = CellComplex::from_simplices([vec![0], vec![1]], 0);
        assert_eq!(betti::<Rat>(&two_points).values, vec![1]);
    }

    #[test]
    fn sphere_nullities() {
        let x = sphere();
        assert_eq!(mayer_vietoris_nullity::<Gf2>(&x, &[0, 1], &[2, 3]).unwrap(), 1);
        assert_eq!(mayer_vietoris_nullity::<Rat>(&x, &[0, 1, 2], &[3]).unwrap(), 1);
        let disjoint = CellComplex::from_simplices([vec![0, 1, 2], vec![3, 4, 5]], 2);
        assert_eq!(mayer_vietoris_nullity::<Rat>(&disjoint, &[0], &[1]).unwrap(), 0);
        assert!(mayer_vietoris_nullity::<Rat>(&x, &[0], &[1]).is_err());
    }

    #[test]
    fn connectivity_examples() {
        assert!(connectivity_via_homology::<Gf2>(&sphere(), 2).unwrap());
        let two = CellComplex::from_simplices(
            simplex_skeleton(4, 2).simplices(2).iter().cloned().chain(
                simplex_skeleton(4, 2).simplices(2).iter().map(|s| s.iter().map(|v| v + 10).collect()),
            ),
            2,
        );
        assert!(!connectivity_via_homology::<Gf2>(&two, 2).unwrap());
        let tri = CellComplex::from_simplices([vec![0, 1, 2]], 2);
        assert!(connectivity_via_homology::<Rat>(&tri, 2).unwrap());
    }

    #[test]
    fn fence_only_is_uncovered() {
        let ring = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 2);
        assert!(!relative_h2_nonzero(&ring, &[0, 1, 2, 3]).unwrap());
        let chord = CellComplex::from_simplices([vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3], vec![0, 2]], 2);
        assert!(matches!(relative_h2_nonzero(&chord, &[0, 1, 2, 3]), Err(Error::InvalidFence)));
        // A filled square: two triangles plus the attached cell form a sphere.
        let filled = CellComplex::from_simplices([vec![0, 1, 4], vec![1, 2, 4], vec![2, 3, 4], vec![0, 3, 4]], 2);
        assert!(relative_h2_nonzero(&filled, &[0, 1, 2, 3]).unwrap());
    }
}
