//! Binary recognition of rational matroids and U24 minors.
//!
//! A rational matroid with standard form `[I | A]` is binary exactly when it
//! coincides with the binary matroid of `[I | supp A]`, i.e. when every
//! square submatrix of `A` is singular over Q exactly when its support is
//! singular over GF(2).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exactla::{determinant, Field, Gf2, Matrix, Rat, StandardForm};
use crate::matroid::{catalog, CatalogName, LinearMatroid, MinorSpec};
use crate::pointcloud::rng_for;

use super::minors::{minor_search, MinorCertificate};
use super::signing::is_regular;
use super::{Search, Verdict};

/// Ground sets up to this size are compared on every subset.
pub const EXHAUSTIVE_BINARY_LIMIT: usize = 12;
/// Random square submatrices compared above the exhaustive limit.
pub const BINARY_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCheck {
    pub binary: bool,
    /// False when a `binary` answer rests on random sampling. Non-binary
    /// answers are always exact.
    pub exact: bool,
}

fn support_matroid(sf: &StandardForm<Rat>) -> LinearMatroid<Gf2> {
    let n = sf.ground_size();
    let mut cols: Vec<Vec<(usize, Gf2)>> = vec![Vec::new(); n];
    for (i, &b) in sf.basis.iter().enumerate() {
        cols[b] = vec![(i, Gf2::ONE)];
    }
    for (j, &c) in sf.cobasis.iter().enumerate() {
        cols[c] = (0..sf.rank()).filter(|&i| !sf.a[i][j].is_zero()).map(|i| (i, Gf2::ONE)).collect();
    }
    LinearMatroid::from_matrix(Matrix::from_columns(sf.rank(), cols))
}

/// A 2x2 submatrix of `A` with no zero entry and nonzero determinant, as
/// `(rows, cols)`. Scans at most `budget` column pairs.
fn nonbinary_square(sf: &StandardForm<Rat>, budget: u64) -> Option<([usize; 2], [usize; 2])> {
    let (r, c) = (sf.rank(), sf.cobasis.len());
    let mut spent = 0u64;
    for j1 in 0..c {
        for j2 in j1 + 1..c {
            spent += 1;
            if spent > budget {
                return None;
            }
            // Rows where both columns are nonzero must all share one ratio.
            let mut first: Option<(usize, Rat)> = None;
            for i in 0..r {
                let (x, y) = (&sf.a[i][j1], &sf.a[i][j2]);
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                let ratio = Field::div(x, y);
                match &first {
                    None => first = Some((i, ratio)),
                    Some((i0, q)) if *q != ratio => return Some(([*i0, i], [j1, j2])),
                    _ => {}
                }
            }
        }
    }
    None
}

pub fn is_binary(m: &LinearMatroid<Rat>) -> BinaryCheck {
    let sf = m.standard_form();
    let n = m.len();
    if n <= EXHAUSTIVE_BINARY_LIMIT {
        let support = support_matroid(sf);
        let binary = (0u32..1 << n).all(|mask| {
            let sel: Vec<bool> = (0..n).map(|e| mask >> e & 1 == 1).collect();
            m.rank_of_mask(&sel) == support.rank_of_mask(&sel)
        });
        return BinaryCheck { binary, exact: true };
    }
    // A binary matroid with a representation over a field of characteristic
    // other than two is regular, so a decided regularity test decides this too.
    match is_regular(m).verdict {
        Verdict::Yes => return BinaryCheck { binary: true, exact: true },
        Verdict::No => return BinaryCheck { binary: false, exact: true },
        Verdict::Unknown => {}
    }
    if nonbinary_square(sf, u64::MAX).is_some() {
        return BinaryCheck { binary: false, exact: true };
    }
    // Compare random square submatrices of A over both fields.
    let (r, c) = (sf.rank(), sf.cobasis.len());
    let order_cap = r.min(c);
    if order_cap >= 3 {
        let mut rng = rng_for(n as u64 ^ (r as u64) << 32);
        for _ in 0..BINARY_SAMPLES {
            let k = rng.gen_range(3..=order_cap.min(8));
            let rows = rand::seq::index::sample(&mut rng, r, k).into_vec();
            let cols = rand::seq::index::sample(&mut rng, c, k).into_vec();
            let sub: Vec<Vec<Rat>> = rows.iter().map(|&i| cols.iter().map(|&j| sf.a[i][j].clone()).collect()).collect();
            let supp: Vec<Vec<Gf2>> = sub.iter().map(|row| row.iter().map(|x| Gf2(!x.is_zero())).collect()).collect();
            let dq = determinant(&Matrix::from_dense(&sub));
            let d2 = determinant(&Matrix::from_dense(&supp));
            if dq.is_zero() != d2.is_zero() {
                return BinaryCheck { binary: false, exact: true };
            }
        }
    }
    BinaryCheck { binary: true, exact: order_cap < 3 }
}

/// A U24 minor. A nonbinary 2x2 block of `A` gives one directly (contract the
/// other basis elements, delete the other non-basis elements); otherwise a
/// budgeted generic search runs unless the matroid is provably binary.
pub fn find_u24_minor(m: &LinearMatroid<Rat>, budget: u64, seed: u64) -> Search<MinorCertificate> {
    let Ok(u24) = catalog(CatalogName::U24) else { return Search::BudgetExceeded };
    let sf = m.standard_form();
    if let Some((rows, cols)) = nonbinary_square(sf, budget) {
        let contractions: Vec<usize> = sf.basis.iter().enumerate().filter(|(i, _)| !rows.contains(i)).map(|(_, &b)| b).collect();
        let deletions: Vec<usize> = sf.cobasis.iter().enumerate().filter(|(j, _)| !cols.contains(j)).map(|(_, &c)| c).collect();
        let spec = MinorSpec { deletions: m.labels_of(&deletions), contractions: m.labels_of(&contractions) };
        let mut kept = [sf.basis[rows[0]], sf.basis[rows[1]], sf.cobasis[cols[0]], sf.cobasis[cols[1]]];
        kept.sort_unstable();
        // Every bijection onto a uniform matroid is an isomorphism.
        let cert = MinorCertificate {
            target: CatalogName::U24,
            spec,
            bijection: kept.iter().enumerate().map(|(t, &e)| (m.labels()[e].clone(), (t + 1).to_string())).collect(),
        };
        if matches!(cert.verify(m, &u24), Ok(true)) {
            return Search::Found(cert);
        }
    }
    let check = is_binary(m);
    if check.binary && check.exact {
        return Search::Exhausted;
    }
    minor_search(m, &u24, budget, seed)
}
