use proptest::prelude::*;

use cellmat::exactla::{determinant, int_determinant, submatrix_determinant_scan, Field, Gf2, Matrix, Rat, StandardForm};

/// Cofactor expansion in i128.
fn laplace(m: &[Vec<i64>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] as i128 * laplace(&minor)
        })
        .sum()
}

/// Rank over GF(2) by bitmask elimination.
fn gf2_rank(rows: &[Vec<i64>]) -> usize {
    let mut v: Vec<u64> = rows.iter().map(|r| r.iter().enumerate().fold(0, |m, (j, &x)| m | ((x & 1) as u64) << j)).collect();
    let mut rank = 0;
    for bit in 0..64 {
        if let Some(p) = (rank..v.len()).find(|&i| v[i] >> bit & 1 == 1) {
            v.swap(rank, p);
            for i in 0..v.len() {
                if i != rank && v[i] >> bit & 1 == 1 {
                    v[i] ^= v[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

fn square(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
}

fn rect() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..9).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(0i64..2, c), r))
}

#[test]
fn rational_arithmetic() {
    let a = Rat::new(3, 4);
    let b = Rat::new(-5, 6);
    assert_eq!(a.add(&b), Rat::new(-1, 12));
    assert_eq!(a.div(&b), Rat::new(-9, 10));
    assert_eq!(Rat::parse_elem("-6/8"), Some(Rat::new(-3, 4)));
    assert_eq!(Rat::new(7, 1).to_string(), "7");
}

#[test]
fn scan_finds_a_bad_minor() {
    let m = Matrix::<Rat>::from_i64_rows(&[vec![1, 1, 0], vec![1, -1, 1], vec![0, 1, 1]]);
    let v = submatrix_determinant_scan(&m, 3).unwrap().expect("the 2x2 block has determinant -2");
    assert!(v.determinant.abs() > 1);
    let tu = Matrix::<Rat>::from_i64_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]);
    assert!(submatrix_determinant_scan(&tu, 3).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn determinant_agrees_with_cofactors(m in (1usize..6).prop_flat_map(square)) {
        let expect = laplace(&m);
        prop_assert_eq!(int_determinant(&m), expect);
        let d = determinant(&Matrix::<Rat>::from_i64_rows(&m));
        prop_assert_eq!(d, Rat::integer(expect as i64));
        prop_assert_eq!(determinant(&Matrix::<Gf2>::from_i64_rows(&m)), Gf2(expect.rem_euclid(2) == 1));
    }

    #[test]
    fn gf2_rank_agrees(m in rect()) {
        let a = Matrix::<Gf2>::from_i64_rows(&m);
        prop_assert_eq!(a.rank(), gf2_rank(&m));
        prop_assert_eq!(a.transpose().rank(), a.rank());
    }

    #[test]
    fn kernel_vectors_vanish(m in rect()) {
        let a = Matrix::<Rat>::from_i64_rows(&m);
        let ker = a.kernel_basis();
        prop_assert_eq!(ker.len() + a.rank(), a.num_cols());
        for v in ker {
            for row in a.to_dense() {
                let s = row.iter().zip(&v).fold(Rat::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
                prop_assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn standard_form_preserves_rank(m in rect()) {
        let a = Matrix::<Rat>::from_i64_rows(&m);
        let sf = StandardForm::from_matrix(&a);
        prop_assert_eq!(sf.rank(), a.rank());
        prop_assert_eq!(sf.ground_size(), a.num_cols());
    }
}
