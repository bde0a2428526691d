use proptest::prelude::*;

use cellmat::exactla::{Field, Gf2, Matrix, Rat};
use cellmat::matroid::{catalog, AnyMatroid, CatalogName, LinearMatroid};

fn matrix_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..9).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-1i64..=1, c), r))
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn check_dual<F: Field>(m: &LinearMatroid<F>) -> Result<(), TestCaseError> {
    let d = m.dual();
    let n = m.len();
    prop_assert_eq!(d.rank() + m.rank(), n);
    for x in subsets(n) {
        let rest: Vec<usize> = (0..n).filter(|e| !x.contains(e)).collect();
        prop_assert_eq!(d.rank_of(&x), x.len() + m.rank_of(&rest) - m.rank());
    }
    Ok(())
}

fn check_circuits<F: Field>(m: &LinearMatroid<F>) -> Result<(), TestCaseError> {
    let circuits = m.circuits(None).unwrap();
    for c in &circuits {
        // Dependent, and every proper subset independent.
        prop_assert_eq!(m.rank_of(c), c.len() - 1);
        for skip in 0..c.len() {
            let sub: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &e)| e).collect();
            prop_assert_eq!(m.rank_of(&sub), sub.len());
        }
    }
    // Every dependent set contains one of them.
    for x in subsets(m.len()) {
        if m.rank_of(&x) < x.len() {
            prop_assert!(circuits.iter().any(|c| c.iter().all(|e| x.contains(e))));
        }
    }
    Ok(())
}

fn check_minor<F: Field>(m: &LinearMatroid<F>, del: &[usize], con: &[usize]) -> Result<(), TestCaseError> {
    let minor = m.minor_indices(del, con);
    let kept: Vec<usize> = (0..m.len()).filter(|e| !del.contains(e) && !con.contains(e)).collect();
    prop_assert_eq!(minor.len(), kept.len());
    let rc = m.rank_of(con);
    for x in subsets(kept.len()) {
        let labels: Vec<String> = x.iter().map(|&i| m.labels()[kept[i]].clone()).collect();
        let mut orig: Vec<usize> = x.iter().map(|&i| kept[i]).collect();
        orig.extend_from_slice(con);
        prop_assert_eq!(minor.subset_rank(&labels).unwrap(), m.rank_of(&orig) - rc);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_rank_formula(rows in matrix_rows()) {
        check_dual(&LinearMatroid::from_matrix(Matrix::<Rat>::from_i64_rows(&rows)))?;
        check_dual(&LinearMatroid::from_matrix(Matrix::<Gf2>::from_i64_rows(&rows)))?;
    }

    #[test]
    fn circuits_are_minimal_dependent(rows in matrix_rows()) {
        check_circuits(&LinearMatroid::from_matrix(Matrix::<Rat>::from_i64_rows(&rows)))?;
        check_circuits(&LinearMatroid::from_matrix(Matrix::<Gf2>::from_i64_rows(&rows)))?;
    }

    #[test]
    fn minor_ranks(rows in matrix_rows(), picks in prop::collection::vec(0u8..3, 8)) {
        let m = LinearMatroid::from_matrix(Matrix::<Rat>::from_i64_rows(&rows));
        let n = m.len();
        let del: Vec<usize> = (0..n).filter(|&e| picks[e] == 1).collect();
        let con: Vec<usize> = (0..n).filter(|&e| picks[e] == 2).collect();
        check_minor(&m, &del, &con)?;
    }

    #[test]
    fn components_share_circuits(rows in matrix_rows()) {
        let m = LinearMatroid::from_matrix(Matrix::<Gf2>::from_i64_rows(&rows));
        let comps = m.connected_components();
        let circuits = m.circuits(None).unwrap();
        let comp_of = |e: usize| comps.iter().position(|c| c.contains(&e)).unwrap();
        // Same component exactly when linked through a chain of circuits.
        let n = m.len();
        let mut link: Vec<usize> = (0..n).collect();
        for _ in 0..n {
            for c in &circuits {
                let lo = c.iter().map(|&e| link[e]).min().unwrap();
                for &e in c {
                    link[e] = lo;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(comp_of(a) == comp_of(b), a == b || link[a] == link[b]);
            }
        }
    }
}

#[test]
fn catalog_shapes() {
    for name in [CatalogName::U24, CatalogName::F7, CatalogName::F7star] {
        let m = catalog(name).unwrap().matroid;
        let (n, r) = name.shape();
        assert_eq!(m.len(), n);
        if let Some(r) = r {
            assert_eq!(m.rank(), r);
        }
    }
    let AnyMatroid::Gf2(f7) = catalog(CatalogName::F7).unwrap().matroid else { panic!("F7 is binary") };
    // Seven lines of three points each.
    assert_eq!(f7.circuits(Some(3)).unwrap().len(), 7);
    assert!(f7.find_k_separation(3).unwrap().is_none());
}
