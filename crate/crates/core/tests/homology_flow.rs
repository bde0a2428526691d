use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use cellmat::complex::CellComplex;
use cellmat::exactla::{Field, Gf2, Rat};
use cellmat::flow::{flow_report, integer_max_flow, lp_max_flow_matroid, min_cut, CapacityFunction};
use cellmat::homology::{betti, relative_h2_nonzero};
use cellmat::matroid::LinearMatroid;
use cellmat::pointcloud::rng_for;

/// Random triangles on six vertices plus the ring edges of one extra triangle,
/// with that ring closed by an attached cell.
fn fixture(seed: u64) -> (CellComplex, CellComplex, Vec<usize>) {
    let mut rng = rng_for(seed);
    let mut all: Vec<Vec<usize>> = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                all.push(vec![a, b, c]);
            }
        }
    }
    all.shuffle(&mut rng);
    let ring = all[0].clone();
    let t = rng.gen_range(1..=12);
    let mut cells = all[1..=t].to_vec();
    cells.extend([vec![ring[0], ring[1]], vec![ring[1], ring[2]], vec![ring[0], ring[2]]]);
    let r = CellComplex::from_simplices(cells, 2);
    let rp = r.attach_cell(r.ring_chain(&ring).unwrap()).unwrap();
    (r, rp, ring)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weak_duality(seed in any::<u64>(), caps in prop::collection::vec(1u64..4, 24)) {
        let (_, x, _) = fixture(seed);
        let mut h = CapacityFunction::uniform(1);
        for (label, c) in x.cell_labels(2).iter().zip(&caps) {
            h.set(label, *c);
        }
        let m = LinearMatroid::<Rat>::from_boundary(&x, 2);
        let l = m.index_of("l").unwrap();
        let flow = integer_max_flow(&m, l, &h).unwrap();
        let cut = min_cut(&m, l, &h).unwrap();
        let lp = lp_max_flow_matroid(&m, l, &h).unwrap();
        prop_assert!(flow.value <= cut.value);
        prop_assert!(Rat::integer(flow.value as i64) <= lp);
        prop_assert!(lp <= Rat::integer(cut.value as i64));
        // The decomposition adds up to the reported value.
        prop_assert_eq!(flow.circuits.iter().map(|(_, k)| k).sum::<u64>(), flow.value);
        let r = flow_report(&x, &h).unwrap();
        prop_assert_eq!(r.int_max_flow, Some(flow.value));
        prop_assert_eq!(r.lp_upper, lp.to_string());
    }

    #[test]
    fn coverage_is_relative_homology(seed in any::<u64>()) {
        let (r, rp, ring) = fixture(seed);
        // The new cell raises b2 exactly when its ring already bounds in R.
        let bounds = {
            let m = LinearMatroid::<Gf2>::from_boundary(&rp, 2);
            let l = m.index_of("l").unwrap();
            let others: Vec<usize> = (0..m.len()).filter(|&e| e != l).collect();
            m.rank_of(&others) == m.rank()
        };
        let b_r = betti::<Gf2>(&r).get(2);
        let b_rp = betti::<Gf2>(&rp).get(2);
        prop_assert_eq!(b_rp, b_r + usize::from(bounds));
        // The fence check wants an induced ring of length at least four.
        prop_assert!(relative_h2_nonzero(&r, &ring).is_err());
    }
}

#[test]
fn square_fence_coverage() {
    // Four triangles fill the square 0-1-2-3 through the centre 4.
    let fan = CellComplex::from_simplices([vec![0, 1, 4], vec![1, 2, 4], vec![2, 3, 4], vec![0, 3, 4]], 2);
    assert!(relative_h2_nonzero(&fan, &[0, 1, 2, 3]).unwrap());
    let open = CellComplex::from_simplices([vec![0, 1, 4], vec![1, 2, 4], vec![2, 3, 4], vec![0, 3]], 2);
    assert!(!relative_h2_nonzero(&open, &[0, 1, 2, 3]).unwrap());
    let x = fan.attach_cell(fan.ring_chain(&[0, 1, 2, 3]).unwrap()).unwrap();
    let r = flow_report(&x, &CapacityFunction::uniform(1)).unwrap();
    assert_eq!((r.int_max_flow, r.min_cut_value, r.lp_upper.as_str()), (Some(1), Some(1), "1"));
    assert!(Rat::parse_elem(&r.lp_upper).is_some());
}
