use proptest::prelude::*;

use cellmat::pointcloud::{
    derive_seed, distance, fence_ring_is_valid, make_fence, read_cloud, sample, write_cloud, Distribution, DistributionSpec,
};

fn spec(kind: Distribution, n: usize, epsilon: f64, seed: u64) -> DistributionSpec {
    DistributionSpec { kind, n, epsilon, seed }
}

#[test]
fn fence_is_a_proper_ring() {
    for eps in [0.05, 0.1, 0.15, 0.25, 0.35] {
        let fence = make_fence(eps).unwrap();
        assert!(fence_ring_is_valid(&fence, eps));
        // Spacing never exceeds the chosen fraction of epsilon by more than rounding.
        let gaps: Vec<f64> = (0..fence.len()).map(|i| distance(&fence[i], &fence[(i + 1) % fence.len()])).collect();
        assert!(gaps.iter().all(|&g| g < eps), "eps {eps}: {gaps:?}");
    }
}

#[test]
fn d2_cloud_carries_its_fence() {
    let cloud = sample(&spec(Distribution::D2, 30, 0.2, 4)).unwrap();
    let fence = make_fence(0.2).unwrap();
    assert_eq!(cloud.fence_indices.len(), fence.len());
    assert_eq!(cloud.len(), 30 + fence.len());
    let ring: Vec<Vec<f64>> = cloud.fence_indices.iter().map(|&i| cloud.points[i].clone()).collect();
    assert!(fence_ring_is_valid(&ring, 0.2));
}

#[test]
fn seeds_separate_streams() {
    let a = derive_seed(9, &[2, 40, 1, 0]);
    let b = derive_seed(9, &[2, 40, 1, 1]);
    let c = derive_seed(9, &[2, 40, 1, 0]);
    assert_ne!(a, b);
    assert_eq!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_deterministic(kind in 0usize..4, n in 0usize..40, seed in any::<u64>(), eps in 0.1f64..0.4) {
        let s = spec(Distribution::ALL[kind], n, eps, seed);
        prop_assert_eq!(sample(&s).unwrap(), sample(&s).unwrap());
    }

    #[test]
    fn text_round_trip(kind in 0usize..4, n in 0usize..30, seed in any::<u64>()) {
        let cloud = sample(&spec(Distribution::ALL[kind], n, 0.3, seed)).unwrap();
        let back = read_cloud(&write_cloud(&cloud)).unwrap();
        prop_assert_eq!(back, cloud);
    }

    #[test]
    fn unit_square_samples_stay_inside(n in 1usize..50, seed in any::<u64>()) {
        let cloud = sample(&spec(Distribution::D1, n, 0.3, seed)).unwrap();
        prop_assert!(cloud.points.iter().flatten().all(|&x| (0.0..=1.0).contains(&x)));
    }
}
