use jdpp_core::kernel::DEFAULT_TOL;
use jdpp_core::oracle::{correlation, duality_check, subset_probabilities};
use jdpp_core::random::{random_boundary_kernel, random_invalid_kernel, random_valid_kernel};
use jdpp_core::sampler::replica_rng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn correlations_from_inclusion_exclusion(n1 in 0usize..4, n2 in 0usize..4, seed: u64) {
        prop_assume!(n1 + n2 > 0);
        let k = random_valid_kernel(&mut replica_rng(seed, 0), n1, n2, seed % 2 == 0);
        let dist = subset_probabilities(&k).unwrap();
        let n = n1 + n2;
        for a in 0u32..1 << n {
            let members: Vec<usize> = (0..n).filter(|i| a >> i & 1 == 1).collect();
            let tail: f64 = (0u32..1 << n).filter(|s| s & a == a).map(|s| dist.probability(s)).sum();
            prop_assert!((tail - correlation(&k, &members).unwrap()).abs() <= 1e-9, "subset {:#x}", a);
        }
    }

    #[test]
    fn mass_is_one_even_when_invalid(n1 in 0usize..4, n2 in 0usize..4, seed: u64) {
        prop_assume!(n1 + n2 > 0);
        let k = random_invalid_kernel(&mut replica_rng(seed, 1), n1, n2, false);
        prop_assert!((subset_probabilities(&k).unwrap().total() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn validity_iff_nonnegative_probabilities() {
    let mut rng = replica_rng(21, 0);
    let mut counts = [0usize; 2];
    for i in 0..1000 {
        let (n1, n2) = (1 + i % 3, (i / 3) % 4);
        let k = random_boundary_kernel(&mut rng, n1, n2, 0.05);
        let report = k.validity_check(DEFAULT_TOL).unwrap();
        // Skip kernels whose extreme eigenvalue sits inside the tolerance band.
        let gap = report.min_eigenvalue.abs().min((report.max_eigenvalue - 1.0).abs());
        if gap < 1e-6 {
            continue;
        }
        let nonneg = subset_probabilities(&k).unwrap().min_probability() >= -1e-9;
        assert_eq!(report.is_valid, nonneg, "kernel {i}: {report:?}");
        counts[report.is_valid as usize] += 1;
    }
    assert!(counts[0] > 100 && counts[1] > 100, "{counts:?}");
}

#[test]
fn duality_holds_for_real_and_complex_kernels() {
    let mut rng = replica_rng(22, 0);
    for real in [true, false] {
        for (n1, n2) in [(1, 1), (3, 2), (0, 4), (4, 0)] {
            let k = random_valid_kernel(&mut rng, n1, n2, real);
            assert!(duality_check(&k, 1e-10).unwrap().passes);
        }
    }
    let bad = random_invalid_kernel(&mut rng, 2, 2, false);
    assert!(duality_check(&bad, 1e-10).is_err());
}
