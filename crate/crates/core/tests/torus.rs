use jdpp_core::kernel::DEFAULT_TOL;
use jdpp_core::linalg::rel_close;
use jdpp_core::moments::{variance, variance_spectral, TestFunction};
use jdpp_core::random::{random_boundary_triple, random_triple};
use jdpp_core::sampler::replica_rng;
use jdpp_core::torus::{block_diagonalize, check_prop2, is_nonneg_definite, synthesize_kernel, SpectralTriple};
use proptest::prelude::*;
use rand::Rng;

fn three_way(t: &SpectralTriple) -> [bool; 3] {
    let scalar = check_prop2(t, DEFAULT_TOL).valid;
    let blocks = block_diagonalize(t)
        .iter()
        .all(|b| is_nonneg_definite(&b.m1, DEFAULT_TOL) && is_nonneg_definite(&b.m2, DEFAULT_TOL));
    let k = synthesize_kernel(t).unwrap();
    let dense = k
        .to_jkernel(&k.natural_space())
        .unwrap()
        .validity_check(DEFAULT_TOL)
        .unwrap()
        .is_valid;
    [scalar, blocks, dense]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn validity_agrees_three_ways(seed: u64, n in 1usize..12, boundary: bool) {
        let mut rng = replica_rng(seed, 0);
        let t = if boundary { random_boundary_triple(&mut rng, n) } else { random_triple(&mut rng, n, -0.05, 1.05) };
        let v = three_way(&t);
        prop_assert!(v[0] == v[1] && v[1] == v[2], "{:?}", v);
        if boundary {
            prop_assert!(v[0]);
        }
    }

    #[test]
    fn variance_routes_agree(seed: u64, n in 2usize..24) {
        let mut rng = replica_rng(seed, 1);
        let k = synthesize_kernel(&random_triple(&mut rng, n, 0.0, 1.0)).unwrap();
        let f = TestFunction::new((0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let direct = variance(&k.to_jkernel(&k.natural_space()).unwrap(), &f).unwrap();
        let spectral = variance_spectral(&k, &f).unwrap();
        prop_assert!(rel_close(direct, spectral, 1e-10), "{} vs {}", direct, spectral);
    }

    #[test]
    fn sigma_squared_nonnegative(seed: u64, n in 1usize..64) {
        let k = synthesize_kernel(&random_triple(&mut replica_rng(seed, 2), n, 0.0, 1.0)).unwrap();
        prop_assert!(k.sigma_squared() >= -1e-9);
    }
}
