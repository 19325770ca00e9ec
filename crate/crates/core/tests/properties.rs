//! Invariants of the walk model, kernel, simulator and geometry on random
//! rational walks.

use proptest::prelude::*;
use qrw::geometry::ks_distance;
use qrw::kernel::{build_kernel, taylor_check_all, KernelBundle};
use qrw::pipelines::Frame;
use qrw::simulator::{evolve, Backend};
use qrw::walkmodel::{cayley_orthogonal, random_skew, validate_spec, WalkSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random 1-D Cayley walk with `k` chiralities and distinct steps.
fn cayley_walk(k: usize, seed: u64, offset: i64) -> WalkSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coin = cayley_orthogonal(&random_skew(k, 3, &mut rng)).unwrap();
    let steps = (0..k as i64).map(|s| vec![s + offset]).collect();
    WalkSpec::new(1, steps, coin).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_coins_are_exactly_orthogonal(k in 2usize..=6, seed in any::<u64>()) {
        let spec = cayley_walk(k, seed, 0);
        let rep = validate_spec(&spec, 0.0);
        prop_assert!(rep.unitary && rep.max_deviation == 0.0);
    }

    #[test]
    fn spec_json_is_byte_stable(k in 2usize..=4, seed in any::<u64>(), off in -2i64..=1) {
        let spec = cayley_walk(k, seed, off);
        let text = spec.to_json();
        let back = WalkSpec::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back.id(), spec.id());
    }

    #[test]
    fn exact_evolution_preserves_norm(k in 2usize..=4, seed in any::<u64>(), n in 0usize..=12) {
        let spec = cayley_walk(k, seed, -1);
        let f = evolve(&spec, 0, n, Backend::Exact).unwrap();
        prop_assert!(f.norm_sqr_exact().unwrap() == num_rational::BigRational::from_integer(1.into()));
    }

    #[test]
    fn float_and_exact_agree(k in 2usize..=3, seed in any::<u64>(), n in 1usize..=15) {
        let spec = cayley_walk(k, seed, -1);
        let e = evolve(&spec, 0, n, Backend::Exact).unwrap();
        let f = evolve(&spec, 0, n, Backend::Float).unwrap();
        for r in e.sites() {
            for j in 0..k {
                prop_assert!((e.amplitude(&r, j) - f.amplitude(&r, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn frames_invert(u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let f = Frame::square();
        let back = f.invert(f.apply([u, v]));
        prop_assert!((back[0] - u).abs() < 1e-14 && (back[1] - v).abs() < 1e-14);
    }

    #[test]
    fn ks_is_a_bounded_symmetric_distance(a in prop::collection::vec(-5.0f64..5.0, 1..40), b in prop::collection::vec(-5.0f64..5.0, 1..40)) {
        let d = ks_distance(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - ks_distance(&b, &a)).abs() < 1e-15);
        prop_assert_eq!(ks_distance(&a, &a), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernels_reproduce_the_walk(k in 2usize..=4, seed in any::<u64>(), off in -1i64..=0) {
        let b = build_kernel(&cayley_walk(k, seed, off)).unwrap();
        prop_assert!(b.sample_identity(4, seed));
        prop_assert!(taylor_check_all(&b, 6).unwrap() == num_rational::BigRational::from_integer(0.into()));
        let json = b.to_json();
        prop_assert_eq!(KernelBundle::from_json(&json).unwrap().to_json(), json);
    }
}
