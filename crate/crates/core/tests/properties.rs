//! Property tests over randomized inputs: engine agreement, normalization,
//! bound validity, and solver monotonicity.

use bosonbench::distinguishability::{
    build_uniform, delta_separation, variational_distance_bound, DistinguishabilityMatrix,
};
use bosonbench::interference::{
    brute_force_distribution, enumerate_outputs, haar_unitary, prob_ideal, ModeConfiguration,
};
use bosonbench::matrix::ComplexMatrix;
use bosonbench::permanent::{
    perm_naive, perm_normalized, perm_ryser, perm_uniform_normalized,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_matrix(max_n: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |cells| {
            ComplexMatrix::new(
                n,
                cells
                    .into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn naive_and_ryser_agree(m in arb_matrix(7)) {
        let a = perm_naive(&m).unwrap();
        let b = perm_ryser(&m).unwrap();
        let scale = a.norm().max(b.norm()).max(1e-12);
        prop_assert!((a - b).norm() / scale <= 1e-10);
    }

    #[test]
    fn uniform_closed_form_matches_ryser(n in 1usize..=12, x in 0.0f64..=1.0) {
        let closed = perm_uniform_normalized(n, x).unwrap();
        let s = DistinguishabilityMatrix::uniform_overlap(n, x).unwrap();
        let direct = perm_normalized(&s.to_complex_matrix()).unwrap();
        let rel = (closed.magnitude() - direct.magnitude()).abs()
            / direct.magnitude().max(1e-300);
        prop_assert!(rel <= 1e-9, "n={n} x={x} rel={rel}");
    }

    #[test]
    fn ideal_distribution_normalizes(m in 2usize..=5, seed in 0u64..500) {
        let u = haar_unitary(m, seed);
        let mut occ = vec![0u32; m];
        occ[0] = 1;
        occ[1] = 1;
        let input = ModeConfiguration::new(occ).unwrap();
        let total: f64 = enumerate_outputs(m, 2)
            .iter()
            .map(|out| prob_ideal(&u, &input, out).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_distance_stays_below_bound(
        seed in 0u64..200,
        x in 0.0f64..=1.0,
        n in 2u32..=4,
    ) {
        let m = (n as usize) + 2;
        let u = haar_unitary(m, seed);
        let mut occ = vec![0u32; m];
        for slot in occ.iter_mut().take(n as usize) {
            *slot = 1;
        }
        let input = ModeConfiguration::new(occ).unwrap();
        let s = DistinguishabilityMatrix::uniform_overlap(n as usize, x).unwrap();
        let dist = brute_force_distribution(&u, &input, &s).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "norm {total}");
        let mut exact = 0.0;
        for (out, p) in &dist {
            exact += 0.5 * (prob_ideal(&u, &input, out).unwrap() - p).abs();
        }
        let bound = variational_distance_bound(&s).unwrap();
        prop_assert!(exact <= bound + 1e-12, "exact {exact} bound {bound}");
    }

    #[test]
    fn separation_clipped_to_unit_interval(n in 1usize..=60, v in 0.0f64..=1.0) {
        let s = build_uniform(n, v).unwrap();
        let delta = delta_separation(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&delta));
        let d = variational_distance_bound(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}
