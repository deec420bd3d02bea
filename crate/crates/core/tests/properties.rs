mod common;

use proptest::prelude::*;

use ptwell::export::{format_float, DEFAULT_PRECISION};
use ptwell::{
    assemble, bound_state, effective_charges, entry_permutation, secular_residual, solve_pattern,
    solve_roots, spectrum, verify_constraint, CouplingMatrix, Permutation,
};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn k_and_l() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=9).prop_flat_map(|k| (Just(k), 0..k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_squared_shifts_both_indices((k, l) in k_and_l()) {
        let tau = entry_permutation(k, l).unwrap();
        let map = tau.as_flat();
        let sigma2 = |i: usize| (i + 2 * l) % k;
        for p in 0..k * k {
            let (i, j) = (p / k, p % k);
            prop_assert_eq!(map[map[p]], sigma2(i) * k + sigma2(j));
        }
    }

    #[test]
    fn orbit_sizes_divide_twice_the_rotation_order((k, l) in k_and_l()) {
        let p = solve_pattern(k, l).unwrap();
        let order = if l == 0 { 1 } else { k / gcd(k, l) };
        prop_assert!(p.orbits().iter().all(|o| (2 * order) % o.len() == 0));
        let covered: usize = p.orbits().iter().map(Vec::len).sum();
        prop_assert_eq!(covered, k * k);
    }

    #[test]
    fn assembled_matrix_obeys_constraint((k, l) in k_and_l(), seed in any::<u64>()) {
        let p = solve_pattern(k, l).unwrap();
        let a = assemble(&p, &common::random_params(&p, &mut common::rng(seed), 5.0)).unwrap();
        prop_assert_eq!(verify_constraint(&a, k, l).unwrap(), 0.0);
    }

    #[test]
    fn complex_charges_pair_up((k, l) in k_and_l(), seed in any::<u64>()) {
        let p = solve_pattern(k, l).unwrap();
        let a = assemble(&p, &common::random_params(&p, &mut common::rng(seed), 2.0)).unwrap();
        let q = effective_charges(&a).unwrap();
        let total: usize = q.iter().map(|c| c.multiplicity).sum();
        prop_assert_eq!(total, k);
        for c in q.iter().filter(|c| !c.is_real) {
            let partner = q.iter().any(|d| {
                (d.value - c.value.conj()).norm() <= 1e-8 * a.norm_fro() && d.multiplicity == c.multiplicity
            });
            prop_assert!(partner, "{} has no conjugate", c.value);
        }
    }

    #[test]
    fn roots_lie_on_both_curves(z in -4.4f64..4.4) {
        let roots = solve_roots(z, 15.0, 1e-12).unwrap();
        prop_assert!(!roots.is_empty());
        for r in &roots {
            prop_assert!((2.0 * r.s * r.t - z).abs() <= 1e-9 * z.abs().max(1.0));
            let scale = (r.s * r.s + r.t * r.t).max(1.0);
            prop_assert!(secular_residual(r.s, r.t).abs() <= 1e-8 * scale, "{:?}", r);
        }
        prop_assert!(roots.windows(2).all(|w| w[0].energy() <= w[1].energy()));
    }

    #[test]
    fn charge_sign_does_not_matter(z in 0.0f64..4.0) {
        let plus = solve_roots(z, 15.0, 1e-12).unwrap();
        let minus = solve_roots(-z, 15.0, 1e-12).unwrap();
        prop_assert_eq!(plus.len(), minus.len());
        for (p, m) in plus.iter().zip(&minus) {
            prop_assert!((p.energy() - m.energy()).abs() <= 1e-10 * p.energy().abs().max(1.0));
        }
    }

    #[test]
    fn spectrum_is_sorted_with_full_degeneracy(seed in any::<u64>()) {
        let p = solve_pattern(3, 1).unwrap();
        let a = assemble(&p, &common::random_params(&p, &mut common::rng(seed), 1.4)).unwrap();
        let sp = spectrum(&a, 12.0, 1e-12).unwrap();
        prop_assume!(sp.all_real);
        prop_assert!(sp.roots.windows(2).all(|w| w[0].energy < w[1].energy));
        let per_charge: usize = sp
            .real_charges
            .iter()
            .map(|&(z, m)| solve_roots(z, 12.0, 1e-12).unwrap().len() * m)
            .sum();
        prop_assert_eq!(sp.expanded_energies().len(), per_charge);
    }

    #[test]
    fn ground_states_match_at_the_origin(z in -4.0f64..4.0) {
        let a = CouplingMatrix::diagonal(1, z).unwrap();
        let sp = spectrum(&a, 8.0, 1e-12).unwrap();
        let v = &effective_charges(&a).unwrap()[0].channel_vectors[0];
        let state = bound_state(&a, &sp.roots[0], v).unwrap();
        prop_assert!(state.matching_residual() <= 1e-9);
        prop_assert!(state.derivative_residual() <= 1e-6 * sp.roots[0].s.max(1.0));
    }

    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_float(x, DEFAULT_PRECISION).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn permutation_inverse(images in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle()) {
        let p = Permutation::from_images(images).unwrap();
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
    }
}
