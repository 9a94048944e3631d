//! Property tests for the structural invariants: shift equivariance,
//! scaling identities, projection covariance and norm monotonicity.

use proptest::prelude::*;

use dnls::convergence::{align, stagger};
use dnls::field::RingField;
use dnls::lattice::{
    dirichlet_energy, functional_i, functional_j, hopping, hopping_sum, laplacian, onsite_sum,
    quadratic_form,
};
use dnls::nehari::nehari_project;
use dnls::params::ModelParams;

fn field_strategy(k: usize) -> impl Strategy<Value = RingField> {
    prop::collection::vec(-2.0f64..2.0, k).prop_map(|v| RingField::new(v).unwrap())
}

fn positive_field_strategy(k: usize) -> impl Strategy<Value = RingField> {
    prop::collection::vec(0.01f64..2.0, k).prop_map(|v| RingField::new(v).unwrap())
}

proptest! {
    #[test]
    fn stencils_commute_with_cyclic_shifts(u in field_strategy(12), s in 0i64..12) {
        prop_assert_eq!(laplacian(&u.shift(s)), laplacian(&u).shift(s));
        prop_assert_eq!(hopping(&u.shift(s)), hopping(&u).shift(s));
    }

    #[test]
    fn quadratic_form_spectral_bound(u in field_strategy(16)) {
        let q = dirichlet_energy(&u);
        prop_assert!(q >= 0.0);
        prop_assert!(q <= 4.0 * u.power() * (1.0 + 1e-12));
    }

    #[test]
    fn norm_monotone_in_exponent(u in field_strategy(10)) {
        let n2 = u.lp_norm(2.0).unwrap();
        let n4 = u.lp_norm(4.0).unwrap();
        prop_assert!(n4 <= n2 * (1.0 + 1e-12));
    }

    #[test]
    fn scaling_identities_match_direct_evaluation(
        u in field_strategy(8),
        t in 0.05f64..5.0,
        sigma in 1.0f64..3.0,
    ) {
        let p = ModelParams::new(1.0, 1.0, sigma, -1.0).unwrap();
        let q = quadratic_form(&u, &p);
        let a = hopping_sum(&u);
        let b = onsite_sum(&u, sigma);
        let scaled = u.scale(t.sqrt());
        let i_pred = t * q - 2.0 * t * t * a - t.powf(sigma + 1.0) * b;
        let j_pred = t * q - t * t * a - t.powf(sigma + 1.0) / (sigma + 1.0) * b;
        let scale = 1.0 + i_pred.abs().max(j_pred.abs());
        prop_assert!((functional_i(&scaled, &p) - i_pred).abs() <= 1e-9 * scale);
        prop_assert!((functional_j(&scaled, &p) - j_pred).abs() <= 1e-9 * scale);
    }

    #[test]
    fn projection_scale_covariance(u in positive_field_strategy(8), c in 0.1f64..5.0) {
        let p = ModelParams::focusing(1.0, -1.0).unwrap();
        let t = nehari_project(&u, &p).unwrap().t_star;
        let tc = nehari_project(&u.scale(c), &p).unwrap().t_star;
        prop_assert!((tc - t / (c * c)).abs() <= 1e-10 * t.max(1.0));
    }

    #[test]
    fn align_is_shift_and_sign_invariant(u in field_strategy(8), s in 0i64..8) {
        let a = align(&u).unwrap();
        prop_assert_eq!(align(&u.shift(s)).unwrap(), a.clone());
        prop_assert_eq!(align(&u.scale(-1.0)).unwrap(), a);
    }

    #[test]
    fn stagger_is_an_involution(u in field_strategy(10)) {
        prop_assert_eq!(stagger(&stagger(&u).unwrap()).unwrap(), u);
    }
}
