//! Stencil operators and the variational functionals on the ring.
//!
//! The three nonlinear sums share one evaluation path:
//!
//! * `Q(u) = <-Delta u, u> - omega ||u||^2` (the coercive quadratic form),
//! * `A(u) = sum |u_l|^2 |u_{l+1}|^2` (hopping sum),
//! * `B(u) = sum |u_l|^{2 sigma + 2}` (on-site sum),
//!
//! so that `J = Q - alpha A - beta/(sigma+1) B` and
//! `I = Q - 2 alpha A - beta B` cannot drift apart.

use num_complex::Complex64;

use crate::field::{Kahan, RingField, WaveField};
use crate::params::ModelParams;

/// `|x|^{2 sigma}` with `|0|^{2 sigma} := 0`; fast paths for integer sigma.
pub(crate) fn abs_pow_2sigma(x: f64, sigma: f64) -> f64 {
    let x2 = x * x;
    if sigma == 1.0 {
        x2
    } else if sigma == 2.0 {
        x2 * x2
    } else if x2 == 0.0 {
        0.0
    } else {
        x2.powf(sigma)
    }
}

/// Ring Laplacian `(Delta u)_l = u_{l+1} + u_{l-1} - 2 u_l`.
pub fn laplacian(u: &RingField) -> RingField {
    let vals = u.indices().map(|l| u.get(l + 1) + u.get(l - 1) - 2.0 * u.get(l)).collect();
    RingField::new(vals).expect("laplacian of a valid field is valid")
}

/// Complex ring Laplacian, same stencil as [`laplacian`].
pub fn laplacian_c(psi: &WaveField) -> WaveField {
    let vals = psi
        .indices()
        .map(|l| psi.get(l + 1) + psi.get(l - 1) - Complex64::new(2.0, 0.0) * psi.get(l))
        .collect();
    WaveField::new(vals).expect("laplacian of a valid field is valid")
}

/// Nonlinear hopping weights `(T u)_l = |u_{l+1}|^2 + |u_{l-1}|^2`.
pub fn hopping(u: &RingField) -> RingField {
    let vals = u
        .indices()
        .map(|l| {
            let a = u.get(l + 1);
            let b = u.get(l - 1);
            a * a + b * b
        })
        .collect();
    RingField::new(vals).expect("hopping weights of a valid field are valid")
}

/// Hopping weights of a complex field; real-valued by construction.
pub fn hopping_c(psi: &WaveField) -> RingField {
    let vals = psi
        .indices()
        .map(|l| psi.get(l + 1).norm_sqr() + psi.get(l - 1).norm_sqr())
        .collect();
    RingField::new(vals).expect("hopping weights of a valid field are valid")
}

/// Dirichlet energy `<-Delta u, u> = sum (u_{l+1} - u_l)^2 >= 0`.
pub fn dirichlet_energy(u: &RingField) -> f64 {
    let mut acc = Kahan::new();
    for l in u.indices() {
        let d = u.get(l + 1) - u.get(l);
        acc.add(d * d);
    }
    acc.sum()
}

/// Quadratic form `Q(u) = <-Delta u, u> - omega ||u||^2`; positive for omega < 0.
pub fn quadratic_form(u: &RingField, p: &ModelParams) -> f64 {
    dirichlet_energy(u) - p.omega * u.power()
}

/// Hopping sum `A(u) = sum_{l in P_k} |u_l|^2 |u_{l+1}|^2`.
pub fn hopping_sum(u: &RingField) -> f64 {
    let mut acc = Kahan::new();
    for l in u.indices() {
        let a = u.get(l);
        let b = u.get(l + 1);
        acc.add(a * a * b * b);
    }
    acc.sum()
}

/// On-site sum `B(u) = sum_{l in P_k} |u_l|^{2 sigma + 2}`.
pub fn onsite_sum(u: &RingField, sigma: f64) -> f64 {
    let mut acc = Kahan::new();
    for &v in u.values() {
        acc.add(abs_pow_2sigma(v, sigma) * v * v);
    }
    acc.sum()
}

/// Action functional `J_k(u) = Q - alpha A - beta/(sigma+1) B`.
pub fn functional_j(u: &RingField, p: &ModelParams) -> f64 {
    quadratic_form(u, p) - p.alpha * hopping_sum(u)
        - p.beta / (p.sigma + 1.0) * onsite_sum(u, p.sigma)
}

/// Nehari constraint functional `I_k(u) = Q - 2 alpha A - beta B`.
///
/// The doubled hopping coefficient comes from summing both neighbors:
/// `sum |u_l|^2 (|u_{l+1}|^2 + |u_{l-1}|^2) = 2 A(u)` on the ring.
pub fn functional_i(u: &RingField, p: &ModelParams) -> f64 {
    quadratic_form(u, p) - 2.0 * p.alpha * hopping_sum(u) - p.beta * onsite_sum(u, p.sigma)
}

/// Gradient of `J_k`:
/// `(grad J)_l = 2 [ (-Delta u)_l - omega u_l - alpha u_l (u_{l+1}^2 + u_{l-1}^2) - beta |u_l|^{2 sigma} u_l ]`.
pub fn gradient_j(u: &RingField, p: &ModelParams) -> RingField {
    let vals = u
        .indices()
        .map(|l| {
            let ul = u.get(l);
            let up = u.get(l + 1);
            let um = u.get(l - 1);
            let lap = up + um - 2.0 * ul;
            2.0 * (-lap - p.omega * ul
                - p.alpha * ul * (up * up + um * um)
                - p.beta * abs_pow_2sigma(ul, p.sigma) * ul)
        })
        .collect();
    RingField::new(vals).expect("gradient of a valid field is valid")
}

/// Pointwise defect of the stationary equation
/// `omega u_l + (Delta u)_l + alpha u_l (u_{l+1}^2 + u_{l-1}^2) + beta |u_l|^{2 sigma} u_l`.
pub fn el_defect(u: &RingField, p: &ModelParams) -> RingField {
    let vals = u
        .indices()
        .map(|l| {
            let ul = u.get(l);
            let up = u.get(l + 1);
            let um = u.get(l - 1);
            p.omega * ul + (up + um - 2.0 * ul)
                + p.alpha * ul * (up * up + um * um)
                + p.beta * abs_pow_2sigma(ul, p.sigma) * ul
        })
        .collect();
    RingField::new(vals).expect("defect of a valid field is valid")
}

/// Max-norm Euler-Lagrange residual; zero exactly on stationary solutions.
pub fn el_residual(u: &RingField, p: &ModelParams) -> f64 {
    el_defect(u, p).linf_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RingField;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, -1.0).unwrap()
    }

    fn random_field(k: usize, rng: &mut impl Rng) -> RingField {
        RingField::from_fn(k, |_| rng.gen_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn laplacian_kills_constants() {
        let u = RingField::new(vec![2.5; 7]).unwrap();
        assert!(laplacian(&u).linf_norm() == 0.0);
    }

    #[test]
    fn laplacian_single_site() {
        // k=4, value 1 at index 0: Delta u = (0, 1, -2, 1) on (-2, -1, 0, 1)
        let u = RingField::from_fn(4, |l| if l == 0 { 1.0 } else { 0.0 }).unwrap();
        let d = laplacian(&u);
        assert_eq!(d.values(), &[0.0, 1.0, -2.0, 1.0]);
    }

    #[test]
    fn laplacian_staggered_eigenvector() {
        // alternating field is an eigenvector with eigenvalue -4
        let u = RingField::from_fn(8, |l| if l % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        let d = laplacian(&u);
        for l in u.indices() {
            assert!((d.get(l) + 4.0 * u.get(l)).abs() < 1e-15);
        }
    }

    #[test]
    fn hopping_examples() {
        let ones = RingField::new(vec![1.0; 6]).unwrap();
        assert!(hopping(&ones).values().iter().all(|&v| (v - 2.0).abs() < 1e-15));

        // k=4 single site at 0: every other site has 0 as a neighbor twice or once
        let e0 = RingField::from_fn(4, |l| if l == 0 { 1.0 } else { 0.0 }).unwrap();
        let h = hopping(&e0);
        // indices (-2, -1, 0, 1): site -2 neighbors are -1 and 1 (not 0); sites +-1 see 0
        assert_eq!(h.values(), &[0.0, 1.0, 0.0, 1.0]);

        let alt = RingField::from_fn(4, |l| if l % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        assert!(hopping(&alt).values().iter().all(|&v| (v - 2.0).abs() < 1e-15));
    }

    #[test]
    fn functional_values() {
        let p = params();
        let zero = RingField::zeros(5).unwrap();
        assert_eq!(functional_j(&zero, &p), 0.0);
        assert_eq!(functional_i(&zero, &p), 0.0);

        // constant field on k=4: Q = 4, A = 4, B = 4
        let ones = RingField::new(vec![1.0; 4]).unwrap();
        assert!((functional_j(&ones, &p) - (-2.0)).abs() < 1e-14);
        assert!((functional_i(&ones, &p) - (-8.0)).abs() < 1e-14);

        // single site sqrt(3) on k=8: J = 4.5, I = 0
        let s3 = RingField::from_fn(8, |l| if l == 0 { 3.0f64.sqrt() } else { 0.0 }).unwrap();
        assert!((functional_j(&s3, &p) - 4.5).abs() < 1e-13);
        assert!(functional_i(&s3, &p).abs() < 1e-13);
    }

    #[test]
    fn spectral_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let u = random_field(16, &mut rng);
            let q = dirichlet_energy(&u);
            assert!(q >= 0.0);
            assert!(q <= 4.0 * u.power() + 1e-12);
        }
    }

    #[test]
    fn stencils_commute_with_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_field(12, &mut rng);
        for s in 0..12 {
            assert_eq!(laplacian(&u.shift(s)), laplacian(&u).shift(s));
            assert_eq!(hopping(&u.shift(s)), hopping(&u).shift(s));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ModelParams::new(0.7, 1.3, 1.5, -2.0).unwrap();
        let h = 1e-5;
        for k in [4usize, 8, 16] {
            let u = random_field(k, &mut rng);
            let g = gradient_j(&u, &p);
            for l in u.indices() {
                let mut up = u.clone();
                up.set(l, u.get(l) + h);
                let mut um = u.clone();
                um.set(l, u.get(l) - h);
                let fd = (functional_j(&up, &p) - functional_j(&um, &p)) / (2.0 * h);
                let scale = g.get(l).abs().max(1.0);
                assert!((g.get(l) - fd).abs() / scale < 1e-6);
            }
        }
    }

    #[test]
    fn scaling_identities() {
        // I(sqrt(t) u) = t Q - 2 t^2 alpha A - t^{sigma+1} beta B, same for J
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ModelParams::new(0.9, 1.1, 2.0, -0.7).unwrap();
        for _ in 0..20 {
            let u = random_field(8, &mut rng);
            let t: f64 = rng.gen_range(0.1..4.0);
            let q = quadratic_form(&u, &p);
            let a = hopping_sum(&u);
            let b = onsite_sum(&u, p.sigma);
            let scaled = u.scale(t.sqrt());
            let i_pred = t * q - 2.0 * t * t * p.alpha * a - t.powf(p.sigma + 1.0) * p.beta * b;
            let j_pred = t * q - t * t * p.alpha * a
                - t.powf(p.sigma + 1.0) * p.beta / (p.sigma + 1.0) * b;
            assert!((functional_i(&scaled, &p) - i_pred).abs() < 1e-10 * (1.0 + i_pred.abs()));
            assert!((functional_j(&scaled, &p) - j_pred).abs() < 1e-10 * (1.0 + j_pred.abs()));
        }
    }

    #[test]
    fn el_residual_examples() {
        let p = params();
        let zero = RingField::zeros(6).unwrap();
        assert_eq!(el_residual(&zero, &p), 0.0);
        // single sites are not exact solutions
        let s3 = RingField::from_fn(8, |l| if l == 0 { 3.0f64.sqrt() } else { 0.0 }).unwrap();
        assert!(el_residual(&s3, &p) > 0.5);
    }
}
