//! Green function of `-Delta - omega` on the periodic ring and on the
//! infinite lattice, and the fixed-point form of the stationary equation.
//!
//! For `omega < 0` the operator sits below the spectrum `[0, 4]` of `-Delta`,
//! so the resolvent exists and every kernel entry is strictly positive.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::{Kahan, RingField};
use crate::lattice::abs_pow_2sigma;
use crate::params::{ModelParams, Regime};

/// Dense direct factorization is exact enough up to this period; beyond it the
/// circulant eigenbasis is used instead.
const DENSE_LIMIT: usize = 512;

/// Resolvent kernel of `-Delta - omega` on the ring of period `k`, stored as
/// its first row; the full kernel is `G(n, m) = g((n - m) mod k)`.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    k: usize,
    omega: f64,
    row: Vec<f64>,
}

impl GreenOperator {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Kernel entry `G(n, m)`; depends only on the ring distance.
    pub fn entry(&self, n: i64, m: i64) -> f64 {
        self.row[(n - m).rem_euclid(self.k as i64) as usize]
    }

    /// Applies the kernel to a field: `(G f)_n = sum_m G(n, m) f_m`.
    pub fn apply(&self, f: &RingField) -> RingField {
        let vals = f
            .indices()
            .map(|n| {
                let mut acc = Kahan::new();
                for m in f.indices() {
                    acc.add(self.entry(n, m) * f.get(m));
                }
                acc.sum()
            })
            .collect();
        RingField::new(vals).expect("kernel image of a valid field is valid")
    }
}

fn check_regime(omega: f64) -> Result<()> {
    if omega >= 0.0 {
        return Err(Error::InvalidRegime { expected: "omega < 0", found: "omega >= 0" });
    }
    Ok(())
}

/// Green function on the ring: the inverse of the k x k operator `-Delta - omega`.
pub fn green_periodic(k: usize, omega: f64) -> Result<GreenOperator> {
    if k < 3 {
        return Err(Error::InvalidK(k));
    }
    check_regime(omega)?;

    let mut row = if k <= DENSE_LIMIT {
        // solve (-Delta - omega) g = e_0 and extend by translation invariance
        let mut op = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            op[(i, i)] = 2.0 - omega;
            op[(i, (i + 1) % k)] -= 1.0;
            op[(i, (i + k - 1) % k)] -= 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(k);
        rhs[0] = 1.0;
        let g = op.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
        g.iter().copied().collect::<Vec<f64>>()
    } else {
        // circulant diagonalization: eigenvalues 2 - 2 cos(2 pi j / k) - omega
        (0..k)
            .map(|d| {
                let mut acc = Kahan::new();
                for j in 0..k {
                    let theta = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                    let lambda = 2.0 - 2.0 * theta.cos() - omega;
                    acc.add((theta * d as f64).cos() / lambda);
                }
                acc.sum() / k as f64
            })
            .collect()
    };
    // enforce the exact ring symmetry g(d) = g(k - d)
    for d in 1..=(k - 1) / 2 {
        let avg = 0.5 * (row[d] + row[k - d]);
        row[d] = avg;
        row[k - d] = avg;
    }
    Ok(GreenOperator { k, omega, row })
}

/// Green function of `-Delta - omega` on the infinite lattice:
/// `G(n, 0) = r^{|n|} / (1/r - r)` with `r` the root in `(0, 1)` of
/// `r + 1/r = 2 - omega`.
pub fn green_infinite(n: i64, omega: f64) -> Result<f64> {
    check_regime(omega)?;
    let r = decay_rate(omega)?;
    Ok(r.powi(n.unsigned_abs() as i32) / (1.0 / r - r))
}

/// The geometric decay rate `r in (0, 1)` of the infinite-lattice kernel.
pub fn decay_rate(omega: f64) -> Result<f64> {
    check_regime(omega)?;
    let s = 2.0 - omega; // > 2
    Ok((s - (s * s - 4.0).sqrt()) / 2.0)
}

/// Max-norm defect of the fixed-point form `u = G N(u)` with
/// `N(u)_l = alpha u_l (u_{l+1}^2 + u_{l-1}^2) + beta |u_l|^{2 sigma} u_l`.
pub fn fixed_point_residual(u: &RingField, p: &ModelParams) -> Result<f64> {
    if p.regime != Regime::Focusing {
        return Err(Error::InvalidRegime { expected: "focusing", found: "defocusing" });
    }
    let g = green_periodic(u.k(), p.omega)?;
    let image = nonlinear_image(u, p, &g);
    let mut worst = 0.0f64;
    for (a, b) in u.values().iter().zip(image.values()) {
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// `G N(u)`, the right-hand side of the fixed-point identity; strictly
/// positive whenever `u` is nonnegative and nonzero.
pub fn nonlinear_image(u: &RingField, p: &ModelParams, g: &GreenOperator) -> RingField {
    let n_of_u = RingField::new(
        u.indices()
            .map(|l| {
                let ul = u.get(l);
                let up = u.get(l + 1);
                let um = u.get(l - 1);
                p.alpha * ul * (up * up + um * um)
                    + p.beta * abs_pow_2sigma(ul, p.sigma) * ul
            })
            .collect(),
    )
    .expect("nonlinear image of a valid field is valid");
    g.apply(&n_of_u)
}
