//! Translation alignment, the staggering reduction for the defocusing regime,
//! and the k-sweep tracking the periodic-to-localized limit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Kahan, RingField};
use crate::nehari::{ground_state, SolverOptions};
use crate::params::{ModelParams, Regime};

/// Canonicalizes a field under the shift/sign symmetry: cyclically shifts the
/// peak of `|u|` to index 0 (ties broken by the smallest index in `P_k` order)
/// and flips the sign so `u_0 > 0`.
pub fn align(u: &RingField) -> Result<RingField> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let peak_val = u.linf_norm();
    // bond-centered states carry a pair of peaks equal up to roundoff; treat
    // near-ties as ties so the centering does not depend on float noise
    let tol = 1e-9 * peak_val;
    let candidates: Vec<i64> =
        u.indices().filter(|&l| u.get(l).abs() >= peak_val - tol).collect();

    let mut peak = candidates[0];
    for &c in &candidates[1..] {
        if forward_greater(u, c, peak, tol) {
            peak = c;
        }
    }
    let shifted = u.shift(peak);
    if shifted.get(0) < 0.0 {
        Ok(shifted.scale(-1.0))
    } else {
        Ok(shifted)
    }
}

/// True when the cyclic read of `|u|` starting at `a` is lexicographically
/// greater than the read starting at `b`, comparing entries up to `tol`.
fn forward_greater(u: &RingField, a: i64, b: i64, tol: f64) -> bool {
    for j in 0..u.k() as i64 {
        let va = u.get(a + j).abs();
        let vb = u.get(b + j).abs();
        if (va - vb).abs() > tol {
            return va > vb;
        }
    }
    false
}

/// Values of the aligned field at indices `-L..=L`, for comparing fields of
/// different periods on one window.
pub fn embed_window(u: &RingField, half_width: usize) -> Result<Vec<f64>> {
    if 2 * half_width + 1 > u.k() {
        return Err(Error::WindowTooLarge { l: half_width, k: u.k() });
    }
    let aligned = align(u)?;
    let l = half_width as i64;
    Ok((-l..=l).map(|i| aligned.get(i)).collect())
}

/// Staggering transform `v_l = (-1)^l u_l`; involutive on even periods.
pub fn stagger(u: &RingField) -> Result<RingField> {
    if u.k() % 2 != 0 {
        return Err(Error::OddPeriod(u.k()));
    }
    let vals = u
        .indices()
        .map(|l| if l.rem_euclid(2) == 0 { u.get(l) } else { -u.get(l) })
        .collect();
    RingField::new(vals)
}

/// Maps defocusing parameters onto the equivalent focusing problem:
/// `(alpha, beta, omega) -> (-alpha, -beta, 4 - omega)`. A focusing solution
/// `v` of the reduced problem staggers back to a defocusing solution
/// `u = stagger(v)` of the original one.
pub fn defocusing_reduce(p: &ModelParams) -> Result<ModelParams> {
    if p.regime != Regime::Defocusing {
        return Err(Error::InvalidRegime { expected: "defocusing", found: "focusing" });
    }
    ModelParams::new(-p.alpha, -p.beta, p.sigma, 4.0 - p.omega)
}

/// Per-k record of the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct KRecord {
    pub k: usize,
    pub m_k: f64,
    pub power: f64,
    pub el_resid: f64,
    /// Aligned l^2 distance to the largest-k ground state on the common window.
    pub distance_to_ref: f64,
}

/// Outcome of [`k_sweep`]; failed periods are carried separately so one bad
/// solve does not sink the whole report.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub params: ModelParams,
    pub records: Vec<KRecord>,
    pub ref_k: usize,
    pub failures: Vec<(usize, Error)>,
}

fn window_distance(u: &RingField, reference: &RingField) -> Result<f64> {
    let k_small = u.k().min(reference.k());
    let half = (k_small - 1) / 2;
    let wu = embed_window(u, half)?;
    let wr = embed_window(reference, half)?;
    let mut acc = Kahan::new();
    for (a, b) in wu.iter().zip(&wr) {
        let d = a - b;
        acc.add(d * d);
    }
    Ok(acc.sum().sqrt())
}

/// Solves the ground state for each period in `ks` (ascending), aligns the
/// fields, and measures their distance to the largest-k state.
pub fn k_sweep(
    p: &ModelParams,
    ks: &[usize],
    opts: &SolverOptions,
) -> Result<ConvergenceReport> {
    if ks.is_empty() {
        return Err(Error::InvalidK(0));
    }
    let mut sorted = ks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let mut solved = Vec::new();
    let mut failures = Vec::new();
    for &k in &sorted {
        match ground_state(p, k, opts) {
            Ok(gs) => solved.push(gs),
            Err(e) => failures.push((k, e)),
        }
    }
    let reference = solved
        .last()
        .ok_or(Error::NoConvergence { iterations: 0, residual: f64::INFINITY })?
        .clone();

    let mut records = Vec::with_capacity(solved.len());
    for gs in &solved {
        let distance_to_ref = if gs.field.k() == reference.field.k() {
            0.0
        } else {
            window_distance(&gs.field, &reference.field)?
        };
        records.push(KRecord {
            k: gs.field.k(),
            m_k: gs.objective,
            power: gs.power,
            el_resid: gs.el_resid,
            distance_to_ref,
        });
    }
    Ok(ConvergenceReport {
        params: *p,
        records,
        ref_k: reference.field.k(),
        failures,
    })
}
