//! Periodic lattice fields on the fundamental window
//! `P_k = { -floor(k/2), ..., k - floor(k/2) - 1 }`.
//!
//! Values are stored in `P_k` order; all index arithmetic wraps modulo `k`,
//! which realises the periodicity condition `u_{l+k} = u_l`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real-valued k-periodic lattice field; carrier of stationary states.
#[derive(Debug, Clone, PartialEq)]
pub struct RingField {
    k: usize,
    values: Vec<f64>,
}

/// Complex-valued k-periodic lattice field; carrier of time-dependent states.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    k: usize,
    values: Vec<Complex64>,
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidK(k));
    }
    Ok(())
}

impl RingField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_k(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(Self { k: values.len(), values })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Self { k, values: vec![0.0; k] })
    }

    /// Builds a field by evaluating `f` at each lattice index of `P_k`.
    pub fn from_fn(k: usize, f: impl FnMut(i64) -> f64) -> Result<Self> {
        check_k(k)?;
        Self::new(window_indices(k).map(f).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Left edge of the fundamental window, `-floor(k/2)`.
    pub fn window_start(&self) -> i64 {
        -((self.k / 2) as i64)
    }

    /// Lattice indices of `P_k` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        window_indices(self.k)
    }

    /// Value at lattice index `l`, wrapping modulo `k`.
    pub fn get(&self, l: i64) -> f64 {
        self.values[self.slot(l)]
    }

    pub fn set(&mut self, l: i64, v: f64) {
        let s = self.slot(l);
        self.values[s] = v;
    }

    fn slot(&self, l: i64) -> usize {
        (l - self.window_start()).rem_euclid(self.k as i64) as usize
    }

    /// Values in `P_k` order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Cyclic shift: `shift(u, s)_l = u_{l+s}`.
    pub fn shift(&self, s: i64) -> Self {
        Self {
            k: self.k,
            values: self.indices().map(|l| self.get(l + s)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { k: self.k, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn abs(&self) -> Self {
        Self { k: self.k, values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `l_k^p` norm over the fundamental window; `p = infinity` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_impl(self.values.iter().map(|v| v.abs()), p)
    }

    /// Squared `l_k^2` norm (the power), compensated summation.
    pub fn power(&self) -> f64 {
        let mut acc = Kahan::new();
        for &v in &self.values {
            acc.add(v * v);
        }
        acc.sum()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn to_wave(&self) -> WaveField {
        WaveField {
            k: self.k,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

impl WaveField {
    /// Skips the finiteness check; used by the integrator, which must be able
    /// to carry an overflowed state to the blow-up detector.
    pub(crate) fn from_raw(values: Vec<Complex64>) -> Self {
        debug_assert!(values.len() >= 3);
        Self { k: values.len(), values }
    }

    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_k(values.len())?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(Self { k: values.len(), values })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Self { k, values: vec![Complex64::new(0.0, 0.0); k] })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn window_start(&self) -> i64 {
        -((self.k / 2) as i64)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        window_indices(self.k)
    }

    pub fn get(&self, l: i64) -> Complex64 {
        self.values[(l - self.window_start()).rem_euclid(self.k as i64) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn shift(&self, s: i64) -> Self {
        Self {
            k: self.k,
            values: self.indices().map(|l| self.get(l + s)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { k: self.k, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn power(&self) -> f64 {
        let mut acc = Kahan::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        acc.sum()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_impl(self.values.iter().map(|v| v.norm()), p)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

fn window_indices(k: usize) -> impl Iterator<Item = i64> {
    let start = -((k / 2) as i64);
    (0..k as i64).map(move |j| start + j)
}

fn lp_norm_impl(moduli: impl Iterator<Item = f64>, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(moduli.fold(0.0f64, f64::max));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let mut acc = Kahan::new();
    if p == 2.0 {
        for m in moduli {
            acc.add(m * m);
        }
    } else {
        for m in moduli {
            acc.add(m.powf(p));
        }
    }
    Ok(acc.sum().powf(1.0 / p))
}

/// Compensated (Kahan) accumulator; keeps the k-sweep sums at k = 512 clean.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }
}
