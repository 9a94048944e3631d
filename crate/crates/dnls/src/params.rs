use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign regime of the model coefficients.
///
/// Focusing: `alpha > 0`, `beta > 0`, `omega < 0`.
/// Defocusing: `alpha < 0`, `beta < 0`, `omega > 4`; handled by the
/// staggering reduction in [`crate::convergence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Focusing,
    Defocusing,
}

/// Physical coefficients of the lattice equation
/// `i psi' + Delta psi + alpha psi (|psi_{l+1}|^2 + |psi_{l-1}|^2) + beta |psi|^{2 sigma} psi = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Coupling of the nonlinear hopping term.
    pub alpha: f64,
    /// Coupling of the on-site power nonlinearity.
    pub beta: f64,
    /// Degree of the on-site nonlinearity, any real >= 1.
    pub sigma: f64,
    /// Breather frequency.
    pub omega: f64,
    pub regime: Regime,
}

impl ModelParams {
    /// Validates the coefficients and infers the regime from their signs.
    pub fn new(alpha: f64, beta: f64, sigma: f64, omega: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && sigma.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
        if sigma < 1.0 {
            return Err(Error::InvalidParams(format!(
                "sigma must satisfy sigma >= 1, got {sigma}"
            )));
        }
        let regime = if alpha > 0.0 && beta > 0.0 && omega < 0.0 {
            Regime::Focusing
        } else if alpha < 0.0 && beta < 0.0 && omega > 4.0 {
            Regime::Defocusing
        } else {
            return Err(Error::InvalidParams(format!(
                "coefficients (alpha={alpha}, beta={beta}, omega={omega}) fit neither regime: \
                 focusing needs alpha > 0, beta > 0, omega < 0; \
                 defocusing needs alpha < 0, beta < 0, omega > 4"
            )));
        };
        Ok(Self { alpha, beta, sigma, omega, regime })
    }

    /// Focusing parameters with the given frequency, `alpha = beta = 1`.
    pub fn focusing(sigma: f64, omega: f64) -> Result<Self> {
        Self::new(1.0, 1.0, sigma, omega)
    }

    pub fn is_focusing(&self) -> bool {
        self.regime == Regime::Focusing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_inference() {
        assert_eq!(ModelParams::new(1.0, 1.0, 1.0, -1.0).unwrap().regime, Regime::Focusing);
        assert_eq!(ModelParams::new(-1.0, -1.0, 1.0, 5.0).unwrap().regime, Regime::Defocusing);
    }

    #[test]
    fn rejects_mixed_signs() {
        assert!(ModelParams::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0, 1.0, -1.0).is_err());
        assert!(ModelParams::new(-1.0, -1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn rejects_small_sigma() {
        assert!(ModelParams::new(1.0, 1.0, 0.5, -1.0).is_err());
    }
}
