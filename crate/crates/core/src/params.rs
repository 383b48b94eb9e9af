//! Exponent bundles shared by the functionals, constants and the catalog.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The exponent tuple (p, q, α, β, a) of the inequality family.
///
/// `p` is always required; the rest are per-case. `p < 0` is legal in the
/// regimes that allow it, `p = 0` never is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: f64,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
}

impl Exponents {
    pub fn p(p: f64) -> Self {
        Self { p, q: None, alpha: None, beta: None, a: None }
    }

    pub fn with_alpha(p: f64, alpha: f64) -> Self {
        Self { alpha: Some(alpha), ..Self::p(p) }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = Some(a);
        self
    }

    /// Conjugate exponent p' = p/(p-1); negative for 0 < p < 1.
    pub fn p_conj(&self) -> Result<f64> {
        conjugate(self.p)
    }

    pub fn require_q(&self) -> Result<f64> {
        self.q.ok_or_else(|| Error::Parameter("q is required for this case".into()))
    }

    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| Error::Parameter("alpha is required for this case".into()))
    }

    pub fn require_beta(&self) -> Result<f64> {
        self.beta.ok_or_else(|| Error::Parameter("beta is required for this case".into()))
    }

    pub fn require_a(&self) -> Result<f64> {
        self.a.ok_or_else(|| Error::Parameter("a (weight exponent) is required for this case".into()))
    }
}

/// p' = p/(p-1), defined for p not in {0, 1}.
pub fn conjugate(p: f64) -> Result<f64> {
    if p == 0.0 || p == 1.0 || !p.is_finite() {
        return Err(Error::Parameter(format!("conjugate exponent undefined for p = {p}")));
    }
    Ok(p / (p - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_values() {
        assert_eq!(conjugate(2.0).unwrap(), 2.0);
        assert!((conjugate(1.5).unwrap() - 3.0).abs() < 1e-15);
        // negative for 0 < p < 1
        assert_eq!(conjugate(0.5).unwrap(), -1.0);
        assert!(conjugate(1.0).is_err());
        assert!(conjugate(0.0).is_err());
    }
}
