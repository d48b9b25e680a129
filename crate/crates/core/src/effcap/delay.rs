//! Delay-violation estimate from the EC exponent.

use serde::{Deserialize, Serialize};

use super::QosConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    /// Largest tolerable delay, in units of `1/mu`.
    pub d_max: f64,
    /// Arrival rate.
    pub mu: f64,
    /// `Pr{queue nonempty}`; 1 gives an upper bound.
    #[serde(default = "one")]
    pub p_nonempty: f64,
}

fn one() -> f64 {
    1.0
}

impl DelayModel {
    pub fn new(d_max: f64, mu: f64) -> Self {
        Self { d_max, mu, p_nonempty: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_max >= 0.0 && self.d_max.is_finite()) {
            return Err(Error::config(format!("d_max must be nonnegative, got {}", self.d_max)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::config(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.p_nonempty > 0.0 && self.p_nonempty <= 1.0) {
            return Err(Error::config(format!("p_nonempty must lie in (0, 1], got {}", self.p_nonempty)));
        }
        Ok(())
    }
}

/// `Pr{delay > d_max} ≈ p_nonempty · e^{-θ μ d_max}`.
pub fn delay_violation_prob(dm: &DelayModel, qos: &QosConfig) -> Result<f64> {
    dm.validate()?;
    qos.validate()?;
    Ok((dm.p_nonempty * (-qos.theta * dm.mu * dm.d_max).exp()).clamp(0.0, 1.0))
}
