//! Finite-blocklength achievable rates (normal approximation) in b/s/Hz.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSample, LinkConfig};
use crate::error::{Error, Result};
use crate::specfun::inv_gaussian_q;

/// How a user turns its own gain into an SNR/SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Service {
    /// Decodes after SIC; sees `α₁γ`.
    NomaStrong,
    /// Treats the strong user's signal as interference; sees `α₂γ/(α₁γ+1)`.
    NomaWeak,
    /// Full power on its own time share; sees `γ`.
    Oma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    /// b/s/Hz; negative values are legal outputs of the approximation.
    pub rate: f64,
    pub dispersion: f64,
    pub effective_snr: f64,
}

/// `V = 1 - (1+x)^{-2}`, written to stay accurate for small `x`.
pub fn channel_dispersion(snr: f64) -> f64 {
    let d = 1.0 + snr;
    snr * (2.0 + snr) / (d * d)
}

pub fn noma_strong_sinr(sample: &ChannelSample, cfg: &LinkConfig) -> f64 {
    cfg.alpha1 * sample.gamma1
}

pub fn noma_weak_sinr(sample: &ChannelSample, cfg: &LinkConfig) -> f64 {
    weak_sinr(sample.gamma2, cfg.alpha1, cfg.alpha2)
}

fn weak_sinr(gamma: f64, alpha1: f64, alpha2: f64) -> f64 {
    if gamma.is_infinite() {
        return alpha2 / alpha1;
    }
    alpha2 * gamma / (alpha1 * gamma + 1.0)
}

/// Rate evaluator with `Q⁻¹(ε)` and `√n` precomputed.
#[derive(Debug, Clone, Copy)]
pub struct RateModel {
    alpha1: f64,
    alpha2: f64,
    sqrt_n: f64,
    q_inv: f64,
    clamp: bool,
}

impl RateModel {
    /// Fails for `ε = 1`, where the penalty term is unbounded.
    pub fn new(cfg: &LinkConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.epsilon >= 1.0 {
            return Err(Error::domain("RateModel::new", "rates are undefined for epsilon = 1"));
        }
        Ok(Self {
            alpha1: cfg.alpha1,
            alpha2: cfg.alpha2,
            sqrt_n: (cfg.blocklength as f64).sqrt(),
            q_inv: inv_gaussian_q(cfg.epsilon)?,
            clamp: cfg.clamp_rate,
        })
    }

    pub fn q_inv(&self) -> f64 {
        self.q_inv
    }

    pub fn effective_snr(&self, service: Service, gamma: f64) -> f64 {
        match service {
            Service::NomaStrong => self.alpha1 * gamma,
            Service::NomaWeak => weak_sinr(gamma, self.alpha1, self.alpha2),
            Service::Oma => gamma,
        }
    }

    /// `share · (log₂(1+x) − √(V/n) Q⁻¹(ε))` for a user holding `share` of the slot.
    pub fn rate(&self, service: Service, gamma: f64, share: f64) -> RateSample {
        let snr = self.effective_snr(service, gamma);
        let dispersion = channel_dispersion(snr);
        let raw = snr.ln_1p() / LN_2 - dispersion.sqrt() / self.sqrt_n * self.q_inv;
        let rate = share * raw;
        RateSample {
            rate: if self.clamp { rate.max(0.0) } else { rate },
            dispersion,
            effective_snr: snr,
        }
    }

    /// Same rate with the dispersion replaced by one (the high-SNR form the
    /// closed-form expressions are built on).
    pub fn rate_unit_dispersion(&self, service: Service, gamma: f64, share: f64) -> f64 {
        let snr = self.effective_snr(service, gamma);
        let rate = share * (snr.ln_1p() / LN_2 - self.q_inv / self.sqrt_n);
        if self.clamp {
            rate.max(0.0)
        } else {
            rate
        }
    }
}

pub fn fbl_rate_noma_strong(sample: &ChannelSample, cfg: &LinkConfig) -> Result<RateSample> {
    Ok(RateModel::new(cfg)?.rate(Service::NomaStrong, sample.gamma1, 1.0))
}

pub fn fbl_rate_noma_weak(sample: &ChannelSample, cfg: &LinkConfig) -> Result<RateSample> {
    Ok(RateModel::new(cfg)?.rate(Service::NomaWeak, sample.gamma2, 1.0))
}

/// OMA rate: each user holds half of the slot.
pub fn fbl_rate_oma(gamma: f64, cfg: &LinkConfig) -> Result<RateSample> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain("fbl_rate_oma", format!("gain must be nonnegative, got {gamma}")));
    }
    Ok(RateModel::new(cfg)?.rate(Service::Oma, gamma, 0.5))
}
