//! Rayleigh block-fading power gains and their order statistics.
//!
//! A gain is carried as `γ = ρ|h|²`, which is exponential with mean `ρ`.
//! Users are ranked by gain, rank 1 being the strongest.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::beta_fn;

/// Physical-link parameters shared by every user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Linear transmit SNR `P / (N₀B)`.
    pub rho: f64,
    /// Power coefficient of the strong user.
    pub alpha1: f64,
    /// Power coefficient of the weak user.
    pub alpha2: f64,
    /// Channel uses per codeword.
    pub blocklength: u64,
    /// Decoding error probability.
    pub epsilon: f64,
    /// Replace negative normal-approximation rates by zero.
    #[serde(default)]
    pub clamp_rate: bool,
}

impl LinkConfig {
    /// α₁ = 0.3, α₂ = 0.7, n = 400, ε = 1e-6 at the given SNR in dB.
    pub fn with_snr_db(rho_db: f64) -> Self {
        Self {
            rho: db_to_linear(rho_db),
            ..Self::default()
        }
    }

    pub fn rho_db(&self) -> f64 {
        linear_to_db(self.rho)
    }

    /// Checks every invariant. `epsilon = 1` is accepted as the degenerate
    /// always-in-error link whose effective capacity is zero.
    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::config(format!("rho must be positive, got {}", self.rho)));
        }
        if self.blocklength == 0 {
            return Err(Error::config("blocklength must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.alpha1 > 0.0 && self.alpha1 <= self.alpha2) {
            return Err(Error::config(format!(
                "power coefficients need 0 < alpha1 <= alpha2 (got {}, {})",
                self.alpha1, self.alpha2
            )));
        }
        if ((self.alpha1 + self.alpha2) - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!(
                "power coefficients must sum to 1 (got {} + {})",
                self.alpha1, self.alpha2
            )));
        }
        Ok(())
    }
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            rho: 100.0,
            alpha1: 0.3,
            alpha2: 0.7,
            blocklength: 400,
            epsilon: 1e-6,
            clamp_rate: false,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// One block's ordered pair of received-SNR variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    pub gamma1: f64,
    pub gamma2: f64,
}

/// Which order statistic a user's gain follows: the `index`-th largest of
/// `population` i.i.d. gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatSpec {
    pub index: usize,
    pub population: usize,
    /// `1 / B(index, population - index + 1)`.
    pub xi: f64,
}

impl OrderStatSpec {
    pub fn new(index: usize, population: usize) -> Result<Self> {
        if index == 0 || index > population {
            return Err(Error::domain(
                "OrderStatSpec::new",
                format!("rank {index} out of range for {population} users"),
            ));
        }
        let xi = 1.0 / beta_fn(index as f64, (population - index + 1) as f64)?;
        Ok(Self { index, population, xi })
    }

    /// Strong (`1`) or weak (`2`) user of a two-user system.
    pub fn two_user(index: usize) -> Result<Self> {
        Self::new(index, 2)
    }
}

fn check_gain(function: &'static str, gamma: f64, rho: f64) -> Result<()> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain(function, format!("gain must be nonnegative, got {gamma}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(function, format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// Exponential density `(1/ρ) e^{-γ/ρ}` of an unordered gain.
pub fn unordered_gain_pdf(gamma: f64, rho: f64) -> Result<f64> {
    check_gain("unordered_gain_pdf", gamma, rho)?;
    Ok((-gamma / rho).exp() / rho)
}

pub fn unordered_gain_cdf(gamma: f64, rho: f64) -> Result<f64> {
    check_gain("unordered_gain_cdf", gamma, rho)?;
    Ok(-(-gamma / rho).exp_m1())
}

/// Density of the `spec.index`-th largest gain:
/// `ξ f(γ) F(γ)^{K-k} (1 - F(γ))^{k-1}`.
pub fn ordered_gain_pdf(spec: OrderStatSpec, gamma: f64, rho: f64) -> Result<f64> {
    check_gain("ordered_gain_pdf", gamma, rho)?;
    let OrderStatSpec { index, population, xi } = spec;
    if index == 0 || index > population {
        return Err(Error::domain("ordered_gain_pdf", format!("invalid rank {index} of {population}")));
    }
    Ok(ordered_pdf_unchecked(index, population, xi, gamma, rho))
}

#[inline]
pub(crate) fn ordered_pdf_unchecked(index: usize, population: usize, xi: f64, gamma: f64, rho: f64) -> f64 {
    let x = gamma / rho;
    let survival = (-x).exp();
    let cdf = -(-x).exp_m1();
    xi / rho * survival.powi(index as i32) * cdf.powi((population - index) as i32)
}

/// `P(γ_{k:K} ≤ γ)`: at least `K - k + 1` of the gains fall below `γ`.
pub fn ordered_gain_cdf(spec: OrderStatSpec, gamma: f64, rho: f64) -> Result<f64> {
    check_gain("ordered_gain_cdf", gamma, rho)?;
    let OrderStatSpec { index, population, .. } = spec;
    if index == 0 || index > population {
        return Err(Error::domain("ordered_gain_cdf", format!("invalid rank {index} of {population}")));
    }
    let f = -(-gamma / rho).exp_m1();
    let s = (-gamma / rho).exp();
    let mut total = 0.0;
    let mut binom = 1.0;
    // binom tracks C(K, j) as j runs up from 0
    for j in 0..=population {
        if j > population - index {
            total += binom * f.powi(j as i32) * s.powi((population - j) as i32);
        }
        binom = binom * (population - j) as f64 / (j + 1) as f64;
    }
    Ok(total.min(1.0))
}

/// Draws two independent gains with mean `rho` and returns them sorted.
pub fn sample_ordered_gains<R: Rng + ?Sized>(rng: &mut R, rho: f64) -> ChannelSample {
    let mut g = [0.0; 2];
    sample_ordered_gains_into(rng, rho, &mut g);
    ChannelSample {
        gamma1: g[0],
        gamma2: g[1],
    }
}

/// Fills `out` with `out.len()` independent gains of mean `rho`, sorted
/// strongest first.
pub fn sample_ordered_gains_into<R: Rng + ?Sized>(rng: &mut R, rho: f64, out: &mut [f64]) {
    for g in out.iter_mut() {
        let e: f64 = Exp1.sample(rng);
        *g = rho * e;
    }
    out.sort_unstable_by(|a, b| b.total_cmp(a));
}

/// Generator for Monte-Carlo task `task` under `master_seed`. Each task gets
/// its own ChaCha stream, so results do not depend on scheduling.
pub fn task_rng(master_seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(task);
    rng
}
