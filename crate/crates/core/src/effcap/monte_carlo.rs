//! Monte-Carlo EC estimator with exact channel dispersion.
//!
//! Samples are split into fixed-size batches. Batch `i` draws from ChaCha
//! stream `i` of the master seed, and batch statistics are merged with a
//! fixed pairwise tree, so the estimate is bit-identical for a given seed no
//! matter how many threads run it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_inputs, ec_from_kernel_mean, EcEstimate, Method, QosConfig, UserLink, UserRole};
use crate::channel::{sample_ordered_gains_into, task_rng, LinkConfig};
use crate::error::{Error, Result};
use crate::rates::RateModel;

const BATCH: u64 = 8192;
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub num_samples: u64,
    pub master_seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            num_samples: 100_000,
            master_seed: 0x5eed,
        }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    pub count: f64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0.0 {
            return b;
        }
        if b.count == 0.0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        Moments {
            count,
            mean: a.mean + delta * b.count / count,
            m2: a.m2 + b.m2 + delta * delta * a.count * b.count / count,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count).sqrt()
    }
}

fn tree_merge(mut parts: Vec<(Moments, Moments)>) -> (Moments, Moments) {
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| match c {
                [a, b] => (Moments::merge(a.0, b.0), Moments::merge(a.1, b.1)),
                [a] => *a,
                _ => unreachable!(),
            })
            .collect();
    }
    parts.pop().unwrap_or_default()
}

/// Moments of the EC kernel and of the rate for `user`.
pub(crate) fn sample_moments(
    user: &UserLink,
    link: &LinkConfig,
    qos: &QosConfig,
    mc: &McConfig,
) -> Result<(Moments, Moments)> {
    if mc.num_samples < MIN_SAMPLES {
        return Err(Error::config(format!(
            "Monte-Carlo needs at least {MIN_SAMPLES} samples, got {}",
            mc.num_samples
        )));
    }
    let model = RateModel::new(link)?;
    let eps = link.epsilon;
    let theta_n = qos.theta * link.blocklength as f64;
    let batches = mc.num_samples.div_ceil(BATCH);

    let parts: Vec<(Moments, Moments)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = task_rng(mc.master_seed, b);
            let size = BATCH.min(mc.num_samples - b * BATCH);
            let mut gains = vec![0.0; user.population];
            let mut kernel = Moments::default();
            let mut rate = Moments::default();
            for _ in 0..size {
                sample_ordered_gains_into(&mut rng, link.rho, &mut gains);
                let r = model.rate(user.service, gains[user.rank - 1], user.share).rate;
                kernel.push(eps + (1.0 - eps) * (-theta_n * r).exp());
                rate.push(r);
            }
            (kernel, rate)
        })
        .collect();
    Ok(tree_merge(parts))
}

/// EC of any user by simulation.
pub fn monte_carlo_user(user: &UserLink, link: &LinkConfig, qos: &QosConfig, mc: &McConfig) -> Result<EcEstimate> {
    if check_inputs(user, link, qos)? {
        return Ok(EcEstimate {
            samples_or_nodes: mc.num_samples,
            ..EcEstimate::exact_zero(Method::MonteCarlo)
        });
    }
    let (kernel, _) = sample_moments(user, link, qos, mc)?;
    let theta_n = qos.theta * link.blocklength as f64;
    let value = ec_from_kernel_mean(kernel.mean, qos.theta, link.blocklength)?;
    // delta method on -ln(mean)/(θn)
    let std_error = kernel.std_error() / (kernel.mean * theta_n);
    Ok(EcEstimate {
        value,
        method: Method::MonteCarlo,
        std_error,
        samples_or_nodes: mc.num_samples,
    })
}

/// EC of one of the four two-user roles by simulation.
pub fn ec_monte_carlo(user: UserRole, link: &LinkConfig, qos: &QosConfig, mc: &McConfig) -> Result<EcEstimate> {
    monte_carlo_user(&user.link(), link, qos, mc)
}

/// Sample mean of the service rate and its standard error; the small-θ limit
/// of the EC is `(1 - ε)` times this mean.
pub fn monte_carlo_mean_rate(user: &UserLink, link: &LinkConfig, mc: &McConfig) -> Result<(f64, f64)> {
    let qos = QosConfig { theta: 1.0 };
    check_inputs(user, link, &qos)?;
    let (_, rate) = sample_moments(user, link, &qos, mc)?;
    Ok((rate.mean, rate.std_error()))
}
