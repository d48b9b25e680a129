//! Several NOMA pairs sharing the slot by TDMA, against OMA over all served
//! users.
//!
//! The served users are the `served_users` strongest of `total_users`
//! i.i.d. gains. Each pair holds `1/num_pairs` of the slot; in the OMA
//! baseline each served user holds `1/served_users`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ec_user, EcEstimate, EcMethod, QosConfig, Scheme, UserLink};
use crate::channel::{task_rng, LinkConfig};
use crate::error::{Error, Result};
use crate::rates::Service;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Pairing {
    /// Rank `i` with rank `S + 1 - i`.
    #[default]
    StrongestWeakest,
    /// Ranks `(1,2), (3,4), ...`.
    Adjacent,
    /// A seeded random partition of the served ranks.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiUserConfig {
    pub total_users: usize,
    pub served_users: usize,
    pub pairing: Pairing,
    /// `(α₁, α₂)` used inside every pair.
    pub per_pair_alphas: (f64, f64),
    /// One θ for everybody, or one per served user in rank order.
    pub thetas: Vec<f64>,
}

impl MultiUserConfig {
    pub fn new(total_users: usize, served_users: usize, theta: f64) -> Self {
        Self {
            total_users,
            served_users,
            pairing: Pairing::default(),
            per_pair_alphas: (0.3, 0.7),
            thetas: vec![theta],
        }
    }

    pub fn num_pairs(&self) -> usize {
        self.served_users / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.served_users == 0 || !self.served_users.is_multiple_of(2) {
            return Err(Error::config(format!(
                "served_users must be a positive even number, got {}",
                self.served_users
            )));
        }
        if self.served_users > self.total_users {
            return Err(Error::config(format!(
                "served_users ({}) exceeds total_users ({})",
                self.served_users, self.total_users
            )));
        }
        if self.thetas.len() != 1 && self.thetas.len() != self.served_users {
            return Err(Error::config(format!(
                "thetas must hold 1 or {} values, got {}",
                self.served_users,
                self.thetas.len()
            )));
        }
        for &t in &self.thetas {
            QosConfig::new(t)?;
        }
        Ok(())
    }

    fn theta_of(&self, rank: usize) -> f64 {
        if self.thetas.len() == 1 {
            self.thetas[0]
        } else {
            self.thetas[rank - 1]
        }
    }

    /// `(strong rank, weak rank)` of every pair.
    pub fn pairs(&self) -> Result<Vec<(usize, usize)>> {
        self.validate()?;
        let s = self.served_users;
        let pairs = match self.pairing {
            Pairing::StrongestWeakest => (1..=s / 2).map(|i| (i, s + 1 - i)).collect(),
            Pairing::Adjacent => (1..=s / 2).map(|i| (2 * i - 1, 2 * i)).collect(),
            Pairing::Random { seed } => {
                let mut ranks: Vec<usize> = (1..=s).collect();
                ranks.shuffle(&mut task_rng(seed, 0));
                ranks
                    .chunks(2)
                    .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
                    .collect()
            }
        };
        Ok(pairs)
    }
}

/// Sum of the EC of every served user.
pub fn multiuser_total_ec(cfg: &MultiUserConfig, link: &LinkConfig, scheme: Scheme, method: &EcMethod) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in multiuser_pair_ecs(cfg, link, scheme, method)? {
        total += a.value + b.value;
    }
    Ok(total)
}

/// Per-user estimates, two at a time: NOMA pairs as `(strong, weak)`, OMA
/// users by consecutive rank. Summing each tuple and then the tuples gives
/// exactly the two-user total when there is one pair.
pub fn multiuser_pair_ecs(
    cfg: &MultiUserConfig,
    link: &LinkConfig,
    scheme: Scheme,
    method: &EcMethod,
) -> Result<Vec<(EcEstimate, EcEstimate)>> {
    cfg.validate()?;
    let link = LinkConfig {
        alpha1: cfg.per_pair_alphas.0,
        alpha2: cfg.per_pair_alphas.1,
        ..*link
    };
    let population = cfg.total_users;
    let ec = |service, rank, share| {
        let user = UserLink {
            service,
            rank,
            population,
            share,
        };
        ec_user(&user, &link, &QosConfig::new(cfg.theta_of(rank))?, method)
    };
    match scheme {
        Scheme::Noma => {
            let share = 1.0 / cfg.num_pairs() as f64;
            cfg.pairs()?
                .into_iter()
                .map(|(strong, weak)| Ok((ec(Service::NomaStrong, strong, share)?, ec(Service::NomaWeak, weak, share)?)))
                .collect()
        }
        Scheme::Oma => {
            let share = 1.0 / cfg.served_users as f64;
            (1..=cfg.served_users / 2)
                .map(|i| Ok((ec(Service::Oma, 2 * i - 1, share)?, ec(Service::Oma, 2 * i, share)?)))
                .collect()
        }
    }
}
