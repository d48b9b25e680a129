//! Effective capacity (EC) of NOMA and OMA users under a delay exponent θ.
//!
//! For a per-block service rate `r`, the EC is
//! `-(1/(θn)) ln E[ε + (1-ε) e^{-θ n r}]`. Three independent evaluators are
//! provided:
//!
//! * [`monte_carlo`]: sample averages over simulated fading blocks, exact
//!   channel dispersion;
//! * [`quadrature`]: numerical integration against the order-statistic
//!   density, with exact or unit dispersion;
//! * [`closed_form`]: analytic expressions in terms of the Tricomi function
//!   and the exponential integral (unit dispersion).
//!
//! All three accept any [`UserLink`], i.e. any rank among `K` users and any
//! time share, which is what the multi-pair extension in [`multiuser`] is
//! built on. The two-user roles are the special case `K = 2`.

pub mod closed_form;
pub mod delay;
pub mod monte_carlo;
pub mod multiuser;
pub mod quadrature;

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{LinkConfig, OrderStatSpec};
use crate::error::{Error, Result};
use crate::rates::Service;
use crate::specfun::{inv_gaussian_q, AccuracyPolicy};

pub use closed_form::{
    ec_closed_noma_strong, ec_closed_noma_weak, ec_closed_oma, ClosedFormOptions, K1Coefficient, OmaUser,
    SeriesOptions, WeakOmaArgument,
};
pub use delay::{delay_violation_prob, DelayModel};
pub use monte_carlo::{ec_monte_carlo, monte_carlo_mean_rate, McConfig};
pub use multiuser::{multiuser_pair_ecs, multiuser_total_ec, MultiUserConfig, Pairing};
pub use quadrature::{ec_quadrature, quadrature_user};
pub use closed_form::{closed_form_user, closed_form_with};

/// Delay QoS requirement of one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosConfig {
    pub theta: f64,
}

impl QosConfig {
    pub fn new(theta: f64) -> Result<Self> {
        let q = Self { theta };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::config(format!("theta must be positive, got {}", self.theta)));
        }
        Ok(())
    }
}

/// `Υ = -θn / (2 ln 2)` and `ψ = θ √n Q⁻¹(ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosDerived {
    pub upsilon: f64,
    pub psi: f64,
}

impl QosDerived {
    pub fn new(qos: &QosConfig, link: &LinkConfig) -> Result<Self> {
        qos.validate()?;
        link.validate()?;
        let n = link.blocklength as f64;
        Ok(Self {
            upsilon: -qos.theta * n / (2.0 * LN_2),
            psi: qos.theta * n.sqrt() * inv_gaussian_q(link.epsilon)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonteCarlo,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ClosedForm, Method::Quadrature, Method::MonteCarlo];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte_carlo",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "monte_carlo" | "mc" => Ok(Method::MonteCarlo),
            "quadrature" | "quad" => Ok(Method::Quadrature),
            "closed_form" | "closed" => Ok(Method::ClosedForm),
            _ => Err(Error::config(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Noma,
    Oma,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Noma => "noma",
            Scheme::Oma => "oma",
        }
    }
}

/// The four users of the two-user comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserRole {
    NomaStrong,
    NomaWeak,
    OmaStrong,
    OmaWeak,
}

impl UserRole {
    pub const ALL: [UserRole; 4] = [
        UserRole::NomaStrong,
        UserRole::NomaWeak,
        UserRole::OmaStrong,
        UserRole::OmaWeak,
    ];

    pub fn link(self) -> UserLink {
        match self {
            UserRole::NomaStrong => UserLink::two_user(Service::NomaStrong, 1, 1.0),
            UserRole::NomaWeak => UserLink::two_user(Service::NomaWeak, 2, 1.0),
            UserRole::OmaStrong => UserLink::two_user(Service::Oma, 1, 0.5),
            UserRole::OmaWeak => UserLink::two_user(Service::Oma, 2, 0.5),
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            UserRole::NomaStrong | UserRole::NomaWeak => Scheme::Noma,
            UserRole::OmaStrong | UserRole::OmaWeak => Scheme::Oma,
        }
    }

    pub fn is_strong(self) -> bool {
        matches!(self, UserRole::NomaStrong | UserRole::OmaStrong)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserRole::NomaStrong => "noma_strong",
            UserRole::NomaWeak => "noma_weak",
            UserRole::OmaStrong => "oma_strong",
            UserRole::OmaWeak => "oma_weak",
        }
    }
}

impl FromStr for UserRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "noma_strong" => Ok(UserRole::NomaStrong),
            "noma_weak" => Ok(UserRole::NomaWeak),
            "oma_strong" => Ok(UserRole::OmaStrong),
            "oma_weak" => Ok(UserRole::OmaWeak),
            _ => Err(Error::config(format!("unknown user '{s}'"))),
        }
    }
}

/// One user as the EC evaluators see it: how its SNR is formed, which
/// order statistic its gain follows, and the fraction of the slot it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLink {
    pub service: Service,
    /// Gain rank among `population` users, 1 = strongest.
    pub rank: usize,
    pub population: usize,
    /// Fraction of the slot (TDMA share) the rate is scaled by.
    pub share: f64,
}

impl UserLink {
    pub fn two_user(service: Service, rank: usize, share: f64) -> Self {
        Self {
            service,
            rank,
            population: 2,
            share,
        }
    }

    pub fn order_stat(&self) -> Result<OrderStatSpec> {
        OrderStatSpec::new(self.rank, self.population)
    }

    pub fn validate(&self) -> Result<()> {
        self.order_stat()?;
        if !(self.share > 0.0 && self.share <= 1.0) {
            return Err(Error::config(format!("time share must lie in (0, 1], got {}", self.share)));
        }
        Ok(())
    }
}

/// An effective-capacity value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcEstimate {
    /// b/s/Hz.
    pub value: f64,
    pub method: Method,
    /// Delta-method standard error; zero for deterministic methods.
    pub std_error: f64,
    /// Monte-Carlo samples, quadrature integrand evaluations, or series
    /// terms summed by the closed form.
    pub samples_or_nodes: u64,
}

impl EcEstimate {
    fn exact_zero(method: Method) -> Self {
        Self {
            value: 0.0,
            method,
            std_error: 0.0,
            samples_or_nodes: 0,
        }
    }
}

/// An evaluator together with its settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EcMethod {
    MonteCarlo(McConfig),
    Quadrature {
        approx_dispersion: bool,
        policy: AccuracyPolicy,
    },
    ClosedForm(ClosedFormOptions),
}

impl EcMethod {
    pub fn kind(&self) -> Method {
        match self {
            EcMethod::MonteCarlo(_) => Method::MonteCarlo,
            EcMethod::Quadrature { .. } => Method::Quadrature,
            EcMethod::ClosedForm(_) => Method::ClosedForm,
        }
    }
}

/// EC of an arbitrary user with the chosen evaluator.
pub fn ec_user(user: &UserLink, link: &LinkConfig, qos: &QosConfig, method: &EcMethod) -> Result<EcEstimate> {
    match method {
        EcMethod::MonteCarlo(mc) => monte_carlo::monte_carlo_user(user, link, qos, mc),
        EcMethod::Quadrature {
            approx_dispersion,
            policy,
        } => quadrature::quadrature_user(user, link, qos, *approx_dispersion, policy),
        EcMethod::ClosedForm(opts) => closed_form::closed_form_user(user, link, qos, opts),
    }
}

/// `C₁ + C₂` of the two-user system under `scheme`. `qos_pair` holds the
/// strong user's requirement first.
pub fn total_ec(method: &EcMethod, link: &LinkConfig, qos_pair: (QosConfig, QosConfig), scheme: Scheme) -> Result<f64> {
    let (strong, weak) = match scheme {
        Scheme::Noma => (UserRole::NomaStrong, UserRole::NomaWeak),
        Scheme::Oma => (UserRole::OmaStrong, UserRole::OmaWeak),
    };
    let c1 = ec_user(&strong.link(), link, &qos_pair.0, method)?;
    let c2 = ec_user(&weak.link(), link, &qos_pair.1, method)?;
    Ok(c1.value + c2.value)
}

/// Common validation for every evaluator. Returns `true` when `ε = 1`, in
/// which case the kernel is identically one and the EC is exactly zero.
fn check_inputs(user: &UserLink, link: &LinkConfig, qos: &QosConfig) -> Result<bool> {
    link.validate()?;
    qos.validate()?;
    user.validate()?;
    let theta_n = qos.theta * link.blocklength as f64;
    if !(theta_n.is_finite() && theta_n > 0.0) {
        return Err(Error::domain("effective capacity", format!("theta * n = {theta_n} is degenerate")));
    }
    Ok(link.epsilon >= 1.0)
}

/// `-(1/(θn)) ln(kernel_mean)`.
fn ec_from_kernel_mean(kernel_mean: f64, theta: f64, blocklength: u64) -> Result<f64> {
    if !(kernel_mean > 0.0 && kernel_mean.is_finite()) {
        return Err(Error::domain(
            "effective capacity",
            format!("kernel expectation {kernel_mean} is not a positive finite number"),
        ));
    }
    Ok(-kernel_mean.ln() / (theta * blocklength as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let link = LinkConfig::default();
        let d = QosDerived::new(&QosConfig { theta: 0.01 }, &link).unwrap();
        assert!((d.upsilon - (-4.0 / (2.0 * LN_2))).abs() < 1e-14);
        assert!((d.upsilon + 2.885390081777927).abs() < 1e-12);
        assert!(d.psi > 0.0);
        let half = QosDerived::new(&QosConfig { theta: 0.01 }, &LinkConfig { epsilon: 0.9, ..link }).unwrap();
        assert!(half.psi < 0.0);
    }

    #[test]
    fn roles_map_to_two_user_links() {
        assert_eq!(UserRole::OmaWeak.link(), UserLink::two_user(Service::Oma, 2, 0.5));
        assert_eq!(UserRole::NomaStrong.link().share, 1.0);
        for r in UserRole::ALL {
            assert_eq!(r.as_str().parse::<UserRole>().unwrap(), r);
        }
        assert_eq!("closed-form".parse::<Method>().unwrap(), Method::ClosedForm);
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn qos_validation() {
        assert!(QosConfig::new(0.0).is_err());
        assert!(QosConfig::new(-1.0).is_err());
        assert!(QosConfig::new(f64::NAN).is_err());
        assert!(QosConfig::new(1e-3).is_ok());
    }
}
