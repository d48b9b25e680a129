//! EC by numerical integration against the order-statistic density.

use super::{check_inputs, ec_from_kernel_mean, EcEstimate, Method, QosConfig, UserLink, UserRole};
use crate::channel::{ordered_pdf_unchecked, LinkConfig};
use crate::error::{Error, Result};
use crate::rates::RateModel;
use crate::specfun::{integrate_two_scale, AccuracyPolicy};

/// EC of any user by adaptive quadrature. `approx_dispersion` replaces the
/// channel dispersion by one, which is the rate the closed forms assume.
pub fn quadrature_user(
    user: &UserLink,
    link: &LinkConfig,
    qos: &QosConfig,
    approx_dispersion: bool,
    policy: &AccuracyPolicy,
) -> Result<EcEstimate> {
    if check_inputs(user, link, qos)? {
        return Ok(EcEstimate::exact_zero(Method::Quadrature));
    }
    policy.validate()?;
    let model = RateModel::new(link)?;
    let spec = user.order_stat()?;
    let theta_n = qos.theta * link.blocklength as f64;
    let rho = link.rho;

    let integrand = |g: f64| {
        let r = if approx_dispersion {
            model.rate_unit_dispersion(user.service, g, user.share)
        } else {
            model.rate(user.service, g, user.share).rate
        };
        let pdf = ordered_pdf_unchecked(spec.index, spec.population, spec.xi, g, rho);
        if pdf == 0.0 {
            0.0
        } else {
            (-theta_n * r).exp() * pdf
        }
    };

    let eps = link.epsilon;
    // The density varies over ρ/k, but for large θn the kernel confines the
    // mass to a range of order 1/(θn) next to the origin.
    let density_scale = rho / spec.index as f64;
    let kernel_scale = std::f64::consts::LN_2 / (theta_n * user.share);
    let q = integrate_two_scale(integrand, kernel_scale.min(density_scale), density_scale, policy).map_err(|e| match e {
        Error::Convergence {
            best_estimate,
            error_estimate,
            iterations,
            ..
        } => Error::Convergence {
            routine: "ec_quadrature",
            best_estimate: -(eps + (1.0 - eps) * best_estimate).ln() / theta_n,
            error_estimate,
            iterations,
        },
        other => other,
    })?;
    Ok(EcEstimate {
        value: ec_from_kernel_mean(eps + (1.0 - eps) * q.value, qos.theta, link.blocklength)?,
        method: Method::Quadrature,
        std_error: 0.0,
        samples_or_nodes: q.evaluations,
    })
}

/// EC of one of the four two-user roles by quadrature.
pub fn ec_quadrature(
    user: UserRole,
    link: &LinkConfig,
    qos: &QosConfig,
    approx_dispersion: bool,
    policy: &AccuracyPolicy,
) -> Result<EcEstimate> {
    quadrature_user(&user.link(), link, qos, approx_dispersion, policy)
}
