//! Closed-form EC under the unit-dispersion rate.
//!
//! With `√V ≈ 1` the kernel becomes `(1+x)^β e^{sψ}` with `β = 2Υs` for a
//! user holding share `s`. Expanding the order-statistic density of rank `k`
//! among `K` gains as a sum of exponentials gives, for users whose SNR is
//! linear in the gain (`x = aγ`),
//!
//! `E[(1+x)^β] = ξ/(aρ) Σ_m C(K-k, m) (-1)^m U(1, β+2, (k+m)/(aρ))`.
//!
//! For the NOMA weak user, `1 + x = (1+γ)/(1+α₁γ)`, and the binomial
//! expansion in `(α₁-1)/(α₁γ+1)` turns each exponential into
//!
//! `α₁^{-β} W(z)`, `W(z) = 1/z + Σ_{k≥1} C(β,k) (α₁-1)^k J̃_k(z/α₁) / α₁`,
//!
//! where `J̃_k(w) = ∫₀^∞ e^{-wu} (1+u)^{-k} du = e^w E_k(w)`. The `k = 1`
//! term is the `-e^w Ei(-w)` term; for `k ≥ 2` every term is positive.

use serde::{Deserialize, Serialize};

use super::{check_inputs, ec_from_kernel_mean, EcEstimate, Method, QosConfig, QosDerived, UserLink};
use crate::channel::LinkConfig;
use crate::error::{Error, Result};
use crate::rates::Service;
use crate::specfun::{scaled_e1, scaled_en_continued_fraction, tricomi_u_quadrature, AccuracyPolicy};

/// Truncation of the weak-user series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    pub tail_rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tail_rel_tol: 1e-10,
            max_terms: 500,
        }
    }
}

impl SeriesOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_rel_tol > 0.0 && self.tail_rel_tol < 1.0) || self.max_terms < 2 {
            return Err(Error::config(format!(
                "series options need 0 < tail_rel_tol < 1 and max_terms >= 2, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Exponential rate of the two-user OMA weak-user term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakOmaArgument {
    /// `2/ρ`, which is what the weaker-of-two density `(2/ρ)e^{-2γ/ρ}` gives.
    #[default]
    OrderedDensity,
    /// `1/ρ` with the `2/ρ` prefactor kept, as the formula is printed.
    AsPrinted,
}

/// Constant in front of the `k = 1` weak-user term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K1Coefficient {
    /// `β(α₁-1)/α₁`, i.e. `nθ(1-α₁)/(α₁ ln 2)` for the full slot.
    #[default]
    Derived,
    /// The same constant with one more factor `1/α₁`.
    ExtraInverseAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedFormOptions {
    pub policy: AccuracyPolicy,
    pub series: SeriesOptions,
    pub weak_oma_argument: WeakOmaArgument,
    pub k1_coefficient: K1Coefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmaUser {
    Strong,
    Weak,
}

/// `J̃_1(w), ..., J̃_{len}(w)`.
///
/// Starts from a continued fraction at `k₀ ≈ w` and runs the three-term
/// relation away from it in the stable direction: downward below `k₀`,
/// upward above.
pub fn scaled_en_table(w: f64, len: usize) -> Result<Vec<f64>> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::domain("scaled_en_table", format!("requires w > 0, got {w}")));
    }
    let mut j = vec![0.0; len.max(1)];
    let k0 = (w.ceil() as usize).clamp(1, j.len());
    j[k0 - 1] = if k0 == 1 {
        scaled_e1(w)
    } else {
        scaled_en_continued_fraction(k0, w)
    };
    for k in (1..k0).rev() {
        // k J̃_{k+1} = 1 - w J̃_k
        j[k - 1] = (1.0 - k as f64 * j[k]) / w;
    }
    for k in k0..j.len() {
        j[k] = (1.0 - w * j[k - 1]) / k as f64;
    }
    j.truncate(len);
    Ok(j)
}

/// The weak-user series at one exponential rate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSeries {
    /// `α₁^{-β} W(z)`.
    pub value: f64,
    /// `k ≥ 2` terms, each already multiplied by `α₁^{-β}`.
    pub terms: Vec<f64>,
}

/// `α₁^{-β} W(z)` for `β < 0`, `0 < α₁ < 1`, `z > 0`.
///
/// Terms are built in log space so that `α₁^{-β}` (tiny) and the bulk of the
/// series (huge) never meet as separate floats.
pub fn weak_noma_series(
    beta: f64,
    alpha1: f64,
    z: f64,
    series: &SeriesOptions,
    k1: K1Coefficient,
) -> Result<WeakSeries> {
    series.validate()?;
    if !(beta < 0.0 && beta.is_finite()) {
        return Err(Error::domain("weak_noma_series", format!("requires beta < 0, got {beta}")));
    }
    if !(alpha1 > 0.0 && alpha1 < 1.0) {
        return Err(Error::domain("weak_noma_series", format!("requires 0 < alpha1 < 1, got {alpha1}")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain("weak_noma_series", format!("requires z > 0, got {z}")));
    }
    let w = z / alpha1;
    let jt = scaled_en_table(w, series.max_terms + 1)?;
    let ln_a = alpha1.ln();
    let ln_pref = -beta * ln_a;
    let ln_one_minus = (1.0 - alpha1).ln();

    let k1_const = match k1 {
        K1Coefficient::Derived => beta * (alpha1 - 1.0) / alpha1,
        K1Coefficient::ExtraInverseAlpha => beta * (alpha1 - 1.0) / (alpha1 * alpha1),
    };
    let mut sum = ln_pref.exp() * (1.0 / z + k1_const * jt[0]);

    // ln |C(β,k)| (1-α₁)^k / α₁, starting from k = 1
    let mut ln_coef = (-beta).ln() + ln_one_minus - ln_a;
    let mut terms = Vec::new();
    let mut prev = f64::INFINITY;
    for k in 2..=series.max_terms {
        let kf = k as f64;
        ln_coef += ((kf - 1.0 - beta) / kf).ln() + ln_one_minus;
        let term = (ln_pref + ln_coef + jt[k - 1].ln()).exp();
        sum += term;
        terms.push(term);
        if term < series.tail_rel_tol * sum.abs() && term <= prev {
            return Ok(WeakSeries { value: sum, terms });
        }
        prev = term;
    }
    Err(Error::Convergence {
        routine: "weak_noma_series",
        best_estimate: sum,
        error_estimate: prev,
        iterations: series.max_terms,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |c, j| c * (n - j) as f64 / (j + 1) as f64)
}

/// EC of any user by the closed forms.
pub fn closed_form_user(
    user: &UserLink,
    link: &LinkConfig,
    qos: &QosConfig,
    opts: &ClosedFormOptions,
) -> Result<EcEstimate> {
    if check_inputs(user, link, qos)? {
        return Ok(EcEstimate::exact_zero(Method::ClosedForm));
    }
    let derived = QosDerived::new(qos, link)?;
    closed_form_with(user, link, qos, &derived, opts)
}

/// As [`closed_form_user`] with `Υ` and `ψ` supplied by the caller.
pub fn closed_form_with(
    user: &UserLink,
    link: &LinkConfig,
    qos: &QosConfig,
    derived: &QosDerived,
    opts: &ClosedFormOptions,
) -> Result<EcEstimate> {
    if check_inputs(user, link, qos)? {
        return Ok(EcEstimate::exact_zero(Method::ClosedForm));
    }
    if link.clamp_rate {
        return Err(Error::config(
            "the closed forms assume the unclamped rate; use quadrature or monte_carlo with clamp_rate",
        ));
    }
    let spec = user.order_stat()?;
    let (k, big_k) = (spec.index, spec.population);
    let s = user.share;
    let beta = 2.0 * derived.upsilon * s;
    let rho = link.rho;
    let mut nodes = 0u64;

    let expectation = match user.service {
        Service::NomaStrong | Service::Oma => {
            let a = if user.service == Service::NomaStrong { link.alpha1 } else { 1.0 };
            let as_printed = user.service == Service::Oma
                && k == 2
                && big_k == 2
                && opts.weak_oma_argument == WeakOmaArgument::AsPrinted;
            let mut acc = 0.0;
            for m in 0..=big_k - k {
                let rate = if as_printed { 1.0 } else { (k + m) as f64 };
                let q = tricomi_u_quadrature(1.0, beta + 2.0, rate / (a * rho), &opts.policy)?;
                nodes += q.evaluations;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binomial(big_k - k, m) * q.value;
            }
            spec.xi / (a * rho) * acc
        }
        Service::NomaWeak => {
            let mut acc = 0.0;
            let mut best = 0.0;
            for m in 0..=big_k - k {
                let z = (k + m) as f64 / rho;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * binomial(big_k - k, m);
                match weak_noma_series(beta, link.alpha1, z, &opts.series, opts.k1_coefficient) {
                    Ok(ws) => {
                        nodes += ws.terms.len() as u64 + 2;
                        acc += c * ws.value;
                        best += c * ws.value;
                    }
                    Err(Error::Convergence {
                        best_estimate,
                        error_estimate,
                        iterations,
                        ..
                    }) => {
                        best += c * best_estimate;
                        let partial = spec.xi / rho * best;
                        let kernel = link.epsilon + (1.0 - link.epsilon) * (s * derived.psi).exp() * partial;
                        let ec = -kernel.ln() / (qos.theta * link.blocklength as f64);
                        return Err(Error::Convergence {
                            routine: "ec_closed_noma_weak",
                            best_estimate: ec,
                            error_estimate,
                            iterations,
                        });
                    }
                    Err(e) => return Err(e),
                }
            }
            spec.xi / rho * acc
        }
    };

    let kernel = link.epsilon + (1.0 - link.epsilon) * (s * derived.psi).exp() * expectation;
    Ok(EcEstimate {
        value: ec_from_kernel_mean(kernel, qos.theta, link.blocklength)?,
        method: Method::ClosedForm,
        std_error: 0.0,
        samples_or_nodes: nodes,
    })
}

/// Two-user NOMA strong user.
pub fn ec_closed_noma_strong(link: &LinkConfig, qos: &QosConfig) -> Result<EcEstimate> {
    closed_form_user(&super::UserRole::NomaStrong.link(), link, qos, &ClosedFormOptions::default())
}

/// Two-user NOMA weak user.
pub fn ec_closed_noma_weak(link: &LinkConfig, qos: &QosConfig, series: SeriesOptions) -> Result<EcEstimate> {
    let opts = ClosedFormOptions {
        series,
        ..Default::default()
    };
    closed_form_user(&super::UserRole::NomaWeak.link(), link, qos, &opts)
}

/// Two-user OMA user.
pub fn ec_closed_oma(user: OmaUser, link: &LinkConfig, qos: &QosConfig, argument: WeakOmaArgument) -> Result<EcEstimate> {
    let role = match user {
        OmaUser::Strong => super::UserRole::OmaStrong,
        OmaUser::Weak => super::UserRole::OmaWeak,
    };
    let opts = ClosedFormOptions {
        weak_oma_argument: argument,
        ..Default::default()
    };
    closed_form_user(&role.link(), link, qos, &opts)
}
