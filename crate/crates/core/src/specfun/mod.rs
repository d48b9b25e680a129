//! Special functions used by the effective-capacity closed forms.
//!
//! Everything here is a pure function of its arguments. Only the real
//! branches needed downstream are supported: the Tricomi function for
//! `a > 0, z > 0` and the exponential integral on the negative axis.

pub mod quad;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quad::{integrate, integrate_semi_infinite, integrate_two_scale, Quadrature};

/// Euler-Mascheroni constant.
#[allow(clippy::excessive_precision)]
const EULER_GAMMA: f64 = 0.577215664901532860606512090082402431;

/// Tolerances for the adaptive routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyPolicy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl AccuracyPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(Error::config(format!(
                "accuracy policy needs rel_tol > 0, abs_tol > 0, max_subdivisions >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_q(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gaussian_q", format!("argument must be finite, got {x}")));
    }
    Ok(0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2))
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Acklam's rational approximation to the standard normal quantile
/// (relative error about 1e-9).
#[allow(clippy::excessive_precision)]
fn acklam_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - P_LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Inverse of [`gaussian_q`]: the `x` with `Q(x) = eps`.
///
/// Starts from a rational approximation and polishes with Newton steps,
/// falling back to bisection whenever a step leaves the current bracket.
pub fn inv_gaussian_q(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("inv_gaussian_q", format!("probability must lie in (0, 1), got {eps}")));
    }
    if eps == 0.5 {
        return Ok(0.0);
    }
    // Solve in the upper tail, where Q is representable without cancellation.
    let (target, sign) = if eps < 0.5 { (eps, 1.0) } else { (1.0 - eps, -1.0) };

    let mut x = -acklam_quantile(target);
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    for _ in 0..100 {
        let q = 0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2);
        let diff = q - target;
        if diff > 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let pdf = std_normal_pdf(x);
        let mut next = x + diff / pdf;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(sign * x);
        }
    }
    Err(Error::Convergence {
        routine: "inv_gaussian_q",
        best_estimate: sign * x,
        error_estimate: hi - lo,
        iterations: 100,
    })
}

/// Confluent hypergeometric function of the second kind,
/// `U(a, b, z) = (1/Γ(a)) ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`,
/// evaluated by adaptive quadrature of that integral.
pub fn tricomi_u(a: f64, b: f64, z: f64, policy: &AccuracyPolicy) -> Result<f64> {
    tricomi_u_quadrature(a, b, z, policy).map(|q| q.value)
}

/// As [`tricomi_u`], returning the quadrature diagnostics as well.
pub fn tricomi_u_quadrature(a: f64, b: f64, z: f64, policy: &AccuracyPolicy) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("tricomi_u", "arguments must be finite"));
    }
    if a <= 0.0 {
        return Err(Error::domain("tricomi_u", format!("requires a > 0, got {a}")));
    }
    if z <= 0.0 {
        return Err(Error::domain("tricomi_u", format!("requires z > 0, got {z}")));
    }
    policy.validate()?;

    let tail_power = b - a - 1.0;
    // Length scale of the integrand: exponential decay plus the (1+t)^p
    // decay near the origin, stretched by the t^{a-1} factor.
    let inner = a.max(1.0) / (z + (-tail_power).max(0.0));
    let outer = a.max(1.0) / z;
    let integrand = |t: f64| {
        let e = (-z * t).exp();
        if e == 0.0 {
            return 0.0;
        }
        let mut v = e * (1.0 + t).powf(tail_power);
        if a != 1.0 {
            v *= t.powf(a - 1.0);
        }
        v
    };
    let mut q = integrate_two_scale(integrand, inner, outer, policy).map_err(|e| match e {
        Error::Convergence {
            best_estimate,
            error_estimate,
            iterations,
            ..
        } => Error::Convergence {
            routine: "tricomi_u",
            best_estimate: best_estimate / gamma_fn(a),
            error_estimate,
            iterations,
        },
        other => other,
    })?;
    if a != 1.0 {
        let g = gamma_fn(a);
        q.value /= g;
        q.abs_error /= g;
    }
    Ok(q)
}

fn gamma_fn(a: f64) -> f64 {
    if a == 1.0 || a == 2.0 {
        1.0
    } else {
        libm::tgamma(a)
    }
}

/// `e^{x} E₁(x)` for `x > 0`, without overflow for large `x`.
pub(crate) fn scaled_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        e1_series(x) * x.exp()
    } else {
        scaled_en_continued_fraction(1, x)
    }
}

/// Power series `E₁(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)`, for `0 < x ≤ 1`.
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let contrib = term / k as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// `e^{x} E_n(x)` by the modified Lentz continued fraction. Valid for `x > 0`
/// and converges fastest for `x ≥ 1`.
pub(crate) fn scaled_en_continued_fraction(n: usize, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let nf = n as f64;
    let mut b = x + nf;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let fi = i as f64;
        let an = -fi * (nf - 1.0 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Exponential integral `Ei(x) = -∫_{-x}^∞ e^{-t}/t dt` for `x < 0`.
///
/// Uses the power series for `|x| ≤ 1` and a continued fraction beyond.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("exp_integral_ei", "argument must be finite"));
    }
    if x >= 0.0 {
        return Err(Error::domain(
            "exp_integral_ei",
            format!("only negative arguments are supported, got {x}"),
        ));
    }
    let y = -x;
    let e1 = if y <= 1.0 {
        e1_series(y)
    } else {
        scaled_en_continued_fraction(1, y) * (-y).exp()
    };
    Ok(-e1)
}

/// Generalized binomial coefficient `C(alpha, k) = Π_{j<k} (alpha - j)/(j + 1)`.
pub fn gen_binomial(alpha: f64, k: u32) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::domain("gen_binomial", "alpha must be finite"));
    }
    let mut c = 1.0;
    for j in 0..k {
        c *= (alpha - j as f64) / (j as f64 + 1.0);
    }
    Ok(c)
}

/// Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= 0.0 {
        return Err(Error::domain("beta_fn", format!("requires a, b > 0, got ({a}, {b})")));
    }
    let is_small_int = |v: f64| v.fract() == 0.0 && v <= 170.0;
    if is_small_int(a) && is_small_int(b) {
        // (a-1)!(b-1)!/(a+b-1)! as a running product; exact for small integers.
        let (lo, hi) = if a <= b { (a as u32, b as u32) } else { (b as u32, a as u32) };
        let mut v = 1.0;
        for j in 1..lo {
            v *= j as f64 / (hi + j - 1) as f64;
        }
        return Ok(v / (hi + lo - 1) as f64);
    }
    Ok((libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp())
}
