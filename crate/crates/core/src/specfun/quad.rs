//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate falls below `max(abs_tol, rel_tol * |I|)`. Semi-infinite
//! integrals are mapped onto `[0, 1)` with `t = scale * u / (1 - u)`; the
//! Kronrod nodes never touch the endpoints, so the integrand is never
//! evaluated at `u = 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::AccuracyPolicy;
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Outcome of a successful adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: u64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, policy: &AccuracyPolicy) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", "interval endpoints must be finite"));
    }
    let (value, error) = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut total = value;
    let mut total_err = error;
    let mut heap = BinaryHeap::new();
    // Error carried by panels too narrow to split further.
    let mut frozen_err = 0.0;
    heap.push(Panel { a, b, value, error });

    let target = |total: f64| policy.abs_tol.max(policy.rel_tol * total.abs());

    let budget_error = |total: f64, total_err: f64, intervals: usize| Error::Convergence {
        routine: "adaptive Gauss-Kronrod quadrature",
        best_estimate: total,
        error_estimate: total_err,
        iterations: intervals,
    };

    while total_err > target(total) {
        if heap.len() >= policy.max_subdivisions {
            return Err(budget_error(total, total_err, heap.len()));
        }
        let Some(worst) = heap.pop() else { break };
        if worst.error == 0.0 {
            // Only frozen panels remain.
            heap.push(worst);
            return Err(budget_error(total, total_err, heap.len()));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a).abs() < 1e3 * f64::EPSILON * mid.abs() {
            frozen_err += worst.error;
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Re-sum from the panels to shed the drift of the running updates.
    let intervals = heap.len();
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let abs_error: f64 = panels.iter().map(|p| p.error).sum::<f64>() + frozen_err;

    if !value.is_finite() {
        return Err(Error::domain("integrate", "integrand produced a non-finite value"));
    }
    Ok(Quadrature {
        value,
        abs_error,
        evaluations,
        intervals,
    })
}

/// Integrates `f` over `[0, inf)` using `t = scale * u / (1 - u)`.
///
/// `scale` should be the length over which `f` varies near the origin.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    scale: f64,
    policy: &AccuracyPolicy,
) -> Result<Quadrature> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::domain("integrate_semi_infinite", "scale must be positive and finite"));
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let t = scale * u / one_minus;
        let y = f(t);
        if y == 0.0 {
            0.0
        } else {
            y * scale / (one_minus * one_minus)
        }
    };
    integrate(mapped, 0.0, 1.0, policy)
}

/// `∫₀^∞ f` for an integrand with structure on two length scales: an inner
/// one near the origin and an outer one beyond which it decays like
/// `e^{-t/outer}`. `[0, 50·outer]` is cut at breakpoints growing by 4 from
/// `inner`, and the rest is mapped onto a finite interval.
pub fn integrate_two_scale<F: Fn(f64) -> f64>(
    f: F,
    inner: f64,
    outer: f64,
    policy: &AccuracyPolicy,
) -> Result<Quadrature> {
    if !(inner > 0.0 && outer > 0.0 && inner.is_finite() && outer.is_finite()) {
        return Err(Error::domain("integrate_two_scale", "scales must be positive and finite"));
    }
    let hi = 50.0 * outer;
    let mut out = Quadrature {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
        intervals: 0,
    };
    let add = |r: Result<Quadrature>, out: &mut Quadrature| -> Result<()> {
        match r {
            Ok(q) => {
                out.value += q.value;
                out.abs_error += q.abs_error;
                out.evaluations += q.evaluations;
                out.intervals += q.intervals;
                Ok(())
            }
            Err(Error::Convergence {
                routine,
                best_estimate,
                error_estimate,
                iterations,
            }) => Err(Error::Convergence {
                routine,
                best_estimate: out.value + best_estimate,
                error_estimate: out.abs_error + error_estimate,
                iterations,
            }),
            Err(e) => Err(e),
        }
    };
    let mut a = 0.0;
    let mut b = inner.min(hi);
    while a < hi {
        let top = b.min(hi);
        add(integrate(&f, a, top, policy), &mut out)?;
        a = top;
        b = top * 4.0;
    }
    add(integrate_semi_infinite(|t| f(hi + t), outer, policy), &mut out)?;
    Ok(out)
}
