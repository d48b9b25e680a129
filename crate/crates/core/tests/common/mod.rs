//! Independent reference implementations for the integration tests.
//!
//! Double-exponential quadrature (tanh-sinh on finite intervals, exp-sinh on
//! half lines) with step halving until two levels agree. Shares no code with
//! the library.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// `∫_a^b f` by tanh-sinh.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let d = 0.5 * (b - a);
    let eval = |h: f64, odd_only: bool| {
        let mut s = 0.0;
        let n = (6.5 / h) as i64;
        for k in -n..=n {
            if odd_only && k % 2 == 0 {
                continue;
            }
            let x = k as f64 * h;
            let u = FRAC_PI_2 * x.sinh();
            let w = FRAC_PI_2 * x.cosh() / u.cosh().powi(2);
            // distance to the nearer endpoint, kept accurate near ±1
            let positive = u >= 0.0;
            let gap = 1.0 / (u.abs().exp() * u.abs().cosh());
            let y = if positive { b - d * gap } else { a + d * gap };
            if w == 0.0 || !(y > a && y < b) {
                continue;
            }
            let v = f(y);
            if v.is_finite() {
                s += w * v;
            }
        }
        s
    };
    let mut h = 0.5;
    let mut sum = eval(h, false);
    let mut prev = sum * h * d;
    for _ in 0..9 {
        h *= 0.5;
        sum += eval(h, true);
        let cur = sum * h * d;
        if (cur - prev).abs() <= 1e-15 * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `∫_0^∞ f` by exp-sinh: `t = exp(π/2 sinh x)`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F) -> f64 {
    let eval = |h: f64, odd_only: bool| {
        let mut s = 0.0;
        let n = (7.0 / h) as i64;
        for k in -n..=n {
            if odd_only && k % 2 == 0 {
                continue;
            }
            let x = k as f64 * h;
            let t = (FRAC_PI_2 * x.sinh()).exp();
            if t == 0.0 || !t.is_finite() {
                continue;
            }
            let v = f(t);
            if v == 0.0 || !v.is_finite() {
                continue;
            }
            s += FRAC_PI_2 * x.cosh() * t * v;
        }
        s
    };
    let mut h = 0.5;
    let mut sum = eval(h, false);
    let mut prev = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        sum += eval(h, true);
        let cur = sum * h;
        if (cur - prev).abs() <= 1e-15 * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Q(x) = ∫_x^∞ φ`, by quadrature of the tail for `x ≥ 0`.
pub fn q_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_oracle(-x);
    }
    exp_sinh(|s| normal_pdf(x + s))
}

/// `Q⁻¹(ε)` by bisection on [`q_oracle`].
pub fn inv_q_oracle(eps: f64) -> f64 {
    let (mut lo, mut hi): (f64, f64) = (-10.0, 40.0);
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if q_oracle(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `Ei(-y) = -∫_1^∞ e^{-yt}/t dt`, `y > 0`.
pub fn ei_neg_oracle(y: f64) -> f64 {
    -exp_sinh(|s| (-y * (1.0 + s)).exp() / (1.0 + s))
}

/// `U(a, b, z)` for `a ∈ {0.5, 1, 2}` from its integral.
pub fn tricomi_oracle(a: f64, b: f64, z: f64) -> f64 {
    let gamma_a = match a {
        1.0 | 2.0 => 1.0,
        0.5 => PI.sqrt(),
        _ => panic!("oracle only knows Γ at 0.5, 1, 2"),
    };
    exp_sinh(|t| (-z * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(b - a - 1.0)) / gamma_a
}

/// `∫_0^1 t^{a-1} (1-t)^{b-1} dt`.
pub fn beta_oracle(a: f64, b: f64) -> f64 {
    tanh_sinh(|t| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0), 0.0, 1.0)
}

/// `E[g(γ)]` for the `k`-th largest of `big_k` exponential gains of mean
/// `rho`, written out from the order-statistic density.
pub fn order_stat_expectation<G: Fn(f64) -> f64>(g: G, k: usize, big_k: usize, rho: f64) -> f64 {
    let mut xi = 1.0;
    // K! / ((k-1)! (K-k)!)
    for j in 1..=big_k {
        xi *= j as f64;
    }
    for j in 1..k {
        xi /= j as f64;
    }
    for j in 1..=(big_k - k) {
        xi /= j as f64;
    }
    exp_sinh(|gm| {
        let x = gm / rho;
        let s = (-x).exp();
        let f = -(-x).exp_m1();
        g(gm) * xi / rho * s.powi(k as i32) * f.powi((big_k - k) as i32)
    })
}
