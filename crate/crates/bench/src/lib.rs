//! Fixed workloads shared by the benchmarks.

use nomaec_core::{LinkConfig, QosConfig};

/// The operating points the benchmarks sweep: `(ρ in dB, θ)`.
pub const POINTS: [(f64, f64); 4] = [(0.0, 0.01), (20.0, 0.001), (20.0, 0.01), (40.0, 0.1)];

pub fn point(rho_db: f64, theta: f64) -> (LinkConfig, QosConfig) {
    (LinkConfig::with_snr_db(rho_db), QosConfig { theta })
}

pub fn label(rho_db: f64, theta: f64) -> String {
    format!("{rho_db}dB_theta{theta}")
}
