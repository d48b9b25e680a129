//! Run settings, layered as flags over a config file over the environment
//! over built-in defaults.
//!
//! The config file is flat TOML. Keys are the CSV column names where one
//! exists (`user`, `method`, `rho_db`, ...) and the flag names with `_`
//! otherwise, so each flag has exactly one file equivalent.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::Deserialize;

pub const SEED_ENV: &str = "NOMAEC_SEED";

#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// `noma` or `oma`; combines with `--user strong|weak|total|multi`
    #[arg(long)]
    pub scheme: Option<String>,
    /// User(s), comma separated: noma-strong, noma-weak, oma-strong,
    /// oma-weak, noma-total, oma-total, multi-noma, multi-oma
    #[arg(long)]
    pub user: Option<String>,
    /// Method(s), comma separated: closed-form, quadrature, monte-carlo
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho_db: Option<f64>,
    /// Delay exponent θ
    #[arg(long)]
    pub theta: Option<f64>,
    /// Decoding error probability
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub blocklength: Option<u64>,
    /// Strong-user power coefficient (alpha2 = 1 - alpha1)
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// NOMA pairs of the multi-user rows (served users = 2 × pairs)
    #[arg(long)]
    pub num_pairs: Option<usize>,
    /// Users the served ones are drawn from, for the multi-user rows
    #[arg(long)]
    pub total_users: Option<usize>,
    /// strongest-weakest, adjacent or random
    #[arg(long)]
    pub pairing: Option<String>,
    /// Master seed of the Monte-Carlo streams [env: NOMAEC_SEED]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo samples per cell
    #[arg(long)]
    pub samples: Option<u64>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// fig1 .. fig5
    #[arg(long)]
    pub preset: Option<String>,
    /// Swept axis: rho_db, theta, alpha1, blocklength, epsilon
    #[arg(long)]
    pub axis: Option<String>,
    /// Values of the swept axis, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
    /// Second axis; each of its values repeats the sweep
    #[arg(long)]
    pub series_axis: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub series: Option<Vec<f64>>,
    /// Also write a matplotlib script that plots the CSV
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub emit_plot: Option<bool>,
    /// Replace negative rates by zero
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub clamp_rate: Option<bool>,
    /// Quadrature rows use unit channel dispersion
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub unit_dispersion: Option<bool>,
    /// default or strict
    #[arg(long)]
    pub tolerance_profile: Option<String>,
    /// Progress and timing on stderr
    #[arg(long, short, num_args = 0..=1, default_missing_value = "true")]
    pub verbose: Option<bool>,
}

macro_rules! layered {
    ($($field:ident),* $(,)?) => {
        impl Settings {
            /// Field-wise `self` where set, else `lower`.
            pub fn over(self, lower: Settings) -> Settings {
                Settings {
                    $($field: self.$field.or(lower.$field),)*
                }
            }

            /// Names of the fields that are set.
            pub fn set_keys(&self) -> Vec<&'static str> {
                let mut keys = Vec::new();
                $(if self.$field.is_some() {
                    keys.push(stringify!($field));
                })*
                keys
            }
        }
    };
}

layered!(
    scheme,
    user,
    method,
    rho_db,
    theta,
    epsilon,
    blocklength,
    alpha1,
    alpha2,
    num_pairs,
    total_users,
    pairing,
    seed,
    samples,
    out,
    preset,
    axis,
    grid,
    series_axis,
    series,
    emit_plot,
    clamp_rate,
    unit_dispersion,
    tolerance_profile,
    verbose,
);

impl Settings {
    pub fn verbose(&self) -> bool {
        self.verbose.unwrap_or(false)
    }
}

pub fn parse_file(text: &str, path: &Path) -> anyhow::Result<Settings> {
    // toml's messages already carry "at line N, column M"
    toml::from_str(text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn load_file(path: &Path) -> anyhow::Result<Settings> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    parse_file(&text, path)
}

pub fn from_env() -> anyhow::Result<Settings> {
    match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse() {
            Ok(seed) => Ok(Settings {
                seed: Some(seed),
                ..Default::default()
            }),
            Err(_) => bail!("{SEED_ENV} must be an unsigned integer, got '{v}'"),
        },
        Err(_) => Ok(Settings::default()),
    }
}
