//! Cross-method checks: closed form against unit-dispersion quadrature, and
//! simulation against exact-dispersion quadrature.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::LinkConfig;
use crate::effcap::{
    closed_form_with, ec_monte_carlo, ec_quadrature, ClosedFormOptions, K1Coefficient, McConfig, QosConfig,
    QosDerived, UserRole, WeakOmaArgument,
};
use crate::error::{Error, Result};
use crate::specfun::AccuracyPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    #[default]
    Default,
    Strict,
}

impl ToleranceProfile {
    /// Relative tolerance of the strong-user (and OMA strong) closed forms.
    pub fn strong_rel(self) -> f64 {
        match self {
            ToleranceProfile::Default => 1e-6,
            ToleranceProfile::Strict => 1e-8,
        }
    }

    /// Relative tolerance of the weak-user closed forms.
    pub fn weak_rel(self) -> f64 {
        5e-3
    }

    /// Allowed distance between simulation and quadrature in standard errors.
    pub fn mc_sigmas(self) -> f64 {
        3.0
    }
}

impl FromStr for ToleranceProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(ToleranceProfile::Default),
            "strict" => Ok(ToleranceProfile::Strict),
            _ => Err(Error::config(format!("unknown tolerance profile '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub profile: ToleranceProfile,
    pub rho_db: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Grid of the simulation checks, all at `mc_theta`.
    pub mc_rho_db: Vec<f64>,
    pub mc_theta: f64,
    pub mc: McConfig,
    /// Fault injection: evaluate the closed forms with `-ψ`. A correct
    /// validator must then fail.
    pub flip_psi_sign: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            profile: ToleranceProfile::Default,
            rho_db: (0..=8).map(|i| 5.0 * i as f64).collect(),
            thetas: vec![1e-3, 1e-2, 1e-1],
            mc_rho_db: vec![0.0, 10.0, 20.0, 30.0, 40.0],
            mc_theta: 0.01,
            mc: McConfig::default(),
            flip_psi_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// e.g. `closed_form/noma_strong`.
    pub name: String,
    pub rho_db: f64,
    pub theta: f64,
    pub observed: f64,
    pub reference: f64,
    /// Relative error, or distance in standard errors for simulation checks.
    pub delta: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Informational checks are reported but do not decide the outcome.
    pub informational: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.passed, self.informational) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (true, true) => "info-pass",
            (false, true) => "info-fail",
        };
        write!(
            f,
            "{verdict} {} rho_db={} theta={} observed={:.12e} reference={:.12e} delta={:.3e} tol={:.1e}",
            self.name, self.rho_db, self.theta, self.observed, self.reference, self.delta, self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }

    /// Fraction of the informational checks named `name` that passed.
    pub fn variant_pass_rate(&self, name: &str) -> Option<f64> {
        let v: Vec<&Check> = self.checks.iter().filter(|c| c.name == name).collect();
        if v.is_empty() {
            return None;
        }
        Some(v.iter().filter(|c| c.passed).count() as f64 / v.len() as f64)
    }
}

/// Tighter than the default so that the oracle error stays well below the
/// strict tolerance.
pub fn oracle_policy() -> AccuracyPolicy {
    AccuracyPolicy {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_subdivisions: 4000,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Closed form of `role` with the given options, honouring the fault hook.
fn closed(role: UserRole, link: &LinkConfig, qos: &QosConfig, opts: &ClosedFormOptions, flip: bool) -> Result<f64> {
    let mut derived = QosDerived::new(qos, link)?;
    if flip {
        derived.psi = -derived.psi;
    }
    Ok(closed_form_with(&role.link(), link, qos, &derived, opts)?.value)
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let policy = oracle_policy();
    let cf = ClosedFormOptions {
        policy,
        ..Default::default()
    };
    let variants = [
        (
            "closed_form/noma_weak/k1_extra_inverse_alpha",
            UserRole::NomaWeak,
            ClosedFormOptions {
                k1_coefficient: K1Coefficient::ExtraInverseAlpha,
                ..cf
            },
        ),
        (
            "closed_form/oma_weak/argument_as_printed",
            UserRole::OmaWeak,
            ClosedFormOptions {
                weak_oma_argument: WeakOmaArgument::AsPrinted,
                ..cf
            },
        ),
    ];

    for &rho_db in &opts.rho_db {
        let link = LinkConfig::with_snr_db(rho_db);
        for &theta in &opts.thetas {
            let qos = QosConfig::new(theta)?;
            for role in UserRole::ALL {
                let reference = ec_quadrature(role, &link, &qos, true, &policy)?.value;
                let observed = closed(role, &link, &qos, &cf, opts.flip_psi_sign)?;
                let tolerance = if role.is_strong() {
                    opts.profile.strong_rel()
                } else {
                    opts.profile.weak_rel()
                };
                let delta = rel(observed, reference);
                report.checks.push(Check {
                    name: format!("closed_form/{}", role.as_str()),
                    rho_db,
                    theta,
                    observed,
                    reference,
                    delta,
                    tolerance,
                    passed: delta <= tolerance,
                    informational: false,
                });
                for (name, vrole, vopts) in &variants {
                    if *vrole == role {
                        let observed = closed(role, &link, &qos, vopts, opts.flip_psi_sign)?;
                        let delta = rel(observed, reference);
                        report.checks.push(Check {
                            name: name.to_string(),
                            rho_db,
                            theta,
                            observed,
                            reference,
                            delta,
                            tolerance,
                            passed: delta <= tolerance,
                            informational: true,
                        });
                    }
                }
            }
        }
    }

    let qos = QosConfig::new(opts.mc_theta)?;
    for &rho_db in &opts.mc_rho_db {
        let link = LinkConfig::with_snr_db(rho_db);
        for role in UserRole::ALL {
            let reference = ec_quadrature(role, &link, &qos, false, &policy)?.value;
            let mc = ec_monte_carlo(role, &link, &qos, &opts.mc)?;
            let delta = (mc.value - reference).abs() / mc.std_error;
            let tolerance = opts.profile.mc_sigmas();
            report.checks.push(Check {
                name: format!("monte_carlo/{}", role.as_str()),
                rho_db,
                theta: opts.mc_theta,
                observed: mc.value,
                reference,
                delta,
                tolerance,
                passed: delta <= tolerance,
                informational: false,
            });
        }
    }
    Ok(report)
}
