//! Parameter sweeps over one axis, with optional series, and CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{task_rng, LinkConfig};
use crate::effcap::{
    ec_user, multiuser_pair_ecs, ClosedFormOptions, EcEstimate, EcMethod, McConfig, Method, MultiUserConfig,
    Pairing, QosConfig, Scheme, UserRole,
};
use crate::error::{Error, Result};
use crate::specfun::AccuracyPolicy;

pub const CSV_HEADER: [&str; 13] = [
    "scheme",
    "user",
    "method",
    "rho_db",
    "theta",
    "epsilon",
    "blocklength",
    "alpha1",
    "alpha2",
    "num_pairs",
    "ec",
    "std_err",
    "diag",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    RhoDb,
    Theta,
    /// Value is `α₁`; `α₂ = 1 - α₁`.
    AlphaPair,
    Blocklength,
    Epsilon,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::RhoDb => "rho_db",
            Axis::Theta => "theta",
            Axis::AlphaPair => "alpha_pair",
            Axis::Blocklength => "blocklength",
            Axis::Epsilon => "epsilon",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "rho_db" => Ok(Axis::RhoDb),
            "theta" => Ok(Axis::Theta),
            "alpha_pair" | "alpha1" => Ok(Axis::AlphaPair),
            "blocklength" => Ok(Axis::Blocklength),
            "epsilon" => Ok(Axis::Epsilon),
            _ => Err(Error::config(format!("unknown axis '{s}'"))),
        }
    }
}

/// What one row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserSel {
    Role(UserRole),
    NomaTotal,
    OmaTotal,
    MultiNoma,
    MultiOma,
}

impl UserSel {
    pub const ROLES: [UserSel; 4] = [
        UserSel::Role(UserRole::NomaStrong),
        UserSel::Role(UserRole::NomaWeak),
        UserSel::Role(UserRole::OmaStrong),
        UserSel::Role(UserRole::OmaWeak),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UserSel::Role(r) => r.as_str(),
            UserSel::NomaTotal => "noma_total",
            UserSel::OmaTotal => "oma_total",
            UserSel::MultiNoma => "multi_noma",
            UserSel::MultiOma => "multi_oma",
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            UserSel::Role(r) => r.scheme(),
            UserSel::NomaTotal | UserSel::MultiNoma => Scheme::Noma,
            UserSel::OmaTotal | UserSel::MultiOma => Scheme::Oma,
        }
    }

    fn is_multi(self) -> bool {
        matches!(self, UserSel::MultiNoma | UserSel::MultiOma)
    }
}

impl fmt::Display for UserSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UserSel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "noma_total" => Ok(UserSel::NomaTotal),
            "oma_total" => Ok(UserSel::OmaTotal),
            "multi_noma" => Ok(UserSel::MultiNoma),
            "multi_oma" => Ok(UserSel::MultiOma),
            other => other.parse().map(UserSel::Role),
        }
    }
}

/// The fixed operating point; the swept axis overrides one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub rho_db: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub blocklength: u64,
    pub alpha1: f64,
}

impl Default for OperatingPoint {
    fn default() -> Self {
        Self {
            rho_db: 20.0,
            theta: 0.01,
            epsilon: 1e-6,
            blocklength: 400,
            alpha1: 0.3,
        }
    }
}

impl OperatingPoint {
    pub fn alpha2(&self) -> f64 {
        1.0 - self.alpha1
    }

    pub fn with(mut self, axis: Axis, value: f64) -> Result<Self> {
        match axis {
            Axis::RhoDb => self.rho_db = value,
            Axis::Theta => self.theta = value,
            Axis::AlphaPair => self.alpha1 = value,
            Axis::Epsilon => self.epsilon = value,
            Axis::Blocklength => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u64::MAX as f64) {
                    return Err(Error::config(format!("blocklength must be a positive integer, got {value}")));
                }
                self.blocklength = value as u64;
            }
        }
        Ok(self)
    }

    pub fn link(&self, clamp_rate: bool) -> LinkConfig {
        LinkConfig {
            rho: crate::channel::db_to_linear(self.rho_db),
            alpha1: self.alpha1,
            alpha2: self.alpha2(),
            blocklength: self.blocklength,
            epsilon: self.epsilon,
            clamp_rate,
        }
    }

    pub fn qos(&self) -> QosConfig {
        QosConfig { theta: self.theta }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho_db.is_finite() {
            return Err(Error::config(format!("rho_db must be finite, got {}", self.rho_db)));
        }
        self.link(false).validate()?;
        self.qos().validate()
    }
}

/// Shape of the multi-user system used by `multi_*` rows; θ and α come from
/// the operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiUserShape {
    pub total_users: usize,
    pub served_users: usize,
    pub pairing: Pairing,
}

impl Default for MultiUserShape {
    fn default() -> Self {
        Self {
            total_users: 12,
            served_users: 6,
            pairing: Pairing::StrongestWeakest,
        }
    }
}

impl MultiUserShape {
    pub fn config(&self, point: &OperatingPoint) -> MultiUserConfig {
        MultiUserConfig {
            total_users: self.total_users,
            served_users: self.served_users,
            pairing: self.pairing,
            per_pair_alphas: (point.alpha1, point.alpha2()),
            thetas: vec![point.theta],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<f64>,
    /// A second axis whose values each produce a full copy of the sweep.
    pub series: Option<(Axis, Vec<f64>)>,
    pub fixed: OperatingPoint,
    pub methods: Vec<Method>,
    pub users: Vec<UserSel>,
    /// `master_seed` seeds the per-cell generators.
    pub mc: McConfig,
    /// Quadrature rows use the unit-dispersion rate when set.
    pub quadrature_unit_dispersion: bool,
    pub policy: AccuracyPolicy,
    pub closed_form: ClosedFormOptions,
    pub multiuser: MultiUserShape,
    pub clamp_rate: bool,
}

impl SweepSpec {
    pub fn new(axis: Axis, grid: Vec<f64>, fixed: OperatingPoint) -> Self {
        Self {
            axis,
            grid,
            series: None,
            fixed,
            methods: vec![Method::ClosedForm],
            users: UserSel::ROLES.to_vec(),
            mc: McConfig::default(),
            quadrature_unit_dispersion: false,
            policy: AccuracyPolicy::default(),
            closed_form: ClosedFormOptions::default(),
            multiuser: MultiUserShape::default(),
            clamp_rate: false,
        }
    }

    fn series_values(&self) -> Vec<Option<f64>> {
        match &self.series {
            Some((_, v)) => v.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }

    pub fn num_cells(&self) -> usize {
        self.series_values().len() * self.grid.len() * self.users.len() * self.methods.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_grid(self.axis.as_str(), &self.grid)?;
        if let Some((axis, values)) = &self.series {
            if *axis == self.axis {
                return Err(Error::config("series axis must differ from the sweep axis"));
            }
            if values.is_empty() {
                return Err(Error::config("series has no values"));
            }
        }
        if self.methods.is_empty() || self.users.is_empty() {
            return Err(Error::config("a sweep needs at least one method and one user"));
        }
        self.fixed.validate()?;
        if self.users.iter().any(|u| u.is_multi()) {
            self.multiuser.config(&self.fixed).validate()?;
        }
        Ok(())
    }

    /// Operating point, user and method of cell `index`, in row order
    /// (series, then grid, then user, then method).
    pub fn cell(&self, index: usize) -> Result<(OperatingPoint, UserSel, Method)> {
        if index >= self.num_cells() {
            return Err(Error::config(format!("cell {index} out of range ({} cells)", self.num_cells())));
        }
        let m = self.methods.len();
        let u = self.users.len();
        let g = self.grid.len();
        let method = self.methods[index % m];
        let user = self.users[(index / m) % u];
        let x = self.grid[(index / (m * u)) % g];
        let s = self.series_values()[index / (m * u * g)];
        let mut point = self.fixed.with(self.axis, x)?;
        if let (Some((axis, _)), Some(v)) = (&self.series, s) {
            point = point.with(*axis, v)?;
        }
        Ok((point, user, method))
    }

    /// Monte-Carlo seed of cell `index`: a function of the master seed and the
    /// index only.
    pub fn cell_seed(&self, index: usize) -> u64 {
        task_rng(self.mc.master_seed, index as u64).random()
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::config(format!("{name} grid has non-finite values")));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::config(format!("{name} grid must be strictly monotone")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub user: UserSel,
    pub method: Method,
    pub rho_db: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub blocklength: u64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub num_pairs: usize,
    /// NaN when the cell failed; see `diag`.
    pub ec: f64,
    pub std_err: f64,
    pub diag: String,
}

impl ResultRow {
    pub fn record(&self) -> [String; 13] {
        [
            self.scheme.as_str().to_string(),
            self.user.as_str().to_string(),
            self.method.as_str().to_string(),
            format_sig(self.rho_db),
            format_sig(self.theta),
            format_sig(self.epsilon),
            self.blocklength.to_string(),
            format_sig(self.alpha1),
            format_sig(self.alpha2),
            self.num_pairs.to_string(),
            format_sig(self.ec),
            format_sig(self.std_err),
            self.diag.clone(),
        ]
    }
}

/// Evaluates one cell exactly as [`run_sweep`] does.
pub fn run_cell(spec: &SweepSpec, index: usize) -> Result<ResultRow> {
    let (point, user, method) = spec.cell(index)?;
    let link = point.link(spec.clamp_rate);
    let qos = point.qos();
    let ec_method = match method {
        Method::ClosedForm => EcMethod::ClosedForm(ClosedFormOptions {
            policy: spec.policy,
            ..spec.closed_form
        }),
        Method::Quadrature => EcMethod::Quadrature {
            approx_dispersion: spec.quadrature_unit_dispersion,
            policy: spec.policy,
        },
        Method::MonteCarlo => EcMethod::MonteCarlo(McConfig {
            num_samples: spec.mc.num_samples,
            master_seed: spec.cell_seed(index),
        }),
    };
    let num_pairs = match user {
        UserSel::MultiNoma | UserSel::MultiOma => spec.multiuser.served_users / 2,
        _ => 1,
    };
    let mut row = ResultRow {
        scheme: user.scheme(),
        user,
        method,
        rho_db: point.rho_db,
        theta: point.theta,
        epsilon: point.epsilon,
        blocklength: point.blocklength,
        alpha1: point.alpha1,
        alpha2: point.alpha2(),
        num_pairs,
        ec: f64::NAN,
        std_err: f64::NAN,
        diag: String::new(),
    };
    let result = evaluate(user, &link, &qos, &ec_method, spec, &point);
    match result {
        Ok(parts) => {
            row.ec = 0.0;
            row.std_err = 0.0;
            let mut work = 0;
            for (a, b) in &parts {
                row.ec += a.value + b.value;
                // users share random numbers, so errors add linearly at worst
                row.std_err += a.std_error + b.std_error;
                work += a.samples_or_nodes + b.samples_or_nodes;
            }
            row.diag = match method {
                Method::MonteCarlo => format!("samples={work}"),
                Method::Quadrature => format!("evals={work}"),
                Method::ClosedForm => format!("evals={work}"),
            };
        }
        Err(e) => row.diag = e.to_string().replace(['\n', ','], ";"),
    }
    Ok(row)
}

fn evaluate(
    user: UserSel,
    link: &LinkConfig,
    qos: &QosConfig,
    method: &EcMethod,
    spec: &SweepSpec,
    point: &OperatingPoint,
) -> Result<Vec<(EcEstimate, EcEstimate)>> {
    let zero = EcEstimate {
        value: 0.0,
        method: method.kind(),
        std_error: 0.0,
        samples_or_nodes: 0,
    };
    let pair = |a: UserRole, b: UserRole| -> Result<Vec<(EcEstimate, EcEstimate)>> {
        Ok(vec![(ec_user(&a.link(), link, qos, method)?, ec_user(&b.link(), link, qos, method)?)])
    };
    match user {
        UserSel::Role(r) => Ok(vec![(ec_user(&r.link(), link, qos, method)?, zero)]),
        UserSel::NomaTotal => pair(UserRole::NomaStrong, UserRole::NomaWeak),
        UserSel::OmaTotal => pair(UserRole::OmaStrong, UserRole::OmaWeak),
        UserSel::MultiNoma => multiuser_pair_ecs(&spec.multiuser.config(point), link, Scheme::Noma, method),
        UserSel::MultiOma => multiuser_pair_ecs(&spec.multiuser.config(point), link, Scheme::Oma, method),
    }
}

/// Every cell in row order. Cells run in parallel; a failing cell leaves NaN
/// and a message in its row instead of aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    (0..spec.num_cells()).into_par_iter().map(|i| run_cell(spec, i)).collect()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::config(format!("cannot write CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::config(format!("cannot write CSV: {e}")))?;
    Ok(())
}

/// `%.12g`: 12 significant digits, trailing zeros removed, exponent form
/// outside `[1e-4, 1e12)`.
pub fn format_sig(x: f64) -> String {
    const SIG: i32 = 12;
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG).contains(&exp) {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown preset '{s}' (expected fig1..fig5)")))
    }
}

/// `0, 5, ..., 40` dB.
pub fn snr_grid_db() -> Vec<f64> {
    (0..=8).map(|i| 5.0 * i as f64).collect()
}

/// `10^{-4}, 10^{-3.75}, ..., 10^{-1}`.
pub fn theta_grid() -> Vec<f64> {
    (0..=12).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect()
}

pub const FIG5_ALPHA1: [f64; 3] = [0.2, 0.3, 0.4];

pub fn figure_preset(preset: Preset) -> SweepSpec {
    let base = OperatingPoint::default();
    let rho_sweep = |theta: f64| SweepSpec::new(Axis::RhoDb, snr_grid_db(), OperatingPoint { theta, ..base });
    match preset {
        Preset::Fig1 => SweepSpec {
            methods: vec![Method::ClosedForm, Method::MonteCarlo],
            ..rho_sweep(0.01)
        },
        Preset::Fig2 => SweepSpec {
            series: Some((Axis::Theta, vec![0.001, 0.01])),
            users: vec![UserSel::NomaTotal, UserSel::OmaTotal],
            ..rho_sweep(0.01)
        },
        Preset::Fig3 => SweepSpec {
            series: Some((Axis::Theta, vec![0.001, 0.01])),
            users: vec![UserSel::MultiNoma, UserSel::MultiOma, UserSel::NomaTotal, UserSel::OmaTotal],
            ..rho_sweep(0.01)
        },
        Preset::Fig4 => SweepSpec::new(Axis::Theta, theta_grid(), OperatingPoint { rho_db: 20.0, ..base }),
        Preset::Fig5 => SweepSpec {
            series: Some((Axis::AlphaPair, FIG5_ALPHA1.to_vec())),
            users: vec![UserSel::Role(UserRole::NomaStrong), UserSel::Role(UserRole::NomaWeak)],
            ..rho_sweep(0.01)
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_like_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (20.0, "20"),
            (0.001, "0.001"),
            (1e-6, "1e-06"),
            (0.1 + 0.2, "0.3"),
            (3.4538776394910684, "3.45387763949"),
            (-2.5, "-2.5"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.00001234, "1.234e-05"),
            (0.0001234, "0.0001234"),
            (f64::NAN, "NaN"),
        ];
        for (x, s) in cases {
            assert_eq!(format_sig(x), s, "{x}");
        }
    }

    #[test]
    fn row_counts() {
        assert_eq!(figure_preset(Preset::Fig1).num_cells(), 72);
        for p in Preset::ALL {
            let s = figure_preset(p);
            s.validate().unwrap();
        }
        let mut one = SweepSpec::new(Axis::RhoDb, vec![20.0], OperatingPoint::default());
        one.users = vec![UserSel::NomaTotal];
        assert_eq!(run_sweep(&one).unwrap().len(), 1);
    }

    #[test]
    fn preset_fixed_points() {
        assert_eq!(figure_preset(Preset::Fig4).fixed.rho_db, 20.0);
        assert_eq!(figure_preset(Preset::Fig1).fixed.theta, 0.01);
        let f5 = figure_preset(Preset::Fig5);
        assert!(f5.series.unwrap().1.contains(&0.3));
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn cell_order_and_standalone_cells() {
        let mut s = SweepSpec::new(Axis::RhoDb, vec![0.0, 10.0], OperatingPoint::default());
        s.methods = vec![Method::ClosedForm, Method::MonteCarlo];
        s.users = vec![UserSel::Role(UserRole::OmaWeak), UserSel::OmaTotal];
        s.series = Some((Axis::Theta, vec![0.001, 0.01]));
        s.mc.num_samples = 2000;
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows.len(), 16);
        assert_eq!((rows[0].theta, rows[0].rho_db), (0.001, 0.0));
        assert_eq!(rows[1].method, Method::MonteCarlo);
        assert_eq!(rows[2].user, UserSel::OmaTotal);
        assert_eq!(rows[4].rho_db, 10.0);
        assert_eq!(rows[8].theta, 0.01);
        for i in [3, 9, 15] {
            assert_eq!(run_cell(&s, i).unwrap(), rows[i]);
        }
        let again = run_sweep(&s).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn bad_grids_and_failing_cells() {
        let s = SweepSpec::new(Axis::RhoDb, vec![0.0, 0.0], OperatingPoint::default());
        assert!(s.validate().is_err());
        assert!(SweepSpec::new(Axis::RhoDb, vec![], OperatingPoint::default()).validate().is_err());
        let mut c = SweepSpec::new(Axis::RhoDb, vec![10.0], OperatingPoint::default());
        c.clamp_rate = true;
        let rows = run_sweep(&c).unwrap();
        assert!(rows.iter().all(|r| r.ec.is_nan() && !r.diag.is_empty()));
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scheme,user,method,rho_db,theta,epsilon,blocklength,alpha1,alpha2,num_pairs,ec,std_err,diag\n"
        );
    }
}
