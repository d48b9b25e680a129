//! `nomaec`: effective capacity of NOMA and OMA users from the command line.

mod plot;
mod settings;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use nomaec_core::effcap::{McConfig, Method, Pairing, Scheme};
use nomaec_core::sweep::{
    figure_preset, run_cell, run_sweep, snr_grid_db, theta_grid, write_csv, Axis, MultiUserShape, OperatingPoint,
    Preset, SweepSpec, UserSel, FIG5_ALPHA1,
};
use nomaec_core::validate::{run_validation, ToleranceProfile, ValidationOptions};

use settings::Settings;

#[derive(Parser)]
#[command(name = "nomaec", version, about = "Effective capacity of NOMA and OMA downlinks at finite blocklength")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One user and method at one operating point, as CSV (header + one row)
    Ec(CommonArgs),
    /// A parameter sweep or figure preset, as CSV
    Sweep(CommonArgs),
    /// Closed form against quadrature and simulation against quadrature
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat TOML file; keys are the CSV column names and flag names
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Settings,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluate the closed forms with the sign of ψ flipped (self-test)
    #[arg(long, hide = true)]
    inject_psi_sign_error: bool,
}

/// Exit status 2 for usage and configuration errors, 1 for everything else.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

type Outcome<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ec(a) => cmd_ec(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Flags over file over environment. Flags outside `allowed` are usage
/// errors; file keys a command does not use are ignored so that one file
/// can serve every command.
fn layered(args: CommonArgs, command: &str, allowed: &[&str]) -> Outcome<Settings> {
    if let Some(k) = args.flags.set_keys().into_iter().find(|k| !allowed.contains(k)) {
        return Err(usage(anyhow!("--{} does not apply to '{command}'", k.replace('_', "-"))));
    }
    let file = match &args.config {
        Some(p) => settings::load_file(p).map_err(usage)?,
        None => Settings::default(),
    };
    Ok(args.flags.over(file.over(settings::from_env().map_err(usage)?)))
}

const POINT_KEYS: [&str; 7] = ["rho_db", "theta", "epsilon", "blocklength", "alpha1", "alpha2", "clamp_rate"];
const MC_KEYS: [&str; 3] = ["seed", "samples", "verbose"];
const MULTI_KEYS: [&str; 3] = ["num_pairs", "total_users", "pairing"];

fn keys(groups: &[&[&'static str]]) -> Vec<&'static str> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

fn operating_point(s: &Settings, base: OperatingPoint) -> Outcome<OperatingPoint> {
    let mut p = base;
    p.rho_db = s.rho_db.unwrap_or(p.rho_db);
    p.theta = s.theta.unwrap_or(p.theta);
    p.epsilon = s.epsilon.unwrap_or(p.epsilon);
    p.blocklength = s.blocklength.unwrap_or(p.blocklength);
    match (s.alpha1, s.alpha2) {
        (Some(a1), Some(a2)) if (a1 + a2 - 1.0).abs() > 1e-12 => {
            return Err(usage(anyhow!("alpha1 + alpha2 must equal 1 (got {a1} + {a2})")));
        }
        (Some(a1), _) => p.alpha1 = a1,
        (None, Some(a2)) => p.alpha1 = 1.0 - a2,
        (None, None) => {}
    }
    p.validate().map_err(usage)?;
    Ok(p)
}

fn parse_scheme(s: &str) -> Outcome<Scheme> {
    match s {
        "noma" => Ok(Scheme::Noma),
        "oma" => Ok(Scheme::Oma),
        _ => Err(usage(anyhow!("unknown scheme '{s}' (expected noma or oma)"))),
    }
}

fn parse_users(list: &str, scheme: Option<Scheme>) -> Outcome<Vec<UserSel>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim) {
        let full = match (scheme, name) {
            (Some(s), "strong" | "weak" | "total") => format!("{}_{name}", s.as_str()),
            (Some(s), "multi") => format!("multi_{}", s.as_str()),
            _ => name.to_string(),
        };
        let user: UserSel = full.parse().map_err(usage)?;
        if let Some(s) = scheme {
            if user.scheme() != s {
                return Err(usage(anyhow!("user '{name}' is not a {} user", s.as_str())));
            }
        }
        out.push(user);
    }
    Ok(out)
}

fn parse_methods(list: &str) -> Outcome<Vec<Method>> {
    list.split(',').map(|m| m.trim().parse().map_err(usage)).collect()
}

fn parse_pairing(name: &str, seed: u64) -> Outcome<Pairing> {
    match name.replace('-', "_").as_str() {
        "strongest_weakest" => Ok(Pairing::StrongestWeakest),
        "adjacent" => Ok(Pairing::Adjacent),
        "random" => Ok(Pairing::Random { seed }),
        _ => Err(usage(anyhow!("unknown pairing '{name}'"))),
    }
}

/// Everything in a spec that is not the grid.
fn apply_common(spec: &mut SweepSpec, s: &Settings) -> Outcome<()> {
    spec.fixed = operating_point(s, spec.fixed)?;
    let scheme = s.scheme.as_deref().map(parse_scheme).transpose()?;
    match (&s.user, scheme) {
        (Some(list), _) => spec.users = parse_users(list, scheme)?,
        (None, Some(sch)) => spec.users.retain(|u| u.scheme() == sch),
        (None, None) => {}
    }
    if let Some(m) = &s.method {
        spec.methods = parse_methods(m)?;
    }
    let seed = s.seed.unwrap_or(spec.mc.master_seed);
    spec.mc = McConfig {
        num_samples: s.samples.unwrap_or(spec.mc.num_samples),
        master_seed: seed,
    };
    spec.clamp_rate = s.clamp_rate.unwrap_or(false);
    spec.quadrature_unit_dispersion = s.unit_dispersion.unwrap_or(false);
    let mut shape = MultiUserShape::default();
    if let Some(n) = s.num_pairs {
        shape.served_users = 2 * n;
    }
    shape.total_users = s.total_users.unwrap_or(shape.total_users);
    if let Some(p) = &s.pairing {
        shape.pairing = parse_pairing(p, seed)?;
    }
    spec.multiuser = shape;
    spec.validate().map_err(usage)
}

fn cmd_ec(args: CommonArgs) -> Outcome<ExitCode> {
    let allowed = keys(&[&POINT_KEYS, &MC_KEYS, &MULTI_KEYS, &["scheme", "user", "method", "unit_dispersion", "out"]]);
    let s = layered(args, "ec", &allowed)?;
    let point = operating_point(&s, OperatingPoint::default())?;
    let mut spec = SweepSpec::new(Axis::RhoDb, vec![point.rho_db], point);
    spec.methods = vec![Method::ClosedForm];
    apply_common(&mut spec, &s)?;
    if s.user.is_none() {
        return Err(usage(anyhow!("ec needs --user")));
    }
    if spec.users.len() != 1 || spec.methods.len() != 1 {
        return Err(usage(anyhow!("ec takes exactly one user and one method")));
    }
    let row = run_cell(&spec, 0).map_err(usage)?;
    let failed = !row.ec.is_finite();
    let diag = row.diag.clone();
    write_rows(&[row], s.out.as_deref())?;
    if failed {
        return Err(runtime(anyhow!("{diag}")));
    }
    Ok(ExitCode::SUCCESS)
}

fn default_grid(axis: Axis) -> Outcome<Vec<f64>> {
    match axis {
        Axis::RhoDb => Ok(snr_grid_db()),
        Axis::Theta => Ok(theta_grid()),
        Axis::AlphaPair => Ok(FIG5_ALPHA1.to_vec()),
        other => Err(usage(anyhow!("axis {} needs --grid", other.as_str()))),
    }
}

fn cmd_sweep(args: CommonArgs) -> Outcome<ExitCode> {
    let allowed = keys(&[
        &POINT_KEYS,
        &MC_KEYS,
        &MULTI_KEYS,
        &[
            "scheme",
            "user",
            "method",
            "unit_dispersion",
            "out",
            "preset",
            "axis",
            "grid",
            "series_axis",
            "series",
            "emit_plot",
        ],
    ]);
    let s = layered(args, "sweep", &allowed)?;
    let mut spec = match &s.preset {
        Some(p) => figure_preset(p.parse::<Preset>().map_err(usage)?),
        None => SweepSpec::new(Axis::RhoDb, snr_grid_db(), OperatingPoint::default()),
    };
    if let Some(a) = &s.axis {
        spec.axis = a.parse().map_err(usage)?;
        spec.grid = default_grid(spec.axis)?;
    }
    if let Some(g) = &s.grid {
        spec.grid = g.clone();
    }
    spec.series = match (&s.series_axis, &s.series, spec.series.take()) {
        (Some(a), Some(v), _) => Some((a.parse().map_err(usage)?, v.clone())),
        (None, Some(v), Some((a, _))) => Some((a, v.clone())),
        (None, Some(_), None) => return Err(usage(anyhow!("--series needs --series-axis"))),
        (Some(_), None, _) => return Err(usage(anyhow!("--series-axis needs --series"))),
        (None, None, keep) => keep,
    };
    apply_common(&mut spec, &s)?;

    let emit_plot = s.emit_plot.unwrap_or(false);
    if emit_plot && s.out.is_none() {
        return Err(usage(anyhow!("--emit-plot needs --out")));
    }
    // open the output before the work so that a bad path fails fast
    let out = open_output(s.out.as_deref())?;
    let start = Instant::now();
    if s.verbose() {
        eprintln!("sweeping {} cells", spec.num_cells());
    }
    let rows = run_sweep(&spec).map_err(runtime)?;
    write_csv(&rows, out).map_err(runtime)?;
    if s.verbose() {
        let failed = rows.iter().filter(|r| !r.ec.is_finite()).count();
        eprintln!("{} rows, {failed} failed, {:.2?}", rows.len(), start.elapsed());
    }
    for r in rows.iter().filter(|r| !r.ec.is_finite()) {
        eprintln!(
            "warning: {} {} at rho_db={} theta={}: {}",
            r.user, r.method, r.rho_db, r.theta, r.diag
        );
    }
    if emit_plot {
        let csv_path = s.out.as_deref().expect("checked above");
        let script = plot_path(csv_path);
        let name = csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let text = plot::script(&name, spec.axis, spec.series.as_ref().map(|(a, _)| *a));
        std::fs::write(&script, text).map_err(|e| runtime(anyhow!("cannot write {}: {e}", script.display())))?;
        eprintln!("plot script: {}", script.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// `fig1.csv` → `fig1_plot.py`.
fn plot_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}_plot.py"))
}

fn open_output(path: Option<&Path>) -> Outcome<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| runtime(anyhow!("cannot write {}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows(rows: &[nomaec_core::sweep::ResultRow], path: Option<&Path>) -> Outcome<()> {
    write_csv(rows, open_output(path)?).map_err(runtime)
}

fn cmd_validate(args: ValidateArgs) -> Outcome<ExitCode> {
    let allowed = ["seed", "samples", "tolerance_profile", "verbose"];
    let s = layered(args.common, "validate", &allowed)?;
    let defaults = ValidationOptions::default();
    let profile = match &s.tolerance_profile {
        Some(p) => p.parse::<ToleranceProfile>().map_err(usage)?,
        None => ToleranceProfile::Default,
    };
    let opts = ValidationOptions {
        profile,
        mc: McConfig {
            num_samples: s.samples.unwrap_or(defaults.mc.num_samples),
            master_seed: s.seed.unwrap_or(defaults.mc.master_seed),
        },
        flip_psi_sign: args.inject_psi_sign_error,
        ..defaults
    };
    let start = Instant::now();
    let report = run_validation(&opts).map_err(runtime)?;
    for c in &report.checks {
        println!("{c}");
    }
    let failures: Vec<_> = report.failures().collect();
    println!(
        "{} checks, {} failed ({:?} profile)",
        report.checks.iter().filter(|c| !c.informational).count(),
        failures.len(),
        profile
    );
    if s.verbose() {
        eprintln!("validation took {:.2?}", start.elapsed());
    }
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in failures {
            eprintln!("failing cell: {} rho_db={} theta={}", c.name, c.rho_db, c.theta);
        }
        Ok(ExitCode::from(1))
    }
}
