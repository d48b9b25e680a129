use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const HEADER: &str = "scheme,user,method,rho_db,theta,epsilon,blocklength,alpha1,alpha2,num_pairs,ec,std_err,diag";

fn nomaec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nomaec"))
        .args(args)
        .env_remove("NOMAEC_SEED")
        .output()
        .expect("run nomaec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Field `column` of data row `row`.
fn field(csv: &str, row: usize, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    lines.nth(row).unwrap().split(',').nth(i).unwrap().to_string()
}

#[test]
fn ec_prints_one_row() {
    let o = nomaec(&["ec", "--user", "oma-strong", "--method", "closed-form", "--rho-db", "20", "--theta", "0.01"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], HEADER);
    assert!(lines[1].starts_with("oma,oma_strong,closed_form,20,0.01,1e-06,400,0.3,0.7,1,"));
    let ec: f64 = field(&out, 0, "ec").parse().unwrap();
    assert!(ec > 0.0 && ec < 7.0);
}

#[test]
fn scheme_and_short_user_names_combine() {
    let a = stdout(&nomaec(&["ec", "--scheme", "noma", "--user", "weak"]));
    let b = stdout(&nomaec(&["ec", "--user", "noma_weak"]));
    assert_eq!(a, b);
    let o = nomaec(&["ec", "--scheme", "oma", "--user", "noma-weak"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["ec", "--user", "oma-strong", "--epsilon", "1.5"][..],
        &["ec", "--user", "oma-strong", "--alpha1", "0.3", "--alpha2", "0.6"],
        &["ec", "--user", "oma-strong", "--preset", "fig1"],
        &["ec", "--method", "closed-form"],
        &["ec", "--user", "nobody"],
        &["sweep", "--preset", "fig9"],
        &["sweep", "--preset", "fig2", "--emit-plot"],
        &["validate", "--rho-db", "3"],
        &["validate", "--tolerance-profile", "loose"],
        &["frobnicate"],
    ] {
        let o = nomaec(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let args = ["ec", "--user", "noma-weak", "--method", "monte-carlo", "--samples", "5000", "--seed", "12"];
    let a = nomaec(&args);
    let b = nomaec(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = nomaec(&["ec", "--user", "noma-weak", "--method", "monte-carlo", "--samples", "5000", "--seed", "13"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sweep_preset_writes_csv_and_plot_script() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    let o = nomaec(&["sweep", "--preset", "fig1", "--samples", "2000", "--out", csv.to_str().unwrap(), "--emit-plot"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 73);
    assert_eq!(text.lines().next().unwrap(), HEADER);
    let script = fs::read_to_string(dir.path().join("fig1_plot.py")).unwrap();
    assert!(script.contains("\"fig1.csv\""));
    assert!(script.contains("import matplotlib"));
    // the script reads nothing but the CSV
    assert_eq!(script.matches("open(").count(), 1);
}

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let dir = tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = nomaec(&[
            "sweep", "--preset", "fig3", "--method", "monte-carlo", "--samples", "2000", "--seed", "8", "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn custom_sweep_from_flags() {
    let o = nomaec(&[
        "sweep", "--axis", "theta", "--grid", "0.001,0.01", "--series-axis", "rho_db", "--series", "10,30", "--user",
        "noma-strong,multi-oma", "--method", "closed-form,quadrature", "--num-pairs", "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 2 * 2 * 2 * 2);
    assert_eq!(field(&out, 0, "rho_db"), "10");
    assert_eq!(field(&out, 0, "theta"), "0.001");
    assert_eq!(field(&out, 3, "num_pairs"), "2");
    assert_eq!(field(&out, 15, "rho_db"), "30");
}

#[test]
fn unwritable_output_exits_one() {
    let o = nomaec(&["sweep", "--preset", "fig4", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn truncated_config_names_the_line() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "user = \"oma_weak\"\ntheta = 0.01\nrho_db =").unwrap();
    let o = nomaec(&["ec", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn flags_override_file_override_environment() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "user = \"oma_strong\"\nmethod = \"monte_carlo\"\nsamples = 3000\nrho_db = 30\ntheta = 0.001\nseed = 5\n",
    )
    .unwrap();
    let run = |env_seed: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nomaec"));
        c.args(["ec", "--config", cfg.to_str().unwrap()]).args(extra).env_remove("NOMAEC_SEED");
        if let Some(s) = env_seed {
            c.env("NOMAEC_SEED", s);
        }
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o)
    };
    // file over built-in defaults
    let base = run(None, &[]);
    assert_eq!(field(&base, 0, "rho_db"), "30");
    assert_eq!(field(&base, 0, "theta"), "0.001");
    assert_eq!(field(&base, 0, "diag"), "samples=3000");
    // file seed over environment seed
    assert_eq!(run(Some("77"), &[]), base);
    // flag over file
    let flagged = run(Some("77"), &["--rho-db", "10", "--seed", "5"]);
    assert_eq!(field(&flagged, 0, "rho_db"), "10");
    assert_eq!(field(&flagged, 0, "theta"), "0.001");

    // environment over built-in default when neither flag nor file sets the seed
    let plain = |env_seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nomaec"));
        c.args(["ec", "--user", "oma_weak", "--method", "mc", "--samples", "2000"]).env_remove("NOMAEC_SEED");
        if let Some(s) = env_seed {
            c.env("NOMAEC_SEED", s);
        }
        stdout(&c.output().unwrap())
    };
    assert_ne!(plain(Some("77")), plain(None));
    assert_eq!(plain(Some("77")), plain(Some("77")));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "user = \"oma_weak\"\nsnr = 3\n").unwrap();
    let o = nomaec(&["ec", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    // default seed and sample count; other seeds can fail the strong users'
    // simulation checks at 30-40 dB, where rare fades dominate the kernel
    let o = nomaec(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PASS closed_form/noma_strong")));
    assert!(out.lines().any(|l| l.starts_with("info-")));

    let o = nomaec(&["validate", "--samples", "20000", "--inject-psi-sign-error"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failing cell: closed_form/noma_strong"));
}

#[test]
fn strict_profile_tightens_strong_checks() {
    let o = nomaec(&["validate", "--samples", "20000", "--tolerance-profile", "strict"]);
    let out = stdout(&o);
    let strong: Vec<&str> = out.lines().filter(|l| l.contains("closed_form/oma_strong ")).collect();
    assert!(!strong.is_empty());
    assert!(strong.iter().all(|l| l.ends_with("tol=1.0e-8")));
    assert!(out.lines().any(|l| l.contains("closed_form/oma_weak ") && l.ends_with("tol=5.0e-3")));
}

#[test]
fn help_lists_subcommands() {
    let o = nomaec(&["--help"]);
    let out = stdout(&o);
    for s in ["ec", "sweep", "validate"] {
        assert!(out.contains(s));
    }
    assert!(Path::new(env!("CARGO_BIN_EXE_nomaec")).exists());
}
