//! End-to-end checks of the command-line binary: outputs, exit codes, and
//! single-thread reproducibility. Configs are kept tiny so each invocation
//! finishes in well under a second.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_BIN_EXE_tg-sta"));
    assert!(p.is_file(), "missing binary {}", p.display());
    p = p.canonicalize().unwrap();
    p
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(binary())
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

const SMALL_EVOLVE: &str = r#"
scenario = "evolve"
n = 3.0
gamma = 0.0
omega0_sq = 1.0
omegaf_sq = 10.0
t_f = 0.5
ramps = ["sta-ermakov", "ref"]
x_min = -12.0
x_max = 12.0
n_points = 256
"#;

#[test]
fn evolve_writes_summary_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_EVOLVE);
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &["evolve"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("# n = 3"));
    let rows: Vec<&str> = summary
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t_f,"))
        .collect();
    assert_eq!(rows.len(), 2);
    // the shortcut reaches the target, the naive ramp does not
    let fid = |row: &str| -> f64 { row.rsplit(',').next().unwrap().parse().unwrap() };
    assert!(fid(rows[0]) > 0.999, "shortcut row: {}", rows[0]);
    assert!(fid(rows[1]) < 0.9, "reference row: {}", rows[1]);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["scenario"], "evolve");
    assert!(meta["files"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "summary.csv"));
    assert!(out.join("final_density_sta-ermakov.csv").is_file());
}

#[test]
fn ground_and_densities_write_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_EVOLVE);
    let out = dir.path().join("g");
    let o = run(&cfg, &out, &["ground"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["ground_mf.csv", "ground_orbitals.csv", "ground_tf.csv"] {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        assert!(text.contains("x,density"), "{f} missing header");
    }
    let out = dir.path().join("d");
    let o = run(&cfg, &out, &["densities"]);
    assert!(o.status.success());
    assert!(out.join("initial_mf.csv").is_file());
    assert!(out.join("target_orbitals.csv").is_file());
}

#[test]
fn ramps_tabulates_each_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_EVOLVE);
    let out = dir.path().join("r");
    let o = run(&cfg, &out, &["ramps"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("ramp_sta-ermakov.csv")).unwrap();
    assert!(text.contains("t,b,b_dot,b_ddot,omega_sq"));
    assert!(out.join("ramp_ref.csv").is_file());
}

#[test]
fn fig2_sweep_is_reproducible_single_threaded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
        scenario = "fig2"
        n = 3.0
        t_f_min = 0.3
        t_f_max = 1.0
        t_f_count = 3
        ramps = ["sta-ermakov"]
        x_min = -12.0
        x_max = 12.0
        n_points = 256
        "#,
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let o = run(&cfg, out, &["--threads", "1", "fig2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(out_a.join("fig2.csv")).unwrap();
    let b = std::fs::read(out_b.join("fig2.csv")).unwrap();
    assert_eq!(a, b, "repeated single-thread sweeps must be bit-identical");
}

#[test]
fn converge_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
        scenario = "converge"
        n = 3.0
        t_f = 0.5
        ramps = ["sta-ermakov"]
        x_min = -12.0
        x_max = 12.0
        n_points = 256
        "#,
    );
    let out = dir.path().join("c");
    let o = run(&cfg, &out, &["converge"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["run"]["converged"], true);
}

#[test]
fn exit_codes_distinguish_failure_modes() {
    let dir = tempfile::tempdir().unwrap();

    // 2: invalid configuration
    let bad = write_config(dir.path(), "scenario = \"ground\"\nn = -1.0\n");
    let o = run(&bad, &dir.path().join("x2"), &["ground"]);
    assert_eq!(o.status.code(), Some(2));

    // 3: no boundary scaling root for the Thomas-Fermi ansatz at tiny N
    let noroot = write_config(
        dir.path(),
        "scenario = \"ramps\"\nn = 0.5\nt_f = 1.0\nramps = [\"sta-tf\"]\n",
    );
    let o = run(&noroot, &dir.path().join("x3"), &["ramps"]);
    assert_eq!(o.status.code(), Some(3));

    // 4: box too small, density leaks to the edge during the ramp
    let leak = write_config(
        dir.path(),
        concat!(
            "scenario = \"evolve\"\nn = 10.0\nt_f = 0.5\n",
            "ramps = [\"sta-ermakov\"]\nx_min = -4.0\nx_max = 4.0\nn_points = 128\n"
        ),
    );
    let o = run(&leak, &dir.path().join("x4"), &["evolve"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn grid_and_dt_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_EVOLVE);
    let out = dir.path().join("o");
    let o = run(
        &cfg,
        &out,
        &["--grid", "-10,10,128", "--dt", "5e-4", "evolve"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("# grid = -10,10,128"));

    // malformed grid flag is a configuration error
    let o = run(&cfg, &out, &["--grid", "nope", "evolve"]);
    assert_eq!(o.status.code(), Some(2));
}
