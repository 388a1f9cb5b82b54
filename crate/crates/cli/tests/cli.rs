use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use geogate_cli::commands::parse_grid;
use geogate_cli::output::sha256_hex;
use geogate_cli::{cmd_run, cmd_sweep, cmd_validate, CliError};

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn geogate() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geogate"))
}

#[test]
fn not_gate_config_ends_in_ground_state() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, _) = cmd_run(&bundled("fig3_not_gate"), Some(tmp.path()), None).unwrap();
    let csv = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "t_fs,pop_0,pop_1,nx,ny,nz,energy_exp,dyn_phase_accum"
    );
    assert!(*column(&csv, "pop_1").last().unwrap() >= 0.99);
    assert!(column(&csv, "pop_0")[0] > 1.0 - 1e-12);
}

#[test]
fn phase_gate_config_reports_quarter_pi() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, _) = cmd_run(&bundled("fig4_phase_gate"), Some(tmp.path()), None).unwrap();
    let r = report(&dir);
    assert!((r["geomPhase"].as_f64().unwrap().abs() - std::f64::consts::FRAC_PI_4).abs() <= 1e-3);
    assert!(r["fidelity"].as_f64().unwrap() > 0.999);
}

#[test]
fn raman_config_keeps_ground_state_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, _) = cmd_run(&bundled("fig5_raman"), Some(tmp.path()), None).unwrap();
    let csv = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(!csv.lines().next().unwrap().contains("nx"));
    assert!(column(&csv, "pop_2").into_iter().fold(0.0, f64::max) <= 0.05);
}

#[test]
fn raman_not_config_uses_59_loops() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, o) = cmd_run(&bundled("fig6_raman_not"), Some(tmp.path()), None).unwrap();
    assert_eq!(o.report.loop_count, 59);
    assert!(o.report.population_transfer >= 0.99);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert!(m["resolved"]["raman_detuning"].as_f64().unwrap() > 0.0);
}

#[test]
fn biexciton_config_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, o) = cmd_run(&bundled("biexciton_cphase"), Some(tmp.path()), None).unwrap();
    assert!(o.report.state_fidelity.unwrap() >= 0.98);
    let csv = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "t_fs,pop_0,pop_1,pop_2,pop_3,energy_exp,dyn_phase_accum"
    );
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["fig3_not_gate", "fig5_raman"] {
        let a = tmp.path().join(format!("{name}_a"));
        let b = tmp.path().join(format!("{name}_b"));
        cmd_run(&bundled(name), Some(&a), None).unwrap();
        cmd_run(&bundled(name), Some(&b), None).unwrap();
        for f in ["trajectory.csv", "report.json"] {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{name}/{f}");
        }
    }
}

#[test]
fn manifest_digests_match_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, _) = cmd_run(&bundled("fig4_phase_gate"), Some(tmp.path()), None).unwrap();
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let files = m["files"].as_object().unwrap();
    assert_eq!(files.len(), 2);
    for (name, digest) in files {
        assert_eq!(sha256_hex(&fs::read(dir.join(name)).unwrap()), digest.as_str().unwrap());
    }
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config"]["model"]["kind"], "rotating-two-level");
}

#[test]
fn single_point_sweep_matches_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = bundled("fig3_not_gate");
    let (run_dir, _) = cmd_run(&cfg, Some(&tmp.path().join("run")), None).unwrap();
    let sweep_dir = cmd_sweep(
        &cfg,
        Some(&tmp.path().join("sweep")),
        "sequence.detuning",
        &[0.04],
        1,
        None,
    )
    .unwrap();
    for f in ["trajectory.csv", "report.json"] {
        assert_eq!(
            fs::read(run_dir.join(f)).unwrap(),
            fs::read(sweep_dir.join("point_000").join(f)).unwrap()
        );
    }
}

#[test]
fn raman_leakage_falls_with_detuning() {
    let tmp = tempfile::tempdir().unwrap();
    // Δ/Ω = 5, 10, 20
    let grid = parse_grid(None, None, Some("0.1,0.2,0.4")).unwrap();
    let dir = cmd_sweep(
        &bundled("fig5_raman"),
        Some(tmp.path()),
        "model.detuning",
        &grid,
        3,
        None,
    )
    .unwrap();
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "index,value,fidelity,state_fidelity,leakage,gamma_loop,loop_count,gate_time_fs"
    );
    let leak = column(&summary, "leakage");
    assert_eq!(leak.len(), 3);
    assert!(leak[0] > leak[1] && leak[1] > leak[2], "{leak:?}");
    for i in 0..3 {
        assert!(dir.join(format!("point_{i:03}")).join("manifest.json").exists());
    }
}

#[test]
fn gate1_angle_sweep_keeps_fidelity() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "gate1.toml",
        r#"
[model]
kind = "lab-two-level"
omega0 = 2.0

[sequence]
kind = "gate1"
rabi = 0.02
gamma = 1.0

[target]
kind = "gate1"
"#,
    );
    let grid = parse_grid(Some("0.3:2.8"), Some(5), None).unwrap();
    let dir = cmd_sweep(&cfg, Some(&tmp.path().join("out")), "sequence.gamma", &grid, 2, None).unwrap();
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let fid = column(&summary, "fidelity");
    assert_eq!(fid.len(), 5);
    assert!(fid.iter().all(|f| *f >= 0.999), "{fid:?}");
}

#[test]
fn failing_sweep_point_marks_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "gate1.toml",
        r#"
[model]
kind = "rotating-two-level"

[sequence]
kind = "gate1"
rabi = 0.02
gamma = 1.0
"#,
    );
    let out = tmp.path().join("out");
    let err = cmd_sweep(&cfg, Some(&out), "sequence.gamma", &[1.0, 4.0], 1, None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "failed");
    assert_eq!(m["points"][0]["status"], "ok");
    assert!(out.join("point_000").join("report.json").exists());
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let tmp = tempfile::tempdir().unwrap();
    let err = cmd_sweep(
        &bundled("fig3_not_gate"),
        Some(tmp.path()),
        "model.nonexistent",
        &[1.0],
        1,
        None,
    )
    .unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn validate_reports_raman_ratio() {
    let v = cmd_validate(&bundled("fig5_raman")).unwrap();
    assert_eq!(v.ratio.as_deref(), Some("Δ/Ω = 10"));
    assert!(v.warnings.is_empty());
}

#[test]
fn binary_validate_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();

    let ok = geogate()
        .args(["validate", "--config"])
        .arg(bundled("fig5_raman"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.contains("OK") && stdout.contains("Δ/Ω = 10"), "{stdout}");

    let singular = write_config(
        tmp.path(),
        "singular.toml",
        r#"
[model]
kind = "biexciton"
omega0 = 2.0
delta = 0.0
rabi1 = 0.02
rabi2 = 0.02

[sequence]
kind = "two-photon"
gamma_tilde = 1.5707963267948966
"#,
    );
    let out = geogate()
        .args(["validate", "--config"])
        .arg(&singular)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .to_lowercase()
        .contains("singular"));

    let strong = write_config(
        tmp.path(),
        "strong.toml",
        r#"
[model]
kind = "biexciton"
omega0 = 2.0
delta = 0.04
rabi1 = 0.02
rabi2 = 0.02

[sequence]
kind = "two-photon"
gamma_tilde = 1.5707963267948966
"#,
    );
    let out = geogate().args(["validate", "--config"]).arg(&strong).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));

    let broken = write_config(
        tmp.path(),
        "broken.toml",
        "[model]\nkind = \"rotating-two-level\"\nbogus = 1\n",
    );
    let out = geogate().args(["validate", "--config"]).arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_run_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("fig4");
    let ok = geogate()
        .args(["run", "--quiet", "--config"])
        .arg(bundled("fig4_phase_gate"))
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stdout.is_empty());
    assert!(out_dir.join("manifest.json").exists());

    // the two-photon gate refuses Ω/δ far outside the perturbative regime
    let strong = write_config(
        tmp.path(),
        "strong.toml",
        r#"
[model]
kind = "biexciton"
omega0 = 2.0
delta = 0.04
rabi1 = 0.02
rabi2 = 0.02

[sequence]
kind = "two-photon"
gamma_tilde = 1.5707963267948966
"#,
    );
    let out = geogate()
        .args(["run", "--config"])
        .arg(&strong)
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let missing = geogate()
        .args(["run", "--config"])
        .arg(tmp.path().join("nope.toml"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn dt_override_agrees_with_default_step() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, _) = cmd_run(&bundled("fig3_not_gate"), Some(&tmp.path().join("a")), None).unwrap();
    let (b, _) = cmd_run(&bundled("fig3_not_gate"), Some(&tmp.path().join("b")), Some(0.01)).unwrap();
    let pa = column(&fs::read_to_string(a.join("trajectory.csv")).unwrap(), "pop_1");
    let pb = column(&fs::read_to_string(b.join("trajectory.csv")).unwrap(), "pop_1");
    assert!((pa.last().unwrap() - pb.last().unwrap()).abs() < 1e-8);
}
