//! The `run`, `sweep` and `validate` subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{read_config_value, set_path, ExperimentConfig};
use crate::error::CliError;
use crate::experiment::{execute, validate, Outcome, Validation};
use crate::output::{
    report_json, trajectory_csv, write_file, Manifest, SweepPoint, REPORT_FILE, SUMMARY_FILE, TRAJECTORY_FILE,
};

fn config_json(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("configs serialize")
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// `--out-dir`, else `[output] dir`, else `out/<config stem>`.
pub fn output_dir(config_path: &Path, cfg: &ExperimentConfig, cli: Option<&Path>) -> PathBuf {
    if let Some(d) = cli {
        return d.to_path_buf();
    }
    if let Some(d) = &cfg.output.dir {
        return d.clone();
    }
    let stem = config_path
        .file_stem()
        .map_or("run".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from("out").join(stem)
}

/// Run one parsed config and write its artifacts into `dir`.
pub fn run_config(cfg: &ExperimentConfig, dir: &Path, dt: Option<f64>) -> Result<Outcome, CliError> {
    let start = Instant::now();
    validate(cfg)?;
    let outcome = execute(cfg, &cfg.settings(dt))?;
    create_dir(dir)?;
    let mut manifest = Manifest::new("run", config_json(cfg));
    manifest.files.insert(
        TRAJECTORY_FILE.into(),
        write_file(dir, TRAJECTORY_FILE, &trajectory_csv(&outcome.report.trajectory))?,
    );
    manifest.files.insert(
        REPORT_FILE.into(),
        write_file(dir, REPORT_FILE, &report_json(&outcome.report))?,
    );
    manifest.resolved = outcome.resolved.clone();
    manifest.runtime_seconds = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(outcome)
}

pub fn cmd_run(config_path: &Path, out_dir: Option<&Path>, dt: Option<f64>) -> Result<(PathBuf, Outcome), CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let dir = output_dir(config_path, &cfg, out_dir);
    let outcome = run_config(&cfg, &dir, dt)?;
    Ok((dir, outcome))
}

pub fn cmd_validate(config_path: &Path) -> Result<Validation, CliError> {
    validate(&ExperimentConfig::load(config_path)?)
}

/// Grid for `--range a:b --points n` (inclusive) or a comma list.
pub fn parse_grid(range: Option<&str>, points: Option<usize>, values: Option<&str>) -> Result<Vec<f64>, CliError> {
    let parse = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("not a number: {s:?}")))
    };
    match (range, values) {
        (Some(r), None) => {
            let (a, b) = r
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("range must be a:b, got {r:?}")))?;
            let (a, b) = (parse(a)?, parse(b)?);
            let n = points.ok_or_else(|| CliError::Config("--range needs --points".into()))?;
            match n {
                0 => Err(CliError::Config("--points must be >= 1".into())),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        (None, Some(v)) => v.split(',').map(parse).collect(),
        _ => Err(CliError::Config("give either --range with --points or --values".into())),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.16e}"))
}

/// One sub-run per grid value in `point_NNN/`, a summary CSV and a manifest.
/// The first failing point stops the sweep; completed points are kept.
pub fn cmd_sweep(
    config_path: &Path,
    out_dir: Option<&Path>,
    param: &str,
    grid: &[f64],
    jobs: usize,
    dt: Option<f64>,
) -> Result<PathBuf, CliError> {
    let start = Instant::now();
    let base = read_config_value(config_path)?;
    let base_cfg = ExperimentConfig::from_value(base.clone())?;
    let dir = output_dir(config_path, &base_cfg, out_dir);
    if grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    // resolve every point before running any
    let configs = grid
        .iter()
        .map(|&v| {
            let mut value = base.clone();
            set_path(&mut value, param, v)?;
            ExperimentConfig::from_value(value)
        })
        .collect::<Result<Vec<_>, _>>()?;
    create_dir(&dir)?;

    let abort = AtomicBool::new(false);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let results: Vec<Option<Result<Outcome, CliError>>> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| {
                if abort.load(Ordering::SeqCst) {
                    return None;
                }
                let r = run_config(cfg, &dir.join(format!("point_{i:03}")), dt);
                if r.is_err() {
                    abort.store(true, Ordering::SeqCst);
                }
                Some(r)
            })
            .collect()
    });

    let mut summary = String::from("index,value,fidelity,state_fidelity,leakage,gamma_loop,loop_count,gate_time_fs\n");
    let mut manifest = Manifest::new("sweep", config_json(&base_cfg));
    let mut first_error = None;
    for (i, (value, result)) in grid.iter().zip(results).enumerate() {
        let status = match result {
            Some(Ok(o)) => {
                let r = &o.report;
                summary.push_str(&format!(
                    "{i},{value:.16e},{},{},{:.16e},{},{},{:.16e}\n",
                    opt(r.fidelity),
                    opt(r.state_fidelity),
                    r.leakage,
                    opt(r.gamma_loop),
                    r.loop_count,
                    r.gate_time
                ));
                "ok".to_string()
            }
            Some(Err(e)) => {
                let msg = format!("{e}");
                first_error.get_or_insert(e);
                format!("failed: {msg}")
            }
            None => "skipped".to_string(),
        };
        manifest.points.push(SweepPoint {
            value: *value,
            dir: format!("point_{i:03}"),
            status,
        });
    }
    manifest
        .files
        .insert(SUMMARY_FILE.into(), write_file(&dir, SUMMARY_FILE, &summary)?);
    manifest.config = serde_json::json!({ "base": config_json(&base_cfg), "parameter": param });
    if let Some(e) = &first_error {
        manifest.status = "failed".into();
        manifest.error = Some(e.to_string());
    }
    manifest.runtime_seconds = start.elapsed().as_secs_f64();
    manifest.write(&dir)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(dir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid(Some("1:3"), Some(3), None).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid(Some("1:3"), Some(1), None).unwrap(), vec![1.0]);
        assert_eq!(
            parse_grid(None, None, Some("0.1, 0.2,0.4")).unwrap(),
            vec![0.1, 0.2, 0.4]
        );
        assert!(parse_grid(Some("1:3"), None, None).is_err());
        assert!(parse_grid(Some("13"), Some(2), None).is_err());
        assert!(parse_grid(None, None, Some("a,b")).is_err());
        assert!(parse_grid(None, None, None).is_err());
    }
}
