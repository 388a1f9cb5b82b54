//! Trajectory CSV, report JSON and run manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use geogate_core::gates::GateReport;
use geogate_core::geometry::Trajectory;

use crate::error::CliError;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.csv";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let d = traj.states.first().map_or(0, |s| s.dim());
    let qubit = d == 2;
    let mut out = String::from("t_fs");
    for k in 0..d {
        write!(out, ",pop_{k}").unwrap();
    }
    if qubit {
        out.push_str(",nx,ny,nz");
    }
    out.push_str(",energy_exp,dyn_phase_accum\n");
    for (sample, state) in traj.samples.iter().zip(&traj.states) {
        out.push_str(&num(sample.t));
        for p in state.populations() {
            out.push(',');
            out.push_str(&num(p));
        }
        if qubit {
            for x in sample.n {
                out.push(',');
                out.push_str(&num(x));
            }
        }
        writeln!(out, ",{},{}", num(sample.energy), num(sample.dyn_phase_accum)).unwrap();
    }
    out
}

pub fn report_json(report: &GateReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `contents` and return its digest.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(sha256_hex(contents.as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub resolved: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<SweepPoint>,
    pub runtime_seconds: f64,
    /// File name to sha256 digest.
    pub files: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            tool: "geogate",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            status: "ok".into(),
            error: None,
            config,
            resolved: BTreeMap::new(),
            points: Vec::new(),
            runtime_seconds: 0.0,
            files: BTreeMap::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(self).expect("manifests serialize");
        s.push('\n');
        write_file(dir, MANIFEST_FILE, &s).map(|_| ())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub dir: String,
    pub status: String,
}
