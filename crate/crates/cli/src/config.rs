//! Experiment configuration: TOML text with `[model]`, `[sequence]`,
//! `[integrator]`, `[initial]`, `[target]` and `[output]` tables.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use geogate_core::linalg::{StateVector, C64};
use geogate_core::models::HamiltonianModel;
use geogate_core::pulses::PulseSegment;
use geogate_core::simulate::{Integrator, Settings, DEFAULT_SAMPLES_PER_SEGMENT, DEFAULT_STEPS_PER_SEGMENT};

use crate::error::CliError;

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceConfig {
    /// Off-resonant rotation loop. Give either `gamma` or `detuning`.
    Gate1 {
        rabi: f64,
        gamma: Option<f64>,
        detuning: Option<f64>,
        #[serde(default)]
        base_phase: f64,
        #[serde(default = "one")]
        repeats: u32,
    },
    /// Resonant selective phase loop with pulse phases `offset ± phi0`.
    Gate2 {
        rabi: f64,
        phi0: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default = "one")]
        repeats: u32,
    },
    /// Iterated off-resonant Raman loops accumulating a NOT. Give either
    /// `gamma_loop` (tuned on the full model) or `raman_detuning`.
    RamanNot {
        gamma_loop: Option<f64>,
        raman_detuning: Option<f64>,
        #[serde(default)]
        phase_plus: f64,
        #[serde(default)]
        phase_minus: f64,
    },
    /// Resonant Raman phase gate `exp(iγ̃|E+><E+|)`.
    RamanPhase {
        gamma_tilde: f64,
        #[serde(default)]
        phase_plus: f64,
        #[serde(default)]
        phase_minus: f64,
    },
    /// Two-qubit conditional phase gate on the biexciton model.
    TwoPhoton {
        gamma_tilde: f64,
        #[serde(default)]
        phase1: f64,
        #[serde(default)]
        phase2: f64,
    },
    /// One constant drive interval.
    Constant {
        #[serde(default)]
        rabi: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        detuning: f64,
        duration: f64,
    },
    Segments {
        segments: Vec<PulseSegment>,
        #[serde(default = "one")]
        repeats: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_method")]
    pub method: String,
    pub dt: Option<f64>,
    #[serde(default = "default_steps")]
    pub steps_per_segment: usize,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
}

fn default_method() -> String {
    "rk4".into()
}

fn default_steps() -> usize {
    DEFAULT_STEPS_PER_SEGMENT
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_SEGMENT
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: default_method(),
            dt: None,
            steps_per_segment: default_steps(),
            samples_per_segment: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub basis: Option<usize>,
    /// `[[re, im], ...]`, normalized on load.
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetConfig {
    /// Without `gamma`, the rotation the gate1 sequence is built for.
    Gate1 {
        gamma: Option<f64>,
    },
    /// Without `gamma_tilde`, `2·phi0` of the gate2 sequence.
    Gate2 {
        gamma_tilde: Option<f64>,
    },
    Identity,
    /// `diag(e^{i p_k})`
    Diagonal {
        phases: Vec<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub model: HamiltonianModel,
    pub sequence: SequenceConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub initial: Option<InitialConfig>,
    pub target: Option<TargetConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

pub fn read_config_value(path: &Path) -> Result<toml::Value, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_value(&text)
}

pub fn parse_value(text: &str) -> Result<toml::Value, CliError> {
    text.parse::<toml::Table>()
        .map(toml::Value::Table)
        .map_err(|e| CliError::Config(format!("invalid TOML: {e}")))
}

impl ExperimentConfig {
    pub fn from_value(value: toml::Value) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.check_schema()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::from_value(parse_value(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_value(read_config_value(path)?)
    }

    /// Structural checks that need no physics.
    fn check_schema(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        match self.integrator.method.as_str() {
            "rk4" | "exact" => {}
            other => {
                return bad(format!(
                    "integrator.method must be \"rk4\" or \"exact\", got \"{other}\""
                ))
            }
        }
        if self.integrator.samples_per_segment == 0 || self.integrator.steps_per_segment == 0 {
            return bad("integrator step and sample counts must be >= 1".into());
        }
        if let Some(dt) = self.integrator.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("integrator.dt must be > 0, got {dt}"));
            }
        }
        let fixed_experiment = matches!(
            self.sequence,
            SequenceConfig::RamanNot { .. } | SequenceConfig::RamanPhase { .. } | SequenceConfig::TwoPhoton { .. }
        );
        if fixed_experiment && (self.initial.is_some() || self.target.is_some()) {
            return bad(
                "raman-not, raman-phase and two-photon sequences fix their own initial state and target".into(),
            );
        }
        match (&self.sequence, &self.model) {
            (
                SequenceConfig::RamanNot { .. } | SequenceConfig::RamanPhase { .. },
                HamiltonianModel::RamanThreeLevel { .. },
            ) => {}
            (SequenceConfig::RamanNot { .. } | SequenceConfig::RamanPhase { .. }, _) => {
                return bad("raman sequences need model kind \"raman-three-level\"".into())
            }
            (SequenceConfig::TwoPhoton { .. }, HamiltonianModel::Biexciton { .. }) => {}
            (SequenceConfig::TwoPhoton { .. }, _) => {
                return bad("two-photon sequences need model kind \"biexciton\"".into())
            }
            _ => {}
        }
        match &self.sequence {
            SequenceConfig::Gate1 { gamma, detuning, .. } if gamma.is_some() == detuning.is_some() => {
                return bad("gate1 needs exactly one of gamma or detuning".into())
            }
            SequenceConfig::RamanNot {
                gamma_loop,
                raman_detuning,
                ..
            } if gamma_loop.is_some() == raman_detuning.is_some() => {
                return bad("raman-not needs exactly one of gamma_loop or raman_detuning".into())
            }
            SequenceConfig::Segments { segments, .. } if segments.is_empty() => {
                return bad("segments list is empty".into())
            }
            _ => {}
        }
        if let Some(init) = &self.initial {
            if init.basis.is_some() == init.amplitudes.is_some() {
                return bad("initial needs exactly one of basis or amplitudes".into());
            }
        }
        let d = self.model.dim();
        if let Some(TargetConfig::Diagonal { phases }) = &self.target {
            if phases.len() != d && phases.len() != 2 {
                return bad(format!("diagonal target needs 2 or {d} phases, got {}", phases.len()));
            }
        }
        Ok(())
    }

    pub fn settings(&self, dt_override: Option<f64>) -> Settings {
        let ic = &self.integrator;
        let integrator = match (ic.method.as_str(), dt_override.or(ic.dt)) {
            ("exact", None) => Integrator::Exact,
            (_, dt) => Integrator::Rk4 {
                steps_per_segment: ic.steps_per_segment,
                dt,
            },
        };
        Settings {
            integrator,
            samples_per_segment: ic.samples_per_segment,
        }
    }

    pub fn initial_state(&self) -> Result<StateVector, CliError> {
        let d = self.model.dim();
        match &self.initial {
            None => Ok(StateVector::basis(d, 0)),
            Some(InitialConfig { basis: Some(k), .. }) => {
                if *k >= d {
                    return Err(CliError::Config(format!(
                        "initial.basis {k} out of range for a {d}-level model"
                    )));
                }
                Ok(StateVector::basis(d, *k))
            }
            Some(InitialConfig {
                amplitudes: Some(a), ..
            }) => {
                if a.len() != d {
                    return Err(CliError::Config(format!(
                        "initial.amplitudes needs {d} entries, got {}",
                        a.len()
                    )));
                }
                StateVector::new(a.iter().map(|[re, im]| C64::new(*re, *im)).collect())
                    .map_err(|e| CliError::Config(format!("initial.amplitudes: {e}")))
            }
            Some(_) => Err(CliError::Config(
                "initial needs exactly one of basis or amplitudes".into(),
            )),
        }
    }
}

/// Replace the value at a dotted path such as `model.detuning`. The path
/// must already exist.
pub fn set_path(root: &mut toml::Value, path: &str, value: f64) -> Result<(), CliError> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("{path}: {} is not a table", parts[..i].join("."))))?;
        node = table
            .get_mut(*part)
            .ok_or_else(|| CliError::Config(format!("parameter {path} not present in config")))?;
    }
    match node {
        toml::Value::Float(_) | toml::Value::Integer(_) => {
            *node = if let toml::Value::Integer(_) = node {
                if value.fract() == 0.0 {
                    toml::Value::Integer(value as i64)
                } else {
                    toml::Value::Float(value)
                }
            } else {
                toml::Value::Float(value)
            };
            Ok(())
        }
        _ => Err(CliError::Config(format!("parameter {path} is not numeric"))),
    }
}
