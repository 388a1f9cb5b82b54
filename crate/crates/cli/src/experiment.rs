//! Turning a validated config into a simulation.

use std::collections::BTreeMap;

use geogate_core::gates::{
    detuning_for_gamma, phase_rotated, raman_gate, run_gate, target_gate1, target_gate2, tune_raman_loop,
    two_qubit_phase_gate, GateReport, RamanTarget,
};
use geogate_core::linalg::{Operator, C64};
use geogate_core::models::{two_photon_rabi, BiexcitonParams, HamiltonianModel, Laser, RamanParams};
use geogate_core::pulses::{gate1_sequence, gate2_sequence_with_offset, repeat_sequence, PulseSegment, PulseSequence};
use geogate_core::simulate::Settings;

use crate::config::{ExperimentConfig, SequenceConfig, TargetConfig};
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: GateReport,
    /// Parameters derived during the run (e.g. a tuned Raman detuning).
    pub resolved: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    /// e.g. `Δ/Ω = 10`
    pub ratio: Option<String>,
    pub warnings: Vec<String>,
}

fn raman_params(
    model: &HamiltonianModel,
    phase_plus: f64,
    phase_minus: f64,
    raman_detuning: f64,
) -> Option<RamanParams> {
    match *model {
        HamiltonianModel::RamanThreeLevel {
            rabi_plus,
            rabi_minus,
            detuning,
        } => Some(RamanParams {
            rabi_plus,
            rabi_minus,
            detuning,
            phase_plus,
            phase_minus,
            raman_detuning,
        }),
        _ => None,
    }
}

fn biexciton_params(model: &HamiltonianModel, phase1: f64, phase2: f64) -> Option<BiexcitonParams> {
    match *model {
        HamiltonianModel::Biexciton {
            omega0,
            delta,
            rabi1,
            rabi2,
        } => {
            let frequency = BiexcitonParams::two_photon_resonance(omega0, delta);
            Some(BiexcitonParams {
                omega0,
                delta,
                laser1: Laser {
                    rabi: rabi1,
                    phase: phase1,
                    frequency,
                },
                laser2: Laser {
                    rabi: rabi2,
                    phase: phase2,
                    frequency,
                },
            })
        }
        _ => None,
    }
}

/// Explicit pulse sequence for the generic sequence kinds.
pub fn build_sequence(seq: &SequenceConfig) -> Result<Option<PulseSequence>, CliError> {
    let out = match seq {
        SequenceConfig::Gate1 {
            rabi,
            gamma,
            detuning,
            base_phase,
            repeats,
        } => {
            let dw = match (gamma, detuning) {
                (Some(g), None) => detuning_for_gamma(*rabi, *g)?,
                (None, Some(d)) => *d,
                _ => return Err(CliError::Config("gate1 needs exactly one of gamma or detuning".into())),
            };
            repeat_sequence(&gate1_sequence(*rabi, dw, *base_phase)?, *repeats)?
        }
        SequenceConfig::Gate2 {
            rabi,
            phi0,
            offset,
            repeats,
        } => repeat_sequence(&gate2_sequence_with_offset(*rabi, *phi0, *offset)?, *repeats)?,
        SequenceConfig::Constant {
            rabi,
            phase,
            detuning,
            duration,
        } => PulseSequence::new(vec![PulseSegment::new(*rabi, *phase, *detuning, *duration)?], 1)?,
        SequenceConfig::Segments { segments, repeats } => {
            let checked = segments
                .iter()
                .map(|s| PulseSegment::new(s.rabi, s.phase, s.detuning, s.duration))
                .collect::<Result<Vec<_>, _>>()?;
            PulseSequence::new(checked, *repeats)?
        }
        _ => return Ok(None),
    };
    Ok(Some(out))
}

fn build_target(target: &TargetConfig, seq: &SequenceConfig, dim: usize) -> Result<Operator, CliError> {
    Ok(match (target, seq) {
        (TargetConfig::Gate1 { gamma: Some(g) }, _) => target_gate1(*g),
        (
            TargetConfig::Gate1 { gamma: None },
            SequenceConfig::Gate1 {
                rabi,
                gamma,
                detuning,
                base_phase,
                ..
            },
        ) => {
            let g = match (gamma, detuning) {
                (Some(g), _) => *g,
                (None, Some(d)) => 2.0 * (2.0 * rabi / d).atan(),
                (None, None) => return Err(CliError::Config("gate1 needs exactly one of gamma or detuning".into())),
            };
            phase_rotated(&target_gate1(g), *base_phase)
        }
        (TargetConfig::Gate2 { gamma_tilde: Some(g) }, _) => target_gate2(*g),
        (TargetConfig::Gate2 { gamma_tilde: None }, SequenceConfig::Gate2 { phi0, .. }) => target_gate2(2.0 * phi0),
        (TargetConfig::Gate1 { gamma: None } | TargetConfig::Gate2 { gamma_tilde: None }, _) => {
            return Err(CliError::Config(
                "a target without its angle needs the matching sequence kind".into(),
            ))
        }
        (TargetConfig::Identity, _) => Operator::identity(dim),
        (TargetConfig::Diagonal { phases }, _) => {
            Operator::diagonal(&phases.iter().map(|p| C64::from_polar(1.0, *p)).collect::<Vec<_>>())
        }
    })
}

/// Schema-independent physics checks, without running anything.
pub fn validate(cfg: &ExperimentConfig) -> Result<Validation, CliError> {
    let model = &cfg.model;
    let mut ratio = None;
    match *model {
        HamiltonianModel::Biexciton {
            delta, rabi1, rabi2, ..
        }
        | HamiltonianModel::TwoPhotonEffective {
            delta, rabi1, rabi2, ..
        } => {
            let p = biexciton_params(
                &HamiltonianModel::Biexciton {
                    omega0: 0.0,
                    delta,
                    rabi1,
                    rabi2,
                },
                0.0,
                0.0,
            )
            .unwrap();
            two_photon_rabi(&p)?;
            ratio = Some(format!("Ω/δ = {}", fmt_ratio(p.ratio())));
        }
        HamiltonianModel::RamanThreeLevel {
            rabi_plus,
            rabi_minus,
            detuning,
        }
        | HamiltonianModel::RamanEffective {
            rabi_plus,
            rabi_minus,
            detuning,
        } => {
            let p = RamanParams {
                rabi_plus,
                rabi_minus,
                detuning,
                phase_plus: 0.0,
                phase_minus: 0.0,
                raman_detuning: 0.0,
            };
            p.effective_coupling()?;
            ratio = Some(format!("Δ/Ω = {}", fmt_ratio(1.0 / p.ratio())));
        }
        HamiltonianModel::LabTwoLevel { omega0 } if !(omega0 > 0.0) => {
            return Err(CliError::Config(format!("model.omega0 must be > 0, got {omega0}")));
        }
        _ => {}
    }
    let mut warnings = model.validity().warnings;
    match &cfg.sequence {
        SequenceConfig::RamanNot {
            gamma_loop: Some(g), ..
        } if !(*g > 0.0 && *g < std::f64::consts::PI) => {
            return Err(CliError::Config(format!("gamma_loop must lie in (0, π), got {g}")));
        }
        SequenceConfig::RamanNot {
            raman_detuning: Some(0.0),
            ..
        } => {
            return Err(CliError::Config("raman_detuning must be nonzero".into()));
        }
        _ => {}
    }
    if let Some(seq) = build_sequence(&cfg.sequence)? {
        warnings.extend(seq.warnings());
    }
    cfg.initial_state()?;
    Ok(Validation { ratio, warnings })
}

fn fmt_ratio(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    format!("{r}")
}

pub fn execute(cfg: &ExperimentConfig, settings: &Settings) -> Result<Outcome, CliError> {
    let mut resolved = BTreeMap::new();
    let report = match &cfg.sequence {
        SequenceConfig::RamanNot {
            gamma_loop,
            raman_detuning,
            phase_plus,
            phase_minus,
        } => {
            let mut p = raman_params(&cfg.model, *phase_plus, *phase_minus, raman_detuning.unwrap_or(0.0))
                .ok_or_else(|| CliError::Config("raman sequences need model kind \"raman-three-level\"".into()))?;
            if let Some(g) = gamma_loop {
                p.raman_detuning = tune_raman_loop(&p, *g, settings)?;
            }
            resolved.insert("raman_detuning".into(), p.raman_detuning);
            raman_gate(&p, RamanTarget::Not, settings)?
        }
        SequenceConfig::RamanPhase {
            gamma_tilde,
            phase_plus,
            phase_minus,
        } => {
            let p = raman_params(&cfg.model, *phase_plus, *phase_minus, 0.0)
                .ok_or_else(|| CliError::Config("raman sequences need model kind \"raman-three-level\"".into()))?;
            raman_gate(
                &p,
                RamanTarget::Phase {
                    gamma_tilde: *gamma_tilde,
                },
                settings,
            )?
        }
        SequenceConfig::TwoPhoton {
            gamma_tilde,
            phase1,
            phase2,
        } => {
            let p = biexciton_params(&cfg.model, *phase1, *phase2)
                .ok_or_else(|| CliError::Config("two-photon sequences need model kind \"biexciton\"".into()))?;
            resolved.insert("two_photon_rabi".into(), two_photon_rabi(&p)?);
            two_qubit_phase_gate(&p, *gamma_tilde, settings)?
        }
        other => {
            let seq = build_sequence(other)?.expect("generic sequence kinds always build");
            let target = cfg
                .target
                .as_ref()
                .map(|t| build_target(t, other, cfg.model.dim()))
                .transpose()?;
            run_gate(&seq, &cfg.model, target.as_ref(), &cfg.initial_state()?, settings)?
        }
    };
    Ok(Outcome { report, resolved })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Outcome {
        let cfg = ExperimentConfig::parse(text).unwrap();
        validate(&cfg).unwrap();
        execute(&cfg, &cfg.settings(None)).unwrap()
    }

    #[test]
    fn implied_gate1_target_follows_base_phase() {
        let o = run(r#"
            [model]
            kind = "rotating-two-level"
            [sequence]
            kind = "gate1"
            rabi = 0.02
            detuning = 0.07
            base_phase = 0.7
            [target]
            kind = "gate1"
        "#);
        assert!(o.report.fidelity.unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn implied_gate2_target() {
        let o = run(r#"
            [model]
            kind = "rotating-two-level"
            [sequence]
            kind = "gate2"
            rabi = 0.02
            phi0 = 0.3
            offset = 1.1
            [target]
            kind = "gate2"
        "#);
        assert!(o.report.fidelity.unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn implied_target_needs_matching_sequence() {
        let cfg = ExperimentConfig::parse(
            r#"
            [model]
            kind = "rotating-two-level"
            [sequence]
            kind = "constant"
            rabi = 0.02
            duration = 10.0
            [target]
            kind = "gate2"
        "#,
        )
        .unwrap();
        assert!(matches!(execute(&cfg, &cfg.settings(None)), Err(CliError::Config(_))));
    }

    #[test]
    fn raman_ratio_is_reported() {
        let cfg = ExperimentConfig::parse(
            r#"
            [model]
            kind = "raman-three-level"
            rabi_plus = 0.02
            rabi_minus = 0.02
            detuning = 0.2
            [sequence]
            kind = "constant"
            duration = 100.0
        "#,
        )
        .unwrap();
        assert_eq!(validate(&cfg).unwrap().ratio.as_deref(), Some("Δ/Ω = 10"));
    }
}
