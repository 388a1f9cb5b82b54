//! Piecewise-constant laser control: π-pulses and the two-pulse loops that
//! implement the rotation and selective-phase gates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One constant-parameter control interval acting as `B·σ` on the logical
/// pair, `B = (rabi cos φ, rabi sin φ, detuning/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub rabi: f64,
    pub phase: f64,
    /// `ω0 - ωL` (rad/fs).
    pub detuning: f64,
    /// fs
    pub duration: f64,
}

impl PulseSegment {
    pub fn new(rabi: f64, phase: f64, detuning: f64, duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::Model(format!("segment duration must be > 0, got {duration}")));
        }
        if !(rabi >= 0.0) || !rabi.is_finite() {
            return Err(Error::Model(format!("segment Rabi frequency must be >= 0, got {rabi}")));
        }
        if !phase.is_finite() || !detuning.is_finite() {
            return Err(Error::Model("segment phase and detuning must be finite".into()));
        }
        Ok(Self {
            rabi,
            phase,
            detuning,
            duration,
        })
    }

    /// Undriven interval.
    pub fn free(duration: f64) -> Self {
        Self {
            rabi: 0.0,
            phase: 0.0,
            detuning: 0.0,
            duration,
        }
    }

    /// `|B| = sqrt(Ω² + (Δω/2)²)`
    pub fn field(&self) -> f64 {
        self.rabi.hypot(self.detuning / 2.0)
    }

    /// Bloch-sphere rotation angle `2|B|T`.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * self.field() * self.duration
    }

    /// A pure σz segment (no population transfer).
    pub fn is_pure_z(&self) -> bool {
        self.rabi == 0.0
    }
}

/// Ordered segments repeated `repeats` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    segments: Vec<PulseSegment>,
    repeats: u32,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>, repeats: u32) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Model("pulse sequence needs at least one segment".into()));
        }
        if repeats == 0 {
            return Err(Error::Model("pulse sequence repeat count must be >= 1".into()));
        }
        Ok(Self { segments, repeats })
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn repeats(&self) -> u32 {
        self.repeats
    }

    /// Duration of one pass through the segments.
    pub fn loop_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn total_duration(&self) -> f64 {
        self.repeats as f64 * self.loop_duration()
    }

    /// Single pass (repeat count 1).
    pub fn single_loop(&self) -> PulseSequence {
        PulseSequence {
            segments: self.segments.clone(),
            repeats: 1,
        }
    }

    /// All segments in execution order with their start times.
    pub fn timeline(&self) -> impl Iterator<Item = (f64, &PulseSegment)> + '_ {
        let per_loop = self.loop_duration();
        (0..self.repeats).flat_map(move |r| {
            let mut t = r as f64 * per_loop;
            self.segments.iter().map(move |s| {
                let start = t;
                t += s.duration;
                (start, s)
            })
        })
    }

    pub fn warnings(&self) -> Vec<String> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_pure_z() && s.detuning != 0.0)
            .map(|(k, _)| format!("segment {k} has zero Rabi frequency: rotation about z only"))
            .collect()
    }
}

/// Segment rotating the Bloch vector by exactly π: `T = π / (2|B|)`.
pub fn make_pi_pulse(rabi: f64, phase: f64, detuning: f64) -> Result<PulseSegment> {
    let field = rabi.hypot(detuning / 2.0);
    if !(field > 0.0) {
        return Err(Error::Model(
            "π-pulse needs a nonzero effective field |B|; rotation axis undefined".into(),
        ));
    }
    PulseSegment::new(rabi, phase, detuning, PI / (2.0 * field))
}

/// Off-resonant rotation gate: two π-pulses with phases `base` and `base + π`.
pub fn gate1_sequence(rabi: f64, detuning: f64, base_phase: f64) -> Result<PulseSequence> {
    if detuning == 0.0 {
        return Err(Error::Configuration(
            "rotation gate needs an off-resonant laser (detuning != 0); use the selective phase gate for resonant driving".into(),
        ));
    }
    PulseSequence::new(
        vec![
            make_pi_pulse(rabi, base_phase, detuning)?,
            make_pi_pulse(rabi, base_phase + PI, detuning)?,
        ],
        1,
    )
}

/// Resonant selective phase gate: two π-pulses with phases `phi0` and `-phi0`.
pub fn gate2_sequence(rabi: f64, phi0: f64) -> Result<PulseSequence> {
    gate2_sequence_with_offset(rabi, phi0, 0.0)
}

/// Selective phase gate with both pulse phases shifted by `offset`.
pub fn gate2_sequence_with_offset(rabi: f64, phi0: f64, offset: f64) -> Result<PulseSequence> {
    if !(rabi > 0.0) {
        return Err(Error::Model(format!(
            "selective phase gate needs Rabi frequency > 0, got {rabi}"
        )));
    }
    PulseSequence::new(
        vec![
            make_pi_pulse(rabi, offset + phi0, 0.0)?,
            make_pi_pulse(rabi, offset - phi0, 0.0)?,
        ],
        1,
    )
}

pub fn repeat_sequence(seq: &PulseSequence, n: u32) -> Result<PulseSequence> {
    if n == 0 {
        return Err(Error::Model("repeat count must be >= 1".into()));
    }
    let repeats = seq
        .repeats
        .checked_mul(n)
        .ok_or_else(|| Error::Model("repeat count overflow".into()))?;
    Ok(PulseSequence {
        segments: seq.segments.clone(),
        repeats,
    })
}
