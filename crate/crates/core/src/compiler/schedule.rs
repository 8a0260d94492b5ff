use serde::{Deserialize, Serialize};

use crate::algebra::{wrap_angle, Mat3, Unitary3};
use crate::error::{Error, Result};
use crate::nv::{propagator_raw, PhysParams};

/// A constant-amplitude pulse at the carrier frequency D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    #[serde(rename = "duration_s")]
    pub duration: f64,
    /// Carrier phase α, kept in (−π, π].
    #[serde(rename = "phase_rad")]
    pub phase: f64,
}

impl Pulse {
    pub fn new(duration: f64, phase: f64) -> Result<Self> {
        let p = Pulse {
            duration,
            phase: wrap_angle(phase),
        };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn raw(duration: f64, phase: f64) -> Self {
        Pulse {
            duration,
            phase: wrap_angle(phase),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Validation(format!(
                "pulse duration must be positive, got {}",
                self.duration
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::Validation("pulse phase must be finite".into()));
        }
        Ok(())
    }
}

/// Names a contiguous run of pulses `[start, end)` after the gate it realizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceBlock {
    pub block: String,
    pub pulse_range: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub params: PhysParams,
    pub pulses: Vec<Pulse>,
    /// Target = e^{i·global_phase} × playback. Bookkeeping only.
    pub global_phase: f64,
    pub target: Option<Unitary3>,
    pub provenance: Vec<ProvenanceBlock>,
}

impl PulseSchedule {
    pub fn empty(params: PhysParams) -> Self {
        PulseSchedule {
            params,
            pulses: Vec::new(),
            global_phase: 0.0,
            target: None,
            provenance: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().fold(0.0, |t, p| t + p.duration)
    }

    /// Append `other` after the pulses already present, shifting its provenance.
    pub fn append(&mut self, other: &PulseSchedule) {
        let off = self.pulses.len();
        self.pulses.extend_from_slice(&other.pulses);
        self.provenance.extend(other.provenance.iter().map(|b| ProvenanceBlock {
            block: b.block.clone(),
            pulse_range: [b.pulse_range[0] + off, b.pulse_range[1] + off],
        }));
        self.global_phase = wrap_angle(self.global_phase + other.global_phase);
    }

    /// Label every pulse currently in the schedule as one block.
    pub(crate) fn labeled(mut self, name: impl Into<String>) -> Self {
        self.provenance = vec![ProvenanceBlock {
            block: name.into(),
            pulse_range: [0, self.pulses.len()],
        }];
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (i, p) in self.pulses.iter().enumerate() {
            p.validate().map_err(|e| Error::Validation(format!("pulse {i}: {e}")))?;
        }
        if !self.global_phase.is_finite() {
            return Err(Error::Validation("global phase must be finite".into()));
        }
        for b in &self.provenance {
            let [s, e] = b.pulse_range;
            if s > e || e > self.pulses.len() {
                return Err(Error::Validation(format!(
                    "provenance block `{}` has range [{s}, {e}) outside 0..{}",
                    b.block,
                    self.pulses.len()
                )));
            }
        }
        Ok(())
    }
}

/// RWA playback: ordered product of exact propagators, later pulses on the left.
pub fn rwa_product(pulses: &[Pulse], params: &PhysParams) -> Mat3 {
    pulses.iter().fold(Mat3::identity(), |acc, p| {
        propagator_raw(p.duration, p.phase, params) * acc
    })
}

/// Format an angle for block names: up to 12 decimals, trailing zeros trimmed.
pub fn fmt_angle(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_string(),
        other => other.to_string(),
    }
}
