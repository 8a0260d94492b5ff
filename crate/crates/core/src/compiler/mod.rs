//! From an SU(3) target to a verified pulse schedule.
//!
//! A target S (G with its determinant phase removed) is factored as
//! U_A·e^{iθ₅λ₅}·U_B·e^{iφ₈λ₈}. Each factor becomes one block of pulses,
//! emitted in time order λ₈, U_B, λ₅, U_A. The DQ blocks U_A and U_B are
//! synthesized together with their |0⟩ entry, so every block is exact up to
//! a scalar and the scalars are collected into the schedule's global phase.

mod dq;
mod gates;
mod pairs;
mod schedule;
mod su3;

pub use dq::{dq_synthesize, dq_synthesize_block, factor_cap, DqSynthesis, AXIS_EPS};
pub use gates::{lambda5_frame_residual, lambda5_gate, lambda8_gate};
pub use pairs::{pair_forward, pair_reverse, DqRotation, PairKind};
pub use schedule::{fmt_angle, rwa_product, ProvenanceBlock, Pulse, PulseSchedule};
pub use su3::{decompose_su3, reconstruct, Su3Angles};

use crate::algebra::{cis, trace_overlap, wrap_angle, Mat3, Unitary3};
use crate::error::{Error, Result};
use crate::nv::{derive, PhysParams};

/// Minimum RWA playback fidelity a compiled schedule must reach.
pub const COMPILE_FIDELITY: f64 = 1.0 - 1e-8;

/// Upper bound on the pulses `compile` can emit for the given parameters.
///
/// With N the free-mode factor cap and N + 1 the exact-mode cap, each DQ
/// block has at most 2(N+1) pulses, λ₅ at most 4(N+1) + 1 and λ₈ at most
/// 4N + 4, for a total of 8(N+1) + 4N + 5.
pub fn max_pulse_count(params: &PhysParams) -> Result<usize> {
    let n = factor_cap(derive(params)?.phi);
    Ok(8 * (n + 1) + 4 * n + 5)
}

/// Summary of one compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub schedule: PulseSchedule,
    pub angles: Su3Angles,
    /// Phase of det G removed before factoring.
    pub det_phase: f64,
    /// |Tr(G†P)|/3 for the RWA playback P.
    pub fidelity: f64,
}

/// Compile G into pulses. See [`compile_detailed`] for the angle set.
pub fn compile(g: &Unitary3, params: &PhysParams) -> Result<PulseSchedule> {
    compile_detailed(g, params).map(|c| c.schedule)
}

pub fn compile_detailed(g: &Unitary3, params: &PhysParams) -> Result<Compiled> {
    derive(params)?;
    let (angles, det_phase) = decompose_su3(g.matrix()).map_err(|e| e.in_block("decompose"))?;
    let mut s = PulseSchedule::empty(*params);
    s.global_phase = det_phase;

    if angles.phi8 != 0.0 {
        let (l8, _) = lambda8_gate(angles.phi8, params)?;
        s.append(&l8);
    }
    append_dq(&mut s, &angles.block_b(), "dq_b", params)?;
    if angles.theta5 != 0.0 {
        let (l5, _) = lambda5_gate(angles.theta5, params)?;
        s.append(&l5);
    }
    append_dq(&mut s, &angles.block_a(), "dq_a", params)?;

    let playback = rwa_product(&s.pulses, params);
    let fidelity = trace_overlap(g.matrix(), &playback);
    let direct = (playback * cis(s.global_phase) - g.matrix()).norm();
    if fidelity < COMPILE_FIDELITY || direct > 1e-8 {
        return Err(Error::Synthesis(format!(
            "playback fidelity {fidelity:.12} (phase-corrected error {direct:.2e}) misses the target"
        ))
        .in_block("compile"));
    }
    s.target = Some(*g);
    Ok(Compiled {
        schedule: s,
        angles,
        det_phase,
        fidelity,
    })
}

fn append_dq(s: &mut PulseSchedule, block: &Mat3, name: &str, params: &PhysParams) -> Result<()> {
    let syn = dq_synthesize_block(block, params).map_err(|e| e.in_block(name))?;
    if syn.schedule.is_empty() {
        // Trivial block: only its scalar survives.
        s.global_phase = wrap_angle(s.global_phase + syn.schedule.global_phase);
        return Ok(());
    }
    s.append(&syn.schedule.labeled(name));
    Ok(())
}
