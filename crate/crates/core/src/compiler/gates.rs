//! λ₈ and λ₅ blocks built from pairs, single pulses and DQ rotations.

use std::f64::consts::{FRAC_PI_2, PI};

use super::dq::{dq_synthesize, dq_synthesize_block, DqSynthesis};
use super::pairs::PairKind;
use super::schedule::{fmt_angle, rwa_product, Pulse, PulseSchedule};
use crate::algebra::{exp_generator_raw, phase_aligned_distance, wrap_angle, Mat2, Mat3, Unitary3, Vec3};
use crate::error::{Error, Result};
use crate::nv::{derive, intermediate, invert_theta5, DerivedQuantities, PhysParams};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Below this |wrap(π + 2φ)| the pair eigenbases coincide and the plain
/// four-pulse product is already e^{iφ₈λ₈}.
const ALIGNED_EPS: f64 = 1e-12;

fn dq_ket(axis: f64) -> nalgebra::Vector2<crate::algebra::C64> {
    let v: Vec3 = crate::algebra::equatorial_parity(axis);
    nalgebra::Vector2::new(v[0], v[1])
}

/// The DQ map |−φ⟩ → |π+φ⟩, |π−φ⟩ → |φ⟩ that carries the forward pair's
/// eigenbasis onto the reverse pair's.
fn alignment_map(phi: f64) -> Mat2 {
    let a = dq_ket(PI + phi) * dq_ket(-phi).adjoint();
    let b = dq_ket(phi) * dq_ket(PI - phi).adjoint();
    a + b
}

fn inverse_pulses(s: &DqSynthesis, dq: &DerivedQuantities) -> Vec<Pulse> {
    s.factors
        .iter()
        .rev()
        .flat_map(|&(k, th)| k.pulses(-th, 0.0, dq))
        .collect()
}

/// e^{iφ₈λ₈} from a reverse pair and a forward pair of angle θ = φ₈/√3.
///
/// The reverse pair puts its phase on |φ⟩ while the forward pair puts it on
/// |−φ⟩. Only when these eigenbases match (φ = π/2) do the two pairs combine
/// into a pure λ₈ phase. Otherwise the forward pair is conjugated by a
/// synthesized DQ map Y so that its eigenbasis lines up. Time order is
/// Y⁻¹, forward, Y, reverse.
pub fn lambda8_gate(phi8: f64, params: &PhysParams) -> Result<(PulseSchedule, Unitary3)> {
    let dq = derive(params)?;
    let name = format!("lambda8({})", fmt_angle(phi8));
    let mut s = PulseSchedule::empty(*params);
    let theta = phi8 / SQRT3;
    if theta != 0.0 {
        let fwd = PairKind::Forward.pulses(theta, 0.0, &dq);
        let rev = PairKind::Reverse.pulses(theta, 0.0, &dq);
        if wrap_angle(PI + 2.0 * dq.phi).abs() < ALIGNED_EPS {
            s.pulses.extend(fwd);
            s.pulses.extend(rev);
        } else {
            let y = dq_synthesize(&alignment_map(dq.phi), params).map_err(|e| e.in_block(&name))?;
            s.pulses.extend(inverse_pulses(&y, &dq));
            s.pulses.extend(fwd);
            s.pulses.extend(y.schedule.pulses.iter().copied());
            s.pulses.extend(rev);
        }
    }
    let u = rwa_product(&s.pulses, params);
    let want = exp_generator_raw(8, phi8);
    let err = (u - want).norm();
    if err > 1e-10 {
        return Err(Error::Synthesis(format!("λ₈ block off by {err:.2e}")).in_block(name));
    }
    Ok((s.labeled(name), Unitary3::trusted(u)))
}

/// Frame change relating a single α = 0 pulse to a λ₅ rotation:
/// U(t,0) = D·K·e^{iθ₅λ₅}·K·D† with D = diag(1, i, −i) and K = e^{−i(π+ξ)/2·λ₂}.
fn lambda5_frames(xi: f64) -> (Mat3, Mat3) {
    let d = phase_frame_matrix();
    let k_inv = exp_generator_raw(2, (PI + xi) / 2.0);
    // e^{iθ₅λ₅} = L·U(t,0)·R
    let left = k_inv * d.adjoint();
    let right = d * k_inv;
    (left, right)
}

/// e^{iθ₅λ₅} as DQ rotation, single α = 0 pulse of length t*, DQ rotation.
///
/// Angles beyond π/2 are split into equal segments; a negative angle is
/// obtained by conjugating with diag(−1, −1, 1), which flips the sign of λ₅.
pub fn lambda5_gate(theta5: f64, params: &PhysParams) -> Result<(PulseSchedule, Unitary3)> {
    let name = format!("lambda5({})", fmt_angle(theta5));
    lambda5_inner(theta5, params)
        .map_err(|e| e.in_block(name.clone()))
        .map(|(s, u)| (s.labeled(name), u))
}

fn lambda5_inner(theta5: f64, params: &PhysParams) -> Result<(PulseSchedule, Unitary3)> {
    if !(theta5.is_finite() && theta5.abs() < 2.0 * PI) {
        return Err(Error::Domain(format!("λ₅ angle must lie in (−2π, 2π), got {theta5}")));
    }
    derive(params)?;
    let mut s = PulseSchedule::empty(*params);
    if theta5 == 0.0 {
        return Ok((s, Unitary3::identity()));
    }
    let mag = theta5.abs();
    let segments = ((mag / FRAC_PI_2) - 1e-12).ceil().max(1.0) as usize;
    let seg = mag / segments as f64;
    let t_star = invert_theta5(seg.min(FRAC_PI_2), params)?;
    let xi = intermediate(t_star, params).xi;
    let (left, right) = lambda5_frames(xi);
    let q = if theta5 < 0.0 {
        exp_generator_raw(3, PI)
    } else {
        Mat3::identity()
    };
    let first = right * q.adjoint();
    let last = q * left;

    let a = dq_synthesize_block(&first, params)?;
    let mid = if segments > 1 {
        Some(dq_synthesize_block(&(right * left), params)?)
    } else {
        None
    };
    let b = dq_synthesize_block(&last, params)?;

    let pulse = Pulse::raw(t_star, 0.0);
    let mut gamma = a.schedule.global_phase + b.schedule.global_phase;
    s.pulses.extend(a.schedule.pulses.iter().copied());
    for k in 0..segments {
        if k > 0 {
            let m = mid.as_ref().expect("middle block exists for several segments");
            s.pulses.extend(m.schedule.pulses.iter().copied());
            gamma += m.schedule.global_phase;
        }
        s.pulses.push(pulse);
    }
    s.pulses.extend(b.schedule.pulses.iter().copied());
    s.global_phase = wrap_angle(gamma);

    let u = rwa_product(&s.pulses, params);
    let want = exp_generator_raw(5, theta5);
    let (err, _) = phase_aligned_distance(&want, &u);
    let direct = (u * crate::algebra::cis(s.global_phase) - want).norm();
    if err > 1e-9 || direct > 1e-9 {
        return Err(Error::Synthesis(format!("λ₅ block off by {:.2e}", err.max(direct))));
    }
    Ok((s, Unitary3::trusted(u)))
}

/// Distance (up to global phase) between U(t, 0) and
/// F·e^{iκλ₂}·e^{iθ₅(t)λ₅}·e^{iκλ₂}·F†, where F is diag(1, i, −i) when
/// `phase_frame` is set and the identity otherwise.
pub fn lambda5_frame_residual(kappa: f64, t: f64, phase_frame: bool, params: &PhysParams) -> f64 {
    let f = intermediate(t, params);
    let d = if phase_frame {
        phase_frame_matrix()
    } else {
        Mat3::identity()
    };
    let k = exp_generator_raw(2, kappa);
    let u = crate::nv::propagator_raw(t, 0.0, params);
    let model = d * k * exp_generator_raw(5, f.theta5) * k * d.adjoint();
    phase_aligned_distance(&u, &model).0
}

fn phase_frame_matrix() -> Mat3 {
    use crate::algebra::c;
    let mut d = Mat3::zeros();
    d[(0, 0)] = c(1.0, 0.0);
    d[(1, 1)] = c(0.0, 1.0);
    d[(2, 2)] = c(0.0, -1.0);
    d
}
