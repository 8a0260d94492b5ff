//! Schedule playback: exact RWA products and lab-frame integration of the
//! full time-dependent Hamiltonian, plus the intermediate-function sweep.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use nalgebra::SVector;
use ode_solvers::dop_shared::{IntegrationError, OutputType};
use ode_solvers::{Dopri5, System};
use serde::{Deserialize, Serialize};

use crate::algebra::{c, cis, trace_overlap, unitarity_defect, Mat3, MINUS, PLUS, ZERO};
use crate::compiler::{rwa_product, PulseSchedule};
use crate::error::{Error, Result};
use crate::nv::{derive, intermediate, propagator_raw, PhysParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Rwa,
    Lab,
    Both,
}

impl std::str::FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rwa" => Ok(Frame::Rwa),
            "lab" => Ok(Frame::Lab),
            "both" => Ok(Frame::Both),
            other => Err(Error::Argument(format!(
                "unknown frame `{other}` (expected rwa, lab or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub frame: Frame,
    /// Relative (and absolute) error target of the integrator.
    pub tolerance: f64,
    /// Step cap in seconds; defaults to one twentieth of the carrier period.
    pub max_step: Option<f64>,
    /// Project the propagator back onto U(3) every half carrier period.
    pub renormalize: bool,
    /// Cap on accepted plus rejected integrator steps over the whole run.
    #[serde(default)]
    pub max_steps: Option<u64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            frame: Frame::Rwa,
            tolerance: 1e-10,
            max_step: None,
            renormalize: true,
            max_steps: None,
        }
    }
}

impl SimOptions {
    pub fn lab(tolerance: f64) -> Self {
        SimOptions {
            frame: Frame::Lab,
            tolerance,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-13..=1e-6).contains(&self.tolerance) {
            return Err(Error::Argument(format!(
                "integrator tolerance {} is outside [1e-13, 1e-6]",
                self.tolerance
            )));
        }
        if self.max_steps == Some(0) {
            return Err(Error::Argument("step budget must be positive".into()));
        }
        if let Some(h) = self.max_step {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Argument(format!("max step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub frame: Frame,
    /// Final propagator; for lab runs it is given in the interaction picture
    /// with respect to D·S_z² at the final time.
    #[serde(with = "crate::io::mat3_serde")]
    pub final_unitary: Mat3,
    /// Propagator after each pulse, in the frame it was computed in.
    #[serde(with = "crate::io::mat3_vec_serde")]
    pub checkpoints: Vec<Mat3>,
    /// |Tr(target†U)|/3 when the schedule carries a target.
    pub fidelity: Option<f64>,
    /// Both frames only: the RWA and interaction-picture lab propagators.
    #[serde(with = "crate::io::opt_mat3_serde", default, skip_serializing_if = "Option::is_none")]
    pub rwa_unitary: Option<Mat3>,
    #[serde(with = "crate::io::opt_mat3_serde", default, skip_serializing_if = "Option::is_none")]
    pub lab_unitary: Option<Mat3>,
    /// Both frames only: ‖U_rwa − U_lab‖_F.
    pub rwa_lab_distance: Option<f64>,
    /// Largest ‖U†U − I‖_F seen at a checkpoint.
    pub unitarity_drift: f64,
    pub renormalized: bool,
    pub steps: u64,
}

fn fidelity_vs_target(s: &PulseSchedule, u: &Mat3) -> Option<f64> {
    s.target.as_ref().map(|t| trace_overlap(t.matrix(), u))
}

/// Exact RWA playback; later pulses multiply from the left.
pub fn play_rwa(schedule: &PulseSchedule) -> Result<SimReport> {
    schedule.validate()?;
    let p = &schedule.params;
    let mut u = Mat3::identity();
    let mut checkpoints = Vec::with_capacity(schedule.len());
    for pulse in &schedule.pulses {
        u = propagator_raw(pulse.duration, pulse.phase, p) * u;
        checkpoints.push(u);
    }
    let drift = checkpoints.iter().map(unitarity_defect).fold(0.0, f64::max);
    Ok(SimReport {
        frame: Frame::Rwa,
        fidelity: fidelity_vs_target(schedule, &u),
        final_unitary: u,
        checkpoints,
        rwa_unitary: None,
        lab_unitary: None,
        rwa_lab_distance: None,
        unitarity_drift: drift,
        renormalized: false,
        steps: schedule.len() as u64,
    })
}

type State = SVector<f64, 18>;

/// i·dU/dt = H(t)·U with H = D·S_z² + μB·S_z + Ω·cos(Dt − α)·S_x in the
/// parity basis, U flattened row-major as (re, im) pairs.
struct LabSystem {
    d: f64,
    mu_b: f64,
    omega: f64,
    alpha: f64,
}

impl System<f64, State> for LabSystem {
    fn system(&self, t: f64, y: &State, dy: &mut State) {
        let drive = self.omega * (self.d * t - self.alpha).cos();
        for col in 0..3 {
            let u = |row: usize| c(y[2 * (3 * row + col)], y[2 * (3 * row + col) + 1]);
            let (up, um, u0) = (u(PLUS), u(MINUS), u(ZERO));
            // H acting on the column (u₊, u₋, u₀).
            let hp = up * self.d + um * self.mu_b + u0 * drive;
            let hm = um * self.d + up * self.mu_b;
            let h0 = up * drive;
            for (row, h) in [(PLUS, hp), (MINUS, hm), (ZERO, h0)] {
                // dU/dt = −i·H·U
                dy[2 * (3 * row + col)] = h.im;
                dy[2 * (3 * row + col) + 1] = -h.re;
            }
        }
    }
}

fn to_state(m: &Mat3) -> State {
    State::from_fn(|i, _| {
        let z = m[(i / 6, (i % 6) / 2)];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

fn from_state(y: &State) -> Mat3 {
    Mat3::from_fn(|r, col| c(y[2 * (3 * r + col)], y[2 * (3 * r + col) + 1]))
}

/// Nearest unitary (polar factor).
fn polar(m: &Mat3) -> Mat3 {
    let svd = m.svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}

fn integrate_span(
    sys: LabSystem,
    t0: f64,
    t1: f64,
    u: &Mat3,
    opts: &SimOptions,
    h_max: f64,
    budget: u64,
) -> Result<(Mat3, u64)> {
    let mut solver = Dopri5::from_param(
        sys,
        t0,
        t1,
        t1 - t0,
        to_state(u),
        opts.tolerance,
        opts.tolerance,
        0.9,
        0.04,
        0.2,
        10.0,
        h_max,
        0.0,
        u32::MAX - 1,
        u32::try_from(budget).unwrap_or(u32::MAX),
        OutputType::Sparse,
    );
    let stats = solver.integrate().map_err(|e| {
        Error::Integration(match e {
            IntegrationError::MaxNumStepReached { x, n_step } => {
                format!("step limit {n_step} reached at t = {x:.6e} s")
            }
            IntegrationError::StepSizeUnderflow { x } => format!("step size underflow at t = {x:.6e} s"),
            IntegrationError::StiffnessDetected { x } => format!("stiffness detected at t = {x:.6e} s"),
        })
    })?;
    let y = solver
        .y_out()
        .last()
        .ok_or_else(|| Error::Integration("integrator produced no output".into()))?;
    Ok((
        from_state(y),
        u64::from(stats.accepted_steps) + u64::from(stats.rejected_steps),
    ))
}

/// Lab-frame propagator, checkpoints, drift and step count, before the
/// frame change. With renormalization the propagator is projected onto U(3)
/// every half carrier period and the drift is the largest defect seen before
/// a projection; without it the drift is that of the raw integration.
fn integrate_lab(schedule: &PulseSchedule, opts: &SimOptions) -> Result<(Mat3, Vec<Mat3>, f64, u64)> {
    let p = &schedule.params;
    let period = TAU / p.d;
    let h_max = opts.max_step.unwrap_or(period / 20.0).min(period / 20.0);
    let mut u = Mat3::identity();
    let mut t = 0.0;
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut drift: f64 = 0.0;
    let mut steps = 0u64;
    for (k, pulse) in schedule.pulses.iter().enumerate() {
        let t_end = t + pulse.duration;
        let chunk = if opts.renormalize { period / 2.0 } else { pulse.duration };
        let mut t0 = t;
        while t0 < t_end {
            let t1 = if t_end - t0 <= chunk * (1.0 + 1e-9) {
                t_end
            } else {
                t0 + chunk
            };
            let sys = LabSystem {
                d: p.d,
                mu_b: p.mu_b,
                omega: p.omega,
                alpha: pulse.phase,
            };
            let budget = match opts.max_steps {
                Some(cap) if steps >= cap => {
                    return Err(Error::Integration(format!("pulse {k}: step budget {cap} exhausted")))
                }
                Some(cap) => cap - steps,
                None => u64::MAX,
            };
            let (next, n) = integrate_span(sys, t0, t1, &u, opts, h_max, budget)
                .map_err(|e| Error::Integration(format!("pulse {k}: {}", e.root())))?;
            steps += n;
            drift = drift.max(unitarity_defect(&next));
            u = if opts.renormalize { polar(&next) } else { next };
            t0 = t1;
        }
        checkpoints.push(u);
        t = t_end;
    }
    Ok((u, checkpoints, drift, steps))
}

/// Integrate the full Hamiltonian and return the interaction-picture result.
pub fn play_lab(schedule: &PulseSchedule, opts: &SimOptions) -> Result<SimReport> {
    schedule.validate()?;
    opts.validate()?;
    let p = &schedule.params;
    let (u_lab, checkpoints, drift, steps) = integrate_lab(schedule, opts)?;
    let t_total = schedule.total_duration();
    let mut frame = Mat3::identity();
    let rot = cis(p.d * t_total);
    frame[(PLUS, PLUS)] = rot;
    frame[(MINUS, MINUS)] = rot;
    let u = frame * u_lab;
    if !crate::algebra::is_finite(&u) {
        return Err(Error::Integration("lab-frame propagator is not finite".into()));
    }
    Ok(SimReport {
        frame: Frame::Lab,
        fidelity: fidelity_vs_target(schedule, &u),
        final_unitary: u,
        checkpoints,
        rwa_unitary: None,
        lab_unitary: None,
        rwa_lab_distance: None,
        unitarity_drift: drift,
        renormalized: opts.renormalize,
        steps,
    })
}

/// Run the frame(s) requested in `opts`.
pub fn simulate(schedule: &PulseSchedule, opts: &SimOptions) -> Result<SimReport> {
    match opts.frame {
        Frame::Rwa => play_rwa(schedule),
        Frame::Lab => play_lab(schedule, opts),
        Frame::Both => {
            let rwa = play_rwa(schedule)?;
            let mut lab = play_lab(schedule, opts)?;
            lab.frame = Frame::Both;
            lab.rwa_lab_distance = Some((rwa.final_unitary - lab.final_unitary).norm());
            lab.rwa_unitary = Some(rwa.final_unitary);
            lab.lab_unitary = Some(lab.final_unitary);
            Ok(lab)
        }
    }
}

/// 1 − |Tr(U_rwa† U_lab)|/3.
pub fn rwa_error(schedule: &PulseSchedule, opts: &SimOptions) -> Result<f64> {
    let rwa = rwa_product(&schedule.pulses, &schedule.params);
    let lab = play_lab(schedule, opts)?;
    Ok((1.0 - trace_overlap(&rwa, &lab.final_unitary)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ratio: f64,
    pub t_over_tprime: f64,
    pub xi_over_pi: f64,
    pub theta5_over_pi: f64,
}

/// ξ(t) and θ₅(t) over t ∈ [0, T̄′] for each drive ratio Ω/μB.
pub fn sweep_intermediate(ratios: &[f64], points: usize) -> Result<Vec<SweepRow>> {
    if points < 2 {
        return Err(Error::Argument("a sweep needs at least 2 points".into()));
    }
    let mut rows = Vec::with_capacity(ratios.len() * points);
    for &ratio in ratios {
        if !(ratio.is_finite() && ratio >= 2.0) {
            return Err(Error::Domain(format!("protocol requires Ω ≥ 2μB, got ratio {ratio}")));
        }
        let p = PhysParams::new(1.0, 1.0, ratio)?;
        let tp = derive(&p)?.t_prime;
        for k in 0..points {
            let x = k as f64 / (points - 1) as f64;
            let f = intermediate(x * tp, &p);
            rows.push(SweepRow {
                ratio,
                t_over_tprime: x,
                xi_over_pi: f.xi / PI,
                theta5_over_pi: f.theta5 / PI,
            });
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: &str = "ratio,t_over_Tprime,xi_over_pi,theta5_over_pi";

/// CSV with a header row and LF line endings.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?}",
            r.ratio, r.t_over_tprime, r.xi_over_pi, r.theta5_over_pi
        );
    }
    out
}
