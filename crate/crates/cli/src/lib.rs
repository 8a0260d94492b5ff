//! Command implementations behind the `nvq3` binary.

pub mod config;
pub mod target;

use std::fmt::Write as _;
use std::path::Path;

use nvq3_core::algebra::Unitary3;
use nvq3_core::compiler::{compile_detailed, max_pulse_count, Compiled, PulseSchedule};
use nvq3_core::io::{self, TomographyReport};
use nvq3_core::nv::derive;
use nvq3_core::simulator::{play_rwa, simulate, sweep_csv, sweep_intermediate, Frame, SimOptions};
use nvq3_core::tomography::{build_settings, measure, reconstruct, Shots};
use nvq3_core::{Error, Result};

use config::{read_text, write_output, RunConfig};

/// Process exit status for a failed command.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Block { .. } | Error::Synthesis(_) | Error::Decomposition(_) => 3,
        Error::Integration(_) => 4,
        Error::Reconstruction(_) => 5,
        _ => 2,
    }
}

/// Human-readable summary of a compilation.
pub fn compile_report(label: &str, c: &Compiled, bound: usize) -> String {
    let a = &c.angles;
    let s = &c.schedule;
    let mut out = String::new();
    let _ = writeln!(out, "target              {label}");
    // Adding 0.0 prints −0 as 0.
    let names = ["delta", "epsilon", "zeta", "theta5", "a", "b", "c", "phi8"];
    let angles: Vec<String> = names
        .iter()
        .zip(a.to_array())
        .map(|(n, x)| format!("{n}={:?}", x + 0.0))
        .collect();
    let _ = writeln!(out, "angles (rad)        {}", angles.join(" "));
    let _ = writeln!(out, "determinant phase   {:?}", c.det_phase + 0.0);
    let _ = writeln!(out, "global phase        {:?}", s.global_phase + 0.0);
    let _ = writeln!(out, "pulse count         {} (bound {bound})", s.len());
    let _ = writeln!(out, "total duration      {:e} s", s.total_duration());
    let _ = writeln!(out, "predicted fidelity  {:?}", c.fidelity);
    for b in &s.provenance {
        let _ = writeln!(
            out,
            "block               {} pulses [{}, {})",
            b.block, b.pulse_range[0], b.pulse_range[1]
        );
    }
    out
}

pub fn cmd_compile(cfg: &RunConfig, target: &str) -> Result<String> {
    derive(&cfg.params)?;
    let g = target::parse_target(target, cfg.tolerances.unitarity)?;
    let compiled = compile_detailed(&g, &cfg.params)?;
    let bound = max_pulse_count(&cfg.params)?;
    write_output(cfg.outputs.schedule.as_deref(), &io::to_json(&compiled.schedule)?)?;
    Ok(compile_report(target, &compiled, bound))
}

pub fn sim_options(cfg: &RunConfig, frame: Frame, max_step: Option<f64>) -> SimOptions {
    SimOptions {
        frame,
        tolerance: cfg.tolerances.integrator,
        max_step,
        renormalize: cfg.tolerances.renormalize,
        max_steps: cfg.tolerances.max_steps,
    }
}

pub fn cmd_simulate(cfg: &RunConfig, schedule: &Path, opts: &SimOptions) -> Result<()> {
    opts.validate()?;
    let s: PulseSchedule = io::from_json(&read_text(schedule)?)?;
    let report = simulate(&s, opts)?;
    write_output(cfg.outputs.simulation.as_deref(), &io::to_tagged_json(&report)?)
}

pub fn cmd_sweep(cfg: &RunConfig, ratios: &[f64], points: usize) -> Result<()> {
    let rows = sweep_intermediate(ratios, points)?;
    write_output(cfg.outputs.sweep.as_deref(), &sweep_csv(&rows))
}

/// Run the eight-setting protocol on `state`. With `via_pulses` every setting
/// is compiled and its RWA playback is used as the measurement unitary.
pub fn cmd_tomography(cfg: &RunConfig, state: &str, shots: Shots, via_pulses: bool) -> Result<()> {
    let rho = target::parse_state(state)?;
    let mut settings = build_settings(&cfg.params)?;
    if via_pulses {
        for s in &mut settings {
            let played = play_rwa(&s.compile(&cfg.params)?)?.final_unitary;
            s.unitary = Unitary3::new(played)?;
        }
    }
    let seed = cfg.resolved_seed()?;
    let data = measure(&rho, &settings, shots, seed)?;
    let result = reconstruct(&data, &settings, Some(&rho))?;
    write_output(
        cfg.outputs.tomography.as_deref(),
        &io::to_json(&TomographyReport::new(&data, &result))?,
    )
}
