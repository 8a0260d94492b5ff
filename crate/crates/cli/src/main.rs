use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nvq3_cli::config::{write_output, RunConfig};
use nvq3_cli::{cmd_compile, cmd_simulate, cmd_sweep, cmd_tomography, exit_code, sim_options};
use nvq3_core::nv::PhysParams;
use nvq3_core::simulator::Frame;
use nvq3_core::tomography::Shots;
use nvq3_core::Result;

/// Qutrit gate compiler, pulse simulator and tomography for the NV-center spin-1 ground state.
#[derive(Parser)]
#[command(name = "nvq3", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command; flags override the config file.
#[derive(Args)]
struct Common {
    /// RunConfig JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampling; falls back to the config, then NVQ3_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Zero-field splitting D in rad/s.
    #[arg(long = "D", global = true)]
    d: Option<f64>,
    /// Zeeman splitting μB in rad/s.
    #[arg(long = "muB", global = true)]
    mu_b: Option<f64>,
    /// Drive amplitude Ω in rad/s.
    #[arg(long = "Omega", global = true, conflicts_with = "ratio")]
    omega: Option<f64>,
    /// Drive amplitude as a multiple of μB.
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// Integrator tolerance for lab-frame runs.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the effective configuration to this path and continue.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a target gate into a pulse schedule.
    Compile {
        /// identity, lambda5:θ, lambda8:θ, dq-rotation:axis,θ, random:seed, or a matrix file.
        target: String,
        /// Schedule JSON path (default stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Report path (default stderr).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Play a schedule in the rotating frame, the lab frame or both.
    Simulate {
        schedule: PathBuf,
        #[arg(long, default_value = "rwa")]
        frame: Frame,
        /// Largest integrator step in seconds.
        #[arg(long)]
        max_step: Option<f64>,
        /// Cap on integrator steps.
        #[arg(long)]
        max_steps: Option<u64>,
        /// Skip the periodic projection onto U(3).
        #[arg(long)]
        no_renormalize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate ξ(t) and θ₅(t) over [0, T̄′] as CSV.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate and invert the eight-setting tomography protocol.
    Tomography {
        /// zero, plus, minus, mixed, random:seed, or a density-matrix file.
        state: String,
        /// Shots per setting, or `exact`.
        #[arg(long, default_value = "exact")]
        shots: Shots,
        /// Measure through compiled pulse schedules instead of ideal unitaries.
        #[arg(long)]
        via_pulses: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn resolve_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut p = cfg.params;
    p.d = c.d.unwrap_or(p.d);
    p.mu_b = c.mu_b.unwrap_or(p.mu_b);
    p.omega = c.omega.unwrap_or(p.omega);
    if let Some(r) = c.ratio {
        p.omega = r * p.mu_b;
    }
    cfg.params = PhysParams::new(p.d, p.mu_b, p.omega)?;
    cfg.seed = c.seed.or(cfg.seed);
    if let Some(t) = c.tolerance {
        cfg.tolerances.integrator = t;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = resolve_config(&cli.common)?;
    if let Some(path) = &cli.common.save_config {
        write_output(Some(path), &cfg.to_json()?)?;
    }
    match cli.command {
        Command::Compile { target, output, report } => {
            cfg.outputs.schedule = output.or(cfg.outputs.schedule);
            cfg.outputs.report = report.or(cfg.outputs.report);
            let text = cmd_compile(&cfg, &target)?;
            match &cfg.outputs.report {
                Some(p) => write_output(Some(p), &text),
                None => {
                    eprint!("{text}");
                    Ok(())
                }
            }
        }
        Command::Simulate {
            schedule,
            frame,
            max_step,
            max_steps,
            no_renormalize,
            output,
        } => {
            cfg.outputs.simulation = output.or(cfg.outputs.simulation);
            cfg.tolerances.max_steps = max_steps.or(cfg.tolerances.max_steps);
            if no_renormalize {
                cfg.tolerances.renormalize = false;
            }
            cmd_simulate(&cfg, &schedule, &sim_options(&cfg, frame, max_step))
        }
        Command::Sweep { ratios, points, output } => {
            cfg.outputs.sweep = output.or(cfg.outputs.sweep);
            cmd_sweep(&cfg, &ratios, points)
        }
        Command::Tomography {
            state,
            shots,
            via_pulses,
            output,
        } => {
            cfg.outputs.tomography = output.or(cfg.outputs.tomography);
            cmd_tomography(&cfg, &state, shots, via_pulses)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
