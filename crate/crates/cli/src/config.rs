//! Run configuration: physical parameters, seed, tolerances and output paths.

use std::path::{Path, PathBuf};

use nvq3_core::io::{self, FILE_UNITARY_TOL, SCHEMA};
use nvq3_core::nv::PhysParams;
use nvq3_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Environment variable consulted when neither a flag nor the config sets a seed.
pub const SEED_ENV: &str = "NVQ3_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Lab-frame integrator tolerance.
    pub integrator: f64,
    /// Allowed ‖U†U − I‖_F for unitaries read from matrix files.
    pub unitarity: f64,
    /// Optional cap on lab-frame integrator steps.
    pub max_steps: Option<u64>,
    /// Project the lab-frame propagator back onto U(3) as it is integrated.
    pub renormalize: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            integrator: 1e-10,
            unitarity: FILE_UNITARY_TOL,
            max_steps: None,
            renormalize: true,
        }
    }
}

/// Where each command writes its primary output; `None` means stdout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub schedule: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub simulation: Option<PathBuf>,
    pub sweep: Option<PathBuf>,
    pub tomography: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub params: PhysParams,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: SCHEMA.into(),
            params: PhysParams::default(),
            seed: None,
            tolerances: Tolerances::default(),
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let cfg: RunConfig = io::from_json(&text)?;
        cfg.params.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        io::to_json(self)
    }

    /// Seed from the config, else from the environment, else 0.
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Argument(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
            Err(_) => Ok(0),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

/// Write to `path`, or to stdout when there is none.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Argument(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Argument(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_field_for_field() {
        let cfg = RunConfig {
            params: PhysParams::new(1.2345678901234567e10, 0.1, 0.30000000000000004).unwrap(),
            seed: Some(u64::MAX),
            tolerances: Tolerances {
                integrator: 3e-11,
                unitarity: 1e-9,
                max_steps: Some(12),
                renormalize: false,
            },
            outputs: Outputs {
                schedule: Some("a/s.json".into()),
                tomography: Some("t.json".into()),
                ..Outputs::default()
            },
            ..RunConfig::default()
        };
        let text = cfg.to_json().unwrap();
        let back: RunConfig = io::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn partial_files_take_defaults() {
        let cfg: RunConfig = io::from_json(r#"{"schema": "nvq3/1", "seed": 4}"#).unwrap();
        assert_eq!(cfg.seed, Some(4));
        assert_eq!(cfg.params, PhysParams::default());
        assert!(io::from_json::<RunConfig>(r#"{"schema": "nvq3/1", "sed": 4}"#).is_err());
        assert!(io::from_json::<RunConfig>(r#"{"seed": 4}"#).is_err());
    }
}
