//! JSON interchange: versioned files for schedules, matrices, states and reports.
//!
//! Complex matrices are written as 3×3 nested `[re, im]` pairs in the parity
//! basis (|+⟩, |−⟩, |0⟩). Every top-level file carries `"schema": "nvq3/1"`
//! and readers reject anything else.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{c, Basis, DensityMatrix3, Mat3, Unitary3};
use crate::compiler::{ProvenanceBlock, Pulse, PulseSchedule};
use crate::error::{Error, Result};
use crate::nv::PhysParams;
use crate::tomography::{SettingLabel, Shots, TomographyData, TomographyResult};

pub const SCHEMA: &str = "nvq3/1";

/// Tolerance applied to unitaries read from files.
pub const FILE_UNITARY_TOL: f64 = 1e-10;

pub type WireMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_wire(m: &Mat3) -> WireMatrix {
    (0..3)
        .map(|i| (0..3).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_wire(w: &WireMatrix) -> Result<Mat3> {
    if w.len() != 3 || w.iter().any(|r| r.len() != 3) {
        return Err(Error::Schema("matrix must be 3×3 nested [re, im] pairs".into()));
    }
    let mut m = Mat3::zeros();
    for (i, row) in w.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if !(z[0].is_finite() && z[1].is_finite()) {
                return Err(Error::Schema(format!("matrix entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c(z[0], z[1]);
        }
    }
    Ok(m)
}

pub mod mat3_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat3, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_wire(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Mat3, D::Error> {
        let w = WireMatrix::deserialize(d)?;
        matrix_from_wire(&w).map_err(serde::de::Error::custom)
    }
}

pub mod mat3_vec_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Mat3], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(matrix_to_wire).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Mat3>, D::Error> {
        Vec::<WireMatrix>::deserialize(d)?
            .iter()
            .map(|w| matrix_from_wire(w).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod opt_mat3_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<Mat3>, s: S) -> std::result::Result<S::Ok, S::Error> {
        m.as_ref().map(matrix_to_wire).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Mat3>, D::Error> {
        Option::<WireMatrix>::deserialize(d)?
            .map(|w| matrix_from_wire(&w).map_err(serde::de::Error::custom))
            .transpose()
    }
}

fn check_schema(found: &str) -> Result<()> {
    if found != SCHEMA {
        return Err(Error::Schema(format!(
            "unsupported schema `{found}`, expected `{SCHEMA}`"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleWire {
    schema: String,
    params: PhysParams,
    pulses: Vec<Pulse>,
    global_phase_rad: f64,
    provenance: Vec<ProvenanceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<WireMatrix>,
}

impl From<&PulseSchedule> for ScheduleWire {
    fn from(s: &PulseSchedule) -> Self {
        ScheduleWire {
            schema: SCHEMA.into(),
            params: s.params,
            pulses: s.pulses.clone(),
            global_phase_rad: s.global_phase,
            provenance: s.provenance.clone(),
            target: s.target.as_ref().map(|t| matrix_to_wire(t.matrix())),
        }
    }
}

impl TryFrom<ScheduleWire> for PulseSchedule {
    type Error = Error;

    fn try_from(w: ScheduleWire) -> Result<Self> {
        check_schema(&w.schema)?;
        let target = w
            .target
            .map(|t| matrix_from_wire(&t).and_then(|m| Unitary3::with_tolerance(m, FILE_UNITARY_TOL)))
            .transpose()?;
        let s = PulseSchedule {
            params: w.params,
            pulses: w.pulses,
            global_phase: w.global_phase_rad,
            target,
            provenance: w.provenance,
        };
        s.validate()?;
        Ok(s)
    }
}

impl Serialize for PulseSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PulseSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ScheduleWire::deserialize(d)?;
        PulseSchedule::try_from(w).map_err(serde::de::Error::custom)
    }
}

/// A matrix file: a unitary target or a density matrix with its basis tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub schema: String,
    pub basis: Basis,
    pub matrix: WireMatrix,
}

impl MatrixFile {
    pub fn new(m: &Mat3, basis: Basis) -> Self {
        MatrixFile {
            schema: SCHEMA.into(),
            basis,
            matrix: matrix_to_wire(m),
        }
    }

    /// The stored matrix converted to the parity basis.
    pub fn parity_matrix(&self) -> Result<Mat3> {
        check_schema(&self.schema)?;
        Ok(crate::algebra::change_basis_matrix(
            &matrix_from_wire(&self.matrix)?,
            self.basis,
            Basis::Parity,
        ))
    }
}

pub fn density_to_file(rho: &DensityMatrix3) -> MatrixFile {
    MatrixFile::new(rho.matrix(), Basis::Parity)
}

pub fn density_from_file(f: &MatrixFile) -> Result<DensityMatrix3> {
    DensityMatrix3::new(f.parity_matrix()?)
}

pub fn unitary_from_file(f: &MatrixFile) -> Result<Unitary3> {
    Unitary3::with_tolerance(f.parity_matrix()?, FILE_UNITARY_TOL)
}

/// Any serializable body with the schema field prepended.
#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    schema: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

/// Pretty JSON with a trailing newline, keys in declaration order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(json_err)?;
    s.push('\n');
    Ok(s)
}

/// Like [`to_json`], adding the schema field to a body that lacks one.
pub fn to_tagged_json<T: Serialize>(body: &T) -> Result<String> {
    to_json(&Tagged { schema: SCHEMA, body })
}

/// Parse a body written by [`to_tagged_json`], insisting on the schema field.
pub fn from_tagged_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut v: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::Schema("top-level JSON value must be an object".into()))?;
    match obj.remove("schema") {
        Some(serde_json::Value::String(s)) => check_schema(&s)?,
        Some(_) => return Err(Error::Schema("`schema` must be a string".into())),
        None => return Err(Error::Schema("missing `schema` field".into())),
    }
    serde_json::from_value(v).map_err(json_err)
}

/// Parse a file type that declares its own schema field.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
    match v.get("schema") {
        Some(serde_json::Value::String(s)) => check_schema(s)?,
        Some(_) => return Err(Error::Schema("`schema` must be a string".into())),
        None => return Err(Error::Schema("missing `schema` field".into())),
    }
    serde_json::from_value(v).map_err(json_err)
}

/// A basis-tagged matrix embedded in a larger file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixBody {
    pub basis: Basis,
    pub matrix: WireMatrix,
}

impl MatrixBody {
    pub fn parity(m: &Mat3) -> Self {
        MatrixBody {
            basis: Basis::Parity,
            matrix: matrix_to_wire(m),
        }
    }

    pub fn parity_matrix(&self) -> Result<Mat3> {
        Ok(crate::algebra::change_basis_matrix(
            &matrix_from_wire(&self.matrix)?,
            self.basis,
            Basis::Parity,
        ))
    }
}

/// Tomography output: per-setting data, the raw linear-inversion estimate
/// and the physical estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyReport {
    pub schema: String,
    pub shots: Shots,
    pub seed: Option<u64>,
    pub probabilities: BTreeMap<SettingLabel, f64>,
    pub raw: MatrixBody,
    pub reconstructed: MatrixBody,
    pub projected: bool,
    pub fidelity: Option<f64>,
}

impl TomographyReport {
    pub fn new(data: &TomographyData, result: &TomographyResult) -> Self {
        TomographyReport {
            schema: SCHEMA.into(),
            shots: data.shots,
            seed: data.seed,
            probabilities: result.probabilities.clone(),
            raw: MatrixBody::parity(&result.raw),
            reconstructed: MatrixBody::parity(result.reconstructed.matrix()),
            projected: result.projected,
            fidelity: result.fidelity,
        }
    }
}
