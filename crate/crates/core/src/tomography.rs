//! Qutrit state tomography when only the |0⟩ population can be read out.
//!
//! Eight settings, each a unitary M applied before a |0⟩ readout, give the
//! probabilities ⟨0|MρM†|0⟩. These are affine in the eight real parameters
//! (p₀, p₋, Re/Im c₊₋, Re/Im c₊₀, Re/Im c₋₀), and the affine map is obtained
//! by evaluating the Born rule on a Hermitian basis rather than by hand.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    c, embed_dq, exp_generator_raw, hermitian_eigen, Basis, DensityMatrix3, Mat2, Mat3, StateVector3, Unitary3, Vec3,
    MINUS, PLUS, ZERO,
};
use crate::compiler::{compile, PulseSchedule};
use crate::error::{Error, Result};
use crate::nv::{derive, propagator_raw, PhysParams};

/// Tolerance for every mapping contract.
pub const CONTRACT_TOL: f64 = 1e-9;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SettingLabel {
    P0,
    Pminus,
    ReC_pm,
    ImC_pm,
    ReC_0p,
    ImC_0p,
    ReC_0m,
    ImC_0m,
}

impl SettingLabel {
    pub const ALL: [SettingLabel; 8] = [
        SettingLabel::P0,
        SettingLabel::Pminus,
        SettingLabel::ReC_pm,
        SettingLabel::ImC_pm,
        SettingLabel::ReC_0p,
        SettingLabel::ImC_0p,
        SettingLabel::ReC_0m,
        SettingLabel::ImC_0m,
    ];
}

/// Assertion that `unitary·input ∝ output` for one stage of a setting.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingContract {
    pub description: String,
    /// Index of the stage the contract applies to; `None` means the full M.
    pub stage: Option<usize>,
    pub input: Vec3,
    pub output: Vec3,
}

impl MappingContract {
    /// 1 − |⟨output|U|input⟩|, zero when the mapping holds up to phase.
    pub fn defect(&self, u: &Mat3) -> f64 {
        (1.0 - self.output.dotc(&(u * self.input)).norm()).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    pub label: SettingLabel,
    /// Time-ordered stages; M is their product with later stages on the left.
    pub stages: Vec<Mat3>,
    pub contracts: Vec<MappingContract>,
    pub unitary: Unitary3,
}

impl MeasurementSetting {
    fn new(label: SettingLabel, stages: Vec<Mat3>, contracts: Vec<MappingContract>) -> Result<Self> {
        let m = stages.iter().fold(Mat3::identity(), |acc, s| s * acc);
        let setting = MeasurementSetting {
            label,
            stages,
            contracts,
            unitary: Unitary3::with_tolerance(m, 1e-12)?,
        };
        let worst = setting.worst_defect();
        if worst > CONTRACT_TOL {
            return Err(Error::Validation(format!(
                "setting {label:?} violates its mapping contract by {worst:.2e}"
            )));
        }
        Ok(setting)
    }

    fn stage_matrix(&self, stage: Option<usize>) -> Mat3 {
        match stage {
            Some(i) => self.stages[i],
            None => *self.unitary.matrix(),
        }
    }

    /// Largest contract defect of the abstract unitary.
    pub fn worst_defect(&self) -> f64 {
        self.contracts
            .iter()
            .map(|k| k.defect(&self.stage_matrix(k.stage)))
            .fold(0.0, f64::max)
    }

    /// Largest defect of the whole-sequence contracts against `m`.
    pub fn overall_defect(&self, m: &Mat3) -> f64 {
        self.contracts
            .iter()
            .filter(|k| k.stage.is_none())
            .map(|k| k.defect(m))
            .fold(0.0, f64::max)
    }

    pub fn compile(&self, params: &PhysParams) -> Result<PulseSchedule> {
        compile(&self.unitary, params)
    }
}

fn ket(v: [(f64, f64); 3]) -> Vec3 {
    let v = Vec3::new(c(v[0].0, v[0].1), c(v[1].0, v[1].1), c(v[2].0, v[2].1));
    let n = v.norm();
    v / c(n, 0.0)
}

fn spin_ket(amps: [(f64, f64); 3]) -> Vec3 {
    StateVector3::normalized(ket(amps), Basis::SpinZ)
        .expect("nonzero")
        .parity_amps()
}

fn bloch(v: &nalgebra::Vector2<crate::algebra::C64>) -> [f64; 3] {
    let (a, b) = (v[0], v[1]);
    let ab = a.conj() * b;
    [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
}

fn dq(v: &Vec3) -> nalgebra::Vector2<crate::algebra::C64> {
    let w = nalgebra::Vector2::new(v[PLUS], v[MINUS]);
    w / c(w.norm(), 0.0)
}

/// Smallest-angle DQ rotation taking the DQ state `from` to `to` (up to phase).
fn minimal_rotation(from: &Vec3, to: &Vec3) -> Mat3 {
    let a = bloch(&dq(from));
    let b = bloch(&dq(to));
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
    let sn = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
    let angle = sn.atan2(dot);
    if angle.abs() < 1e-15 {
        return Mat3::identity();
    }
    let n = if sn > 1e-12 {
        cross.map(|x| x / sn)
    } else {
        // Antipodal: any axis orthogonal to a.
        let t = if a[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let p = [
            a[1] * t[2] - a[2] * t[1],
            a[2] * t[0] - a[0] * t[2],
            a[0] * t[1] - a[1] * t[0],
        ];
        let l = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        p.map(|x| x / l)
    };
    let (s, co) = (angle / 2.0).sin_cos();
    let sigma = Mat2::new(c(n[2], 0.0), c(n[0], -n[1]), c(n[0], n[1]), c(-n[2], 0.0));
    let r = Mat2::identity() * c(co, 0.0) - sigma * c(0.0, s);
    embed_dq(&r, c(1.0, 0.0))
}

fn contract(description: &str, stage: Option<usize>, input: Vec3, output: Vec3) -> MappingContract {
    MappingContract {
        description: description.to_string(),
        stage,
        input,
        output,
    }
}

/// Build the eight settings for the given drive parameters. Each is defined
/// by the state mappings it must perform; the unitaries below are one
/// concrete choice satisfying them.
pub fn build_settings(params: &PhysParams) -> Result<Vec<MeasurementSetting>> {
    let dqty = derive(params)?;
    let zero = ket([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    let plus = ket([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
    let minus = ket([(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
    let phi_state = crate::algebra::equatorial_parity(dqty.phi);
    let u_dd = propagator_raw(dqty.t_double_prime, 0.0, params);
    let h = FRAC_1_SQRT_2;

    // (|+1⟩ + i|−1⟩)/√2 and |+1⟩ in the parity basis.
    let circ = spin_ket([(h, 0.0), (0.0, h), (0.0, 0.0)]);
    let up = spin_ket([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);

    let y_minus = minimal_rotation(&minus, &phi_state);
    let y_circ = minimal_rotation(&circ, &phi_state);
    let q_up = minimal_rotation(&up, &circ);
    let l5 = exp_generator_raw(5, FRAC_PI_4);
    let l8 = exp_generator_raw(8, -FRAC_PI_2 / 3f64.sqrt());
    let swap_dq = exp_generator_raw(2, FRAC_PI_2);

    let zm_plus = ket([(-h, 0.0), (0.0, 0.0), (h, 0.0)]);
    let z_i_plus = ket([(0.0, h), (0.0, 0.0), (h, 0.0)]);
    let z_plus = ket([(h, 0.0), (0.0, 0.0), (h, 0.0)]);
    let z_mi_plus = ket([(0.0, -h), (0.0, 0.0), (h, 0.0)]);
    let zm_minus = ket([(0.0, 0.0), (-h, 0.0), (h, 0.0)]);
    let z_mi_minus = ket([(0.0, 0.0), (0.0, -h), (h, 0.0)]);

    Ok(vec![
        MeasurementSetting::new(
            SettingLabel::P0,
            vec![],
            vec![contract("|0⟩ is read directly", None, zero, zero)],
        )?,
        MeasurementSetting::new(
            SettingLabel::Pminus,
            vec![y_minus, u_dd],
            vec![
                contract("|−⟩ → |φ⟩", Some(0), minus, phi_state),
                contract("U(T̄″): |φ⟩ → |0⟩", Some(1), phi_state, zero),
                contract("|−⟩ → |0⟩", None, minus, zero),
            ],
        )?,
        MeasurementSetting::new(
            SettingLabel::ReC_pm,
            vec![y_circ, u_dd],
            vec![
                contract("(|+1⟩ + i|−1⟩)/√2 → |φ⟩", Some(0), circ, phi_state),
                contract("U(T̄″): |φ⟩ → |0⟩", Some(1), phi_state, zero),
                contract("(|+1⟩ + i|−1⟩)/√2 → |0⟩", None, circ, zero),
            ],
        )?,
        MeasurementSetting::new(
            SettingLabel::ImC_pm,
            vec![q_up, y_circ, u_dd],
            vec![
                contract("|+1⟩ → (|+1⟩ + i|−1⟩)/√2", Some(0), up, circ),
                contract("(|+1⟩ + i|−1⟩)/√2 → |φ⟩", Some(1), circ, phi_state),
                contract("U(T̄″): |φ⟩ → |0⟩", Some(2), phi_state, zero),
                contract("|+1⟩ → |0⟩", None, up, zero),
            ],
        )?,
        MeasurementSetting::new(
            SettingLabel::ReC_0p,
            vec![l5],
            vec![contract("(|0⟩ − |+⟩)/√2 → |0⟩", None, zm_plus, zero)],
        )?,
        MeasurementSetting::new(
            SettingLabel::ImC_0p,
            vec![l8, l5],
            vec![
                contract("(|0⟩ + i|+⟩)/√2 → (|0⟩ + |+⟩)/√2", Some(0), z_i_plus, z_plus),
                contract("(|0⟩ − |+⟩)/√2 → |0⟩", Some(1), zm_plus, zero),
                contract("(|0⟩ − i|+⟩)/√2 → |0⟩", None, z_mi_plus, zero),
            ],
        )?,
        MeasurementSetting::new(
            SettingLabel::ReC_0m,
            vec![swap_dq, l5],
            vec![
                contract("|−⟩ → |+⟩", Some(0), minus, plus),
                contract("(|0⟩ − |+⟩)/√2 → |0⟩", Some(1), zm_plus, zero),
                contract("(|0⟩ − |−⟩)/√2 → |0⟩", None, zm_minus, zero),
            ],
        )?,
        MeasurementSetting::new(
            SettingLabel::ImC_0m,
            vec![swap_dq, l8, l5],
            vec![
                contract("|−⟩ → |+⟩", Some(0), minus, plus),
                contract("(|0⟩ + i|+⟩)/√2 → (|0⟩ + |+⟩)/√2", Some(1), z_i_plus, z_plus),
                contract("(|0⟩ − |+⟩)/√2 → |0⟩", Some(2), zm_plus, zero),
                contract("(|0⟩ − i|−⟩)/√2 → |0⟩", None, z_mi_minus, zero),
            ],
        )?,
    ])
}

/// ⟨0|M X M†|0⟩ for any matrix X; linear in X.
fn born(x: &Mat3, m: &Mat3) -> f64 {
    (m * x * m.adjoint())[(ZERO, ZERO)].re
}

/// ⟨0|MρM†|0⟩.
pub fn expected_probability(rho: &DensityMatrix3, s: &MeasurementSetting) -> f64 {
    born(rho.matrix(), s.unitary.matrix())
}

/// Fraction of `shots` binomial draws that land in |0⟩.
pub fn sample<R: Rng + ?Sized>(rho: &DensityMatrix3, s: &MeasurementSetting, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    let p = expected_probability(rho, s).clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p).map_err(|e| Error::Argument(format!("binomial: {e}")))?;
    Ok(dist.sample(rng) as f64 / shots as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shots {
    Count(u64),
    #[serde(with = "exact_tag")]
    Exact,
}

mod exact_tag {
    use serde::{Deserialize, Deserializer, Serializer};
    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("exact")
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "exact" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"exact\", got {s:?}")))
        }
    }
}

impl std::str::FromStr for Shots {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(n) if n > 0 => Ok(Shots::Count(n)),
            _ => Err(Error::Argument(format!(
                "shots must be a positive integer or `exact`, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyData {
    pub probabilities: BTreeMap<SettingLabel, f64>,
    pub shots: Shots,
    pub seed: Option<u64>,
}

/// Probabilities for every setting, exact or sampled. Setting k draws from
/// its own stream derived from `seed`, so results do not depend on order.
pub fn measure(
    rho: &DensityMatrix3,
    settings: &[MeasurementSetting],
    shots: Shots,
    seed: u64,
) -> Result<TomographyData> {
    let mut probabilities = BTreeMap::new();
    for (k, s) in settings.iter().enumerate() {
        let p = match shots {
            Shots::Exact => expected_probability(rho, s),
            Shots::Count(n) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64 + 1);
                sample(rho, s, n, &mut rng)?
            }
        };
        probabilities.insert(s.label, p);
    }
    Ok(TomographyData {
        probabilities,
        shots,
        seed: match shots {
            Shots::Exact => None,
            Shots::Count(_) => Some(seed),
        },
    })
}

/// Hermitian basis for the eight free parameters around |+⟩⟨+|.
fn parameter_basis() -> [Mat3; 8] {
    let e = |i: usize, j: usize| {
        let mut m = Mat3::zeros();
        m[(i, j)] = c(1.0, 0.0);
        m
    };
    let re = |i: usize, j: usize| e(i, j) + e(j, i);
    let im = |i: usize, j: usize| (e(i, j) - e(j, i)) * c(0.0, 1.0);
    [
        e(ZERO, ZERO) - e(PLUS, PLUS),
        e(MINUS, MINUS) - e(PLUS, PLUS),
        re(PLUS, MINUS),
        im(PLUS, MINUS),
        re(PLUS, ZERO),
        im(PLUS, ZERO),
        re(MINUS, ZERO),
        im(MINUS, ZERO),
    ]
}

fn offset_state() -> Mat3 {
    let mut m = Mat3::zeros();
    m[(PLUS, PLUS)] = c(1.0, 0.0);
    m
}

/// The affine map p = A·x + b from parameters to setting probabilities.
pub fn linear_map(settings: &[MeasurementSetting]) -> Result<(SMatrix<f64, 8, 8>, SVector<f64, 8>)> {
    let ordered = order(settings)?;
    let basis = parameter_basis();
    let off = offset_state();
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for (r, s) in ordered.iter().enumerate() {
        let m = s.unitary.matrix();
        b[r] = born(&off, m);
        for (k, x) in basis.iter().enumerate() {
            a[(r, k)] = born(x, m);
        }
    }
    Ok((a, b))
}

fn order(settings: &[MeasurementSetting]) -> Result<Vec<&MeasurementSetting>> {
    SettingLabel::ALL
        .iter()
        .map(|l| {
            settings
                .iter()
                .find(|s| s.label == *l)
                .ok_or_else(|| Error::Reconstruction(format!("setting {l:?} is missing")))
        })
        .collect()
}

pub fn condition_number(a: &SMatrix<f64, 8, 8>) -> f64 {
    let sv = a.svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub probabilities: BTreeMap<SettingLabel, f64>,
    /// Linear-inversion estimate before any positivity correction.
    pub raw: Mat3,
    pub reconstructed: DensityMatrix3,
    pub projected: bool,
    pub fidelity: Option<f64>,
}

fn matrix_from_params(x: &SVector<f64, 8>) -> Mat3 {
    let basis = parameter_basis();
    basis
        .iter()
        .zip(x.iter())
        .fold(offset_state(), |acc, (m, &v)| acc + m * c(v, 0.0))
}

/// Linear inversion followed by eigenvalue clipping when needed.
pub fn reconstruct(
    data: &TomographyData,
    settings: &[MeasurementSetting],
    reference: Option<&DensityMatrix3>,
) -> Result<TomographyResult> {
    let (a, b) = linear_map(settings)?;
    let cond = condition_number(&a);
    if !(cond.is_finite() && cond < 1e8) {
        return Err(Error::Reconstruction(format!(
            "settings are not informationally complete (condition number {cond:.2e})"
        )));
    }
    let mut p = SVector::<f64, 8>::zeros();
    for (r, l) in SettingLabel::ALL.iter().enumerate() {
        let v = *data
            .probabilities
            .get(l)
            .ok_or_else(|| Error::Reconstruction(format!("no estimate for setting {l:?}")))?;
        if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
            return Err(Error::Reconstruction(format!(
                "estimate for {l:?} is {v}, outside [0, 1]"
            )));
        }
        p[r] = v;
    }
    let x = a
        .lu()
        .solve(&(p - b))
        .ok_or_else(|| Error::Reconstruction("singular measurement map".into()))?;
    let raw = matrix_from_params(&x);
    let (vals, vecs) = hermitian_eigen(&raw);
    let projected = vals.min() < 0.0;
    let rho = if projected {
        let clipped = vals.map(|v| v.max(0.0));
        let tr: f64 = clipped.sum();
        if tr <= 0.0 {
            return Err(Error::Reconstruction("estimate has no positive part".into()));
        }
        let d = Mat3::from_diagonal(&clipped.map(|v| c(v / tr, 0.0)));
        vecs * d * vecs.adjoint()
    } else {
        raw
    };
    let reconstructed = DensityMatrix3::new(crate::algebra::hermitian_part(&rho))
        .map_err(|e| Error::Reconstruction(format!("reconstructed state is invalid: {e}")))?;
    let fidelity = reference.map(|r| state_fidelity(r, &reconstructed));
    Ok(TomographyResult {
        probabilities: data.probabilities.clone(),
        raw,
        reconstructed,
        projected,
        fidelity,
    })
}

fn sqrt_psd(m: &Mat3) -> Mat3 {
    let (vals, vecs) = hermitian_eigen(m);
    let d = Mat3::from_diagonal(&vals.map(|v| c(v.max(0.0).sqrt(), 0.0)));
    vecs * d * vecs.adjoint()
}

/// Uhlmann fidelity (Tr√(√ρ σ √ρ))².
pub fn state_fidelity(rho: &DensityMatrix3, sigma: &DensityMatrix3) -> f64 {
    let s = sqrt_psd(rho.matrix());
    let inner = s * sigma.matrix() * s;
    let (vals, _) = hermitian_eigen(&inner);
    let t: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    (t * t).min(1.0)
}

/// Pure state |ψ⟩⟨ψ| from parity-basis amplitudes.
pub fn pure_state(amps: Vec3) -> Result<DensityMatrix3> {
    let v = StateVector3::normalized(amps, Basis::Parity)?;
    Ok(DensityMatrix3::pure(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysParams {
        PhysParams::with_ratio(1e3, 1.0, 3.0).unwrap()
    }

    #[test]
    fn settings_satisfy_contracts() {
        let s = build_settings(&params()).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(*s[0].unitary.matrix(), Mat3::identity());
        for m in &s {
            assert!(m.worst_defect() <= CONTRACT_TOL, "{:?}", m.label);
        }
    }

    #[test]
    fn born_rule_examples() {
        let s = build_settings(&params()).unwrap();
        let zero = DensityMatrix3::pure(&StateVector3::zero());
        assert!((expected_probability(&zero, &s[0]) - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix3::maximally_mixed();
        for m in &s {
            assert!((expected_probability(&mixed, m) - 1.0 / 3.0).abs() < 1e-12);
        }
        let minus = DensityMatrix3::pure(&StateVector3::minus());
        assert!((expected_probability(&minus, &s[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_is_well_conditioned() {
        let s = build_settings(&params()).unwrap();
        let (a, _) = linear_map(&s).unwrap();
        assert!(condition_number(&a) < 1e3);
    }

    #[test]
    fn sampling_edges() {
        let s = build_settings(&params()).unwrap();
        let zero = DensityMatrix3::pure(&StateVector3::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample(&zero, &s[0], 100, &mut rng).unwrap(), 1.0);
        let plus = DensityMatrix3::pure(&StateVector3::plus());
        assert_eq!(sample(&plus, &s[0], 100, &mut rng).unwrap(), 0.0);
        assert!(sample(&plus, &s[0], 0, &mut rng).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityMatrix3::pure(&StateVector3::zero());
        let plus = DensityMatrix3::pure(&StateVector3::plus());
        let mixed = DensityMatrix3::maximally_mixed();
        assert!((state_fidelity(&zero, &zero) - 1.0).abs() < 1e-12);
        assert!(state_fidelity(&zero, &plus).abs() < 1e-12);
        assert!((state_fidelity(&zero, &mixed) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn missing_setting_is_reported() {
        let s = build_settings(&params()).unwrap();
        let zero = DensityMatrix3::pure(&StateVector3::zero());
        let mut d = measure(&zero, &s, Shots::Exact, 0).unwrap();
        d.probabilities.remove(&SettingLabel::ImC_0m);
        assert!(matches!(reconstruct(&d, &s, None), Err(Error::Reconstruction(_))));
        assert!(matches!(reconstruct(&d, &s[..7], None), Err(Error::Reconstruction(_))));
    }

    #[test]
    fn shots_parsing() {
        assert_eq!("exact".parse::<Shots>().unwrap(), Shots::Exact);
        assert_eq!("100".parse::<Shots>().unwrap(), Shots::Count(100));
        assert!("0".parse::<Shots>().is_err());
        assert!("-3".parse::<Shots>().is_err());
        let j = serde_json::to_string(&Shots::Exact).unwrap();
        assert_eq!(j, "\"exact\"");
        assert_eq!(serde_json::from_str::<Shots>("250").unwrap(), Shots::Count(250));
    }
}
