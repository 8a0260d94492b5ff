//! Three-level linear algebra: Gell-Mann generators, their exponentials,
//! basis changes and the small set of matrix/state types used everywhere.
//!
//! Matrices are always stored in the ordered basis (|+⟩, |−⟩, |0⟩) with
//! |±⟩ = (|+1⟩ ± |−1⟩)/√2, unless a value carries an explicit [`Basis`] tag.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
pub type Mat2 = Matrix2<C64>;
pub type Vec3 = Vector3<C64>;

/// Default tolerance for the `Unitary3` invariant.
pub const UNITARY_TOL: f64 = 1e-12;

pub const PLUS: usize = 0;
pub const MINUS: usize = 1;
pub const ZERO: usize = 2;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// |u⟩⟨v|
pub fn outer(u: &Vec3, v: &Vec3) -> Mat3 {
    u * v.adjoint()
}

pub fn is_finite(m: &Mat3) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm of U†U − I.
pub fn unitarity_defect(m: &Mat3) -> f64 {
    (m.adjoint() * m - Mat3::identity()).norm()
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    if r <= -PI {
        r += TAU;
    }
    r
}

/// Ordered bases a state or operator may be expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// (|+1⟩, |−1⟩, |0⟩), the S_z eigenbasis.
    #[serde(rename = "spin_z")]
    SpinZ,
    /// (|+⟩, |−⟩, |0⟩).
    #[serde(rename = "parity")]
    Parity,
}

impl Basis {
    pub fn tag(self) -> &'static str {
        match self {
            Basis::SpinZ => "spin_z",
            Basis::Parity => "parity",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "spin_z" => Ok(Basis::SpinZ),
            "parity" => Ok(Basis::Parity),
            other => Err(Error::Argument(format!("unknown basis tag `{other}`"))),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The real, symmetric, involutive matrix relating the two bases. It maps
/// amplitudes in either basis to amplitudes in the other.
pub fn basis_transform() -> Mat3 {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let o = C64::new(0.0, 0.0);
    Mat3::new(h, h, o, h, -h, o, o, o, c(1.0, 0.0))
}

/// A 3×3 unitary, stored in the (|+⟩, |−⟩, |0⟩) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary3(Mat3);

impl Unitary3 {
    pub fn new(m: Mat3) -> Result<Self> {
        Self::with_tolerance(m, UNITARY_TOL)
    }

    /// Validate with a caller-chosen unitarity tolerance.
    pub fn with_tolerance(m: Mat3, tol: f64) -> Result<Self> {
        if !is_finite(&m) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        let defect = unitarity_defect(&m);
        if defect > tol {
            return Err(Error::Validation(format!(
                "matrix is not unitary: ‖U†U − I‖ = {defect:.3e} exceeds {tol:.1e}"
            )));
        }
        Ok(Unitary3(m))
    }

    /// Wrap a product of exact unitaries without re-checking.
    pub(crate) fn trusted(m: Mat3) -> Self {
        debug_assert!(unitarity_defect(&m) < 1e-9, "defect {}", unitarity_defect(&m));
        Unitary3(m)
    }

    pub fn identity() -> Self {
        Unitary3(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat3 {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Unitary3(self.0.adjoint())
    }

    pub fn det(&self) -> C64 {
        self.0.determinant()
    }

    pub fn apply(&self, v: &StateVector3) -> Result<StateVector3> {
        if v.basis != Basis::Parity {
            return Err(Error::Argument(format!(
                "operator is in the parity basis but the state is tagged {}",
                v.basis
            )));
        }
        Ok(StateVector3 {
            amps: self.0 * v.amps,
            basis: Basis::Parity,
        })
    }

    /// The 2×2 block acting on (|+⟩, |−⟩).
    pub fn dq_block(&self) -> Mat2 {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Express the operator in another basis.
    pub fn matrix_in(&self, basis: Basis) -> Mat3 {
        change_basis_matrix(&self.0, Basis::Parity, basis)
    }
}

impl std::ops::Mul for Unitary3 {
    type Output = Unitary3;
    fn mul(self, rhs: Unitary3) -> Unitary3 {
        Unitary3(self.0 * rhs.0)
    }
}

impl std::ops::Mul<&Unitary3> for &Unitary3 {
    type Output = Unitary3;
    fn mul(self, rhs: &Unitary3) -> Unitary3 {
        Unitary3(self.0 * rhs.0)
    }
}

/// A normalized three-level state with an explicit basis tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector3 {
    amps: Vec3,
    basis: Basis,
}

impl StateVector3 {
    pub fn new(amps: Vec3, basis: Basis) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("state has non-finite amplitudes".into()));
        }
        let n = amps.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("state norm {n} is not 1")));
        }
        Ok(StateVector3 { amps, basis })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec3, basis: Basis) -> Result<Self> {
        let n = amps.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Validation("cannot normalize a zero vector".into()));
        }
        Self::new(amps / c(n, 0.0), basis)
    }

    pub fn basis_state(index: usize, basis: Basis) -> Self {
        let mut amps = Vec3::zeros();
        amps[index] = c(1.0, 0.0);
        StateVector3 { amps, basis }
    }

    pub fn plus() -> Self {
        Self::basis_state(PLUS, Basis::Parity)
    }
    pub fn minus() -> Self {
        Self::basis_state(MINUS, Basis::Parity)
    }
    pub fn zero() -> Self {
        Self::basis_state(ZERO, Basis::Parity)
    }

    pub fn amplitudes(&self) -> &Vec3 {
        &self.amps
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// ⟨self|other⟩; both states must share a basis.
    pub fn inner(&self, other: &StateVector3) -> Result<C64> {
        if self.basis != other.basis {
            return Err(Error::Argument(format!(
                "inner product across bases {} and {}",
                self.basis, other.basis
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn to_basis(&self, target: Basis) -> StateVector3 {
        if target == self.basis {
            return *self;
        }
        StateVector3 {
            amps: basis_transform() * self.amps,
            basis: target,
        }
    }

    /// Amplitudes in the parity basis, converting if needed.
    pub fn parity_amps(&self) -> Vec3 {
        self.to_basis(Basis::Parity).amps
    }
}

/// Convert a state into `target`, which must differ from its current basis.
pub fn change_basis(v: &StateVector3, target: Basis) -> Result<StateVector3> {
    if v.basis == target {
        return Err(Error::Argument(format!("state is already in the {target} basis")));
    }
    Ok(v.to_basis(target))
}

/// Convert an operator matrix between bases (identity if they agree).
pub fn change_basis_matrix(m: &Mat3, from: Basis, to: Basis) -> Mat3 {
    if from == to {
        return *m;
    }
    let t = basis_transform();
    t * m * t
}

/// A 3×3 density matrix in the parity basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(Mat3);

impl DensityMatrix3 {
    pub fn new(m: Mat3) -> Result<Self> {
        if !is_finite(&m) {
            return Err(Error::Validation("density matrix has non-finite entries".into()));
        }
        let herm = (m - m.adjoint()).norm();
        if herm > 1e-12 {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian (‖ρ − ρ†‖ = {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::Validation(format!("density matrix trace {tr} is not 1")));
        }
        let hm = hermitian_part(&m);
        let min_eig = hermitian_eigen(&hm).0.min();
        if min_eig < -1e-10 {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix3(hm))
    }

    pub fn from_basis(m: &Mat3, basis: Basis) -> Result<Self> {
        Self::new(change_basis_matrix(m, basis, Basis::Parity))
    }

    pub fn pure(v: &StateVector3) -> Self {
        let a = v.parity_amps();
        DensityMatrix3(outer(&a, &a))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix3(Mat3::identity() / c(3.0, 0.0))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn matrix_in(&self, basis: Basis) -> Mat3 {
        change_basis_matrix(&self.0, Basis::Parity, basis)
    }

    /// Populations (p₊, p₋, p₀).
    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let e = hermitian_eigen(&self.0).0;
        [e[0], e[1], e[2]]
    }
}

pub(crate) fn hermitian_part(m: &Mat3) -> Mat3 {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &Mat3) -> (nalgebra::Vector3<f64>, Mat3) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = nalgebra::Vector3::new(
        eig.eigenvalues[idx[0]],
        eig.eigenvalues[idx[1]],
        eig.eigenvalues[idx[2]],
    );
    let vecs = Mat3::from_columns(&[
        eig.eigenvectors.column(idx[0]).into_owned(),
        eig.eigenvectors.column(idx[1]).into_owned(),
        eig.eigenvectors.column(idx[2]).into_owned(),
    ]);
    (vals, vecs)
}

/// A Gell-Mann generator λ_k in the parity basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GellMann {
    index: u8,
    matrix: Mat3,
}

impl GellMann {
    pub fn new(k: usize) -> Result<Self> {
        Ok(GellMann {
            index: k as u8,
            matrix: gell_mann(k)?,
        })
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }
}

fn check_index(k: usize) -> Result<()> {
    if (1..=8).contains(&k) {
        Ok(())
    } else {
        Err(Error::Argument(format!("Gell-Mann index {k} is outside 1..=8")))
    }
}

/// The pair of basis indices a generator couples, and whether it is the
/// symmetric (σx-like) or antisymmetric (σy-like) member.
fn pair_of(k: usize) -> Option<(usize, usize, bool)> {
    match k {
        1 => Some((PLUS, MINUS, true)),
        2 => Some((PLUS, MINUS, false)),
        4 => Some((PLUS, ZERO, true)),
        5 => Some((PLUS, ZERO, false)),
        6 => Some((MINUS, ZERO, true)),
        7 => Some((MINUS, ZERO, false)),
        _ => None,
    }
}

pub fn gell_mann(k: usize) -> Result<Mat3> {
    check_index(k)?;
    let mut m = Mat3::zeros();
    match (k, pair_of(k)) {
        (_, Some((i, j, true))) => {
            m[(i, j)] = c(1.0, 0.0);
            m[(j, i)] = c(1.0, 0.0);
        }
        (_, Some((i, j, false))) => {
            m[(i, j)] = c(0.0, -1.0);
            m[(j, i)] = c(0.0, 1.0);
        }
        (3, None) => {
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 1)] = c(-1.0, 0.0);
        }
        _ => {
            let s = 1.0 / SQRT3;
            m[(0, 0)] = c(s, 0.0);
            m[(1, 1)] = c(s, 0.0);
            m[(2, 2)] = c(-2.0 * s, 0.0);
        }
    }
    Ok(m)
}

/// e^{iθλ_k} in closed form.
pub fn exp_generator(k: usize, theta: f64) -> Result<Unitary3> {
    check_index(k)?;
    if !theta.is_finite() {
        return Err(Error::Argument("rotation angle must be finite".into()));
    }
    Ok(Unitary3(exp_generator_raw(k, theta)))
}

pub(crate) fn exp_generator_raw(k: usize, theta: f64) -> Mat3 {
    let mut m = Mat3::identity();
    let (s, co) = theta.sin_cos();
    match (k, pair_of(k)) {
        (_, Some((i, j, true))) => {
            m[(i, i)] = c(co, 0.0);
            m[(j, j)] = c(co, 0.0);
            m[(i, j)] = c(0.0, s);
            m[(j, i)] = c(0.0, s);
        }
        (_, Some((i, j, false))) => {
            m[(i, i)] = c(co, 0.0);
            m[(j, j)] = c(co, 0.0);
            m[(i, j)] = c(s, 0.0);
            m[(j, i)] = c(-s, 0.0);
        }
        (3, None) => {
            m[(0, 0)] = cis(theta);
            m[(1, 1)] = cis(-theta);
        }
        _ => {
            let p = theta / SQRT3;
            m[(0, 0)] = cis(p);
            m[(1, 1)] = cis(p);
            m[(2, 2)] = cis(-2.0 * p);
        }
    }
    m
}

/// The equatorial double-quantum state (e^{−iφ/2}|−1⟩ − e^{iφ/2}|+1⟩)/√2,
/// returned in the S_z basis.
pub fn equatorial_state(phi: f64) -> StateVector3 {
    let h = FRAC_1_SQRT_2;
    StateVector3 {
        amps: Vec3::new(-cis(phi / 2.0) * h, cis(-phi / 2.0) * h, c(0.0, 0.0)),
        basis: Basis::SpinZ,
    }
}

/// Parity-basis amplitudes of [`equatorial_state`].
pub fn equatorial_parity(phi: f64) -> Vec3 {
    equatorial_state(phi).parity_amps()
}

fn check_unitary(u: &Mat3) -> Result<()> {
    Unitary3::with_tolerance(*u, 1e-10).map(|_| ())
}

/// |Tr(U†V)|/3.
pub fn gate_fidelity(u: &Mat3, v: &Mat3) -> Result<f64> {
    check_unitary(u)?;
    check_unitary(v)?;
    Ok(trace_overlap(u, v))
}

/// (|Tr(U†V)|² + 3)/12.
pub fn average_gate_fidelity(u: &Mat3, v: &Mat3) -> Result<f64> {
    check_unitary(u)?;
    check_unitary(v)?;
    let t = (u.adjoint() * v).trace().norm();
    Ok((t * t + 3.0) / 12.0)
}

pub(crate) fn trace_overlap(u: &Mat3, v: &Mat3) -> f64 {
    ((u.adjoint() * v).trace().norm() / 3.0).min(1.0)
}

/// min over γ of ‖A − e^{iγ}B‖_F together with the minimizing γ.
pub fn phase_aligned_distance(a: &Mat3, b: &Mat3) -> (f64, f64) {
    let t = (b.adjoint() * a).trace();
    let gamma = if t.norm() > 0.0 { t.arg() } else { 0.0 };
    ((a - b * cis(gamma)).norm(), gamma)
}

/// Block-diagonal embedding V ⊕ z.
pub fn embed_dq(v: &Mat2, zero_entry: C64) -> Mat3 {
    let mut m = Mat3::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(v);
    m[(2, 2)] = zero_entry;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lambda8_matches_explicit_form() {
        let l8 = gell_mann(8).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((l8[(0, 0)].re - s).abs() < 1e-15);
        assert!((l8[(2, 2)].re + 2.0 * s).abs() < 1e-15);
    }

    #[test]
    fn lambda5_entries() {
        let l5 = gell_mann(5).unwrap();
        assert_eq!(l5[(0, 2)], c(0.0, -1.0));
        assert_eq!(l5[(2, 0)], c(0.0, 1.0));
        let nonzero = l5.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn bad_index_is_rejected() {
        assert!(matches!(gell_mann(0), Err(Error::Argument(_))));
        assert!(matches!(gell_mann(9), Err(Error::Argument(_))));
        assert!(exp_generator(9, 0.1).is_err());
    }

    #[test]
    fn orthogonality_and_tracelessness() {
        for i in 1..=8 {
            let li = gell_mann(i).unwrap();
            assert!(li.trace().norm() < 1e-15);
            assert!((li - li.adjoint()).norm() < 1e-15);
            for j in 1..=8 {
                let t = (li * gell_mann(j).unwrap()).trace();
                let want = if i == j { 2.0 } else { 0.0 };
                assert!((t - c(want, 0.0)).norm() < 1e-12, "Tr(λ{i}λ{j}) = {t}");
            }
        }
    }

    // Independent oracle: power series of iθλ.
    fn expm_series(a: &Mat3) -> Mat3 {
        let mut term = Mat3::identity();
        let mut sum = Mat3::identity();
        for n in 1..60 {
            term = term * a / c(n as f64, 0.0);
            sum += term;
        }
        sum
    }

    #[test]
    fn closed_forms_match_series() {
        for k in 1..=8 {
            for &th in &[-2.3, -0.4, 0.0, 0.7, 1.9] {
                let want = expm_series(&(gell_mann(k).unwrap() * c(0.0, th)));
                let got = exp_generator(k, th).unwrap();
                assert!((got.matrix() - want).norm() < 1e-12, "k={k} θ={th}");
            }
        }
    }

    #[test]
    fn exp_examples() {
        assert!((exp_generator(5, 0.0).unwrap().matrix() - Mat3::identity()).norm() < 1e-15);
        let p8 = 0.83;
        let u = exp_generator(8, p8).unwrap();
        let s3 = 3f64.sqrt();
        assert!((u.matrix()[(0, 0)] - cis(p8 / s3)).norm() < 1e-15);
        assert!((u.matrix()[(2, 2)] - cis(-2.0 * p8 / s3)).norm() < 1e-15);
        let u5 = exp_generator(5, PI / 2.0).unwrap();
        let out = u5.apply(&StateVector3::zero()).unwrap();
        assert!((out.amplitudes()[PLUS].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equatorial_examples() {
        let e0 = equatorial_state(0.0);
        let h = FRAC_1_SQRT_2;
        assert!((e0.amplitudes()[0] - c(-h, 0.0)).norm() < 1e-15);
        assert!((e0.amplitudes()[1] - c(h, 0.0)).norm() < 1e-15);
        for &p in &[0.0, 0.3, 1.7, -2.2, 5.0] {
            let a = equatorial_state(p);
            assert!((a.amplitudes().norm() - 1.0).abs() < 1e-15);
            let b = equatorial_state(PI + p);
            assert!(a.inner(&b).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn basis_change_examples() {
        let p = change_basis(&StateVector3::plus(), Basis::SpinZ).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((p.amplitudes() - Vec3::new(c(h, 0.0), c(h, 0.0), c(0.0, 0.0))).norm() < 1e-15);
        let z = change_basis(&StateVector3::zero(), Basis::SpinZ).unwrap();
        assert_eq!(z.amplitudes()[2], c(1.0, 0.0));
        assert!(change_basis(&StateVector3::zero(), Basis::Parity).is_err());
        assert!(Basis::from_tag("pm").is_err());
    }

    #[test]
    fn cross_basis_inner_product_is_refused() {
        let a = StateVector3::plus();
        let b = a.to_basis(Basis::SpinZ);
        assert!(a.inner(&b).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let u = exp_generator(4, 0.3).unwrap().into_matrix();
        assert!((gate_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-15);
        assert!((gate_fidelity(&u, &(u * cis(1.1))).unwrap() - 1.0).abs() < 1e-15);
        let z = Mat3::from_diagonal(&Vec3::new(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)));
        assert!((gate_fidelity(&Mat3::identity(), &z).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((average_gate_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-15);
        let bad = Mat3::identity() * c(2.0, 0.0);
        assert!(matches!(gate_fidelity(&bad, &u), Err(Error::Validation(_))));
    }

    #[test]
    fn unitary_validation() {
        assert!(Unitary3::new(Mat3::identity() * c(1.0 + 1e-9, 0.0)).is_err());
        let mut m = Mat3::identity();
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(Unitary3::new(m).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix3::new(Mat3::identity()).is_err());
        let mut m = Mat3::zeros();
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(DensityMatrix3::new(m).is_err());
        assert!(DensityMatrix3::new(*DensityMatrix3::maximally_mixed().matrix()).is_ok());
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(0.1) - 0.1).abs() < 1e-17);
    }
}
