//! Physical model of the driven NV ground-state triplet: parameters, the
//! rotating-frame Hamiltonian, its closed-form propagator and the
//! intermediate-state functions of a single pulse.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::algebra::{c, cis, outer, Basis, Mat3, StateVector3, Unitary3, Vec3, MINUS, PLUS, ZERO};
use crate::error::{Error, Result};

/// Hamiltonian parameters in rad/s (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Zero-field splitting.
    #[serde(rename = "D")]
    pub d: f64,
    /// Zeeman splitting μB.
    #[serde(rename = "muB")]
    pub mu_b: f64,
    /// Drive amplitude Ω.
    #[serde(rename = "Omega")]
    pub omega: f64,
}

impl Default for PhysParams {
    /// Conventional NV values: D = 2π·2.87 GHz, μB = 2π·5 MHz, Ω = 2π·15 MHz.
    fn default() -> Self {
        PhysParams {
            d: TAU * 2.87e9,
            mu_b: TAU * 5e6,
            omega: TAU * 15e6,
        }
    }
}

impl PhysParams {
    pub fn new(d: f64, mu_b: f64, omega: f64) -> Result<Self> {
        let p = PhysParams { d, mu_b, omega };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with Ω = ratio·μB.
    pub fn with_ratio(d: f64, mu_b: f64, ratio: f64) -> Result<Self> {
        Self::new(d, mu_b, ratio * mu_b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("D", self.d), ("muB", self.mu_b), ("Omega", self.omega)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        self.omega / self.mu_b
    }

    /// Ω̄ = √(μB² + Ω²/4); defined for any drive strength.
    pub fn omega_bar(&self) -> f64 {
        self.mu_b.hypot(self.omega / 2.0)
    }

    pub fn derive(&self) -> Result<DerivedQuantities> {
        derive(self)
    }
}

/// Characteristic quantities of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub omega_bar: f64,
    /// Azimuth of the equatorial state reached after T̄′.
    pub phi: f64,
    pub t_prime: f64,
    pub t_double_prime: f64,
}

pub fn derive(p: &PhysParams) -> Result<DerivedQuantities> {
    p.validate()?;
    if p.omega < 2.0 * p.mu_b {
        return Err(Error::Domain(format!(
            "protocol requires Ω ≥ 2μB (Ω/μB = {:.6})",
            p.ratio()
        )));
    }
    let omega_bar = p.omega_bar();
    let r = (2.0 * p.mu_b / p.omega).min(1.0);
    let phi = 2.0 * r.acos();
    let t_prime = (-r * r).acos() / omega_bar;
    Ok(DerivedQuantities {
        omega_bar,
        phi,
        t_prime,
        t_double_prime: TAU / omega_bar - t_prime,
    })
}

/// Spin-1 operators in the (|+1⟩, |−1⟩, |0⟩) ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrices {
    pub sx: Mat3,
    pub sz: Mat3,
}

impl SpinMatrices {
    pub fn new() -> Self {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let o = c(0.0, 0.0);
        SpinMatrices {
            sx: Mat3::new(o, o, h, o, o, h, h, h, o),
            sz: Mat3::from_diagonal(&Vec3::new(c(1.0, 0.0), c(-1.0, 0.0), o)),
        }
    }

    pub fn in_basis(&self, basis: Basis) -> SpinMatrices {
        use crate::algebra::change_basis_matrix as cb;
        SpinMatrices {
            sx: cb(&self.sx, Basis::SpinZ, basis),
            sz: cb(&self.sz, Basis::SpinZ, basis),
        }
    }

    pub fn sy(&self) -> Mat3 {
        // S_y = i[S_x, S_z] for spin 1 with this sign convention.
        (self.sx * self.sz - self.sz * self.sx) * c(0.0, 1.0)
    }
}

impl Default for SpinMatrices {
    fn default() -> Self {
        Self::new()
    }
}

/// H′ = μB|−⟩⟨+| + (Ω/2)e^{iα}|+⟩⟨0| + h.c. in the parity basis.
pub fn rwa_hamiltonian(alpha: f64, p: &PhysParams) -> Mat3 {
    let mut h = Mat3::zeros();
    h[(MINUS, PLUS)] = c(p.mu_b, 0.0);
    h[(PLUS, MINUS)] = c(p.mu_b, 0.0);
    let w = cis(alpha) * (p.omega / 2.0);
    h[(PLUS, ZERO)] = w;
    h[(ZERO, PLUS)] = w.conj();
    h
}

fn bright_dark_amps(alpha: f64, p: &PhysParams) -> (Vec3, Vec3) {
    let ob = p.omega_bar();
    let half = p.omega / 2.0;
    let mut b = Vec3::zeros();
    b[MINUS] = c(p.mu_b / ob, 0.0);
    b[ZERO] = cis(-alpha) * (half / ob);
    let mut d = Vec3::zeros();
    d[ZERO] = c(-p.mu_b / ob, 0.0);
    d[MINUS] = cis(alpha) * (half / ob);
    (b, d)
}

/// Bright and dark states (|B_α⟩, |D_α⟩) in the parity basis.
pub fn bright_dark(alpha: f64, p: &PhysParams) -> (StateVector3, StateVector3) {
    let (b, d) = bright_dark_amps(alpha, p);
    (
        StateVector3::normalized(b, Basis::Parity).expect("bright state is nonzero"),
        StateVector3::normalized(d, Basis::Parity).expect("dark state is nonzero"),
    )
}

/// Closed-form RWA propagator U(t, α) = exp(−iH′t).
pub fn propagator(t: f64, alpha: f64, p: &PhysParams) -> Unitary3 {
    Unitary3::trusted(propagator_raw(t, alpha, p))
}

pub(crate) fn propagator_raw(t: f64, alpha: f64, p: &PhysParams) -> Mat3 {
    let (b, d) = bright_dark_amps(alpha, p);
    let mut plus = Vec3::zeros();
    plus[PLUS] = c(1.0, 0.0);
    let (s, co) = (p.omega_bar() * t).sin_cos();
    let bb = outer(&b, &b);
    let pp = outer(&plus, &plus);
    let bp = outer(&b, &plus);
    (bb + pp) * c(co, 0.0) + (bp + bp.adjoint()) * c(0.0, -s) + outer(&d, &d)
}

/// ξ, η, A, B and θ₅ for a single pulse of duration t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntermediateFunctions {
    pub xi: f64,
    pub eta: f64,
    pub a: f64,
    pub b: f64,
    pub theta5: f64,
}

/// Evaluate the intermediate-state functions.
///
/// Written in half-angle form, s = sin(Ω̄t/2) and k = cos(Ω̄t/2), so the
/// t → 0 limit (ξ = π) and small θ₅ come out without cancellation.
pub fn intermediate(t: f64, p: &PhysParams) -> IntermediateFunctions {
    let ob = p.omega_bar();
    let (s, k) = (ob * t / 2.0).sin_cos();
    let r = (p.mu_b * s).hypot(ob * k);
    let eta = 2.0 * s.abs() * r;
    let xi = 2.0 * (ob * k.abs()).atan2(p.mu_b * s.abs());
    let x = (p.omega / (2.0 * ob)) * s.abs();
    let theta5 = 2.0 * x.min(1.0).asin();
    let a = 1.0 - 2.0 * x * x;
    let b = (1.0 - a * a).max(0.0).sqrt();
    IntermediateFunctions { xi, eta, a, b, theta5 }
}

/// Unique t ∈ [0, T̄′] with θ₅(t) = θ₅, found by bisection.
pub fn invert_theta5(theta5: f64, p: &PhysParams) -> Result<f64> {
    let dq = derive(p)?;
    if !(0.0..=PI / 2.0).contains(&theta5) {
        return Err(Error::Domain(format!(
            "single-pulse θ₅ must lie in [0, π/2], got {theta5}"
        )));
    }
    if theta5 == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, dq.t_prime);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if intermediate(mid, p).theta5 < theta5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if (intermediate(hi, p).theta5 - theta5).abs() < (intermediate(lo, p).theta5 - theta5).abs() {
        hi
    } else {
        lo
    };
    let err = (intermediate(t, p).a - theta5.cos()).abs();
    if err > 1e-12 {
        return Err(Error::Domain(format!("θ₅ inversion stalled with |ΔA| = {err:.3e}")));
    }
    Ok(t)
}
