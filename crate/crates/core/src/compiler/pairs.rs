//! Two-pulse primitives. A pulse of length T̄′ followed by one of length T̄″
//! is the identity when both share a phase; shifting the second phase by θ
//! turns the pair into a double-quantum rotation about a fixed equatorial axis.

use serde::{Deserialize, Serialize};

use super::schedule::{fmt_angle, rwa_product, Pulse, PulseSchedule};
use crate::algebra::{cis, equatorial_parity, outer, Mat2, Mat3, Unitary3, ZERO};
use crate::error::Result;
use crate::nv::{derive, DerivedQuantities, PhysParams};

/// Rotation of the double-quantum subspace about an equatorial axis.
///
/// Acts as e^{iθ}|a⟩⟨a| + |π+a⟩⟨π+a| + e^{iχ}|0⟩⟨0| with a the axis azimuth,
/// θ the rotation angle and χ the accompanying |0⟩ phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DqRotation {
    pub axis: f64,
    pub angle: f64,
    pub zero_phase: f64,
}

impl DqRotation {
    pub fn matrix(&self) -> Mat3 {
        let a = equatorial_parity(self.axis);
        let b = equatorial_parity(std::f64::consts::PI + self.axis);
        let mut m = outer(&a, &a) * cis(self.angle) + outer(&b, &b);
        m[(ZERO, ZERO)] = cis(self.zero_phase);
        m
    }

    pub fn unitary(&self) -> Unitary3 {
        Unitary3::trusted(self.matrix())
    }

    /// n(a)·σ on (|+⟩, |−⟩); |a⟩ is its +1 eigenvector.
    pub(crate) fn pauli(axis: f64) -> Mat2 {
        use crate::algebra::c;
        let (s, co) = axis.sin_cos();
        Mat2::new(c(-co, 0.0), c(0.0, s), c(0.0, -s), c(co, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    /// (T̄′, α) then (T̄″, α+θ): rotation about −φ.
    Forward,
    /// (T̄″, α) then (T̄′, α+θ): rotation about +φ.
    Reverse,
}

impl PairKind {
    pub fn axis(self, phi: f64) -> f64 {
        match self {
            PairKind::Forward => -phi,
            PairKind::Reverse => phi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairKind::Forward => "pair_forward",
            PairKind::Reverse => "pair_reverse",
        }
    }

    pub fn pulses(self, theta: f64, alpha: f64, dq: &DerivedQuantities) -> [Pulse; 2] {
        let (first, second) = match self {
            PairKind::Forward => (dq.t_prime, dq.t_double_prime),
            PairKind::Reverse => (dq.t_double_prime, dq.t_prime),
        };
        [Pulse::raw(first, alpha), Pulse::raw(second, alpha + theta)]
    }

    /// The closed form the pair realizes, independent of α.
    pub fn rotation(self, theta: f64, phi: f64) -> DqRotation {
        DqRotation {
            axis: self.axis(phi),
            angle: theta,
            zero_phase: -theta,
        }
    }
}

fn pair(kind: PairKind, theta: f64, alpha: f64, params: &PhysParams) -> Result<(PulseSchedule, Unitary3)> {
    let dq = derive(params)?;
    let mut s = PulseSchedule::empty(*params);
    s.pulses.extend(kind.pulses(theta, alpha, &dq));
    let u = Unitary3::trusted(rwa_product(&s.pulses, params));
    Ok((s.labeled(format!("{}({})", kind.name(), fmt_angle(theta))), u))
}

/// Forward pair: e^{−iθ}|0⟩⟨0| + e^{iθ}|−φ⟩⟨−φ| + |π−φ⟩⟨π−φ|.
pub fn pair_forward(theta: f64, alpha: f64, params: &PhysParams) -> Result<(PulseSchedule, Unitary3)> {
    pair(PairKind::Forward, theta, alpha, params)
}

/// Reverse pair: e^{−iθ}|0⟩⟨0| + e^{iθ}|φ⟩⟨φ| + |π+φ⟩⟨π+φ|.
pub fn pair_reverse(theta: f64, alpha: f64, params: &PhysParams) -> Result<(PulseSchedule, Unitary3)> {
    pair(PairKind::Reverse, theta, alpha, params)
}

/// DQ block of a pair up to its scalar e^{iθ/2}: exp(i(θ/2) n(a)·σ).
pub(crate) fn su2_factor(axis: f64, theta: f64) -> Mat2 {
    use crate::algebra::c;
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::identity() * c(co, 0.0) + DqRotation::pauli(axis) * c(0.0, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::embed_dq;

    fn embed_factor(axis: f64, theta: f64) -> Mat3 {
        embed_dq(&(su2_factor(axis, theta) * cis(theta / 2.0)), cis(-theta))
    }
    use std::f64::consts::PI;

    fn params(r: f64) -> PhysParams {
        PhysParams::with_ratio(100.0, 1.0, r).unwrap()
    }

    #[test]
    fn zero_angle_pairs_are_identity() {
        let p = params(3.0);
        for f in [pair_forward, pair_reverse] {
            let (s, u) = f(0.0, 0.8, &p).unwrap();
            assert_eq!(s.len(), 2);
            assert!((u.matrix() - Mat3::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn quarter_turn_eigenvalues() {
        let p = params(4.0);
        let (_, u) = pair_forward(PI / 2.0, 0.0, &p).unwrap();
        let phi = p.derive().unwrap().phi;
        for (axis, want) in [(-phi, cis(PI / 2.0)), (PI - phi, cis(0.0))] {
            let v = equatorial_parity(axis);
            assert!((u.matrix() * v - v * want).norm() < 1e-12);
        }
        assert!((u.matrix()[(ZERO, ZERO)] - cis(-PI / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn reverse_has_phi_eigenvector() {
        let p = params(5.0);
        let phi = p.derive().unwrap().phi;
        let th = 0.9;
        let (_, u) = pair_reverse(th, 1.3, &p).unwrap();
        let v = equatorial_parity(phi);
        assert!((u.matrix() * v - v * cis(th)).norm() < 1e-12);
        let (_, f) = pair_forward(th, -0.2, &p).unwrap();
        let prod = u.matrix() * f.matrix();
        assert!((prod[(ZERO, ZERO)] - cis(-2.0 * th)).norm() < 1e-12);
    }

    #[test]
    fn su2_factor_matches_closed_form() {
        for &(a, th) in &[(0.3, 1.1), (-2.0, -0.7), (1.7, 3.0)] {
            let want = DqRotation {
                axis: a,
                angle: th,
                zero_phase: -th,
            }
            .matrix();
            assert!((embed_factor(a, th) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn forward_pair_matches_rotation_for_several_ratios() {
        for r in [2.01, 3.0, 5.0, 10.0] {
            let p = params(r);
            let phi = p.derive().unwrap().phi;
            for k in 0..20 {
                let th = -PI + k as f64 * 0.33;
                let (_, u) = pair_forward(th, 0.4, &p).unwrap();
                let want = PairKind::Forward.rotation(th, phi).matrix();
                assert!((u.matrix() - want).norm() < 1e-10, "r={r} θ={th}");
            }
        }
    }
}
