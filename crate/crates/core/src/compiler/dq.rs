//! Synthesis of double-quantum rotations from alternating-axis pair products.
//!
//! Forward and reverse pairs rotate the DQ Bloch sphere about the equatorial
//! axes −φ and +φ. A pair with angle θ acts as e^{iθ/2}·exp(i(θ/2) n·σ) on
//! the DQ block and e^{−iθ} on |0⟩, so a product of N pairs is
//! e^{iΣ/2}·W ⊕ e^{−iΣ} with W ∈ SU(2) and Σ the sum of angles. The angles
//! are found by Levenberg–Marquardt on the SU(2) residual, optionally with a
//! second residual that also pins the |0⟩ phase relative to the DQ block.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DMatrix, DVector, Dyn};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pairs::{su2_factor, DqRotation, PairKind};
use super::schedule::{rwa_product, PulseSchedule};
use crate::algebra::{c, wrap_angle, Mat2, Mat3, Unitary3, C64, ZERO};
use crate::error::{Error, Result};
use crate::nv::{derive, DerivedQuantities, PhysParams};

/// Smallest tolerated |sin 2φ|; below it the two axes are nearly (anti)parallel.
pub const AXIS_EPS: f64 = 1e-3;

/// Frobenius tolerance for accepting a synthesized block.
const BLOCK_TOL: f64 = 1e-10;

const STARTS_PER_LENGTH: u64 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct DqSynthesis {
    pub schedule: PulseSchedule,
    /// Exact RWA playback of `schedule`.
    pub unitary: Unitary3,
    /// |0⟩ phase χ left over relative to the requested DQ block.
    pub zero_phase_residual: f64,
    /// Pair factors in time order.
    pub factors: Vec<(PairKind, f64)>,
}

impl DqSynthesis {
    pub fn rotations(&self, phi: f64) -> Vec<DqRotation> {
        self.factors.iter().map(|&(k, th)| k.rotation(th, phi)).collect()
    }
}

/// Largest factor count tried. Nearly parallel axes need more factors:
/// reaching an arbitrary rotation takes about π/β steps, β being the
/// smaller angle between the two axes.
pub fn factor_cap(phi: f64) -> usize {
    let two_phi = (2.0 * phi).rem_euclid(std::f64::consts::PI);
    let beta = two_phi.min(std::f64::consts::PI - two_phi);
    let need = (std::f64::consts::PI / beta.max(AXIS_EPS)).ceil() as usize + 3;
    need.max(9)
}

fn check_axes(phi: f64) -> Result<()> {
    let s = (2.0 * phi).sin().abs();
    if s < AXIS_EPS {
        return Err(Error::Synthesis(format!(
            "the two rotation axes are nearly parallel (|sin 2φ| = {s:.2e} < {AXIS_EPS:.0e}); adjust Ω/μB"
        )));
    }
    Ok(())
}

/// V / √det V.
fn to_su2(v: &Mat2) -> Mat2 {
    v / v.determinant().sqrt()
}

/// Synthesize V on the DQ block, reporting the |0⟩ phase it leaves behind:
/// playback = e^{−iγ}·(V ⊕ e^{iχ}) with γ stored as the schedule's global phase.
pub fn dq_synthesize(v: &Mat2, params: &PhysParams) -> Result<DqSynthesis> {
    check_unitary2(v)?;
    let dq = derive(params)?;
    let v_hat = to_su2(v);
    let factors = if near_scalar(&v_hat) {
        Vec::new()
    } else {
        check_axes(dq.phi)?;
        solve(&v_hat, None, &dq)?
    };
    let (schedule, realized) = build(&factors, &dq, params);
    let r2 = realized.fixed_view::<2, 2>(0, 0).into_owned();
    let g = unit((v.adjoint() * r2).trace());
    let err = (r2 - v * g).norm();
    if err > BLOCK_TOL {
        return Err(Error::Synthesis(format!("DQ block misses its target by {err:.2e}")));
    }
    let chi = wrap_angle((realized[(ZERO, ZERO)] / g).arg());
    finish(schedule, realized, -g.arg(), chi, factors)
}

/// Synthesize a block-diagonal target V ⊕ e^{iω} exactly (up to global phase).
pub fn dq_synthesize_block(target: &Mat3, params: &PhysParams) -> Result<DqSynthesis> {
    let off = target[(0, 2)].norm() + target[(1, 2)].norm() + target[(2, 0)].norm() + target[(2, 1)].norm();
    if off > 1e-12 {
        return Err(Error::Argument("target does not preserve the DQ subspace".into()));
    }
    let v = target.fixed_view::<2, 2>(0, 0).into_owned();
    check_unitary2(&v)?;
    let omega = target[(ZERO, ZERO)].arg();
    let dq = derive(params)?;
    let root = v.determinant().sqrt();
    let v_hat = v / root;
    let omega_eff = omega - root.arg();
    let trivial = near_scalar(&v_hat) && {
        let sign = if v_hat[(0, 0)].re < 0.0 {
            std::f64::consts::PI
        } else {
            0.0
        };
        wrap_angle(omega_eff + sign).abs() < 1e-13
    };
    let factors = if trivial {
        Vec::new()
    } else {
        check_axes(dq.phi)?;
        solve(&v_hat, Some(omega_eff), &dq)?
    };
    let (schedule, realized) = build(&factors, &dq, params);
    let g = unit((target.adjoint() * realized).trace());
    let err = (realized - target * g).norm();
    if err > BLOCK_TOL {
        return Err(Error::Synthesis(format!("DQ block misses its target by {err:.2e}")));
    }
    finish(schedule, realized, -g.arg(), 0.0, factors)
}

fn finish(
    mut schedule: PulseSchedule,
    realized: Mat3,
    gamma: f64,
    chi: f64,
    factors: Vec<(PairKind, f64)>,
) -> Result<DqSynthesis> {
    schedule.global_phase = wrap_angle(gamma);
    Ok(DqSynthesis {
        schedule,
        unitary: Unitary3::trusted(realized),
        zero_phase_residual: chi,
        factors,
    })
}

fn unit(z: C64) -> C64 {
    if z.norm() > 0.0 {
        z / z.norm()
    } else {
        c(1.0, 0.0)
    }
}

fn near_scalar(v: &Mat2) -> bool {
    (v[(0, 1)].norm() + v[(1, 0)].norm() + (v[(0, 0)] - v[(1, 1)]).norm()) < 1e-13
}

fn check_unitary2(v: &Mat2) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Validation("DQ target has non-finite entries".into()));
    }
    let d = (v.adjoint() * v - Mat2::identity()).norm();
    if d > 1e-10 {
        return Err(Error::Validation(format!("DQ target is not unitary (defect {d:.2e})")));
    }
    Ok(())
}

fn build(factors: &[(PairKind, f64)], dq: &DerivedQuantities, params: &PhysParams) -> (PulseSchedule, Mat3) {
    let mut s = PulseSchedule::empty(*params);
    for &(kind, th) in factors {
        s.pulses.extend(kind.pulses(th, 0.0, dq));
    }
    let m = rwa_product(&s.pulses, params);
    (s, m)
}

fn kinds_for(n: usize, first: PairKind) -> Vec<PairKind> {
    let other = match first {
        PairKind::Forward => PairKind::Reverse,
        PairKind::Reverse => PairKind::Forward,
    };
    (0..n).map(|k| if k % 2 == 0 { first } else { other }).collect()
}

fn solve(v_hat: &Mat2, omega_eff: Option<f64>, dq: &DerivedQuantities) -> Result<Vec<(PairKind, f64)>> {
    let cap = factor_cap(dq.phi) + usize::from(omega_eff.is_some());
    let start = if omega_eff.is_some() { 4 } else { 3 };
    let mut best = f64::INFINITY;
    for n in lengths(start, cap) {
        let mut best_here = f64::INFINITY;
        for attempt in 0..STARTS_PER_LENGTH {
            // Far-off local minima on every early start: the length is too short.
            if attempt == 3 && best_here > 0.1 {
                break;
            }
            let first = if attempt % 2 == 0 {
                PairKind::Forward
            } else {
                PairKind::Reverse
            };
            let kinds = kinds_for(n, first);
            let mut rng = ChaCha8Rng::seed_from_u64(0x6e76_7133 ^ ((n as u64) << 16) ^ attempt);
            let init = DVector::from_fn(n, |_, _| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
            let problem = Fit {
                axes: kinds.iter().map(|k| k.axis(dq.phi)).collect(),
                target: *v_hat,
                omega_eff,
                theta: init,
            };
            let (fit, _) = LevenbergMarquardt::new()
                .with_ftol(1e-15)
                .with_xtol(1e-15)
                .with_gtol(1e-15)
                .with_patience(200)
                .minimize(problem);
            let r = fit.residual_norm();
            best_here = best_here.min(r);
            best = best.min(r);
            if r < 1e-13 {
                let raw: Vec<_> = kinds.into_iter().zip(fit.theta.iter().copied()).collect();
                return Ok(simplify(raw));
            }
        }
    }
    Err(Error::Synthesis(format!(
        "no pair sequence of at most {cap} factors reached the target (best residual {best:.2e}); adjust Ω/μB"
    )))
}

/// Factor counts to try: one at a time while short, then growing by a
/// quarter so nearly parallel axes do not walk through every length.
fn lengths(start: usize, cap: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = start;
    while n < cap {
        out.push(n);
        n = (n + 1).max(n * 5 / 4);
    }
    out.push(cap);
    out
}

/// Wrap angles, drop null factors and merge neighbours about the same axis.
fn simplify(raw: Vec<(PairKind, f64)>) -> Vec<(PairKind, f64)> {
    let mut out: Vec<(PairKind, f64)> = Vec::with_capacity(raw.len());
    for (kind, th) in raw {
        let th = wrap_angle(th);
        match out.last_mut() {
            Some(last) if last.0 == kind => last.1 = wrap_angle(last.1 + th),
            _ => out.push((kind, th)),
        }
        if out.last().is_some_and(|l| l.1.abs() < 1e-14) {
            out.pop();
        }
    }
    out
}

struct Fit {
    axes: Vec<f64>,
    target: Mat2,
    omega_eff: Option<f64>,
    theta: DVector<f64>,
}

impl Fit {
    fn rows(&self) -> usize {
        let m = if self.omega_eff.is_some() { 6 } else { 4 };
        m.max(self.theta.len())
    }

    fn factors(&self) -> Vec<Mat2> {
        self.axes
            .iter()
            .zip(self.theta.iter())
            .map(|(&a, &t)| su2_factor(a, t))
            .collect()
    }

    fn product(factors: &[Mat2]) -> Mat2 {
        factors.iter().fold(Mat2::identity(), |acc, f| f * acc)
    }

    fn sign(&self, w: &Mat2) -> f64 {
        if (self.target.adjoint() * w).trace().re < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    fn psi(&self, omega_eff: f64, s: f64) -> f64 {
        let sum: f64 = self.theta.iter().sum();
        1.5 * sum + omega_eff + if s < 0.0 { std::f64::consts::PI } else { 0.0 }
    }

    fn residual_vec(&self) -> DVector<f64> {
        let w = Self::product(&self.factors());
        let s = self.sign(&w);
        let d = w - self.target * c(s, 0.0);
        let mut r = DVector::zeros(self.rows());
        r[0] = d[(0, 0)].re;
        r[1] = d[(0, 0)].im;
        r[2] = d[(0, 1)].re;
        r[3] = d[(0, 1)].im;
        if let Some(om) = self.omega_eff {
            let (sp, cp) = self.psi(om, s).sin_cos();
            r[4] = cp - 1.0;
            r[5] = sp;
        }
        r
    }

    fn residual_norm(&self) -> f64 {
        self.residual_vec().norm()
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for Fit {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.theta.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.theta.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(self.residual_vec())
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let f = self.factors();
        let n = f.len();
        // prefix[k] = F_{k−1}⋯F_0, suffix[k] = F_{n−1}⋯F_{k+1}.
        let mut prefix = vec![Mat2::identity(); n + 1];
        for k in 0..n {
            prefix[k + 1] = f[k] * prefix[k];
        }
        let mut suffix = vec![Mat2::identity(); n];
        for k in (0..n.saturating_sub(1)).rev() {
            suffix[k] = suffix[k + 1] * f[k + 1];
        }
        let s = self.sign(&prefix[n]);
        let mut j = DMatrix::zeros(self.rows(), n);
        let half_i = c(0.0, 0.5);
        for k in 0..n {
            let dk = suffix[k] * DqRotation::pauli(self.axes[k]) * f[k] * prefix[k] * half_i;
            j[(0, k)] = dk[(0, 0)].re;
            j[(1, k)] = dk[(0, 0)].im;
            j[(2, k)] = dk[(0, 1)].re;
            j[(3, k)] = dk[(0, 1)].im;
        }
        if let Some(om) = self.omega_eff {
            let (sp, cp) = self.psi(om, s).sin_cos();
            for k in 0..n {
                j[(4, k)] = -1.5 * sp;
                j[(5, k)] = 1.5 * cp;
            }
        }
        Some(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exp_generator;
    use crate::algebra::{cis, embed_dq};
    use crate::random::haar_su2;

    /// Block-diagonal 3×3 from a DQ block and a |0⟩ phase.
    fn dq_block(v: &Mat2, zero_phase: f64) -> Mat3 {
        embed_dq(v, cis(zero_phase))
    }

    fn params(r: f64) -> PhysParams {
        PhysParams::with_ratio(100.0, 1.0, r).unwrap()
    }

    #[test]
    fn lengths_reach_the_cap() {
        assert_eq!(lengths(3, 9), vec![3, 4, 5, 6, 7, 8, 9]);
        let l = lengths(4, 81);
        assert_eq!(*l.last().unwrap(), 81);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert!(l.len() < 25);
    }

    #[test]
    fn identity_is_empty() {
        let s = dq_synthesize(&Mat2::identity(), &params(3.0)).unwrap();
        assert!(s.schedule.is_empty());
        assert_eq!(s.zero_phase_residual, 0.0);
    }

    #[test]
    fn lambda3_rotation() {
        let p = params(3.0);
        let u = exp_generator(3, 0.7).unwrap();
        let s = dq_synthesize(&u.dq_block(), &p).unwrap();
        let want = dq_block(&u.dq_block(), s.zero_phase_residual) * cis(-s.schedule.global_phase);
        assert!((s.unitary.matrix() - want).norm() < 1e-10);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fit = Fit {
            axes: vec![0.4, -0.4, 0.4, -0.4, 0.4],
            target: haar_su2(&mut rng),
            omega_eff: Some(0.3),
            theta: DVector::from_vec(vec![0.3, -1.2, 2.0, 0.1, -0.6]),
        };
        let j = fit.jacobian().unwrap();
        let h = 1e-6;
        for k in 0..5 {
            let mut plus = Fit {
                theta: fit.theta.clone(),
                axes: fit.axes.clone(),
                ..fit
            };
            plus.theta[k] += h;
            let mut minus = Fit {
                theta: fit.theta.clone(),
                axes: fit.axes.clone(),
                ..fit
            };
            minus.theta[k] -= h;
            let fd = (plus.residual_vec() - minus.residual_vec()) / (2.0 * h);
            for r in 0..6 {
                assert!((fd[r] - j[(r, k)]).abs() < 1e-7, "row {r} col {k}");
            }
        }
    }

    #[test]
    fn random_targets_free_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for r in [2.5, 3.0, 5.0] {
            let p = params(r);
            for _ in 0..10 {
                let v = haar_su2(&mut rng);
                let s = dq_synthesize(&v, &p).unwrap();
                let target = dq_block(&v, s.zero_phase_residual);
                let f = crate::algebra::trace_overlap(&target, s.unitary.matrix());
                assert!(f >= 1.0 - 1e-8);
            }
        }
    }

    #[test]
    fn exact_block_pins_zero_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = params(3.0);
        for _ in 0..5 {
            let v = haar_su2(&mut rng);
            let om = rng.random_range(-3.0..3.0);
            let t = dq_block(&v, om);
            let s = dq_synthesize_block(&t, &p).unwrap();
            let got = s.unitary.matrix() * cis(s.schedule.global_phase);
            assert!((got - t).norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_axes_are_reported() {
        let p = params(2.0 * 2f64.sqrt());
        let v = exp_generator(2, 0.4).unwrap().dq_block();
        match dq_synthesize(&v, &p) {
            Err(Error::Synthesis(msg)) => assert!(msg.contains("adjust Ω/μB")),
            other => panic!("expected synthesis error, got {other:?}"),
        }
    }

    #[test]
    fn simplify_merges_and_drops() {
        let f = PairKind::Forward;
        let r = PairKind::Reverse;
        let out = simplify(vec![(f, 0.2), (f, 0.3), (r, 0.0), (f, 0.1), (r, 1.0)]);
        assert_eq!(out.len(), 2);
        assert!((out[0].1 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn cap_grows_near_degeneracy() {
        assert_eq!(factor_cap(std::f64::consts::FRAC_PI_4), 9);
        let phi3 = 2.0 * (2.0f64 / 3.0).acos();
        assert!(factor_cap(phi3) >= 15);
    }
}
