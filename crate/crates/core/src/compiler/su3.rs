//! Eight-angle factorization of SU(3):
//! S = e^{iλ₃δ}·e^{iλ₂ε}·e^{iλ₃ζ}·e^{iλ₅θ₅}·e^{iλ₃a}·e^{iλ₂b}·e^{iλ₃c}·e^{iλ₈φ₈}.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, Matrix, SMatrix, SVector, U18, U8};
use serde::{Deserialize, Serialize};

use crate::algebra::{c, cis, exp_generator_raw, gell_mann, wrap_angle, Mat2, Mat3, Unitary3, C64, ZERO};
use crate::error::{Error, Result};

/// Angles of the factorization. Operator order is left to right, so the
/// rightmost factor (λ₈) acts first in time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Su3Angles {
    pub delta: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub theta5: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phi8: f64,
}

const GENERATORS: [usize; 8] = [3, 2, 3, 5, 3, 2, 3, 8];

impl Su3Angles {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.delta,
            self.epsilon,
            self.zeta,
            self.theta5,
            self.a,
            self.b,
            self.c,
            self.phi8,
        ]
    }

    pub fn from_array(x: [f64; 8]) -> Self {
        Su3Angles {
            delta: x[0],
            epsilon: x[1],
            zeta: x[2],
            theta5: x[3],
            a: x[4],
            b: x[5],
            c: x[6],
            phi8: x[7],
        }
    }

    /// e^{iλ₃δ}·e^{iλ₂ε}·e^{iλ₃ζ}, the block applied after λ₅.
    pub fn block_a(&self) -> Mat3 {
        euler(self.delta, self.epsilon, self.zeta)
    }

    /// e^{iλ₃a}·e^{iλ₂b}·e^{iλ₃c}, the block applied before λ₅.
    pub fn block_b(&self) -> Mat3 {
        euler(self.a, self.b, self.c)
    }
}

fn euler(x: f64, y: f64, z: f64) -> Mat3 {
    exp_generator_raw(3, x) * exp_generator_raw(2, y) * exp_generator_raw(3, z)
}

fn product(x: &[f64; 8]) -> Mat3 {
    GENERATORS
        .iter()
        .zip(x.iter())
        .fold(Mat3::identity(), |acc, (&k, &th)| acc * exp_generator_raw(k, th))
}

pub fn reconstruct(angles: &Su3Angles) -> Unitary3 {
    Unitary3::trusted(product(&angles.to_array()))
}

/// ZYZ-style angles of an SU(2) block [[u, v], [−v*, u*]] so that
/// e^{iλ₃x}·e^{iλ₂y}·e^{iλ₃z} restricted to the DQ block reproduces it.
fn euler_angles(m: &Mat2) -> (f64, f64, f64) {
    let u = m[(0, 0)];
    let v = m[(0, 1)];
    let y = v.norm().atan2(u.norm());
    let (au, av) = (u.arg(), v.arg());
    match (u.norm() > 1e-14, v.norm() > 1e-14) {
        (true, true) => (wrap_angle((au + av) / 2.0), y, wrap_angle((au - av) / 2.0)),
        (true, false) => (wrap_angle(au), y, 0.0),
        _ => (wrap_angle(av), y, 0.0),
    }
}

/// Special-unitary representative of a U(2) block with given first row/column.
fn su2_from_row(alpha: C64, beta: C64) -> Mat2 {
    Mat2::new(alpha, beta, -beta.conj(), alpha.conj())
}

fn su2_from_col(a: C64, cc: C64) -> Mat2 {
    Mat2::new(a, -cc.conj(), cc, a.conj())
}

/// Factor G = e^{iΓ}·reconstruct(angles). Returns (angles, Γ).
pub fn decompose_su3(g: &Mat3) -> Result<(Su3Angles, f64)> {
    Unitary3::with_tolerance(*g, 1e-10)?;
    let gamma = g.determinant().arg() / 3.0;
    let s = g * cis(-gamma);
    let mut angles = constructive(&s);
    let mut err = (product(&angles.to_array()) - s).norm();
    if err > 1e-10 {
        angles = refine(&s, angles);
        err = (product(&angles.to_array()) - s).norm();
    }
    if err > 1e-9 {
        return Err(Error::Decomposition(format!(
            "reconstruction residual {err:.2e} exceeds 1e-9 after refinement"
        )));
    }
    Ok((angles, wrap_angle(gamma)))
}

fn constructive(s: &Mat3) -> Su3Angles {
    let s33 = s[(ZERO, ZERO)];
    let r = s33.norm().min(1.0);
    let theta5 = r.acos();
    let phi8 = if r > 1e-8 {
        // arg S₃₃ = −2φ₈/√3 ∈ (−π, π].
        let arg = if s33.arg() <= -std::f64::consts::PI {
            std::f64::consts::PI
        } else {
            s33.arg()
        };
        -(3f64.sqrt() / 2.0) * arg
    } else {
        0.0
    };
    let sp = s * exp_generator_raw(8, -phi8);
    let sin5 = theta5.sin();
    let (ua, ub) = if sin5 <= 1e-8 {
        // Block-diagonal target: the λ₅-adjacent block is taken as identity.
        let m = sp.fixed_view::<2, 2>(0, 0).into_owned();
        (m / m.determinant().sqrt(), Mat2::identity())
    } else {
        // Row 3 of S′ is −sinθ₅·(first row of U_B); column 3 is sinθ₅·(first column of U_A).
        let alpha = -sp[(ZERO, 0)] / sin5;
        let beta = -sp[(ZERO, 1)] / sin5;
        let a = sp[(0, ZERO)] / sin5;
        let cc = sp[(1, ZERO)] / sin5;
        (su2_from_col(a, cc), su2_from_row(alpha, beta))
    };
    let (delta, epsilon, zeta) = euler_angles(&ua);
    let (a, b, cq) = euler_angles(&ub);
    Su3Angles {
        delta,
        epsilon,
        zeta,
        theta5,
        a,
        b,
        c: cq,
        phi8: wrap_angle(phi8),
    }
}

/// Levenberg–Marquardt over all eight angles on the 18 real residuals of S.
fn refine(s: &Mat3, start: Su3Angles) -> Su3Angles {
    let mut best = start;
    let mut best_err = (product(&start.to_array()) - s).norm();
    for k in 0..8 {
        let mut x0 = start.to_array();
        if k > 0 {
            // Deterministic perturbations for restarts.
            for (i, v) in x0.iter_mut().enumerate() {
                *v += 0.37 * ((k * 8 + i) as f64 * 1.618).sin();
            }
        }
        let (fit, _) = LevenbergMarquardt::new()
            .with_ftol(1e-15)
            .with_xtol(1e-15)
            .with_gtol(1e-15)
            .minimize(AngleFit {
                target: *s,
                x: SVector::<f64, 8>::from(x0),
            });
        let x: [f64; 8] = fit.x.into();
        let err = (product(&x) - s).norm();
        if err < best_err {
            best_err = err;
            best = Su3Angles::from_array(x);
        }
        if best_err < 1e-12 {
            break;
        }
    }
    best
}

struct AngleFit {
    target: Mat3,
    x: SVector<f64, 8>,
}

impl LeastSquaresProblem<f64, U18, U8> for AngleFit {
    type ResidualStorage = Owned<f64, U18>;
    type JacobianStorage = Owned<f64, U18, U8>;
    type ParameterStorage = Owned<f64, U8>;

    fn set_params(&mut self, x: &SVector<f64, 8>) {
        self.x = *x;
    }

    fn params(&self) -> SVector<f64, 8> {
        self.x
    }

    fn residuals(&self) -> Option<SVector<f64, 18>> {
        let d = product(&self.x.into()) - self.target;
        Some(flatten(&d))
    }

    fn jacobian(&self) -> Option<Matrix<f64, U18, U8, Owned<f64, U18, U8>>> {
        let x: [f64; 8] = self.x.into();
        let f: Vec<Mat3> = GENERATORS
            .iter()
            .zip(x.iter())
            .map(|(&k, &t)| exp_generator_raw(k, t))
            .collect();
        let mut j = SMatrix::<f64, 18, 8>::zeros();
        for k in 0..8 {
            let left = f[..k].iter().fold(Mat3::identity(), |acc, m| acc * m);
            let right = f[k + 1..].iter().fold(Mat3::identity(), |acc, m| acc * m);
            let gen = gell_mann(GENERATORS[k]).expect("valid index") * c(0.0, 1.0);
            let dk = left * gen * f[k] * right;
            j.set_column(k, &flatten(&dk));
        }
        Some(j)
    }
}

fn flatten(m: &Mat3) -> SVector<f64, 18> {
    SVector::<f64, 18>::from_fn(|i, _| {
        let z = m[(i / 6, (i % 6) / 2)];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}
