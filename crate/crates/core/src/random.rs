//! Seeded random unitaries and states for tests, demos and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{c, DensityMatrix3, Mat2, Mat3, C64};

/// The generator used wherever a bare integer seed is accepted.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Haar-random SU(2): a uniformly random unit quaternion.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let a = gaussian(rng);
    let b = gaussian(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    Mat2::new(a, b, -b.conj(), a.conj())
}

/// Haar-random U(3) by Gram–Schmidt on a complex Ginibre matrix.
pub fn haar_u3<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let g = Mat3::from_fn(|_, _| gaussian(rng));
    let mut q = Mat3::zeros();
    for j in 0..3 {
        let mut v = g.column(j).into_owned();
        for i in 0..j {
            let qi = q.column(i).into_owned();
            let proj = qi.dotc(&v);
            v -= qi * proj;
        }
        let n = v.norm();
        q.set_column(j, &(v / c(n, 0.0)));
    }
    q
}

/// Haar-random SU(3).
pub fn haar_su3<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let u = haar_u3(rng);
    let det = u.determinant();
    u * C64::from_polar(1.0, -det.arg() / 3.0)
}

/// Random full-rank density matrix (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix3 {
    let g = Mat3::from_fn(|_, _| gaussian(rng));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    let m = m / c(tr, 0.0);
    let m = (m + m.adjoint()) * c(0.5, 0.0);
    DensityMatrix3::new(m).expect("Wishart samples are valid states")
}

/// Random pure state, as a density matrix.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix3 {
    let v = haar_u3(rng).column(0).into_owned();
    DensityMatrix3::new(v * v.adjoint()).expect("pure states are valid")
}
