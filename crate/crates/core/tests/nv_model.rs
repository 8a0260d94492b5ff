use approx::assert_abs_diff_eq;
use nvq3_core::algebra::*;
use nvq3_core::nv::*;
use nvq3_core::Error;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn params(ratio: f64) -> PhysParams {
    PhysParams::with_ratio(1e3, 1.0, ratio).unwrap()
}

/// e^{−iH′t} by Padé exponential of the RWA Hamiltonian.
fn expm_propagator(t: f64, alpha: f64, p: &PhysParams) -> Mat3 {
    (rwa_hamiltonian(alpha, p) * c(0.0, -t)).exp()
}

#[test]
fn derive_examples() {
    let p = PhysParams::new(1e3, 1.0, 2.0).unwrap();
    let d = derive(&p).unwrap();
    assert_abs_diff_eq!(d.omega_bar, 2f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(d.phi, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(d.t_prime, PI / 2f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(d.t_prime, 2.221441, epsilon = 1e-6);
    let d = derive(&PhysParams::new(1e3, 1.0, 4.0).unwrap()).unwrap();
    assert_abs_diff_eq!(d.phi, 2.0 * PI / 3.0, epsilon = 1e-12);
    match derive(&PhysParams::new(1e3, 1.0, 1.9).unwrap()) {
        Err(Error::Domain(m)) => assert!(m.contains("protocol requires Ω ≥ 2μB"), "{m}"),
        other => panic!("{other:?}"),
    }
    assert!(PhysParams::new(1.0, -1.0, 3.0).is_err());
    assert!(PhysParams::new(f64::NAN, 1.0, 3.0).is_err());
}

#[test]
fn default_parameters_are_conventional_nv_values() {
    let p = PhysParams::default();
    let tau = 2.0 * PI;
    assert_abs_diff_eq!(p.d, tau * 2.87e9, epsilon = 1.0);
    assert_abs_diff_eq!(p.mu_b, tau * 5e6, epsilon = 1e-6);
    assert_abs_diff_eq!(p.omega, tau * 15e6, epsilon = 1e-6);
}

#[test]
fn rwa_hamiltonian_examples() {
    let p = params(3.0);
    let h = rwa_hamiltonian(0.0, &p);
    assert!(h.iter().all(|z| z.im == 0.0));
    let h0 = h * StateVector3::zero().amplitudes();
    assert!((h0 - StateVector3::plus().amplitudes() * c(p.omega / 2.0, 0.0)).norm() < 1e-15);
    for k in 0..16 {
        let h = rwa_hamiltonian(0.4 * k as f64, &p);
        assert!((h - h.adjoint()).norm() < 1e-14);
    }
    // μB → 0: |−⟩ decouples with eigenvalue 0.
    let weak = PhysParams::new(1e3, 1e-300, 3.0).unwrap();
    let hm = rwa_hamiltonian(0.3, &weak) * StateVector3::minus().amplitudes();
    assert!(hm.norm() < 1e-200);
}

#[test]
fn bright_dark_examples() {
    let p = PhysParams::new(1e3, 1.0, 2.0).unwrap();
    let (b, _) = bright_dark(0.0, &p);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((b.amplitudes() - Vec3::new(c(0.0, 0.0), c(h, 0.0), c(h, 0.0))).norm() < 1e-15);
    for ratio in [2.0, 3.0, 7.0] {
        let p = params(ratio);
        for k in 0..16 {
            let alpha = -PI + k as f64 * PI / 8.0;
            let (b, d) = bright_dark(alpha, &p);
            assert!(b.inner(&d).unwrap().norm() < 1e-15);
            assert_abs_diff_eq!(b.amplitudes().norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(d.amplitudes().norm(), 1.0, epsilon = 1e-15);
            assert!((rwa_hamiltonian(alpha, &p) * d.amplitudes()).norm() < 1e-14);
        }
    }
}

#[test]
fn propagator_examples() {
    let p = params(3.0);
    let d = derive(&p).unwrap();
    assert!((propagator(0.0, 0.7, &p).matrix() - Mat3::identity()).norm() < 1e-15);
    for k in 0..16 {
        let alpha = -PI + k as f64 * PI / 8.0;
        let v = propagator(d.t_prime, alpha, &p).matrix() * StateVector3::zero().amplitudes();
        assert!((v - equatorial_parity(d.phi) * cis(alpha)).norm() < 1e-10);
        let round =
            propagator(d.t_double_prime, alpha, &p).into_matrix() * propagator(d.t_prime, alpha, &p).into_matrix();
        assert!((round - Mat3::identity()).norm() < 1e-10);
    }
}

#[test]
fn propagator_matches_exponential_on_grid() {
    for ratio in [2.0, 2.5, 3.0, 5.0, 10.0] {
        let p = params(ratio);
        let tp = derive(&p).unwrap().t_prime;
        for i in 0..=100 {
            let t = 10.0 * tp * i as f64 / 100.0;
            for k in 0..8 {
                let alpha = -PI + k as f64 * PI / 4.0;
                let u = propagator(t, alpha, &p);
                assert!(unitarity_defect(u.matrix()) < 1e-12);
                assert!((u.matrix() - expm_propagator(t, alpha, &p)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn intermediate_examples() {
    for ratio in [2.0, 2.5, 3.0, 5.0] {
        let p = params(ratio);
        let d = derive(&p).unwrap();
        let z = intermediate(0.0, &p);
        assert_eq!((z.xi, z.a, z.theta5), (PI, 1.0, 0.0));
        let e = intermediate(d.t_prime, &p);
        assert_abs_diff_eq!(e.xi, d.phi, epsilon = 1e-9);
        assert_abs_diff_eq!(e.a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.theta5, FRAC_PI_2, epsilon = 1e-9);
    }
    let e = intermediate(derive(&params(3.0)).unwrap().t_prime, &params(3.0));
    assert_abs_diff_eq!(e.xi, 2.0 * (2.0f64 / 3.0).acos(), epsilon = 1e-9);
    assert_abs_diff_eq!(e.xi, 1.682137, epsilon = 1e-6);
}

#[test]
fn intermediate_matches_textbook_forms() {
    // Full-angle formulas as an oracle away from t = 0.
    for ratio in [2.0, 3.0, 5.0] {
        let p = params(ratio);
        let ob = p.omega_bar();
        let tp = derive(&p).unwrap().t_prime;
        for i in 1..=200 {
            let t = tp * i as f64 / 200.0;
            let f = intermediate(t, &p);
            let eta = ((p.mu_b * ((ob * t).cos() - 1.0)).powi(2) + (ob * (ob * t).sin()).powi(2)).sqrt();
            let a = (ob * t).cos() * (p.omega / (2.0 * ob)).powi(2) + (p.mu_b / ob).powi(2);
            assert_abs_diff_eq!(f.eta, eta, epsilon = 1e-12);
            assert_abs_diff_eq!(f.a, a, epsilon = 1e-12);
            assert_abs_diff_eq!(
                (f.xi / 2.0).cos(),
                p.mu_b * (1.0 - (ob * t).cos()) / eta,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(f.theta5, a.clamp(-1.0, 1.0).acos(), epsilon = 1e-7);
            assert!(f.b >= 0.0);
        }
    }
}

#[test]
fn monotone_on_dense_grid() {
    for ratio in [2.0, 2.5, 3.0, 5.0, 10.0] {
        let p = params(ratio);
        let tp = derive(&p).unwrap().t_prime;
        let n = 10_000;
        let mut prev = intermediate(0.0, &p);
        let mut max_jump: f64 = 0.0;
        for i in 1..=n {
            let f = intermediate(tp * i as f64 / n as f64, &p);
            assert!(f.a < prev.a, "A not decreasing at {i}");
            assert!(f.theta5 > prev.theta5, "θ₅ not increasing at {i}");
            if i > 1 {
                max_jump = max_jump.max((f.xi - prev.xi).abs());
            }
            prev = f;
        }
        // Continuity of ξ: no jump larger than a few grid spacings' worth.
        assert!(max_jump < 1e-2, "ratio {ratio}: ξ jump {max_jump}");
        let near = intermediate(1e-9 * tp, &p);
        assert!((near.xi - PI).abs() < 1e-6);
    }
}

#[test]
fn invert_theta5_examples() {
    let p = PhysParams::new(1e3, 1.0, 2.0).unwrap();
    let tp = derive(&p).unwrap().t_prime;
    assert_eq!(invert_theta5(0.0, &p).unwrap(), 0.0);
    assert_abs_diff_eq!(invert_theta5(FRAC_PI_2, &p).unwrap(), tp, epsilon = 1e-9);
    let t = invert_theta5(FRAC_PI_4, &p).unwrap();
    assert!((intermediate(t, &p).a - FRAC_PI_4.cos()).abs() <= 1e-12);
    assert!(matches!(invert_theta5(-0.1, &p), Err(Error::Domain(_))));
    assert!(matches!(invert_theta5(1.6, &p), Err(Error::Domain(_))));
}

#[test]
fn spin_matrices() {
    let s = SpinMatrices::new();
    let (vals, _) = {
        let sz = s.sz;
        let mut d: Vec<f64> = (0..3).map(|i| sz[(i, i)].re).collect();
        d.sort_by(f64::total_cmp);
        (d, ())
    };
    assert_eq!(vals, vec![-1.0, 0.0, 1.0]);
    let comm = s.sx * s.sz - s.sz * s.sx;
    // [S_x, S_z] = −i S_y
    assert!((comm + s.sy() * c(0.0, 1.0)).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn a_squared_plus_b_squared(ratio in 2.0f64..20.0, x in 0.0f64..10.0) {
        let p = params(ratio);
        let f = intermediate(x * derive(&p).unwrap().t_prime, &p);
        prop_assert!((f.a * f.a + f.b * f.b - 1.0).abs() < 1e-12);
        prop_assert!(f.b >= 0.0);
    }

    #[test]
    fn dark_state_is_invariant(ratio in 2.0f64..20.0, x in 0.0f64..10.0, alpha in -PI..PI) {
        let p = params(ratio);
        let t = x * derive(&p).unwrap().t_prime;
        let (_, d) = bright_dark(alpha, &p);
        let v = propagator(t, alpha, &p).matrix() * d.amplitudes();
        prop_assert!((v - d.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn zero_stays_in_equatorial_plane(ratio in 2.0f64..20.0, x in 0.0f64..1.0, alpha in -PI..PI) {
        let p = params(ratio);
        let t = x * derive(&p).unwrap().t_prime;
        let v = propagator(t, alpha, &p).matrix() * StateVector3::zero().amplitudes();
        let xi = equatorial_parity(intermediate(t, &p).xi);
        let mut zero = Vec3::zeros();
        zero[ZERO] = c(1.0, 0.0);
        let residual = v - zero * zero.dotc(&v) - xi * xi.dotc(&v);
        prop_assert!(residual.norm() <= 1e-10, "residual {}", residual.norm());
    }

    #[test]
    fn derived_quantities_identities(mu in 0.1f64..10.0, ratio in 2.0f64..50.0) {
        let p = PhysParams::with_ratio(1e3, mu, ratio).unwrap();
        let d = derive(&p).unwrap();
        let want = mu * mu + p.omega * p.omega / 4.0;
        prop_assert!((d.omega_bar * d.omega_bar - want).abs() <= 1e-12 * want);
        let period = 2.0 * PI / d.omega_bar;
        prop_assert!((d.t_prime + d.t_double_prime - period).abs() <= 1e-12 * period);
        prop_assert!((0.0..=PI).contains(&d.phi));
        let x = d.omega_bar * d.t_prime;
        prop_assert!((FRAC_PI_2 - 1e-12..=PI + 1e-12).contains(&x));
    }

    #[test]
    fn invert_theta5_round_trip(ratio in 2.0f64..20.0, theta in 0.0f64..FRAC_PI_2) {
        let p = params(ratio);
        let t = invert_theta5(theta, &p).unwrap();
        prop_assert!(t >= 0.0 && t <= derive(&p).unwrap().t_prime);
        prop_assert!((intermediate(t, &p).a - theta.cos()).abs() <= 1e-12);
    }
}
