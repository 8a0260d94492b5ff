use nvq3_core::algebra::*;
use nvq3_core::compiler::{lambda8_gate, Pulse, PulseSchedule};
use nvq3_core::io;
use nvq3_core::nv::{derive, propagator, PhysParams};
use nvq3_core::simulator::*;
use std::f64::consts::PI;

/// μB = 1 and Ω = ratio·μB, with D set from the ratio D/Ω̄.
fn params(d_over_bar: f64, ratio: f64) -> PhysParams {
    let bar = PhysParams::with_ratio(1.0, 1.0, ratio).unwrap().omega_bar();
    PhysParams::with_ratio(d_over_bar * bar, 1.0, ratio).unwrap()
}

fn single(p: PhysParams, t: f64, alpha: f64) -> PulseSchedule {
    let mut s = PulseSchedule::empty(p);
    s.pulses.push(Pulse::new(t, alpha).unwrap());
    s
}

fn lab_distance(s: &PulseSchedule, tol: f64) -> f64 {
    let lab = play_lab(s, &SimOptions::lab(tol)).unwrap();
    let rwa = play_rwa(s).unwrap();
    (lab.final_unitary - rwa.final_unitary).norm()
}

#[test]
fn single_pulse_frame_consistency() {
    let mut prev = f64::INFINITY;
    for d in [1e2, 1e3, 1e4] {
        let p = params(d, 3.0);
        let s = single(p, derive(&p).unwrap().t_prime, 0.9);
        let dist = lab_distance(&s, 1e-10);
        assert!(dist < prev, "D/Ω̄ = {d}: {dist} not below {prev}");
        prev = dist;
    }
    assert!(prev <= 1e-3, "{prev}");
}

#[test]
fn carrier_phase_is_absolute() {
    // Splitting one pulse into two with the same α must not change the
    // lab-frame result, since the drive uses absolute time.
    let p = params(1e2, 3.0);
    let t = derive(&p).unwrap().t_prime;
    let one = single(p, t, 0.4);
    let mut two = PulseSchedule::empty(p);
    two.pulses.push(Pulse::new(0.37 * t, 0.4).unwrap());
    two.pulses.push(Pulse::new(0.63 * t, 0.4).unwrap());
    let opts = SimOptions::lab(1e-11);
    let a = play_lab(&one, &opts).unwrap().final_unitary;
    let b = play_lab(&two, &opts).unwrap().final_unitary;
    assert!((a - b).norm() < 1e-8);
}

#[test]
fn halving_tolerance_is_self_consistent() {
    let p = params(1e2, 2.5);
    let s = single(p, derive(&p).unwrap().t_prime, -0.3);
    let reference = play_lab(&s, &SimOptions::lab(1e-13)).unwrap().final_unitary;
    let rwa = play_rwa(&s).unwrap().final_unitary;
    let mut tol = 1e-7;
    while tol > 1e-11 {
        let coarse = play_lab(&s, &SimOptions::lab(tol)).unwrap().final_unitary;
        let fine = play_lab(&s, &SimOptions::lab(tol / 2.0)).unwrap().final_unitary;
        let (dc, df) = ((coarse - rwa).norm(), (fine - rwa).norm());
        assert!(df <= 2.0 * dc, "tol {tol}: {df} vs {dc}");
        let (ec, ef) = ((coarse - reference).norm(), (fine - reference).norm());
        assert!(ef <= 2.0 * ec + 1e-12, "tol {tol}: integration error {ef} vs {ec}");
        tol /= 2.0;
    }
}

#[test]
fn unitarity_drift_within_ten_tolerances() {
    let p = params(1e3, 2.0 * 2f64.sqrt());
    let (s, _) = lambda8_gate(0.8, &p).unwrap();
    for tol in [1e-8, 1e-10, 1e-12] {
        let r = play_lab(&s, &SimOptions::lab(tol)).unwrap();
        assert!(
            r.unitarity_drift <= 10.0 * tol,
            "tol {tol}: drift {}",
            r.unitarity_drift
        );
        assert_eq!(r.checkpoints.len(), s.len());
    }
}

#[test]
fn rwa_error_is_nonnegative_and_vanishes_for_weak_drive() {
    let mut prev = f64::INFINITY;
    for d in [50.0, 200.0, 800.0] {
        let p = params(d, 3.0);
        let s = single(p, derive(&p).unwrap().t_prime, 0.0);
        let e = rwa_error(&s, &SimOptions::lab(1e-11)).unwrap();
        assert!(e >= 0.0);
        assert!(e < prev);
        prev = e;
    }
}

#[test]
fn rwa_playback_is_the_closed_form_product() {
    let p = params(1e3, 3.0);
    let mut s = PulseSchedule::empty(p);
    for k in 0..5 {
        s.pulses.push(Pulse::new(0.3 + 0.1 * k as f64, PI - k as f64).unwrap());
    }
    let r = play_rwa(&s).unwrap();
    let want = s.pulses.iter().fold(Mat3::identity(), |acc, q| {
        propagator(q.duration, q.phase, &p).into_matrix() * acc
    });
    assert!((r.final_unitary - want).norm() < 1e-14);
    assert!(r.fidelity.is_none());
}

#[test]
fn sweep_tables() {
    let rows = sweep_intermediate(&[2.0, 3.0, 5.0], 201).unwrap();
    assert_eq!(rows.len(), 603);
    for (k, chunk) in rows.chunks(201).enumerate() {
        assert!(chunk.windows(2).all(|w| w[1].theta5_over_pi > w[0].theta5_over_pi));
        assert!((chunk[0].xi_over_pi - 1.0).abs() < 1e-12);
        assert!((chunk[200].theta5_over_pi - 0.5).abs() < 1e-9);
        let phi = [0.0, 2.0 * (2.0f64 / 3.0).acos(), 2.0 * (0.4f64).acos()][k];
        assert!((chunk[200].xi_over_pi * PI - phi).abs() < 1e-9);
    }
    assert!((rows[602].xi_over_pi * PI - 2.318559).abs() < 1e-6);
    assert!(sweep_intermediate(&[3.0, 1.5], 10).is_err());
}

#[test]
fn sim_report_json_round_trip() {
    let p = params(1e2, 3.0);
    let s = single(p, 0.5, 0.1);
    let opts = SimOptions {
        frame: Frame::Both,
        ..SimOptions::lab(1e-9)
    };
    let r = simulate(&s, &opts).unwrap();
    let text = io::to_tagged_json(&r).unwrap();
    assert!(text.contains("\"rwa_lab_distance\""));
    assert!(text.contains("\"lab_unitary\""));
    let back: SimReport = io::from_tagged_json(&text).unwrap();
    assert_eq!(back, r);
}
