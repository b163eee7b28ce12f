use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::{Handedness, Quat};
use crate::synth::{generate_scenario, random_pose, ScenarioConfig};
use crate::traj::{TimedPose, Trajectory};

fn x_true() -> Pose<f64> {
    Pose::new(
        Vector3::new(0.03, -0.05, 0.08),
        Quat::from_axis_angle(&Vector3::new(0.3, -1.0, 0.5), 0.9),
    )
}

/// Pairs `(a, X⁻¹·a·X)` with rotation angles drawn from `[lo, hi]` degrees
/// about random axes.
fn synthetic_pairs(seed: u64, n: usize, lo: f64, hi: f64, x: &Pose<f64>) -> Vec<MotionPair<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let axis = random_pose(&mut rng, 0.0, PI).q.vector();
            let angle = rng.random_range(lo..=hi).to_radians();
            let t = Vector3::from_fn(|_, _| rng.random_range(-0.2..0.2));
            let a = Pose::new(t, Quat::from_axis_angle(&axis, angle));
            MotionPair::new(a, x.inverse().compose(&a).compose(x))
        })
        .collect()
}

fn pose_error(a: &Pose<f64>, b: &Pose<f64>) -> (f64, f64) {
    a.distance_to(b)
}

#[test]
fn exact_recovery_both_methods() {
    let x = x_true();
    let pairs = synthetic_pairs(1, 200, 10.0, 40.0, &x);
    for method in [HandEyeMethod::Tsai, HandEyeMethod::Daniilidis] {
        let r = solve_hand_eye(&pairs, method).unwrap();
        let (dt, dr) = pose_error(&r.x, &x);
        assert!(dt <= 1e-6 && dr <= 1e-6, "{method}: {dt} {dr}");
        assert!(r.residual_trans_mm < 1e-6 && r.residual_rot_deg < 1e-6);
        assert_eq!(r.pairs_used, 200);
        assert_eq!(r.method, method);
    }
}

#[test]
fn methods_agree_on_noiseless_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..20 {
        let x = random_pose(&mut rng, 0.3, 2.5);
        let pairs = synthetic_pairs(seed, 30, 5.0, 60.0, &x);
        let t = solve_hand_eye(&pairs, HandEyeMethod::Tsai).unwrap();
        let d = solve_hand_eye(&pairs, HandEyeMethod::Daniilidis).unwrap();
        let (dt, dr) = pose_error(&t.x, &d.x);
        assert!(dt <= 1e-6 && dr <= 1e-6, "seed {seed}: {dt} {dr}");
    }
}

#[test]
fn left_gauge_equivariance() {
    let x = x_true();
    let pairs = synthetic_pairs(3, 50, 10.0, 40.0, &x);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = random_pose(&mut rng, 0.5, 2.0);
    let moved: Vec<_> = pairs
        .iter()
        .map(|p| MotionPair::new(g.compose(&p.a).compose(&g.inverse()), p.b))
        .collect();
    for method in [HandEyeMethod::Tsai, HandEyeMethod::Daniilidis] {
        let r = solve_hand_eye(&moved, method).unwrap();
        let (dt, dr) = pose_error(&r.x, &g.compose(&x));
        assert!(dt <= 1e-6 && dr <= 1e-6, "{method}: {dt} {dr}");
    }
}

#[test]
fn single_axis_rotations_are_degenerate() {
    let x = x_true();
    let pairs: Vec<_> = (1..20)
        .map(|k| {
            let a = Pose::new(
                Vector3::new(0.01 * k as f64, 0.0, 0.02),
                Quat::from_axis_angle(&Vector3::z(), (5.0 * k as f64).to_radians()),
            );
            MotionPair::new(a, x.inverse().compose(&a).compose(&x))
        })
        .collect();
    for method in [HandEyeMethod::Tsai, HandEyeMethod::Daniilidis] {
        assert_eq!(solve_hand_eye(&pairs, method), Err(CalibError::DegenerateMotion));
    }
    assert!(!rotation_axes_observable(&pairs));
}

#[test]
fn too_few_pairs_rejected() {
    let pairs = synthetic_pairs(5, 1, 10.0, 40.0, &x_true());
    assert_eq!(
        solve_hand_eye(&pairs, HandEyeMethod::Daniilidis),
        Err(CalibError::TooFewPairs { found: 1 })
    );
}

#[test]
fn residual_examples() {
    let x = x_true();
    let pairs = synthetic_pairs(6, 20, 10.0, 40.0, &x);
    let (t, r) = residual(&x, &pairs);
    assert!(t <= 1e-9 && r <= 1e-9);

    let ident = vec![MotionPair::new(Pose::identity(), Pose::identity()); 3];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert_eq!(residual(&random_pose(&mut rng, 1.0, 3.0), &ident), (0.0, 0.0));
}

#[test]
fn residual_closed_form_single_pair() {
    // Pure 90° rotation about z with true X = I. Perturbing X by δ = 1 mm
    // along x gives |R·δ − δ| = 2·sin(45°)·1 mm = √2 mm and no rotation
    // residual.
    let a = Pose::from_rotation(Quat::from_axis_angle(&Vector3::z(), PI / 2.0));
    let pair = MotionPair::new(a, a);
    let x = Pose::from_translation(Vector3::new(0.001, 0.0, 0.0));
    let (t, r) = residual(&x, &[pair]);
    assert!((t - 2f64.sqrt()).abs() < 1e-12, "{t}");
    assert!(r < 1e-12);
    // Along the rotation axis the perturbation is invisible.
    let x = Pose::from_translation(Vector3::new(0.0, 0.0, 0.001));
    assert!(residual(&x, &[pair]).0 < 1e-12);
}

fn scenario(seed: u64, sigma_t: f64, sigma_r: f64) -> (Trajectory<f64>, Trajectory<f64>) {
    let s = generate_scenario::<f64>(&ScenarioConfig {
        seed,
        duration_s: 40.0,
        x_true: x_true(),
        sigma_t_m: sigma_t,
        sigma_r_deg: sigma_r,
        ..Default::default()
    });
    (s.gt, s.sensor)
}

#[test]
fn scenario_pairs_satisfy_constraint() {
    let (gt, sensor) = scenario(0, 0.0, 0.0);
    let pairs = build_motion_pairs(&gt, &sensor, &PairParams::default()).unwrap();
    assert!(pairs.len() > 100);
    let x = x_true();
    for p in &pairs {
        let (dt, dr) = p.a.compose(&x).distance_to(&x.compose(&p.b));
        assert!(dt <= 1e-9 && dr <= 1e-9);
        assert!(p.rot_angle_deg >= 1.0);
    }
}

#[test]
fn auto_stride_reaches_five_degree_median() {
    let (gt, _) = scenario(0, 0.0, 0.0);
    let poses: Vec<_> = gt.poses().copied().collect();
    let s = choose_stride(&poses).unwrap();
    let mut angles: Vec<f64> = poses
        .iter()
        .zip(&poses[s..])
        .map(|(a, b)| a.q.angle_to(&b.q).to_degrees())
        .collect();
    angles.sort_by(f64::total_cmp);
    assert!(angles[angles.len() / 2] >= 5.0);
    if s > 1 {
        let mut prev: Vec<f64> = poses
            .iter()
            .zip(&poses[s - 1..])
            .map(|(a, b)| a.q.angle_to(&b.q).to_degrees())
            .collect();
        prev.sort_by(f64::total_cmp);
        assert!(prev[prev.len() / 2] < 5.0);
    }
}

#[test]
fn static_trajectories_have_too_few_pairs() {
    let samples: Vec<_> = (0..100)
        .map(|i| TimedPose::new(i as f64 / 30.0, x_true()))
        .collect();
    let a = Trajectory::from_samples(samples).unwrap().with_rate(30.0);
    assert!(matches!(
        build_motion_pairs(&a, &a, &PairParams::default()),
        Err(CalibError::TooFewPairs { .. })
    ));
}

#[test]
fn small_rotations_filtered() {
    // Steady 0.5° per stride about changing axes: everything is below 1°.
    let samples: Vec<_> = (0..100)
        .map(|i| {
            let axis = Vector3::new(1.0, (i as f64 * 0.3).sin(), (i as f64 * 0.2).cos());
            TimedPose::new(
                i as f64 / 30.0,
                Pose::from_rotation(Quat::from_axis_angle(&axis, (0.5f64 * i as f64 / 99.0).to_radians())),
            )
        })
        .collect();
    let a = Trajectory::from_samples(samples).unwrap().with_rate(30.0);
    let params = PairParams {
        stride: Some(1),
        ..Default::default()
    };
    assert!(matches!(
        build_motion_pairs(&a, &a, &params),
        Err(CalibError::TooFewPairs { found: 0 })
    ));
}

#[test]
fn mismatched_handedness_rejected() {
    let (gt, sensor) = scenario(0, 0.0, 0.0);
    let lhs = sensor.with_handedness(Handedness::Left);
    assert!(matches!(
        build_motion_pairs(&gt, &lhs, &PairParams::default()),
        Err(CalibError::InvalidArgument(_))
    ));
}

#[test]
fn denser_trajectory_is_interpolated() {
    // Ground truth at 120 Hz, sensor at 30 Hz sampled from the same motion.
    let x = x_true();
    let dense = generate_scenario::<f64>(&ScenarioConfig {
        rate_hz: 120.0,
        duration_s: 30.0,
        x_true: x,
        ..Default::default()
    });
    let sparse = dense.sensor.dilute(4).unwrap();
    let pairs = build_motion_pairs(&dense.gt, &sparse, &PairParams::default()).unwrap();
    let r = solve_hand_eye(&pairs, HandEyeMethod::Daniilidis).unwrap();
    let (dt, dr) = r.x.distance_to(&x);
    assert!(dt < 1e-9 && dr < 1e-9, "{dt} {dr}");
}

#[test]
fn scenario_recovery_from_trajectories() {
    let (gt, sensor) = scenario(0, 0.0, 0.0);
    let pairs = build_motion_pairs(&gt, &sensor, &PairParams::default()).unwrap();
    for method in [HandEyeMethod::Tsai, HandEyeMethod::Daniilidis] {
        let r = solve_hand_eye(&pairs, method).unwrap();
        let (dt, dr) = r.x.distance_to(&x_true());
        assert!(dt < 1e-6 && dr < 1e-6);
    }
}

#[test]
fn residuals_grow_with_noise() {
    let medians: Vec<f64> = [0.0, 0.0005, 0.002]
        .iter()
        .map(|&sigma| {
            let mut res: Vec<f64> = (0..10)
                .map(|seed| {
                    let (gt, sensor) = scenario(seed, sigma, 0.0);
                    let pairs = build_motion_pairs(&gt, &sensor, &PairParams::default()).unwrap();
                    solve_hand_eye(&pairs, HandEyeMethod::Daniilidis).unwrap().residual_trans_mm
                })
                .collect();
            res.sort_by(f64::total_cmp);
            res[5]
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");
}

#[test]
fn noisy_residuals_are_millimeter_scale() {
    let (gt, sensor) = scenario(11, 0.0005, 0.1);
    let pairs = build_motion_pairs(&gt, &sensor, &PairParams::default()).unwrap();
    let r = solve_hand_eye(&pairs, HandEyeMethod::Daniilidis).unwrap();
    assert!(r.residual_trans_mm > 0.1 && r.residual_trans_mm < 10.0, "{}", r.residual_trans_mm);
    assert!(r.residual_rot_deg > 0.01 && r.residual_rot_deg < 0.3, "{}", r.residual_rot_deg);
}

#[test]
fn result_text_round_trip() {
    let pairs = synthetic_pairs(8, 10, 10.0, 40.0, &x_true());
    let r = solve_hand_eye(&pairs, HandEyeMethod::Tsai).unwrap();
    let text = r.to_text();
    assert!(text.starts_with("method=tsai\nx="));
    let back = HandEyeResult::from_text(&text).unwrap();
    assert_eq!(back.method, HandEyeMethod::Tsai);
    assert_eq!(back.pairs_used, 10);
    let (dt, dr) = back.x.distance_to(&r.x);
    assert!(dt < 1e-9 && dr < 1e-8);
}

#[test]
fn method_parsing() {
    assert_eq!("Tsai".parse::<HandEyeMethod>(), Ok(HandEyeMethod::Tsai));
    assert_eq!("daniilidis".parse::<HandEyeMethod>(), Ok(HandEyeMethod::Daniilidis));
    assert!("park".parse::<HandEyeMethod>().is_err());
}

#[test]
fn single_precision_solve() {
    let x = x_true();
    let pairs: Vec<MotionPair<f32>> = synthetic_pairs(9, 50, 10.0, 40.0, &x)
        .iter()
        .map(|p| MotionPair::new(p.a.cast(), p.b.cast()))
        .collect();
    let r = solve_hand_eye(&pairs, HandEyeMethod::Daniilidis).unwrap();
    let (dt, dr) = r.x.cast::<f64>().distance_to(&x);
    assert!(dt < 1e-3 && dr < 1e-3, "{dt} {dr}");
}
