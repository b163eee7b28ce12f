use nalgebra::Vector3;

use super::*;
use crate::geom::Pose;
use crate::synth::{generate_scenario, motion_pose, ScenarioConfig};
use crate::traj::TimedPose;

fn series(rate: f64, duration: f64, t0: f64, f: impl Fn(f64) -> [f64; 3]) -> Trajectory<f64> {
    let n = (duration * rate).round() as usize + 1;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            TimedPose::new(t0 + t, Pose::from_translation(Vector3::from(f(t))))
        })
        .collect();
    Trajectory::from_samples(samples).unwrap().with_rate(rate)
}

fn sine(t: f64) -> [f64; 3] {
    [0.05 * (std::f64::consts::PI * t).sin(), 0.0, 0.0]
}

#[test]
fn monotone_series_has_no_peaks() {
    let t = series(30.0, 5.0, 0.0, |t| [t, 0.0, 0.0]);
    assert!(matches!(detect_peaks(&t, Axis::X, 0.01, 0.5), Err(SyncError::NoPeaks { axis: Axis::X, .. })));
}

#[test]
fn triangular_pulse_has_one_apex() {
    let t = series(100.0, 2.0, 10.0, |t| [0.0, 0.0, (0.02 - (t - 1.0).abs() * 0.1).max(0.0)]);
    let peaks = detect_peaks(&t, Axis::Z, 0.01, 0.5).unwrap();
    assert_eq!(peaks.peaks.len(), 1);
    let p = peaks.peaks[0];
    assert_eq!(p.polarity, Polarity::Max);
    assert!((p.stamp - 11.0).abs() < 1e-9);
    assert!((p.value - 0.02).abs() < 1e-12);
}

#[test]
fn sine_extrema_at_quarter_phases() {
    let rate = 30.0;
    let t = series(rate, 10.0, 0.0, sine);
    let peaks = detect_peaks(&t, Axis::X, 0.01, 0.5).unwrap();
    let maxima: Vec<f64> = peaks.of(Polarity::Max).map(|p| p.stamp).collect();
    let minima: Vec<f64> = peaks.of(Polarity::Min).map(|p| p.stamp).collect();
    assert_eq!(maxima.len(), 5);
    assert_eq!(minima.len(), 5);
    for (k, s) in maxima.iter().enumerate() {
        assert!((s - (0.5 + 2.0 * k as f64)).abs() <= 1.0 / rate, "{s}");
    }
    for (k, s) in minima.iter().enumerate() {
        assert!((s - (1.5 + 2.0 * k as f64)).abs() <= 1.0 / rate, "{s}");
    }
    assert!(peaks.peaks.windows(2).all(|w| w[0].stamp < w[1].stamp));
}

#[test]
fn thinning_keeps_most_prominent() {
    // Two bumps 0.2 s apart; the taller one survives a 0.5 s separation.
    let t = series(100.0, 2.0, 0.0, |t| {
        let bump = |c: f64, h: f64| h * (-((t - c) / 0.03).powi(2)).exp();
        [bump(0.9, 0.02) + bump(1.1, 0.03), 0.0, 0.0]
    });
    let all = detect_peaks(&t, Axis::X, 0.005, 0.0).unwrap();
    assert_eq!(all.of(Polarity::Max).count(), 2);
    let thinned = detect_peaks(&t, Axis::X, 0.005, 0.5).unwrap();
    let kept: Vec<_> = thinned.of(Polarity::Max).collect();
    assert_eq!(kept.len(), 1);
    assert!((kept[0].stamp - 1.1).abs() < 1e-9);
}

#[test]
fn plateau_peak_reports_middle() {
    let vals = [0.0, 0.02, 0.05, 0.05, 0.05, 0.02, 0.0];
    let samples = vals
        .iter()
        .enumerate()
        .map(|(i, v)| TimedPose::new(i as f64, Pose::from_translation(Vector3::new(*v, 0.0, 0.0))))
        .collect();
    let t = Trajectory::from_samples(samples).unwrap();
    let p = detect_peaks(&t, Axis::X, 0.01, 0.0).unwrap();
    assert_eq!(p.peaks.len(), 1);
    assert_eq!(p.peaks[0].stamp, 3.0);
}

#[test]
fn detect_peaks_argument_errors() {
    let t = series(30.0, 1.0, 0.0, sine);
    assert!(matches!(detect_peaks(&t, Axis::X, 0.0, 0.5), Err(SyncError::InvalidArgument(_))));
    let empty = Trajectory::<f64>::empty("e", crate::geom::Handedness::Right);
    assert!(detect_peaks(&empty, Axis::X, 0.01, 0.5).is_err());
}

fn scenario_pair(offset: f64) -> (Trajectory<f64>, Trajectory<f64>) {
    let s = generate_scenario::<f64>(&ScenarioConfig {
        offset_true_s: offset,
        ..Default::default()
    });
    (s.gt, s.sensor)
}

#[test]
fn exact_copy_has_zero_offset() {
    let (a, _) = scenario_pair(0.0);
    let r = estimate_offset(&a, &a, &SyncParams::default()).unwrap();
    assert_eq!(r.offset_s, 0.0);
    assert_eq!(r.spread_s, 0.0);
    assert!(r.matched_count > 10);
    assert_eq!(r.matched_count, r.per_peak_diffs.len());
}

#[test]
fn shifted_copy_recovers_offset() {
    let (a, _) = scenario_pair(0.0);
    let b = apply_offset(&a, 0.120).unwrap();
    let r = estimate_offset(&a, &b, &SyncParams::default()).unwrap();
    assert!((r.offset_s - 0.120).abs() <= 0.005, "{}", r.offset_s);
}

#[test]
fn flat_versus_sine_has_no_matches() {
    let flat = series(30.0, 10.0, 0.0, |_| [0.1, 0.2, 0.3]);
    let moving = series(30.0, 10.0, 0.0, sine);
    assert_eq!(estimate_offset(&flat, &moving, &SyncParams::default()), Err(SyncError::NoMatches));
}

#[test]
fn disjoint_spans_are_rejected() {
    let a = series(30.0, 10.0, 0.0, sine);
    let b = series(30.0, 10.0, 100.0, sine);
    assert_eq!(estimate_offset(&a, &b, &SyncParams::default()), Err(SyncError::InsufficientOverlap));
}

#[test]
fn apply_offset_round_trip() {
    let (a, _) = scenario_pair(0.0);
    assert_eq!(apply_offset(&a, 0.0).unwrap(), a);
    let back = apply_offset(&apply_offset(&a, 0.25).unwrap(), -0.25).unwrap();
    for (x, y) in a.samples().iter().zip(back.samples()) {
        assert!((x.stamp - y.stamp).abs() < 1e-6);
        assert_eq!(x.pose, y.pose);
    }
}

#[test]
fn compensated_offset_is_near_zero() {
    let (a, b) = scenario_pair(0.12);
    let r = estimate_offset(&a, &b, &SyncParams::default()).unwrap();
    let fixed = apply_offset(&b, -r.offset_s).unwrap();
    let again = estimate_offset(&a, &fixed, &SyncParams::default()).unwrap();
    assert!(again.offset_s.abs() <= 0.002);
}

#[test]
fn offset_is_antisymmetric() {
    let params = SyncParams::default();
    let cfg = ScenarioConfig::default();
    // b sampled on a shifted, coarser grid so the two peak sets differ.
    let a = generate_scenario::<f64>(&ScenarioConfig { rate_hz: 120.0, ..cfg.clone() }).gt;
    let b = series(30.0, 59.0, cfg.start_stamp + 0.07, |t| motion_pose(&cfg, t + 0.011).t.into());
    let ab = estimate_offset(&a, &b, &params).unwrap();
    let ba = estimate_offset(&b, &a, &params).unwrap();
    assert!((ab.offset_s + ba.offset_s).abs() <= 1.0 / 30.0);
}

#[test]
fn offset_invariant_to_position_bias() {
    let (a, b) = scenario_pair(0.05);
    let biased = b.map_poses(|_, p| Pose::new(p.t + Vector3::new(1.0, -2.0, 0.5), p.q));
    let p = SyncParams::default();
    let r0 = estimate_offset(&a, &b, &p).unwrap();
    let r1 = estimate_offset(&a, &biased, &p).unwrap();
    assert!((r0.offset_s - r1.offset_s).abs() < 1e-9);
}

#[test]
fn noiseless_shifts_recovered() {
    for offset in [0.0, 0.05, 0.12, 0.2] {
        let (a, b) = scenario_pair(offset);
        let r = estimate_offset(&a, &b, &SyncParams::default()).unwrap();
        assert!((r.offset_s - offset).abs() <= 0.005, "{offset}: {}", r.offset_s);
    }
}

#[test]
fn resampled_stream_within_one_coarse_period() {
    // Reference at 120 Hz; second stream sampled from the same motion at
    // 30 Hz on an unrelated grid, with its clock shifted by `offset`.
    let cfg = ScenarioConfig::default();
    let a = generate_scenario::<f64>(&ScenarioConfig { rate_hz: 120.0, ..cfg.clone() }).gt;
    for offset in [0.0, 0.05, 0.12, 0.2] {
        let phase = 0.013;
        let b = series(30.0, 59.0, cfg.start_stamp + phase + offset, |t| motion_pose(&cfg, t + phase).t.into());
        let r = estimate_offset(&a, &b, &SyncParams::default()).unwrap();
        assert!((r.offset_s - offset).abs() <= 1.0 / 30.0, "{offset}: {}", r.offset_s);
    }
}

#[test]
fn report_text_round_trip() {
    let r = OffsetReport::from_diffs(vec![0.1, 0.12, 0.14]);
    assert!((r.offset_s - 0.12).abs() < 1e-15);
    let back = OffsetReport::from_text(&r.to_text()).unwrap();
    assert_eq!(back.matched_count, 3);
    assert!((back.offset_s - r.offset_s).abs() < 1e-9);
    assert!((back.spread_s - r.spread_s).abs() < 1e-9);
}

#[test]
fn axis_parsing() {
    assert_eq!(parse_axes("xyz").unwrap(), Axis::ALL.to_vec());
    assert_eq!(parse_axes("z,x").unwrap(), vec![Axis::X, Axis::Z]);
    assert!(parse_axes("w").is_err());
    assert!(parse_axes("").is_err());
}
