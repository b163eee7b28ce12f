//! Deterministic synthetic scenarios with known ground truth.
//!
//! Ground-truth motion is a smooth sum of sinusoids with incommensurate
//! frequencies per axis, in translation and in the rotation vector, so
//! relative rotations always span several axes. A simulated secondary sensor
//! is rigidly attached through `x_true`, its clock is shifted by
//! `offset_true_s`, and Gaussian noise is optionally added.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; Gaussian samples
//! use `rand_distr::StandardNormal` (ziggurat) on that stream, so outputs are
//! identical across platforms for a given seed.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geom::{Handedness, Pose, Quat, RotVec};
use crate::keyval::{format_pose_fields, KeyValError, KeyValues};
use crate::traj::{TimedPose, Trajectory};
use crate::Real;

const SQRT_3: f64 = 1.732_050_807_568_877_2;
const SQRT_5: f64 = 2.236_067_977_499_79;

/// Angular frequencies (rad/s) of the two translation sinusoids per axis.
const TRANS_OMEGA: [[f64; 2]; 3] = [[0.7, 0.7 * SQRT_2], [0.9, 0.9 * SQRT_3], [0.5, 0.5 * SQRT_5]];
const TRANS_PHASE: [[f64; 2]; 3] = [[0.0, 1.0], [0.5, 2.0], [1.3, 0.3]];
/// Angular frequencies (rad/s) of the rotation-vector components.
const ROT_OMEGA: [f64; 3] = [0.8, 0.6 * SQRT_2, 0.45 * SQRT_3];
const ROT_PHASE: [f64; 3] = [0.2, 1.7, 2.9];

/// Parameters of a synthetic recording.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub rate_hz: f64,
    /// Stamp of the first ground-truth sample.
    pub start_stamp: f64,
    pub trans_amplitude_m: f64,
    pub rot_amplitude_deg: f64,
    /// Sensor pose relative to the ground-truth body: `sensor = gt · x_true`.
    pub x_true: Pose<f64>,
    /// Added to every sensor stamp.
    pub offset_true_s: f64,
    pub sigma_t_m: f64,
    pub sigma_r_deg: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            duration_s: 60.0,
            rate_hz: 30.0,
            start_stamp: 1_700_000_000.0,
            trans_amplitude_m: 0.15,
            rot_amplitude_deg: 30.0,
            x_true: Pose::identity(),
            offset_true_s: 0.0,
            sigma_t_m: 0.0,
            sigma_r_deg: 0.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite()) {
            return Err(format!("rate_hz must be > 0, got {}", self.rate_hz));
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(format!("duration_s must be >= 0, got {}", self.duration_s));
        }
        for (name, v) in [
            ("trans_amplitude_m", self.trans_amplitude_m),
            ("rot_amplitude_deg", self.rot_amplitude_deg),
            ("sigma_t_m", self.sigma_t_m),
            ("sigma_r_deg", self.sigma_r_deg),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("{name} must be >= 0, got {v}"));
            }
        }
        if self.start_stamp + self.offset_true_s.min(0.0) < 0.0 {
            return Err("offset would produce negative sensor stamps".into());
        }
        Ok(())
    }

    /// Number of samples: `floor(duration · rate) + 1`.
    pub fn sample_count(&self) -> usize {
        (self.duration_s * self.rate_hz + 1e-9).floor() as usize + 1
    }
}

/// Known quantities behind a generated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub x_true: Pose<f64>,
    pub offset_true_s: f64,
    pub sigma_t_m: f64,
    pub sigma_r_deg: f64,
    pub seed: u64,
}

impl Truth {
    /// Text sidecar: `x_true`, `offset_true_s`, sigmas and seed as
    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        format!(
            "x_true={}\noffset_true_s={:.9}\nsigma_t_m={:.9}\nsigma_r_deg={:.9}\nseed={}\n",
            format_pose_fields(&self.x_true),
            self.offset_true_s,
            self.sigma_t_m,
            self.sigma_r_deg,
            self.seed
        )
    }

    pub fn from_text(text: &str) -> Result<Self, KeyValError> {
        let kv = KeyValues::parse(text)?;
        kv.expect_only(&["x_true", "offset_true_s", "sigma_t_m", "sigma_r_deg", "seed"])?;
        let missing = |k: &str| KeyValError::Missing(k.to_string());
        Ok(Self {
            x_true: kv.pose("x_true")?.ok_or_else(|| missing("x_true"))?,
            offset_true_s: kv.f64("offset_true_s")?.ok_or_else(|| missing("offset_true_s"))?,
            sigma_t_m: kv.f64("sigma_t_m")?.ok_or_else(|| missing("sigma_t_m"))?,
            sigma_r_deg: kv.f64("sigma_r_deg")?.ok_or_else(|| missing("sigma_r_deg"))?,
            seed: kv.parse_value("seed", "an unsigned integer")?.ok_or_else(|| missing("seed"))?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario<T: Real> {
    /// Ground truth in frame `"base"`.
    pub gt: Trajectory<T>,
    /// Secondary sensor in frame `"sensor"`, same length as `gt`.
    pub sensor: Trajectory<T>,
    pub truth: Truth,
}

/// Noise-free ground-truth pose at time `t` seconds after the start.
pub fn motion_pose(cfg: &ScenarioConfig, t: f64) -> Pose<f64> {
    let mut p = Vector3::zeros();
    for axis in 0..3 {
        let [w1, w2] = TRANS_OMEGA[axis];
        let [f1, f2] = TRANS_PHASE[axis];
        p[axis] = cfg.trans_amplitude_m * (0.6 * (w1 * t + f1).sin() + 0.4 * (w2 * t + f2).sin());
    }
    let amp = cfg.rot_amplitude_deg.to_radians();
    let r = Vector3::from_fn(|i, _| amp * (ROT_OMEGA[i] * t + ROT_PHASE[i]).sin());
    Pose::new(p, RotVec(r).to_quat())
}

/// Builds the ground-truth and sensor trajectories for `cfg`.
///
/// # Panics
/// When `cfg` fails [`ScenarioConfig::validate`].
pub fn generate_scenario<T: Real>(cfg: &ScenarioConfig) -> Scenario<T> {
    if let Err(e) = cfg.validate() {
        panic!("invalid scenario config: {e}");
    }
    let n = cfg.sample_count();
    let gt_samples: Vec<TimedPose<f64>> = (0..n)
        .map(|i| {
            let t = i as f64 / cfg.rate_hz;
            TimedPose::new(cfg.start_stamp + t, motion_pose(cfg, t))
        })
        .collect();
    let gt = Trajectory::new(gt_samples, "base", Handedness::Right)
        .expect("generated stamps are increasing")
        .with_rate(cfg.rate_hz);
    let attached = gt
        .map_poses(|_, p| p.compose(&cfg.x_true))
        .shifted(cfg.offset_true_s)
        .expect("validated offset keeps stamps non-negative")
        .with_frame("sensor");
    let sensor = perturb(&attached, cfg.seed, cfg.sigma_t_m, cfg.sigma_r_deg);
    Scenario {
        gt: gt.cast(),
        sensor: sensor.cast(),
        truth: Truth {
            x_true: cfg.x_true,
            offset_true_s: cfg.offset_true_s,
            sigma_t_m: cfg.sigma_t_m,
            sigma_r_deg: cfg.sigma_r_deg,
            seed: cfg.seed,
        },
    }
}

/// Adds i.i.d. Gaussian noise: `N(0, σ_t²)` per translation axis, and a
/// right-multiplied rotation about a uniformly random axis with angle
/// `N(0, σ_r²)`. Zero sigmas leave the corresponding component untouched.
pub fn perturb<T: Real>(traj: &Trajectory<T>, seed: u64, sigma_t_m: f64, sigma_r_deg: f64) -> Trajectory<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_r = sigma_r_deg.to_radians();
    traj.map_poses(|_, p| {
        let dt: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal) * sigma_t_m);
        let axis = random_unit_vector(&mut rng);
        let angle = rng.sample::<f64, _>(StandardNormal) * sigma_r;
        let mut out = *p;
        if sigma_t_m > 0.0 {
            out.t += Vector3::new(T::lit(dt[0]), T::lit(dt[1]), T::lit(dt[2]));
        }
        if sigma_r > 0.0 {
            out.q = out.q * Quat::from_axis_angle(&axis.map(T::lit), T::lit(angle));
        }
        out
    })
}

fn random_unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// Random pose: translation uniform in `[-max_trans, max_trans]³`, rotation
/// about a uniform random axis by an angle uniform in `[0, max_angle]`.
pub fn random_pose<R: Rng>(rng: &mut R, max_trans: f64, max_angle: f64) -> Pose<f64> {
    let t = Vector3::from_fn(|_, _| {
        if max_trans > 0.0 {
            rng.random_range(-max_trans..=max_trans)
        } else {
            0.0
        }
    });
    let axis = random_unit_vector(rng);
    let angle = if max_angle > 0.0 {
        rng.random_range(0.0..=max_angle.min(PI))
    } else {
        0.0
    };
    Pose::new(t, Quat::from_axis_angle(&axis, angle))
}
