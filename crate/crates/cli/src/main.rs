use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use trajcal::calib::{build_motion_pairs, solve_hand_eye, HandEyeMethod, PairParams};
use trajcal::geom::Handedness;
use trajcal::keyval::{format_pose_fields, parse_pose_fields};
use trajcal::metrics::{ape, emit_report, ReportFormat};
use trajcal::replay::{compute_tcp_targets, normalize_estimate, normalize_ground_truth, validate_waypoint_spacing};
use trajcal::sync::{apply_offset, estimate_offset, parse_axes, Axis, SyncParams};
use trajcal::synth::{generate_scenario, ScenarioConfig};
use trajcal::traj::{default_max_dt, parse_tum, write_tum};
use trajcal::{Error, HandEyeResult, Pose, ReplayConfig, Trajectory};

#[derive(Parser)]
#[command(name = "trajcal", version, about = "Trajectory calibration and evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a left-handed TUM trajectory to right-handed coordinates.
    Convert {
        input: PathBuf,
        output: PathBuf,
    },
    /// Estimate the clock offset of B relative to A from position peaks.
    Sync(SyncArgs),
    /// Hand-eye calibration: solve a·X = X·b from the relative motions of A and B.
    Calibrate(CalibrateArgs),
    /// Robot TCP targets from a right-handed OptiTrack trajectory and a replay config.
    ReplayTargets {
        opti: PathBuf,
        config: PathBuf,
        output: PathBuf,
    },
    /// Express a trajectory relative to its first pose.
    Normalize(NormalizeArgs),
    /// Check consecutive waypoint distances against the end-effector step limit.
    Validate {
        input: PathBuf,
        /// Maximum waypoint step in meters.
        #[arg(long, default_value_t = 0.03)]
        eef_step: f64,
    },
    /// Absolute pose error of an estimate against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic ground-truth / sensor pair with known calibration.
    Gen(GenArgs),
}

#[derive(Args)]
struct SyncArgs {
    a: PathBuf,
    b: PathBuf,
    /// Comma-separated position axes used for peak matching.
    #[arg(long, default_value = "x,y,z")]
    axes: String,
    /// Minimum peak prominence in meters.
    #[arg(long, default_value_t = 0.01)]
    prominence: f64,
    /// Minimum spacing between peaks of one polarity in seconds.
    #[arg(long, default_value_t = 0.5)]
    min_separation: f64,
    /// Largest stamp difference for two peaks to be matched, in seconds.
    #[arg(long, default_value_t = 0.5)]
    match_window: f64,
    /// Write B with the offset removed (stamps shifted by -offset).
    #[arg(long, value_name = "OUT")]
    apply: Option<PathBuf>,
    /// Write the offset report to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tsai,
    Daniilidis,
}

impl From<MethodArg> for HandEyeMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Tsai => HandEyeMethod::Tsai,
            MethodArg::Daniilidis => HandEyeMethod::Daniilidis,
        }
    }
}

/// A numeric flag that can also be left to `auto`.
#[derive(Clone, Copy, Debug)]
enum Auto<V> {
    Auto,
    Value(V),
}

impl<V: FromStr> FromStr for Auto<V> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Auto::Auto);
        }
        s.parse().map(Auto::Value).map_err(|_| format!("expected a number or 'auto', got '{s}'"))
    }
}

impl<V: fmt::Display> fmt::Display for Auto<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Auto::Auto => f.write_str("auto"),
            Auto::Value(v) => v.fmt(f),
        }
    }
}

impl<V> Auto<V> {
    fn value(self) -> Option<V> {
        match self {
            Auto::Auto => None,
            Auto::Value(v) => Some(v),
        }
    }
}

#[derive(Args)]
struct CalibrateArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Daniilidis)]
    method: MethodArg,
    /// Sample spacing of each relative motion; auto picks the smallest stride
    /// with a median rotation of at least 5°.
    #[arg(long, default_value = "auto")]
    stride: Auto<usize>,
    /// Pairs with a smaller rotation (degrees) in either trajectory are dropped.
    #[arg(long, default_value_t = 1.0)]
    min_rot_deg: f64,
    /// Association tolerance in seconds; auto uses half the coarser sample period.
    #[arg(long, default_value = "auto")]
    max_dt: Auto<f64>,
    /// Write the calibration result to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Ground truth: GT_i = TCP_0⁻¹ · TCP_i.
    Gt,
    /// Headset estimate: P_i = T · U_0⁻¹ · U_i · T⁻¹ with T from --calib or --transform.
    Est,
}

#[derive(Args)]
struct NormalizeArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Calibration file from `calibrate`; its X is used as the Unity-to-TCP transform.
    #[arg(long, value_name = "FILE", conflicts_with = "transform")]
    calib: Option<PathBuf>,
    /// Unity-to-TCP transform as "x y z qx qy qz qw".
    #[arg(long, value_name = "POSE")]
    transform: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    est: PathBuf,
    gt: PathBuf,
    /// Rigidly align the estimate to ground truth before measuring (default).
    #[arg(long, overrides_with = "no_align")]
    align: bool,
    /// Measure without alignment.
    #[arg(long)]
    no_align: bool,
    /// Association tolerance in seconds; auto uses half the coarser sample period.
    #[arg(long, default_value = "auto")]
    max_dt: Auto<f64>,
    /// Write per-pose errors as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Write an error-over-time plot as SVG.
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Duration in seconds.
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 30.0)]
    rate: f64,
    /// Stamp of the first ground-truth sample.
    #[arg(long, default_value_t = 1.7e9)]
    start_stamp: f64,
    /// Clock offset added to sensor stamps, in milliseconds.
    #[arg(long, default_value_t = 0.0)]
    offset_ms: f64,
    /// Sensor translation noise per axis in meters.
    #[arg(long, default_value_t = 0.0)]
    sigma_t: f64,
    /// Sensor rotation noise in degrees.
    #[arg(long, default_value_t = 0.0)]
    sigma_r_deg: f64,
    /// Translation amplitude in meters.
    #[arg(long, default_value_t = 0.15)]
    trans_amplitude: f64,
    /// Rotation amplitude in degrees.
    #[arg(long, default_value_t = 30.0)]
    rot_amplitude_deg: f64,
    /// Sensor pose on the body as "x y z qx qy qz qw".
    #[arg(long, value_name = "POSE", default_value = "0 0 0 0 0 0 1")]
    x_true: String,
    /// Write the sensor trajectory in left-handed coordinates.
    #[arg(long)]
    sensor_lhs: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert { input, output } => {
            let traj = read_tum(&input)?.with_handedness(Handedness::Left);
            write_file(&output, write_tum(&traj.to_rhs()))?;
            println!("converted {} poses", traj.len());
        }
        Command::Sync(args) => sync(args)?,
        Command::Calibrate(args) => calibrate(args)?,
        Command::ReplayTargets { opti, config, output } => {
            let cfg = ReplayConfig::from_text(&read_file(&config)?).map_err(Error::from)?;
            let targets = compute_tcp_targets(&read_tum(&opti)?, &cfg).map_err(Error::from)?;
            write_file(&output, write_tum(&targets))?;
            let spacing = validate_waypoint_spacing(&targets, cfg.eef_step_m).map_err(Error::from)?;
            println!("targets: {}", targets.len());
            println!("max_step_m: {}", spacing.max_step_m);
            println!("violations: {}", spacing.violations.len());
        }
        Command::Normalize(args) => normalize(args)?,
        Command::Validate { input, eef_step } => {
            let report = validate_waypoint_spacing(&read_tum(&input)?, eef_step).map_err(Error::from)?;
            println!("max_step_m: {}", report.max_step_m);
            for (i, step) in &report.violations {
                println!("violation: index {i} step {step:.6} m");
            }
            if !report.passed() {
                return Err(anyhow!(
                    "validate: {} waypoint steps exceed eef_step {} m",
                    report.violations.len(),
                    eef_step
                ));
            }
            println!("ok");
        }
        Command::Eval(args) => eval(args)?,
        Command::Gen(args) => gen(args)?,
    }
    Ok(())
}

fn sync(args: SyncArgs) -> Result<()> {
    let axes: Vec<Axis> = parse_axes(&args.axes).map_err(|e| anyhow!("sync: {e}"))?;
    let params = SyncParams {
        axes,
        prominence_m: args.prominence,
        min_separation_s: args.min_separation,
        match_window_s: args.match_window,
    };
    let a = read_tum(&args.a)?;
    let b = read_tum(&args.b)?;
    let report = estimate_offset(&a, &b, &params).map_err(Error::from)?;
    print!("{}", report.to_text());
    if let Some(out) = &args.out {
        write_file(out, report.to_text())?;
    }
    if let Some(out) = &args.apply {
        let shifted = apply_offset(&b, -report.offset_s).map_err(Error::from)?;
        write_file(out, write_tum(&shifted))?;
    }
    Ok(())
}

fn calibrate(args: CalibrateArgs) -> Result<()> {
    let a = read_tum(&args.a)?;
    let b = read_tum(&args.b)?;
    let params = PairParams {
        stride: args.stride.value(),
        max_dt: args.max_dt.value(),
        min_rot_deg: args.min_rot_deg,
    };
    let pairs = build_motion_pairs(&a, &b, &params).map_err(Error::from)?;
    let result = solve_hand_eye(&pairs, args.method.into()).map_err(Error::from)?;
    println!("method: {}", result.method);
    println!("x: {}", format_pose_fields(&result.x));
    println!("pairs_used: {}", result.pairs_used);
    println!("residual_trans_mm: {:.4}", result.residual_trans_mm);
    println!("residual_rot_deg: {:.4}", result.residual_rot_deg);
    if let Some(out) = &args.out {
        write_file(out, result.to_text())?;
    }
    Ok(())
}

fn normalize(args: NormalizeArgs) -> Result<()> {
    let traj = read_tum(&args.input)?;
    let out = match args.mode {
        Mode::Gt => normalize_ground_truth(&traj).map_err(Error::from)?,
        Mode::Est => {
            let t = match (&args.calib, &args.transform) {
                (Some(path), _) => HandEyeResult::from_text(&read_file(path)?).map_err(Error::from)?.x,
                (None, Some(text)) => parse_pose_arg(text)?,
                (None, None) => return Err(anyhow!("normalize: --mode est needs --calib or --transform")),
            };
            normalize_estimate(&traj, &t).map_err(Error::from)?
        }
    };
    write_file(&args.output, write_tum(&out))?;
    println!("normalized {} poses", out.len());
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let est = read_tum(&args.est)?;
    let gt = read_tum(&args.gt)?;
    let max_dt = match args.max_dt {
        Auto::Value(v) => v,
        Auto::Auto => default_max_dt(&est, &gt).ok_or_else(|| anyhow!("eval: cannot derive max_dt from empty input"))?,
    };
    let report = ape(&est, &gt, !args.no_align, max_dt).map_err(Error::from)?;
    println!("pairs: {}", report.errors.len());
    println!("aligned: {}", report.aligned);
    for (name, v) in [
        ("rmse", report.rmse),
        ("mean", report.mean),
        ("median", report.median),
        ("std", report.std),
        ("min", report.min),
        ("max", report.max),
    ] {
        println!("{name}_m: {v:.9}");
    }
    for (path, format) in [
        (&args.csv, ReportFormat::Csv),
        (&args.json, ReportFormat::Json),
        (&args.svg, ReportFormat::Svg),
    ] {
        if let Some(path) = path {
            write_file(path, emit_report(&report, format))?;
        }
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let cfg = ScenarioConfig {
        seed: args.seed,
        duration_s: args.duration,
        rate_hz: args.rate,
        start_stamp: args.start_stamp,
        trans_amplitude_m: args.trans_amplitude,
        rot_amplitude_deg: args.rot_amplitude_deg,
        x_true: parse_pose_arg(&args.x_true)?,
        offset_true_s: args.offset_ms / 1000.0,
        sigma_t_m: args.sigma_t,
        sigma_r_deg: args.sigma_r_deg,
    };
    cfg.validate().map_err(|e| anyhow!("gen: {e}"))?;
    let scenario = generate_scenario::<f64>(&cfg);
    let sensor = if args.sensor_lhs {
        scenario.sensor.mirror_handedness()
    } else {
        scenario.sensor
    };
    fs::create_dir_all(&args.out_dir).with_context(|| format!("io: {}", args.out_dir.display()))?;
    write_file(&args.out_dir.join("gt.tum"), write_tum(&scenario.gt))?;
    write_file(&args.out_dir.join("sensor.tum"), write_tum(&sensor))?;
    write_file(&args.out_dir.join("truth.txt"), scenario.truth.to_text())?;
    println!("samples: {}", scenario.gt.len());
    Ok(())
}

fn parse_pose_arg(text: &str) -> Result<Pose> {
    parse_pose_fields(text).ok_or_else(|| anyhow!("expected 7 numbers \"x y z qx qy qz qw\" with a nonzero quaternion, got '{text}'"))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("io: {}", path.display()))
}

fn read_tum(path: &Path) -> Result<Trajectory> {
    let text = read_file(path)?;
    parse_tum(&text).map_err(|e| anyhow!("trajectory: {}: {e}", path.display()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("io: {}", path.display()))
}
