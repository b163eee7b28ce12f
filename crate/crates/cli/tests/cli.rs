use std::path::Path;
use std::process::{Command, Output};

fn trajcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trajcal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.trim_start_matches([':', '=']).trim().parse().ok())
        .unwrap_or_else(|| panic!("no {key} in:\n{text}"))
}

#[test]
fn eval_identical_files_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = trajcal(&["gen", "--duration", "5", "--out-dir", p(dir.path())]);
    assert!(out.status.success());
    let gt = dir.path().join("gt.tum");
    let csv = dir.path().join("ape.csv");
    let out = trajcal(&["eval", p(&gt), p(&gt), "--no-align", "--csv", p(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(value(&text, "rmse_m"), 0.0);
    assert_eq!(value(&text, "max_m"), 0.0);
    let csv = std::fs::read_to_string(csv).unwrap();
    assert_eq!(csv.lines().next(), Some("stamp,error_m"));
    assert_eq!(csv.lines().count(), 152);
}

#[test]
fn gen_then_sync_recovers_offset() {
    let dir = tempfile::tempdir().unwrap();
    let out = trajcal(&["gen", "--seed", "7", "--offset-ms", "120", "--out-dir", p(dir.path())]);
    assert!(out.status.success());
    let out = trajcal(&[
        "sync",
        p(&dir.path().join("gt.tum")),
        p(&dir.path().join("sensor.tum")),
    ]);
    assert!(out.status.success());
    let offset = value(&stdout(&out), "offset_s");
    assert!((offset - 0.120).abs() <= 0.005, "{offset}");
}

#[test]
fn calibrate_static_trajectories_fails_with_too_few_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..100)
        .map(|i| format!("{}.0 0.1 0.2 0.3 0 0 0 1\n", i))
        .collect();
    let a = dir.path().join("a.tum");
    std::fs::write(&a, rows).unwrap();
    let out = trajcal(&["calibrate", p(&a), p(&a)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: calibrate:"), "{err}");
    assert!(err.contains("too few"), "{err}");
}

#[test]
fn full_pipeline_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let f = |name: &str| dir.path().join(name);
    let steps: Vec<Vec<String>> = vec![
        vec!["gen", "--seed", "3", "--duration", "30", "--offset-ms", "80", "--sensor-lhs", "--x-true", "0 0 0 0.2 -0.1 0.3 0.92", "--out-dir", p(dir.path())]
            .into_iter().map(String::from).collect(),
        vec!["convert".into(), p(&f("sensor.tum")).into(), p(&f("rhs.tum")).into()],
        vec!["sync".into(), p(&f("gt.tum")).into(), p(&f("rhs.tum")).into(), "--apply".into(), p(&f("synced.tum")).into()],
        vec!["calibrate".into(), p(&f("gt.tum")).into(), p(&f("synced.tum")).into(), "--out".into(), p(&f("calib.txt")).into()],
        vec!["normalize".into(), p(&f("gt.tum")).into(), p(&f("gt_n.tum")).into(), "--mode".into(), "gt".into()],
        vec!["normalize".into(), p(&f("synced.tum")).into(), p(&f("est_n.tum")).into(), "--mode".into(), "est".into(), "--calib".into(), p(&f("calib.txt")).into()],
    ];
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let out = trajcal(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let svg = f("ape.svg");
    let out = trajcal(&["eval", p(&f("est_n.tum")), p(&f("gt_n.tum")), "--svg", p(&svg)]);
    assert!(out.status.success());
    assert!(value(&stdout(&out), "rmse_m") <= 1e-6);
    assert!(std::fs::read_to_string(svg).unwrap().contains("<polyline"));
}

#[test]
fn validate_reports_violation_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::new();
    let mut x = 0.0;
    for i in 0..20 {
        x += if i == 12 { 0.05 } else { 0.02 };
        rows.push_str(&format!("{i}.0 {x} 0 0 0 0 0 1\n"));
    }
    let a = dir.path().join("w.tum");
    std::fs::write(&a, rows).unwrap();
    let out = trajcal(&["validate", p(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violation: index 12"));
    let out = trajcal(&["validate", p(&a), "--eef-step", "0.06"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn replay_targets_from_config() {
    let dir = tempfile::tempdir().unwrap();
    assert!(trajcal(&["gen", "--duration", "5", "--rate", "120", "--out-dir", p(dir.path())]).status.success());
    let cfg = dir.path().join("replay.cfg");
    std::fs::write(
        &cfg,
        "b_start=0.4 0.1 0.3 0 0 0 1\nt_tcp_unity=0 0 0.05 0 0 0 1\nt_unity_opti=0 0 0 0 0 0 1\ndilution_k=10\neef_step_m=0.03\n",
    )
    .unwrap();
    let out_path = dir.path().join("targets.tum");
    let out = trajcal(&["replay-targets", p(&dir.path().join("gt.tum")), p(&cfg), p(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 61);
    let first: Vec<f64> = text.lines().next().unwrap().split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.4, 0.1, 0.3, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn domain_and_usage_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tum");
    std::fs::write(&bad, "0.0 1 2 3 0 0 0\n").unwrap();
    let out = trajcal(&["convert", p(&bad), p(&dir.path().join("o.tum"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: trajectory:"));

    assert_eq!(trajcal(&["eval", "a", "b", "--bogus"]).status.code(), Some(2));
    assert_eq!(trajcal(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(trajcal(&["calibrate", "a", "b", "--method", "park"]).status.code(), Some(2));
}

#[test]
fn help_lists_defaults() {
    let cases: [(&str, &[&str]); 5] = [
        ("sync", &["--prominence", "[default: 0.01]", "[default: 0.5]", "[default: x,y,z]"]),
        ("calibrate", &["[default: daniilidis]", "[default: auto]", "[default: 1]"]),
        ("validate", &["[default: 0.03]"]),
        ("eval", &["--no-align", "--max-dt", "[default: auto]"]),
        ("gen", &["[default: 0.15]", "[default: 30]", "[default: 60]"]),
    ];
    for (cmd, needles) in cases {
        let out = trajcal(&[cmd, "--help"]);
        assert!(out.status.success());
        let text = stdout(&out);
        for n in needles {
            assert!(text.contains(n), "{cmd} --help lacks {n}:\n{text}");
        }
    }
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = trajcal(&["gen", "--seed", "9", "--duration", "3", "--sigma-t", "0.001", "--out-dir", p(d.path())]);
        assert!(out.status.success());
    }
    for name in ["gt.tum", "sensor.tum", "truth.txt"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap()
        );
    }
}
