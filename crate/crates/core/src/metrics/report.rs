use std::fmt::Write as _;

use super::ApeReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(format!("unknown report format '{other}' (expected csv, json or svg)")),
        }
    }
}

pub fn emit_report(report: &ApeReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Csv => csv(report).into_bytes(),
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Svg => svg(report).into_bytes(),
    }
}

fn csv(report: &ApeReport) -> String {
    let mut out = String::from("stamp,error_m\n");
    for (stamp, err) in &report.errors {
        let _ = writeln!(out, "{stamp},{err}");
    }
    out
}

/// Reads back the `(stamp, error_m)` rows written by the CSV report.
pub fn parse_csv(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "stamp,error_m" => {}
        other => return Err(format!("bad csv header: {other:?}")),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (s, e) = l
                .split_once(',')
                .ok_or_else(|| format!("line {}: expected two columns", i + 2))?;
            let s = s.trim().parse().map_err(|_| format!("line {}: bad stamp", i + 2))?;
            let e = e.trim().parse().map_err(|_| format!("line {}: bad error", i + 2))?;
            Ok((s, e))
        })
        .collect()
}

const W: f64 = 800.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn svg(report: &ApeReport) -> String {
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let t0 = report.errors.first().map_or(0.0, |e| e.0);
    let t_span = report.errors.last().map_or(0.0, |e| e.0 - t0).max(1e-9);
    let y_max = if report.max > 0.0 { report.max * 1.05 } else { 1.0 };
    let x_of = |t: f64| LEFT + (t - t0) / t_span * pw;
    let y_of = |e: f64| TOP + ph - e / y_max * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">time [s]</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">APE [m]</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, LEFT - 5.0, TOP + 4.0, y_max);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">0</text>"#, LEFT - 5.0, TOP + ph + 4.0);
    let _ = writeln!(s, r#"<text x="{LEFT}" y="{}" text-anchor="middle">0</text>"#, TOP + ph + 16.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{:.1}</text>"#,
        LEFT + pw,
        TOP + ph + 16.0,
        if report.errors.is_empty() { 0.0 } else { t_span }
    );

    for (label, value, color) in [("rmse", report.rmse, "#d62728"), ("mean", report.mean, "#2ca02c")] {
        let y = y_of(value);
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{color}" stroke-dasharray="4 3"/>"#,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" fill="{color}">{label}</text>"#,
            LEFT + pw - 4.0,
            y - 4.0
        );
    }
    if !report.errors.is_empty() {
        let mut pts = String::new();
        for &(t, e) in &report.errors {
            let _ = write!(pts, "{:.2},{:.2} ", x_of(t), y_of(e));
        }
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##,
            pts.trim_end()
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="end">rmse {:.6} m  mean {:.6} m  max {:.6} m</text>"#,
        W - RIGHT,
        report.rmse,
        report.mean,
        report.max
    );
    s.push_str("</svg>\n");
    s
}
