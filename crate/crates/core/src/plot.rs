//! Minimal SVG time-series plots of pipeline intermediates.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dynamics::JointForceTrace;
use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_Y: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// One line per series against shared `times`.
pub fn line_plot_svg(title: &str, y_label: &str, times: &[f64], series: &[Series<'_>]) -> String {
    let (t0, t1) = bounds(times.iter().copied());
    let (y0, y1) = bounds(series.iter().flat_map(|s| s.values.iter().copied()));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w;
    let py = |y: f64| MARGIN_Y + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#,
        MARGIN_LEFT + plot_w / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for (y, anchor_y) in [(y1, MARGIN_Y + 4.0), (y0, MARGIN_Y + plot_h)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{anchor_y}" text-anchor="end">{y:.4}</text>"#,
            MARGIN_LEFT - 4.0
        );
    }
    let bottom = HEIGHT - MARGIN_Y + 16.0;
    let _ = writeln!(svg, r#"<text x="{MARGIN_LEFT}" y="{bottom}">{t0:.3} s</text>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{bottom}" text-anchor="end">{t1:.3} s</text>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = times
            .iter()
            .zip(s.values)
            .map(|(&t, &v)| format!("{:.3},{:.3}", px(t), py(v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN_Y + 14.0 * k as f64 + 8.0;
        let lx = WIDTH - MARGIN_RIGHT + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 16.0,
            lx + 20.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Inputs for [`emit_plots`], all aligned to the valid frame range.
pub struct PlotInputs<'a> {
    pub joints: &'a JointForceTrace,
    pub times: &'a [f64],
    pub effort: &'a [f64],
    pub envelope: &'a [f64],
}

pub const JOINT_FORCE_PLOT: &str = "joint_forces.svg";
pub const EFFORT_PLOT: &str = "effort.svg";
pub const ENVELOPE_PLOT: &str = "envelope.svg";

/// Joint-force magnitude against time, written to `dir/joint_forces.svg`.
pub fn write_joint_force_plot(dir: impl AsRef<Path>, joints: &JointForceTrace) -> Result<PathBuf> {
    let magnitudes: Vec<Vec<f64>> = joints
        .forces
        .iter()
        .map(|track| track.iter().map(|f| f.norm()).collect())
        .collect();
    let series: Vec<Series> = joints
        .joint_names
        .iter()
        .zip(&magnitudes)
        .map(|(label, values)| Series { label, values })
        .collect();
    let svg = line_plot_svg("Joint force magnitude", "force (N)", &joints.timestamps, &series);
    let path = dir.as_ref().join(JOINT_FORCE_PLOT);
    std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes joint-force magnitude, effort and envelope plots into `dir`.
pub fn emit_plots(dir: impl AsRef<Path>, inputs: &PlotInputs<'_>) -> Result<Vec<PathBuf>> {
    if inputs.times.is_empty() {
        return Err(Error::NoPlots(
            "the valid frame range is empty; the clip is shorter than the Savitzky-Golay window, \
             so no accelerations exist to plot"
                .into(),
        ));
    }
    let dir = dir.as_ref();
    let mut written = vec![write_joint_force_plot(dir, inputs.joints)?];
    let plots = [
        (
            EFFORT_PLOT,
            line_plot_svg(
                "Sense of effort",
                "effort",
                inputs.times,
                &[Series { label: "effort", values: inputs.effort }],
            ),
        ),
        (
            ENVELOPE_PLOT,
            line_plot_svg(
                "Vibration envelope",
                "amplitude",
                inputs.times,
                &[Series { label: "envelope", values: inputs.envelope }],
            ),
        ),
    ];

    for (name, svg) in plots {
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Y pixel coordinates of every polyline vertex in an SVG produced here.
pub fn polyline_y_coordinates(svg: &str) -> Vec<Vec<f64>> {
    svg.lines()
        .filter_map(|line| {
            let rest = line.split("points=\"").nth(1)?;
            let pts = rest.split('"').next()?;
            Some(
                pts.split_whitespace()
                    .filter_map(|p| p.split(',').nth(1)?.parse().ok())
                    .collect(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_horizontal() {
        let times = [0.0, 0.1, 0.2, 0.3];
        let svg = line_plot_svg("t", "y", &times, &[Series { label: "c", values: &[0.7; 4] }]);
        let ys = &polyline_y_coordinates(&svg)[0];
        assert_eq!(ys.len(), 4);
        assert!(ys.iter().all(|y| (y - ys[0]).abs() < 1e-9));
    }

    #[test]
    fn empty_range_is_an_error() {
        let joints = JointForceTrace {
            valid: 0..0,
            timestamps: vec![],
            joint_names: vec![],
            forces: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let err = emit_plots(
            dir.path(),
            &PlotInputs {
                joints: &joints,
                times: &[],
                effort: &[],
                envelope: &[],
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("window"));
    }

    #[test]
    fn labels_are_escaped() {
        let svg = line_plot_svg("t", "y", &[0.0, 1.0], &[Series { label: "Hip->Chest", values: &[0.0, 1.0] }]);
        assert!(svg.contains("Hip-&gt;Chest"));
    }
}
