//! Helpers shared by the integration tests and the fixture generator.
#![allow(dead_code)]

use std::path::PathBuf;

use effortvib::trace_io::{LandmarkFrame, LandmarkTrace, UpAxis, POSE_LANDMARKS};
use effortvib::Vec3;

pub mod oracle;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

/// Standing pose in meters, +y up, subject's left toward +x.
pub fn standing_pose(name: &str) -> Vec3 {
    let (side, rest) = match name.split_once('_') {
        Some(("left", rest)) => (1.0, rest),
        Some(("right", rest)) => (-1.0, rest),
        _ => (0.0, name),
    };
    let (x, y, z) = match rest {
        "nose" => (0.0, 1.60, 0.08),
        "eye_inner" => (0.015, 1.63, 0.07),
        "eye" => (0.03, 1.63, 0.065),
        "eye_outer" => (0.045, 1.63, 0.06),
        "ear" => (0.075, 1.61, 0.0),
        "shoulder" => (0.18, 1.42, 0.0),
        "elbow" => (0.20, 1.12, 0.0),
        "wrist" => (0.21, 0.86, 0.02),
        "pinky" => (0.22, 0.78, 0.03),
        "index" => (0.21, 0.77, 0.04),
        "thumb" => (0.19, 0.80, 0.05),
        "hip" => (0.10, 0.95, 0.0),
        "knee" => (0.11, 0.52, 0.02),
        "ankle" => (0.11, 0.09, 0.0),
        "heel" => (0.11, 0.04, -0.05),
        "foot_index" => (0.12, 0.02, 0.15),
        // mouth_left / mouth_right
        _ if name.starts_with("mouth_") => {
            let s = if name.ends_with("left") { 1.0 } else { -1.0 };
            return Vec3::new(0.025 * s, 1.56, 0.07);
        }
        other => panic!("unknown landmark {other}"),
    };
    Vec3::new(side * x, y, z)
}

/// A trace sampled at `rate` Hz for `frames` frames where every landmark
/// sits at `standing_pose(name) + offset(name, t)`.
pub fn synthetic_trace(
    rate: f64,
    frames: usize,
    offset: impl Fn(&str, f64) -> Vec3,
) -> LandmarkTrace {
    let frames = (0..frames)
        .map(|k| {
            let t = k as f64 / rate;
            let mut f = LandmarkFrame::new(t);
            for name in POSE_LANDMARKS {
                f.insert(name, standing_pose(name) + offset(name, t), 1.0);
            }
            f
        })
        .collect();
    LandmarkTrace {
        frames,
        frame_rate_hint: Some(rate),
        unit_scale: 1.0,
        up_axis: UpAxis::PosY,
    }
}

pub const SQUAT_AMPLITUDE: f64 = 0.1;

/// Rigid vertical oscillation `0.1 sin(2 pi t)` of the whole skeleton.
pub fn squat_trace(rate: f64, seconds: f64) -> LandmarkTrace {
    let frames = (seconds * rate).round() as usize + 1;
    synthetic_trace(rate, frames, |_, t| {
        Vec3::new(0.0, SQUAT_AMPLITUDE * (std::f64::consts::TAU * t).sin(), 0.0)
    })
}

/// Analytic vertical GRF of [`squat_trace`] for a subject of `mass` kg.
pub fn squat_grf(mass: f64, g: f64, t: f64) -> f64 {
    let w = std::f64::consts::TAU;
    mass * (g - SQUAT_AMPLITUDE * w * w * (w * t).sin())
}

pub const CONFIG_60KG: &str = r#"
subject_mass_kg = 60.0
gravity_magnitude = 9.81
stevens_exponent = 1.7
output_sample_rate = 48000
normalization_mode = "per-clip-max"
source = "centroid"

[savgol]
window = 9
poly_order = 3
derivative_order = 2

[intensity]
carrier_frequency = 200.0
detection_threshold_amplitude = 0.2
alpha = 0.4
max_intensity = 10.0
"#;
