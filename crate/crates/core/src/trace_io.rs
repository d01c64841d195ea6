//! Landmark traces: the JSON file format produced by the pose extractor,
//! validation on load, and resampling onto a uniform time grid.
//!
//! A trace file looks like
//!
//! ```json
//! { "version": 1, "unit_scale": 1.0, "up_axis": "+y", "frame_rate_hint": 30.0,
//!   "frames": [ { "t": 0.0, "landmarks": { "nose": {"x":0,"y":1.6,"z":0,"visibility":1} } } ] }
//! ```
//!
//! Positions are stored exactly as read, in trace units and in the trace's
//! own axis convention. Conversion to meters with +y up happens in
//! [`LandmarkTrace::position_si`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

pub const FORMAT_VERSION: u32 = 1;

/// The 33 landmark names emitted by the pose estimator, in its index order.
pub const POSE_LANDMARKS: [&str; 33] = [
    "nose",
    "left_eye_inner",
    "left_eye",
    "left_eye_outer",
    "right_eye_inner",
    "right_eye",
    "right_eye_outer",
    "left_ear",
    "right_ear",
    "mouth_left",
    "mouth_right",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_pinky",
    "right_pinky",
    "left_index",
    "right_index",
    "left_thumb",
    "right_thumb",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
    "left_heel",
    "right_heel",
    "left_foot_index",
    "right_foot_index",
];

/// Frames whose interval deviates from the mean by less than this fraction
/// are treated as already uniform.
pub const UNIFORM_JITTER_TOLERANCE: f64 = 0.01;

/// Which trace axis points up, against gravity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpAxis {
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
    #[serde(rename = "+z")]
    PosZ,
    #[serde(rename = "-z")]
    NegZ,
}

impl UpAxis {
    /// Proper rotation taking this convention to one where +y is up.
    pub fn to_y_up(self, v: Vec3) -> Vec3 {
        match self {
            UpAxis::PosY => v,
            // half turn about x
            UpAxis::NegY => Vec3::new(v.x, -v.y, -v.z),
            // quarter turns about x
            UpAxis::PosZ => Vec3::new(v.x, v.z, -v.y),
            UpAxis::NegZ => Vec3::new(v.x, -v.z, v.y),
        }
    }

    /// Inverse of [`UpAxis::to_y_up`].
    pub fn from_y_up(self, v: Vec3) -> Vec3 {
        match self {
            UpAxis::PosY => v,
            UpAxis::NegY => Vec3::new(v.x, -v.y, -v.z),
            UpAxis::PosZ => Vec3::new(v.x, -v.z, v.y),
            UpAxis::NegZ => Vec3::new(v.x, v.z, -v.y),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    /// Seconds.
    pub timestamp: f64,
    pub positions: BTreeMap<String, Vec3>,
    /// Per-landmark visibility in `[0, 1]`; 1.0 when the file omits it.
    pub visibility: BTreeMap<String, f64>,
}

impl LandmarkFrame {
    pub fn new(timestamp: f64) -> Self {
        Self {
            timestamp,
            positions: BTreeMap::new(),
            visibility: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, position: Vec3, visibility: f64) {
        let name = name.into();
        self.visibility.insert(name.clone(), visibility);
        self.positions.insert(name, position);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkTrace {
    pub frames: Vec<LandmarkFrame>,
    pub frame_rate_hint: Option<f64>,
    /// Meters per trace unit.
    pub unit_scale: f64,
    pub up_axis: UpAxis,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrace {
    version: u32,
    unit_scale: f64,
    up_axis: UpAxis,
    #[serde(default)]
    frame_rate_hint: Option<f64>,
    frames: Vec<RawFrame>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    t: f64,
    landmarks: BTreeMap<String, RawLandmark>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLandmark {
    x: f64,
    y: f64,
    z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visibility: Option<f64>,
}

/// Reads a trace file, requiring all 33 estimator landmarks in every frame.
pub fn parse_landmark_trace(path: impl AsRef<Path>) -> Result<LandmarkTrace> {
    parse_landmark_trace_with(path, &POSE_LANDMARKS)
}

/// Reads a trace file, requiring only the given landmarks in every frame.
pub fn parse_landmark_trace_with<S: AsRef<str>>(
    path: impl AsRef<Path>,
    required: &[S],
) -> Result<LandmarkTrace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace_str(&text, required)
}

pub fn parse_trace_str<S: AsRef<str>>(text: &str, required: &[S]) -> Result<LandmarkTrace> {
    let raw: RawTrace = serde_json::from_str(text).map_err(|e| Error::Parse {
        what: "landmark trace".into(),
        message: e.to_string(),
    })?;
    if raw.version != FORMAT_VERSION {
        return Err(Error::Parse {
            what: "landmark trace".into(),
            message: format!("unsupported version {} (expected {FORMAT_VERSION})", raw.version),
        });
    }
    if !(raw.unit_scale.is_finite() && raw.unit_scale > 0.0) {
        return Err(Error::param("unit_scale", "must be a positive finite number"));
    }
    if let Some(hint) = raw.frame_rate_hint {
        if !(hint.is_finite() && hint > 0.0) {
            return Err(Error::param("frame_rate_hint", "must be positive when present"));
        }
    }
    if raw.frames.is_empty() {
        return Err(Error::InsufficientFrames { needed: 1, got: 0 });
    }

    let mut frames = Vec::with_capacity(raw.frames.len());
    for (index, raw_frame) in raw.frames.into_iter().enumerate() {
        if !(raw_frame.t.is_finite() && raw_frame.t >= 0.0) {
            return Err(Error::param(
                "t",
                format!("frame {index}: timestamp must be finite and non-negative"),
            ));
        }
        if let Some(prev) = frames.last().map(|f: &LandmarkFrame| f.timestamp) {
            if raw_frame.t <= prev {
                return Err(Error::Ordering {
                    prev: index - 1,
                    next: index,
                    prev_t: prev,
                    next_t: raw_frame.t,
                });
            }
        }
        for name in required {
            if !raw_frame.landmarks.contains_key(name.as_ref()) {
                return Err(Error::MissingLandmark {
                    landmark: name.as_ref().to_owned(),
                    frame: index,
                });
            }
        }
        let mut frame = LandmarkFrame::new(raw_frame.t);
        for (name, lm) in raw_frame.landmarks {
            if !(lm.x.is_finite() && lm.y.is_finite() && lm.z.is_finite()) {
                return Err(Error::NonFinite {
                    landmark: name,
                    frame: index,
                });
            }
            let visibility = lm.visibility.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&visibility) {
                return Err(Error::param(
                    "visibility",
                    format!("frame {index}, landmark \"{name}\": {visibility} is outside [0, 1]"),
                ));
            }
            frame.insert(name, Vec3::new(lm.x, lm.y, lm.z), visibility);
        }
        frames.push(frame);
    }

    Ok(LandmarkTrace {
        frames,
        frame_rate_hint: raw.frame_rate_hint,
        unit_scale: raw.unit_scale,
        up_axis: raw.up_axis,
    })
}

impl LandmarkTrace {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn timestamps(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.timestamp).collect()
    }

    pub fn duration(&self) -> f64 {
        match (self.frames.first(), self.frames.last()) {
            (Some(a), Some(b)) => b.timestamp - a.timestamp,
            _ => 0.0,
        }
    }

    /// Mean frame interval in seconds, `None` for fewer than two frames.
    pub fn mean_interval(&self) -> Option<f64> {
        (self.len() >= 2).then(|| self.duration() / (self.len() - 1) as f64)
    }

    /// Largest deviation of any frame interval from the mean, as a fraction of the mean.
    pub fn max_jitter_fraction(&self) -> f64 {
        let Some(mean) = self.mean_interval() else {
            return 0.0;
        };
        self.frames
            .windows(2)
            .map(|w| ((w[1].timestamp - w[0].timestamp) - mean).abs() / mean)
            .fold(0.0, f64::max)
    }

    pub fn is_uniform(&self) -> bool {
        self.max_jitter_fraction() < UNIFORM_JITTER_TOLERANCE
    }

    /// Position of `landmark` in `frame`, converted to meters in the +y-up frame.
    pub fn position_si(&self, frame: usize, landmark: &str) -> Option<Vec3> {
        self.frames[frame]
            .positions
            .get(landmark)
            .map(|p| self.up_axis.to_y_up(p * self.unit_scale))
    }

    pub fn to_json(&self) -> String {
        let raw = RawTrace {
            version: FORMAT_VERSION,
            unit_scale: self.unit_scale,
            up_axis: self.up_axis,
            frame_rate_hint: self.frame_rate_hint,
            frames: self
                .frames
                .iter()
                .map(|f| RawFrame {
                    t: f.timestamp,
                    landmarks: f
                        .positions
                        .iter()
                        .map(|(name, p)| {
                            let raw = RawLandmark {
                                x: p.x,
                                y: p.y,
                                z: p.z,
                                visibility: Some(f.visibility.get(name).copied().unwrap_or(1.0)),
                            };
                            (name.clone(), raw)
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("trace serialization is infallible")
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Resamples `trace` onto `t0 + k / target_rate`, interpolating each
/// coordinate (and visibility) linearly. Grid points that coincide with an
/// input frame copy it verbatim.
pub fn resample_uniform(trace: &LandmarkTrace, target_rate: f64) -> Result<LandmarkTrace> {
    if trace.len() < 2 {
        return Err(Error::InsufficientFrames {
            needed: 2,
            got: trace.len(),
        });
    }
    if !(target_rate.is_finite() && target_rate > 0.0) {
        return Err(Error::param("target_rate", "must be positive"));
    }

    let t0 = trace.frames[0].timestamp;
    let span = trace.duration();
    let snap = 1e-9 * trace.mean_interval().unwrap_or(1.0).min(1.0 / target_rate);
    let count = (span * target_rate + 1e-9).floor() as usize + 1;

    let mut frames = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let t = t0 + k as f64 / target_rate;
        while j + 2 < trace.len() && trace.frames[j + 1].timestamp <= t {
            j += 1;
        }
        let (a, b) = (&trace.frames[j], &trace.frames[j + 1]);
        let frame = if (t - a.timestamp).abs() <= snap {
            LandmarkFrame { timestamp: t, ..a.clone() }
        } else if (t - b.timestamp).abs() <= snap {
            LandmarkFrame { timestamp: t, ..b.clone() }
        } else {
            let w = ((t - a.timestamp) / (b.timestamp - a.timestamp)).clamp(0.0, 1.0);
            let mut out = LandmarkFrame::new(t);
            for (name, pa) in &a.positions {
                if let Some(pb) = b.positions.get(name) {
                    let va = a.visibility.get(name).copied().unwrap_or(1.0);
                    let vb = b.visibility.get(name).copied().unwrap_or(1.0);
                    out.insert(name.clone(), pa + (pb - pa) * w, va + (vb - va) * w);
                }
            }
            out
        };
        frames.push(frame);
    }

    Ok(LandmarkTrace {
        frames,
        frame_rate_hint: Some(target_rate),
        unit_scale: trace.unit_scale,
        up_axis: trace.up_axis,
    })
}
