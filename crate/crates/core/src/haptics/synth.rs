//! Perceived-intensity model and amplitude-modulated carrier synthesis.
//!
//! Perceived intensity of a sinusoidal vibration at amplitude `A` is modeled
//! as `I = (A / A_T)^(2 alpha)`, with `A_T` the detection threshold at the
//! carrier frequency. Synthesis runs the relation backwards: a target
//! intensity gives the amplitude `A = A_T * I^(1 / (2 alpha))`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::effort::EffortSignal;

fn default_carrier() -> f64 {
    200.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityModelParams {
    /// Hz.
    #[serde(default = "default_carrier")]
    pub carrier_frequency: f64,
    /// Detection-threshold amplitude `A_T` at the carrier frequency.
    pub detection_threshold_amplitude: f64,
    /// Frequency-dependent exponent `alpha` at the carrier frequency.
    pub alpha: f64,
    /// Perceived intensity assigned to effort 1.
    pub max_intensity: f64,
}

impl IntensityModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive, got {v}")))
            }
        };
        positive("carrier_frequency", self.carrier_frequency)?;
        positive("detection_threshold_amplitude", self.detection_threshold_amplitude)?;
        positive("alpha", self.alpha)?;
        positive("max_intensity", self.max_intensity)
    }

    /// Normalized envelope for an effort value: amplitude at
    /// `max_intensity * effort` relative to the amplitude at `max_intensity`.
    pub fn envelope(&self, effort: f64) -> Result<f64> {
        Ok(intensity_to_amplitude(self.max_intensity * effort, self)?
            / intensity_to_amplitude(self.max_intensity, self)?)
    }
}

pub fn intensity_to_amplitude(intensity: f64, params: &IntensityModelParams) -> Result<f64> {
    params.validate()?;
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::param("intensity", format!("must be non-negative, got {intensity}")));
    }
    Ok(params.detection_threshold_amplitude * intensity.powf(1.0 / (2.0 * params.alpha)))
}

/// Inverse of [`intensity_to_amplitude`].
pub fn amplitude_to_intensity(amplitude: f64, params: &IntensityModelParams) -> f64 {
    (amplitude / params.detection_threshold_amplitude).powf(2.0 * params.alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibrationWaveform {
    pub sample_rate: u32,
    pub carrier_frequency: f64,
    /// In `[-1, 1]`.
    pub samples: Vec<f64>,
}

impl VibrationWaveform {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Number of audio samples covering `duration` seconds.
pub fn sample_count(duration: f64, sample_rate: u32) -> usize {
    // guard against products like 0.3 * 48000 = 14400.000000000002
    (duration * sample_rate as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Linear interpolation of `values` sampled at `times`, clamped at the ends.
/// `cursor` speeds up monotone queries.
fn interp(times: &[f64], values: &[f64], t: f64, cursor: &mut usize) -> f64 {
    let last = times.len() - 1;
    if t <= times[0] {
        return values[0];
    }
    if t >= times[last] {
        return values[last];
    }
    while *cursor + 1 < last && times[*cursor + 1] <= t {
        *cursor += 1;
    }
    let (t0, t1) = (times[*cursor], times[*cursor + 1]);
    let w = (t - t0) / (t1 - t0);
    values[*cursor] + (values[*cursor + 1] - values[*cursor]) * w
}

/// Renders `effort` as `envelope(t) * sin(2 pi f t)`, where the envelope maps
/// linearly interpolated effort through the intensity model and is scaled so
/// effort 1 gives amplitude 1. `t` runs from zero at the first frame.
pub fn synthesize_am(
    effort: &EffortSignal,
    frame_times: &[f64],
    params: &IntensityModelParams,
    sample_rate: u32,
) -> Result<VibrationWaveform> {
    params.validate()?;
    if effort.is_empty() {
        return Err(Error::param("effort", "must not be empty"));
    }
    if frame_times.len() != effort.len() {
        return Err(Error::param(
            "frame_times",
            format!("{} times for {} effort values", frame_times.len(), effort.len()),
        ));
    }
    if let Some(k) = frame_times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Ordering {
            prev: k,
            next: k + 1,
            prev_t: frame_times[k],
            next_t: frame_times[k + 1],
        });
    }
    if (sample_rate as f64) <= 2.0 * params.carrier_frequency {
        return Err(Error::param(
            "output_sample_rate",
            format!(
                "{sample_rate} Hz does not exceed twice the {} Hz carrier",
                params.carrier_frequency
            ),
        ));
    }
    for (index, &v) in effort.values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                index,
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }

    let t0 = frame_times[0];
    let duration = frame_times[frame_times.len() - 1] - t0;
    let count = sample_count(duration, sample_rate);
    let full = intensity_to_amplitude(params.max_intensity, params)?;
    let omega = TAU * params.carrier_frequency;
    let rate = sample_rate as f64;

    let mut cursor = 0;
    let mut samples = Vec::with_capacity(count);
    for n in 0..count {
        let t = n as f64 / rate;
        let e = interp(frame_times, &effort.values, t0 + t, &mut cursor);
        let envelope = intensity_to_amplitude(params.max_intensity * e, params)? / full;
        samples.push((envelope * (omega * t).sin()).clamp(-1.0, 1.0));
    }

    Ok(VibrationWaveform {
        sample_rate,
        carrier_frequency: params.carrier_frequency,
        samples,
    })
}
