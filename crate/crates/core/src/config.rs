//! Pipeline configuration, read from TOML.
//!
//! Keys mirror [`PipelineConfig`]'s field names. `subject_mass_kg` and the
//! `[intensity]` table (apart from `carrier_frequency`) have no defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::body_model::{default_body_model, BodyModel};
use crate::dynamics::SavGolSpec;
use crate::error::{Error, Result};
use crate::haptics::{IntensityModelParams, Normalization, NormalizationMode, FORCE_STEVENS_EXPONENT};

/// Source name selecting the whole-body ground reaction force.
pub const CENTROID_SOURCE: &str = "centroid";

fn default_stevens() -> f64 {
    FORCE_STEVENS_EXPONENT
}

fn default_gravity() -> f64 {
    9.81
}

fn default_sample_rate() -> u32 {
    48_000
}

fn default_normalization() -> NormalizationMode {
    NormalizationMode::PerClipMax
}

fn default_source() -> String {
    CENTROID_SOURCE.to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub savgol: SavGolSpec,
    /// Optional body-model override file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<PathBuf>,
    #[serde(default = "default_stevens")]
    pub stevens_exponent: f64,
    pub intensity: IntensityModelParams,
    pub subject_mass_kg: f64,
    #[serde(default = "default_gravity")]
    pub gravity_magnitude: f64,
    #[serde(default = "default_sample_rate")]
    pub output_sample_rate: u32,
    #[serde(default = "default_normalization")]
    pub normalization_mode: NormalizationMode,
    /// Newtons; required for `fixed-reference` normalization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_force_n: Option<f64>,
    /// Zero the depth axis before dynamics (monocular 2-D traces).
    #[serde(default)]
    pub planar: bool,
    /// `centroid`, or a joint name such as `Hip->RThigh` (or just `RThigh`).
    #[serde(default = "default_source")]
    pub source: String,
}

impl PipelineConfig {
    /// Defaults for everything except the two values that must be supplied.
    pub fn new(subject_mass_kg: f64, intensity: IntensityModelParams) -> Self {
        Self {
            savgol: SavGolSpec::default(),
            body: None,
            stevens_exponent: default_stevens(),
            intensity,
            subject_mass_kg,
            gravity_magnitude: default_gravity(),
            output_sample_rate: default_sample_rate(),
            normalization_mode: default_normalization(),
            reference_force_n: None,
            planar: false,
            source: default_source(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_owned()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config file; a relative `body` path is resolved
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        if let (Some(body), Some(dir)) = (&config.body, path.parent()) {
            if body.is_relative() {
                config.body = Some(dir.join(body));
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.savgol.validate()?;
        if self.savgol.derivative_order != 2 {
            return Err(Error::Config(format!(
                "savgol.derivative_order must be 2 for accelerations, got {}",
                self.savgol.derivative_order
            )));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("`{name}` must be positive, got {v}")))
            }
        };
        positive("stevens_exponent", self.stevens_exponent)?;
        positive("subject_mass_kg", self.subject_mass_kg)?;
        positive("gravity_magnitude", self.gravity_magnitude)?;
        self.intensity
            .validate()
            .map_err(|e| Error::Config(format!("intensity: {e}")))?;
        if (self.output_sample_rate as f64) <= 2.0 * self.intensity.carrier_frequency {
            return Err(Error::Config(format!(
                "`output_sample_rate` {} must exceed twice the carrier frequency",
                self.output_sample_rate
            )));
        }
        match (self.normalization_mode, self.reference_force_n) {
            (NormalizationMode::FixedReference, None) => Err(Error::Config(
                "`reference_force_n` is required for fixed-reference normalization".into(),
            )),
            (_, Some(r)) => positive("reference_force_n", r),
            _ => Ok(()),
        }
    }

    pub fn normalization(&self) -> Normalization {
        match self.normalization_mode {
            NormalizationMode::PerClipMax => Normalization::PerClipMax,
            NormalizationMode::FixedReference => {
                Normalization::FixedReference(self.reference_force_n.unwrap_or(f64::NAN))
            }
        }
    }

    /// The override model when `body` is set, otherwise the default model.
    pub fn body_model(&self) -> Result<BodyModel> {
        match &self.body {
            Some(path) => BodyModel::load(path),
            None => Ok(default_body_model()),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialization is infallible")
    }
}
