use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Default Stevens exponent for perceived force magnitude.
pub const FORCE_STEVENS_EXPONENT: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    PerClipMax,
    FixedReference,
}

/// How force magnitudes are scaled into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Divide by the largest magnitude in the clip.
    PerClipMax,
    /// Divide by a reference force in Newtons and clamp at 1.
    FixedReference(f64),
}

/// Per-frame sense of effort in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortSignal {
    pub values: Vec<f64>,
    /// Joint name, or `centroid` for the ground-reaction path.
    pub source: String,
}

impl EffortSignal {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        check_unit_interval(&values)?;
        Ok(Self {
            values,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_unit_interval(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(Error::OutOfRange {
            index,
            value: values[index],
            lo: 0.0,
            hi: 1.0,
        }),
        None => Ok(()),
    }
}

/// Euclidean norm of each force divided by the normalizer. An all-zero clip
/// maps to all zeros.
pub fn normalize_force_magnitude(forces: &[Vec3], mode: Normalization) -> Result<Vec<f64>> {
    let norms: Vec<f64> = forces.iter().map(|f| f.norm()).collect();
    match mode {
        Normalization::PerClipMax => {
            let max = norms.iter().copied().fold(0.0, f64::max);
            if max == 0.0 {
                return Ok(vec![0.0; norms.len()]);
            }
            Ok(norms.into_iter().map(|n| n / max).collect())
        }
        Normalization::FixedReference(reference) => {
            if !(reference.is_finite() && reference > 0.0) {
                return Err(Error::param("reference_force_n", "must be positive"));
            }
            Ok(norms.into_iter().map(|n| (n / reference).min(1.0)).collect())
        }
    }
}

/// Stevens power law: `effort = normalized^exponent`.
pub fn effort_from_force(normalized: &[f64], exponent: f64) -> Result<EffortSignal> {
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(Error::param("stevens_exponent", "must be positive"));
    }
    check_unit_interval(normalized)?;
    Ok(EffortSignal {
        values: normalized.iter().map(|x| x.powf(exponent)).collect(),
        source: String::new(),
    })
}

/// Diagnostic table of `t, effort, envelope` rows.
pub fn effort_csv_string(times: &[f64], effort: &[f64], envelope: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "effort", "envelope"]).expect("in-memory write");
    for ((t, e), a) in times.iter().zip(effort).zip(envelope) {
        w.write_record([t.to_string(), e.to_string(), a.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn write_effort_csv(
    path: impl AsRef<Path>,
    times: &[f64],
    effort: &[f64],
    envelope: &[f64],
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, effort_csv_string(times, effort, envelope)).map_err(|e| Error::io(path, e))
}

/// Reads the `t` and `effort` columns of an effort CSV; other columns are ignored.
pub fn read_effort_csv(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<f64>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_effort_csv(&text)
}

pub fn parse_effort_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let bad = |message: String| Error::Parse {
        what: "effort CSV".into(),
        message,
    };
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (ti, ei) = (col("t")?, col("effort")?);
    let mut times = Vec::new();
    let mut effort = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.parse()
                .map_err(|_| bad(format!("row {row}: `{s}` is not a number")))
        };
        times.push(num(ti)?);
        effort.push(num(ei)?);
    }
    Ok((times, effort))
}
