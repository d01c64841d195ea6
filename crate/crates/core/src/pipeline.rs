//! End-to-end orchestration: trace file in, force CSV, effort CSV, WAV,
//! plots and a JSON report out.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::body_model::{compute_cog_positions, whole_body_com, BodyModel, SegmentCogTrace};
use crate::config::{PipelineConfig, CENTROID_SOURCE};
use crate::dynamics::{
    ground_reaction_force, inverse_dynamics_tree, segment_accelerations, smooth_differentiate,
    write_forces_csv, GrfTrace, JointForceTrace, KinematicsTrace,
};
use crate::error::{Error, ErrorKind};
use crate::haptics::{
    effort_from_force, normalize_force_magnitude, read_effort_csv, synthesize_am,
    write_effort_csv, write_wav, EffortSignal, VibrationWaveform,
};
use crate::plot::{emit_plots, write_joint_force_plot, PlotInputs};
use crate::trace_io::{parse_landmark_trace_with, resample_uniform, LandmarkTrace};
use crate::Vec3;

pub const FORCES_CSV: &str = "forces.csv";
pub const EFFORT_CSV: &str = "effort.csv";
pub const WAV_FILE: &str = "vibration.wav";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Model,
    Parse,
    Resample,
    CenterOfGravity,
    Acceleration,
    InverseDynamics,
    GroundReaction,
    Normalize,
    Effort,
    Synthesis,
    Write,
    Plot,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Model => "model",
            Stage::Parse => "parse",
            Stage::Resample => "resample",
            Stage::CenterOfGravity => "center-of-gravity",
            Stage::Acceleration => "acceleration",
            Stage::InverseDynamics => "inverse-dynamics",
            Stage::GroundReaction => "ground-reaction",
            Stage::Normalize => "normalize",
            Stage::Effort => "effort",
            Stage::Synthesis => "synthesis",
            Stage::Write => "write",
            Stage::Plot => "plot",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl PipelineError {
    pub fn kind(&self) -> ErrorKind {
        self.source.kind()
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T, Error> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

#[derive(Debug, Default)]
struct Timings(Vec<StageTiming>);

impl Timings {
    fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T, Error>) -> Result<T, PipelineError> {
        let start = Instant::now();
        let out = f().at(stage);
        self.0.push(StageTiming {
            stage,
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Which force drives the vibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceSource {
    /// Whole-body ground reaction force from the centroid acceleration.
    Centroid,
    /// Force at the proximal joint of this segment.
    Joint(usize),
}

impl ForceSource {
    pub fn resolve(name: &str, model: &BodyModel) -> Result<Self, Error> {
        if name == CENTROID_SOURCE {
            return Ok(ForceSource::Centroid);
        }
        model.joint_index(name).map(ForceSource::Joint).ok_or_else(|| {
            let joints: Vec<String> = (0..model.len()).map(|i| model.joint_name(i)).collect();
            Error::Config(format!(
                "unknown source \"{name}\"; expected `{CENTROID_SOURCE}` or one of {}",
                joints.join(", ")
            ))
        })
    }

    pub fn label(&self, model: &BodyModel) -> String {
        match self {
            ForceSource::Centroid => CENTROID_SOURCE.to_owned(),
            ForceSource::Joint(i) => model.joint_name(*i),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DynamicsOutput {
    pub input_frames: usize,
    pub resampled: bool,
    /// Uniform frame interval used for differentiation, seconds.
    pub dt: f64,
    pub cogs: SegmentCogTrace,
    pub kinematics: KinematicsTrace,
    pub joints: JointForceTrace,
    /// Whole-body center of mass per frame of the (resampled) trace.
    pub com: Vec<Vec3>,
    /// Aligned to the valid range.
    pub grf: GrfTrace,
}

impl DynamicsOutput {
    pub fn source_forces(&self, source: ForceSource) -> &[Vec3] {
        match source {
            ForceSource::Centroid => &self.grf.forces,
            ForceSource::Joint(i) => &self.joints.forces[i],
        }
    }
}

fn ensure_frames(trace: &LandmarkTrace, window: usize) -> Result<(), Error> {
    if trace.len() < window.max(2) {
        return Err(Error::InsufficientFrames {
            needed: window.max(2),
            got: trace.len(),
        });
    }
    Ok(())
}

fn dynamics_timed(
    trace: &LandmarkTrace,
    model: &BodyModel,
    config: &PipelineConfig,
    timings: &mut Timings,
) -> Result<DynamicsOutput, PipelineError> {
    let spec = config.savgol;
    ensure_frames(trace, spec.window).at(Stage::Parse)?;

    let resampled = if trace.is_uniform() {
        None
    } else {
        Some(timings.time(Stage::Resample, || {
            let rate = trace
                .frame_rate_hint
                .unwrap_or_else(|| 1.0 / trace.mean_interval().unwrap_or(1.0));
            let out = resample_uniform(trace, rate)?;
            ensure_frames(&out, spec.window)?;
            Ok(out)
        })?)
    };
    let input_frames = trace.len();
    let trace = resampled.as_ref().unwrap_or(trace);
    let dt = trace.mean_interval().expect("at least two frames");

    let cogs = timings.time(Stage::CenterOfGravity, || {
        let mut cogs = compute_cog_positions(trace, model)?;
        if config.planar {
            cogs.zero_depth();
        }
        Ok(cogs)
    })?;
    let kinematics = timings.time(Stage::Acceleration, || segment_accelerations(&cogs, dt, &spec))?;
    let joints = timings.time(Stage::InverseDynamics, || {
        inverse_dynamics_tree(&kinematics, model, config.subject_mass_kg, config.gravity_magnitude)
    })?;
    let (com, grf) = timings.time(Stage::GroundReaction, || {
        let com = whole_body_com(&cogs, model);
        let accel = smooth_differentiate(&com, dt, &spec)?;
        let grf = ground_reaction_force(&accel, config.subject_mass_kg, config.gravity_magnitude)?;
        Ok((com, grf))
    })?;

    Ok(DynamicsOutput {
        input_frames,
        resampled: resampled.is_some(),
        dt,
        cogs,
        kinematics,
        joints,
        com,
        grf,
    })
}

/// Resampling (when jittered), CoG, accelerations, joint forces and GRF.
pub fn compute_dynamics(
    trace: &LandmarkTrace,
    model: &BodyModel,
    config: &PipelineConfig,
) -> Result<DynamicsOutput, PipelineError> {
    dynamics_timed(trace, model, config, &mut Timings::default())
}

#[derive(Debug, Clone)]
pub struct HapticsOutput {
    pub effort: EffortSignal,
    /// Envelope at the effort frame times.
    pub envelope: Vec<f64>,
    pub waveform: VibrationWaveform,
}

fn haptics_timed(
    forces: &[Vec3],
    times: &[f64],
    label: &str,
    config: &PipelineConfig,
    timings: &mut Timings,
) -> Result<HapticsOutput, PipelineError> {
    let normalized = timings.time(Stage::Normalize, || {
        normalize_force_magnitude(forces, config.normalization())
    })?;
    let effort = timings.time(Stage::Effort, || {
        let mut e = effort_from_force(&normalized, config.stevens_exponent)?;
        e.source = label.to_owned();
        Ok(e)
    })?;
    synthesize_timed(effort, times, config, timings)
}

fn synthesize_timed(
    effort: EffortSignal,
    times: &[f64],
    config: &PipelineConfig,
    timings: &mut Timings,
) -> Result<HapticsOutput, PipelineError> {
    timings.time(Stage::Synthesis, || {
        let envelope = effort
            .values
            .iter()
            .map(|&e| config.intensity.envelope(e))
            .collect::<Result<Vec<_>, _>>()?;
        let waveform = synthesize_am(&effort, times, &config.intensity, config.output_sample_rate)?;
        Ok(HapticsOutput {
            effort,
            envelope,
            waveform,
        })
    })
}

/// Normalization, Stevens mapping and AM synthesis for one force track.
pub fn compute_haptics(
    forces: &[Vec3],
    times: &[f64],
    label: &str,
    config: &PipelineConfig,
) -> Result<HapticsOutput, PipelineError> {
    haptics_timed(forces, times, label, config, &mut Timings::default())
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config's `source`.
    pub source: Option<String>,
    /// Stop after the force CSV (no effort, audio or envelope plots).
    pub forces_only: bool,
    pub skip_plots: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub frames: usize,
    pub frame_rate_hz: f64,
    pub duration_s: f64,
    pub resampled: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidRange {
    /// First valid frame index.
    pub start: usize,
    /// One past the last valid frame index.
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub input: InputSummary,
    pub valid_range: ValidRange,
    pub stage_seconds: Vec<StageTiming>,
    pub source: String,
    pub peak_force_n: f64,
    pub peak_frame: usize,
    pub peak_time_s: f64,
    pub outputs: Vec<PathBuf>,
}

pub fn run_pipeline(
    trace_path: impl AsRef<Path>,
    config_path: impl AsRef<Path>,
    output_dir: impl AsRef<Path>,
    options: &RunOptions,
) -> Result<PipelineReport, PipelineError> {
    let output_dir = output_dir.as_ref();
    let mut timings = Timings::default();

    let config = timings.time(Stage::Config, || PipelineConfig::load(config_path.as_ref()))?;
    let model = timings.time(Stage::Model, || config.body_model())?;
    let source_name = options.source.as_deref().unwrap_or(&config.source);
    let source = ForceSource::resolve(source_name, &model).at(Stage::Config)?;
    let trace = timings.time(Stage::Parse, || {
        parse_landmark_trace_with(trace_path.as_ref(), &model.required_landmarks())
    })?;

    let dynamics = dynamics_timed(&trace, &model, &config, &mut timings)?;
    let forces = dynamics.source_forces(source);
    let times = &dynamics.joints.timestamps;
    let valid = dynamics.joints.valid.clone();

    let mut outputs = Vec::new();
    std::fs::create_dir_all(output_dir)
        .map_err(|e| Error::io(output_dir, e))
        .at(Stage::Write)?;
    let forces_csv = output_dir.join(FORCES_CSV);
    timings.time(Stage::Write, || {
        write_forces_csv(&forces_csv, &dynamics.joints, Some(&dynamics.grf))
    })?;
    outputs.push(forces_csv);

    if options.forces_only {
        if !options.skip_plots {
            outputs.push(timings.time(Stage::Plot, || write_joint_force_plot(output_dir, &dynamics.joints))?);
        }
    } else {
        let label = source.label(&model);
        let haptics = haptics_timed(forces, times, &label, &config, &mut timings)?;
        let effort_csv = output_dir.join(EFFORT_CSV);
        let wav = output_dir.join(WAV_FILE);
        timings.time(Stage::Write, || {
            write_effort_csv(&effort_csv, times, &haptics.effort.values, &haptics.envelope)?;
            write_wav(&haptics.waveform, &wav)
        })?;
        outputs.push(effort_csv);
        outputs.push(wav);
        if !options.skip_plots {
            let plots = timings.time(Stage::Plot, || {
                emit_plots(
                    output_dir,
                    &PlotInputs {
                        joints: &dynamics.joints,
                        times,
                        effort: &haptics.effort.values,
                        envelope: &haptics.envelope,
                    },
                )
            })?;
            outputs.extend(plots);
        }
    }

    let (peak_idx, peak_force_n) = forces
        .iter()
        .map(|f| f.norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, n)| if n > best.1 { (i, n) } else { best });
    let report_path = output_dir.join(REPORT_FILE);
    outputs.push(report_path.clone());
    let report = PipelineReport {
        input: InputSummary {
            frames: trace.len(),
            frame_rate_hz: 1.0 / trace.mean_interval().unwrap_or(f64::NAN),
            duration_s: trace.duration(),
            resampled: dynamics.resampled,
        },
        valid_range: ValidRange {
            start: valid.start,
            end: valid.end,
            t_start: times[0],
            t_end: times[times.len() - 1],
        },
        stage_seconds: timings.0,
        source: source.label(&model),
        peak_force_n,
        peak_frame: valid.start + peak_idx,
        peak_time_s: times[peak_idx],
        outputs,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialization is infallible");
    std::fs::write(&report_path, json)
        .map_err(|e| Error::io(&report_path, e))
        .at(Stage::Write)?;
    Ok(report)
}

/// Renders an effort CSV (`t`, `effort` columns) to a WAV file.
pub fn synth_from_effort_csv(
    effort_csv: impl AsRef<Path>,
    config_path: impl AsRef<Path>,
    wav_path: impl AsRef<Path>,
) -> Result<HapticsOutput, PipelineError> {
    let mut timings = Timings::default();
    let config = timings.time(Stage::Config, || PipelineConfig::load(config_path.as_ref()))?;
    let (times, values) = timings.time(Stage::Parse, || read_effort_csv(effort_csv.as_ref()))?;
    let effort = EffortSignal::new(values, "effort-csv").at(Stage::Effort)?;
    let out = synthesize_timed(effort, &times, &config, &mut timings)?;
    write_wav(&out.waveform, wav_path.as_ref()).at(Stage::Write)?;
    Ok(out)
}
