//! Force to sense of effort, effort to vibration amplitude, and the 200 Hz
//! amplitude-modulated waveform written as PCM audio.

mod effort;
mod synth;
mod wav;

pub use effort::{
    effort_csv_string, effort_from_force, normalize_force_magnitude, parse_effort_csv,
    read_effort_csv, write_effort_csv, EffortSignal, Normalization, NormalizationMode,
    FORCE_STEVENS_EXPONENT,
};
pub use synth::{
    amplitude_to_intensity, intensity_to_amplitude, sample_count, synthesize_am,
    IntensityModelParams, VibrationWaveform,
};
pub use wav::{decode_wav, encode_wav, quantize, read_wav, write_wav, WavData};
