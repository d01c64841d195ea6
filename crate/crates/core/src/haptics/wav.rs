//! Mono 16-bit PCM RIFF/WAVE files.

use std::path::Path;

use crate::error::{Error, Result};

use super::synth::VibrationWaveform;

const FULL_SCALE: f64 = 32767.0;
const BITS_PER_SAMPLE: u16 = 16;
const CHANNELS: u16 = 1;
const FORMAT_PCM: u16 = 1;

/// Decoded PCM contents of a WAV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavData {
    pub sample_rate: u32,
    pub byte_rate: u32,
    pub block_align: u16,
    pub bits_per_sample: u16,
    pub channels: u16,
    pub samples: Vec<i16>,
}

/// `round(sample * 32767)`, halves rounded away from zero.
pub fn quantize(sample: f64) -> i16 {
    (sample * FULL_SCALE).round() as i16
}

pub fn encode_wav(wave: &VibrationWaveform) -> Result<Vec<u8>> {
    let mut pcm = Vec::with_capacity(wave.samples.len() * 2);
    for (index, &s) in wave.samples.iter().enumerate() {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange {
                index,
                value: s,
                lo: -1.0,
                hi: 1.0,
            });
        }
        pcm.extend_from_slice(&quantize(s).to_le_bytes());
    }
    let data_len = u32::try_from(pcm.len())
        .ok()
        .filter(|n| *n <= u32::MAX - 36)
        .ok_or_else(|| Error::param("samples", "too many samples for a RIFF container"))?;

    let block_align = CHANNELS * BITS_PER_SAMPLE / 8;
    let byte_rate = wave.sample_rate * block_align as u32;

    let mut out = Vec::with_capacity(44 + pcm.len());
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");

    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&CHANNELS.to_le_bytes());
    out.extend_from_slice(&wave.sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&BITS_PER_SAMPLE.to_le_bytes());

    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    out.extend_from_slice(&pcm);
    Ok(out)
}

pub fn write_wav(wave: &VibrationWaveform, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_wav(wave)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parses a 16-bit PCM WAV file. Unknown chunks are skipped.
pub fn decode_wav(bytes: &[u8]) -> Result<WavData> {
    let bad = |message: &str| Error::Parse {
        what: "WAV".into(),
        message: message.into(),
    };
    let u16_at = |b: &[u8], i: usize| u16::from_le_bytes([b[i], b[i + 1]]);
    let u32_at = |b: &[u8], i: usize| u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]]);

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("missing RIFF/WAVE header"));
    }
    let mut fmt = None;
    let mut data = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32_at(bytes, pos + 4) as usize;
        let body = bytes
            .get(pos + 8..pos + 8 + len)
            .ok_or_else(|| bad("truncated chunk"))?;
        match id {
            b"fmt " if len >= 16 => fmt = Some(body),
            b"data" => data = Some(body),
            _ => {}
        }
        pos += 8 + len + (len & 1);
    }
    let fmt = fmt.ok_or_else(|| bad("no fmt chunk"))?;
    let data = data.ok_or_else(|| bad("no data chunk"))?;
    if u16_at(fmt, 0) != FORMAT_PCM || u16_at(fmt, 14) != BITS_PER_SAMPLE {
        return Err(bad("only 16-bit PCM is supported"));
    }
    Ok(WavData {
        channels: u16_at(fmt, 2),
        sample_rate: u32_at(fmt, 4),
        byte_rate: u32_at(fmt, 8),
        block_align: u16_at(fmt, 12),
        bits_per_sample: u16_at(fmt, 14),
        samples: data
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]))
            .collect(),
    })
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<WavData> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave(samples: Vec<f64>, sample_rate: u32) -> VibrationWaveform {
        VibrationWaveform {
            sample_rate,
            carrier_frequency: 200.0,
            samples,
        }
    }

    #[test]
    fn endpoint_quantization() {
        assert_eq!(quantize(1.0), 32767);
        assert_eq!(quantize(-1.0), -32767);
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(0.5 / 32767.0), 1);
        assert_eq!(quantize(-0.5 / 32767.0), -1);
    }

    #[test]
    fn header_arithmetic_for_four_samples() {
        let bytes = encode_wav(&wave(vec![0.0, 0.5, -0.5, 1.0], 8000)).unwrap();
        assert_eq!(bytes.len(), 44 + 8);
        assert_eq!(&bytes[0..4], b"RIFF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 44);
        assert_eq!(u32::from_le_bytes(bytes[28..32].try_into().unwrap()), 16000);
        assert_eq!(u32::from_le_bytes(bytes[40..44].try_into().unwrap()), 8);
        let parsed = decode_wav(&bytes).unwrap();
        assert_eq!(parsed.samples, [0, 16384, -16384, 32767]);
        assert_eq!((parsed.channels, parsed.block_align, parsed.byte_rate), (1, 2, 16000));
    }

    #[test]
    fn out_of_range_sample_is_rejected() {
        let err = encode_wav(&wave(vec![0.0, 1.0001], 8000)).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { index: 1, .. }));
    }

    #[test]
    fn skips_unknown_chunks() {
        let mut bytes = encode_wav(&wave(vec![0.25], 8000)).unwrap();
        let mut extra = b"LIST".to_vec();
        extra.extend_from_slice(&3u32.to_le_bytes());
        extra.extend_from_slice(b"abc\0");
        bytes.splice(36..36, extra);
        assert_eq!(decode_wav(&bytes).unwrap().samples, [quantize(0.25)]);
        assert!(decode_wav(b"RIFX").is_err());
    }
}
