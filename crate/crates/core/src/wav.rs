//! RIFF/WAVE parsing and serialization for integer LPCM audio.
//!
//! The reader accepts the canonical chunked layout (`RIFF` size `WAVE`
//! followed by `["id"][le u32 size][payload][pad if odd]` chunks), keeps
//! channel 0 of the first `data` chunk and normalizes samples into
//! `[-1.0, 1.0)`. The writer emits the 44-byte-header mono form of the same
//! subset. Only PCM (format code 1) at 8 or 16 bits per sample is supported.

use crate::real::{from_u32, Real};

/// Divisor used to normalize 16-bit samples; maps `0x8000` to exactly `-1.0`.
const FULL_SCALE_16: u32 = 32768;
/// Divisor used to normalize 8-bit samples after removing the 128 bias.
const FULL_SCALE_8: u32 = 128;

/// Errors produced while reading or writing WAVE data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WavError {
    /// Structurally invalid RIFF/WAVE bytes.
    #[error("malformed RIFF: {0}")]
    MalformedRiff(String),
    /// Well-formed container holding audio we do not handle.
    #[error("unsupported WAVE format: {0}")]
    UnsupportedFormat(String),
}

/// A decoded, normalized audio signal.
///
/// `samples` hold a single channel with every value in `[-1.0, 1.0)`;
/// `channels_in_source` records how many channels the source file carried
/// before channel 0 was extracted.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal<T> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
    pub source_bits: u16,
    pub channels_in_source: u16,
}

impl<T: Real> AudioSignal<T> {
    /// A mono 16-bit-provenance signal, the common case for generated audio.
    pub fn mono(samples: Vec<T>, sample_rate: u32) -> Self {
        AudioSignal {
            samples,
            sample_rate,
            source_bits: 16,
            channels_in_source: 1,
        }
    }
}

/// Contents of a `fmt ` chunk, before any support checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavFormat {
    pub audio_format_code: u16,
    pub channels: u16,
    pub sample_rate: u32,
    pub bits_per_sample: u16,
}

impl WavFormat {
    fn parse(payload: &[u8]) -> Result<Self, WavError> {
        if payload.len() < 16 {
            return Err(WavError::MalformedRiff(format!(
                "fmt chunk holds {} bytes, need at least 16",
                payload.len()
            )));
        }
        Ok(WavFormat {
            audio_format_code: u16::from_le_bytes([payload[0], payload[1]]),
            channels: u16::from_le_bytes([payload[2], payload[3]]),
            sample_rate: u32::from_le_bytes([payload[4], payload[5], payload[6], payload[7]]),
            bits_per_sample: u16::from_le_bytes([payload[14], payload[15]]),
        })
    }

    fn check_supported(&self) -> Result<(), WavError> {
        if self.audio_format_code != 1 {
            return Err(WavError::UnsupportedFormat(format!(
                "audio format code {} (only PCM = 1)",
                self.audio_format_code
            )));
        }
        if self.bits_per_sample != 8 && self.bits_per_sample != 16 {
            return Err(WavError::UnsupportedFormat(format!(
                "{} bits per sample (only 8 or 16)",
                self.bits_per_sample
            )));
        }
        if self.channels == 0 {
            return Err(WavError::MalformedRiff("fmt declares zero channels".into()));
        }
        if self.sample_rate == 0 {
            return Err(WavError::MalformedRiff(
                "fmt declares zero sample rate".into(),
            ));
        }
        Ok(())
    }
}

/// Parse a complete WAVE file image into a normalized signal.
///
/// Keeps channel 0 only. 16-bit samples are little-endian signed and divided
/// by 32768; 8-bit samples are unsigned and mapped by `(v - 128) / 128`.
/// Chunks other than `fmt ` and `data` are skipped.
pub fn parse_wav<T: Real>(bytes: &[u8]) -> Result<AudioSignal<T>, WavError> {
    if bytes.len() < 12 {
        return Err(WavError::MalformedRiff(format!(
            "file holds {} bytes, need at least the 12-byte RIFF/WAVE preamble",
            bytes.len()
        )));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(WavError::MalformedRiff("missing RIFF magic".into()));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::MalformedRiff("missing WAVE form type".into()));
    }

    let mut fmt: Option<WavFormat> = None;
    let mut data: Option<&[u8]> = None;
    let mut offset = 12usize;
    while offset + 8 <= bytes.len() {
        let id = &bytes[offset..offset + 4];
        let size = u32::from_le_bytes([
            bytes[offset + 4],
            bytes[offset + 5],
            bytes[offset + 6],
            bytes[offset + 7],
        ]) as usize;
        let payload_start = offset + 8;
        let payload_end = payload_start
            .checked_add(size)
            .ok_or_else(|| WavError::MalformedRiff("chunk size overflows".into()))?;
        if payload_end > bytes.len() {
            return Err(WavError::MalformedRiff(format!(
                "chunk {:?} declares {} bytes but only {} remain",
                String::from_utf8_lossy(id),
                size,
                bytes.len() - payload_start
            )));
        }
        let payload = &bytes[payload_start..payload_end];
        match id {
            b"fmt " if fmt.is_none() => fmt = Some(WavFormat::parse(payload)?),
            b"data" if data.is_none() => data = Some(payload),
            _ => {}
        }
        // Chunks are word-aligned: odd payloads carry one pad byte.
        offset = payload_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| WavError::MalformedRiff("no fmt chunk".into()))?;
    fmt.check_supported()?;
    let data = data.ok_or_else(|| WavError::MalformedRiff("no data chunk".into()))?;

    let bytes_per_sample = (fmt.bits_per_sample / 8) as usize;
    let frame_size = bytes_per_sample * fmt.channels as usize;
    let frames = data.len() / frame_size;

    let mut samples = Vec::with_capacity(frames);
    match fmt.bits_per_sample {
        16 => {
            let scale = from_u32::<T>(FULL_SCALE_16);
            for frame in 0..frames {
                let at = frame * frame_size;
                let raw = i16::from_le_bytes([data[at], data[at + 1]]);
                samples.push(T::from_i16(raw).expect("i16 converts to Real") / scale);
            }
        }
        8 => {
            let scale = from_u32::<T>(FULL_SCALE_8);
            for frame in 0..frames {
                let raw = data[frame * frame_size] as i32 - 128;
                samples.push(T::from_i32(raw).expect("i32 converts to Real") / scale);
            }
        }
        _ => unreachable!("check_supported admits only 8 and 16 bits"),
    }

    Ok(AudioSignal {
        samples,
        sample_rate: fmt.sample_rate,
        source_bits: fmt.bits_per_sample,
        channels_in_source: fmt.channels,
    })
}

/// Serialize a signal as a canonical mono PCM WAVE file.
///
/// Each sample is denormalized by multiplying with the full-scale divisor,
/// rounded half away from zero and clamped to the integer range of
/// `target_bits`. Round-tripping through [`parse_wav`] reproduces samples
/// within one quantization step.
pub fn write_wav<T: Real>(signal: &AudioSignal<T>, target_bits: u16) -> Result<Vec<u8>, WavError> {
    if target_bits != 8 && target_bits != 16 {
        return Err(WavError::UnsupportedFormat(format!(
            "{target_bits} bits per sample (only 8 or 16)"
        )));
    }

    let bytes_per_sample = (target_bits / 8) as u32;
    let data_len = signal.samples.len() as u32 * bytes_per_sample;
    let pad = (data_len & 1) as u32;
    // 4 ("WAVE") + 24 (fmt chunk) + 8 (data header) + payload + pad.
    let riff_size = 4 + 24 + 8 + data_len + pad;

    let mut out = Vec::with_capacity(8 + riff_size as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_size.to_le_bytes());
    out.extend_from_slice(b"WAVE");

    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&signal.sample_rate.to_le_bytes());
    let block_align = bytes_per_sample as u16;
    let byte_rate = signal.sample_rate * bytes_per_sample;
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&target_bits.to_le_bytes());

    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    match target_bits {
        16 => {
            for &s in &signal.samples {
                let code = denormalize(s, FULL_SCALE_16, -32768, 32767) as i16;
                out.extend_from_slice(&code.to_le_bytes());
            }
        }
        8 => {
            for &s in &signal.samples {
                let code = (denormalize(s, FULL_SCALE_8, -128, 127) + 128) as u8;
                out.push(code);
            }
        }
        _ => unreachable!(),
    }
    if pad == 1 {
        out.push(0);
    }
    Ok(out)
}

/// `round_half_away_from_zero(x * scale)` clamped to `[lo, hi]`.
fn denormalize<T: Real>(x: T, scale: u32, lo: i64, hi: i64) -> i64 {
    let scaled = (x * from_u32::<T>(scale)).round();
    scaled.to_i64().unwrap_or(0).clamp(lo, hi)
}
