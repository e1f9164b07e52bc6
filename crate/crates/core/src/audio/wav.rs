use std::fs;
use std::path::Path;

use super::AudioBuffer;
use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

fn parse_err(offset: usize, reason: impl Into<String>) -> Error {
    Error::Parse { offset: offset as u64, reason: reason.into() }
}

fn u16_at(bytes: &[u8], at: usize) -> Result<u16> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| parse_err(at, "unexpected end of data"))
}

fn u32_at(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| parse_err(at, "unexpected end of data"))
}

struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

fn parse_fmt(bytes: &[u8], start: usize, size: usize) -> Result<Format> {
    if size < 16 {
        return Err(parse_err(start, format!("fmt chunk too small ({size} bytes)")));
    }
    let mut tag = u16_at(bytes, start)?;
    let channels = u16_at(bytes, start + 2)?;
    let sample_rate = u32_at(bytes, start + 4)?;
    let bits = u16_at(bytes, start + 14)?;
    if tag == FORMAT_EXTENSIBLE {
        if size < 40 {
            return Err(parse_err(start, "extensible fmt chunk shorter than 40 bytes"));
        }
        // first two bytes of the sub-format GUID carry the actual codec
        tag = u16_at(bytes, start + 24)?;
    }
    Ok(Format { tag, channels, sample_rate, bits })
}

/// Decodes an in-memory RIFF/WAVE file, downmixing stereo by channel mean.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.get(0..4) != Some(b"RIFF") {
        return Err(parse_err(0, "missing RIFF tag"));
    }
    if bytes.get(8..12) != Some(b"WAVE") {
        return Err(parse_err(8, "missing WAVE tag"));
    }
    let mut pos = 12;
    let mut format: Option<Format> = None;
    let mut data: Option<(usize, usize)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4)? as usize;
        let body = pos + 8;
        if body + size > bytes.len() {
            return Err(parse_err(pos, format!("chunk declares {size} bytes past end of file")));
        }
        match id {
            b"fmt " => format = Some(parse_fmt(bytes, body, size)?),
            b"data" => {
                if format.is_none() {
                    return Err(parse_err(pos, "data chunk precedes fmt chunk"));
                }
                data = Some((body, size));
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    let format = format.ok_or_else(|| parse_err(12, "no fmt chunk"))?;
    let (start, size) = data.ok_or_else(|| parse_err(12, "no data chunk"))?;

    if format.channels == 0 || format.channels > 2 {
        return Err(Error::UnsupportedFormat(format!("{} channels", format.channels)));
    }
    if format.sample_rate == 0 {
        return Err(parse_err(24, "zero sample rate"));
    }
    let channels = format.channels as usize;
    let raw: Vec<f64> = match (format.tag, format.bits) {
        (FORMAT_PCM, 16) => bytes[start..start + size]
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
            .collect(),
        (FORMAT_IEEE_FLOAT, 32) => {
            let mut out = Vec::with_capacity(size / 4);
            for (i, b) in bytes[start..start + size].chunks_exact(4).enumerate() {
                let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                if !v.is_finite() {
                    return Err(parse_err(start + 4 * i, "non-finite float sample"));
                }
                out.push(v as f64);
            }
            out
        }
        (tag, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "format tag {tag:#06x} with {bits} bits per sample"
            )))
        }
    };
    let samples = raw
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    AudioBuffer::new(samples, format.sample_rate)
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    decode_wav(&fs::read(path)?)
}

fn quantize(sample: f64) -> i16 {
    // symmetric range keeps -1.0 and 1.0 equidistant from zero
    (sample.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32767.0, 32767.0) as i16
}

/// Encodes as 16-bit mono PCM.
pub fn encode_wav(buf: &AudioBuffer) -> Vec<u8> {
    let data_len = buf.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&buf.sample_rate().to_le_bytes());
    out.extend_from_slice(&(buf.sample_rate() * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in buf.samples() {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}

pub fn write_wav(buf: &AudioBuffer, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_wav(buf))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wav_bytes(tag: u16, channels: u16, bits: u16, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&((36 + data.len()) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&tag.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&8000u32.to_le_bytes());
        let align = channels * bits / 8;
        out.extend_from_slice(&(8000 * align as u32).to_le_bytes());
        out.extend_from_slice(&align.to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
        out.extend_from_slice(data);
        out
    }

    #[test]
    fn pcm16_half_scale() {
        let buf = decode_wav(&wav_bytes(1, 1, 16, &16384i16.to_le_bytes())).unwrap();
        assert_eq!(buf.samples(), &[0.5]);
        assert_eq!(buf.sample_rate(), 8000);
    }

    #[test]
    fn stereo_float_downmix() {
        let mut data = Vec::new();
        data.extend_from_slice(&0.2f32.to_le_bytes());
        data.extend_from_slice(&0.4f32.to_le_bytes());
        let buf = decode_wav(&wav_bytes(3, 2, 32, &data)).unwrap();
        assert!((buf.samples()[0] - 0.3).abs() < 1e-7);
    }

    #[test]
    fn mu_law_is_unsupported() {
        let err = decode_wav(&wav_bytes(7, 1, 8, &[0xff, 0x7f])).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)), "{err}");
    }

    #[test]
    fn malformed_header_reports_offset() {
        let mut bytes = wav_bytes(1, 1, 16, &[0, 0]);
        bytes[8..12].copy_from_slice(b"AVI ");
        match decode_wav(&bytes).unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 8),
            e => panic!("unexpected {e}"),
        }
        let mut truncated = wav_bytes(1, 1, 16, &[0, 0, 0, 0]);
        truncated.truncate(46);
        match decode_wav(&truncated).unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 36),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn clipping_and_full_scale() {
        let buf = AudioBuffer::new(vec![1.0, -1.5, 0.0], 8000).unwrap();
        let bytes = encode_wav(&buf);
        let pcm: Vec<i16> =
            bytes[44..].chunks_exact(2).map(|b| i16::from_le_bytes([b[0], b[1]])).collect();
        assert_eq!(pcm, vec![32767, -32767, 0]);
    }

    proptest! {
        #[test]
        fn round_trip_within_one_lsb(samples in prop::collection::vec(-1.0f64..=1.0, 1..400)) {
            let buf = AudioBuffer::new(samples, 22050).unwrap();
            let back = decode_wav(&encode_wav(&buf)).unwrap();
            prop_assert_eq!(back.len(), buf.len());
            for (a, b) in buf.samples().iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 1.0 / 32768.0 + 1e-15);
            }
        }
    }
}
