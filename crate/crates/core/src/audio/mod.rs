//! Audio buffers, WAV I/O, resampling and segmentation.

mod resample;
mod wav;

pub use resample::resample;
pub use wav::{decode_wav, encode_wav, read_wav, write_wav};

use crate::error::{invalid, Result};

/// Sample rate every analysis stage expects.
pub const CANONICAL_RATE: u32 = 22_050;

/// Length of a classification unit.
pub const SEGMENT_SECONDS: f64 = 10.0;

/// Mono signal with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioBuffer {
    /// Fails if the rate is zero or any sample is NaN or infinite.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn silence(len: usize, sample_rate: u32) -> Self {
        Self { samples: vec![0.0; len], sample_rate: sample_rate.max(1) }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate as f64 / 2.0
    }

    /// Same rate, new samples. Used by filters that preserve length.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self { samples, sample_rate: self.sample_rate }
    }

    /// Root-mean-square level.
    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    pub fn scaled(&self, gain: f64) -> Self {
        self.with_samples(self.samples.iter().map(|s| s * gain).collect())
    }
}

/// A ten-second canonical chunk of a longer recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub audio: AudioBuffer,
    pub source_id: String,
    pub index: usize,
    pub start_time: f64,
}

impl Segment {
    /// Wraps a canonical buffer as a stand-alone segment (index 0).
    pub fn standalone(source_id: impl Into<String>, audio: AudioBuffer) -> Self {
        Self { audio, source_id: source_id.into(), index: 0, start_time: 0.0 }
    }

    /// `<source>_<index>`, the stem used for emitted segment files.
    pub fn id(&self) -> String {
        format!("{}_{}", self.source_id, self.index)
    }
}

/// Cuts a canonical-rate buffer into consecutive non-overlapping chunks.
///
/// A trailing partial chunk is discarded, so a buffer shorter than one chunk
/// yields no segments.
pub fn segment_audio(buf: &AudioBuffer, source_id: &str, seconds: f64) -> Result<Vec<Segment>> {
    if buf.sample_rate() != CANONICAL_RATE {
        return Err(invalid(format!(
            "segmenting expects {CANONICAL_RATE} Hz audio, got {} Hz",
            buf.sample_rate()
        )));
    }
    if seconds.is_nan() || seconds <= 0.0 {
        return Err(invalid("segment duration must be positive"));
    }
    let chunk = (seconds * buf.sample_rate() as f64).round() as usize;
    if chunk == 0 {
        return Err(invalid("segment duration shorter than one sample"));
    }
    Ok(buf
        .samples()
        .chunks_exact(chunk)
        .enumerate()
        .map(|(index, samples)| Segment {
            audio: buf.with_samples(samples.to_vec()),
            source_id: source_id.to_string(),
            index,
            start_time: index as f64 * seconds,
        })
        .collect())
}

/// Brings any supported buffer to the canonical rate.
pub fn to_canonical(buf: &AudioBuffer) -> Result<AudioBuffer> {
    resample(buf, CANONICAL_RATE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(seconds: f64) -> AudioBuffer {
        let n = (seconds * CANONICAL_RATE as f64).round() as usize;
        AudioBuffer::new((0..n).map(|i| (i % 1000) as f64 / 1000.0).collect(), CANONICAL_RATE)
            .unwrap()
    }

    #[test]
    fn rejects_non_finite_and_zero_rate() {
        assert!(AudioBuffer::new(vec![0.0, f64::NAN], 8000).is_err());
        assert!(AudioBuffer::new(vec![0.0], 0).is_err());
    }

    #[test]
    fn segments_thirty_five_seconds_into_three() {
        let segs = segment_audio(&ramp(35.0), "site", SEGMENT_SECONDS).unwrap();
        assert_eq!(segs.len(), 3);
        let starts: Vec<f64> = segs.iter().map(|s| s.start_time).collect();
        assert_eq!(starts, vec![0.0, 10.0, 20.0]);
        assert!(segs.iter().all(|s| s.audio.len() == 220_500));
        assert_eq!(segs[2].id(), "site_2");
    }

    #[test]
    fn exact_and_short_buffers() {
        assert_eq!(segment_audio(&ramp(10.0), "a", 10.0).unwrap().len(), 1);
        assert!(segment_audio(&ramp(9.9), "a", 10.0).unwrap().is_empty());
    }

    #[test]
    fn segments_reassemble_to_prefix() {
        let buf = ramp(23.4);
        let segs = segment_audio(&buf, "a", 10.0).unwrap();
        let joined: Vec<f64> = segs.iter().flat_map(|s| s.audio.samples().to_vec()).collect();
        assert_eq!(&buf.samples()[..joined.len()], &joined[..]);
    }

    #[test]
    fn refuses_non_canonical_rate() {
        let buf = AudioBuffer::silence(441_000, 44_100);
        assert!(segment_audio(&buf, "a", 10.0).is_err());
    }
}
