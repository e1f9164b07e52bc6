//! Deterministic labelled scenes: rain, cicada choruses, bird-like chirps
//! and a noise floor, mixed and soft-clipped.

mod corpus;

pub use corpus::{chorus_scene_spec, gen_corpus, manifest_csv, CorpusMix, CorpusScene};

use crate::audio::{AudioBuffer, Segment, CANONICAL_RATE};
use crate::dsp::fft;
use crate::error::{invalid, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use std::f64::consts::PI;
use std::fmt;

/// A mix whose peak exceeds this before clipping is rejected.
pub const MAX_PRECLIP_PEAK: f64 = 4.0;
/// Samples below this magnitude pass the soft clipper unchanged.
pub const CLIP_KNEE: f64 = 0.8;

/// Peak of a rain click relative to the rain bed's RMS.
const CLICK_PEAK_RATIO: f64 = 3.0;
/// Depth of the chorus amplitude modulation.
const CHORUS_AM_DB: f64 = 2.0;

/// One source in a scene. Levels are RMS in dBFS; for chirps the RMS is
/// taken over the chirp's own duration.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// White noise bed plus Poisson-timed clicks of 2-5 ms.
    Rain { level_db: f64, drops_per_second: f64 },
    /// Band-limited noise with slow +-2 dB amplitude modulation.
    Chorus { center: f64, bandwidth: f64, level_db: f64 },
    /// `count` linear sweeps from `f0` to `f1` at random times.
    Chirp { f0: f64, f1: f64, count: usize, level_db: f64 },
    NoiseFloor { level_db: f64 },
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rain { level_db, drops_per_second } => {
                write!(f, "rain({level_db:.2}dB;{drops_per_second:.1}/s)")
            }
            Self::Chorus { center, bandwidth, level_db } => {
                write!(f, "chorus({center:.1}Hz;{bandwidth:.1}Hz;{level_db:.2}dB)")
            }
            Self::Chirp { f0, f1, count, level_db } => {
                write!(f, "chirp({f0:.1}-{f1:.1}Hz;x{count};{level_db:.2}dB)")
            }
            Self::NoiseFloor { level_db } => write!(f, "floor({level_db:.2}dB)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    pub duration: f64,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SceneLabels {
    pub rain: bool,
    pub cicada: bool,
}

impl SceneSpec {
    pub fn new(seed: u64, duration: f64) -> Self {
        Self { seed, duration, components: Vec::new() }
    }

    pub fn with(mut self, c: Component) -> Self {
        self.components.push(c);
        self
    }

    /// Rain-positive when the rain is louder than every chirp;
    /// cicada-positive when any chorus is present.
    pub fn labels(&self) -> SceneLabels {
        let loudest_chirp = self
            .components
            .iter()
            .filter_map(|c| match c {
                Component::Chirp { level_db, count, .. } if *count > 0 => Some(*level_db),
                _ => None,
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let rain = self.components.iter().any(|c| matches!(c, Component::Rain { level_db, .. } if *level_db > loudest_chirp));
        let cicada = self.components.iter().any(|c| matches!(c, Component::Chorus { .. }));
        SceneLabels { rain, cicada }
    }

    /// Components joined with `+`.
    pub fn describe(&self) -> String {
        self.components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+")
    }

    fn validate(&self) -> Result<()> {
        let nyquist = CANONICAL_RATE as f64 / 2.0;
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid(format!("scene duration {} s", self.duration)));
        }
        for c in &self.components {
            let ok = match c {
                Component::Rain { level_db, drops_per_second } => level_db.is_finite() && *drops_per_second >= 0.0,
                Component::Chorus { center, bandwidth, level_db } => {
                    level_db.is_finite()
                        && *bandwidth > 0.0
                        && center - bandwidth / 2.0 > 0.0
                        && center + bandwidth / 2.0 < nyquist
                }
                Component::Chirp { f0, f1, level_db, .. } => {
                    level_db.is_finite() && *f0 > 0.0 && *f1 > 0.0 && *f0 < nyquist && *f1 < nyquist
                }
                Component::NoiseFloor { level_db } => level_db.is_finite(),
            };
            if !ok {
                return Err(invalid(format!("invalid scene component {c}")));
            }
        }
        Ok(())
    }
}

fn amplitude(level_db: f64) -> f64 {
    10f64.powf(level_db / 20.0)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

fn rain(rng: &mut ChaCha8Rng, n: usize, level_db: f64, rate: f64) -> Vec<f64> {
    let a = amplitude(level_db);
    let mut out: Vec<f64> = gaussian(rng, n).into_iter().map(|v| a * v).collect();
    if rate <= 0.0 {
        return out;
    }
    let fs = CANONICAL_RATE as f64;
    let gap = Exp::new(rate).expect("positive rate");
    let mut t = gap.sample(rng);
    while ((t * fs) as usize) < n {
        let start = (t * fs) as usize;
        let len = (rng.random_range(0.002..0.005) * fs) as usize;
        let peak = CLICK_PEAK_RATIO * a * rng.random_range(0.5..1.0);
        for i in 0..len.min(n - start) {
            let env = (PI * i as f64 / len as f64).sin();
            let noise: f64 = StandardNormal.sample(rng);
            out[start + i] += peak * env * noise.clamp(-1.5, 1.5) / 1.5;
        }
        t += gap.sample(rng);
    }
    out
}

fn chorus(rng: &mut ChaCha8Rng, n: usize, center: f64, bandwidth: f64, level_db: f64) -> Vec<f64> {
    let noise = gaussian(rng, n);
    let mut spectrum = fft::to_complex(&noise, n);
    fft::forward(n).process(&mut spectrum);
    let bin_hz = CANONICAL_RATE as f64 / n as f64;
    let (lo, hi) = (center - bandwidth / 2.0, center + bandwidth / 2.0);
    for (k, c) in spectrum.iter_mut().enumerate() {
        let f = k.min(n - k) as f64 * bin_hz;
        if f < lo || f > hi {
            *c = Default::default();
        }
    }
    fft::inverse(n).process(&mut spectrum);
    let mut band: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let scale = amplitude(level_db) / rms(&band).max(1e-300);
    let mod_hz = rng.random_range(0.2..0.5);
    let phase = rng.random_range(0.0..2.0 * PI);
    for (i, v) in band.iter_mut().enumerate() {
        let t = i as f64 / CANONICAL_RATE as f64;
        let am = amplitude(CHORUS_AM_DB * (2.0 * PI * mod_hz * t + phase).sin());
        *v *= scale * am;
    }
    band
}

/// RMS of a Hann-tapered sinusoid relative to its peak amplitude.
const HANN_SINE_RMS: f64 = 0.433_012_701_892_219_3;

fn chirps(rng: &mut ChaCha8Rng, n: usize, f0: f64, f1: f64, count: usize, level_db: f64) -> Vec<f64> {
    let fs = CANONICAL_RATE as f64;
    let peak = amplitude(level_db) / HANN_SINE_RMS;
    let mut out = vec![0.0; n];
    for _ in 0..count {
        let len = ((rng.random_range(0.1..0.3) * fs) as usize).min(n);
        let start = rng.random_range(0..=n - len);
        let dur = len as f64 / fs;
        for i in 0..len {
            let t = i as f64 / fs;
            let phase = 2.0 * PI * (f0 * t + (f1 - f0) * t * t / (2.0 * dur));
            let env = 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos();
            out[start + i] += peak * env * phase.sin();
        }
    }
    out
}

/// Identity below the knee, then a tanh shoulder approaching 1.
pub fn soft_clip(x: f64) -> f64 {
    let m = x.abs();
    if m <= CLIP_KNEE {
        x
    } else {
        let room = 1.0 - CLIP_KNEE;
        x.signum() * (CLIP_KNEE + room * ((m - CLIP_KNEE) / room).tanh())
    }
}

/// Renders a scene. Component `i` draws from stream `i` of the scene seed,
/// so adding a component leaves the others unchanged.
pub fn gen_scene(spec: &SceneSpec) -> Result<(Segment, SceneLabels)> {
    spec.validate()?;
    let n = (spec.duration * CANONICAL_RATE as f64).round() as usize;
    let mut mix = vec![0.0; n];
    for (i, c) in spec.components.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(i as u64);
        let part = match *c {
            Component::Rain { level_db, drops_per_second } => rain(&mut rng, n, level_db, drops_per_second),
            Component::Chorus { center, bandwidth, level_db } => chorus(&mut rng, n, center, bandwidth, level_db),
            Component::Chirp { f0, f1, count, level_db } => chirps(&mut rng, n, f0, f1, count, level_db),
            Component::NoiseFloor { level_db } => gaussian(&mut rng, n).into_iter().map(|v| v * amplitude(level_db)).collect(),
        };
        mix.iter_mut().zip(part).for_each(|(m, p)| *m += p);
    }
    let peak = mix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > MAX_PRECLIP_PEAK {
        return Err(invalid(format!("mix peaks at {peak:.2} before clipping; levels are unrealistic")));
    }
    let audio = AudioBuffer::new(mix.into_iter().map(soft_clip).collect(), CANONICAL_RATE)?;
    Ok((Segment::standalone(format!("scene{}", spec.seed), audio), spec.labels()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::stft;
    use crate::features::{spectral_cover, spectral_entropy, BandSpec, COVER_LOW};

    fn energy_fraction(buf: &AudioBuffer, lo: f64, hi: f64) -> f64 {
        let spec = stft(buf, 512, 256).unwrap();
        let band = spec.bin_range(lo, hi);
        let (mut inside, mut total) = (0.0, 0.0);
        for f in spec.iter_frames() {
            for (b, m) in f.iter().enumerate() {
                total += m * m;
                if band.contains(&b) {
                    inside += m * m;
                }
            }
        }
        inside / total
    }

    #[test]
    fn chorus_energy_is_in_band() {
        let spec = SceneSpec::new(3, 10.0).with(Component::Chorus { center: 2000.0, bandwidth: 300.0, level_db: -15.0 });
        let (seg, labels) = gen_scene(&spec).unwrap();
        assert!(energy_fraction(&seg.audio, 1700.0, 2300.0) >= 0.8);
        assert!(labels.cicada && !labels.rain);
    }

    #[test]
    fn rain_covers_more_cells_than_the_floor() {
        let full = BandSpec::full(CANONICAL_RATE);
        let cover = |c: Component| {
            let (seg, _) = gen_scene(&SceneSpec::new(5, 10.0).with(c)).unwrap();
            spectral_cover(&stft(&seg.audio, 512, 256).unwrap(), &full, COVER_LOW)
        };
        let rain = cover(Component::Rain { level_db: -30.0, drops_per_second: 40.0 });
        let floor = cover(Component::NoiseFloor { level_db: -70.0 });
        assert!(rain >= 3.0 * floor, "{rain} vs {floor}");
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let spec = SceneSpec::new(9, 2.0)
            .with(Component::Rain { level_db: -25.0, drops_per_second: 30.0 })
            .with(Component::Chirp { f0: 3000.0, f1: 5000.0, count: 3, level_db: -30.0 })
            .with(Component::NoiseFloor { level_db: -55.0 });
        let a = gen_scene(&spec).unwrap().0;
        let b = gen_scene(&spec).unwrap().0;
        assert_eq!(a.audio.samples(), b.audio.samples());
        let c = gen_scene(&SceneSpec { seed: 10, ..spec.clone() }).unwrap().0;
        assert_ne!(a.audio.samples(), c.audio.samples());
        assert!(gen_scene(&spec).unwrap().1.rain);
    }

    #[test]
    fn labels_follow_relative_levels() {
        let chirp = Component::Chirp { f0: 3000.0, f1: 4000.0, count: 2, level_db: -30.0 };
        let quiet = SceneSpec::new(1, 1.0).with(chirp.clone()).with(Component::Rain { level_db: -40.0, drops_per_second: 10.0 });
        assert!(!quiet.labels().rain);
        let loud = SceneSpec::new(1, 1.0).with(chirp).with(Component::Rain { level_db: -24.0, drops_per_second: 10.0 });
        assert!(loud.labels().rain);
        assert_eq!(SceneSpec::new(1, 1.0).labels(), SceneLabels::default());
    }

    #[test]
    fn clipping() {
        assert_eq!(soft_clip(0.5), 0.5);
        assert_eq!(soft_clip(-0.8), -0.8);
        assert!(soft_clip(3.0) < 1.0 && soft_clip(3.0) > 0.99);
        assert!(soft_clip(0.81) > 0.8);
        let hot = SceneSpec::new(1, 1.0).with(Component::NoiseFloor { level_db: 10.0 });
        assert!(gen_scene(&hot).is_err());
        let bad = SceneSpec::new(1, 1.0).with(Component::Chorus { center: 11_000.0, bandwidth: 400.0, level_db: -10.0 });
        assert!(gen_scene(&bad).is_err());
    }

    #[test]
    fn chorus_has_lower_entropy_than_floor() {
        let full = BandSpec::full(CANONICAL_RATE);
        for seed in 0..4 {
            let h = |c: Component| {
                let (seg, _) = gen_scene(&SceneSpec::new(seed, 3.0).with(Component::NoiseFloor { level_db: -55.0 }).with(c)).unwrap();
                spectral_entropy(&stft(&seg.audio, 512, 256).unwrap(), &full)
            };
            let chorus = h(Component::Chorus { center: 2500.0, bandwidth: 300.0, level_db: -15.0 });
            let floor = h(Component::NoiseFloor { level_db: -55.0 });
            assert!(chorus < floor);
        }
    }
}
