use super::{gen_scene, Component, SceneLabels, SceneSpec};
use crate::audio::{Segment, SEGMENT_SECONDS};
use crate::error::{invalid, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Fractions of scenes that should be rain-positive and cicada-positive.
/// The two labels are assigned independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusMix {
    pub rain: f64,
    pub cicada: f64,
}

impl Default for CorpusMix {
    fn default() -> Self {
        Self { rain: 0.5, cicada: 0.5 }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusScene {
    pub id: String,
    pub spec: SceneSpec,
    pub segment: Segment,
    pub labels: SceneLabels,
}

/// Smallest corpus [`gen_corpus`] will build.
pub const MIN_CORPUS: usize = 1;
/// Share of rain-negative scenes that still carry rain quieter than the birds.
const LIGHT_RAIN_SHARE: f64 = 0.6;
/// Loudest rain bed generated, in dBFS.
const MAX_RAIN_DB: f64 = -6.0;

fn flags(rng: &mut ChaCha8Rng, n: usize, fraction: f64) -> Vec<bool> {
    let positives = (n as f64 * fraction).round() as usize;
    let mut v: Vec<bool> = (0..n).map(|i| i < positives).collect();
    v.shuffle(rng);
    v
}

/// Scene with birds and a noise floor, plus rain and a chorus on request.
fn scene_spec(seed: u64, rain: bool, cicada: bool) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SceneSpec::new(seed, SEGMENT_SECONDS)
        .with(Component::NoiseFloor { level_db: rng.random_range(-60.0..-50.0) });
    let chirp_db: f64 = rng.random_range(-45.0..-15.0);
    let f0: f64 = rng.random_range(2000.0..7000.0);
    let f1 = (f0 + rng.random_range(-2000.0..2000.0)).clamp(1500.0, 8500.0);
    spec = spec.with(Component::Chirp { f0, f1, count: rng.random_range(1..=4), level_db: chirp_db });
    if rng.random_bool(0.5) {
        let g0 = rng.random_range(2500.0..8000.0);
        spec = spec.with(Component::Chirp {
            f0: g0,
            f1: g0 * rng.random_range(0.7..1.3),
            count: rng.random_range(1..=3),
            level_db: chirp_db - rng.random_range(0.0..8.0),
        });
    }
    let drops = rng.random_range(20.0..80.0);
    if rain {
        let level_db = (chirp_db + rng.random_range(6.0..12.0)).min(MAX_RAIN_DB);
        spec = spec.with(Component::Rain { level_db, drops_per_second: drops });
    } else if rng.random_bool(LIGHT_RAIN_SHARE) {
        spec = spec.with(Component::Rain { level_db: chirp_db - rng.random_range(6.0..20.0), drops_per_second: drops });
    }
    if cicada {
        spec = spec.with(Component::Chorus {
            center: rng.random_range(1500.0..4500.0),
            bandwidth: rng.random_range(200.0..500.0),
            level_db: rng.random_range(-30.0..-12.0),
        });
    }
    spec
}

/// `n` ten-second scenes with exactly `round(n * fraction)` positives per
/// label. Scene `i` is called `scene_{i:04}`.
pub fn gen_corpus(n: usize, seed: u64, mix: CorpusMix) -> Result<Vec<CorpusScene>> {
    if n < MIN_CORPUS {
        return Err(invalid(format!("a corpus needs at least {MIN_CORPUS} scenes, got {n}")));
    }
    if !(0.0..=1.0).contains(&mix.rain) || !(0.0..=1.0).contains(&mix.cicada) {
        return Err(invalid("class fractions must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rain = flags(&mut rng, n, mix.rain);
    let cicada = flags(&mut rng, n, mix.cicada);
    let specs: Vec<SceneSpec> = (0..n).map(|i| scene_spec(rng.random(), rain[i], cicada[i])).collect();
    specs
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let (mut segment, labels) = gen_scene(&spec)?;
            debug_assert_eq!((labels.rain, labels.cicada), (rain[i], cicada[i]));
            let id = format!("scene_{i:04}");
            segment.source_id = id.clone();
            Ok(CorpusScene { id, spec, segment, labels })
        })
        .collect()
}

/// A loud stationary chorus between 1.6 and 3.5 kHz with quieter chirps
/// well above it, over a low noise floor.
pub fn chorus_scene_spec(seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = rng.random_range(1600.0..3500.0);
    let bandwidth = rng.random_range(200.0..400.0);
    let chorus_db = rng.random_range(-18.0..-12.0);
    let f0: f64 = rng.random_range(4500.0..6500.0);
    let f1 = (f0 + rng.random_range(500.0..1500.0)).min(8000.0);
    SceneSpec::new(seed, SEGMENT_SECONDS)
        .with(Component::NoiseFloor { level_db: -55.0 })
        .with(Component::Chorus { center, bandwidth, level_db: chorus_db })
        .with(Component::Chirp { f0, f1, count: rng.random_range(3..=6), level_db: rng.random_range(-30.0..-20.0) })
}

/// Manifest rows `scene,seed,duration,components,rain,cicada,wav`.
pub fn manifest_csv(scenes: &[CorpusScene], wav_paths: &[String]) -> String {
    let mut s = String::from("scene,seed,duration,components,rain,cicada,wav\n");
    for (sc, path) in scenes.iter().zip(wav_paths) {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            sc.id,
            sc.spec.seed,
            sc.spec.duration,
            sc.spec.describe(),
            sc.labels.rain as u8,
            sc.labels.cicada as u8,
            path
        ));
    }
    s
}
