//! The noise filters built on the classifiers: a rain gate that drops
//! contaminated segments, a band-stop filter for cicada choruses, and a
//! double-threshold rain detector used as a baseline.

mod bedoya;
mod cicada;
mod rain;

pub use bedoya::{bedoya_classify, bedoya_score, psd_threshold, snr_threshold, BedoyaConfig, BEDOYA_MAX_STEP};
pub use cicada::{
    cicada_band_profile, filter_cicada, filter_cicada_band, select_cicada_band, CicadaAction,
    CicadaBandProfile, CicadaOutcome, MAX_RSD_PERCENT, MIN_BAND_BINS, MIN_MEAN_PMF, MIN_PROFILE_FRAMES,
};
pub use rain::{gate_rain, GateAction, GateDecision, GateResult, RainGateConfig};

use crate::audio::AudioBuffer;
use crate::dsp::{stft, DEFAULT_HOP, DEFAULT_WINDOW};
use crate::error::Result;

/// Mean per-frame energy of the STFT bins in `[low, high)`, in dB.
pub fn band_energy_db(buf: &AudioBuffer, low: f64, high: f64) -> Result<f64> {
    let spec = stft(buf, DEFAULT_WINDOW, DEFAULT_HOP)?;
    let bins = spec.bin_range(low, high);
    let e: f64 = spec.iter_frames().flat_map(|f| &f[bins.clone()]).map(|m| m * m).sum::<f64>()
        / spec.frames().max(1) as f64;
    Ok(10.0 * e.max(1e-30).log10())
}
