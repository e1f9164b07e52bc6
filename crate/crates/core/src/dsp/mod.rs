//! Spectral transforms and filters.

mod envelope;
pub(crate) mod fft;
mod fir;
mod mmse;
mod stft;
pub mod window;

pub use envelope::{analytic_envelope, Envelope};
pub use fir::{
    apply_fir, design_bandstop, design_highpass, design_lowpass, FirKernel, FirKind,
    DEFAULT_TAPS,
};
pub use mmse::{mmse_stsa, mmse_stsa_with, MmseConfig};
pub(crate) use mmse::histogram_mode;
pub use stft::{stft, Spectrogram};

/// Analysis window used throughout: about 23 ms at 22.05 kHz, 43 Hz bins.
pub const DEFAULT_WINDOW: usize = 512;
/// 50 % overlap.
pub const DEFAULT_HOP: usize = 256;
