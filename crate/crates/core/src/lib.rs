//! Detection and removal of rain and cicada-chorus noise in environmental
//! audio recordings.
//!
//! The crate is organised as a pipeline:
//!
//! * [`audio`] reads and writes WAV files, resamples to the canonical
//!   22.05 kHz mono format and cuts recordings into ten-second segments.
//! * [`dsp`] holds the spectral machinery: STFT, analytic envelope,
//!   windowed-sinc FIR design and the MMSE-STSA stationary noise reducer.
//! * [`features`] computes the acoustic indices and MFCCs and assembles them
//!   into named feature sets.
//! * [`ml`] trains probability-emitting classifiers and cross-validates them.
//! * [`metrics`] provides ROC/AUC and the Mann-Whitney U test.
//! * [`filters`] contains the end products: the threshold-tunable rain gate,
//!   the cicada chorus band-stop filter and a double-threshold rain baseline.
//! * [`synth`] generates labelled synthetic scenes for verification.
//!
//! ```
//! use ngfilter::audio::{AudioBuffer, CANONICAL_RATE};
//! use ngfilter::dsp::{stft, DEFAULT_HOP, DEFAULT_WINDOW};
//! use ngfilter::features::{spectral_entropy, BandSpec};
//!
//! let tone: Vec<f64> = (0..CANONICAL_RATE as usize)
//!     .map(|i| (2.0 * std::f64::consts::PI * 1000.0 * i as f64 / CANONICAL_RATE as f64).sin())
//!     .collect();
//! let buf = AudioBuffer::new(tone, CANONICAL_RATE).unwrap();
//! let spec = stft(&buf, DEFAULT_WINDOW, DEFAULT_HOP).unwrap();
//! let h = spectral_entropy(&spec, &BandSpec::full(CANONICAL_RATE));
//! assert!(h < 0.25);
//! ```

pub mod audio;
pub mod dsp;
mod error;
pub mod features;
pub mod filters;
pub mod metrics;
pub mod ml;
pub mod synth;

pub use error::{Error, Result};
