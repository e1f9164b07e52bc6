//! The guide's chapters as doc comments, so `cargo test` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/audio.md")]
pub mod audio {}
#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}
#[doc = include_str!("../../../book/src/indices.md")]
pub mod indices {}
#[doc = include_str!("../../../book/src/features.md")]
pub mod features {}
#[doc = include_str!("../../../book/src/classifiers.md")]
pub mod classifiers {}
#[doc = include_str!("../../../book/src/rain.md")]
pub mod rain {}
#[doc = include_str!("../../../book/src/cicada.md")]
pub mod cicada {}
#[doc = include_str!("../../../book/src/synth.md")]
pub mod synth {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
