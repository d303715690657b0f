//! Toolkit for visually non-salient segmentation work: the evaluation
//! metric suite (IoU, boundary IoU, mean E-measure, weighted F-measure,
//! instance AP), non-saliency scoring for dataset curation, interactive
//! prompt sampling protocols, and reference forward passes for the
//! mask-edge token decoder and the wavelet feature-mining module, with
//! hierarchical losses and verified analytic gradients.
//!
//! Everything is deterministic: a fixed counter-based generator drives
//! all sampling and weight initialization, so equal seeds give
//! bit-identical outputs on every platform.

pub mod cli;
pub mod config;
pub mod decoder;
mod dist;
pub mod error;
pub mod feature;
pub mod io;
pub mod losses;
pub mod manifest;
pub mod metrics;
pub mod nn;
pub mod nsfm;
pub mod prompts;
pub mod raster;
pub mod rng;
pub mod selftest;
pub mod token;
pub mod vns;
pub mod wavelet;
pub mod weights_io;

pub use config::Config;
pub use error::{Error, Result};
pub use raster::{ColorImage, GrayImage, Mask, SoftMap};
pub use rng::Rng;
