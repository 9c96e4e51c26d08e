//! Occlusion-aware keyframe selection for video editing guidance.
//!
//! Given a frame sequence and an edit prompt, the selector proposes one box
//! per frame, scores every surviving frame on border completeness,
//! forward/backward tracking consistency and attribute visibility, picks the
//! best anchor frame and propagates its box into a dense per-frame mask tube.
//!
//! This crate is `no_std` (it needs `alloc`). Everything here is pure: file
//! formats on disk, HTTP service clients and the command line live in the
//! `anchorframe` companion crate.
//!
//! # Layout
//! - [`geometry`]: boxes, IoU, clamping and rasterization.
//! - [`imageio`]: 8-bit frames, netpbm encode/decode, crop and resize.
//! - [`fft`]: radix-2 2-D FFT used by the correlation tracker.
//! - [`tracker`]: the segment-tracker interface and the KCF implementation.
//! - [`scoring`]: completeness, cycle consistency, joint utility, prompt
//!   parsing and the region-weighted loss.
//! - [`pipeline`]: candidate proposal, keyframe selection, mask tubes.
//! - [`synth`]: seeded occlusion scenes with exact ground truth.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod fft;
pub mod geometry;
pub mod imageio;
pub mod pipeline;
pub mod scoring;
pub mod synth;
pub mod tracker;

pub use error::{ClientError, Error, Result};
pub use geometry::{BoundingBox, FrameIndex};
pub use imageio::{Channels, Frame, VideoSequence};
pub use pipeline::{
    propagate_masks, propose_candidates, select_keyframe, AttributeQuery, AttributeScorer, Backends, Detection,
    Detector, KeyframeResult, MaskTube, Proposal, TubeEntry, UserBoxOverride,
};
pub use scoring::{parse_prompt, Attribute, CandidateScore, EditPrompt, KeywordTable, SelectorConfig, SpatialPrior};
pub use tracker::{Direction, KcfTracker, SegmentTracker, TrackStep, TrackerConfig};
