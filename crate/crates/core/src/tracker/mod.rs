//! Single-object box trackers.
//!
//! Scoring and mask propagation only see the [`SegmentTracker`] interface, so
//! any tracker (including test stubs) can stand in for the in-repo KCF.

mod kcf;

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundingBox, FrameIndex};
use crate::imageio::VideoSequence;
use crate::Result;

pub use kcf::{gaussian_kernel_correlation, KcfState, KcfTracker, TrackerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    /// Frame reached after one step from `t`, if it exists in a video of `len` frames.
    pub fn step(self, t: FrameIndex, len: usize) -> Option<FrameIndex> {
        match self {
            Direction::Forward => (t + 1 < len).then_some(t + 1),
            Direction::Backward => t.checked_sub(1),
        }
    }

    /// How many of `steps` can run from `t` before hitting the sequence boundary.
    pub fn available(self, t: FrameIndex, len: usize, steps: usize) -> usize {
        match self {
            Direction::Forward => steps.min(len.saturating_sub(t + 1)),
            Direction::Backward => steps.min(t),
        }
    }
}

/// Tracker output for one visited frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackStep {
    pub frame: FrameIndex,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub psr: f64,
    pub occluded: bool,
}

pub trait SegmentTracker {
    /// Track `start_box` from frame `start` for up to `steps` frames in
    /// `direction`, one [`TrackStep`] per visited frame (the start frame is
    /// not reported). Steps past the sequence boundary are dropped, so the
    /// returned length is the number of steps that actually ran.
    fn track_segment(
        &self,
        video: &VideoSequence,
        start: FrameIndex,
        start_box: &BoundingBox,
        direction: Direction,
        steps: usize,
    ) -> Result<Vec<TrackStep>>;
}
