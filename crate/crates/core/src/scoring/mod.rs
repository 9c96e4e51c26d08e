//! Per-frame scores and the joint utility that ranks candidate keyframes.

mod loss;
mod prompt;

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::geometry::{iou, BoundingBox, FrameIndex};
use crate::imageio::VideoSequence;
use crate::tracker::{Direction, SegmentTracker};
use crate::{Error, Result};

pub use loss::{region_weighted_mse, Tensor};
pub use prompt::{parse_prompt, Attribute, EditPrompt, KeywordTable, SpatialPrior};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorConfig {
    /// Border margin as a fraction of the short image side.
    pub tau: f64,
    /// Tracking window for the cycle-consistency probe, in frames.
    pub delta_t: usize,
    /// Frames kept after base-score filtering.
    pub top_m: usize,
    pub lambda_b: f64,
    pub lambda_c: f64,
    pub lambda_p: f64,
    /// Factor applied to a detection's text score when it violates the
    /// prompt's spatial prior.
    pub spatial_penalty: f64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self { tau: 0.05, delta_t: 5, top_m: 5, lambda_b: 0.5, lambda_c: 0.3, lambda_p: 0.2, spatial_penalty: 0.25 }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!("tau {} must be positive", self.tau)));
        }
        if self.delta_t < 1 {
            return Err(Error::Config("delta_t must be at least 1".into()));
        }
        if self.top_m < 1 {
            return Err(Error::Config("top_m must be at least 1".into()));
        }
        let lambdas = [self.lambda_b, self.lambda_c, self.lambda_p];
        if lambdas.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return Err(Error::Config(format!("weights {lambdas:?} must be finite and non-negative")));
        }
        if lambdas.iter().all(|l| *l == 0.0) {
            return Err(Error::Config("at least one of lambda_b, lambda_c, lambda_p must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.spatial_penalty) {
            return Err(Error::Config(format!("spatial_penalty {} must lie in [0, 1]", self.spatial_penalty)));
        }
        Ok(())
    }
}

/// Audit record for one scored candidate frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub frame: FrameIndex,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub s_text: f64,
    pub s_comp: f64,
    pub s_base: f64,
    pub s_cyc: f64,
    pub s_attr: f64,
    pub s_final: f64,
}

/// Border completeness: 0 when the box touches the border, 1 once it keeps a
/// margin of `tau · min(width, height)` on every side.
pub fn completeness_score(b: &BoundingBox, width: f64, height: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Config(format!("tau {tau} must be positive")));
    }
    let d_min = b.x1().min(b.y1()).min(width - b.x2()).min(height - b.y2());
    let margin = tau * width.min(height);
    Ok((d_min / margin).clamp(0.0, 1.0))
}

pub fn base_score(s_text: f64, s_comp: f64) -> f64 {
    s_text * s_comp
}

/// Weighted sum of the three per-frame scores.
pub fn utility(s_base: f64, s_cyc: f64, s_attr: f64, cfg: &SelectorConfig) -> Result<f64> {
    if cfg.lambda_b == 0.0 && cfg.lambda_c == 0.0 && cfg.lambda_p == 0.0 {
        return Err(Error::Config("all utility weights are zero".into()));
    }
    Ok(cfg.lambda_b * s_base + cfg.lambda_c * s_cyc + cfg.lambda_p * s_attr)
}

/// 1 when the box centre satisfies the prior, `penalty` otherwise.
pub fn spatial_prior_factor(b: &BoundingBox, prior: SpatialPrior, width: f64, height: f64, penalty: f64) -> f64 {
    let (cx, cy) = b.center();
    let ok = match prior {
        SpatialPrior::None => true,
        SpatialPrior::Left => cx < width / 2.0,
        SpatialPrior::Right => cx >= width / 2.0,
        SpatialPrior::Top => cy < height / 2.0,
        SpatialPrior::Bottom => cy >= height / 2.0,
        SpatialPrior::Center => {
            (width / 4.0..=3.0 * width / 4.0).contains(&cx) && (height / 4.0..=3.0 * height / 4.0).contains(&cy)
        }
    };
    if ok {
        1.0
    } else {
        penalty
    }
}

// Track `b` away from `t` in `first` for `steps`, then back with a fresh
// tracker from wherever it ended. Returns the box recovered at `t`.
fn cycle_leg<T: SegmentTracker + ?Sized>(
    tracker: &T,
    video: &VideoSequence,
    t: FrameIndex,
    b: &BoundingBox,
    first: Direction,
    steps: usize,
) -> Result<Option<BoundingBox>> {
    let out = tracker.track_segment(video, t, b, first, steps)?;
    let Some(end) = out.last() else {
        return Ok(None);
    };
    let back_dir = match first {
        Direction::Forward => Direction::Backward,
        Direction::Backward => Direction::Forward,
    };
    let back = match tracker.track_segment(video, end.frame, &end.bbox, back_dir, out.len()) {
        Ok(back) => back,
        Err(Error::InvalidGeometry(_) | Error::DegenerateBox) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(back.last().filter(|s| s.frame == t).map(|s| s.bbox))
}

/// Forward/backward cycle agreement of `b` at frame `t`.
///
/// Each leg that fits inside the video (window truncated at the boundaries)
/// contributes `IoU(b, recovered)`; the score averages the legs that ran. A
/// leg whose return pass cannot be completed counts as 0. `Ok(None)` means
/// no leg fits at all, which only happens for single-frame videos.
pub fn cycle_consistency_score<T: SegmentTracker + ?Sized>(
    tracker: &T,
    video: &VideoSequence,
    t: FrameIndex,
    b: &BoundingBox,
    delta_t: usize,
) -> Result<Option<f64>> {
    let mut total = 0.0;
    let mut legs = 0;
    for dir in [Direction::Forward, Direction::Backward] {
        let steps = dir.available(t, video.len(), delta_t);
        if steps == 0 {
            continue;
        }
        legs += 1;
        if let Some(recovered) = cycle_leg(tracker, video, t, b, dir, steps)? {
            total += iou(b, &recovered);
        }
    }
    Ok((legs > 0).then(|| total / legs as f64))
}
