//! Keyframe selection and mask-tube propagation.
//!
//! Selection runs in three passes: every frame gets its best detection and a
//! base score (text confidence times border completeness), the top-M frames
//! by base score are kept, and those are re-ranked by the joint utility of
//! base score, cycle-consistency and attribute visibility. The winning box is
//! then tracked forward and backward through the whole video.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::ClientError;
use crate::geometry::{clamp_box, BoundingBox, FrameIndex};
use crate::imageio::{box_mask, crop, Frame, VideoSequence};
use crate::scoring::{
    base_score, completeness_score, cycle_consistency_score, parse_prompt, spatial_prior_factor, utility, Attribute,
    CandidateScore, EditPrompt, KeywordTable, SelectorConfig,
};
use crate::tracker::{Direction, SegmentTracker};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub s_text: f64,
}

/// Open-vocabulary detector returning boxes for `object_prompt`, best first.
pub trait Detector {
    fn detect(
        &self,
        frame_index: FrameIndex,
        frame: &Frame,
        object_prompt: &str,
    ) -> Result<Vec<Detection>, ClientError>;
}

/// Everything an attribute scorer may look at. Remote scorers only see the crop.
#[derive(Debug, Clone, Copy)]
pub struct AttributeQuery<'a> {
    pub frame_index: FrameIndex,
    pub bbox: BoundingBox,
    pub crop: &'a Frame,
    pub attribute: Attribute,
}

/// Rates how clearly `attribute` is visible in a crop, in `[0, 1]`.
pub trait AttributeScorer {
    fn score(&self, query: &AttributeQuery<'_>) -> Result<f64, ClientError>;
}

/// A user-supplied box that joins the candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserBoxOverride {
    pub frame: FrameIndex,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

/// One frame that survived base scoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proposal {
    pub frame: FrameIndex,
    pub bbox: BoundingBox,
    /// Detector confidence after the spatial-prior factor.
    pub s_text: f64,
    pub s_comp: f64,
    pub s_base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyframeResult {
    pub k_star: FrameIndex,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub prompt: EditPrompt,
    /// Every scored candidate, in frame order.
    pub candidates: Vec<CandidateScore>,
}

impl KeyframeResult {
    pub fn winner(&self) -> &CandidateScore {
        self.candidates.iter().find(|c| c.frame == self.k_star).expect("k_star is always a scored candidate")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeEntry {
    pub frame: FrameIndex,
    pub bbox: BoundingBox,
    pub occluded: bool,
    pub mask: Frame,
}

/// Exactly one rectangular mask per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskTube {
    entries: Vec<TubeEntry>,
}

impl MaskTube {
    /// Entries must cover frames `0..len` in order.
    pub fn new(entries: Vec<TubeEntry>) -> Result<Self> {
        if let Some((i, e)) = entries.iter().enumerate().find(|(i, e)| e.frame != *i) {
            return Err(Error::Input(format!("tube entry {i} is for frame {}", e.frame)));
        }
        Ok(Self { entries })
    }

    /// Build a tube from per-frame boxes, rasterizing each into a mask.
    pub fn from_boxes(
        boxes: impl IntoIterator<Item = (BoundingBox, bool)>,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        Self::new(
            boxes
                .into_iter()
                .enumerate()
                .map(|(frame, (bbox, occluded))| TubeEntry {
                    frame,
                    bbox,
                    occluded,
                    mask: box_mask(&bbox, width, height),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[TubeEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Best detection per frame, base-scored, filtered and cut to the top M.
pub fn propose_candidates<D: Detector + ?Sized>(
    video: &VideoSequence,
    prompt: &EditPrompt,
    detector: &D,
    cfg: &SelectorConfig,
) -> Result<Vec<Proposal>> {
    cfg.validate()?;
    let (w, h) = (video.width() as f64, video.height() as f64);
    let mut any_detection = false;
    let mut proposals = Vec::new();
    for (t, frame) in video.frames().iter().enumerate() {
        let detections = detector.detect(t, frame, &prompt.object_prompt)?;
        any_detection |= !detections.is_empty();
        let best = detections
            .iter()
            .map(|d| {
                let factor = spatial_prior_factor(&d.bbox, prompt.spatial_prior, w, h, cfg.spatial_penalty);
                (d, d.s_text.clamp(0.0, 1.0) * factor)
            })
            .fold(None::<(&Detection, f64)>, |best, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        let Some((det, s_text)) = best else { continue };
        let Ok(bbox) = clamp_box(&det.bbox, w, h) else { continue };
        let s_comp = completeness_score(&bbox, w, h, cfg.tau)?;
        let s_base = base_score(s_text, s_comp);
        if s_base > 0.0 {
            proposals.push(Proposal { frame: t, bbox, s_text, s_comp, s_base });
        }
    }
    if !any_detection {
        return Err(Error::NoTargetFound(prompt.object_prompt.clone()));
    }
    proposals.sort_by(|a, b| b.s_base.total_cmp(&a.s_base).then(a.frame.cmp(&b.frame)));
    proposals.truncate(cfg.top_m);
    Ok(proposals)
}

/// Backends used by [`select_keyframe`].
pub struct Backends<'a> {
    pub detector: &'a dyn Detector,
    pub scorer: &'a dyn AttributeScorer,
    pub tracker: &'a dyn SegmentTracker,
}

/// Pick the anchor frame maximizing the joint utility over the top-M frames.
///
/// A user override always joins the scored set with text score 1, replacing
/// any detector proposal for the same frame. Exact utility ties go to the
/// lowest frame index.
pub fn select_keyframe(
    video: &VideoSequence,
    raw_prompt: &str,
    keywords: &KeywordTable,
    cfg: &SelectorConfig,
    backends: &Backends<'_>,
    user_box: Option<&UserBoxOverride>,
) -> Result<KeyframeResult> {
    cfg.validate()?;
    let prompt = parse_prompt(raw_prompt, keywords)?;
    let (w, h) = (video.width() as f64, video.height() as f64);

    let mut pool = match propose_candidates(video, &prompt, backends.detector, cfg) {
        Ok(p) => p,
        Err(Error::NoTargetFound(_)) if user_box.is_some() => Vec::new(),
        Err(e) => return Err(e),
    };
    if let Some(ub) = user_box {
        if ub.frame >= video.len() {
            return Err(Error::Input(format!("override frame {} outside video of {} frames", ub.frame, video.len())));
        }
        let bbox = clamp_box(&ub.bbox, w, h).map_err(|_| {
            Error::InvalidGeometry(format!("override box {:?} lies outside the frame", ub.bbox.to_array()))
        })?;
        let s_comp = completeness_score(&bbox, w, h, cfg.tau)?;
        pool.retain(|p| p.frame != ub.frame);
        pool.push(Proposal { frame: ub.frame, bbox, s_text: 1.0, s_comp, s_base: base_score(1.0, s_comp) });
    }
    if pool.is_empty() {
        return Err(Error::NoTargetFound(prompt.object_prompt.clone()));
    }
    pool.sort_by_key(|p| p.frame);

    let mut candidates = Vec::with_capacity(pool.len());
    for p in &pool {
        let s_cyc = cycle_consistency_score(backends.tracker, video, p.frame, &p.bbox, cfg.delta_t)?.unwrap_or(1.0);
        let region = crop(video.frame(p.frame), &p.bbox)?;
        let query = AttributeQuery { frame_index: p.frame, bbox: p.bbox, crop: &region, attribute: prompt.attribute };
        let s_attr = backends.scorer.score(&query)?.clamp(0.0, 1.0);
        let s_final = utility(p.s_base, s_cyc, s_attr, cfg)?;
        candidates.push(CandidateScore {
            frame: p.frame,
            bbox: p.bbox,
            s_text: p.s_text,
            s_comp: p.s_comp,
            s_base: p.s_base,
            s_cyc,
            s_attr,
            s_final,
        });
    }

    // Candidates are in frame order, so the first maximum is the lowest index.
    let best = candidates
        .iter()
        .fold(None::<&CandidateScore>, |best, c| match best {
            Some(b) if b.s_final >= c.s_final => Some(b),
            _ => Some(c),
        })
        .expect("candidate set is non-empty");
    Ok(KeyframeResult { k_star: best.frame, bbox: best.bbox, prompt, candidates })
}

/// Track the keyframe box to both ends of the video with fresh trackers.
pub fn propagate_masks<T: SegmentTracker + ?Sized>(
    video: &VideoSequence,
    keyframe: FrameIndex,
    bbox: &BoundingBox,
    tracker: &T,
) -> Result<MaskTube> {
    if keyframe >= video.len() {
        return Err(Error::Input(format!("keyframe {keyframe} outside video of {} frames", video.len())));
    }
    let (w, h) = (video.width(), video.height());
    let start = clamp_box(bbox, w as f64, h as f64)
        .map_err(|_| Error::InvalidGeometry(format!("keyframe box {:?} lies outside the frame", bbox.to_array())))?;
    let forward = tracker.track_segment(video, keyframe, &start, Direction::Forward, video.len())?;
    let backward = tracker.track_segment(video, keyframe, &start, Direction::Backward, video.len())?;

    let mut boxes: Vec<Option<(BoundingBox, bool)>> = alloc::vec![None; video.len()];
    boxes[keyframe] = Some((start, false));
    for s in forward.iter().chain(&backward) {
        boxes[s.frame] = Some((s.bbox, s.occluded));
    }
    let boxes = boxes
        .into_iter()
        .enumerate()
        .map(|(t, b)| b.ok_or_else(|| Error::Input(format!("tracker skipped frame {t}"))))
        .collect::<Result<Vec<_>>>()?;
    MaskTube::from_boxes(boxes, w, h)
}
