//! Baseline selectors and tracker probes for checking the selector against
//! the synthetic corpus. Nothing here is used by the CLI.

use anchorframe::clients::{MockDetector, MockScorer};
use anchorframe::config::MockConfig;
use anchorframe_core::scoring::cycle_consistency_score;
use anchorframe_core::synth::{canonical_suite, generate_scene, GroundTruth, SceneSpec};
use anchorframe_core::{
    propagate_masks, select_keyframe, Backends, Direction, FrameIndex, KcfTracker, KeyframeResult, KeywordTable,
    MaskTube, Result, SegmentTracker, SelectorConfig, VideoSequence,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Prompt used for corpus runs; the mocks ignore the object name.
pub const PROMPT: &str = "make the toy red";

pub struct Scene {
    pub spec: SceneSpec,
    pub video: VideoSequence,
    pub truth: GroundTruth,
}

impl Scene {
    pub fn render(spec: SceneSpec) -> Result<Self> {
        let (video, truth) = generate_scene(&spec)?;
        Ok(Self { spec, video, truth })
    }

    pub fn has_occluder(&self) -> bool {
        !self.spec.occluders.is_empty()
    }

    pub fn first_fully_visible(&self) -> Option<FrameIndex> {
        self.truth.frames.iter().position(|f| f.visibility >= 1.0)
    }
}

pub fn corpus() -> Result<Vec<Scene>> {
    canonical_suite().into_iter().map(Scene::render).collect()
}

/// Select and propagate with the ground-truth mocks at their defaults.
pub fn select_with_mocks(scene: &Scene, cfg: &SelectorConfig) -> Result<(KeyframeResult, MaskTube)> {
    let detector = MockDetector::new(scene.truth.clone(), MockConfig::default(), scene.spec.seed);
    let scorer = MockScorer::new(scene.truth.clone());
    let tracker = KcfTracker::default();
    let backends = Backends { detector: &detector, scorer: &scorer, tracker: &tracker };
    let result = select_keyframe(&scene.video, PROMPT, &KeywordTable::default(), cfg, &backends, None)?;
    let tube = propagate_masks(&scene.video, result.k_star, &result.bbox, &tracker)?;
    Ok((result, tube))
}

pub fn middle_frame(len: usize) -> FrameIndex {
    len / 2
}

pub fn random_frame(len: usize, seed: u64) -> FrameIndex {
    (ChaCha8Rng::seed_from_u64(seed).next_u64() % len as u64) as FrameIndex
}

/// PSR of one continuous track through the whole clip, started on the
/// truth box of the first fully visible frame and run both ways from there.
/// The start frame itself has no PSR.
pub fn psr_track(scene: &Scene, tracker: &KcfTracker) -> Result<Option<Vec<Option<f64>>>> {
    let Some(start) = scene.first_fully_visible() else {
        return Ok(None);
    };
    let len = scene.video.len();
    let b = scene.truth.frames[start].bbox;
    let mut psr = vec![None; len];
    for dir in [Direction::Forward, Direction::Backward] {
        for step in tracker.track_segment(&scene.video, start, &b, dir, len)? {
            psr[step.frame] = Some(step.psr);
        }
    }
    Ok(Some(psr))
}

/// Cycle-consistency score at the truth box of every frame.
pub fn cycle_at_truth(scene: &Scene, tracker: &KcfTracker, delta_t: usize) -> Result<Vec<Option<f64>>> {
    scene
        .truth
        .frames
        .iter()
        .enumerate()
        .map(|(t, f)| cycle_consistency_score(tracker, &scene.video, t, &f.bbox, delta_t))
        .collect()
}

/// Means of `values` over fully visible frames and over frames at most half
/// visible. A class with no values gives `None`.
pub fn visible_vs_occluded(values: &[Option<f64>], truth: &GroundTruth) -> (Option<f64>, Option<f64>) {
    let mean = |keep: &dyn Fn(f64) -> bool| {
        let v: Vec<f64> =
            values.iter().zip(&truth.frames).filter(|(_, f)| keep(f.visibility)).filter_map(|(v, _)| *v).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    (mean(&|v| v >= 1.0), mean(&|v| v <= 0.5))
}
