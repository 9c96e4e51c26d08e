//! The four command-line operations, independent of argument parsing.

use std::path::{Path, PathBuf};

use anchorframe_core::scoring::region_weighted_mse;
use anchorframe_core::synth::{evaluate_selection, evaluate_tube_boxes, SceneSpec};
use anchorframe_core::{
    parse_prompt, propagate_masks, select_keyframe, AttributeScorer, Backends, BoundingBox, Detector, KcfTracker,
    KeyframeResult, KeywordTable, MaskTube, UserBoxOverride, VideoSequence,
};
use serde::{Deserialize, Serialize};

use crate::clients::{MockDetector, MockScorer, PrefetchedDetections, QuestionTable, RemoteDetector, RemoteScorer};
use crate::config::{BackendKind, CliConfig};
use crate::error::{AppError, Result};
use crate::frames::read_frames_dir;
use crate::output::{read_result, read_tube, write_result, Manifest};
use crate::scene::{read_scene_spec, read_truth, write_scene_dir, TRUTH_FILE};
use crate::tensor::read_tensor;

/// Parse `t:x1,y1,x2,y2`.
pub fn parse_bbox_override(s: &str) -> Result<UserBoxOverride, String> {
    let (frame, coords) = s.split_once(':').ok_or("expected t:x1,y1,x2,y2")?;
    let frame = frame.trim().parse().map_err(|e| format!("frame index {frame:?}: {e}"))?;
    let v = coords
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("coordinate {c:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let [x1, y1, x2, y2] = v[..] else {
        return Err(format!("expected 4 coordinates, got {}", v.len()));
    };
    let bbox = BoundingBox::new(x1, y1, x2, y2).map_err(|e| e.to_string())?;
    Ok(UserBoxOverride { frame, bbox })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub scene: String,
    pub out: PathBuf,
    pub frames: usize,
}

pub fn cmd_synth(spec_path: &Path, out: &Path) -> Result<SynthReport> {
    let spec = read_scene_spec(spec_path)?;
    synth_to_dir(&spec, out)
}

pub fn synth_to_dir(spec: &SceneSpec, out: &Path) -> Result<SynthReport> {
    let truth = write_scene_dir(spec, out)?;
    Ok(SynthReport { scene: spec.name.clone(), out: out.to_path_buf(), frames: truth.len() })
}

pub struct SelectRequest<'a> {
    pub frames: &'a Path,
    pub prompt: &'a str,
    pub config: &'a CliConfig,
    pub user_box: Option<&'a UserBoxOverride>,
    pub keywords: &'a KeywordTable,
}

/// Keyframe selection followed by mask propagation from the winner.
pub fn run_select(video: &VideoSequence, req: &SelectRequest<'_>) -> Result<(KeyframeResult, MaskTube)> {
    let cfg = req.config;
    cfg.validate()?;
    let tracker = KcfTracker::new(cfg.tracker)?;
    let (detector, scorer): (Box<dyn Detector>, Box<dyn AttributeScorer>) = match cfg.effective_backend() {
        BackendKind::Mock => {
            let path = cfg.mock.truth.clone().unwrap_or_else(|| req.frames.join(TRUTH_FILE));
            let truth = read_truth(&path)?;
            if truth.len() != video.len() {
                return Err(AppError::Usage(format!(
                    "{} describes {} frames but the video has {}",
                    path.display(),
                    truth.len(),
                    video.len()
                )));
            }
            (Box::new(MockDetector::new(truth.clone(), cfg.mock.clone(), cfg.seed)), Box::new(MockScorer::new(truth)))
        }
        BackendKind::Remote => {
            let prompt = parse_prompt(req.prompt, req.keywords)?;
            let remote = RemoteDetector::new(cfg.detector.clone());
            let gathered =
                PrefetchedDetections::gather(&remote, video, &prompt.object_prompt, cfg.detector.max_in_flight)?;
            (Box::new(gathered), Box::new(RemoteScorer::new(cfg.vlm.clone(), QuestionTable::default())))
        }
    };
    let backends = Backends { detector: detector.as_ref(), scorer: scorer.as_ref(), tracker: &tracker };
    let result = select_keyframe(video, req.prompt, req.keywords, &cfg.selector, &backends, req.user_box)?;
    let tube = propagate_masks(video, result.k_star, &result.bbox, &tracker)?;
    Ok((result, tube))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectReport {
    pub k_star: usize,
    pub s_final: f64,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub out: PathBuf,
    pub files: usize,
}

pub fn cmd_select(req: &SelectRequest<'_>, out: &Path) -> Result<(SelectReport, Manifest)> {
    let video = read_frames_dir(req.frames)?;
    let (result, tube) = run_select(&video, req)?;
    let manifest = write_result(&result, &tube, req.config, out)?;
    let report = SelectReport {
        k_star: result.k_star,
        s_final: result.winner().s_final,
        bbox: result.bbox,
        out: out.to_path_buf(),
        files: manifest.files.len(),
    };
    Ok((report, manifest))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k_star: usize,
    pub kf_visibility: f64,
    pub kf_attr_visibility: f64,
    pub is_complete: bool,
    /// `null` when no frame reaches the visibility floor.
    pub mean_iou: Option<f64>,
    pub frames_evaluated: usize,
    pub visibility_floor: f64,
}

pub fn cmd_eval(result_dir: &Path, truth_path: &Path, visibility_floor: f64) -> Result<EvalReport> {
    if !(0.0..=1.0).contains(&visibility_floor) {
        return Err(AppError::Usage(format!("visibility floor {visibility_floor} must lie in [0, 1]")));
    }
    let result = read_result(result_dir)?;
    let tube = read_tube(result_dir)?;
    let truth = read_truth(truth_path)?;
    let sel = evaluate_selection(&result, &truth)?;
    let boxes: Vec<BoundingBox> = tube.frames.iter().map(|r| r.bbox).collect();
    let tube_report = evaluate_tube_boxes(&boxes, &truth, visibility_floor)?;
    Ok(EvalReport {
        k_star: result.k_star,
        kf_visibility: sel.kf_visibility,
        kf_attr_visibility: sel.kf_attr_visibility,
        is_complete: sel.is_complete,
        mean_iou: tube_report.mean_iou,
        frames_evaluated: tube_report.frames_evaluated,
        visibility_floor,
    })
}

pub fn cmd_loss(pred: &Path, target: &Path, mask: &Path, gamma: f64) -> Result<f64> {
    let (p, t, m) = (read_tensor(pred)?, read_tensor(target)?, read_tensor(mask)?);
    Ok(region_weighted_mse(&p, &t, &m, gamma)?)
}
