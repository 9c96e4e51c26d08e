use anchorframe_core::synth::GroundTruth;
use anchorframe_core::{
    AttributeQuery, AttributeScorer, BoundingBox, ClientError, Detection, Detector, Frame, FrameIndex,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::MockConfig;

fn frame_rng(seed: u64, t: FrameIndex) -> ChaCha8Rng {
    // splitmix64 finalizer so neighbouring frames get unrelated streams
    let mut z = seed ^ (t as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn truth_at(truth: &GroundTruth, t: FrameIndex) -> Result<&anchorframe_core::synth::FrameTruth, ClientError> {
    truth.frames.get(t).ok_or_else(|| ClientError::Protocol(format!("ground truth has no frame {t}")))
}

/// Detector that reports the ground-truth box.
///
/// Confidence is the target's visible fraction minus half-normal noise, and
/// frames below the visibility threshold return nothing. Each frame draws from
/// its own seeded stream, so results do not depend on call order.
#[derive(Debug, Clone)]
pub struct MockDetector {
    truth: GroundTruth,
    cfg: MockConfig,
    seed: u64,
}

impl MockDetector {
    pub fn new(truth: GroundTruth, cfg: MockConfig, seed: u64) -> Self {
        Self { truth, cfg, seed }
    }
}

impl Detector for MockDetector {
    fn detect(&self, t: FrameIndex, _: &Frame, _: &str) -> Result<Vec<Detection>, ClientError> {
        let ft = truth_at(&self.truth, t)?;
        if ft.visibility < self.cfg.visibility_threshold || ft.visibility == 0.0 {
            return Ok(Vec::new());
        }
        let mut rng = frame_rng(self.seed, t);
        let mut draw = |sigma: f64| {
            if sigma > 0.0 {
                Normal::new(0.0, sigma).expect("sigma is finite and positive").sample(&mut rng)
            } else {
                0.0
            }
        };
        let (dx, dy) = (draw(self.cfg.box_jitter), draw(self.cfg.box_jitter));
        let penalty = draw(self.cfg.score_noise).abs();
        let b = ft.bbox;
        let bbox = BoundingBox::new(b.x1() + dx, b.y1() + dy, b.x2() + dx, b.y2() + dy)
            .map_err(|e| ClientError::Protocol(format!("jittered box: {e}")))?;
        Ok(vec![Detection { bbox, s_text: (ft.visibility - penalty).clamp(0.0, 1.0) }])
    }
}

/// Attribute scorer answering from ground truth: the visible fraction of the
/// attribute patch, scaled by how much of the patch the crop covers.
#[derive(Debug, Clone)]
pub struct MockScorer {
    truth: GroundTruth,
}

impl MockScorer {
    pub fn new(truth: GroundTruth) -> Self {
        Self { truth }
    }
}

impl AttributeScorer for MockScorer {
    fn score(&self, q: &AttributeQuery<'_>) -> Result<f64, ClientError> {
        let ft = truth_at(&self.truth, q.frame_index)?;
        let patch = ft.attribute_box;
        let covered = q.bbox.intersection_area(&patch) / patch.area();
        Ok((ft.attribute_visibility * covered).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anchorframe_core::imageio::Channels;
    use anchorframe_core::synth::FrameTruth;
    use anchorframe_core::Attribute;

    fn bb(x1: f64, y1: f64, x2: f64, y2: f64) -> BoundingBox {
        BoundingBox::new(x1, y1, x2, y2).unwrap()
    }

    fn truth(vis: &[f64]) -> GroundTruth {
        GroundTruth {
            width: 100,
            height: 80,
            frames: vis
                .iter()
                .map(|&v| FrameTruth {
                    bbox: bb(20., 20., 60., 50.),
                    visibility: v,
                    attribute_box: bb(30., 30., 40., 40.),
                    attribute_visibility: v,
                })
                .collect(),
        }
    }

    fn frame() -> Frame {
        Frame::filled(100, 80, Channels::Rgb, 0).unwrap()
    }

    #[test]
    fn zero_noise_passes_truth_through() {
        let d = MockDetector::new(truth(&[1.0, 0.6]), MockConfig::default(), 3);
        let out = d.detect(0, &frame(), "car").unwrap();
        assert_eq!(out, vec![Detection { bbox: bb(20., 20., 60., 50.), s_text: 1.0 }]);
        assert_eq!(d.detect(1, &frame(), "car").unwrap()[0].s_text, 0.6);
        assert!(d.detect(2, &frame(), "car").is_err());
    }

    #[test]
    fn hidden_targets_are_not_detected() {
        let d = MockDetector::new(truth(&[0.0, 0.2, 0.25]), MockConfig::default(), 0);
        assert!(d.detect(0, &frame(), "car").unwrap().is_empty());
        assert!(d.detect(1, &frame(), "car").unwrap().is_empty());
        assert_eq!(d.detect(2, &frame(), "car").unwrap().len(), 1);
        let lenient =
            MockDetector::new(truth(&[0.0]), MockConfig { visibility_threshold: 0.0, ..MockConfig::default() }, 0);
        assert!(lenient.detect(0, &frame(), "car").unwrap().is_empty());
    }

    #[test]
    fn noise_is_seeded_per_frame() {
        let cfg = MockConfig { box_jitter: 2.0, score_noise: 0.1, ..MockConfig::default() };
        let a = MockDetector::new(truth(&[1.0; 4]), cfg.clone(), 9);
        let b = MockDetector::new(truth(&[1.0; 4]), cfg.clone(), 9);
        let c = MockDetector::new(truth(&[1.0; 4]), cfg, 10);
        let f = frame();
        let forward: Vec<_> = (0..4).map(|t| a.detect(t, &f, "x").unwrap()).collect();
        let backward: Vec<_> = (0..4).rev().map(|t| b.detect(t, &f, "x").unwrap()).collect();
        assert_eq!(forward, backward.into_iter().rev().collect::<Vec<_>>());
        assert_ne!(forward[0], c.detect(0, &f, "x").unwrap());
        assert_ne!(forward[0], forward[1]);
        assert!(forward.iter().all(|d| d[0].s_text <= 1.0 && d[0].s_text >= 0.0));
    }

    #[test]
    fn scorer_uses_patch_coverage() {
        let s = MockScorer::new(truth(&[1.0, 0.5, 0.0]));
        let crop = frame();
        let q = |t, bbox| AttributeQuery { frame_index: t, bbox, crop: &crop, attribute: Attribute::Color };
        assert_eq!(s.score(&q(0, bb(20., 20., 60., 50.))).unwrap(), 1.0);
        assert_eq!(s.score(&q(1, bb(20., 20., 60., 50.))).unwrap(), 0.5);
        assert_eq!(s.score(&q(2, bb(20., 20., 60., 50.))).unwrap(), 0.0);
        assert_eq!(s.score(&q(0, bb(30., 20., 35., 50.))).unwrap(), 0.5);
        assert_eq!(s.score(&q(0, bb(70., 60., 90., 70.))).unwrap(), 0.0);
    }
}
