//! Detector and attribute-scoring backends: ground-truth mocks and HTTP clients.

mod mock;
mod remote;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anchorframe_core::imageio::VideoSequence;
use anchorframe_core::{Attribute, ClientError, Detection, Detector, Frame, FrameIndex};

use crate::error::{AppError, Result};

pub use mock::{MockDetector, MockScorer};
pub use remote::{RemoteDetector, RemoteScorer};

pub const DEFAULT_QUESTIONS: &str = include_str!("../../data/questions.txt");

const ATTRIBUTES: [Attribute; 6] = [
    Attribute::Color,
    Attribute::Material,
    Attribute::Part,
    Attribute::Shape,
    Attribute::Style,
    Attribute::ObjectVisibility,
];

/// The question asked alongside each crop, one per attribute category.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionTable(BTreeMap<Attribute, String>);

impl QuestionTable {
    /// Lines of `attribute<TAB>question`; `#` starts a comment. Every category is required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, question) = line
                .split_once('\t')
                .ok_or_else(|| AppError::Usage(format!("questions line {}: expected attribute<TAB>question", n + 1)))?;
            let attr = Attribute::parse(key.trim())
                .ok_or_else(|| AppError::Usage(format!("questions line {}: unknown attribute {key:?}", n + 1)))?;
            map.insert(attr, question.trim().to_owned());
        }
        if let Some(missing) = ATTRIBUTES.iter().find(|a| !map.contains_key(a)) {
            return Err(AppError::Usage(format!("no question for attribute {}", missing.as_str())));
        }
        Ok(Self(map))
    }

    pub fn question(&self, attribute: Attribute) -> &str {
        &self.0[&attribute]
    }
}

impl Default for QuestionTable {
    fn default() -> Self {
        Self::parse(DEFAULT_QUESTIONS).expect("bundled question table is valid")
    }
}

/// Detections for every frame, gathered up front by a pool of at most `workers` threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefetchedDetections(Vec<Vec<Detection>>);

type Slot = Mutex<Option<Result<Vec<Detection>, ClientError>>>;

impl PrefetchedDetections {
    pub fn gather<D: Detector + Sync + ?Sized>(
        detector: &D,
        video: &VideoSequence,
        object_prompt: &str,
        workers: usize,
    ) -> Result<Self, ClientError> {
        let next = AtomicUsize::new(0);
        let slots: Vec<Slot> = (0..video.len()).map(|_| Mutex::new(None)).collect();
        std::thread::scope(|s| {
            for _ in 0..workers.clamp(1, video.len().max(1)) {
                s.spawn(|| loop {
                    let t = next.fetch_add(1, Ordering::Relaxed);
                    if t >= video.len() {
                        break;
                    }
                    let r = detector.detect(t, video.frame(t), object_prompt);
                    let failed = r.is_err();
                    *slots[t].lock().unwrap() = Some(r);
                    if failed {
                        // stop handing out further frames
                        next.store(video.len(), Ordering::Relaxed);
                    }
                });
            }
        });
        let mut out = Vec::with_capacity(video.len());
        for slot in slots {
            match slot.into_inner().unwrap() {
                Some(r) => out.push(r?),
                None => return Err(ClientError::Unavailable("detection aborted after an earlier failure".into())),
            }
        }
        Ok(Self(out))
    }
}

impl Detector for PrefetchedDetections {
    fn detect(&self, t: FrameIndex, _: &Frame, _: &str) -> Result<Vec<Detection>, ClientError> {
        self.0.get(t).cloned().ok_or_else(|| ClientError::Protocol(format!("no detections gathered for frame {t}")))
    }
}
