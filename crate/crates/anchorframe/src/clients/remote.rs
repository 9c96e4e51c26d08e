use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use anchorframe_core::imageio::write_netpbm;
use anchorframe_core::{
    AttributeQuery, AttributeScorer, BoundingBox, ClientError, Detection, Detector, Frame, FrameIndex,
};
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::QuestionTable;
use crate::config::ServiceEndpoint;

const RETRY_BACKOFF_MS: u64 = 100;

/// Counting semaphore bounding concurrent requests to one endpoint.
#[derive(Debug)]
struct InFlight {
    active: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

struct Permit<'a>(&'a InFlight);

impl InFlight {
    fn new(limit: usize) -> Self {
        Self { active: Mutex::new(0), freed: Condvar::new(), limit: limit.max(1) }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut active = self.active.lock().unwrap();
        while *active >= self.limit {
            active = self.freed.wait(active).unwrap();
        }
        *active += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.active.lock().unwrap() -= 1;
        self.0.freed.notify_one();
    }
}

/// JSON-over-HTTP POST with retries on transport errors and 5xx/429 replies.
#[derive(Debug)]
struct JsonService {
    endpoint: ServiceEndpoint,
    agent: ureq::Agent,
    in_flight: InFlight,
}

impl JsonService {
    fn new(endpoint: ServiceEndpoint) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(endpoint.timeout_ms)))
            .http_status_as_error(false)
            .build();
        let in_flight = InFlight::new(endpoint.max_in_flight);
        Self { endpoint, agent: config.into(), in_flight }
    }

    fn url(&self, route: &str) -> String {
        format!("{}/{route}", self.endpoint.base_url.trim_end_matches('/'))
    }

    fn post<T: DeserializeOwned>(&self, route: &str, body: &serde_json::Value) -> Result<T, ClientError> {
        let url = self.url(route);
        let attempts = self.endpoint.max_retries as usize + 1;
        let mut last = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                thread::sleep(Duration::from_millis(RETRY_BACKOFF_MS << (attempt - 1).min(4)));
            }
            let _permit = self.in_flight.acquire();
            let mut resp = match self.agent.post(&url).send_json(body) {
                Ok(r) => r,
                Err(e) => {
                    log::warn!("POST {url} attempt {}/{attempts}: {e}", attempt + 1);
                    last = e.to_string();
                    continue;
                }
            };
            let status = resp.status();
            let text = resp.body_mut().read_to_string();
            if status.is_server_error() || status.as_u16() == 429 {
                log::warn!("POST {url} attempt {}/{attempts}: HTTP {status}", attempt + 1);
                last = format!("HTTP {status}");
                continue;
            }
            let text = text.map_err(|e| ClientError::Protocol(format!("{url}: unreadable body: {e}")))?;
            if !status.is_success() {
                return Err(ClientError::Protocol(format!("{url}: HTTP {status}: {}", text.trim())));
            }
            return serde_json::from_str(&text).map_err(|e| ClientError::Protocol(format!("{url}: {e}")));
        }
        Err(ClientError::Unavailable(format!("{url} failed after {attempts} attempts: {last}")))
    }
}

fn encode_frame(frame: &Frame) -> String {
    BASE64.encode(write_netpbm(frame))
}

#[derive(Debug, Deserialize)]
struct DetectResponse {
    boxes: Vec<WireBox>,
}

#[derive(Debug, Deserialize)]
struct WireBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    score: f64,
}

#[derive(Debug, Deserialize)]
struct ScoreResponse {
    score: f64,
}

fn unit_score(v: f64, what: &str) -> Result<f64, ClientError> {
    if !v.is_finite() {
        return Err(ClientError::Protocol(format!("{what} {v} is not finite")));
    }
    if !(0.0..=1.0).contains(&v) {
        log::warn!("{what} {v} outside [0, 1]; clamping");
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Validate a whole detector reply; any bad box rejects all of them.
fn parse_detections(resp: DetectResponse) -> Result<Vec<Detection>, ClientError> {
    let mut out = resp
        .boxes
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            let bbox =
                BoundingBox::new(w.x1, w.y1, w.x2, w.y2).map_err(|e| ClientError::Protocol(format!("box {i}: {e}")))?;
            Ok(Detection { bbox, s_text: unit_score(w.score, &format!("box {i} score"))? })
        })
        .collect::<Result<Vec<_>, ClientError>>()?;
    out.sort_by(|a, b| b.s_text.total_cmp(&a.s_text));
    Ok(out)
}

/// `POST {base_url}/detect` with `{"image_ppm_b64", "prompt"}`.
#[derive(Debug)]
pub struct RemoteDetector {
    service: JsonService,
}

impl RemoteDetector {
    pub fn new(endpoint: ServiceEndpoint) -> Self {
        Self { service: JsonService::new(endpoint) }
    }
}

impl Detector for RemoteDetector {
    fn detect(&self, _: FrameIndex, frame: &Frame, object_prompt: &str) -> Result<Vec<Detection>, ClientError> {
        let body = serde_json::json!({ "image_ppm_b64": encode_frame(frame), "prompt": object_prompt });
        parse_detections(self.service.post("detect", &body)?)
    }
}

/// `POST {base_url}/score` with `{"image_ppm_b64", "attribute", "question"}`. Only the crop is sent.
#[derive(Debug)]
pub struct RemoteScorer {
    service: JsonService,
    questions: QuestionTable,
}

impl RemoteScorer {
    pub fn new(endpoint: ServiceEndpoint, questions: QuestionTable) -> Self {
        Self { service: JsonService::new(endpoint), questions }
    }
}

impl AttributeScorer for RemoteScorer {
    fn score(&self, q: &AttributeQuery<'_>) -> Result<f64, ClientError> {
        let body = serde_json::json!({
            "image_ppm_b64": encode_frame(q.crop),
            "attribute": q.attribute.as_str(),
            "question": self.questions.question(q.attribute),
        });
        let resp: ScoreResponse = self.service.post("score", &body)?;
        unit_score(resp.score, "attribute score")
    }
}
