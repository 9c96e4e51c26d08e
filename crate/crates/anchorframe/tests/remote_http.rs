use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;

use anchorframe::clients::{QuestionTable, RemoteDetector, RemoteScorer};
use anchorframe::config::ServiceEndpoint;
use anchorframe_core::imageio::{read_netpbm, Channels, Frame};
use anchorframe_core::{Attribute, AttributeQuery, AttributeScorer, BoundingBox, ClientError, Detector};
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde_json::Value;

struct Request {
    path: String,
    body: Value,
}

// Serves one scripted (status, body) reply per connection, then stops.
fn serve(replies: Vec<(u16, &'static str)>) -> (String, Arc<Mutex<Vec<Request>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (status, body) in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let path = line.split_whitespace().nth(1).unwrap_or_default().to_string();
            let mut len = 0;
            loop {
                let mut h = String::new();
                reader.read_line(&mut h).unwrap();
                if h.trim().is_empty() {
                    break;
                }
                if let Some((k, v)) = h.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        len = v.trim().parse().unwrap();
                    }
                }
            }
            let mut raw = vec![0; len];
            reader.read_exact(&mut raw).unwrap();
            log.lock().unwrap().push(Request { path, body: serde_json::from_slice(&raw).unwrap_or(Value::Null) });
            let mut stream = reader.into_inner();
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, seen)
}

fn endpoint(base_url: String, max_retries: u32) -> ServiceEndpoint {
    ServiceEndpoint { base_url, timeout_ms: 5_000, max_retries, max_in_flight: 2 }
}

fn frame() -> Frame {
    Frame::new(4, 3, Channels::Rgb, (0..36).collect()).unwrap()
}

#[test]
fn server_errors_are_retried_then_reported_unavailable() {
    let (url, seen) = serve(vec![(500, "{}"), (500, "{}"), (500, "{}")]);
    let err = RemoteDetector::new(endpoint(url, 2)).detect(0, &frame(), "car").unwrap_err();
    assert!(matches!(err, ClientError::Unavailable(_)), "{err}");
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn rate_limit_then_success() {
    let ok = r#"{"boxes":[{"x1":0,"y1":0,"x2":2,"y2":2,"score":0.3},{"x1":1,"y1":0,"x2":4,"y2":3,"score":0.9}]}"#;
    let (url, seen) = serve(vec![(429, "{}"), (200, ok)]);
    let dets = RemoteDetector::new(endpoint(url, 1)).detect(0, &frame(), "red car").unwrap();
    assert_eq!(dets.len(), 2);
    assert_eq!(dets[0].s_text, 0.9);
    assert_eq!(dets[0].bbox, BoundingBox::new(1., 0., 4., 3.).unwrap());

    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 2);
    let req = &seen[1];
    assert_eq!(req.path, "/detect");
    assert_eq!(req.body["prompt"], "red car");
    let ppm = BASE64.decode(req.body["image_ppm_b64"].as_str().unwrap()).unwrap();
    assert_eq!(read_netpbm(&ppm).unwrap(), frame());
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = serve(vec![(400, r#"{"error":"bad"}"#)]);
    let err = RemoteDetector::new(endpoint(url, 3)).detect(0, &frame(), "car").unwrap_err();
    assert!(matches!(err, ClientError::Protocol(_)), "{err}");
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn malformed_reply_is_a_protocol_error() {
    let (url, _) = serve(vec![(200, r#"{"boxes":[{"x1":0,"y1":0,"x2":2}]}"#)]);
    let err = RemoteDetector::new(endpoint(url, 0)).detect(0, &frame(), "car").unwrap_err();
    assert!(matches!(err, ClientError::Protocol(_)), "{err}");
}

#[test]
fn scorer_sends_the_attribute_question_and_clamps() {
    let (url, seen) = serve(vec![(200, r#"{"score":1.7}"#)]);
    let scorer = RemoteScorer::new(endpoint(url, 0), QuestionTable::default());
    let crop = frame();
    let q = AttributeQuery {
        frame_index: 0,
        bbox: BoundingBox::new(0., 0., 4., 3.).unwrap(),
        crop: &crop,
        attribute: Attribute::Color,
    };
    assert_eq!(scorer.score(&q).unwrap(), 1.0);
    let seen = seen.lock().unwrap();
    assert_eq!(seen[0].path, "/score");
    assert_eq!(seen[0].body["attribute"], "color");
    assert_eq!(seen[0].body["question"], QuestionTable::default().question(Attribute::Color));
}

#[test]
fn unreachable_service_is_unavailable() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err =
        RemoteDetector::new(endpoint(format!("http://127.0.0.1:{port}"), 0)).detect(0, &frame(), "car").unwrap_err();
    assert!(matches!(err, ClientError::Unavailable(_)), "{err}");
}
