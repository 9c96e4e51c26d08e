use anchorframe_core::imageio::{Channels, Frame, VideoSequence};
use anchorframe_core::tracker::{Direction, KcfState, KcfTracker, SegmentTracker, TrackerConfig};
use anchorframe_core::BoundingBox;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const BIG: usize = 256;

fn texture(seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..BIG * BIG).map(|_| (rng.next_u32() >> 24) as u8).collect()
}

// Window of the big texture whose content appears shifted by (dx, dy).
fn view(tex: &[u8], w: usize, h: usize, ox: i64, oy: i64, dx: i64, dy: i64) -> Frame {
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let sx = (ox + x - dx) as usize;
            let sy = (oy + y - dy) as usize;
            data.push(tex[sy * BIG + sx]);
        }
    }
    Frame::new(w, h, Channels::Gray, data).unwrap()
}

// Box whose padded search window is exactly 64x64 pixels around (cx, cy).
fn unit_scale_box(cx: f64, cy: f64) -> BoundingBox {
    let side = 64.0 / TrackerConfig::default().padding;
    BoundingBox::from_center(cx, cy, side, side).unwrap()
}

fn shift_errors(cfg: &TrackerConfig, radius: i64) -> Vec<(i64, i64, (f64, f64))> {
    let tex = texture(42);
    let (w, h) = (160, 160);
    let b = unit_scale_box(80.0, 80.0);
    let trained = KcfState::train(&view(&tex, w, h, 48, 48, 0, 0), &b, cfg).unwrap();
    let mut wrong = Vec::new();
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let mut st = trained.clone();
            let step = st.detect(&view(&tex, w, h, 48, 48, dx, dy)).unwrap();
            let off = (step.bbox.x1() - b.x1(), step.bbox.y1() - b.y1());
            // occluded steps coast
            let expect = if step.occluded { (0.0, 0.0) } else { (dx as f64, dy as f64) };
            let off_err = (off.0 - expect.0).abs().max((off.1 - expect.1).abs());
            if step.displacement != (dx as f64, dy as f64) || off_err > 1e-9 {
                wrong.push((dx, dy, step.displacement));
            }
        }
    }
    wrong
}

#[test]
fn recovers_small_integer_shifts_with_defaults() {
    assert_eq!(shift_errors(&TrackerConfig::default(), 4), vec![]);
}

#[test]
fn narrow_target_recovers_quarter_window_shifts() {
    let cfg = TrackerConfig { target_sigma_factor: 0.05, ..TrackerConfig::default() };
    assert_eq!(shift_errors(&cfg, 16), vec![]);
}

#[test]
fn occluded_target_has_lower_psr() {
    let tex = texture(7);
    let (w, h) = (160, 160);
    let frame = view(&tex, w, h, 10, 10, 0, 0);
    let b = unit_scale_box(80.0, 80.0);
    let cfg = TrackerConfig::default();
    let st = KcfState::train(&frame, &b, &cfg).unwrap();
    let visible = st.clone().detect(&view(&tex, w, h, 10, 10, 2, 1)).unwrap().psr;
    // paste unrelated background texture over the target region
    let other = texture(8);
    let mut occluded = frame.clone();
    for y in 55..105 {
        for x in 55..105 {
            occluded.pixel_mut(x, y)[0] = other[y * BIG + x];
        }
    }
    let hidden = st.clone().detect(&occluded).unwrap().psr;
    assert!(hidden < visible, "{hidden} vs {visible}");
}

#[test]
fn tracking_is_deterministic() {
    let tex = texture(3);
    let frames: Vec<Frame> = (0..8).map(|t| view(&tex, 200, 150, 20, 20, 2 * t, -(t / 2))).collect();
    let video = VideoSequence::new(frames).unwrap();
    let b = BoundingBox::new(70.0, 50.0, 110.0, 90.0).unwrap();
    let trk = KcfTracker::default();
    let a = trk.track_segment(&video, 0, &b, Direction::Forward, 7).unwrap();
    let c = trk.track_segment(&video, 0, &b, Direction::Forward, 7).unwrap();
    assert_eq!(a, c);
    let bits = |s: &[anchorframe_core::TrackStep]| -> Vec<u64> {
        s.iter().flat_map(|s| s.bbox.to_array().map(f64::to_bits).into_iter().chain([s.psr.to_bits()])).collect()
    };
    assert_eq!(bits(&a), bits(&c));
    // the target drifts right by 2 px per frame
    let last = a.last().unwrap();
    assert!((last.bbox.x1() - (70.0 + 14.0)).abs() <= 1.0, "{:?}", last.bbox);
}
