//! Seeded synthetic occlusion scenes with exact per-frame ground truth.
//!
//! A scene is a static textured background, one textured target carrying a
//! coloured attribute patch, and any number of occluders drawn on top during
//! their active intervals. Object positions are rounded to whole pixels, so
//! truth boxes are integer-valued and visibility is an exact pixel count.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::geometry::{iou, BoundingBox, FrameIndex, PixelRect};
use crate::imageio::{Channels, Frame, VideoSequence};
use crate::pipeline::{KeyframeResult, MaskTube};
use crate::{Error, Result};

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Texture {
    Checker {
        cell: usize,
        dark: Rgb,
        light: Rgb,
    },
    /// Bilinear value noise on a lattice of `cell`-pixel spacing.
    Noise {
        cell: usize,
        low: Rgb,
        high: Rgb,
    },
    Solid {
        color: Rgb,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MotionPath {
    Static,
    /// Constant velocity in pixels per frame.
    Linear {
        vx: f64,
        vy: f64,
    },
    /// `offset(t) = amplitude · sin(2π·t/period + phase)` per axis.
    Sinusoidal {
        ax: f64,
        ay: f64,
        period: f64,
        phase: f64,
    },
}

impl MotionPath {
    fn offset(&self, t: FrameIndex) -> (f64, f64) {
        let t = t as f64;
        match *self {
            MotionPath::Static => (0.0, 0.0),
            MotionPath::Linear { vx, vy } => (vx * t, vy * t),
            MotionPath::Sinusoidal { ax, ay, period, phase } => {
                let s = libm::sin(2.0 * PI * t / period + phase);
                (ax * s, ay * s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub width: usize,
    pub height: usize,
    /// Top-left corner at frame 0.
    pub x: f64,
    pub y: f64,
    pub texture: Texture,
    pub path: MotionPath,
    /// Attribute patch as fractions of the target box, `[x1, y1, x2, y2]`.
    pub attribute_patch: [f64; 4],
    pub attribute_color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccluderSpec {
    pub width: usize,
    pub height: usize,
    pub x: f64,
    pub y: f64,
    pub texture: Texture,
    pub path: MotionPath,
    /// Inclusive frame interval `[t0, t1]` during which the occluder is drawn.
    pub active: [FrameIndex; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(default)]
    pub name: String,
    pub width: usize,
    pub height: usize,
    pub num_frames: usize,
    pub seed: u64,
    pub background: Texture,
    pub target: TargetSpec,
    #[serde(default)]
    pub occluders: Vec<OccluderSpec>,
    /// Permit frames where the target leaves the image entirely.
    #[serde(default)]
    pub allow_offscreen: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTruth {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    /// Fraction of the target area that is on screen and unoccluded.
    pub visibility: f64,
    pub attribute_box: BoundingBox,
    pub attribute_visibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub width: usize,
    pub height: usize,
    pub frames: Vec<FrameTruth>,
}

impl GroundTruth {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

// Signed integer rectangle, used before clipping to the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct IRect {
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

impl IRect {
    fn area(&self) -> u64 {
        ((self.x1 - self.x0).max(0) * (self.y1 - self.y0).max(0)) as u64
    }

    fn clip(&self, w: usize, h: usize) -> Option<PixelRect> {
        let r = PixelRect {
            x0: self.x0.clamp(0, w as i64) as usize,
            y0: self.y0.clamp(0, h as i64) as usize,
            x1: self.x1.clamp(0, w as i64) as usize,
            y1: self.y1.clamp(0, h as i64) as usize,
        };
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }

    fn to_box(self) -> BoundingBox {
        BoundingBox::new(self.x0 as f64, self.y0 as f64, self.x1 as f64, self.y1 as f64)
            .expect("object rectangles have positive size")
    }
}

fn place(x: f64, y: f64, w: usize, h: usize, path: &MotionPath, t: FrameIndex) -> IRect {
    let (dx, dy) = path.offset(t);
    let x0 = libm::round(x + dx) as i64;
    let y0 = libm::round(y + dy) as i64;
    IRect { x0, y0, x1: x0 + w as i64, y1: y0 + h as i64 }
}

impl TargetSpec {
    fn rect(&self, t: FrameIndex) -> IRect {
        place(self.x, self.y, self.width, self.height, &self.path, t)
    }

    fn patch_rect(&self, t: FrameIndex) -> IRect {
        let r = self.rect(t);
        let [fx0, fy0, fx1, fy1] = self.attribute_patch;
        let px = |f: f64| libm::round(f * self.width as f64) as i64;
        let py = |f: f64| libm::round(f * self.height as f64) as i64;
        IRect { x0: r.x0 + px(fx0), y0: r.y0 + py(fy0), x1: r.x0 + px(fx1), y1: r.y0 + py(fy1) }
    }
}

impl OccluderSpec {
    fn rect(&self, t: FrameIndex) -> IRect {
        place(self.x, self.y, self.width, self.height, &self.path, t)
    }

    fn is_active(&self, t: FrameIndex) -> bool {
        (self.active[0]..=self.active[1]).contains(&t)
    }
}

fn check_texture(tex: &Texture, what: &str) -> Result<()> {
    match tex {
        Texture::Checker { cell: 0, .. } | Texture::Noise { cell: 0, .. } => {
            Err(Error::Scene(format!("{what} texture cell must be positive")))
        }
        _ => Ok(()),
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Scene(m));
        if self.width == 0 || self.height == 0 {
            return fail(format!("image size {}x{} must be positive", self.width, self.height));
        }
        if self.num_frames == 0 {
            return fail("num_frames must be at least 1".into());
        }
        let t = &self.target;
        if t.width == 0 || t.height == 0 {
            return fail("target size must be positive".into());
        }
        let [a, b, c, d] = t.attribute_patch;
        if !(0.0 <= a && a < c && c <= 1.0 && 0.0 <= b && b < d && d <= 1.0) {
            return fail(format!("attribute patch {:?} must be an ordered sub-box of [0,1]²", t.attribute_patch));
        }
        if t.patch_rect(0).area() == 0 {
            return fail("attribute patch rounds to zero pixels".into());
        }
        if let MotionPath::Sinusoidal { period, .. } = t.path {
            if !(period > 0.0) {
                return fail("sinusoidal period must be positive".into());
            }
        }
        check_texture(&self.background, "background")?;
        check_texture(&t.texture, "target")?;
        for (i, o) in self.occluders.iter().enumerate() {
            if o.width == 0 || o.height == 0 {
                return fail(format!("occluder {i} size must be positive"));
            }
            let [t0, t1] = o.active;
            if t0 > t1 || t1 >= self.num_frames {
                return fail(format!("occluder {i} interval [{t0}, {t1}] must satisfy t0 <= t1 < {}", self.num_frames));
            }
            if let MotionPath::Sinusoidal { period, .. } = o.path {
                if !(period > 0.0) {
                    return fail(format!("occluder {i} sinusoidal period must be positive"));
                }
            }
            check_texture(&o.texture, "occluder")?;
        }
        if !self.allow_offscreen {
            if let Some(f) = (0..self.num_frames).find(|&f| t.rect(f).clip(self.width, self.height).is_none()) {
                return fail(format!("target leaves the image at frame {f}; set allow_offscreen to permit it"));
            }
        }
        Ok(())
    }
}

/// Texture sampler with its own seeded noise lattice.
struct Painter {
    texture: Texture,
    lattice: Vec<u8>,
    lattice_w: usize,
}

impl Painter {
    fn new(texture: &Texture, width: usize, height: usize, seed: u64) -> Self {
        let (lattice, lattice_w) = match *texture {
            Texture::Noise { cell, .. } => {
                let lw = width / cell + 2;
                let lh = height / cell + 2;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                ((0..lw * lh).map(|_| (rng.next_u32() >> 24) as u8).collect(), lw)
            }
            _ => (Vec::new(), 0),
        };
        Self { texture: texture.clone(), lattice, lattice_w }
    }

    fn color(&self, x: usize, y: usize) -> Rgb {
        match self.texture {
            Texture::Solid { color } => color,
            Texture::Checker { cell, dark, light } => {
                if (x / cell + y / cell).is_multiple_of(2) {
                    dark
                } else {
                    light
                }
            }
            Texture::Noise { cell, low, high } => {
                let (gx, gy) = (x / cell, y / cell);
                let fx = (x % cell) as f64 / cell as f64;
                let fy = (y % cell) as f64 / cell as f64;
                let at = |i: usize, j: usize| self.lattice[j * self.lattice_w + i] as f64 / 255.0;
                let v = (at(gx, gy) * (1.0 - fx) + at(gx + 1, gy) * fx) * (1.0 - fy)
                    + (at(gx, gy + 1) * (1.0 - fx) + at(gx + 1, gy + 1) * fx) * fy;
                let mix = |a: u8, b: u8| libm::round(a as f64 + (b as f64 - a as f64) * v) as u8;
                [mix(low[0], high[0]), mix(low[1], high[1]), mix(low[2], high[2])]
            }
        }
    }
}

fn paint_rect(frame: &mut Frame, rect: IRect, painter: &Painter) {
    let Some(clip) = rect.clip(frame.width(), frame.height()) else { return };
    for y in clip.y0..clip.y1 {
        for x in clip.x0..clip.x1 {
            let lx = (x as i64 - rect.x0) as usize;
            let ly = (y as i64 - rect.y0) as usize;
            frame.pixel_mut(x, y).copy_from_slice(&painter.color(lx, ly));
        }
    }
}

// Distinct deterministic sub-seeds per scene object.
fn sub_seed(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Render every frame and count exact visibilities.
pub fn generate_scene(spec: &SceneSpec) -> Result<(VideoSequence, GroundTruth)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let bg = Painter::new(&spec.background, w, h, sub_seed(spec.seed, 1));
    let mut background = Frame::filled(w, h, Channels::Rgb, 0)?;
    for y in 0..h {
        for x in 0..w {
            background.pixel_mut(x, y).copy_from_slice(&bg.color(x, y));
        }
    }
    let target = &spec.target;
    let target_painter = Painter::new(&target.texture, target.width, target.height, sub_seed(spec.seed, 2));
    let patch_painter = Painter::new(&Texture::Solid { color: target.attribute_color }, 1, 1, 0);
    let occluder_painters: Vec<Painter> = spec
        .occluders
        .iter()
        .enumerate()
        .map(|(i, o)| Painter::new(&o.texture, o.width, o.height, sub_seed(spec.seed, 3 + i as u64)))
        .collect();

    let mut frames = Vec::with_capacity(spec.num_frames);
    let mut truth = Vec::with_capacity(spec.num_frames);
    for t in 0..spec.num_frames {
        let mut frame = background.clone();
        let rect = target.rect(t);
        let patch = target.patch_rect(t);
        paint_rect(&mut frame, rect, &target_painter);
        paint_rect(&mut frame, patch, &patch_painter);
        let active: Vec<IRect> = spec
            .occluders
            .iter()
            .zip(&occluder_painters)
            .filter(|(o, _)| o.is_active(t))
            .map(|(o, p)| {
                let r = o.rect(t);
                paint_rect(&mut frame, r, p);
                r
            })
            .collect();
        truth.push(FrameTruth {
            bbox: rect.to_box(),
            visibility: visible_fraction(rect, &active, w, h),
            attribute_box: patch.to_box(),
            attribute_visibility: visible_fraction(patch, &active, w, h),
        });
        frames.push(frame);
    }
    Ok((VideoSequence::new(frames)?, GroundTruth { width: w, height: h, frames: truth }))
}

// On-screen pixels of `rect` not covered by any occluder, over its full area.
fn visible_fraction(rect: IRect, occluders: &[IRect], w: usize, h: usize) -> f64 {
    let Some(clip) = rect.clip(w, h) else { return 0.0 };
    let mut visible = 0u64;
    for y in clip.y0..clip.y1 {
        let (yi, mut x) = (y as i64, clip.x0 as i64);
        while x < clip.x1 as i64 {
            // skip across whichever occluder covers (x, y)
            match occluders.iter().find(|o| x >= o.x0 && x < o.x1 && yi >= o.y0 && yi < o.y1) {
                Some(o) => x = o.x1,
                None => {
                    visible += 1;
                    x += 1;
                }
            }
        }
    }
    visible as f64 / rect.area() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub kf_visibility: f64,
    pub kf_attr_visibility: f64,
    pub is_complete: bool,
}

/// Ground truth at the selected keyframe.
pub fn evaluate_selection(result: &KeyframeResult, truth: &GroundTruth) -> Result<SelectionReport> {
    let max_frame = result.candidates.iter().map(|c| c.frame).max().unwrap_or(0).max(result.k_star);
    if max_frame >= truth.len() {
        return Err(Error::Input(format!("result references frame {max_frame} but truth has {} frames", truth.len())));
    }
    let ft = &truth.frames[result.k_star];
    let b = &ft.bbox;
    Ok(SelectionReport {
        kf_visibility: ft.visibility,
        kf_attr_visibility: ft.attribute_visibility,
        is_complete: b.x1() > 0.0 && b.y1() > 0.0 && b.x2() < truth.width as f64 && b.y2() < truth.height as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeReport {
    /// `None` when no frame reaches the visibility floor.
    pub mean_iou: Option<f64>,
    pub per_frame_iou: Vec<f64>,
    pub frames_evaluated: usize,
}

/// Tube box vs truth box IoU, averaged over frames at or above `visibility_floor`.
pub fn evaluate_tube_boxes(boxes: &[BoundingBox], truth: &GroundTruth, visibility_floor: f64) -> Result<TubeReport> {
    if boxes.len() != truth.len() {
        return Err(Error::Input(format!("tube has {} frames but truth has {}", boxes.len(), truth.len())));
    }
    let per_frame_iou: Vec<f64> = boxes.iter().zip(&truth.frames).map(|(b, t)| iou(b, &t.bbox)).collect();
    let kept: Vec<f64> = per_frame_iou
        .iter()
        .zip(&truth.frames)
        .filter(|(_, t)| t.visibility >= visibility_floor)
        .map(|(v, _)| *v)
        .collect();
    let mean_iou = (!kept.is_empty()).then(|| kept.iter().sum::<f64>() / kept.len() as f64);
    Ok(TubeReport { mean_iou, per_frame_iou, frames_evaluated: kept.len() })
}

pub fn evaluate_tube(tube: &MaskTube, truth: &GroundTruth, visibility_floor: f64) -> Result<TubeReport> {
    let boxes: Vec<BoundingBox> = tube.entries().iter().map(|e| e.bbox).collect();
    evaluate_tube_boxes(&boxes, truth, visibility_floor)
}

const W: usize = 320;
const H: usize = 240;
const T: usize = 81;

fn bg_noise() -> Texture {
    Texture::Noise { cell: 6, low: [40, 70, 40], high: [150, 190, 140] }
}

fn target_noise() -> Texture {
    Texture::Noise { cell: 4, low: [10, 10, 60], high: [250, 230, 120] }
}

fn target_checker() -> Texture {
    Texture::Checker { cell: 6, dark: [20, 20, 20], light: [235, 235, 235] }
}

fn occluder_noise() -> Texture {
    Texture::Noise { cell: 5, low: [90, 20, 20], high: [240, 160, 80] }
}

fn target(x: f64, y: f64, path: MotionPath) -> TargetSpec {
    TargetSpec {
        width: 48,
        height: 48,
        x,
        y,
        texture: target_noise(),
        path,
        attribute_patch: [0.25, 0.25, 0.75, 0.5],
        attribute_color: [230, 30, 30],
    }
}

fn scene(name: &str, seed: u64, target: TargetSpec, occluders: Vec<OccluderSpec>) -> SceneSpec {
    SceneSpec {
        name: name.into(),
        width: W,
        height: H,
        num_frames: T,
        seed,
        background: bg_noise(),
        target,
        occluders,
        allow_offscreen: false,
    }
}

// Occluder sweeping horizontally so that it fully covers a target whose
// top-left sits at (tx, ty) at frame `mid`, moving at `vx` px/frame.
fn sweeping_occluder(tx: f64, ty: f64, mid: FrameIndex, vx: f64, active: [FrameIndex; 2]) -> OccluderSpec {
    OccluderSpec {
        width: 64,
        height: 72,
        x: tx - 8.0 - vx * mid as f64,
        y: ty - 12.0,
        texture: occluder_noise(),
        path: MotionPath::Linear { vx, vy: 0.0 },
        active,
    }
}

fn lin(vx: f64, vy: f64) -> MotionPath {
    MotionPath::Linear { vx, vy }
}

/// The in-repo acceptance corpus: 24 scenes, 81 frames at 320×240.
#[allow(clippy::vec_init_then_push)]
pub fn canonical_suite() -> Vec<SceneSpec> {
    let mut s = Vec::new();
    s.push(scene("static-visible", 101, target(136., 96., MotionPath::Static), vec![]));
    s.push(scene("linear-slow", 102, target(40., 96., lin(1.5, 0.0)), vec![]));
    s.push(scene("linear-diagonal", 103, target(40., 40., lin(1.8, 1.2)), vec![]));
    s.push(scene("linear-fast", 104, target(20., 120., lin(2.8, -0.6)), vec![]));
    let mut checker = target(40., 150., lin(2.0, -0.5));
    checker.texture = target_checker();
    s.push(scene("linear-checker", 105, checker, vec![]));
    s.push(scene(
        "sinusoidal-x",
        106,
        target(136., 96., MotionPath::Sinusoidal { ax: 70., ay: 0., period: 60., phase: 0. }),
        vec![],
    ));
    s.push(scene(
        "sinusoidal-xy",
        107,
        target(136., 96., MotionPath::Sinusoidal { ax: 60., ay: 40., period: 80., phase: 0.5 }),
        vec![],
    ));

    // Occlusion at different points of a static target's life.
    for (name, seed, mid, span) in [
        ("early-occlusion", 201, 12usize, [0usize, 30usize]),
        ("mid-occlusion", 202, 40, [25, 55]),
        ("late-occlusion", 203, 68, [50, 80]),
    ] {
        s.push(scene(
            name,
            seed,
            target(136., 96., MotionPath::Static),
            vec![sweeping_occluder(136., 96., mid, 4.0, span)],
        ));
    }
    // Moving target, occluder crossing the other way.
    {
        let t = target(40., 96., lin(1.5, 0.0));
        let (tx, mid) = (40. + 1.5 * 40., 40);
        s.push(scene("mid-occlusion-crossing", 204, t, vec![sweeping_occluder(tx, 96., mid, -3.0, [22, 60])]));
    }
    {
        let t = target(40., 60., lin(2.0, 0.5));
        let mid = 20;
        let (tx, ty) = (40. + 2.0 * mid as f64, 60. + 0.5 * mid as f64);
        let mut o = sweeping_occluder(tx, ty, mid, 3.5, [0, 40]);
        o.path = lin(3.5, 0.5);
        s.push(scene("early-occlusion-moving", 205, t, vec![o]));
    }
    {
        let t = target(60., 120., lin(1.2, -0.4));
        let mid = 60;
        let (tx, ty) = (60. + 1.2 * mid as f64, 120. - 0.4 * mid as f64);
        let mut o = sweeping_occluder(tx, ty, mid, -4.0, [45, 80]);
        o.path = lin(-4.0, -0.4);
        s.push(scene("late-occlusion-moving", 206, t, vec![o]));
    }
    // Long total occlusion: a wide slow occluder parks over the target.
    s.push(scene(
        "long-total-occlusion",
        207,
        target(136., 96., MotionPath::Static),
        vec![OccluderSpec {
            width: 90,
            height: 80,
            x: 20.,
            y: 80.,
            texture: occluder_noise(),
            path: MotionPath::Sinusoidal { ax: 98., ay: 0., period: 162., phase: 0. },
            active: [5, 75],
        }],
    ));
    // Left half of a static target hidden for the middle of the clip.
    s.push(scene(
        "half-occlusion",
        208,
        target(136., 96., MotionPath::Static),
        vec![OccluderSpec {
            width: 40,
            height: 70,
            x: 120.,
            y: 85.,
            texture: occluder_noise(),
            path: MotionPath::Static,
            active: [20, 60],
        }],
    ));
    // Two separate occlusion events.
    s.push(scene(
        "double-occlusion",
        209,
        target(136., 96., MotionPath::Static),
        vec![sweeping_occluder(136., 96., 15, 4.5, [0, 32]), sweeping_occluder(136., 96., 62, -4.5, [45, 80])],
    ));
    // Static occluder, target walks behind it.
    s.push(scene(
        "walk-behind",
        210,
        target(20., 96., lin(3.0, 0.0)),
        vec![OccluderSpec {
            width: 70,
            height: 80,
            x: 125.,
            y: 80.,
            texture: occluder_noise(),
            path: MotionPath::Static,
            active: [0, 80],
        }],
    ));
    s.push(scene(
        "sinusoidal-mid-occlusion",
        211,
        target(136., 96., MotionPath::Sinusoidal { ax: 50., ay: 0., period: 81., phase: 0. }),
        vec![sweeping_occluder(136., 96., 40, 4.0, [28, 52])],
    ));

    // Target exits through the right border.
    let mut exit = scene("border-exit", 301, target(150., 96., lin(2.6, 0.0)), vec![]);
    exit.allow_offscreen = true;
    s.push(exit);
    // Target enters from the left border.
    s.push(scene("border-enter", 302, target(-40., 100., lin(2.2, 0.0)), vec![]));

    // Attribute patch hidden by a small occluder riding with the target.
    s.push(scene(
        "never-visible-attribute",
        401,
        target(60., 96., lin(1.5, 0.0)),
        vec![OccluderSpec {
            width: 28,
            height: 16,
            x: 70.,
            y: 106.,
            texture: Texture::Solid { color: [60, 60, 200] },
            path: lin(1.5, 0.0),
            active: [0, 80],
        }],
    ));
    s.push(attribute_window_scene());

    let mut small = target(60., 80., lin(1.6, 0.4));
    small.width = 32;
    small.height = 32;
    s.push(scene("small-target", 501, small, vec![]));
    let mut large = target(100., 70., MotionPath::Sinusoidal { ax: 30., ay: 10., period: 70., phase: 1.0 });
    large.width = 80;
    large.height = 72;
    s.push(scene("large-target", 502, large, vec![]));
    s
}

/// Scene whose target is fully visible, with its attribute patch exposed,
/// only on frames 30–50. Outside that window two occluders hide the patch
/// and part of the target.
pub fn attribute_window_scene() -> SceneSpec {
    let hide = |active: [FrameIndex; 2]| OccluderSpec {
        width: 60,
        height: 30,
        x: 130.,
        y: 90.,
        texture: occluder_noise(),
        path: MotionPath::Static,
        active,
    };
    scene("attribute-window", 402, target(136., 96., MotionPath::Static), vec![hide([0, 29]), hide([51, 80])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(occluders: Vec<OccluderSpec>) -> SceneSpec {
        SceneSpec {
            name: "tiny".into(),
            width: 64,
            height: 48,
            num_frames: 10,
            seed: 5,
            background: Texture::Checker { cell: 4, dark: [0, 0, 0], light: [255, 255, 255] },
            target: TargetSpec {
                width: 16,
                height: 12,
                x: 20.,
                y: 18.,
                texture: Texture::Noise { cell: 3, low: [0, 0, 0], high: [255, 255, 255] },
                path: MotionPath::Static,
                attribute_patch: [0.0, 0.0, 0.5, 1.0],
                attribute_color: [255, 0, 0],
            },
            occluders,
            allow_offscreen: false,
        }
    }

    fn occ(x: f64, y: f64, w: usize, h: usize, active: [usize; 2]) -> OccluderSpec {
        OccluderSpec {
            width: w,
            height: h,
            x,
            y,
            texture: Texture::Solid { color: [9, 9, 9] },
            path: MotionPath::Static,
            active,
        }
    }

    #[test]
    fn no_occluder_means_full_visibility() {
        let (_, truth) = generate_scene(&tiny(vec![])).unwrap();
        assert!(truth.frames.iter().all(|f| f.visibility == 1.0 && f.attribute_visibility == 1.0));
    }

    #[test]
    fn scripted_total_occlusion() {
        let (_, truth) = generate_scene(&tiny(vec![occ(10., 10., 40, 30, [3, 6])])).unwrap();
        for (t, f) in truth.frames.iter().enumerate() {
            let expected = if (3..=6).contains(&t) { 0.0 } else { 1.0 };
            assert_eq!(f.visibility, expected, "frame {t}");
        }
    }

    #[test]
    fn left_half_cover() {
        // target x 20..36; occluder covers 20..28 over the full height
        let (video, truth) = generate_scene(&tiny(vec![occ(20., 10., 8, 30, [0, 9])])).unwrap();
        assert!(truth.frames.iter().all(|f| f.visibility == 0.5));
        // the attribute patch is the left half, fully covered
        assert!(truth.frames.iter().all(|f| f.attribute_visibility == 0.0));
        assert_eq!(video.frame(0).pixel(22, 20), &[9, 9, 9]);
        assert_ne!(video.frame(0).pixel(30, 20), &[9, 9, 9]);
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = tiny(vec![occ(0., 0., 10, 10, [0, 4])]);
        assert_eq!(generate_scene(&spec).unwrap(), generate_scene(&spec).unwrap());
        let other = SceneSpec { seed: 6, ..spec.clone() };
        assert_ne!(generate_scene(&spec).unwrap().0, generate_scene(&other).unwrap().0);
    }

    #[test]
    fn spec_validation() {
        let bad = tiny(vec![occ(0., 0., 4, 4, [5, 10])]);
        assert!(matches!(generate_scene(&bad), Err(Error::Scene(_))));
        let mut off = tiny(vec![]);
        off.target.path = MotionPath::Linear { vx: 20., vy: 0. };
        assert!(matches!(off.validate(), Err(Error::Scene(_))));
        off.allow_offscreen = true;
        assert!(off.validate().is_ok());
        let mut patch = tiny(vec![]);
        patch.target.attribute_patch = [0.5, 0.0, 0.5, 1.0];
        assert!(patch.validate().is_err());
    }

    #[test]
    fn canonical_suite_is_valid() {
        let suite = canonical_suite();
        assert!(suite.len() >= 20);
        let mut names: Vec<&str> = suite.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), suite.len());
        for s in &suite {
            s.validate().unwrap();
        }
    }
}
