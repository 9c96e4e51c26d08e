//! Axis-aligned boxes in continuous pixel coordinates.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 0-based frame index.
pub type FrameIndex = usize;

/// Axis-aligned box `(x1, y1, x2, y2)` with `x1 < x2` and `y1 < y2`.
///
/// Coordinates are reals so sub-pixel tracker output survives untouched.
/// Serialized as a `[x1, y1, x2, y2]` array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

/// Integer pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PixelRect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

impl BoundingBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        if !(x1.is_finite() && y1.is_finite() && x2.is_finite() && y2.is_finite()) {
            return Err(Error::InvalidGeometry(format!("non-finite coordinate in ({x1}, {y1}, {x2}, {y2})")));
        }
        if x1 >= x2 || y1 >= y2 {
            return Err(Error::InvalidGeometry(format!("box ({x1}, {y1}, {x2}, {y2}) has zero or negative extent")));
        }
        Ok(Self { x1, y1, x2, y2 })
    }

    /// Box of the given size centred on `(cx, cy)`.
    pub fn from_center(cx: f64, cy: f64, width: f64, height: f64) -> Result<Self> {
        Self::new(cx - width / 2.0, cy - height / 2.0, cx + width / 2.0, cy + height / 2.0)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn y1(&self) -> f64 {
        self.y1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        Self { x1: self.x1 + dx, y1: self.y1 + dy, x2: self.x2 + dx, y2: self.y2 + dy }
    }

    /// Area of the overlap with `other`, zero when disjoint.
    pub fn intersection_area(&self, other: &Self) -> f64 {
        let w = self.x2.min(other.x2) - self.x1.max(other.x1);
        let h = self.y2.min(other.y2) - self.y1.max(other.y1);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    /// Pixels covered by the box inside a `width × height` raster.
    ///
    /// `x1, y1` round down and `x2, y2` round up so the whole box is covered.
    /// Returns `None` when nothing of the box lands inside the raster.
    pub fn rasterize(&self, width: usize, height: usize) -> Option<PixelRect> {
        let clip = |v: f64, hi: usize| -> usize {
            if v <= 0.0 {
                0
            } else if v >= hi as f64 {
                hi
            } else {
                v as usize
            }
        };
        let rect = PixelRect {
            x0: clip(libm::floor(self.x1), width),
            y0: clip(libm::floor(self.y1), height),
            x1: clip(libm::ceil(self.x2), width),
            y1: clip(libm::ceil(self.y2), height),
        };
        (rect.x0 < rect.x1 && rect.y0 < rect.y1).then_some(rect)
    }
}

impl TryFrom<[f64; 4]> for BoundingBox {
    type Error = Error;

    fn try_from(v: [f64; 4]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        b.to_array()
    }
}

pub fn box_area(b: &BoundingBox) -> f64 {
    b.area()
}

/// Intersection over union of two boxes, in `[0, 1]`.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    if a == b {
        return 1.0;
    }
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Clip every coordinate into `[0, width] × [0, height]`.
pub fn clamp_box(b: &BoundingBox, width: f64, height: f64) -> Result<BoundingBox> {
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::InvalidGeometry(format!("clamp target {width}x{height} must be positive")));
    }
    let x1 = b.x1.clamp(0.0, width);
    let y1 = b.y1.clamp(0.0, height);
    let x2 = b.x2.clamp(0.0, width);
    let y2 = b.y2.clamp(0.0, height);
    if x1 >= x2 || y1 >= y2 {
        return Err(Error::DegenerateBox);
    }
    Ok(BoundingBox { x1, y1, x2, y2 })
}
