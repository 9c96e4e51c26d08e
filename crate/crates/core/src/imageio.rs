//! 8-bit rasters, binary netpbm (P5/P6) and the resampling the tracker needs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::geometry::BoundingBox;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channels {
    Gray = 1,
    Rgb = 3,
}

impl Channels {
    pub fn count(self) -> usize {
        self as usize
    }
}

/// Row-major interleaved 8-bit frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    channels: Channels,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, channels: Channels, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Size(format!("frame must be at least 1x1, got {width}x{height}")));
        }
        let expected = width * height * channels.count();
        if data.len() != expected {
            return Err(Error::Size(format!(
                "{width}x{height}x{} frame needs {expected} samples, got {}",
                channels.count(),
                data.len()
            )));
        }
        Ok(Self { width, height, channels, data })
    }

    /// Frame with every sample set to `value`.
    pub fn filled(width: usize, height: usize, channels: Channels, value: u8) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels.count()])
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn channels(&self) -> Channels {
        self.channels
    }
    pub fn data(&self) -> &[u8] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }
    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let c = self.channels.count();
        let i = (y * self.width + x) * c;
        &self.data[i..i + c]
    }

    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let c = self.channels.count();
        let i = (y * self.width + x) * c;
        &mut self.data[i..i + c]
    }
}

/// Ordered frames sharing one size and channel layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoSequence {
    frames: Vec<Frame>,
}

impl VideoSequence {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let first = frames.first().ok_or_else(|| Error::Input(String::from("video needs at least one frame")))?;
        let (w, h, c) = (first.width, first.height, first.channels);
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.width != w || f.height != h || f.channels != c)
        {
            return Err(Error::Input(format!(
                "frame {i} is {}x{}x{}, expected {w}x{h}x{}",
                f.width,
                f.height,
                f.channels.count(),
                c.count()
            )));
        }
        Ok(Self { frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn height(&self) -> usize {
        self.frames[0].height
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &Frame {
        &self.frames[t]
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as usize))
                .ok_or_else(|| self.err(format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        Ok(value)
    }
}

/// Decode a binary PGM (`P5`) or PPM (`P6`) image with maxval 255.
pub fn read_netpbm(bytes: &[u8]) -> Result<Frame> {
    let mut cur = HeaderCursor { bytes, pos: 0 };
    let channels = match bytes.get(..2) {
        Some(b"P5") => Channels::Gray,
        Some(b"P6") => Channels::Rgb,
        _ => return Err(cur.err("expected magic P5 or P6")),
    };
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(cur.err(format!("unsupported maxval {maxval}, only 255 is accepted")));
    }
    if width == 0 || height == 0 {
        return Err(cur.err("zero image dimension"));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.err("expected single whitespace before raster")),
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels.count()))
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let payload = bytes.get(cur.pos..cur.pos + len).ok_or_else(|| Error::Parse {
        offset: bytes.len(),
        message: format!("truncated raster: need {len} bytes after offset {}", cur.pos),
    })?;
    Frame::new(width, height, channels, payload.to_vec())
}

/// Canonical `P5`/`P6` encoding: one header line per field, then raw samples.
pub fn write_netpbm(frame: &Frame) -> Vec<u8> {
    let magic = match frame.channels {
        Channels::Gray => "P5",
        Channels::Rgb => "P6",
    };
    let header = format!("{magic}\n{} {}\n255\n", frame.width, frame.height);
    let mut out = Vec::with_capacity(header.len() + frame.data.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&frame.data);
    out
}

fn round_half_up(v: f64) -> f64 {
    libm::floor(v + 0.5)
}

fn to_u8(v: f64) -> u8 {
    round_half_up(v).clamp(0.0, 255.0) as u8
}

/// ITU-R 601 luma, rounded half-up. Gray frames pass through unchanged.
pub fn to_grayscale(frame: &Frame) -> Frame {
    match frame.channels {
        Channels::Gray => frame.clone(),
        Channels::Rgb => {
            let data = frame
                .data
                .chunks_exact(3)
                .map(|p| to_u8(0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64))
                .collect();
            Frame { width: frame.width, height: frame.height, channels: Channels::Gray, data }
        }
    }
}

/// Crop with edge replication outside the frame.
///
/// Output is `round(w) × round(h)` of the box; output pixel `(i, j)` reads the
/// source at `(round(x1) + i, round(y1) + j)` clamped into bounds.
pub fn crop(frame: &Frame, b: &BoundingBox) -> Result<Frame> {
    let out_w = round_half_up(b.width()) as usize;
    let out_h = round_half_up(b.height()) as usize;
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidGeometry(format!("crop box {:?} rounds to an empty raster", b.to_array())));
    }
    let ox = round_half_up(b.x1()) as i64;
    let oy = round_half_up(b.y1()) as i64;
    let c = frame.channels.count();
    let mut data = Vec::with_capacity(out_w * out_h * c);
    for j in 0..out_h as i64 {
        let sy = (oy + j).clamp(0, frame.height as i64 - 1) as usize;
        for i in 0..out_w as i64 {
            let sx = (ox + i).clamp(0, frame.width as i64 - 1) as usize;
            data.extend_from_slice(frame.pixel(sx, sy));
        }
    }
    Frame::new(out_w, out_h, frame.channels, data)
}

/// Bilinear resize with half-pixel centre alignment.
pub fn resize_bilinear(frame: &Frame, out_w: usize, out_h: usize) -> Result<Frame> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::Size(format!("resize target {out_w}x{out_h} must be at least 1x1")));
    }
    let c = frame.channels.count();
    let sx = frame.width as f64 / out_w as f64;
    let sy = frame.height as f64 / out_h as f64;
    let mut data = Vec::with_capacity(out_w * out_h * c);
    for j in 0..out_h {
        let (y0, y1, fy) = bilinear_taps((j as f64 + 0.5) * sy - 0.5, frame.height);
        for i in 0..out_w {
            let (x0, x1, fx) = bilinear_taps((i as f64 + 0.5) * sx - 0.5, frame.width);
            for ch in 0..c {
                let p = |x: usize, y: usize| frame.data[(y * frame.width + x) * c + ch] as f64;
                let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                data.push(to_u8(top * (1.0 - fy) + bottom * fy));
            }
        }
    }
    Frame::new(out_w, out_h, frame.channels, data)
}

// Neighbouring source indices and blend weight for a continuous coordinate,
// replicating the edge outside `[0, len - 1]`.
fn bilinear_taps(pos: f64, len: usize) -> (usize, usize, f64) {
    let max = (len - 1) as f64;
    let p = pos.clamp(0.0, max);
    let i0 = libm::floor(p);
    let frac = p - i0;
    let i0 = i0 as usize;
    (i0, (i0 + 1).min(len - 1), frac)
}

/// Resample a gray frame into an `n × n` float grid covering
/// `[x0, x0 + n·step_x) × [y0, y0 + n·step_y)`, edge-replicated.
///
/// Samples are in `[0, 1]`. With unit steps and integer origin the samples are
/// exact source pixels.
pub fn sample_patch(gray: &Frame, x0: f64, y0: f64, step_x: f64, step_y: f64, n: usize) -> Vec<f64> {
    debug_assert_eq!(gray.channels, Channels::Gray);
    let mut out = Vec::with_capacity(n * n);
    let w = gray.width;
    let xs: Vec<(usize, usize, f64)> = (0..n).map(|i| bilinear_taps(x0 + (i as f64 + 0.5) * step_x - 0.5, w)).collect();
    for j in 0..n {
        let (ya, yb, fy) = bilinear_taps(y0 + (j as f64 + 0.5) * step_y - 0.5, gray.height);
        let row_a = &gray.data[ya * w..(ya + 1) * w];
        let row_b = &gray.data[yb * w..(yb + 1) * w];
        for &(xa, xb, fx) in &xs {
            let top = row_a[xa] as f64 * (1.0 - fx) + row_a[xb] as f64 * fx;
            let bottom = row_b[xa] as f64 * (1.0 - fx) + row_b[xb] as f64 * fx;
            out.push((top * (1.0 - fy) + bottom * fy) / 255.0);
        }
    }
    out
}

/// Binary mask (255 inside, 0 outside) of a box rasterized per the
/// outward-rounding rule.
pub fn box_mask(b: &BoundingBox, width: usize, height: usize) -> Frame {
    let mut data = vec![0u8; width * height];
    if let Some(r) = b.rasterize(width, height) {
        for y in r.y0..r.y1 {
            data[y * width + r.x0..y * width + r.x1].fill(255);
        }
    }
    Frame { width, height, channels: Channels::Gray, data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(w: usize, h: usize, data: &[u8]) -> Frame {
        Frame::new(w, h, Channels::Gray, data.to_vec()).unwrap()
    }

    #[test]
    fn decode_p5_and_p6() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 64, 128, 255]);
        assert_eq!(read_netpbm(&bytes).unwrap(), gray(2, 2, &[0, 64, 128, 255]));

        let mut bytes = b"P6\n1 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0]);
        let f = read_netpbm(&bytes).unwrap();
        assert_eq!(f.channels(), Channels::Rgb);
        assert_eq!(f.pixel(0, 0), &[255, 0, 0]);
    }

    #[test]
    fn decode_comments_and_whitespace() {
        let mut bytes = b"P5 # made by hand\n#another\n 2\t1 \n# max\n255 ".to_vec();
        bytes.extend_from_slice(&[9, 10]);
        assert_eq!(read_netpbm(&bytes).unwrap(), gray(2, 1, &[9, 10]));
    }

    #[test]
    fn decode_rejections() {
        let e = read_netpbm(b"P5\n2 2\n65535\n\0\0\0\0\0\0\0\0").unwrap_err();
        assert!(matches!(e, Error::Parse { ref message, .. } if message.contains("maxval")));
        assert!(matches!(read_netpbm(b"P3\n1 1\n255\n"), Err(Error::Parse { offset: 0, .. })));
        let e = read_netpbm(b"P5\n2 2\n255\n\x01\x02").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 13, .. }));
        assert!(matches!(read_netpbm(b"P5\nx 2\n255\n"), Err(Error::Parse { offset: 3, .. })));
    }

    #[test]
    fn encode_canonical_header() {
        let bytes = write_netpbm(&gray(1, 1, &[7]));
        assert_eq!(bytes, b"P5\n1 1\n255\n\x07");
        assert_eq!(bytes.len(), 12);
        let rgb = Frame::filled(2, 2, Channels::Rgb, 3).unwrap();
        assert!(write_netpbm(&rgb).starts_with(b"P6"));
    }

    #[test]
    fn grayscale_examples() {
        let g = gray(2, 1, &[3, 200]);
        assert_eq!(to_grayscale(&g), g);
        let white = Frame::filled(1, 1, Channels::Rgb, 255).unwrap();
        assert_eq!(to_grayscale(&white).data(), &[255]);
        let red = Frame::new(1, 1, Channels::Rgb, alloc::vec![255, 0, 0]).unwrap();
        assert_eq!(to_grayscale(&red).data(), &[76]);
    }

    #[test]
    fn crop_examples() {
        let c = Frame::filled(20, 10, Channels::Gray, 9).unwrap();
        let out = crop(&c, &BoundingBox::new(2., 2., 8., 6.).unwrap()).unwrap();
        assert_eq!((out.width(), out.height()), (6, 4));
        assert!(out.data().iter().all(|&v| v == 9));

        // column 0 holds 50, everything else 100
        let mut f = Frame::filled(6, 4, Channels::Gray, 100).unwrap();
        for y in 0..4 {
            f.pixel_mut(0, y)[0] = 50;
        }
        let out = crop(&f, &BoundingBox::new(-3., 0., 3., 4.).unwrap()).unwrap();
        for y in 0..4 {
            assert_eq!(&out.data()[y * 6..y * 6 + 4], &[50, 50, 50, 50]);
            assert_eq!(out.pixel(4, y), &[100]);
        }

        let full = BoundingBox::new(0., 0., 6., 4.).unwrap();
        assert_eq!(crop(&f, &full).unwrap(), f);
    }

    #[test]
    fn resize_examples() {
        let c = Frame::filled(5, 3, Channels::Rgb, 42).unwrap();
        let big = resize_bilinear(&c, 17, 9).unwrap();
        assert!(big.data().iter().all(|&v| v == 42));

        let ramp = gray(2, 1, &[0, 255]);
        let out = resize_bilinear(&ramp, 4, 1).unwrap();
        // centres at -0.25 (clamped), 0.25, 0.75, 1.25 (clamped)
        assert_eq!(out.data(), &[0, 64, 191, 255]);
        assert!(out.data().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn resize_same_size_is_identity_within_rounding() {
        let data: Vec<u8> = (0..48u32).map(|i| (i * 37 % 251) as u8).collect();
        let f = Frame::new(8, 6, Channels::Gray, data).unwrap();
        let out = resize_bilinear(&f, 8, 6).unwrap();
        let max_dev = f.data().iter().zip(out.data()).map(|(a, b)| (*a as i32 - *b as i32).abs()).max().unwrap();
        assert!(max_dev <= 1);
    }

    #[test]
    fn sample_patch_unit_step_is_exact() {
        let data: Vec<u8> = (0..64u32).map(|i| (i * 13 % 256) as u8).collect();
        let f = gray(8, 8, &data);
        let p = sample_patch(&f, 2.0, 3.0, 1.0, 1.0, 4);
        for j in 0..4 {
            for i in 0..4 {
                assert_eq!(p[j * 4 + i], f.pixel(2 + i, 3 + j)[0] as f64 / 255.0);
            }
        }
    }

    #[test]
    fn box_mask_fills_rasterized_box() {
        let m = box_mask(&BoundingBox::new(1.5, 0.2, 3.0, 1.0).unwrap(), 5, 3);
        assert_eq!(m.data(), &[0, 255, 255, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    }

    fn any_frame() -> impl Strategy<Value = Frame> {
        (1usize..9, 1usize..9, prop::bool::ANY).prop_flat_map(|(w, h, rgb)| {
            let ch = if rgb { Channels::Rgb } else { Channels::Gray };
            prop::collection::vec(any::<u8>(), w * h * ch.count()).prop_map(move |d| Frame::new(w, h, ch, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn netpbm_round_trip(f in any_frame()) {
            let bytes = write_netpbm(&f);
            let back = read_netpbm(&bytes).unwrap();
            prop_assert_eq!(write_netpbm(&back), bytes);
            prop_assert_eq!(back, f);
        }

        #[test]
        fn crop_of_full_output_is_idempotent(f in any_frame(), x in -4.0..6.0f64, y in -4.0..6.0f64,
                                             w in 1.0..6.0f64, h in 1.0..6.0f64) {
            let c = crop(&f, &BoundingBox::new(x, y, x + w, y + h).unwrap()).unwrap();
            let full = BoundingBox::new(0., 0., c.width() as f64, c.height() as f64).unwrap();
            prop_assert_eq!(crop(&c, &full).unwrap(), c);
        }
    }
}
