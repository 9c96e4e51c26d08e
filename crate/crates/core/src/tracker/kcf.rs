//! Fixed-scale kernelized correlation filter on raw grayscale features.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Direction, SegmentTracker, TrackStep};
use crate::fft::Fft2Plan;
use crate::geometry::{clamp_box, BoundingBox, FrameIndex};
use crate::imageio::{sample_patch, to_grayscale, Frame, VideoSequence};
use crate::{Error, Result};

/// Half-width of the window around the response peak excluded from the sidelobe.
const PSR_EXCLUSION_RADIUS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Side of the square feature grid; must be a power of two.
    pub template_size: usize,
    /// Search window side as a multiple of the box side.
    pub padding: f64,
    pub kernel_sigma: f64,
    /// Regression target width as a fraction of the target's template extent.
    pub target_sigma_factor: f64,
    pub ridge_lambda: f64,
    /// Linear interpolation rate of the model on each update.
    pub interp_factor: f64,
    /// Steps with a peak-to-sidelobe ratio below this are flagged occluded.
    pub psr_occlusion_threshold: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            template_size: 64,
            padding: 1.5,
            kernel_sigma: 0.5,
            target_sigma_factor: 0.1,
            ridge_lambda: 1e-4,
            interp_factor: 0.075,
            psr_occlusion_threshold: 5.0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: alloc::string::String| Err(Error::Config(m));
        if self.template_size < 4 || !self.template_size.is_power_of_two() {
            return fail(format!("template_size {} must be a power of two >= 4", self.template_size));
        }
        if !(self.padding > 1.0) {
            return fail(format!("padding {} must exceed 1", self.padding));
        }
        if !(self.kernel_sigma > 0.0) {
            return fail(format!("kernel_sigma {} must be positive", self.kernel_sigma));
        }
        if !(self.target_sigma_factor > 0.0) {
            return fail(format!("target_sigma_factor {} must be positive", self.target_sigma_factor));
        }
        if !(self.ridge_lambda > 0.0) {
            return fail(format!("ridge_lambda {} must be positive", self.ridge_lambda));
        }
        if !(0.0..=1.0).contains(&self.interp_factor) {
            return fail(format!("interp_factor {} must lie in [0, 1]", self.interp_factor));
        }
        if !self.psr_occlusion_threshold.is_finite() {
            return fail(format!("psr_occlusion_threshold {} must be finite", self.psr_occlusion_threshold));
        }
        Ok(())
    }
}

/// Gaussian kernel correlation over every cyclic shift of `z` against `x`.
///
/// `k(τ) = exp(-max(0, ‖x‖² + ‖z‖² − 2·Σ_p x(p)·z(p+τ)) / (σ²·N²))`, computed
/// through the FFT. Both inputs are row-major `N × N` with `N` a power of two.
pub fn gaussian_kernel_correlation(x: &[f64], z: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("kernel sigma {sigma} must be positive")));
    }
    if x.len() != z.len() {
        return Err(Error::Size(format!("feature sizes differ: {} vs {}", x.len(), z.len())));
    }
    let n = libm::sqrt(x.len() as f64) as usize;
    let plan = Fft2Plan::new(n)?;
    let xf = plan.fft2(x)?;
    let zf = plan.fft2(z)?;
    kernel_from_spectra(&plan, x, &xf, z, &zf, sigma)
}

fn kernel_from_spectra(
    plan: &Fft2Plan,
    x: &[f64],
    xf: &[Complex64],
    z: &[f64],
    zf: &[Complex64],
    sigma: f64,
) -> Result<Vec<f64>> {
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let zz: f64 = z.iter().map(|v| v * v).sum();
    let mut cross: Vec<Complex64> = xf.iter().zip(zf).map(|(a, b)| a.conj() * b).collect();
    plan.inverse_in_place(&mut cross)?;
    let denom = sigma * sigma * x.len() as f64;
    Ok(cross.iter().map(|c| libm::exp(-((xx + zz - 2.0 * c.re).max(0.0)) / denom)).collect())
}

/// Trained correlation filter plus the box it currently follows.
#[derive(Debug, Clone)]
pub struct KcfState {
    cfg: TrackerConfig,
    plan: Fft2Plan,
    window: Vec<f64>,
    target_spectrum: Vec<Complex64>,
    model_alpha: Vec<Complex64>,
    model_template: Vec<f64>,
    // Fixed-size box; only its centre moves. Reported boxes are clamped.
    position: BoundingBox,
    frame_width: f64,
    frame_height: f64,
}

impl KcfState {
    pub fn train(frame: &Frame, b: &BoundingBox, cfg: &TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        let (w, h) = (frame.width() as f64, frame.height() as f64);
        clamp_box(b, w, h)?;
        let n = cfg.template_size;
        let plan = Fft2Plan::new(n)?;
        let window = hann_window(n);
        let sigma_y = cfg.target_sigma_factor * n as f64 / cfg.padding;
        let target_spectrum = plan.fft2(&gaussian_target(n, sigma_y))?;
        let mut state = Self {
            cfg: *cfg,
            plan,
            window,
            target_spectrum,
            model_alpha: Vec::new(),
            model_template: Vec::new(),
            position: *b,
            frame_width: w,
            frame_height: h,
        };
        let gray = to_grayscale(frame);
        let (alpha, template) = state.fit(&gray)?;
        state.model_alpha = alpha;
        state.model_template = template;
        Ok(state)
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn current_box(&self) -> BoundingBox {
        clamp_box(&self.position, self.frame_width, self.frame_height).unwrap_or(self.position)
    }

    pub fn model_alpha(&self) -> &[Complex64] {
        &self.model_alpha
    }

    pub fn model_template(&self) -> &[f64] {
        &self.model_template
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    fn features(&self, gray: &Frame) -> Vec<f64> {
        let n = self.cfg.template_size;
        let (cx, cy) = self.position.center();
        let pw = self.position.width() * self.cfg.padding;
        let ph = self.position.height() * self.cfg.padding;
        let mut patch = sample_patch(gray, cx - pw / 2.0, cy - ph / 2.0, pw / n as f64, ph / n as f64, n);
        let mean = patch.iter().sum::<f64>() / patch.len() as f64;
        patch.iter_mut().zip(&self.window).for_each(|(v, w)| *v = (*v - mean) * w);
        patch
    }

    // Ridge regression over all cyclic shifts at the current position.
    fn fit(&self, gray: &Frame) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let x = self.features(gray);
        let xf = self.plan.fft2(&x)?;
        let k = kernel_from_spectra(&self.plan, &x, &xf, &x, &xf, self.cfg.kernel_sigma)?;
        let kf = self.plan.fft2(&k)?;
        let alpha = self.target_spectrum.iter().zip(&kf).map(|(y, k)| y / (k + self.cfg.ridge_lambda)).collect();
        Ok((alpha, x))
    }

    /// Locate the target in `frame` and move the box, unless the response
    /// is too weak, in which case the box coasts at its last position.
    pub fn detect(&mut self, frame: &Frame) -> Result<TrackStepOutcome> {
        let gray = to_grayscale(frame);
        let n = self.cfg.template_size;
        let z = self.features(&gray);
        let zf = self.plan.fft2(&z)?;
        let xf = self.plan.fft2(&self.model_template)?;
        let k = kernel_from_spectra(&self.plan, &self.model_template, &xf, &z, &zf, self.cfg.kernel_sigma)?;
        let mut resp = self.plan.fft2(&k)?;
        resp.iter_mut().zip(&self.model_alpha).for_each(|(r, a)| *r *= a);
        let response = {
            self.plan.inverse_in_place(&mut resp)?;
            resp.iter().map(|c| c.re).collect::<Vec<f64>>()
        };

        let (peak_idx, peak) =
            response
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let (row, col) = (peak_idx / n, peak_idx % n);
        let psr = peak_to_sidelobe(&response, n, row, col, peak);
        let occluded = !(psr >= self.cfg.psr_occlusion_threshold);

        let unwrap = |i: usize| if i > n / 2 { i as f64 - n as f64 } else { i as f64 };
        let (dx, dy) = (unwrap(col), unwrap(row));
        if !occluded {
            let sx = self.position.width() * self.cfg.padding / n as f64;
            let sy = self.position.height() * self.cfg.padding / n as f64;
            self.position = self.keep_center_inside(self.position.translate(dx * sx, dy * sy));
        }
        Ok(TrackStepOutcome { bbox: self.current_box(), psr, occluded, displacement: (dx, dy) })
    }

    fn keep_center_inside(&self, b: BoundingBox) -> BoundingBox {
        let (cx, cy) = b.center();
        let tx = cx.clamp(0.0, self.frame_width) - cx;
        let ty = cy.clamp(0.0, self.frame_height) - cy;
        b.translate(tx, ty)
    }

    /// Blend a model fitted at the current box into the running model.
    pub fn update(&mut self, frame: &Frame) -> Result<()> {
        let eta = self.cfg.interp_factor;
        if eta == 0.0 {
            return Ok(());
        }
        let (alpha, template) = self.fit(&to_grayscale(frame))?;
        if eta == 1.0 {
            self.model_alpha = alpha;
            self.model_template = template;
            return Ok(());
        }
        self.model_alpha.iter_mut().zip(alpha).for_each(|(old, new)| *old = *old * (1.0 - eta) + new * eta);
        self.model_template.iter_mut().zip(template).for_each(|(old, new)| *old = *old * (1.0 - eta) + new * eta);
        Ok(())
    }
}

/// Result of one [`KcfState::detect`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackStepOutcome {
    pub bbox: BoundingBox,
    pub psr: f64,
    pub occluded: bool,
    /// Peak offset in template cells, `(dx, dy)`.
    pub displacement: (f64, f64),
}

fn hann_window(n: usize) -> Vec<f64> {
    let h: Vec<f64> = (0..n).map(|i| 0.5 * (1.0 - libm::cos(2.0 * PI * i as f64 / (n - 1) as f64))).collect();
    (0..n * n).map(|i| h[i / n] * h[i % n]).collect()
}

// Gaussian regression target with its peak at the origin (cyclic distances).
fn gaussian_target(n: usize, sigma: f64) -> Vec<f64> {
    let d = |i: usize| if i > n / 2 { i as f64 - n as f64 } else { i as f64 };
    (0..n * n)
        .map(|i| {
            let (r, c) = (d(i / n), d(i % n));
            libm::exp(-0.5 * (r * r + c * c) / (sigma * sigma))
        })
        .collect()
}

fn peak_to_sidelobe(response: &[f64], n: usize, row: usize, col: usize, peak: f64) -> f64 {
    let r = PSR_EXCLUSION_RADIUS;
    let near = |a: usize, b: usize| {
        let d = a.abs_diff(b);
        d.min(n - d) <= r
    };
    let (mut sum, mut sum_sq, mut count) = (0.0, 0.0, 0usize);
    for (i, &v) in response.iter().enumerate() {
        if near(i / n, row) && near(i % n, col) {
            continue;
        }
        sum += v;
        sum_sq += v * v;
        count += 1;
    }
    if count == 0 {
        return 0.0;
    }
    let mean = sum / count as f64;
    let var = (sum_sq / count as f64 - mean * mean).max(0.0);
    let std = libm::sqrt(var);
    if std <= 1e-12 * peak.abs().max(1e-300) || std == 0.0 {
        return 0.0;
    }
    (peak - mean) / std
}

/// KCF behind the [`SegmentTracker`] interface.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KcfTracker {
    pub config: TrackerConfig,
}

impl KcfTracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }
}

impl SegmentTracker for KcfTracker {
    fn track_segment(
        &self,
        video: &VideoSequence,
        start: FrameIndex,
        start_box: &BoundingBox,
        direction: Direction,
        steps: usize,
    ) -> Result<Vec<TrackStep>> {
        if start >= video.len() {
            return Err(Error::Input(format!("start frame {start} outside video of {} frames", video.len())));
        }
        let b = clamp_box(start_box, video.width() as f64, video.height() as f64).map_err(|_| {
            Error::InvalidGeometry(format!("start box {:?} lies outside the frame", start_box.to_array()))
        })?;
        let steps = direction.available(start, video.len(), steps);
        if steps == 0 {
            return Ok(Vec::new());
        }
        let mut state = KcfState::train(video.frame(start), &b, &self.config)?;
        let mut out = Vec::with_capacity(steps);
        let mut t = start;
        for _ in 0..steps {
            t = match direction.step(t, video.len()) {
                Some(next) => next,
                None => break,
            };
            let frame = video.frame(t);
            let step = state.detect(frame)?;
            if !step.occluded {
                state.update(frame)?;
            }
            out.push(TrackStep { frame: t, bbox: step.bbox, psr: step.psr, occluded: step.occluded });
        }
        Ok(out)
    }
}
