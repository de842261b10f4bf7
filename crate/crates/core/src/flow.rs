//! Dense single-level Lucas-Kanade optical flow and its HSV color encoding.
//!
//! Flow is measured in pixels per frame with `u` positive rightward and `v`
//! positive downward. Spatial gradients are central differences of the
//! earlier frame, the temporal gradient is `next - prev`, and each pixel
//! solves the 2x2 normal equations over a square window:
//!
//! ```text
//! | Σ IxIx  Σ IxIy | |u|     | Σ IxIt |
//! | Σ IxIy  Σ IyIy | |v| = - | Σ IyIt |
//! ```
//!
//! Pixels whose structure-tensor determinant falls below `det_epsilon`, and
//! pixels whose window or gradient stencil leaves the frame, get zero flow.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::video::{to_grayscale, Clip, GrayFrame};
use crate::{Error, Result, Tensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    /// Odd side length of the least-squares window.
    pub window: usize,
    /// Determinant below which a pixel is treated as ill-conditioned.
    pub det_epsilon: f64,
    /// Flow magnitude (pixels/frame) that maps to full intensity.
    pub v_max: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            window: 5,
            det_epsilon: 1e-6,
            v_max: 8.0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::ConfigInvalid("flow window must be odd and at least 3"));
        }
        if !(self.det_epsilon > 0.0) {
            return Err(Error::ConfigInvalid("det_epsilon must be positive"));
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return Err(Error::ConfigInvalid("v_max must be positive"));
        }
        Ok(())
    }
}

/// Per-pixel displacement between two frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub height: usize,
    pub width: usize,
    pub u: Vec<f32>,
    pub v: Vec<f32>,
}

impl FlowField {
    pub fn zeros(height: usize, width: usize) -> Self {
        FlowField {
            height,
            width,
            u: vec![0.0; height * width],
            v: vec![0.0; height * width],
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> (f32, f32) {
        let i = row * self.width + col;
        (self.u[i], self.v[i])
    }

    /// Mean flow over the pixels at least `margin` away from every border.
    pub fn interior_mean(&self, margin: usize) -> (f64, f64) {
        let (mut su, mut sv, mut n) = (0.0, 0.0, 0usize);
        for r in margin..self.height.saturating_sub(margin) {
            for c in margin..self.width.saturating_sub(margin) {
                let (u, v) = self.at(r, c);
                su += u as f64;
                sv += v as f64;
                n += 1;
            }
        }
        if n == 0 {
            (0.0, 0.0)
        } else {
            (su / n as f64, sv / n as f64)
        }
    }
}

/// Sums of `values` over every `window x window` square whose center is at
/// least `half` from the border; other entries are left at zero.
fn box_sum(values: &[f64], height: usize, width: usize, window: usize) -> Vec<f64> {
    let half = window / 2;
    let mut rows = vec![0.0; height * width];
    for r in 0..height {
        for c in half..width - half {
            let row = &values[r * width + c - half..=r * width + c + half];
            rows[r * width + c] = row.iter().sum();
        }
    }
    let mut out = vec![0.0; height * width];
    for r in half..height - half {
        for c in half..width - half {
            out[r * width + c] = (r - half..=r + half).map(|rr| rows[rr * width + c]).sum();
        }
    }
    out
}

pub fn lucas_kanade(prev: &GrayFrame, next: &GrayFrame, cfg: &FlowConfig) -> Result<FlowField> {
    cfg.validate()?;
    if prev.height != next.height || prev.width != next.width {
        return Err(Error::DimMismatch);
    }
    let (h, w) = (prev.height, prev.width);
    if h < cfg.window || w < cfg.window {
        return Err(Error::FrameTooSmall {
            height: h,
            width: w,
            window: cfg.window,
        });
    }
    let half = cfg.window / 2;
    let mut flow = FlowField::zeros(h, w);
    // the window of every solved pixel must sit inside the gradient-valid
    // region [1, h-2] x [1, w-2]
    if h < cfg.window + 2 || w < cfg.window + 2 {
        return Ok(flow);
    }

    let n = h * w;
    let (mut xx, mut xy, mut yy, mut xt, mut yt) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let ix = (prev.at(r, c + 1) as f64 - prev.at(r, c - 1) as f64) / 2.0;
            let iy = (prev.at(r + 1, c) as f64 - prev.at(r - 1, c) as f64) / 2.0;
            let it = next.at(r, c) as f64 - prev.at(r, c) as f64;
            let i = r * w + c;
            xx[i] = ix * ix;
            xy[i] = ix * iy;
            yy[i] = iy * iy;
            xt[i] = ix * it;
            yt[i] = iy * it;
        }
    }
    let [sxx, sxy, syy, sxt, syt] = [&xx, &xy, &yy, &xt, &yt].map(|p| box_sum(p, h, w, cfg.window));

    for r in half + 1..h - half - 1 {
        for c in half + 1..w - half - 1 {
            let i = r * w + c;
            let det = sxx[i] * syy[i] - sxy[i] * sxy[i];
            if !(det >= cfg.det_epsilon) {
                continue;
            }
            let u = (-syy[i] * sxt[i] + sxy[i] * syt[i]) / det;
            let v = (sxy[i] * sxt[i] - sxx[i] * syt[i]) / det;
            if u.is_finite() && v.is_finite() {
                flow.u[i] = u as f32;
                flow.v[i] = v as f32;
            }
        }
    }
    Ok(flow)
}

/// `x mod m` in `[0, m)`.
fn wrap(x: f64, m: f64) -> f64 {
    let r = libm::fmod(x, m);
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

/// HSV to RGB with the usual six 60-degree sectors. `hue` is in degrees.
pub fn hsv_to_rgb(hue: f64, sat: f64, val: f64) -> [f64; 3] {
    let chroma = val * sat;
    let sector = wrap(hue, 360.0) / 60.0;
    let x = chroma * (1.0 - libm::fabs(wrap(sector, 2.0) - 1.0));
    let (r, g, b) = match sector as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    let m = val - chroma;
    [r + m, g + m, b + m]
}

/// Hue in degrees `[0, 360)` for a flow vector; rightward motion is 0 (red).
pub fn flow_hue(u: f64, v: f64) -> f64 {
    let theta = wrap(libm::atan2(v, u), 2.0 * PI);
    wrap(theta / (2.0 * PI) * 360.0, 360.0)
}

/// Color-encodes one flow vector: direction becomes hue, magnitude becomes
/// value (saturating at `v_max`), saturation is 1.
pub fn encode_vector(u: f64, v: f64, v_max: f64) -> [f32; 3] {
    let mag = libm::hypot(u, v);
    let val = (mag / v_max).min(1.0);
    if val == 0.0 {
        return [0.0; 3];
    }
    hsv_to_rgb(flow_hue(u, v), 1.0, val).map(|c| c.clamp(0.0, 1.0) as f32)
}

/// Interleaved RGB image (`H x W x 3`) of a flow field.
pub fn encode_flow(flow: &FlowField, cfg: &FlowConfig) -> Vec<f32> {
    flow.u
        .iter()
        .zip(&flow.v)
        .flat_map(|(&u, &v)| encode_vector(u as f64, v as f64, cfg.v_max))
        .collect()
}

/// Color-encoded flow stack, shaped `(3, T-1, H, W)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowClip(Tensor<f32>);

impl FlowClip {
    pub fn new(tensor: Tensor<f32>) -> Result<Self> {
        if tensor.rank() != 4 || tensor.shape()[0] != 3 || tensor.shape()[1] == 0 {
            return Err(Error::ShapeMismatch("flow clip must be (3, D, H, W) with D >= 1"));
        }
        if !tensor.data().iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::ShapeMismatch("flow clip value outside [0, 1]"));
        }
        Ok(FlowClip(tensor))
    }

    /// Builds the planar stack from interleaved RGB frames.
    pub fn from_frames(height: usize, width: usize, frames: &[Vec<f32>]) -> Result<Self> {
        let depth = frames.len();
        let plane = height * width;
        let mut t = Tensor::zeros(&[3, depth, height, width]);
        {
            let data = t.data_mut();
            for (d, frame) in frames.iter().enumerate() {
                if frame.len() != plane * 3 {
                    return Err(Error::ShapeMismatch("flow frame length"));
                }
                for (p, rgb) in frame.chunks_exact(3).enumerate() {
                    for (ch, &val) in rgb.iter().enumerate() {
                        data[(ch * depth + d) * plane + p] = val;
                    }
                }
            }
        }
        FlowClip::new(t)
    }

    pub fn tensor(&self) -> &Tensor<f32> {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor<f32> {
        self.0
    }

    pub fn depth(&self) -> usize {
        self.0.shape()[1]
    }

    pub fn height(&self) -> usize {
        self.0.shape()[2]
    }

    pub fn width(&self) -> usize {
        self.0.shape()[3]
    }

    /// `(3, depth, height, width)`, the input dims a model is built for.
    pub fn dims(&self) -> [usize; 4] {
        self.0.dims4()
    }

    /// Interleaved RGB copy of flow frame `d`.
    pub fn frame_rgb(&self, d: usize) -> Vec<f32> {
        let (depth, plane) = (self.depth(), self.height() * self.width());
        let data = self.0.data();
        (0..plane)
            .flat_map(|p| (0..3).map(move |ch| (ch, p)))
            .map(|(ch, p)| data[(ch * depth + d) * plane + p])
            .collect()
    }
}

/// Flow between frames `t` and `t + 1`, color encoded.
pub fn encoded_pair(clip: &Clip, t: usize, cfg: &FlowConfig) -> Result<Vec<f32>> {
    let a = to_grayscale(clip, t)?;
    let b = to_grayscale(clip, t + 1)?;
    Ok(encode_flow(&lucas_kanade(&a, &b, cfg)?, cfg))
}

/// Encodes the flow of every consecutive frame pair; depth is `T - 1`.
pub fn clip_to_flow(clip: &Clip, cfg: &FlowConfig) -> Result<FlowClip> {
    cfg.validate()?;
    let grays = (0..clip.frames()).map(|t| to_grayscale(clip, t)).collect::<Result<Vec<_>>>()?;
    let frames = grays
        .windows(2)
        .map(|pair| Ok(encode_flow(&lucas_kanade(&pair[0], &pair[1], cfg)?, cfg)))
        .collect::<Result<Vec<_>>>()?;
    FlowClip::from_frames(clip.height(), clip.width(), &frames)
}
