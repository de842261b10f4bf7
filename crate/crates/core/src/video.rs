//! RGB frame stacks, quarter-resolution resampling and grayscale conversion.

use alloc::vec::Vec;

use crate::{Error, Result};

/// A stack of RGB frames, row-major `(frame, row, column, channel)`, with
/// every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Clip {
    pub const CHANNELS: usize = 3;

    pub fn new(frames: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if frames < 2 {
            return Err(Error::InvalidClip("a clip needs at least two frames"));
        }
        if height == 0 || width == 0 {
            return Err(Error::InvalidClip("empty frame"));
        }
        if data.len() != frames * height * width * Self::CHANNELS {
            return Err(Error::InvalidClip("data length does not match T*H*W*3"));
        }
        if !data.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::InvalidClip("pixel value outside [0, 1]"));
        }
        Ok(Clip {
            frames,
            height,
            width,
            data,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn frame_len(&self) -> usize {
        self.height * self.width * Self::CHANNELS
    }

    /// Interleaved RGB samples of one frame.
    pub fn frame(&self, index: usize) -> &[f32] {
        let n = self.frame_len();
        &self.data[index * n..(index + 1) * n]
    }

    pub fn pixel(&self, frame: usize, row: usize, col: usize) -> [f32; 3] {
        let o = ((frame * self.height + row) * self.width + col) * Self::CHANNELS;
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    /// Keeps the centered `frames` frames; rejects clips that are shorter.
    pub fn center_crop_frames(&self, frames: usize) -> Result<Clip> {
        if frames > self.frames {
            return Err(Error::InvalidClip("clip shorter than the standard frame count"));
        }
        let start = (self.frames - frames) / 2;
        let n = self.frame_len();
        Clip::new(frames, self.height, self.width, self.data[start * n..(start + frames) * n].to_vec())
    }
}

/// One luma plane with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
}

impl GrayFrame {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::InvalidClip("gray frame length does not match H*W"));
        }
        Ok(GrayFrame { height, width, data })
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.width + col]
    }
}

/// Box-filter downscale by 4 in both dimensions: each output pixel is the
/// mean of its 4x4 source block, per channel.
pub fn resize_quarter(clip: &Clip) -> Result<Clip> {
    if clip.height % 4 != 0 || clip.width % 4 != 0 {
        return Err(Error::NotDivisible {
            height: clip.height,
            width: clip.width,
        });
    }
    let (oh, ow) = (clip.height / 4, clip.width / 4);
    let mut out = Vec::with_capacity(clip.frames * oh * ow * 3);
    for t in 0..clip.frames {
        for r in 0..oh {
            for c in 0..ow {
                let mut acc = [0.0f64; 3];
                for dr in 0..4 {
                    for dc in 0..4 {
                        let p = clip.pixel(t, r * 4 + dr, c * 4 + dc);
                        for (a, v) in acc.iter_mut().zip(p) {
                            *a += v as f64;
                        }
                    }
                }
                // f64 accumulation then one rounding keeps the block mean in [0, 1]
                out.extend(acc.iter().map(|&a| ((a / 16.0) as f32).clamp(0.0, 1.0)));
            }
        }
    }
    Clip::new(clip.frames, oh, ow, out)
}

pub const LUMA_WEIGHTS: [f32; 3] = [0.299, 0.587, 0.114];

/// Rec.601 luma of one frame.
pub fn to_grayscale(clip: &Clip, frame_index: usize) -> Result<GrayFrame> {
    if frame_index >= clip.frames {
        return Err(Error::IndexOutOfRange {
            index: frame_index,
            len: clip.frames,
        });
    }
    let data = clip
        .frame(frame_index)
        .chunks_exact(3)
        .map(|p| {
            let y = LUMA_WEIGHTS[0] * p[0] + LUMA_WEIGHTS[1] * p[1] + LUMA_WEIGHTS[2] * p[2];
            // the weights sum to 1 only up to rounding
            let lo = p[0].min(p[1]).min(p[2]);
            let hi = p[0].max(p[1]).max(p[2]);
            y.clamp(lo, hi)
        })
        .collect();
    GrayFrame::new(clip.height, clip.width, data)
}
