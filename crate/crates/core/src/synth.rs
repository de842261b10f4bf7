//! Labeled synthetic motion clips.
//!
//! Textured blobs move over a static textured background. In class 0 every
//! blob drifts at constant velocity; in class 1 each blob's velocity flips
//! sign every `reversal_period` frames. Initial directions are uniform in
//! both classes, so a single frame pair carries no class information; the
//! label is only visible across several flow frames.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::seed::{self, tag};
use crate::video::Clip;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub n_blobs: usize,
    /// Blob speed in pixels per frame.
    pub speed: f64,
    /// Frames between velocity reversals in class-1 clips.
    pub reversal_period: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            frames: 24,
            height: 32,
            width: 32,
            n_blobs: 2,
            speed: 1.5,
            reversal_period: 4,
            noise_sigma: 0.02,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reversal_period == 0 {
            return Err(Error::ConfigInvalid("reversal_period must be at least 1"));
        }
        if self.frames < self.reversal_period + 2 {
            return Err(Error::ConfigInvalid("frames must be at least reversal_period + 2"));
        }
        if !(self.speed > 0.0 && self.speed <= 2.0) {
            return Err(Error::ConfigInvalid("speed must lie in (0, 2]"));
        }
        if self.height < 16 || self.width < 16 {
            return Err(Error::ConfigInvalid("frames must be at least 16x16"));
        }
        if self.n_blobs == 0 {
            return Err(Error::ConfigInvalid("need at least one blob"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::ConfigInvalid("noise_sigma must be non-negative"));
        }
        Ok(())
    }

    fn blob_radius(&self) -> f64 {
        0.2 * self.height.min(self.width) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub clip: Clip,
    /// 1 = fight-like (oscillating), 0 = non-fight (drifting).
    pub label: u8,
}

/// Sum of a few oriented sinusoids with wavelengths in a fixed band.
#[derive(Debug, Clone)]
struct Texture {
    waves: Vec<(f64, f64, f64, f64)>,
}

impl Texture {
    /// Wave orientations are evenly spread from a random base angle so the
    /// texture has gradient structure in every direction.
    fn random(rng: &mut ChaCha8Rng, amplitudes: &[f64], min_wavelength: f64, max_wavelength: f64) -> Self {
        let base = rng.random_range(0.0..PI);
        let spacing = PI / amplitudes.len() as f64;
        let waves = amplitudes
            .iter()
            .enumerate()
            .map(|(i, &amp)| {
                let angle = base + i as f64 * spacing;
                let k = 2.0 * PI / rng.random_range(min_wavelength..max_wavelength);
                let phase = rng.random_range(0.0..2.0 * PI);
                (k * libm::cos(angle), k * libm::sin(angle), phase, amp)
            })
            .collect();
        Texture { waves }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        self.waves.iter().map(|&(kx, ky, ph, amp)| amp * libm::sin(kx * x + ky * y + ph)).sum()
    }
}

struct Blob {
    texture: Texture,
    tint: [f64; 3],
    /// Center per frame.
    path: Vec<(f64, f64)>,
}

/// Reflects `p` into `[lo, hi]`, flipping `vel` when a wall is hit.
fn reflect(p: &mut f64, vel: &mut f64, lo: f64, hi: f64) {
    // speed is far below the box size, so one reflection per step suffices
    if *p < lo {
        *p = 2.0 * lo - *p;
        *vel = -*vel;
    } else if *p > hi {
        *p = 2.0 * hi - *p;
        *vel = -*vel;
    }
}

/// Blob centers for every frame. The step from frame `t` to `t + 1` moves
/// by the current velocity; for class 1 it is negated on odd reversal
/// periods, counted from a random per-blob phase so that reversal times are
/// not tied to absolute frame positions. The phase is even, which keeps every
/// reversal between two flow frames that the post-conv temporal pool (depth 2)
/// never merges.
fn trajectory(label: u8, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let r = cfg.blob_radius();
    let (x_hi, y_hi) = (cfg.width as f64 - 1.0 - r, cfg.height as f64 - 1.0 - r);
    let mut x = rng.random_range(r..x_hi);
    let mut y = rng.random_range(r..y_hi);
    let angle = rng.random_range(0.0..2.0 * PI);
    let (mut vx, mut vy) = (cfg.speed * libm::cos(angle), cfg.speed * libm::sin(angle));
    let phase = 2 * rng.random_range(0..cfg.reversal_period);
    let mut path = Vec::with_capacity(cfg.frames);
    path.push((x, y));
    for t in 0..cfg.frames - 1 {
        let sign = if label == 1 && ((t + phase) / cfg.reversal_period) % 2 == 1 { -1.0 } else { 1.0 };
        x += sign * vx;
        y += sign * vy;
        // reflection flips the underlying velocity, so the reversal schedule
        // keeps operating on the reflected direction
        let (mut svx, mut svy) = (sign * vx, sign * vy);
        reflect(&mut x, &mut svx, r, x_hi);
        reflect(&mut y, &mut svy, r, y_hi);
        vx = sign * svx;
        vy = sign * svy;
        path.push((x, y));
    }
    path
}

/// Per-frame blob centers of a generated clip, for inspection and tests.
pub fn blob_paths(label: u8, cfg: &SynthConfig, seed: u64) -> Result<Vec<Vec<(f64, f64)>>> {
    cfg.validate()?;
    let scene = Scene::draw(label, cfg, &mut seed::rng(seed));
    Ok(scene.blobs.into_iter().map(|b| b.path).collect())
}

const BACKGROUND_AMPS: [f64; 3] = [0.12, 0.08, 0.06];
const BLOB_AMPS: [f64; 3] = [0.16, 0.13, 0.1];

struct Scene {
    background: Texture,
    tint: [f64; 3],
    blobs: Vec<Blob>,
}

impl Scene {
    fn draw(label: u8, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Self {
        let background = Texture::random(rng, &BACKGROUND_AMPS, 8.0, 16.0);
        let tint = core::array::from_fn(|_| rng.random_range(0.3..0.5));
        let blobs = (0..cfg.n_blobs).map(|_| draw_blob(label, cfg, rng)).collect();
        Scene { background, tint, blobs }
    }
}

fn draw_blob(label: u8, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Blob {
    let texture = Texture::random(rng, &BLOB_AMPS, 7.0, 12.0);
    let brightness = rng.random_range(0.45..0.65);
    let tint = core::array::from_fn(|_| brightness + rng.random_range(-0.1..0.1));
    let path = trajectory(label, cfg, rng);
    Blob { texture, tint, path }
}

/// Renders one labeled clip; identical `(label, cfg, seed)` give identical
/// clips.
pub fn gen_clip(label: u8, cfg: &SynthConfig, seed: u64) -> Result<LabeledClip> {
    cfg.validate()?;
    if label > 1 {
        return Err(Error::ConfigInvalid("label must be 0 or 1"));
    }
    let mut rng = seed::rng(seed);
    let Scene {
        background,
        tint: bg_tint,
        blobs,
    } = Scene::draw(label, cfg, &mut rng);
    let noise = Normal::new(0.0, cfg.noise_sigma).map_err(|_| Error::ConfigInvalid("noise_sigma"))?;
    let radius = cfg.blob_radius();

    let (h, w) = (cfg.height, cfg.width);
    let mut data = Vec::with_capacity(cfg.frames * h * w * 3);
    for t in 0..cfg.frames {
        for row in 0..h {
            for col in 0..w {
                let (x, y) = (col as f64, row as f64);
                let bg = background.at(x, y);
                let mut px: [f64; 3] = core::array::from_fn(|c| bg_tint[c] + bg);
                for blob in &blobs {
                    let (cx, cy) = blob.path[t];
                    let dist = libm::hypot(x - cx, y - cy);
                    // one-pixel soft edge
                    let alpha = (radius + 0.5 - dist).clamp(0.0, 1.0);
                    if alpha > 0.0 {
                        // texture rides with the blob
                        let tex = blob.texture.at(x - cx, y - cy);
                        for (p, tint) in px.iter_mut().zip(blob.tint) {
                            *p = (1.0 - alpha) * *p + alpha * (tint + tex);
                        }
                    }
                }
                for p in px {
                    let n = if cfg.noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                    data.push((p + n).clamp(0.0, 1.0) as f32);
                }
            }
        }
    }
    Ok(LabeledClip {
        clip: Clip::new(cfg.frames, h, w, data)?,
        label,
    })
}

/// Seed of the `index`-th clip of a dataset drawn from `master`.
pub fn clip_seed(master: u64, index: usize) -> u64 {
    seed::derive(seed::derive(master, tag::CLIP), index as u64)
}

/// `n / 2` clips of each label in a seed-determined order.
pub fn gen_dataset(n: usize, cfg: &SynthConfig, seed: u64) -> Result<Vec<LabeledClip>> {
    if n % 2 == 1 {
        return Err(Error::OddCount(n));
    }
    cfg.validate()?;
    let mut plan: Vec<(u8, u64)> = (0..n).map(|i| (u8::from(i < n / 2), clip_seed(seed, i))).collect();
    plan.shuffle(&mut seed::rng(seed::derive(seed, tag::DATASET_ORDER)));
    plan.into_iter().map(|(label, s)| gen_clip(label, cfg, s)).collect()
}
