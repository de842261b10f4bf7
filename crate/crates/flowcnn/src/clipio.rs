//! Clip files: directories of `frame_%04d.ppm` images and the `.vclip`
//! binary format (`VCLP1\n`, then `T H W C` as little-endian `u32` with
//! `C = 3`, then `T*H*W*C` little-endian `f32` values, row-major).

use std::fs;
use std::path::{Path, PathBuf};

use flowcnn_core::video::Clip;

use crate::ppm::{self, Image};
use crate::{Error, Result};

pub const VCLIP_MAGIC: &[u8; 6] = b"VCLP1\n";

/// Loads a clip from a frame directory or a `.vclip` file.
pub fn load_clip(path: &Path) -> Result<Clip> {
    if path.is_dir() {
        read_frame_dir(path)
    } else {
        read_vclip(path)
    }
}

pub fn frame_name(index: usize) -> String {
    format!("frame_{:04}.ppm", index + 1)
}

fn frame_number(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("frame_")?.strip_suffix(".ppm")?;
    if digits.len() < 4 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Frame files of a directory in ascending index order. Numbering must run
/// from 1 without gaps.
fn frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut numbered = Vec::new();
    for entry in fs::read_dir(dir).map_err(Error::io(dir))? {
        let entry = entry.map_err(Error::io(dir))?;
        if let Some(n) = entry.file_name().to_str().and_then(frame_number) {
            numbered.push((n, entry.path()));
        }
    }
    if numbered.is_empty() {
        return Err(Error::MissingFrames(dir.to_path_buf()));
    }
    numbered.sort();
    for (expected, (n, path)) in (1..).zip(&numbered) {
        if *n != expected {
            return Err(Error::malformed(path, format!("expected frame number {expected}")));
        }
    }
    Ok(numbered.into_iter().map(|(_, p)| p).collect())
}

pub fn read_frame_dir(dir: &Path) -> Result<Clip> {
    let files = frame_files(dir)?;
    let mut data = Vec::new();
    let mut dims = None;
    for file in &files {
        let img = ppm::read(file)?;
        match dims {
            None => dims = Some((img.height, img.width)),
            Some(d) if d != (img.height, img.width) => return Err(Error::InconsistentDims(dir.to_path_buf())),
            Some(_) => {}
        }
        data.extend(img.data.iter().map(|&b| b as f32 / 255.0));
    }
    let (h, w) = dims.unwrap_or_default();
    Ok(Clip::new(files.len(), h, w, data)?)
}

/// Quantizes a `[0, 1]` value to a byte.
pub fn to_byte(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn frame_image(clip: &Clip, index: usize) -> Image {
    let data = clip.frame(index).iter().map(|&v| to_byte(v)).collect();
    Image {
        width: clip.width(),
        height: clip.height(),
        data,
    }
}

/// Writes every frame as `frame_%04d.ppm` (1-based), creating `dir`.
pub fn write_frame_dir(clip: &Clip, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    for t in 0..clip.frames() {
        ppm::write(&dir.join(frame_name(t)), &frame_image(clip, t))?;
    }
    Ok(())
}

pub fn encode_vclip(clip: &Clip) -> Vec<u8> {
    let mut out = Vec::with_capacity(VCLIP_MAGIC.len() + 16 + clip.data().len() * 4);
    out.extend_from_slice(VCLIP_MAGIC);
    for d in [clip.frames(), clip.height(), clip.width(), Clip::CHANNELS] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in clip.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses `.vclip` bytes; `path` is only used in error messages.
pub fn decode_vclip(bytes: &[u8], path: &Path) -> Result<Clip> {
    let body = bytes
        .strip_prefix(VCLIP_MAGIC.as_slice())
        .ok_or_else(|| Error::malformed(path, "bad magic"))?;
    if body.len() < 16 {
        return Err(Error::malformed(path, "truncated header"));
    }
    let (header, payload) = body.split_at(16);
    let dim = |i: usize| u32::from_le_bytes(header[i * 4..i * 4 + 4].try_into().unwrap()) as usize;
    let (t, h, w, c) = (dim(0), dim(1), dim(2), dim(3));
    if c != Clip::CHANNELS {
        return Err(Error::malformed(path, format!("channel count {c}, expected 3")));
    }
    let expected = t.checked_mul(h).and_then(|v| v.checked_mul(w)).and_then(|v| v.checked_mul(c * 4));
    if expected != Some(payload.len()) {
        return Err(Error::malformed(path, "payload length does not match dimensions"));
    }
    let data = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok(Clip::new(t, h, w, data)?)
}

pub fn read_vclip(path: &Path) -> Result<Clip> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    decode_vclip(&bytes, path)
}

pub fn write_vclip(clip: &Clip, path: &Path) -> Result<()> {
    fs::write(path, encode_vclip(clip)).map_err(Error::io(path))
}
