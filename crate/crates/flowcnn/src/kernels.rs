//! Images of learned conv kernel slices.

use std::fs;
use std::path::{Path, PathBuf};

use flowcnn_core::model::ModelParams;
use flowcnn_core::nn::{FILTERS, KERNEL_HW};

use crate::ppm::{self, Image};
use crate::{Error, Result};

/// Nearest-neighbour magnification of the 3x3 slices.
pub const SLICE_SCALE: usize = 16;

/// File name for filter `f` and temporal slice `t`, both 0-based.
pub fn slice_file_name(f: usize, t: usize) -> String {
    format!("kernel_f{f}_t{t}.ppm")
}

/// The 3x3 RGB slice of filter `f` at temporal offset `t`, min-max scaled to
/// 0..=255 over its 27 values. A constant slice maps to 128.
pub fn slice_image(params: &ModelParams, f: usize, t: usize) -> Image {
    let k = &params.conv.kernels;
    let mut values = Vec::with_capacity(KERNEL_HW * KERNEL_HW * 3);
    for i in 0..KERNEL_HW {
        for j in 0..KERNEL_HW {
            for c in 0..3 {
                values.push(k.get(&[f, c, t, i, j]));
            }
        }
    }
    let lo = values.iter().copied().fold(f32::INFINITY, f32::min);
    let hi = values.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let data = values
        .iter()
        .map(|&v| {
            if hi > lo {
                ((v - lo) / (hi - lo) * 255.0).round() as u8
            } else {
                128
            }
        })
        .collect();
    Image {
        width: KERNEL_HW,
        height: KERNEL_HW,
        data,
    }
    .upscale(SLICE_SCALE)
}

/// Writes one image per (filter, temporal slice): `6 * N` files.
pub fn export_kernel_slices(params: &ModelParams, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    let mut written = Vec::with_capacity(FILTERS * params.n_frames());
    for f in 0..FILTERS {
        for t in 0..params.n_frames() {
            let path = out_dir.join(slice_file_name(f, t));
            ppm::write(&path, &slice_image(params, f, t))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowcnn_core::model::build_model;

    #[test]
    fn constant_slice_is_mid_gray() {
        let p = ModelParams::zeros(1, [3, 3, 32, 32]).unwrap();
        let img = slice_image(&p, 0, 0);
        assert_eq!((img.width, img.height), (48, 48));
        assert!(img.data.iter().all(|&b| b == 128));
    }

    #[test]
    fn slice_spans_full_range() {
        let p = build_model(3, [3, 7, 32, 32], 5).unwrap();
        let img = slice_image(&p, 2, 1);
        assert_eq!(img.data.iter().min(), Some(&0));
        assert_eq!(img.data.iter().max(), Some(&255));
    }

    #[test]
    fn pixel_layout_follows_kernel() {
        let mut p = ModelParams::zeros(2, [3, 5, 32, 32]).unwrap();
        // one hot value in filter 4, green channel, slice 1, row 2, column 0
        p.conv.kernels.set(&[4, 1, 1, 2, 0], 1.0);
        let img = slice_image(&p, 4, 1);
        let at = |x: usize, y: usize, c: usize| img.data[(y * 48 + x) * 3 + c];
        assert_eq!(at(0, 32, 1), 255);
        assert_eq!(at(15, 47, 1), 255);
        assert_eq!(at(0, 32, 0), 0);
        assert_eq!(at(16, 32, 1), 0);
        assert!(slice_image(&p, 4, 0).data.iter().all(|&b| b == 128));
    }
}
