//! Binary PPM (P6, maxval 255) images.

use std::fs;
use std::path::Path;

use crate::{Error, Result};

/// An 8-bit RGB image, pixels interleaved row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Option<Self> {
        (data.len() == width * height * 3).then_some(Image { width, height, data })
    }

    /// Nearest-neighbour upscale by an integer factor.
    pub fn upscale(&self, factor: usize) -> Image {
        let (w, h) = (self.width * factor, self.height * factor);
        let mut data = Vec::with_capacity(w * h * 3);
        for y in 0..h {
            for x in 0..w {
                let src = ((y / factor) * self.width + x / factor) * 3;
                data.extend_from_slice(&self.data[src..src + 3]);
            }
        }
        Image { width: w, height: h, data }
    }
}

pub fn encode(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

/// Parses a P6 image. Header tokens may be separated by any whitespace and
/// interleaved with `#` comments; exactly one whitespace byte precedes the
/// raster, which must have no trailing bytes.
pub fn decode(bytes: &[u8]) -> std::result::Result<Image, String> {
    let mut pos = 0;
    let mut tokens = [0usize; 3];
    if bytes.get(..2) != Some(b"P6") {
        return Err("not a binary PPM (missing P6 magic)".into());
    }
    pos += 2;
    for slot in tokens.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *slot = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or("truncated or non-numeric PPM header")?;
    }
    let [width, height, maxval] = tokens;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}"));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("missing separator after PPM header".into());
    }
    let raster = &bytes[pos + 1..];
    if raster.len() != width * height * 3 {
        return Err(format!(
            "raster holds {} bytes, header promises {}x{}x3",
            raster.len(),
            width,
            height
        ));
    }
    Ok(Image {
        width,
        height,
        data: raster.to_vec(),
    })
}

pub fn read(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    decode(&bytes).map_err(|reason| Error::malformed(path, reason))
}

pub fn write(path: &Path, img: &Image) -> Result<()> {
    fs::write(path, encode(img)).map_err(Error::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let img = Image::new(2, 1, vec![1, 2, 3, 250, 251, 252]).unwrap();
        assert_eq!(decode(&encode(&img)).unwrap(), img);
    }

    #[test]
    fn header_comments_and_whitespace() {
        let bytes = b"P6 # made by hand\n1\t1 # size\n255\n\x01\x02\x03";
        let img = decode(bytes).unwrap();
        assert_eq!((img.width, img.height), (1, 1));
        assert_eq!(img.data, vec![1, 2, 3]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(decode(b"P3\n1 1\n255\n").is_err());
        assert!(decode(b"P6\n1 1\n65535\n\0\0\0\0\0\0").is_err());
        assert!(decode(b"P6\n2 1\n255\n\0\0\0").is_err());
        assert!(decode(b"P6\n1 1\n255\n\0\0\0\0").is_err());
        assert!(decode(b"P6\n1").is_err());
    }

    #[test]
    fn upscale_repeats_pixels() {
        let img = Image::new(2, 1, vec![0, 0, 0, 9, 9, 9]).unwrap().upscale(3);
        assert_eq!((img.width, img.height), (6, 3));
        for y in 0..3 {
            for x in 0..6 {
                let expected = if x < 3 { 0 } else { 9 };
                assert_eq!(img.data[(y * 6 + x) * 3], expected);
            }
        }
    }
}
