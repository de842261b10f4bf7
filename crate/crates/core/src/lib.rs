//! Numeric core for temporal-depth video classification.
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`): frame
//! resampling and grayscale conversion, dense Lucas-Kanade optical flow with
//! an HSV color encoding, a synthetic motion-clip generator, a small set of
//! hand-differentiated tensor layers (3D convolution, 3D max pooling, dense,
//! ReLU, sigmoid + binary cross-entropy, Adam), and the model/training loop
//! built from them. File formats and the command line live in the `flowcnn`
//! crate.

#![no_std]

extern crate alloc;

mod error;
pub mod flow;
pub mod model;
pub mod nn;
mod real;
pub mod seed;
pub mod synth;
mod tensor;
#[cfg(test)]
mod test_util;
pub mod train;
pub mod video;

pub use error::{Error, Result};
pub use real::Real;
pub use tensor::Tensor;
