//! File formats, dataset loading and the temporal-depth sweep built on
//! [`flowcnn_core`].

pub mod checkpoint;
pub mod clipio;
pub mod config;
pub mod dataset;
mod error;
pub mod kernels;
pub mod ppm;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
pub use flowcnn_core;
