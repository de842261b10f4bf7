//! Labeled clip collections on disk and their conversion to model inputs.
//!
//! A dataset directory holds `.vclip` files and a `labels.csv` with header
//! `filename,label`, where `label` is 1 for the fight-like class and 0
//! otherwise.

use std::fs;
use std::path::Path;

use flowcnn_core::flow::{encoded_pair, FlowClip, FlowConfig};
use flowcnn_core::synth::{gen_dataset, LabeledClip};
use flowcnn_core::train::Sample;
use flowcnn_core::video::{resize_quarter, Clip};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clipio::{read_vclip, write_vclip};
use crate::config::{DatasetConfig, DatasetKind};
use crate::{Error, Result};

pub const LABELS_FILE: &str = "labels.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRow {
    pub filename: String,
    pub label: u8,
}

pub fn clip_file_name(index: usize) -> String {
    format!("clip_{index:04}.vclip")
}

/// Writes clips as `clip_%04d.vclip` (0-based) plus `labels.csv`.
pub fn write_labeled_dir(clips: &[LabeledClip], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let labels = dir.join(LABELS_FILE);
    let mut w = csv::Writer::from_path(&labels).map_err(|e| csv_error(&labels, e))?;
    for (i, c) in clips.iter().enumerate() {
        let filename = clip_file_name(i);
        write_vclip(&c.clip, &dir.join(&filename))?;
        w.serialize(LabelRow { filename, label: c.label })
            .map_err(|e| csv_error(&labels, e))?;
    }
    w.flush().map_err(Error::io(&labels))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        }
    } else {
        Error::malformed(path, e.to_string())
    }
}

pub fn read_labels(dir: &Path) -> Result<Vec<LabelRow>> {
    let path = dir.join(LABELS_FILE);
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(|e| csv_error(&path, e))?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<LabelRow>, _>>()
        .map_err(|e| csv_error(&path, e))?;
    if let Some(bad) = rows.iter().find(|row| row.label > 1) {
        return Err(Error::malformed(&path, format!("{}: label {} is not 0 or 1", bad.filename, bad.label)));
    }
    if rows.is_empty() {
        return Err(Error::malformed(&path, "no clips listed"));
    }
    Ok(rows)
}

/// Loads every clip listed in `labels.csv`, in file order.
pub fn load_labeled_dir(dir: &Path) -> Result<Vec<LabeledClip>> {
    read_labels(dir)?
        .into_par_iter()
        .map(|row| {
            Ok(LabeledClip {
                clip: read_vclip(&dir.join(&row.filename))?,
                label: row.label,
            })
        })
        .collect()
}

/// Center-crops to `frames` frames, then optionally quarter-resizes.
pub fn standardize(clip: &Clip, frames: usize, resize: bool) -> Result<Clip> {
    let cropped = clip.center_crop_frames(frames)?;
    Ok(if resize { resize_quarter(&cropped)? } else { cropped })
}

/// Color-encoded flow of a clip, frame pairs computed in parallel. The
/// result equals `flowcnn_core::flow::clip_to_flow` bit for bit.
pub fn flow_clip(clip: &Clip, cfg: &FlowConfig) -> Result<FlowClip> {
    cfg.validate()?;
    let frames = (0..clip.frames() - 1)
        .into_par_iter()
        .map(|t| encoded_pair(clip, t, cfg))
        .collect::<flowcnn_core::Result<Vec<_>>>()?;
    Ok(FlowClip::from_frames(clip.height(), clip.width(), &frames)?)
}

pub fn to_samples(clips: &[LabeledClip], frames: usize, resize: bool, cfg: &FlowConfig) -> Result<Vec<Sample>> {
    clips
        .par_iter()
        .map(|c| {
            Ok(Sample {
                input: flow_clip(&standardize(&c.clip, frames, resize)?, cfg)?,
                label: c.label,
            })
        })
        .collect()
}

/// Raw labeled clips for a dataset description. Synthetic datasets are
/// generated from the synth seed, or `run_seed` when none is set.
pub fn load_clips(cfg: &DatasetConfig, run_seed: u64) -> Result<Vec<LabeledClip>> {
    match cfg.kind {
        DatasetKind::Synthetic => {
            let synth = cfg.synth.to_core(run_seed);
            Ok(gen_dataset(cfg.n_clips, &synth, synth.seed)?)
        }
        DatasetKind::Vclip => {
            let dir = cfg
                .path
                .as_deref()
                .ok_or_else(|| Error::Config("a vclip dataset needs a path".into()))?;
            load_labeled_dir(dir)
        }
    }
}

/// Loads or generates a dataset and converts it to flow samples.
pub fn load_samples(cfg: &DatasetConfig, flow: &FlowConfig, run_seed: u64) -> Result<Vec<Sample>> {
    let clips = load_clips(cfg, run_seed)?;
    to_samples(&clips, cfg.standard_frames(), cfg.resize, flow)
}
