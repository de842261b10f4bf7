//! The temporal-depth experiment: one model per kernel depth `N`, all
//! trained and evaluated on the same split.

use std::fs;
use std::path::{Path, PathBuf};

use flowcnn_core::model::{build_model, flat_size, ModelParams};
use flowcnn_core::seed::derive;
use flowcnn_core::train::{evaluate, split_dataset, train, ConfusionMatrix, EpochMetrics, Sample, TrainConfig};
use rayon::prelude::*;

use crate::checkpoint;
use crate::config::{SweepConfig, TrainSettings};
use crate::dataset::load_samples;
use crate::kernels::export_kernel_slices;
use crate::report::{emit_curves, write_text};
use crate::{Error, Result};

/// Epochs averaged for the stabilized accuracy.
pub const STABILIZE_EPOCHS: usize = 5;

const MODEL_SEED_TAG: u64 = 0x6d6f_6465_6c5f_4e00;

/// Initialization seed of the depth-`n` model in a run seeded with `seed`.
pub fn model_seed(seed: u64, n: usize) -> u64 {
    derive(derive(seed, MODEL_SEED_TAG), n as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub n_frames: usize,
    pub history: Vec<EpochMetrics>,
    /// Test-set counts with the final weights.
    pub confusion: ConfusionMatrix,
    pub test_acc: f64,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Ascending in `n_frames`.
    pub runs: Vec<RunResult>,
    pub train_size: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub n_frames: usize,
    pub peak_val_acc: f64,
    pub stabilized_val_acc: f64,
    pub test_acc: f64,
}

pub fn peak_val_acc(history: &[EpochMetrics]) -> f64 {
    history.iter().map(|m| m.val_acc).fold(f64::NEG_INFINITY, f64::max)
}

/// Mean validation accuracy over the final five epochs, or all of them when
/// fewer were run.
pub fn stabilized_val_acc(history: &[EpochMetrics]) -> f64 {
    let tail = &history[history.len().saturating_sub(STABILIZE_EPOCHS)..];
    tail.iter().map(|m| m.val_acc).sum::<f64>() / tail.len() as f64
}

pub fn summarize(report: &SweepReport) -> Vec<SummaryRow> {
    report
        .runs
        .iter()
        .map(|r| SummaryRow {
            n_frames: r.n_frames,
            peak_val_acc: peak_val_acc(&r.history),
            stabilized_val_acc: stabilized_val_acc(&r.history),
            test_acc: r.test_acc,
        })
        .collect()
}

/// Trains and evaluates one depth on a prepared split.
pub fn run_depth(n: usize, train_set: &[Sample], test_set: &[Sample], base: &TrainSettings) -> Result<RunResult> {
    let cfg = TrainConfig {
        n_frames: n,
        ..base.to_core()
    };
    let dims = train_set.first().ok_or(flowcnn_core::Error::EmptySet)?.input.dims();
    let model = build_model(n, dims, model_seed(base.seed, n))?;
    let (params, history) = train(model, train_set, test_set, &cfg)?;
    let (test_acc, confusion) = evaluate(&params, test_set, cfg.threshold)?;
    Ok(RunResult {
        n_frames: n,
        history,
        confusion,
        test_acc,
        params,
    })
}

/// Runs every depth on one shared split of `samples`. Depths are
/// independent and run in parallel; results are ordered by depth.
pub fn run_on_samples(cfg: &SweepConfig, samples: &[Sample]) -> Result<SweepReport> {
    cfg.validate()?;
    let dims = samples.first().ok_or(flowcnn_core::Error::EmptySet)?.input.dims();
    let mut depths = cfg.n_values.clone();
    depths.sort_unstable();
    depths.dedup();
    for &n in &depths {
        flat_size(n, dims).map_err(|e| Error::Config(format!("N = {n} does not fit flow clips of shape {dims:?}: {e}")))?;
    }
    let (train_set, test_set) = split_dataset(samples, cfg.base.split_frac, cfg.base.seed)?;
    let runs = depths
        .par_iter()
        .map(|&n| run_depth(n, &train_set, &test_set, &cfg.base))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        runs,
        train_size: train_set.len(),
        test_size: test_set.len(),
    })
}

pub fn kernels_dir_name(n: usize) -> String {
    format!("kernels_N{n}")
}

pub fn checkpoint_file_name(n: usize) -> String {
    format!("model_N{n}.vcnn")
}

pub const CONFIG_ECHO_FILE: &str = "config.json";

/// Writes curves, confusion matrices, summary, checkpoints, kernel slices
/// and the effective configuration. Returns the files written.
pub fn write_outputs(report: &SweepReport, cfg: &SweepConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let result = write_all(report, cfg, out_dir, &mut written);
    if result.is_err() {
        remove_partial(&written, out_dir);
    }
    result.map(|()| written)
}

fn write_all(report: &SweepReport, cfg: &SweepConfig, out_dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    written.extend(emit_curves(report, out_dir)?);
    for run in &report.runs {
        let ckpt = out_dir.join(checkpoint_file_name(run.n_frames));
        checkpoint::save(&run.params, &ckpt)?;
        written.push(ckpt);
        written.extend(export_kernel_slices(&run.params, &out_dir.join(kernels_dir_name(run.n_frames)))?);
    }
    // the echo names its own directory as "." so outputs do not depend on
    // where they were written
    let echo = SweepConfig {
        out_dir: PathBuf::from("."),
        ..cfg.clone()
    };
    written.push(write_text(&out_dir.join(CONFIG_ECHO_FILE), &echo.to_json())?);
    Ok(())
}

/// Best-effort removal of files from a failed write, then of any directories
/// left empty.
fn remove_partial(written: &[PathBuf], out_dir: &Path) {
    for path in written {
        let _ = fs::remove_file(path);
    }
    let mut dirs: Vec<&Path> = written.iter().filter_map(|p| p.parent()).collect();
    dirs.sort();
    dirs.dedup();
    for dir in dirs.into_iter().rev() {
        let _ = fs::remove_dir(dir);
    }
    let _ = fs::remove_dir(out_dir);
}

/// Loads the dataset, runs every depth and writes all outputs to
/// `cfg.out_dir`. Nothing is left behind when a step fails.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let samples = load_samples(&cfg.dataset, &cfg.flow.to_core(), cfg.base.seed)?;
    let report = run_on_samples(cfg, &samples)?;
    write_outputs(&report, cfg, &cfg.out_dir)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn history(val: &[f64]) -> Vec<EpochMetrics> {
        val.iter()
            .enumerate()
            .map(|(i, &v)| EpochMetrics {
                epoch: i + 1,
                train_loss: 0.0,
                train_acc: 0.0,
                val_loss: 0.0,
                val_acc: v,
            })
            .collect()
    }

    #[test]
    fn constant_accuracy() {
        let h = history(&[0.9; 20]);
        assert_eq!(peak_val_acc(&h), 0.9);
        assert!((stabilized_val_acc(&h) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn linear_ramp() {
        let accs: Vec<f64> = (0..20).map(|i| 0.5 + 0.45 * i as f64 / 19.0).collect();
        let h = history(&accs);
        assert!((peak_val_acc(&h) - 0.95).abs() < 1e-12);
        let expected = accs[15..].iter().sum::<f64>() / 5.0;
        assert!((stabilized_val_acc(&h) - expected).abs() < 1e-12);
        assert!(peak_val_acc(&h) >= stabilized_val_acc(&h));
    }

    #[test]
    fn short_history_uses_every_epoch() {
        let h = history(&[0.2, 0.4]);
        assert!((stabilized_val_acc(&h) - 0.3).abs() < 1e-12);
        assert_eq!(peak_val_acc(&h), 0.4);
    }

    #[test]
    fn model_seeds_differ_by_depth() {
        assert_ne!(model_seed(1, 2), model_seed(1, 3));
        assert_ne!(model_seed(1, 2), model_seed(2, 2));
    }
}
