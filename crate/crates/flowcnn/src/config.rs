//! JSON configuration. Field names follow the core configuration types;
//! every field is optional and falls back to the core defaults.

use std::fs;
use std::path::{Path, PathBuf};

use flowcnn_core::flow::FlowConfig;
use flowcnn_core::nn::AdamHyper;
use flowcnn_core::synth::SynthConfig;
use flowcnn_core::train::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamSettings {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamSettings {
    fn default() -> Self {
        TrainConfig::default().adam.into()
    }
}

impl From<AdamHyper> for AdamSettings {
    fn from(h: AdamHyper) -> Self {
        AdamSettings {
            alpha: h.alpha,
            beta1: h.beta1,
            beta2: h.beta2,
            epsilon: h.epsilon,
        }
    }
}

impl From<AdamSettings> for AdamHyper {
    fn from(s: AdamSettings) -> Self {
        AdamHyper {
            alpha: s.alpha,
            beta1: s.beta1,
            beta2: s.beta2,
            epsilon: s.epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub n_frames: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub split_frac: f64,
    pub seed: u64,
    pub threshold: f64,
    pub adam: AdamSettings,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let c = TrainConfig::default();
        TrainSettings {
            n_frames: c.n_frames,
            epochs: c.epochs,
            batch_size: c.batch_size,
            split_frac: c.split_frac,
            seed: c.seed,
            threshold: c.threshold,
            adam: c.adam.into(),
        }
    }
}

impl TrainSettings {
    pub fn to_core(&self) -> TrainConfig {
        TrainConfig {
            n_frames: self.n_frames,
            epochs: self.epochs,
            batch_size: self.batch_size,
            split_frac: self.split_frac,
            seed: self.seed,
            threshold: self.threshold,
            adam: self.adam.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSettings {
    pub window: usize,
    pub det_epsilon: f64,
    pub v_max: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        let c = FlowConfig::default();
        FlowSettings {
            window: c.window,
            det_epsilon: c.det_epsilon,
            v_max: c.v_max,
        }
    }
}

impl FlowSettings {
    pub fn to_core(&self) -> FlowConfig {
        FlowConfig {
            window: self.window,
            det_epsilon: self.det_epsilon,
            v_max: self.v_max,
        }
    }
}

/// Synthetic generator settings. Without an explicit `seed` the dataset is
/// drawn from the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSettings {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub n_blobs: usize,
    pub speed: f64,
    pub reversal_period: usize,
    pub noise_sigma: f64,
    pub seed: Option<u64>,
}

impl Default for SynthSettings {
    fn default() -> Self {
        let c = SynthConfig::default();
        SynthSettings {
            frames: c.frames,
            height: c.height,
            width: c.width,
            n_blobs: c.n_blobs,
            speed: c.speed,
            reversal_period: c.reversal_period,
            noise_sigma: c.noise_sigma,
            seed: None,
        }
    }
}

impl SynthSettings {
    pub fn to_core(&self, run_seed: u64) -> SynthConfig {
        SynthConfig {
            frames: self.frames,
            height: self.height,
            width: self.width,
            n_blobs: self.n_blobs,
            speed: self.speed,
            reversal_period: self.reversal_period,
            noise_sigma: self.noise_sigma,
            seed: self.seed.unwrap_or(run_seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    #[default]
    Synthetic,
    /// A directory of `.vclip` files with a `labels.csv` index.
    Vclip,
}

/// Frame count clips are center-cropped to for the hockey-style corpus.
pub const VCLIP_FRAMES: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    /// Directory for `vclip` datasets.
    pub path: Option<PathBuf>,
    /// Clip count for synthetic datasets.
    pub n_clips: usize,
    /// Standard frame count; defaults to the synthetic clip length or 40.
    pub frames: Option<usize>,
    /// Quarter-resize frames before computing flow.
    pub resize: bool,
    pub synth: SynthSettings,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            kind: DatasetKind::Synthetic,
            path: None,
            n_clips: 120,
            frames: None,
            resize: false,
            synth: SynthSettings::default(),
        }
    }
}

impl DatasetConfig {
    pub fn standard_frames(&self) -> usize {
        self.frames.unwrap_or(match self.kind {
            DatasetKind::Synthetic => self.synth.frames,
            DatasetKind::Vclip => VCLIP_FRAMES,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub dataset: DatasetConfig,
    pub base: TrainSettings,
    pub flow: FlowSettings,
    pub out_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: vec![1, 2, 3, 10, 20],
            dataset: DatasetConfig::default(),
            base: TrainSettings::default(),
            flow: FlowSettings::default(),
            out_dir: PathBuf::from("sweep_out"),
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Checks everything that can be checked before data is loaded.
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values is empty".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::Config("n_values entries must be at least 1".into()));
        }
        if self.dataset.kind == DatasetKind::Vclip && self.dataset.path.is_none() {
            return Err(Error::Config("a vclip dataset needs a path".into()));
        }
        if self.dataset.standard_frames() < 2 {
            return Err(Error::Config("standard frame count must be at least 2".into()));
        }
        self.flow.to_core().validate()?;
        self.base.to_core().validate()?;
        if self.dataset.kind == DatasetKind::Synthetic {
            self.dataset.synth.to_core(self.base.seed).validate()?;
        }
        Ok(())
    }
}
