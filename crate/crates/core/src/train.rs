//! Stratified splitting, mini-batch Adam training and evaluation.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::flow::FlowClip;
use crate::model::{forward_pooled, loss_and_grads, pool_input, probability, ModelParams, ParamGrads};
use crate::nn::{adam_step, sigmoid_bce, AdamHyper, AdamState};
use crate::seed::{self, tag};
use crate::synth::LabeledClip;
use crate::{Error, Result, Tensor};

/// A color-encoded flow clip with its binary label.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: FlowClip,
    pub label: u8,
}

pub trait Labeled {
    fn label(&self) -> u8;
}

impl Labeled for Sample {
    fn label(&self) -> u8 {
        self.label
    }
}

impl Labeled for LabeledClip {
    fn label(&self) -> u8 {
        self.label
    }
}

impl Labeled for u8 {
    fn label(&self) -> u8 {
        *self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub n_frames: usize,
    pub epochs: usize,
    pub batch_size: usize,
    /// Fraction of each class held out for testing.
    pub split_frac: f64,
    pub seed: u64,
    /// Probabilities strictly above this predict class 1.
    pub threshold: f64,
    pub adam: AdamHyper,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_frames: 3,
            epochs: 20,
            batch_size: 8,
            split_frac: 0.2,
            seed: 0,
            threshold: 0.5,
            adam: AdamHyper {
                alpha: 3e-3,
                ..AdamHyper::default()
            },
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_frames == 0 {
            return Err(Error::ConfigInvalid("n_frames must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(Error::ConfigInvalid("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::ConfigInvalid("batch_size must be at least 1"));
        }
        if !(self.split_frac > 0.0 && self.split_frac < 1.0) {
            return Err(Error::ConfigInvalid("split_frac must lie in (0, 1)"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::ConfigInvalid("threshold must lie in (0, 1)"));
        }
        self.adam.validate()
    }
}

/// Binary confusion counts; the positive class is 1 (fight-like).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted: u8, label: u8) {
        match (predicted, label) {
            (1, 1) => self.tp += 1,
            (1, _) => self.fp += 1,
            (_, 1) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / self.total() as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    /// 1-based epoch number.
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
}

/// Class 1 iff the probability is strictly above `threshold`.
pub fn predict(probability: f64, threshold: f64) -> u8 {
    u8::from(probability > threshold)
}

/// Confusion matrix of `(probability, label)` pairs at a threshold.
pub fn confusion(scored: &[(f64, u8)], threshold: f64) -> Result<(f64, ConfusionMatrix)> {
    if scored.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut cm = ConfusionMatrix::default();
    for &(p, label) in scored {
        cm.record(predict(p, threshold), label);
    }
    Ok((cm.accuracy(), cm))
}

/// Stratified split into `(train, test)` index lists, both ascending.
///
/// The test side holds `round(split_frac * len)` items. Each class gets
/// `floor(split_frac * class_count)` of them, and any remaining slots go to
/// the classes with the largest fractional quota (class 1 first on ties),
/// so exact quotas such as 20% of 100 are met per class. Members of each
/// class are chosen by an independent seed-derived shuffle.
pub fn split_indices<L: Labeled>(data: &[L], split_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(split_frac > 0.0 && split_frac < 1.0) {
        return Err(Error::ConfigInvalid("split_frac must lie in (0, 1)"));
    }
    let split_seed = seed::derive(seed, tag::SPLIT);
    let classes = [1u8, 0u8].map(|class| {
        let members: Vec<usize> = (0..data.len()).filter(|&i| data[i].label() == class).collect();
        let quota = split_frac * members.len() as f64;
        (class, members, quota)
    });
    if classes.iter().any(|(_, m, _)| m.is_empty()) {
        return Err(Error::ClassMissing);
    }
    let total_test = libm::round(split_frac * data.len() as f64) as usize;
    let mut n_test = classes.each_ref().map(|(_, _, q)| libm::floor(*q) as usize);
    let mut spare = total_test.saturating_sub(n_test.iter().sum());
    let mut by_remainder = [0usize, 1];
    // stable sort keeps class 1 ahead on equal remainders
    by_remainder.sort_by(|&a, &b| {
        let frac = |k: usize| classes[k].2 - libm::floor(classes[k].2);
        frac(b).partial_cmp(&frac(a)).unwrap_or(core::cmp::Ordering::Equal)
    });
    for k in by_remainder {
        if spare > 0 && n_test[k] < classes[k].1.len() {
            n_test[k] += 1;
            spare -= 1;
        }
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for ((class, mut members, _), n) in classes.into_iter().zip(n_test) {
        members.shuffle(&mut seed::rng(seed::derive(split_seed, class as u64)));
        test.extend_from_slice(&members[..n]);
        train.extend_from_slice(&members[n..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_dataset<L: Labeled + Clone>(data: &[L], split_frac: f64, seed: u64) -> Result<(Vec<L>, Vec<L>)> {
    let (train, test) = split_indices(data, split_frac, seed)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| data[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

struct Prepared {
    pooled: Tensor<f32>,
    label: u8,
}

fn prepare(params: &ModelParams, set: &[Sample]) -> Result<Vec<Prepared>> {
    set.iter()
        .map(|s| {
            Ok(Prepared {
                pooled: pool_input(params, s.input.tensor())?,
                label: s.label,
            })
        })
        .collect()
}

/// Mean loss, accuracy and confusion matrix over prepared samples.
fn measure(params: &ModelParams, set: &[Prepared], threshold: f64) -> Result<(f64, f64, ConfusionMatrix)> {
    let mut loss = 0.0;
    let mut scored = Vec::with_capacity(set.len());
    for s in set {
        let z = forward_pooled(params, &s.pooled)?.logit as f64;
        loss += sigmoid_bce(z, s.label).0;
        scored.push((probability(z), s.label));
    }
    let (acc, cm) = confusion(&scored, threshold)?;
    let loss = loss / set.len() as f64;
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss);
    }
    Ok((loss, acc, cm))
}

pub fn evaluate(params: &ModelParams, set: &[Sample], threshold: f64) -> Result<(f64, ConfusionMatrix)> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let (_, acc, cm) = measure(params, &prepare(params, set)?, threshold)?;
    Ok((acc, cm))
}

/// Mean validation loss alongside accuracy and confusion counts.
pub fn evaluate_with_loss(params: &ModelParams, set: &[Sample], threshold: f64) -> Result<(f64, f64, ConfusionMatrix)> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    measure(params, &prepare(params, set)?, threshold)
}

pub fn train(
    params: ModelParams,
    train_set: &[Sample],
    val_set: &[Sample],
    cfg: &TrainConfig,
) -> Result<(ModelParams, Vec<EpochMetrics>)> {
    train_with(params, train_set, val_set, cfg, |_| {})
}

/// Trains for exactly `cfg.epochs` epochs. Each epoch shuffles the training
/// set with a seed-derived permutation, averages gradients over each
/// mini-batch (the last one may be short) and takes one Adam step per batch.
/// Train and validation metrics are measured with the end-of-epoch weights;
/// `on_epoch` sees each row as it is produced.
pub fn train_with(
    mut params: ModelParams,
    train_set: &[Sample],
    val_set: &[Sample],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<(ModelParams, Vec<EpochMetrics>)> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::EmptySet);
    }
    if cfg.n_frames != params.n_frames() {
        return Err(Error::ConfigInvalid("n_frames differs from the model's temporal depth"));
    }
    let train_data = prepare(&params, train_set)?;
    let val_data = prepare(&params, val_set)?;
    let mut adam = AdamState::new(params.tensors());
    let shuffle_seed = seed::derive(cfg.seed, tag::EPOCH_SHUFFLE);
    let mut order: Vec<usize> = (0..train_data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut seed::rng(seed::derive(shuffle_seed, epoch as u64)));
        for batch in order.chunks(cfg.batch_size) {
            let mut total = ParamGrads::zeros_like(&params);
            for &i in batch {
                let (loss, grads) = loss_and_grads(&params, &train_data[i].pooled, train_data[i].label)?;
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss);
                }
                total.accumulate(&grads);
            }
            total.scale(1.0 / batch.len() as f32);
            let grads: [&Tensor; 6] = total.0.each_ref();
            adam_step(&mut params.tensors_mut(), &grads, &mut adam, &cfg.adam)?;
        }
        if !params.all_finite() {
            return Err(Error::NonFiniteLoss);
        }
        let (train_loss, train_acc, _) = measure(&params, &train_data, cfg.threshold)?;
        let (val_loss, val_acc, _) = measure(&params, &val_data, cfg.threshold)?;
        let row = EpochMetrics {
            epoch,
            train_loss,
            train_acc,
            val_loss,
            val_acc,
        };
        on_epoch(&row);
        history.push(row);
    }
    Ok((params, history))
}
