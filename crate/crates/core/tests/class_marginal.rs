//! Single flow frames carry no class information: the mean flow direction of
//! one frame pair is uniform over the dataset for both labels.

use std::f64::consts::PI;

use flowcnn_core::flow::{lucas_kanade, FlowConfig};
use flowcnn_core::synth::{gen_dataset, SynthConfig};
use flowcnn_core::video::to_grayscale;

const BINS: usize = 8;
/// Upper 1% point of chi-square with 7 degrees of freedom.
const CHI2_CRIT_P01_DF7: f64 = 18.475;

fn chi_square(counts: &[usize; BINS]) -> f64 {
    let total: usize = counts.iter().sum();
    let expected = total as f64 / BINS as f64;
    counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn chi_square_statistic_by_hand() {
    assert_eq!(chi_square(&[5; BINS]), 0.0);
    // (15-10)^2/10 + (5-10)^2/10 = 5
    assert!((chi_square(&[15, 5, 10, 10, 10, 10, 10, 10]) - 5.0).abs() < 1e-12);
}

#[test]
fn single_frame_direction_is_uniform_per_class() {
    let cfg = SynthConfig::default();
    let flow_cfg = FlowConfig::default();
    let data = gen_dataset(200, &cfg, 2024).unwrap();
    // one frame pair per clip keeps the observations independent
    let t = (cfg.frames - 1) / 2;
    let mut counts = [[0usize; BINS]; 2];
    for c in &data {
        let a = to_grayscale(&c.clip, t).unwrap();
        let b = to_grayscale(&c.clip, t + 1).unwrap();
        let (u, v) = lucas_kanade(&a, &b, &flow_cfg).unwrap().interior_mean(3);
        let angle = v.atan2(u).rem_euclid(2.0 * PI);
        let bin = ((angle / (2.0 * PI / BINS as f64)) as usize).min(BINS - 1);
        counts[c.label as usize][bin] += 1;
    }
    for (label, hist) in counts.iter().enumerate() {
        assert_eq!(hist.iter().sum::<usize>(), 100);
        let stat = chi_square(hist);
        println!("label {label}: bins {hist:?}, chi2 {stat:.3}");
        assert!(stat < CHI2_CRIT_P01_DF7, "label {label} direction histogram {hist:?} has chi2 {stat}");
    }
}
