//! Repeats the 120-clip temporal-depth experiment over several seeds and
//! reports stabilized validation accuracy per depth.
//!
//! `cargo run --release --example depth_survey -- --seeds 0,1,2 --depths 1,3`

use clap::Parser;
use flowcnn::config::TrainSettings;
use flowcnn::flowcnn_core::flow::{clip_to_flow, FlowConfig};
use flowcnn::flowcnn_core::synth::{gen_dataset, SynthConfig};
use flowcnn::flowcnn_core::train::{split_dataset, Sample};
use flowcnn::sweep::{run_depth, stabilized_val_acc};

#[derive(Parser)]
struct Args {
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
    seeds: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1,3")]
    depths: Vec<usize>,
    #[arg(long, default_value_t = 120)]
    clips: usize,
    /// Adam step size; the training default when absent.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
}

fn main() {
    let args = Args::parse();
    let flow_cfg = FlowConfig::default();
    let mut totals = vec![0.0; args.depths.len()];
    for &seed in &args.seeds {
        let data = gen_dataset(args.clips, &SynthConfig::default(), seed).unwrap();
        let samples: Vec<Sample> = data
            .iter()
            .map(|c| Sample {
                input: clip_to_flow(&c.clip, &flow_cfg).unwrap(),
                label: c.label,
            })
            .collect();
        let (train_set, test_set) = split_dataset(&samples, 0.2, seed).unwrap();
        let mut base = TrainSettings {
            seed,
            ..TrainSettings::default()
        };
        if let Some(lr) = args.lr {
            base.adam.alpha = lr;
        }
        if let Some(b) = args.batch_size {
            base.batch_size = b;
        }
        let mut line = format!("seed {seed:>3}:");
        for (total, &n) in totals.iter_mut().zip(&args.depths) {
            let run = run_depth(n, &train_set, &test_set, &base).unwrap();
            let s = stabilized_val_acc(&run.history);
            *total += s;
            line += &format!("  N={n} {s:.3}");
        }
        println!("{line}");
    }
    let k = args.seeds.len() as f64;
    let means: Vec<String> = args.depths.iter().zip(&totals).map(|(n, t)| format!("N={n} {:.3}", t / k)).collect();
    println!("mean: {}", means.join("  "));
}
