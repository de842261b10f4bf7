use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flowcnn::clipio::{frame_name, load_clip, to_byte};
use flowcnn::config::{DatasetKind, SweepConfig};
use flowcnn::dataset::{flow_clip, load_samples, standardize, write_labeled_dir};
use flowcnn::flowcnn_core::synth::gen_dataset;
use flowcnn::flowcnn_core::train::{evaluate, split_dataset};
use flowcnn::kernels::export_kernel_slices;
use flowcnn::ppm::{self, Image};
use flowcnn::sweep::{run_sweep, summarize, SweepReport};
use flowcnn::{checkpoint, Error, Result};

/// Optical-flow 3D CNN experiments on temporal kernel depth.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as .vclip files plus labels.csv.
    Synth(SynthArgs),
    /// Write the color-encoded optical flow of one clip as PPM frames.
    Flow(FlowArgs),
    /// Train a single temporal depth and write its outputs.
    Train(TrainArgs),
    /// Train every configured depth on a shared split.
    Sweep(SweepArgs),
    /// Evaluate a checkpoint on a dataset.
    Eval(EvalArgs),
    /// Export kernel slice images from a checkpoint.
    Kernels(KernelsArgs),
}

/// Overrides applied on top of the JSON configuration.
#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory of .vclip files with labels.csv; synthetic data otherwise.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Number of synthetic clips.
    #[arg(long)]
    n_clips: Option<usize>,
    /// Frames kept per clip (center crop).
    #[arg(long)]
    frames: Option<usize>,
    /// Quarter-resize frames before computing flow.
    #[arg(long)]
    resize: bool,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Adam step size.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    split_frac: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Flow magnitude mapped to full color intensity.
    #[arg(long)]
    v_max: Option<f64>,
    /// Lucas-Kanade window side.
    #[arg(long)]
    window: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self, seed: Option<u64>) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig::default(),
        };
        if let Some(dir) = &self.data {
            cfg.dataset.kind = DatasetKind::Vclip;
            cfg.dataset.path = Some(dir.clone());
        }
        set(&mut cfg.dataset.n_clips, self.n_clips);
        if self.frames.is_some() {
            cfg.dataset.frames = self.frames;
        }
        cfg.dataset.resize |= self.resize;
        set(&mut cfg.base.epochs, self.epochs);
        set(&mut cfg.base.batch_size, self.batch_size);
        set(&mut cfg.base.adam.alpha, self.lr);
        set(&mut cfg.base.split_frac, self.split_frac);
        set(&mut cfg.base.threshold, self.threshold);
        set(&mut cfg.base.seed, seed);
        set(&mut cfg.flow.v_max, self.v_max);
        set(&mut cfg.flow.window, self.window);
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Number of clips (even).
    #[arg(long, default_value_t = 120)]
    n: usize,
    /// JSON configuration; its dataset.synth section is used.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    n_blobs: Option<usize>,
    #[arg(long)]
    speed: Option<f64>,
    #[arg(long)]
    reversal_period: Option<usize>,
    #[arg(long)]
    noise_sigma: Option<f64>,
}

#[derive(Args)]
struct FlowArgs {
    /// Frame directory or .vclip file.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for frame_%04d.ppm flow images.
    #[arg(long)]
    out: PathBuf,
    /// Center-crop to this many frames first.
    #[arg(long)]
    frames: Option<usize>,
    /// Quarter-resize before computing flow.
    #[arg(long)]
    resize: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    v_max: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    /// Temporal kernel depth.
    #[arg(long)]
    n_frames: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Master seed; required so every sweep is reproducible.
    #[arg(long)]
    seed: u64,
    /// Comma-separated temporal depths.
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Seed of the split; with --all the whole dataset is scored instead.
    #[arg(long)]
    seed: Option<u64>,
    /// Score every clip rather than the held-out split.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args)]
struct KernelsArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn synth(args: &SynthArgs) -> Result<()> {
    let mut settings = match &args.config {
        Some(path) => SweepConfig::load(path)?.dataset.synth,
        None => Default::default(),
    };
    set(&mut settings.frames, args.frames);
    set(&mut settings.height, args.height);
    set(&mut settings.width, args.width);
    set(&mut settings.n_blobs, args.n_blobs);
    set(&mut settings.speed, args.speed);
    set(&mut settings.reversal_period, args.reversal_period);
    set(&mut settings.noise_sigma, args.noise_sigma);
    settings.seed = Some(args.seed);
    let cfg = settings.to_core(args.seed);
    let clips = gen_dataset(args.n, &cfg, cfg.seed)?;
    write_labeled_dir(&clips, &args.out)?;
    println!("wrote {} clips to {}", clips.len(), args.out.display());
    Ok(())
}

fn flow(args: &FlowArgs) -> Result<()> {
    let mut flow = match &args.config {
        Some(path) => SweepConfig::load(path)?.flow,
        None => Default::default(),
    };
    set(&mut flow.v_max, args.v_max);
    set(&mut flow.window, args.window);
    let clip = load_clip(&args.input)?;
    let clip = standardize(&clip, args.frames.unwrap_or(clip.frames()), args.resize)?;
    let encoded = flow_clip(&clip, &flow.to_core())?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    for d in 0..encoded.depth() {
        let data = encoded.frame_rgb(d).into_iter().map(to_byte).collect();
        let img = Image {
            width: encoded.width(),
            height: encoded.height(),
            data,
        };
        ppm::write(&args.out.join(frame_name(d)), &img)?;
    }
    println!("wrote {} flow frames to {}", encoded.depth(), args.out.display());
    Ok(())
}

fn print_summary(report: &SweepReport, out: &Path) {
    println!("train {} / test {} clips", report.train_size, report.test_size);
    println!("N\tpeak\tstabilized\ttest");
    for row in summarize(report) {
        println!(
            "{}\t{:.4}\t{:.4}\t{:.4}",
            row.n_frames, row.peak_val_acc, row.stabilized_val_acc, row.test_acc
        );
    }
    println!("outputs in {}", out.display());
}

fn train_cmd(args: &TrainArgs) -> Result<()> {
    let mut cfg = args.cfg.resolve(args.seed)?;
    set(&mut cfg.base.n_frames, args.n_frames);
    cfg.n_values = vec![cfg.base.n_frames];
    set(&mut cfg.out_dir, args.out.clone());
    let report = run_sweep(&cfg)?;
    print_summary(&report, &cfg.out_dir);
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let mut cfg = args.cfg.resolve(Some(args.seed))?;
    set(&mut cfg.n_values, args.n_values.clone());
    set(&mut cfg.out_dir, args.out.clone());
    let report = run_sweep(&cfg)?;
    print_summary(&report, &cfg.out_dir);
    Ok(())
}

fn eval(args: &EvalArgs) -> Result<()> {
    let cfg = args.cfg.resolve(args.seed)?;
    cfg.validate()?;
    let params = checkpoint::load(&args.checkpoint)?;
    let samples = load_samples(&cfg.dataset, &cfg.flow.to_core(), cfg.base.seed)?;
    let set = if args.all {
        samples
    } else {
        split_dataset(&samples, cfg.base.split_frac, cfg.base.seed)?.1
    };
    let (acc, cm) = evaluate(&params, &set, cfg.base.threshold)?;
    println!("clips {}", set.len());
    println!("accuracy {acc:.6}");
    println!("tp,fp,fn,tn\n{},{},{},{}", cm.tp, cm.fp, cm.fn_, cm.tn);
    Ok(())
}

fn kernels(args: &KernelsArgs) -> Result<()> {
    let params = checkpoint::load(&args.checkpoint)?;
    let written = export_kernel_slices(&params, &args.out)?;
    println!("wrote {} kernel slices to {}", written.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Flow(a) => flow(a),
        Command::Train(a) => train_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Eval(a) => eval(a),
        Command::Kernels(a) => kernels(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
