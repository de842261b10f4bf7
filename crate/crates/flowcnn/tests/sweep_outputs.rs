use std::fs;
use std::path::Path;

use flowcnn::config::SweepConfig;
use flowcnn::report::{confusion_file_name, metrics_file_name, SUMMARY_FILE};
use flowcnn::sweep::{kernels_dir_name, run_sweep, summarize};

fn small_config(out: &Path) -> SweepConfig {
    let mut cfg = SweepConfig::default();
    cfg.n_values = vec![3, 1, 2];
    cfg.dataset.n_clips = 20;
    cfg.dataset.synth.frames = 10;
    cfg.base.epochs = 4;
    cfg.base.seed = 17;
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect()
}

#[test]
fn runs_are_ascending_and_share_the_split() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_sweep(&small_config(dir.path())).unwrap();
    let depths: Vec<usize> = report.runs.iter().map(|r| r.n_frames).collect();
    assert_eq!(depths, vec![1, 2, 3]);
    assert_eq!((report.train_size, report.test_size), (16, 4));
    for run in &report.runs {
        assert_eq!(run.history.len(), 4);
        assert_eq!(run.confusion.total(), report.test_size);
        // same test membership: positives in the test set do not depend on N
        assert_eq!(run.confusion.tp + run.confusion.fn_, 2);
    }
}

#[test]
fn summary_peak_matches_metrics_column() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_sweep(&small_config(dir.path())).unwrap();
    let summary = read_csv(&dir.path().join(SUMMARY_FILE));
    assert_eq!(summary.len(), 3);
    for (row, expected) in summary.iter().zip(summarize(&report)) {
        let n: usize = row[0].parse().unwrap();
        let metrics = read_csv(&dir.path().join(metrics_file_name(n)));
        let peak = metrics.iter().map(|m| m[4].parse::<f64>().unwrap()).fold(f64::MIN, f64::max);
        assert_eq!(row[1].parse::<f64>().unwrap(), peak);
        assert!((peak - expected.peak_val_acc).abs() <= 5e-7);
        let history = &report.runs.iter().find(|r| r.n_frames == n).unwrap().history;
        for (m, h) in metrics.iter().zip(history) {
            assert!((m[2].parse::<f64>().unwrap() - h.train_acc).abs() <= 5e-7);
            assert!((m[4].parse::<f64>().unwrap() - h.val_acc).abs() <= 5e-7);
        }
        let cm = read_csv(&dir.path().join(confusion_file_name(n)));
        let total: usize = cm[0].iter().map(|v| v.parse::<usize>().unwrap()).sum();
        assert_eq!(total, report.test_size);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_sweep(&small_config(&a)).unwrap();
    run_sweep(&small_config(&b)).unwrap();
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 10);
    for name in names {
        let (pa, pb) = (a.join(&name), b.join(&name));
        if pa.is_dir() {
            for e in fs::read_dir(&pa).unwrap() {
                let f = e.unwrap().file_name();
                assert_eq!(fs::read(pa.join(&f)).unwrap(), fs::read(pb.join(&f)).unwrap());
            }
        } else {
            assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap(), "{name:?}");
        }
    }
}

#[test]
fn failed_write_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    fs::create_dir(&out).unwrap();
    // a file where the N=2 kernel directory should go
    fs::write(out.join(kernels_dir_name(2)), "blocker").unwrap();
    assert!(run_sweep(&small_config(&out)).is_err());
    let left: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, vec![std::ffi::OsString::from(kernels_dir_name(2))]);
}

#[test]
fn depth_too_large_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(&dir.path().join("out"));
    cfg.n_values = vec![1, 9];
    let err = run_sweep(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(!dir.path().join("out").exists());
}
