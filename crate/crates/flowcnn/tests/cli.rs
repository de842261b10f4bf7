use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn flowcnn(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowcnn"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn count(dir: &Path, ext: &str) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == ext))
        .count()
}

const SMALL_DATA: [&str; 8] = ["synth", "--out", "data", "--seed", "3", "--n", "8", "--frames=8"];
const SMALL_RUN: [&str; 6] = ["--data", "data", "--frames", "8", "--epochs", "2"];

#[test]
fn full_workflow() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&flowcnn(&SMALL_DATA, dir)), 0);
    assert_eq!(count(&dir.join("data"), "vclip"), 8);
    let labels = fs::read_to_string(dir.join("data/labels.csv")).unwrap();
    assert_eq!(labels.lines().next(), Some("filename,label"));
    assert_eq!(labels.lines().filter(|l| l.ends_with(",1")).count(), 4);

    let out = flowcnn(&["flow", "--input", "data/clip_0000.vclip", "--out", "flow"], dir);
    assert_eq!(code(&out), 0);
    assert_eq!(count(&dir.join("flow"), "ppm"), 7);

    let mut sweep = vec!["sweep", "--seed", "1", "--n-values", "1,2", "--out", "sweep"];
    sweep.extend(SMALL_RUN);
    let out = flowcnn(&sweep, dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["metrics_N1.csv", "metrics_N2.csv", "curve_N2.svg", "confusion_N1.csv", "summary.csv", "model_N2.vcnn"] {
        assert!(dir.join("sweep").join(name).is_file(), "{name}");
    }
    assert_eq!(count(&dir.join("sweep/kernels_N2"), "ppm"), 12);

    let mut eval = vec!["eval", "--checkpoint", "sweep/model_N2.vcnn", "--seed", "1"];
    eval.extend(SMALL_RUN);
    let out = flowcnn(&eval, dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("clips 2"), "{text}");
    assert!(text.contains("tp,fp,fn,tn"));

    let out = flowcnn(&["kernels", "--checkpoint", "sweep/model_N1.vcnn", "--out", "k"], dir);
    assert_eq!(code(&out), 0);
    assert_eq!(count(&dir.join("k"), "ppm"), 6);
    // slices come from the checkpoint, so they match the sweep's export
    assert_eq!(
        fs::read(dir.join("k/kernel_f3_t0.ppm")).unwrap(),
        fs::read(dir.join("sweep/kernels_N1/kernel_f3_t0.ppm")).unwrap()
    );

    let mut train = vec!["train", "--n-frames", "3", "--seed", "2", "--out", "single"];
    train.extend(SMALL_RUN);
    assert_eq!(code(&flowcnn(&train, dir)), 0);
    assert!(dir.join("single/metrics_N3.csv").is_file());
    assert_eq!(count(&dir.join("single/kernels_N3"), "ppm"), 18);
}

#[test]
fn config_file_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&flowcnn(&SMALL_DATA, dir)), 0);
    fs::write(
        dir.join("cfg.json"),
        r#"{"n_values": [2], "dataset": {"kind": "vclip", "path": "data", "frames": 8}, "base": {"epochs": 5}}"#,
    )
    .unwrap();
    let out = flowcnn(&["sweep", "--config", "cfg.json", "--seed", "4", "--epochs", "3", "--out", "o"], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = fs::read_to_string(dir.join("o/metrics_N2.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 4);
    let echo = fs::read_to_string(dir.join("o/config.json")).unwrap();
    assert!(echo.contains("\"seed\": 4"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // sweep refuses to run without an explicit seed
    assert_eq!(code(&flowcnn(&["sweep"], dir)), 2);
    fs::write(dir.join("bad.json"), r#"{"n_values": "three"}"#).unwrap();
    assert_eq!(code(&flowcnn(&["sweep", "--seed", "1", "--config", "bad.json"], dir)), 2);
    assert_eq!(code(&flowcnn(&["sweep", "--seed", "1", "--split-frac", "1.5"], dir)), 2);
    assert_eq!(code(&flowcnn(&["sweep", "--seed", "1", "--data", "missing"], dir)), 3);
    assert_eq!(code(&flowcnn(&["kernels", "--checkpoint", "missing.vcnn", "--out", "k"], dir)), 3);

    assert_eq!(code(&flowcnn(&SMALL_DATA, dir)), 0);
    let mut too_deep = vec!["sweep", "--seed", "1", "--n-values", "9", "--out", "o"];
    too_deep.extend(SMALL_RUN);
    assert_eq!(code(&flowcnn(&too_deep, dir)), 2);
    let mut diverge = vec!["sweep", "--seed", "1", "--n-values", "1", "--lr", "1e30", "--out", "o"];
    diverge.extend(SMALL_RUN);
    let out = flowcnn(&diverge, dir);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.join("o").exists());
}
