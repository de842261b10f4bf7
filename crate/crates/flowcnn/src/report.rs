//! CSV and SVG renderings of sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use flowcnn_core::train::{ConfusionMatrix, EpochMetrics};

use crate::sweep::{summarize, SummaryRow, SweepReport};
use crate::{Error, Result};

pub const METRICS_HEADER: &str = "epoch,train_loss,train_acc,val_loss,val_acc";
pub const CONFUSION_HEADER: &str = "tp,fp,fn,tn";
pub const SUMMARY_HEADER: &str = "n_frames,peak_val_acc,stabilized_val_acc,test_acc";

pub fn metrics_csv(history: &[EpochMetrics]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for m in history {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            m.epoch, m.train_loss, m.train_acc, m.val_loss, m.val_acc
        )
        .unwrap();
    }
    out
}

pub fn confusion_csv(cm: &ConfusionMatrix) -> String {
    format!("{CONFUSION_HEADER}\n{},{},{},{}\n", cm.tp, cm.fp, cm.fn_, cm.tn)
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6}",
            r.n_frames, r.peak_val_acc, r.stabilized_val_acc, r.test_acc
        )
        .unwrap();
    }
    out
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Accuracy-vs-epoch chart with one polyline for training and one for
/// validation accuracy.
pub fn curve_svg(n_frames: usize, history: &[EpochMetrics]) -> String {
    let (plot_w, plot_h) = (SVG_W - 2.0 * MARGIN, SVG_H - 2.0 * MARGIN);
    let last = history.len().max(2) as f64;
    let x = |epoch: usize| MARGIN + (epoch as f64 - 1.0) / (last - 1.0) * plot_w;
    let y = |acc: f64| MARGIN + (1.0 - acc) * plot_h;
    let points = |acc: fn(&EpochMetrics) -> f64| {
        history
            .iter()
            .map(|m| format!("{:.2},{:.2}", x(m.epoch), y(acc(m))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{SVG_W}" height="{SVG_H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="25" text-anchor="middle" font-size="14">Accuracy vs epoch, N = {n_frames}</text>"#,
        SVG_W / 2.0
    )
    .unwrap();
    for tick in 0..=4 {
        let acc = tick as f64 / 4.0;
        writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#ddd"/><text x="{2}" y="{3:.2}" text-anchor="end">{acc:.2}</text>"##,
            y(acc),
            SVG_W - MARGIN,
            MARGIN - 6.0,
            y(acc) + 4.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/><line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{0}" stroke="black"/>"#,
        SVG_H - MARGIN,
        SVG_W - MARGIN
    )
    .unwrap();
    for m in history {
        writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x(m.epoch),
            SVG_H - MARGIN + 16.0,
            m.epoch
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">epoch</text>"#,
        SVG_W / 2.0,
        SVG_H - 10.0
    )
    .unwrap();
    writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##,
        points(|m| m.train_acc)
    )
    .unwrap();
    writeln!(
        s,
        r##"<polyline fill="none" stroke="#ff7f0e" stroke-width="2" points="{}"/>"##,
        points(|m| m.val_acc)
    )
    .unwrap();
    let legend_x = SVG_W - MARGIN - 110.0;
    writeln!(
        s,
        r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#1f77b4" stroke-width="2"/><text x="{3}" y="{4}">train</text>"##,
        legend_x,
        MARGIN + 10.0,
        legend_x + 20.0,
        legend_x + 26.0,
        MARGIN + 14.0
    )
    .unwrap();
    writeln!(
        s,
        r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#ff7f0e" stroke-width="2"/><text x="{3}" y="{4}">validation</text>"##,
        legend_x,
        MARGIN + 28.0,
        legend_x + 20.0,
        legend_x + 26.0,
        MARGIN + 32.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn metrics_file_name(n: usize) -> String {
    format!("metrics_N{n}.csv")
}

pub fn curve_file_name(n: usize) -> String {
    format!("curve_N{n}.svg")
}

pub fn confusion_file_name(n: usize) -> String {
    format!("confusion_N{n}.csv")
}

pub const SUMMARY_FILE: &str = "summary.csv";

pub(crate) fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).map_err(Error::io(path))?;
    Ok(path.to_path_buf())
}

/// Writes per-N metrics, curve and confusion files plus `summary.csv`;
/// returns the paths written.
pub fn emit_curves(report: &SweepReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    let mut written = Vec::new();
    for run in &report.runs {
        let n = run.n_frames;
        written.push(write_text(&out_dir.join(metrics_file_name(n)), &metrics_csv(&run.history))?);
        written.push(write_text(&out_dir.join(curve_file_name(n)), &curve_svg(n, &run.history))?);
        written.push(write_text(&out_dir.join(confusion_file_name(n)), &confusion_csv(&run.confusion))?);
    }
    written.push(write_text(&out_dir.join(SUMMARY_FILE), &summary_csv(&summarize(report)))?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn history(accs: &[f64]) -> Vec<EpochMetrics> {
        accs.iter()
            .enumerate()
            .map(|(i, &a)| EpochMetrics {
                epoch: i + 1,
                train_loss: 0.5,
                train_acc: a,
                val_loss: 0.25,
                val_acc: a / 2.0,
            })
            .collect()
    }

    #[test]
    fn metrics_rows() {
        let csv = metrics_csv(&history(&[0.5, 0.75]));
        assert_eq!(
            csv,
            "epoch,train_loss,train_acc,val_loss,val_acc\n1,0.500000,0.500000,0.250000,0.250000\n2,0.500000,0.750000,0.250000,0.375000\n"
        );
    }

    #[test]
    fn confusion_row() {
        let cm = ConfusionMatrix { tp: 1, fp: 2, fn_: 3, tn: 4 };
        assert_eq!(confusion_csv(&cm), "tp,fp,fn,tn\n1,2,3,4\n");
    }

    #[test]
    fn svg_has_two_series() {
        let svg = curve_svg(3, &history(&[0.1, 0.5, 0.9]));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        // final train point sits at the right edge, 0.9 of the way up
        assert!(svg.contains("590.00,80.00"));
    }

    #[test]
    fn svg_single_epoch() {
        let svg = curve_svg(1, &history(&[1.0]));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(!svg.contains("NaN"));
    }
}
