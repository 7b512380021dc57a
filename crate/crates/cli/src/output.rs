//! Plot-ready files: CSV tables, small static SVG charts and manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hcc_core::eval::AffinityMatrix;
use hcc_core::{MergeHistory, ScreeCurve};
use serde::Serialize;

use crate::error::{CliError, CliResult};

// Order-stable qualitative palette.
const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79",
    "#637939",
];

pub fn cluster_color(id: usize) -> &'static str {
    PALETTE[id % PALETTE.len()]
}

pub fn write_text(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(CliError::io(format!("writing {}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_text(path, &text)
}

/// Channel-by-k cluster labels; columns run from k = n down to 1.
pub fn merge_plot_csv(history: &MergeHistory, labels: &[String]) -> String {
    let table = history.merge_table();
    let mut out = String::from("channel");
    for k in (1..=history.n).rev() {
        let _ = write!(out, ",k{k}");
    }
    out.push('\n');
    for (c, row) in table.iter().enumerate() {
        out.push_str(&labels[c]);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn svg_open(w: f64, h: f64) -> String {
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n")
}

/// Minimum dissimilarity against k, k decreasing left to right.
pub fn scree_svg(scree: &ScreeCurve, title: &str) -> String {
    let (w, h, m) = (480.0, 300.0, 40.0);
    let mut s = svg_open(w, h);
    let n = scree.len().max(1) as f64;
    let x = |i: usize| m + (w - 2.0 * m) * if n > 1.0 { i as f64 / (n - 1.0) } else { 0.5 };
    let y = |d: f64| h - m - (h - 2.0 * m) * d.clamp(0.0, 1.0);
    let _ = writeln!(s, "<text x=\"{m}\" y=\"20\">{}</text>", escape(title));
    let _ = writeln!(s, "<line x1=\"{m}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", h - m, w - m, h - m);
    let _ = writeln!(s, "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{}\" stroke=\"black\"/>", h - m);
    let points: Vec<String> = scree.d.iter().enumerate().map(|(i, d)| format!("{:.2},{:.2}", x(i), y(*d))).collect();
    let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>", PALETTE[0], points.join(" "));
    for (i, (k, d)) in scree.k.iter().zip(&scree.d).enumerate() {
        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"><title>k={k} d={d:.4}</title></circle>", x(i), y(*d), PALETTE[0]);
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">k</text>", w / 2.0, h - 8.0);
    let _ = writeln!(s, "<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">dissimilarity</text>", h / 2.0, h / 2.0);
    s.push_str("</svg>\n");
    s
}

/// Channels (rows) against k (columns, n down to 1), colored by cluster.
pub fn merge_plot_svg(history: &MergeHistory, labels: &[String]) -> String {
    let table = history.merge_table();
    let n = history.n;
    let cell = (360.0 / n as f64).clamp(3.0, 16.0);
    let left = 48.0;
    let (w, h) = (left + cell * n as f64 + 10.0, 20.0 + cell * n as f64 + 10.0);
    let mut s = svg_open(w, h);
    for (c, row) in table.iter().enumerate() {
        if cell >= 8.0 {
            let _ = writeln!(s, "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>", left - 4.0, 20.0 + cell * (c as f64 + 0.8), escape(&labels[c]));
        }
        for (col, id) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"{}\"/>",
                left + cell * col as f64,
                20.0 + cell * c as f64,
                cluster_color(*id)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Grey-scale heatmap of an affinity matrix.
pub fn affinity_svg(a: &AffinityMatrix, title: &str) -> String {
    let n = a.n();
    let cell = (400.0 / n as f64).clamp(3.0, 20.0);
    let (w, h) = (cell * n as f64 + 20.0, cell * n as f64 + 40.0);
    let mut s = svg_open(w, h);
    let _ = writeln!(s, "<text x=\"10\" y=\"20\">{}</text>", escape(title));
    for i in 0..n {
        for j in 0..n {
            let v = (255.0 * (1.0 - a.get(i, j))).round() as u8;
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"rgb({v},{v},{v})\"/>",
                10.0 + cell * j as f64,
                30.0 + cell * i as f64
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use hcc_core::clustering::linkage_cluster;
    use hcc_core::clustering::Linkage;
    use hcc_core::nalgebra::DMatrix;
    use hcc_core::FrequencyBand;

    #[test]
    fn merge_plot_has_one_row_per_channel() {
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, 0.1, 0.9, 1.0, 0.5, 0.1, 0.5, 1.0]);
        let h = linkage_cluster(&c, Linkage::Average, FrequencyBand::new(0.0, 1.0).unwrap()).unwrap();
        let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let csv = merge_plot_csv(&h, &labels);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "channel,k3,k2,k1");
        assert_eq!(lines.len(), 4);
        assert!(merge_plot_svg(&h, &labels).contains("<rect"));
        assert!(scree_svg(&h.scree(), "t<1>").contains("t&lt;1&gt;"));
    }
}
