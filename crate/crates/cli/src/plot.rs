//! Deterministic SVG renderings of the metrics tables.
//!
//! Three figure families: error against series length (faceted by
//! source), error against sliding-window width for the tree ensembles,
//! and the MAPE companion of the first. Pure string assembly, no
//! rendering dependencies, identical input gives identical bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use tsbench_core::report::MetricsRecord;

const PANEL_W: f64 = 220.0;
const PANEL_H: f64 = 150.0;
const PANEL_PAD: f64 = 46.0;
const TOP_PAD: f64 = 54.0;

fn method_color(method: &str) -> &'static str {
    match method {
        "rf" => "#1b9e77",
        "rf_diff" => "#66c2a5",
        "xgb" => "#d95f02",
        "xgb_diff" => "#fc8d62",
        "arima" => "#7570b3",
        "sarima" => "#a6a3d0",
        "tbats" => "#e7298a",
        "naive" => "#666666",
        _ => "#1f78b4",
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Mse,
    Mape,
}

impl Metric {
    fn label(&self) -> &'static str {
        match self {
            Metric::Mse => "MSE",
            Metric::Mape => "MAPE (%)",
        }
    }

    fn of(&self, r: &MetricsRecord) -> f64 {
        match self {
            Metric::Mse => r.mse,
            Metric::Mape => r.mape,
        }
    }
}

/// Render every figure family into `out_dir`; returns the files written.
pub fn emit_plots(records: &[MetricsRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        bail!("metrics input has no rows; nothing to plot");
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let mut written = Vec::new();
    for (name, metric) in [("mse_by_length.svg", Metric::Mse), ("mape_by_length.svg", Metric::Mape)] {
        let svg = metric_by_length_svg(records, metric)?;
        let path = out_dir.join(name);
        std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }

    let tree_records: Vec<&MetricsRecord> =
        records.iter().filter(|r| r.window.is_some()).collect();
    if !tree_records.is_empty() {
        let svg = mse_by_window_svg(&tree_records)?;
        let path = out_dir.join("mse_by_window.svg");
        std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

/// Faceted line chart: one panel per source, x positions from the sorted
/// category values, one polyline per method.
fn faceted_lines(
    title: &str,
    y_label: &str,
    x_label: &str,
    // panel -> method -> (x category, y value)
    data: &BTreeMap<String, BTreeMap<String, Vec<(usize, f64)>>>,
) -> String {
    let panels: Vec<&String> = data.keys().collect();
    let mut methods: Vec<String> = data
        .values()
        .flat_map(|m| m.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    methods.sort();

    let mut categories: Vec<usize> = data
        .values()
        .flat_map(|m| m.values())
        .flatten()
        .map(|(x, _)| *x)
        .collect();
    categories.sort_unstable();
    categories.dedup();

    let positives: Vec<f64> = data
        .values()
        .flat_map(|m| m.values())
        .flatten()
        .map(|(_, y)| *y)
        .filter(|y| y.is_finite() && *y > 0.0)
        .collect();
    let y_min = positives.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_max = positives.iter().cloned().fold(1e-12f64, f64::max);
    let (log_lo, log_hi) = if positives.is_empty() {
        (0.0, 1.0)
    } else {
        let lo = y_min.log10().floor();
        let hi = y_max.log10().ceil();
        if lo == hi {
            (lo - 1.0, hi + 1.0)
        } else {
            (lo, hi)
        }
    };

    let cols = panels.len().min(4).max(1);
    let rows = panels.len().div_ceil(cols);
    let width = cols as f64 * (PANEL_W + PANEL_PAD) + PANEL_PAD;
    let height = TOP_PAD + rows as f64 * (PANEL_H + PANEL_PAD) + 10.0;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
        width / 2.0
    ));

    // Legend row.
    let mut lx = PANEL_PAD;
    for method in &methods {
        svg.push_str(&format!(
            "<rect x=\"{lx}\" y=\"32\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            method_color(method)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"41\" font-size=\"11\">{method}</text>\n",
            lx + 14.0
        ));
        lx += 14.0 + 9.0 * method.len() as f64 + 16.0;
    }

    let x_pos = |cat: usize| -> f64 {
        let idx = categories.iter().position(|c| *c == cat).unwrap_or(0);
        if categories.len() <= 1 {
            PANEL_W / 2.0
        } else {
            idx as f64 / (categories.len() - 1) as f64 * (PANEL_W - 30.0) + 15.0
        }
    };
    let y_pos = |v: f64| -> f64 {
        let clamped = v.max(1e-12).log10().clamp(log_lo, log_hi);
        PANEL_H - (clamped - log_lo) / (log_hi - log_lo) * PANEL_H
    };

    for (i, panel) in panels.iter().enumerate() {
        let ox = PANEL_PAD + (i % cols) as f64 * (PANEL_W + PANEL_PAD);
        let oy = TOP_PAD + (i / cols) as f64 * (PANEL_H + PANEL_PAD);
        svg.push_str(&format!("<g class=\"panel\" transform=\"translate({ox},{oy})\">\n"));
        svg.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{PANEL_W}\" height=\"{PANEL_H}\" fill=\"none\" stroke=\"#999\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"-6\" font-size=\"12\" text-anchor=\"middle\">{panel}</text>\n",
            PANEL_W / 2.0
        ));
        // Log-decade gridlines and tick labels.
        let mut decade = log_lo;
        while decade <= log_hi + 1e-9 {
            let y = y_pos(10f64.powf(decade));
            svg.push_str(&format!(
                "<line x1=\"0\" y1=\"{y}\" x2=\"{PANEL_W}\" y2=\"{y}\" stroke=\"#eee\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"-4\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">1e{}</text>\n",
                y + 3.0,
                decade as i64
            ));
            decade += 1.0;
        }
        for cat in &categories {
            let x = x_pos(*cat);
            svg.push_str(&format!(
                "<text x=\"{x}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{cat}</text>\n",
                PANEL_H + 12.0
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{x_label}</text>\n",
            PANEL_W / 2.0,
            PANEL_H + 26.0
        ));
        svg.push_str(&format!(
            "<text x=\"-32\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\" transform=\"rotate(-90 -32 {})\">{y_label}</text>\n",
            PANEL_H / 2.0,
            PANEL_H / 2.0
        ));

        if let Some(series) = data.get(*panel) {
            for (method, points) in series {
                let mut sorted = points.clone();
                sorted.sort_by_key(|(x, _)| *x);
                let path: Vec<String> = sorted
                    .iter()
                    .filter(|(_, y)| y.is_finite())
                    .map(|(x, y)| format!("{:.2},{:.2}", x_pos(*x), y_pos(*y)))
                    .collect();
                if path.len() > 1 {
                    svg.push_str(&format!(
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                        path.join(" "),
                        method_color(method)
                    ));
                }
                for p in &path {
                    let (x, y) = p.split_once(',').expect("point format");
                    svg.push_str(&format!(
                        "<circle cx=\"{x}\" cy=\"{y}\" r=\"2.4\" fill=\"{}\"/>\n",
                        method_color(method)
                    ));
                }
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

fn metric_by_length_svg(records: &[MetricsRecord], metric: Metric) -> Result<String> {
    // panel = source, series = method, x = n; mean over overlays/windows.
    let mut sums: BTreeMap<(String, String, usize), (f64, usize)> = BTreeMap::new();
    for r in records {
        let v = metric.of(r);
        if !v.is_finite() {
            continue;
        }
        let e = sums
            .entry((r.source.clone(), r.method.clone(), r.n))
            .or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    if sums.is_empty() {
        bail!("no finite values for {}", metric.label());
    }
    let mut data: BTreeMap<String, BTreeMap<String, Vec<(usize, f64)>>> = BTreeMap::new();
    for ((source, method, n), (sum, count)) in sums {
        data.entry(source)
            .or_default()
            .entry(method)
            .or_default()
            .push((n, sum / count as f64));
    }
    Ok(faceted_lines(
        &format!("{} by series length", metric.label()),
        metric.label(),
        "series length",
        &data,
    ))
}

fn mse_by_window_svg(records: &[&MetricsRecord]) -> Result<String> {
    let mut sums: BTreeMap<(String, String, usize), (f64, usize)> = BTreeMap::new();
    for r in records {
        let Some(window) = r.window else { continue };
        if !r.mse.is_finite() {
            continue;
        }
        let e = sums
            .entry((r.source.clone(), r.method.clone(), window))
            .or_insert((0.0, 0));
        e.0 += r.mse;
        e.1 += 1;
    }
    if sums.is_empty() {
        bail!("no tree-ensemble rows with windows to plot");
    }
    let mut data: BTreeMap<String, BTreeMap<String, Vec<(usize, f64)>>> = BTreeMap::new();
    for ((source, method, w), (sum, count)) in sums {
        data.entry(source)
            .or_default()
            .entry(method)
            .or_default()
            .push((w, sum / count as f64));
    }
    Ok(faceted_lines(
        "MSE by sliding-window width",
        "MSE",
        "window",
        &data,
    ))
}
