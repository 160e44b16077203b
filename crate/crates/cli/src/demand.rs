//! Daily demand dataset: loading and the rolling-origin protocol.

use anyhow::{bail, Context, Result};

use tsbench_core::eval::{rolling_cv, MethodSpec};
use tsbench_core::series::{MetricPair, TimeSeries};

/// Number of daily observations the demand protocol expects.
pub const DEMAND_DAYS: usize = 60;

/// A 60-day demand file bundled with the binary. Same column layout as
/// the public daily-demand-orders distribution (semicolon separated, one
/// header line, 13 columns); see the repository README for swapping in
/// an external file.
pub const BUNDLED_DEMAND_CSV: &str = include_str!("../data/daily_demand.csv");

pub const DEFAULT_COLUMNS: [&str; 3] = ["Order type A", "Order type B", "Order type C"];

/// Three product demand series of exactly sixty days each.
#[derive(Debug, Clone)]
pub struct DemandDataset {
    pub products: Vec<(String, TimeSeries)>,
}

/// Parse a delimited demand file, extracting the three mapped columns.
/// Row/column positions are reported on every failure.
pub fn load_demand_csv(text: &str, columns: &[String; 3], delimiter: char) -> Result<DemandDataset> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("demand file is empty")?;
    let names: Vec<&str> = header.split(delimiter).map(str::trim).collect();
    if names.len() < 2 {
        bail!(
            "header splits into {} column(s) with delimiter '{delimiter}'; wrong delimiter?",
            names.len()
        );
    }

    let mut indices = Vec::with_capacity(3);
    for wanted in columns {
        let Some(idx) = names.iter().position(|n| n == wanted) else {
            bail!("column '{wanted}' not found; header has {names:?}");
        };
        indices.push(idx);
    }

    let mut series: Vec<Vec<f64>> = vec![Vec::new(); 3];
    for (row_no, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(delimiter).map(str::trim).collect();
        if fields.len() != names.len() {
            bail!(
                "row {}: {} fields, header has {}",
                row_no + 2,
                fields.len(),
                names.len()
            );
        }
        for (k, idx) in indices.iter().enumerate() {
            let cell = fields[*idx];
            let value: f64 = cell.parse().with_context(|| {
                format!("row {}, column '{}': non-numeric cell '{cell}'", row_no + 2, columns[k])
            })?;
            if !value.is_finite() {
                bail!("row {}, column '{}': non-finite value", row_no + 2, columns[k]);
            }
            series[k].push(value);
        }
    }

    for (k, values) in series.iter().enumerate() {
        if values.len() != DEMAND_DAYS {
            bail!(
                "column '{}': expected {DEMAND_DAYS} rows, found {}",
                columns[k],
                values.len()
            );
        }
    }

    let products = series
        .into_iter()
        .zip(columns)
        .map(|(values, name)| {
            let ts = TimeSeries::with_origin(values, name.clone())
                .map_err(|e| anyhow::anyhow!("column '{name}': {e}"))?;
            Ok((name.clone(), ts))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DemandDataset { products })
}

/// One method's scores on one product series.
#[derive(Debug, Clone)]
pub struct DemandScore {
    pub product: String,
    pub method: String,
    pub window: Option<usize>,
    pub metrics: MetricPair,
}

/// The real-data protocol: train on the first `train_len` days, evaluate
/// `horizon` one-step forecasts by rolling the origin forward.
pub fn evaluate_demand(
    dataset: &DemandDataset,
    methods: &[MethodSpec],
    train_len: usize,
    horizon: usize,
    seed: u64,
) -> Result<Vec<DemandScore>> {
    let mut scores = Vec::new();
    for (product, series) in &dataset.products {
        for method in methods {
            let metrics = rolling_cv(series, train_len, horizon, method, seed)
                .with_context(|| format!("{} on {product}", method.id()))?;
            scores.push(DemandScore {
                product: product.clone(),
                method: method.id(),
                window: method.window,
                metrics,
            });
        }
    }
    Ok(scores)
}

pub fn demand_scores_to_csv(scores: &[DemandScore]) -> String {
    let mut out = String::from("product,method,window,mse,mape,n_evaluated,n_skipped_zero_actual\n");
    for s in scores {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.product,
            s.method,
            s.window.map_or(String::new(), |w| w.to_string()),
            s.metrics.mse,
            s.metrics.mape,
            s.metrics.n_evaluated,
            s.metrics.n_skipped_zero_actual
        ));
    }
    out
}
