//! Sliding-window design matrices for one-step-ahead regression.

use crate::error::{Error, Result};
use crate::series::{difference_values, TimeSeries};

/// Lagged-value design matrix with targets, on the raw or differenced
/// scale. Feature columns are ordered oldest-first, so the most recent
/// lag is the last column of each row.
#[derive(Debug, Clone)]
pub struct SupervisedFrame {
    features: Vec<f64>,
    targets: Vec<f64>,
    width: usize,
    differenced: bool,
    /// Final original-scale observation; inverts differencing at forecast
    /// time.
    last_level: f64,
}

impl SupervisedFrame {
    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.features[index * self.width..(index + 1) * self.width]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn differenced(&self) -> bool {
        self.differenced
    }

    pub fn last_level(&self) -> f64 {
        self.last_level
    }

    /// Frame from explicit rows; test and tooling entry point.
    pub fn from_rows(rows: &[(&[f64], f64)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("frame needs at least one row".into()));
        }
        let width = rows[0].0.len();
        if width == 0 || rows.iter().any(|(r, _)| r.len() != width) {
            return Err(Error::InvalidArgument("ragged or empty feature rows".into()));
        }
        let mut features = Vec::with_capacity(rows.len() * width);
        let mut targets = Vec::with_capacity(rows.len());
        for (row, y) in rows {
            features.extend_from_slice(row);
            targets.push(*y);
        }
        Ok(Self {
            features,
            targets,
            width,
            differenced: false,
            last_level: 0.0,
        })
    }
}

/// Build the sliding-window frame: each row holds `window` consecutive
/// values (most recent last) and the target is the value that follows.
/// With `differenced` the frame is built on the first differences and the
/// final original value is retained for integration.
pub fn build_frame(series: &TimeSeries, window: usize, differenced: bool) -> Result<SupervisedFrame> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be >= 1".into()));
    }
    let working: Vec<f64> = if differenced {
        if series.len() < 2 {
            return Err(Error::InsufficientData {
                required: window + 2,
                actual: series.len(),
            });
        }
        difference_values(series.values(), 1)
    } else {
        series.values().to_vec()
    };
    if working.len() < window + 1 {
        return Err(Error::InsufficientData {
            required: window + 1 + usize::from(differenced),
            actual: series.len(),
        });
    }
    let rows = working.len() - window;
    let mut features = Vec::with_capacity(rows * window);
    let mut targets = Vec::with_capacity(rows);
    for start in 0..rows {
        features.extend_from_slice(&working[start..start + window]);
        targets.push(working[start + window]);
    }
    Ok(SupervisedFrame {
        features,
        targets,
        width: window,
        differenced,
        last_level: series.last(),
    })
}

/// Feature row for forecasting the next value: the last `window` values
/// of the series on the frame's working scale.
pub fn forecast_row(series: &TimeSeries, window: usize, differenced: bool) -> Result<Vec<f64>> {
    let needed = window + 1 + usize::from(differenced);
    if series.len() < needed - 1 {
        return Err(Error::InsufficientData {
            required: needed - 1,
            actual: series.len(),
        });
    }
    let values = series.values();
    if differenced {
        let tail = &values[values.len() - window - 1..];
        Ok(tail.windows(2).map(|w| w[1] - w[0]).collect())
    } else {
        Ok(values[values.len() - window..].to_vec())
    }
}
