//! Tree-ensemble forecasters over sliding-window frames.

pub mod boost;
pub mod forest;
pub mod frame;
pub mod tree;

use crate::error::Result;
use crate::series::{integrate_one, TimeSeries};

pub use boost::{fit_boosted, BoostConfig, BoostedModel};
pub use forest::{default_mtry, fit_forest, fit_forest_with, ForestModel, FOREST_TREE_COUNT};
pub use frame::{build_frame, forecast_row, SupervisedFrame};
pub use tree::{best_split, fit_tree, RegressionTree, SplitChoice, TreeConfig};

/// Anything that maps a feature row to a point prediction.
pub trait Regressor {
    fn predict_row(&self, row: &[f64]) -> f64;
}

impl Regressor for RegressionTree {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict(row)
    }
}

impl Regressor for ForestModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict(row)
    }
}

impl Regressor for BoostedModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict(row)
    }
}

/// One-step forecast via a fitted regressor: feed it the last `window`
/// values on the working scale, and when the model was trained on
/// differences, integrate the predicted difference back onto the level.
pub fn ml_forecast_one<M: Regressor>(
    model: &M,
    series: &TimeSeries,
    window: usize,
    differenced: bool,
) -> Result<f64> {
    let row = forecast_row(series, window, differenced)?;
    let prediction = model.predict_row(&row);
    if differenced {
        Ok(integrate_one(series.last(), prediction))
    } else {
        Ok(prediction)
    }
}
