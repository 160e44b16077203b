//! Expanding-window cross validation for the real-data protocol.

use crate::error::{Error, Result};
use crate::eval::runner::one_step_forecast;
use crate::eval::setting::MethodSpec;
use crate::seed::mix;
use crate::series::{mape, mse, MetricPair, TimeSeries};

/// Rolling-origin evaluation: for each held-out step, refit the method on
/// all observations up to the origin and score a single one-step forecast.
pub fn rolling_cv(
    series: &TimeSeries,
    train_len: usize,
    horizon: usize,
    method: &MethodSpec,
    seed: u64,
) -> Result<MetricPair> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    if train_len == 0 {
        return Err(Error::InvalidArgument("training length must be >= 1".into()));
    }
    if series.len() < train_len + horizon {
        return Err(Error::InsufficientData {
            required: train_len + horizon,
            actual: series.len(),
        });
    }

    let mut actuals = Vec::with_capacity(horizon);
    let mut forecasts = Vec::with_capacity(horizon);
    for step in 0..horizon {
        let train = series.prefix(train_len + step)?;
        let forecast = one_step_forecast(method, &train, mix(seed, step as u64))?;
        forecasts.push(forecast);
        actuals.push(series.values()[train_len + step]);
    }

    let mse = mse(&actuals, &forecasts)?;
    let (mape, skipped) = match mape(&actuals, &forecasts) {
        Ok(pair) => pair,
        Err(Error::UndefinedMetric(_)) => (f64::NAN, horizon),
        Err(other) => return Err(other),
    };
    Ok(MetricPair {
        mse,
        mape,
        n_evaluated: horizon - skipped,
        n_skipped_zero_actual: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::setting::{MethodKind, MethodSpec};

    #[test]
    fn naive_on_ramp_hand_oracle() {
        // Ramp 1..60, train 50, test 10: the naive forecast trails the
        // actual by exactly one everywhere, so MSE = 1 and MAPE is the
        // mean of 100/a over actuals 51..60.
        let values: Vec<f64> = (1..=60).map(|t| t as f64).collect();
        let s = TimeSeries::new(values).unwrap();
        let m = rolling_cv(&s, 50, 10, &MethodSpec::statistical(MethodKind::Naive), 0).unwrap();
        assert!((m.mse - 1.0).abs() < 1e-12);
        let expected_mape: f64 = (51..=60).map(|a| 100.0 / a as f64).sum::<f64>() / 10.0;
        assert!((m.mape - expected_mape).abs() < 1e-12);
        assert!((expected_mape - 1.8067).abs() < 1e-3);
        assert_eq!(m.n_evaluated, 10);
        assert_eq!(m.n_skipped_zero_actual, 0);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let s = TimeSeries::new(vec![1.0; 60]).unwrap();
        assert!(rolling_cv(&s, 50, 0, &MethodSpec::statistical(MethodKind::Naive), 0).is_err());
    }

    #[test]
    fn short_series_is_rejected() {
        let s = TimeSeries::new(vec![1.0; 59]).unwrap();
        assert!(rolling_cv(&s, 50, 10, &MethodSpec::statistical(MethodKind::Naive), 0).is_err());
    }
}
