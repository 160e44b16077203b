//! Cross-model oracle checks: on linear-Gaussian data every reasonable
//! forecaster approximates the same optimal predictor, so their one-step
//! errors must land close together.

use rayon::prelude::*;
use tsbench_core::dgp::{generate, DgpKind, GenConfig};
use tsbench_core::ml::{build_frame, fit_forest, ml_forecast_one};
use tsbench_core::ts::{fit_arima, fit_tbats_lite, ArimaBounds};

/// Mean squared one-step error over fresh replications for each fitter.
fn paired_mse<F>(n: usize, reps: u64, seed0: u64, fit_forecast: F) -> f64
where
    F: Fn(&tsbench_core::TimeSeries, u64) -> f64 + Sync,
{
    let total: f64 = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = generate(DgpKind::Ar, &GenConfig::new(n + 1, seed0 + r)).unwrap();
            let train = s.prefix(n).unwrap();
            let actual = s.values()[n];
            let f = fit_forecast(&train, seed0 + r);
            (actual - f).powi(2)
        })
        .sum();
    total / reps as f64
}

#[test]
fn tbats_tracks_arima_on_ar_data() {
    let reps = 200;
    let arima = paired_mse(1000, reps, 50_000, |train, _| {
        fit_arima(train, &ArimaBounds::default()).unwrap().forecast_one()
    });
    let tbats = paired_mse(1000, reps, 50_000, |train, _| {
        fit_tbats_lite(train).unwrap().forecast_one()
    });
    let gap = (tbats - arima).abs() / arima;
    assert!(
        gap <= 0.10,
        "one-step MSE {tbats} (smoother) vs {arima} (ARIMA): gap {gap:.3}"
    );
}

#[test]
fn forest_tracks_arima_on_ar_data() {
    let reps = 100;
    let arima = paired_mse(1000, reps, 60_000, |train, _| {
        fit_arima(train, &ArimaBounds::default()).unwrap().forecast_one()
    });
    let forest = paired_mse(1000, reps, 60_000, |train, seed| {
        let frame = build_frame(train, 8, false).unwrap();
        let model = fit_forest(&frame, seed);
        ml_forecast_one(&model, train, 8, false).unwrap()
    });
    let gap = (forest - arima).abs() / arima;
    assert!(
        gap <= 0.15,
        "one-step MSE {forest} (forest) vs {arima} (ARIMA): gap {gap:.3}"
    );
}
