//! Replication runner: fresh series per replication, one forecast each.

use rayon::prelude::*;

use crate::dgp::{generate, GenConfig};
use crate::error::{Error, Result};
use crate::eval::setting::{DataSpec, MethodKind, MethodSpec, Setting, Source};
use crate::ml::{build_frame, fit_boosted, fit_forest, ml_forecast_one, BoostConfig};
use crate::queue::simulate_queue;
use crate::seed::{hash_str, mix};
use crate::series::{MetricPair, TimeSeries};
use crate::ts::{fit_arima, fit_sarima, fit_tbats_lite, naive_forecast, ArimaBounds};

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    pub actual: f64,
    pub forecast: f64,
    pub squared_error: f64,
    /// Absolute percentage error; absent when the actual is zero.
    pub ape: Option<f64>,
    /// True when the primary fit failed and the naive fallback produced
    /// the forecast instead.
    pub used_fallback: bool,
}

/// Per-setting aggregate plus the replication log it was computed from.
#[derive(Debug, Clone)]
pub struct MetricsRow {
    pub setting: Setting,
    pub replications: usize,
    pub seed_base: u64,
    pub outcomes: Vec<ReplicationOutcome>,
}

impl MetricsRow {
    /// Aggregate the replication log; exact mean over the stored errors.
    pub fn metrics(&self) -> MetricPair {
        let n = self.outcomes.len();
        let mse = self.outcomes.iter().map(|o| o.squared_error).sum::<f64>() / n as f64;
        let apes: Vec<f64> = self.outcomes.iter().filter_map(|o| o.ape).collect();
        let mape = if apes.is_empty() {
            f64::NAN
        } else {
            apes.iter().sum::<f64>() / apes.len() as f64
        };
        MetricPair {
            mse,
            mape,
            n_evaluated: apes.len(),
            n_skipped_zero_actual: n - apes.len(),
        }
    }

    pub fn fallback_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.used_fallback).count()
    }
}

/// Replication seed for a data cell: stable in (base, fingerprint, index),
/// so reruns, reorderings and parallel schedules cannot change streams.
pub fn replication_seed(seed_base: u64, data: &DataSpec, replication: usize) -> u64 {
    mix(
        mix(seed_base, hash_str(&data.fingerprint())),
        replication as u64,
    )
}

/// Generate the full series for one replication: n + 1 points, the last
/// held out as the forecast target. All methods evaluated on this cell
/// and replication see the identical series.
pub fn generate_series(data: &DataSpec, rep_seed: u64) -> Result<TimeSeries> {
    let len = data.n + 1;
    match &data.source {
        Source::Dgp(kind) => {
            let cfg = GenConfig {
                n: len,
                burn_in: data.burn_in,
                seed: mix(rep_seed, 1),
            };
            let clean = generate(*kind, &cfg)?;
            data.overlay
                .apply(&clean, data.n, mix(rep_seed, 2), mix(rep_seed, 3))
        }
        Source::Queue(spec) => {
            if data.overlay.kind() != crate::eval::setting::OverlayKind::None {
                return Err(Error::InvalidArgument(
                    "queue sources take no overlay".into(),
                ));
            }
            simulate_queue(spec, len, mix(rep_seed, 1))
        }
    }
}

/// Fit the method on the training series and produce one forecast.
pub fn one_step_forecast(method: &MethodSpec, train: &TimeSeries, model_seed: u64) -> Result<f64> {
    match method.kind {
        MethodKind::Naive => Ok(naive_forecast(train)),
        MethodKind::Arima => Ok(fit_arima(train, &ArimaBounds::default())?.forecast_one()),
        // No period is known for the benchmark's series; with period one
        // the seasonal model is definitionally the plain fit.
        MethodKind::Sarima => Ok(fit_sarima(train, 1)?.forecast_one()),
        MethodKind::Tbats => Ok(fit_tbats_lite(train)?.forecast_one()),
        MethodKind::RandomForest => {
            let window = method.window.ok_or_else(missing_window)?;
            let frame = build_frame(train, window, method.differenced)?;
            let model = fit_forest(&frame, model_seed);
            ml_forecast_one(&model, train, window, method.differenced)
        }
        MethodKind::Boosted => {
            let window = method.window.ok_or_else(missing_window)?;
            let frame = build_frame(train, window, method.differenced)?;
            let model = fit_boosted(&frame, &BoostConfig::default(), model_seed);
            ml_forecast_one(&model, train, window, method.differenced)
        }
    }
}

fn missing_window() -> Error {
    Error::InvalidArgument("tree methods need a window width".into())
}

fn run_replication(setting: &Setting, seed_base: u64, replication: usize) -> Result<ReplicationOutcome> {
    let rep_seed = replication_seed(seed_base, &setting.data, replication);
    let series = generate_series(&setting.data, rep_seed)?;
    let train = series.prefix(setting.data.n)?;
    let actual = series.values()[setting.data.n];

    let model_seed = mix(mix(rep_seed, hash_str(&setting.method.id())), 4);
    let primary = one_step_forecast(&setting.method, &train, model_seed);
    let (forecast, used_fallback) = match primary {
        Ok(f) if f.is_finite() => (f, false),
        // Never drop a replication: a failed fit degrades to the naive
        // forecast and is counted.
        _ => (naive_forecast(&train), true),
    };

    let err = actual - forecast;
    Ok(ReplicationOutcome {
        actual,
        forecast,
        squared_error: err * err,
        ape: (actual != 0.0).then(|| 100.0 * err.abs() / actual.abs()),
        used_fallback,
    })
}

/// Evaluate one setting over `replications` independent replications.
pub fn run_setting(setting: &Setting, replications: usize, seed_base: u64) -> Result<MetricsRow> {
    run_setting_mode(setting, replications, seed_base, true)
}

pub fn run_setting_mode(
    setting: &Setting,
    replications: usize,
    seed_base: u64,
    parallel: bool,
) -> Result<MetricsRow> {
    if replications == 0 {
        return Err(Error::InvalidArgument("need at least one replication".into()));
    }
    let outcomes: Result<Vec<ReplicationOutcome>> = if parallel {
        (1..=replications)
            .into_par_iter()
            .map(|r| run_replication(setting, seed_base, r))
            .collect()
    } else {
        (1..=replications)
            .map(|r| run_replication(setting, seed_base, r))
            .collect()
    };
    Ok(MetricsRow {
        setting: setting.clone(),
        replications,
        seed_base,
        outcomes: outcomes?,
    })
}

/// Evaluate a whole grid; rows come back sorted by setting fingerprint so
/// aggregation order never depends on scheduling.
pub fn run_grid(
    settings: &[Setting],
    replications: usize,
    seed_base: u64,
    parallel: bool,
) -> Result<Vec<MetricsRow>> {
    let mut rows: Vec<MetricsRow> = if parallel {
        settings
            .par_iter()
            .map(|s| run_setting_mode(s, replications, seed_base, false))
            .collect::<Result<_>>()?
    } else {
        settings
            .iter()
            .map(|s| run_setting_mode(s, replications, seed_base, false))
            .collect::<Result<_>>()?
    };
    rows.sort_by(|a, b| a.setting.fingerprint().cmp(&b.setting.fingerprint()));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{DgpKind, OverlaySpec};
    use crate::eval::setting::{MethodKind, MethodSpec};

    fn ar_setting(method: MethodSpec, n: usize) -> Setting {
        Setting {
            data: DataSpec::new(Source::Dgp(DgpKind::Ar), OverlaySpec::none(), n),
            method,
        }
    }

    #[test]
    fn rerun_is_identical() {
        let setting = ar_setting(MethodSpec::statistical(MethodKind::Naive), 60);
        let a = run_setting(&setting, 5, 42).unwrap();
        let b = run_setting(&setting, 5, 42).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
    }

    #[test]
    fn doubling_replications_preserves_the_prefix() {
        let setting = ar_setting(MethodSpec::statistical(MethodKind::Naive), 60);
        let short = run_setting(&setting, 5, 7).unwrap();
        let long = run_setting(&setting, 10, 7).unwrap();
        assert_eq!(short.outcomes[..], long.outcomes[..5]);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let setting = ar_setting(MethodSpec::tree(MethodKind::RandomForest, 4, false), 80);
        let serial = run_setting_mode(&setting, 6, 3, false).unwrap();
        let parallel = run_setting_mode(&setting, 6, 3, true).unwrap();
        assert_eq!(serial.outcomes, parallel.outcomes);
    }

    #[test]
    fn methods_share_the_same_series() {
        let data = DataSpec::new(Source::Dgp(DgpKind::Tar1), OverlaySpec::none(), 50);
        let seed = replication_seed(11, &data, 1);
        let series = generate_series(&data, seed).unwrap();
        // Regenerating for a different method produces the same series,
        // because the method is not part of the data seed.
        let series_again = generate_series(&data, seed).unwrap();
        assert_eq!(series.values(), series_again.values());
        assert_eq!(series.len(), 51);
    }

    #[test]
    fn naive_mse_matches_stationary_oracle() {
        // One-step error of the naive forecast on the AR(2) is
        // x_{n+1} - x_n with variance 2 gamma_0 - 2 gamma_1 under
        // stationarity; solve the autocovariance equations numerically.
        let (a1, a2) = (0.5, 0.45);
        let rho1 = a1 / (1.0 - a2);
        let rho2 = a1 * rho1 + a2;
        let gamma0 = 1.0 / (1.0 - a1 * rho1 - a2 * rho2);
        let oracle = 2.0 * gamma0 * (1.0 - rho1);

        let setting = ar_setting(MethodSpec::statistical(MethodKind::Naive), 1000);
        let row = run_setting(&setting, 1000, 2024).unwrap();
        let got = row.metrics().mse;
        assert!(
            (got - oracle).abs() / oracle < 0.10,
            "naive MSE {got} vs oracle {oracle}"
        );
    }

    #[test]
    fn queue_setting_rejects_overlay() {
        let data = DataSpec::new(
            Source::Queue(crate::queue::QueueSpec::mm1()),
            OverlaySpec::jump(),
            50,
        );
        assert!(generate_series(&data, 1).is_err());
    }

    #[test]
    fn mse_recomputation_from_log_is_exact() {
        let setting = ar_setting(MethodSpec::tree(MethodKind::Boosted, 4, true), 80);
        let row = run_setting(&setting, 8, 5).unwrap();
        let recomputed: f64 = row
            .outcomes
            .iter()
            .map(|o| {
                let e = o.actual - o.forecast;
                e * e
            })
            .sum::<f64>()
            / row.outcomes.len() as f64;
        assert_eq!(row.metrics().mse, recomputed);
    }
}
