//! Level-stationarity test used to pick the differencing order.

use crate::error::{Error, Result};
use crate::series::{difference_values, TimeSeries};

/// 5% critical value of the level-stationarity statistic.
pub const KPSS_CRIT_5PCT: f64 = 0.463;

/// Bartlett bandwidth: the Andrews AR(1) plug-in, capped by a slowly
/// growing bound. The plug-in widens the kernel enough to keep the test
/// honest on persistent-but-stationary data; the cap keeps bandwidth/n
/// small so power against unit roots survives at benchmark lengths.
fn bartlett_bandwidth(resid: &[f64]) -> usize {
    let n = resid.len();
    let denom: f64 = resid.iter().map(|v| v * v).sum();
    let num: f64 = (1..n).map(|t| resid[t] * resid[t - 1]).sum();
    let rho = (num / denom.max(1e-300)).clamp(-0.97, 0.97);
    let spread = (1.0 - rho) * (1.0 + rho);
    let a1 = 4.0 * rho * rho / (spread * spread);
    let plug_in = (1.1447 * (a1 * n as f64).powf(1.0 / 3.0)).floor() as usize;
    let cap = ((n as f64).powf(6.0 / 7.0) / 17.0).floor() as usize;
    plug_in.min(cap).clamp(1, n - 1)
}

/// Level-stationarity statistic: normalized cumulative deviations over a
/// Bartlett-weighted long-run variance.
pub fn kpss_level_stat(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 20 {
        return Err(Error::InsufficientData {
            required: 20,
            actual: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let resid: Vec<f64> = values.iter().map(|v| v - mean).collect();

    let mut partial = Vec::with_capacity(n);
    let mut acc = 0.0;
    for e in &resid {
        acc += e;
        partial.push(acc);
    }

    let bandwidth = bartlett_bandwidth(&resid);
    let mut lrv = resid.iter().map(|e| e * e).sum::<f64>() / n as f64;
    for lag in 1..=bandwidth {
        let mut cov = 0.0;
        for t in lag..n {
            cov += resid[t] * resid[t - lag];
        }
        cov /= n as f64;
        let weight = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * weight * cov;
    }
    lrv = lrv.max(1e-300);

    let sum_sq: f64 = partial.iter().map(|s| s * s).sum();
    Ok(sum_sq / (n as f64 * n as f64 * lrv))
}

/// Smallest d <= `max_d` whose d-differenced series passes the 5% level
/// stationarity test; `max_d` when none does.
pub fn select_d(series: &TimeSeries, max_d: usize) -> Result<usize> {
    let mut values = series.values().to_vec();
    for d in 0..=max_d {
        if d > 0 {
            if values.len() < 2 {
                return Ok(d.saturating_sub(1));
            }
            values = difference_values(&values, 1);
        }
        let stat = kpss_level_stat(&values)?;
        if stat < KPSS_CRIT_5PCT {
            return Ok(d);
        }
    }
    Ok(max_d)
}
