//! Time-series container, differencing and forecast error metrics.

use crate::error::{Error, Result};

/// An immutable univariate series of finite values.
///
/// `origin` records where the series came from (generator name, overlay,
/// seed, length) purely for reporting; it takes no part in computation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    origin: String,
}

impl TimeSeries {
    /// Build a series, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_origin(values, String::new())
    }

    pub fn with_origin(values: Vec<f64>, origin: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("series must be nonempty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self {
            values,
            origin: origin.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("nonempty by construction")
    }

    /// First `n` observations as a new series, keeping the origin.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix length {n} out of range 1..={}",
                self.len()
            )));
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
            origin: self.origin.clone(),
        })
    }

    /// Sample variance (unbiased, n-1 denominator).
    pub fn sample_variance(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.values.iter().sum::<f64>() / n as f64;
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

/// Apply the first-difference operator `d` times.
///
/// Each pass maps a series of length k to its k-1 successive differences.
pub fn difference(series: &TimeSeries, d: usize) -> Result<TimeSeries> {
    if d == 0 {
        return Err(Error::InvalidArgument("difference order must be >= 1".into()));
    }
    if series.len() <= d {
        return Err(Error::InvalidArgument(format!(
            "cannot difference length {} series {d} times",
            series.len()
        )));
    }
    let values = difference_values(series.values(), d);
    TimeSeries::with_origin(values, series.origin().to_string())
}

/// Differencing on raw slices; `values.len() > d` is the caller's contract.
pub fn difference_values(values: &[f64], d: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Invert one differencing step for a single forecast: the predicted next
/// level given the last observed level and a predicted difference.
pub fn integrate_one(last_level: f64, predicted_diff: f64) -> f64 {
    last_level + predicted_diff
}

/// Aggregate forecast accuracy over a set of forecasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPair {
    pub mse: f64,
    /// Mean absolute percentage error, in percent.
    pub mape: f64,
    pub n_evaluated: usize,
    pub n_skipped_zero_actual: usize,
}

/// Mean squared error between equally long actual and predicted sequences.
pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_paired(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).powi(2))
        .sum();
    Ok(sum / actual.len() as f64)
}

/// Mean absolute percentage error (in percent), skipping zero actuals.
///
/// Returns the metric together with the number of skipped points; errors
/// out when every actual is zero, since no percentage is defined then.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<(f64, usize)> {
    check_paired(actual, predicted)?;
    let mut sum = 0.0;
    let mut evaluated = 0usize;
    for (a, p) in actual.iter().zip(predicted) {
        if *a == 0.0 {
            continue;
        }
        sum += 100.0 * (a - p).abs() / a.abs();
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::UndefinedMetric(
            "all actual values are zero; MAPE undefined".into(),
        ));
    }
    Ok((sum / evaluated as f64, actual.len() - evaluated))
}

fn check_paired(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.is_empty() {
        return Err(Error::InvalidArgument("empty sequences".into()));
    }
    if actual.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} actual vs {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    if let Some(v) = actual
        .iter()
        .chain(predicted.iter())
        .find(|v| !v.is_finite())
    {
        return Err(Error::InvalidArgument(format!("non-finite value {v}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(values: &[f64]) -> TimeSeries {
        TimeSeries::new(values.to_vec()).unwrap()
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn difference_first_order() {
        let d = difference(&ts(&[1.0, 3.0, 6.0, 10.0]), 1).unwrap();
        assert_eq!(d.values(), &[2.0, 3.0, 4.0]);
        let c = difference(&ts(&[5.0, 5.0, 5.0]), 1).unwrap();
        assert_eq!(c.values(), &[0.0, 0.0]);
    }

    #[test]
    fn difference_second_order() {
        // Applying the operator twice by hand: [2,3,4] -> [1,1].
        let d = difference(&ts(&[1.0, 3.0, 6.0, 10.0]), 2).unwrap();
        assert_eq!(d.values(), &[1.0, 1.0]);
    }

    #[test]
    fn difference_rejects_short_series() {
        assert!(difference(&ts(&[1.0, 2.0]), 2).is_err());
        assert!(difference(&ts(&[1.0]), 1).is_err());
        assert!(difference(&ts(&[1.0, 2.0]), 0).is_err());
    }

    #[test]
    fn integrate_one_examples() {
        assert_eq!(integrate_one(10.0, 4.0), 14.0);
        assert_eq!(integrate_one(-3.5, 0.0), -3.5);
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
        // (1 + 1 + 4) / 3
        assert_eq!(mse(&[2.0, 4.0, 6.0], &[1.0, 5.0, 8.0]).unwrap(), 2.0);
        assert!(mse(&[1.0], &[]).is_err());
        assert!(mse(&[], &[]).is_err());
    }

    #[test]
    fn mape_examples() {
        assert_eq!(mape(&[10.0, 20.0], &[10.0, 20.0]).unwrap(), (0.0, 0));
        // Second point has zero actual and is skipped; only 10 -> 11 counts.
        assert_eq!(mape(&[10.0, 0.0], &[11.0, 5.0]).unwrap(), (10.0, 1));
        assert_eq!(mape(&[100.0], &[90.0]).unwrap(), (10.0, 0));
        assert!(matches!(
            mape(&[0.0, 0.0], &[1.0, 2.0]),
            Err(Error::UndefinedMetric(_))
        ));
    }

    proptest! {
        #[test]
        fn difference_integrate_round_trip(
            values in proptest::collection::vec(-1e6f64..1e6, 2..60)
        ) {
            let s = ts(&values);
            let d = difference(&s, 1).unwrap();
            for (t, diff) in d.values().iter().enumerate() {
                let rebuilt = integrate_one(values[t], *diff);
                // Exact whenever the subtraction was (Sterbenz); otherwise
                // within one ulp of the largest intermediate magnitude.
                let scale = values[t].abs().max(values[t + 1].abs()).max(diff.abs());
                prop_assert!((rebuilt - values[t + 1]).abs() <= scale * f64::EPSILON);
            }
        }

        #[test]
        fn mse_matches_brute_force(
            pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)
        ) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let got = mse(&a, &p).unwrap();
            let mut acc = 0.0;
            for i in 0..a.len() {
                let r = a[i] - p[i];
                acc += r * r;
            }
            let want = acc / a.len() as f64;
            prop_assert!((got - want).abs() <= want.abs() * 1e-12 + 1e-300);
        }

        #[test]
        fn mse_residual_sign_symmetry(
            base in proptest::collection::vec(-1e3f64..1e3, 1..30),
            resid in proptest::collection::vec(-1e3f64..1e3, 1..30)
        ) {
            let n = base.len().min(resid.len());
            let a = &base[..n];
            let plus: Vec<f64> = (0..n).map(|i| a[i] + resid[i]).collect();
            let minus: Vec<f64> = (0..n).map(|i| a[i] - resid[i]).collect();
            let m_plus = mse(a, &plus).unwrap();
            let m_minus = mse(a, &minus).unwrap();
            prop_assert!((m_plus - m_minus).abs() <= m_plus.abs() * 1e-12 + 1e-300);
        }

        #[test]
        fn mape_scale_invariance(
            pairs in proptest::collection::vec((0.1f64..1e3, -1e3f64..1e3), 1..30),
            scale in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]
        ) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let (m1, k1) = mape(&a, &p).unwrap();
            let sa: Vec<f64> = a.iter().map(|v| v * scale).collect();
            let sp: Vec<f64> = p.iter().map(|v| v * scale).collect();
            let (m2, k2) = mape(&sa, &sp).unwrap();
            prop_assert_eq!(k1, k2);
            prop_assert!((m1 - m2).abs() <= m1.abs() * 1e-9 + 1e-12);
        }

        #[test]
        fn mape_matches_brute_force(
            pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)
        ) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let mut acc = 0.0;
            let mut count = 0usize;
            for i in 0..a.len() {
                if a[i] != 0.0 {
                    acc += 100.0 * (a[i] - p[i]).abs() / a[i].abs();
                    count += 1;
                }
            }
            if count == 0 {
                prop_assert!(mape(&a, &p).is_err());
            } else {
                let (got, skipped) = mape(&a, &p).unwrap();
                let want = acc / count as f64;
                prop_assert_eq!(skipped, a.len() - count);
                prop_assert!((got - want).abs() <= want.abs() * 1e-12 + 1e-300);
            }
        }
    }
}
