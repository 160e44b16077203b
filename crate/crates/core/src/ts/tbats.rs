//! Damped-trend exponential smoothing with Box-Cox transformation, ARMA
//! error correction and an optional trigonometric seasonal block.
//!
//! A trimmed take on the BATS/TBATS family: one seasonal block at most,
//! ARMA error orders capped at (2, 2), Box-Cox lambda chosen from a fixed
//! grid (identity when any observation is nonpositive).

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::ts::optim::nelder_mead;

const LAMBDA_GRID: [f64; 5] = [1.0, 0.75, 0.5, 0.25, 0.0];
const ARMA_ORDERS: [(usize, usize); 9] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (1, 1),
    (2, 0),
    (0, 2),
    (2, 1),
    (1, 2),
    (2, 2),
];

pub fn box_cox(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x.ln()
    } else if lambda == 1.0 {
        x - 1.0
    } else {
        (x.powf(lambda) - 1.0) / lambda
    }
}

pub fn inv_box_cox(y: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        y.exp()
    } else if lambda == 1.0 {
        // Plain shift; unlike the fractional powers it needs no domain
        // guard, and data on this branch may be negative.
        y + 1.0
    } else {
        (lambda * y + 1.0).max(1e-12).powf(1.0 / lambda)
    }
}

/// Trigonometric seasonal state: paired harmonics rotated each step and
/// nudged by the smoothing errors.
#[derive(Debug, Clone)]
pub struct TrigSeasonal {
    pub period: usize,
    pub harmonics: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    /// (s_j, s*_j) per harmonic.
    pub state: Vec<(f64, f64)>,
}

impl TrigSeasonal {
    fn contribution(&self) -> f64 {
        self.state.iter().map(|(s, _)| s).sum()
    }

    fn advance(&mut self, shock: f64) {
        for (j, pair) in self.state.iter_mut().enumerate() {
            let freq = 2.0 * std::f64::consts::PI * (j + 1) as f64 / self.period as f64;
            let (s, s_star) = *pair;
            let (sin, cos) = freq.sin_cos();
            pair.0 = s * cos + s_star * sin + self.gamma1 * shock;
            pair.1 = -s * sin + s_star * cos + self.gamma2 * shock;
        }
    }
}

/// Fitted smoother with the state needed for one forecast step.
#[derive(Debug, Clone)]
pub struct TbatsLiteModel {
    pub box_cox_lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub damping: f64,
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    pub level: f64,
    pub trend: f64,
    pub seasonal: Option<TrigSeasonal>,
    pub aic: f64,
    /// True when optimization failed and a level-only smoother was kept.
    pub fallback: bool,
    recent_shocks: Vec<f64>,
    recent_errors: Vec<f64>,
}

impl TbatsLiteModel {
    /// One-step-ahead conditional mean on the original scale.
    pub fn forecast_one(&self) -> f64 {
        let mut pred = self.level + self.damping * self.trend;
        if let Some(seasonal) = &self.seasonal {
            pred += seasonal.contribution();
        }
        for (i, c) in self.ar_coeffs.iter().enumerate() {
            let idx = self.recent_shocks.len() as isize - 1 - i as isize;
            if idx >= 0 {
                pred += c * self.recent_shocks[idx as usize];
            }
        }
        for (j, c) in self.ma_coeffs.iter().enumerate() {
            let idx = self.recent_errors.len() as isize - 1 - j as isize;
            if idx >= 0 {
                pred += c * self.recent_errors[idx as usize];
            }
        }
        inv_box_cox(pred, self.box_cox_lambda)
    }
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Map reflection coefficients to a stationary vector (order <= 2 here).
/// tanh saturates to one in floating point, so bound it away from the
/// closed boundary.
fn pacf_to_coeffs(u: &[f64]) -> Vec<f64> {
    let bound = 1.0 - 1e-7;
    let r = |v: f64| v.tanh().clamp(-bound, bound);
    match u.len() {
        0 => vec![],
        1 => vec![r(u[0])],
        _ => {
            let r1 = r(u[0]);
            let r2 = r(u[1]);
            vec![r1 * (1.0 - r2), r2]
        }
    }
}

struct FilterSpec {
    lambda: f64,
    p: usize,
    q: usize,
    seasonal_period: Option<usize>,
}

struct FilterOutcome {
    sse: f64,
    model: TbatsLiteModel,
}

/// Run the smoothing recursion over the transformed series and return the
/// squared one-step error along with the end-of-sample state.
fn run_filter(y: &[f64], spec: &FilterSpec, params: &[f64]) -> FilterOutcome {
    let alpha = sigmoid(params[0]);
    let beta = alpha * sigmoid(params[1]);
    let damping = 0.8 + 0.2 * sigmoid(params[2]);
    let mut idx = 3;
    let ar = pacf_to_coeffs(&params[idx..idx + spec.p]);
    idx += spec.p;
    let ma: Vec<f64> = pacf_to_coeffs(&params[idx..idx + spec.q])
        .iter()
        .map(|c| -c)
        .collect();
    idx += spec.q;

    let mut seasonal = spec.seasonal_period.map(|period| {
        let harmonics = (period / 2).clamp(1, 3);
        let block = TrigSeasonal {
            period,
            harmonics,
            gamma1: 0.01 * params[idx],
            gamma2: 0.01 * params[idx + 1],
            state: vec![(0.0, 0.0); harmonics],
        };
        block
    });

    // Level and trend start from a short least-squares line.
    let head = y.len().min(10);
    let (mut level, mut trend) = line_fit(&y[..head]);

    let mut shocks = [0.0f64; 2];
    let mut errors = [0.0f64; 2];
    let mut sse = 0.0;
    for &obs in y {
        let base = level + damping * trend;
        let seasonal_part = seasonal.as_ref().map_or(0.0, |s| s.contribution());
        let mut corr = 0.0;
        for (i, c) in ar.iter().enumerate() {
            corr += c * shocks[i];
        }
        for (j, c) in ma.iter().enumerate() {
            corr += c * errors[j];
        }
        let pred = base + seasonal_part + corr;
        let err = obs - pred;
        let shock = obs - base - seasonal_part;
        sse += err * err;

        level = base + alpha * shock;
        trend = damping * trend + beta * shock;
        if let Some(s) = seasonal.as_mut() {
            s.advance(shock);
        }
        shocks = [shock, shocks[0]];
        errors = [err, errors[0]];
    }

    let model = TbatsLiteModel {
        box_cox_lambda: spec.lambda,
        alpha,
        beta,
        damping,
        ar_coeffs: ar,
        ma_coeffs: ma,
        level,
        trend,
        seasonal,
        aic: f64::NAN,
        fallback: false,
        recent_shocks: vec![shocks[1], shocks[0]],
        recent_errors: vec![errors[1], errors[0]],
    };
    FilterOutcome { sse, model }
}

fn line_fit(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    if y.len() < 2 {
        return (y.first().copied().unwrap_or(0.0), 0.0);
    }
    let tbar = (n - 1.0) / 2.0;
    let ybar = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, v) in y.iter().enumerate() {
        num += (t as f64 - tbar) * (v - ybar);
        den += (t as f64 - tbar).powi(2);
    }
    let slope = if den > 0.0 { num / den } else { 0.0 };
    (ybar - slope * tbar, slope)
}

fn fit_structure(y: &[f64], spec: &FilterSpec) -> Option<(f64, TbatsLiteModel)> {
    let dim = 3 + spec.p + spec.q + if spec.seasonal_period.is_some() { 2 } else { 0 };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start_alpha in [0.0, 2.0, -2.0] {
        let mut start = vec![0.0; dim];
        start[0] = start_alpha;
        start[2] = 2.0;
        let mut objective = |u: &[f64]| run_filter(y, spec, u).sse;
        let (u, sse) = nelder_mead(&mut objective, &start, 1e-8, 500 * dim);
        if sse.is_finite() && best.as_ref().map_or(true, |(b, _)| sse < *b) {
            best = Some((sse, u));
        }
    }
    let (sse, u) = best?;
    let outcome = run_filter(y, spec, &u);
    let n = y.len() as f64;
    let k = dim as f64 + 3.0; // two initial states and the variance
    let aic = n * (sse.max(1e-300) / n).ln() + 2.0 * k;
    let mut model = outcome.model;
    model.aic = aic;
    Some((aic, model))
}

/// Fit the smoother: grid over the Box-Cox parameter (identity only when
/// nonpositive values are present), then ARMA error orders by AIC at the
/// chosen transform strength.
pub fn fit_tbats_lite(series: &TimeSeries) -> Result<TbatsLiteModel> {
    fit_impl(series, None)
}

/// Same fit with a trigonometric seasonal block of the given period.
pub fn fit_tbats_lite_seasonal(series: &TimeSeries, period: usize) -> Result<TbatsLiteModel> {
    if period < 2 {
        return fit_impl(series, None);
    }
    fit_impl(series, Some(period))
}

fn fit_impl(series: &TimeSeries, seasonal_period: Option<usize>) -> Result<TbatsLiteModel> {
    let n = series.len();
    if n < 20 {
        return Err(Error::InsufficientData {
            required: 20,
            actual: n,
        });
    }
    let values = series.values();
    let all_positive = values.iter().all(|v| *v > 0.0);
    let lambdas: &[f64] = if all_positive { &LAMBDA_GRID } else { &[1.0] };
    let log_sum: f64 = if all_positive {
        values.iter().map(|v| v.ln()).sum()
    } else {
        0.0
    };

    // Stage 1: pick lambda with the plain smoother, comparing on the
    // original scale via the transform's log-Jacobian.
    let mut chosen_lambda = 1.0;
    let mut chosen_score = f64::INFINITY;
    let mut transformed_cache: Option<Vec<f64>> = None;
    for &lambda in lambdas {
        let y: Vec<f64> = values.iter().map(|v| box_cox(*v, lambda)).collect();
        let spec = FilterSpec {
            lambda,
            p: 0,
            q: 0,
            seasonal_period,
        };
        if let Some((aic, _)) = fit_structure(&y, &spec) {
            let score = aic - 2.0 * (lambda - 1.0) * log_sum;
            if score < chosen_score {
                chosen_score = score;
                chosen_lambda = lambda;
                transformed_cache = Some(y);
            }
        }
    }

    let Some(y) = transformed_cache else {
        return Ok(ses_fallback(values));
    };

    // Stage 2: ARMA error orders at the chosen transform.
    let mut best: Option<TbatsLiteModel> = None;
    let mut best_aic = f64::INFINITY;
    for (p, q) in ARMA_ORDERS {
        let spec = FilterSpec {
            lambda: chosen_lambda,
            p,
            q,
            seasonal_period,
        };
        if let Some((aic, model)) = fit_structure(&y, &spec) {
            if aic < best_aic {
                best_aic = aic;
                best = Some(model);
            }
        }
    }
    Ok(best.unwrap_or_else(|| ses_fallback(values)))
}

/// Level-only exponential smoothing, used when optimization fails.
fn ses_fallback(values: &[f64]) -> TbatsLiteModel {
    let mut best_level = values[0];
    let mut best_sse = f64::INFINITY;
    let mut best_alpha = 0.5;
    for step in 1..=9 {
        let alpha = step as f64 / 10.0;
        let mut level = values[0];
        let mut sse = 0.0;
        for &v in &values[1..] {
            let err = v - level;
            sse += err * err;
            level += alpha * err;
        }
        if sse < best_sse {
            best_sse = sse;
            best_alpha = alpha;
            best_level = level;
        }
    }
    TbatsLiteModel {
        box_cox_lambda: 1.0,
        alpha: best_alpha,
        beta: 0.0,
        damping: 1.0,
        ar_coeffs: vec![],
        ma_coeffs: vec![],
        level: best_level,
        trend: 0.0,
        seasonal: None,
        aic: f64::NAN,
        fallback: true,
        recent_shocks: vec![0.0, 0.0],
        recent_errors: vec![0.0, 0.0],
    }
}
