//! Statistical one-step forecasters.

pub mod arima;
pub mod kpss;
pub mod optim;
pub mod tbats;

pub use arima::{
    ar_is_stationary, fit_arima, fit_sarima, fit_sarima_with, naive_forecast, ArimaBounds,
    ArimaModel, ArimaOrder, SeasonalOrder,
};
pub use kpss::{kpss_level_stat, select_d, KPSS_CRIT_5PCT};
pub use tbats::{fit_tbats_lite, fit_tbats_lite_seasonal, TbatsLiteModel};
