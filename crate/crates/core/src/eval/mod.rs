//! One-step evaluation protocol: the setting grid, the replication
//! runner, method ranking and rolling-origin validation.

pub mod rank;
pub mod rolling;
pub mod runner;
pub mod setting;

pub use rank::{
    average_ranks, median_rank_table, rank_methods, RankTable, SettingGroup, ALL_GROUPS,
};
pub use rolling::rolling_cv;
pub use runner::{
    generate_series, one_step_forecast, replication_seed, run_grid, run_setting,
    run_setting_mode, MetricsRow, ReplicationOutcome,
};
pub use setting::{
    data_grid, default_methods, default_sources, DataSpec, MethodKind, MethodSpec, OverlayKind,
    Setting, Source, ALL_OVERLAYS,
};
