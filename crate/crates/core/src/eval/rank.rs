//! Per-setting method ranking and the cross-setting median-rank table.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::runner::MetricsRow;
use crate::eval::setting::OverlayKind;

/// Average-tie ranks of a value vector: rank 1 for the smallest, tied
/// values share the mean of the positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*a].partial_cmp(&values[*b]).expect("finite metric"));
    let mut ranks = vec![0.0; values.len()];
    let mut at = 0usize;
    while at < order.len() {
        let mut end = at + 1;
        while end < order.len() && values[order[end]] == values[order[at]] {
            end += 1;
        }
        // Positions at..end (0-based) share the mean 1-based rank.
        let mean_rank = (at + 1 + end) as f64 / 2.0;
        for &idx in &order[at..end] {
            ranks[idx] = mean_rank;
        }
        at = end;
    }
    ranks
}

/// Rank the methods evaluated on one data cell by ascending MSE.
pub fn rank_methods(rows: &[&MetricsRow]) -> Result<Vec<f64>> {
    if rows.len() < 2 {
        return Err(Error::InvalidArgument(
            "ranking needs at least two methods".into(),
        ));
    }
    let fingerprint = rows[0].setting.data.fingerprint();
    if rows
        .iter()
        .any(|r| r.setting.data.fingerprint() != fingerprint)
    {
        return Err(Error::InvalidArgument(
            "ranking across mixed data settings".into(),
        ));
    }
    let mses: Vec<f64> = rows.iter().map(|r| r.metrics().mse).collect();
    Ok(average_ranks(&mses))
}

/// Setting families aggregated in the summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SettingGroup {
    Queueing,
    NoComplexity,
    Jump,
    RandomWalk,
    Both,
}

pub const ALL_GROUPS: [SettingGroup; 5] = [
    SettingGroup::Queueing,
    SettingGroup::NoComplexity,
    SettingGroup::Jump,
    SettingGroup::RandomWalk,
    SettingGroup::Both,
];

impl SettingGroup {
    pub fn name(&self) -> &'static str {
        match self {
            SettingGroup::Queueing => "queueing",
            SettingGroup::NoComplexity => "none",
            SettingGroup::Jump => "jump",
            SettingGroup::RandomWalk => "random_walk",
            SettingGroup::Both => "both",
        }
    }

    pub fn of(row: &MetricsRow) -> Self {
        if row.setting.data.source.is_queue() {
            return SettingGroup::Queueing;
        }
        match row.setting.data.overlay.kind() {
            OverlayKind::None => SettingGroup::NoComplexity,
            OverlayKind::Jump => SettingGroup::Jump,
            OverlayKind::RandomWalk => SettingGroup::RandomWalk,
            OverlayKind::Both => SettingGroup::Both,
        }
    }
}

/// Median rank per method and group.
#[derive(Debug, Clone)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub groups: Vec<SettingGroup>,
    /// medians[g][m] pairs with groups[g] and methods[m].
    pub medians: Vec<Vec<f64>>,
}

impl RankTable {
    pub fn median_for(&self, method: &str, group: SettingGroup) -> Option<f64> {
        let m = self.methods.iter().position(|id| id == method)?;
        let g = self.groups.iter().position(|gr| *gr == group)?;
        Some(self.medians[g][m])
    }
}

fn median(sorted: &mut [f64]) -> f64 {
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite rank"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Build the summary table from a full grid of rows. Tree-ensemble rows
/// enter at the given window width only; a data cell missing any method
/// is reported as an incomplete-grid error.
pub fn median_rank_table(rows: &[MetricsRow], ml_window: usize) -> Result<RankTable> {
    let kept: Vec<&MetricsRow> = rows
        .iter()
        .filter(|r| !r.setting.method.is_tree() || r.setting.method.window == Some(ml_window))
        .collect();
    if kept.is_empty() {
        return Err(Error::MissingCell("no rows after window filtering".into()));
    }

    let mut methods: Vec<String> = kept.iter().map(|r| r.setting.method.id()).collect();
    methods.sort();
    methods.dedup();

    let mut by_cell: BTreeMap<String, Vec<&MetricsRow>> = BTreeMap::new();
    for row in kept {
        by_cell
            .entry(row.setting.data.fingerprint())
            .or_default()
            .push(row);
    }

    let mut group_ranks: BTreeMap<(SettingGroup, String), Vec<f64>> = BTreeMap::new();
    for (cell, mut cell_rows) in by_cell {
        cell_rows.sort_by_key(|r| r.setting.method.id());
        let ids: Vec<String> = cell_rows.iter().map(|r| r.setting.method.id()).collect();
        if ids != methods {
            let missing: Vec<&String> = methods.iter().filter(|m| !ids.contains(m)).collect();
            return Err(Error::MissingCell(format!(
                "cell {cell} lacks methods {missing:?}"
            )));
        }
        let ranks = rank_methods(&cell_rows)?;
        let group = SettingGroup::of(cell_rows[0]);
        for (row, rank) in cell_rows.iter().zip(ranks) {
            group_ranks
                .entry((group, row.setting.method.id()))
                .or_default()
                .push(rank);
        }
    }

    let groups: Vec<SettingGroup> = ALL_GROUPS
        .iter()
        .copied()
        .filter(|g| group_ranks.keys().any(|(gr, _)| gr == g))
        .collect();
    let medians = groups
        .iter()
        .map(|g| {
            methods
                .iter()
                .map(|m| {
                    let mut ranks = group_ranks
                        .get(&(*g, m.clone()))
                        .cloned()
                        .expect("validated complete");
                    median(&mut ranks)
                })
                .collect()
        })
        .collect();

    Ok(RankTable {
        methods,
        groups,
        medians,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{DgpKind, OverlaySpec};
    use crate::eval::runner::{ReplicationOutcome, MetricsRow};
    use crate::eval::setting::{DataSpec, MethodSpec, Setting, Source};

    #[test]
    fn rank_examples() {
        assert_eq!(average_ranks(&[2.0, 1.0, 3.0]), vec![2.0, 1.0, 3.0]);
        assert_eq!(average_ranks(&[1.0, 1.0, 3.0]), vec![1.5, 1.5, 3.0]);
        assert_eq!(average_ranks(&[5.0]), vec![1.0]);
    }

    fn fake_row(method: MethodSpec, mse: f64, data: &DataSpec) -> MetricsRow {
        MetricsRow {
            setting: Setting {
                data: data.clone(),
                method,
            },
            replications: 1,
            seed_base: 0,
            outcomes: vec![ReplicationOutcome {
                actual: 1.0,
                forecast: 1.0 - mse.sqrt(),
                squared_error: mse,
                ape: Some(100.0 * mse.sqrt()),
                used_fallback: false,
            }],
        }
    }

    #[test]
    fn mixed_settings_are_rejected() {
        let a = DataSpec::new(Source::Dgp(DgpKind::Ar), OverlaySpec::none(), 100);
        let b = DataSpec::new(Source::Dgp(DgpKind::Nma), OverlaySpec::none(), 100);
        let rows = vec![
            fake_row(MethodSpec::from_id("naive", 8).unwrap(), 1.0, &a),
            fake_row(MethodSpec::from_id("arima", 8).unwrap(), 2.0, &b),
        ];
        let refs: Vec<&MetricsRow> = rows.iter().collect();
        assert!(rank_methods(&refs).is_err());
    }

    #[test]
    fn rank_sum_is_permutation_invariant() {
        let data = DataSpec::new(Source::Dgp(DgpKind::Ar), OverlaySpec::none(), 100);
        let rows: Vec<MetricsRow> = ["naive", "arima", "sarima", "tbats"]
            .iter()
            .enumerate()
            .map(|(i, id)| {
                fake_row(
                    MethodSpec::from_id(id, 8).unwrap(),
                    1.0 + (i % 2) as f64,
                    &data,
                )
            })
            .collect();
        let refs: Vec<&MetricsRow> = rows.iter().collect();
        let ranks = rank_methods(&refs).unwrap();
        let k = ranks.len() as f64;
        let sum: f64 = ranks.iter().sum();
        assert!((sum - k * (k + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_setting_group_median_is_that_rank() {
        let data = DataSpec::new(Source::Dgp(DgpKind::Ar), OverlaySpec::none(), 100);
        let rows = vec![
            fake_row(MethodSpec::from_id("naive", 8).unwrap(), 4.0, &data),
            fake_row(MethodSpec::from_id("arima", 8).unwrap(), 1.0, &data),
        ];
        let table = median_rank_table(&rows, 8).unwrap();
        assert_eq!(
            table.median_for("arima", SettingGroup::NoComplexity),
            Some(1.0)
        );
        assert_eq!(
            table.median_for("naive", SettingGroup::NoComplexity),
            Some(2.0)
        );
    }

    #[test]
    fn incomplete_grid_is_reported() {
        let a = DataSpec::new(Source::Dgp(DgpKind::Ar), OverlaySpec::none(), 100);
        let b = DataSpec::new(Source::Dgp(DgpKind::Nma), OverlaySpec::none(), 100);
        let rows = vec![
            fake_row(MethodSpec::from_id("naive", 8).unwrap(), 1.0, &a),
            fake_row(MethodSpec::from_id("arima", 8).unwrap(), 2.0, &a),
            fake_row(MethodSpec::from_id("naive", 8).unwrap(), 1.0, &b),
        ];
        match median_rank_table(&rows, 8) {
            Err(Error::MissingCell(msg)) => assert!(msg.contains("arima"), "{msg}"),
            other => panic!("expected missing-cell error, got {other:?}"),
        }
    }

    #[test]
    fn window_filter_keeps_single_tree_entry() {
        let data = DataSpec::new(Source::Dgp(DgpKind::Ar), OverlaySpec::none(), 100);
        let rows = vec![
            fake_row(MethodSpec::tree(crate::eval::setting::MethodKind::RandomForest, 8, false), 1.0, &data),
            fake_row(MethodSpec::tree(crate::eval::setting::MethodKind::RandomForest, 16, false), 0.5, &data),
            fake_row(MethodSpec::from_id("naive", 8).unwrap(), 2.0, &data),
        ];
        let table = median_rank_table(&rows, 8).unwrap();
        assert_eq!(table.methods, vec!["naive".to_string(), "rf".to_string()]);
        assert_eq!(table.median_for("rf", SettingGroup::NoComplexity), Some(1.0));
    }
}
