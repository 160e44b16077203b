//! Stable CSV encodings of evaluation outputs.
//!
//! Formatting goes through Rust's shortest-round-trip float printing, so
//! identical runs serialize to identical bytes.

use crate::error::{Error, Result};
use crate::eval::rank::RankTable;
use crate::eval::runner::MetricsRow;

pub const METRICS_HEADER: &str = "source,overlay,n,method,window,differenced,replications,seed_base,mse,mape,n_evaluated,n_skipped_zero_actual,fallbacks";

/// One parsed metrics line; the summary level the reporting tools consume.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub source: String,
    pub overlay: String,
    pub n: usize,
    pub method: String,
    pub window: Option<usize>,
    pub differenced: bool,
    pub replications: usize,
    pub seed_base: u64,
    pub mse: f64,
    pub mape: f64,
    pub n_evaluated: usize,
    pub n_skipped_zero_actual: usize,
    pub fallbacks: usize,
}

impl MetricsRecord {
    pub fn from_row(row: &MetricsRow) -> Self {
        let metrics = row.metrics();
        Self {
            source: row.setting.data.source.name(),
            overlay: row.setting.data.overlay.kind().name().to_string(),
            n: row.setting.data.n,
            method: row.setting.method.id(),
            window: row.setting.method.window,
            differenced: row.setting.method.differenced,
            replications: row.replications,
            seed_base: row.seed_base,
            mse: metrics.mse,
            mape: metrics.mape,
            n_evaluated: metrics.n_evaluated,
            n_skipped_zero_actual: metrics.n_skipped_zero_actual,
            fallbacks: row.fallback_count(),
        }
    }

    fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.source,
            self.overlay,
            self.n,
            self.method,
            self.window.map_or(String::new(), |w| w.to_string()),
            self.differenced,
            self.replications,
            self.seed_base,
            self.mse,
            self.mape,
            self.n_evaluated,
            self.n_skipped_zero_actual,
            self.fallbacks
        )
    }
}

/// Encode rows as CSV, one line per setting, in the order given.
pub fn metrics_to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&MetricsRecord::from_row(row).to_line());
        out.push('\n');
    }
    out
}

pub fn records_to_csv(records: &[MetricsRecord]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

/// Parse a metrics CSV produced by [`metrics_to_csv`].
pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty metrics file".into()))?;
    if header.trim() != METRICS_HEADER {
        return Err(Error::InvalidArgument(format!(
            "unexpected metrics header: {header}"
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(Error::InvalidArgument(format!(
                "line {}: expected 13 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_err = |what: &str, v: &str| {
            Error::InvalidArgument(format!("line {}: bad {what}: {v}", lineno + 2))
        };
        records.push(MetricsRecord {
            source: fields[0].to_string(),
            overlay: fields[1].to_string(),
            n: fields[2].parse().map_err(|_| parse_err("n", fields[2]))?,
            method: fields[3].to_string(),
            window: if fields[4].is_empty() {
                None
            } else {
                Some(fields[4].parse().map_err(|_| parse_err("window", fields[4]))?)
            },
            differenced: fields[5]
                .parse()
                .map_err(|_| parse_err("differenced", fields[5]))?,
            replications: fields[6]
                .parse()
                .map_err(|_| parse_err("replications", fields[6]))?,
            seed_base: fields[7]
                .parse()
                .map_err(|_| parse_err("seed_base", fields[7]))?,
            mse: fields[8].parse().map_err(|_| parse_err("mse", fields[8]))?,
            mape: fields[9].parse().map_err(|_| parse_err("mape", fields[9]))?,
            n_evaluated: fields[10]
                .parse()
                .map_err(|_| parse_err("n_evaluated", fields[10]))?,
            n_skipped_zero_actual: fields[11]
                .parse()
                .map_err(|_| parse_err("n_skipped_zero_actual", fields[11]))?,
            fallbacks: fields[12]
                .parse()
                .map_err(|_| parse_err("fallbacks", fields[12]))?,
        });
    }
    Ok(records)
}

/// Encode the median-rank table, methods as rows and groups as columns.
pub fn rank_table_to_csv(table: &RankTable) -> String {
    let mut out = String::from("method");
    for group in &table.groups {
        out.push(',');
        out.push_str(group.name());
    }
    out.push('\n');
    for (m, method) in table.methods.iter().enumerate() {
        out.push_str(method);
        for g in 0..table.groups.len() {
            out.push(',');
            out.push_str(&table.medians[g][m].to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{DgpKind, OverlaySpec};
    use crate::eval::runner::run_setting;
    use crate::eval::setting::{DataSpec, MethodKind, MethodSpec, Setting, Source};

    #[test]
    fn csv_round_trip() {
        let setting = Setting {
            data: DataSpec::new(Source::Dgp(DgpKind::Nar1), OverlaySpec::both(), 60),
            method: MethodSpec::tree(MethodKind::RandomForest, 4, true),
        };
        let row = run_setting(&setting, 3, 99).unwrap();
        let csv = metrics_to_csv(std::slice::from_ref(&row));
        let parsed = parse_metrics_csv(&csv).unwrap();
        assert_eq!(parsed.len(), 1);
        let rec = &parsed[0];
        assert_eq!(rec.source, "nar1");
        assert_eq!(rec.overlay, "both");
        assert_eq!(rec.method, "rf_diff");
        assert_eq!(rec.window, Some(4));
        assert_eq!(rec.mse, row.metrics().mse);
        assert_eq!(records_to_csv(&parsed), csv);
    }

    #[test]
    fn header_is_validated() {
        assert!(parse_metrics_csv("").is_err());
        assert!(parse_metrics_csv("a,b,c\n1,2,3\n").is_err());
    }
}
