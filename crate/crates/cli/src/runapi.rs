//! Orchestration shared by the binary and the test suites.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use tsbench_core::eval::{median_rank_table, run_grid, MetricsRow};
use tsbench_core::report::{metrics_to_csv, rank_table_to_csv, MetricsRecord};

use crate::config::RunConfig;
use crate::manifest::{sha256_hex, Manifest, OutputChecksum};

pub struct RunArtifacts {
    pub rows: Vec<MetricsRow>,
    pub metrics_path: PathBuf,
    pub ranks_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Execute the configured grid inside a dedicated thread pool and write
/// metrics CSV, rank CSV and the manifest into the output directory.
pub fn execute_run(config: &RunConfig, out_dir: &Path) -> Result<RunArtifacts> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let settings = config.settings();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .context("building thread pool")?;
    let rows = pool.install(|| run_grid(&settings, config.replications, config.seed_base, true))?;

    let metrics_csv = metrics_to_csv(&rows);
    let metrics_path = out_dir.join("metrics.csv");
    std::fs::write(&metrics_path, &metrics_csv)
        .with_context(|| format!("writing {}", metrics_path.display()))?;

    let ml_window = rank_window(config);
    let ranks_csv = match median_rank_table(&rows, ml_window) {
        Ok(table) => rank_table_to_csv(&table),
        // A partial grid (e.g. a single method) has no rank table; record
        // why instead of failing the run.
        Err(e) => format!("# rank table unavailable: {e}\n"),
    };
    let ranks_path = out_dir.join("ranks.csv");
    std::fs::write(&ranks_path, &ranks_csv)
        .with_context(|| format!("writing {}", ranks_path.display()))?;

    let manifest = Manifest::new(
        config,
        vec![
            OutputChecksum {
                file: "metrics.csv".into(),
                sha256: sha256_hex(metrics_csv.as_bytes()),
            },
            OutputChecksum {
                file: "ranks.csv".into(),
                sha256: sha256_hex(ranks_csv.as_bytes()),
            },
        ],
    );
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest.to_json())
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    Ok(RunArtifacts {
        rows,
        metrics_path,
        ranks_path,
        manifest_path,
    })
}

/// Window used for the summary ranking: eight when present, otherwise the
/// smallest configured window.
pub fn rank_window(config: &RunConfig) -> usize {
    if config.windows.contains(&8) {
        8
    } else {
        *config.windows.iter().min().expect("validated nonempty")
    }
}

/// Rebuild a rank CSV from a previously written metrics CSV.
pub fn rank_from_records(records: &[MetricsRecord], ml_window: usize) -> Result<String> {
    let rows = records_to_rows(records)?;
    let table = median_rank_table(&rows, ml_window)?;
    Ok(rank_table_to_csv(&table))
}

/// Lift parsed records back into rows so the ranking code can consume
/// them. The per-replication log is reduced to the aggregate; MSE is all
/// ranking needs.
fn records_to_rows(records: &[MetricsRecord]) -> Result<Vec<MetricsRow>> {
    use tsbench_core::eval::{DataSpec, MethodSpec, OverlayKind, ReplicationOutcome, Setting, Source};

    records
        .iter()
        .map(|r| {
            let source = Source::from_name(&r.source)
                .with_context(|| format!("unknown source '{}' in metrics", r.source))?;
            let overlay_kind = OverlayKind::from_name(&r.overlay)
                .with_context(|| format!("unknown overlay '{}' in metrics", r.overlay))?;
            let overlay = overlay_kind.to_spec(&tsbench_core::dgp::OverlaySpec::none());
            let method = MethodSpec::from_id(&r.method, r.window.unwrap_or(8))
                .with_context(|| format!("unknown method '{}' in metrics", r.method))?;
            let outcome = ReplicationOutcome {
                actual: 0.0,
                forecast: 0.0,
                squared_error: r.mse,
                ape: Some(r.mape).filter(|m| m.is_finite()),
                used_fallback: false,
            };
            Ok(MetricsRow {
                setting: Setting {
                    data: DataSpec::new(source, overlay, r.n),
                    method,
                },
                replications: r.replications,
                seed_base: r.seed_base,
                outcomes: vec![outcome],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsbench_core::report::parse_metrics_csv;

    fn tiny_config(dir: &Path) -> RunConfig {
        RunConfig::from_json(&format!(
            r#"{{
                "sources": ["ar", "mm1"],
                "overlays": ["none", "jump"],
                "lengths": [100],
                "methods": ["naive", "rf_diff"],
                "windows": [4],
                "replications": 3,
                "seed_base": 11,
                "parallelism": 2,
                "output_dir": "{}"
            }}"#,
            dir.display()
        ))
        .unwrap()
    }

    #[test]
    fn run_writes_reproducible_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path());
        let a = execute_run(&config, &dir.path().join("a")).unwrap();
        let b = execute_run(&config, &dir.path().join("b")).unwrap();
        let bytes_a = std::fs::read(&a.metrics_path).unwrap();
        let bytes_b = std::fs::read(&b.metrics_path).unwrap();
        assert_eq!(bytes_a, bytes_b);

        // Manifest checksums match the files on disk.
        let manifest = Manifest::load(&a.manifest_path).unwrap();
        for output in &manifest.outputs {
            let data = std::fs::read(a.metrics_path.parent().unwrap().join(&output.file)).unwrap();
            assert_eq!(sha256_hex(&data), output.sha256, "{}", output.file);
        }

        // A manifest-driven rerun reproduces identical outputs.
        let c = execute_run(&manifest.config, &dir.path().join("c")).unwrap();
        assert_eq!(std::fs::read(&c.metrics_path).unwrap(), bytes_a);
    }

    #[test]
    fn rank_from_metrics_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(dir.path());
        config.methods = vec!["naive".into(), "arima".into(), "rf_diff".into()];
        let artifacts = execute_run(&config, &dir.path().join("a")).unwrap();
        let text = std::fs::read_to_string(&artifacts.metrics_path).unwrap();
        let records = parse_metrics_csv(&text).unwrap();
        let rank_csv = rank_from_records(&records, 4).unwrap();
        let on_disk = std::fs::read_to_string(&artifacts.ranks_path).unwrap();
        assert_eq!(rank_csv, on_disk);
        assert!(rank_csv.starts_with("method,"));
    }
}
