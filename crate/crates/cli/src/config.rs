//! Run configuration: JSON with defaults matching the full study grid.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use tsbench_core::dgp::{JumpRegime, JumpSpec, OverlaySpec, RandomWalkSpec};
use tsbench_core::eval::{data_grid, DataSpec, MethodSpec, OverlayKind, Setting, Source};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct JumpConfig {
    pub sigma_p_sq: f64,
    /// "dense": per-step jump counts are Poisson(n/10), the regime that
    /// reproduces the published error growth with series length.
    /// "sparse": about ten jumps across the horizon.
    pub regime: String,
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self {
            sigma_p_sq: 1.0,
            regime: "dense".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RandomWalkConfig {
    pub snr_target: f64,
}

impl Default for RandomWalkConfig {
    fn default() -> Self {
        Self { snr_target: 4.0 }
    }
}

/// Experiment selection plus execution knobs. An empty JSON object is the
/// full study: every source, all four overlay scenarios, all three
/// lengths, all eight methods at window eight, a thousand replications.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sources: Vec<String>,
    pub overlays: Vec<String>,
    pub lengths: Vec<usize>,
    pub methods: Vec<String>,
    pub windows: Vec<usize>,
    pub replications: usize,
    pub seed_base: u64,
    /// Worker threads; zero means one per core.
    pub parallelism: usize,
    pub output_dir: String,
    pub burn_in: usize,
    pub jump: JumpConfig,
    pub random_walk: RandomWalkConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sources: tsbench_core::eval::default_sources()
                .iter()
                .map(|s| s.name())
                .collect(),
            overlays: tsbench_core::eval::ALL_OVERLAYS
                .iter()
                .map(|o| o.name().to_string())
                .collect(),
            lengths: vec![100, 500, 1000],
            methods: vec![
                "rf".into(),
                "rf_diff".into(),
                "xgb".into(),
                "xgb_diff".into(),
                "arima".into(),
                "sarima".into(),
                "tbats".into(),
                "naive".into(),
            ],
            windows: vec![8],
            replications: 1000,
            seed_base: 42,
            parallelism: 0,
            output_dir: "out".to_string(),
            burn_in: 100,
            jump: JumpConfig::default(),
            random_walk: RandomWalkConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text).context("parsing run config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (i, name) in self.sources.iter().enumerate() {
            if Source::from_name(name).is_none() {
                bail!("sources[{i}]: unknown source '{name}'");
            }
        }
        for (i, name) in self.overlays.iter().enumerate() {
            if OverlayKind::from_name(name).is_none() {
                bail!("overlays[{i}]: unknown overlay '{name}'");
            }
        }
        for (i, n) in self.lengths.iter().enumerate() {
            if *n < 30 {
                bail!("lengths[{i}]: length {n} is below the minimum of 30");
            }
        }
        for (i, id) in self.methods.iter().enumerate() {
            if MethodSpec::from_id(id, 8).is_none() {
                bail!("methods[{i}]: unknown method '{id}'");
            }
        }
        for (i, w) in self.windows.iter().enumerate() {
            if ![2usize, 4, 8, 16].contains(w) {
                bail!("windows[{i}]: window {w} not one of 2, 4, 8, 16");
            }
        }
        if self.replications == 0 {
            bail!("replications: must be at least 1");
        }
        if self.sources.is_empty() || self.overlays.is_empty() || self.lengths.is_empty() {
            bail!("sources, overlays and lengths must be nonempty");
        }
        if self.methods.is_empty() || self.windows.is_empty() {
            bail!("methods and windows must be nonempty");
        }
        match self.jump.regime.as_str() {
            "dense" | "sparse" => {}
            other => bail!("jump.regime: '{other}' is not 'dense' or 'sparse'"),
        }
        if !(self.jump.sigma_p_sq >= 0.0) {
            bail!("jump.sigma_p_sq: must be >= 0");
        }
        if !(self.random_walk.snr_target > 0.0) {
            bail!("random_walk.snr_target: must be > 0");
        }
        Ok(())
    }

    pub fn overlay_base(&self) -> OverlaySpec {
        OverlaySpec {
            jump: Some(JumpSpec {
                sigma_p_sq: self.jump.sigma_p_sq,
                regime: if self.jump.regime == "sparse" {
                    JumpRegime::Sparse
                } else {
                    JumpRegime::Dense
                },
            }),
            random_walk: Some(RandomWalkSpec {
                snr_target: self.random_walk.snr_target,
            }),
        }
    }

    /// The data cells selected by this config.
    pub fn data_cells(&self) -> Vec<DataSpec> {
        let sources: Vec<Source> = self
            .sources
            .iter()
            .map(|s| Source::from_name(s).expect("validated"))
            .collect();
        let overlays: Vec<OverlayKind> = self
            .overlays
            .iter()
            .map(|o| OverlayKind::from_name(o).expect("validated"))
            .collect();
        let mut cells = data_grid(&sources, &overlays, &self.lengths, &self.overlay_base());
        for cell in &mut cells {
            cell.burn_in = self.burn_in;
        }
        cells
    }

    /// The full setting list: every data cell crossed with every method,
    /// tree methods expanded over the window list.
    pub fn settings(&self) -> Vec<Setting> {
        let mut methods: Vec<MethodSpec> = Vec::new();
        for id in &self.methods {
            let probe = MethodSpec::from_id(id, self.windows[0]).expect("validated");
            if probe.is_tree() {
                for w in &self.windows {
                    methods.push(MethodSpec::from_id(id, *w).expect("validated"));
                }
            } else {
                methods.push(probe);
            }
        }
        let mut settings = Vec::new();
        for data in self.data_cells() {
            for method in &methods {
                settings.push(Setting {
                    data: data.clone(),
                    method: *method,
                });
            }
        }
        settings
    }

    /// Settings per method family (the grid size the study quotes).
    pub fn settings_per_method(&self) -> usize {
        self.data_cells().len()
    }
}
