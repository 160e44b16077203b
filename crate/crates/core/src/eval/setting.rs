//! The benchmark grid: data sources, overlays, lengths and methods.

use crate::dgp::{DgpKind, OverlaySpec, ALL_DGPS};
use crate::queue::QueueSpec;

/// Where a setting's series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Dgp(DgpKind),
    Queue(QueueSpec),
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Dgp(kind) => kind.name().to_string(),
            Source::Queue(spec) => spec.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if let Some(kind) = DgpKind::from_name(name) {
            return Some(Source::Dgp(kind));
        }
        match name {
            "mm1" => Some(Source::Queue(QueueSpec::mm1())),
            "mm2" => Some(Source::Queue(QueueSpec::mm2())),
            _ => None,
        }
    }

    pub fn is_queue(&self) -> bool {
        matches!(self, Source::Queue(_))
    }
}

/// The four complexity scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlayKind {
    None,
    Jump,
    RandomWalk,
    Both,
}

pub const ALL_OVERLAYS: [OverlayKind; 4] = [
    OverlayKind::None,
    OverlayKind::Jump,
    OverlayKind::RandomWalk,
    OverlayKind::Both,
];

impl OverlayKind {
    pub fn name(&self) -> &'static str {
        match self {
            OverlayKind::None => "none",
            OverlayKind::Jump => "jump",
            OverlayKind::RandomWalk => "random_walk",
            OverlayKind::Both => "both",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ALL_OVERLAYS.iter().copied().find(|k| k.name() == name)
    }

    pub fn to_spec(self, base: &OverlaySpec) -> OverlaySpec {
        OverlaySpec {
            jump: match self {
                OverlayKind::Jump | OverlayKind::Both => base.jump.or(OverlaySpec::jump().jump),
                _ => None,
            },
            random_walk: match self {
                OverlayKind::RandomWalk | OverlayKind::Both => {
                    base.random_walk.or(OverlaySpec::random_walk().random_walk)
                }
                _ => None,
            },
        }
    }
}

impl OverlaySpec {
    pub fn kind(&self) -> OverlayKind {
        match (self.jump.is_some(), self.random_walk.is_some()) {
            (false, false) => OverlayKind::None,
            (true, false) => OverlayKind::Jump,
            (false, true) => OverlayKind::RandomWalk,
            (true, true) => OverlayKind::Both,
        }
    }
}

/// One data-generating cell of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub source: Source,
    pub overlay: OverlaySpec,
    pub n: usize,
    pub burn_in: usize,
}

impl DataSpec {
    pub fn new(source: Source, overlay: OverlaySpec, n: usize) -> Self {
        Self {
            source,
            overlay,
            n,
            burn_in: 100,
        }
    }

    /// Stable identity used for seed derivation and row ordering. Only the
    /// structural coordinates enter: parameter tweaks reuse the same
    /// random streams, which keeps sensitivity runs paired.
    pub fn fingerprint(&self) -> String {
        format!(
            "src={}|ov={}|n={}",
            self.source.name(),
            self.overlay.kind().name(),
            self.n
        )
    }
}

/// Forecasting method families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Naive,
    Arima,
    Sarima,
    Tbats,
    RandomForest,
    Boosted,
}

/// A method plus its featurization choices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    /// Sliding window width; only meaningful for tree ensembles.
    pub window: Option<usize>,
    pub differenced: bool,
}

impl MethodSpec {
    pub fn statistical(kind: MethodKind) -> Self {
        Self {
            kind,
            window: None,
            differenced: false,
        }
    }

    pub fn tree(kind: MethodKind, window: usize, differenced: bool) -> Self {
        Self {
            kind,
            window: Some(window),
            differenced,
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(self.kind, MethodKind::RandomForest | MethodKind::Boosted)
    }

    /// Method identifier as used in reports ("rf_diff", "arima", ...).
    pub fn id(&self) -> String {
        let base = match self.kind {
            MethodKind::Naive => "naive",
            MethodKind::Arima => "arima",
            MethodKind::Sarima => "sarima",
            MethodKind::Tbats => "tbats",
            MethodKind::RandomForest => "rf",
            MethodKind::Boosted => "xgb",
        };
        if self.is_tree() && self.differenced {
            format!("{base}_diff")
        } else {
            base.to_string()
        }
    }

    pub fn from_id(id: &str, window: usize) -> Option<Self> {
        match id {
            "naive" => Some(Self::statistical(MethodKind::Naive)),
            "arima" => Some(Self::statistical(MethodKind::Arima)),
            "sarima" => Some(Self::statistical(MethodKind::Sarima)),
            "tbats" => Some(Self::statistical(MethodKind::Tbats)),
            "rf" => Some(Self::tree(MethodKind::RandomForest, window, false)),
            "rf_diff" => Some(Self::tree(MethodKind::RandomForest, window, true)),
            "xgb" => Some(Self::tree(MethodKind::Boosted, window, false)),
            "xgb_diff" => Some(Self::tree(MethodKind::Boosted, window, true)),
            _ => None,
        }
    }
}

/// The eight benchmark methods at one window width.
pub fn default_methods(window: usize) -> Vec<MethodSpec> {
    vec![
        MethodSpec::tree(MethodKind::RandomForest, window, false),
        MethodSpec::tree(MethodKind::RandomForest, window, true),
        MethodSpec::tree(MethodKind::Boosted, window, false),
        MethodSpec::tree(MethodKind::Boosted, window, true),
        MethodSpec::statistical(MethodKind::Arima),
        MethodSpec::statistical(MethodKind::Sarima),
        MethodSpec::statistical(MethodKind::Tbats),
        MethodSpec::statistical(MethodKind::Naive),
    ]
}

/// One benchmark task: a data cell evaluated by one method.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub data: DataSpec,
    pub method: MethodSpec,
}

impl Setting {
    pub fn fingerprint(&self) -> String {
        format!(
            "{}|m={}|w={}",
            self.data.fingerprint(),
            self.method.id(),
            self.method.window.map_or("-".to_string(), |w| w.to_string())
        )
    }
}

/// Enumerate the data grid: every DGP crossed with every overlay, plus the
/// queue sources (no overlays), all crossed with the lengths.
pub fn data_grid(
    sources: &[Source],
    overlays: &[OverlayKind],
    lengths: &[usize],
    base_overlay: &OverlaySpec,
) -> Vec<DataSpec> {
    let mut grid = Vec::new();
    for n in lengths {
        for source in sources {
            match source {
                Source::Dgp(_) => {
                    for kind in overlays {
                        grid.push(DataSpec::new(
                            source.clone(),
                            kind.to_spec(base_overlay),
                            *n,
                        ));
                    }
                }
                Source::Queue(_) => {
                    grid.push(DataSpec::new(source.clone(), OverlaySpec::none(), *n));
                }
            }
        }
    }
    grid
}

pub fn default_sources() -> Vec<Source> {
    let mut sources: Vec<Source> = ALL_DGPS.iter().copied().map(Source::Dgp).collect();
    sources.push(Source::Queue(QueueSpec::mm1()));
    sources.push(Source::Queue(QueueSpec::mm2()));
    sources
}
