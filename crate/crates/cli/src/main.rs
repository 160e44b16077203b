use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tsbench_cli::config::RunConfig;
use tsbench_cli::demand::{
    demand_scores_to_csv, evaluate_demand, load_demand_csv, BUNDLED_DEMAND_CSV, DEFAULT_COLUMNS,
};
use tsbench_cli::plot::emit_plots;
use tsbench_cli::runapi::{execute_run, rank_from_records};
use tsbench_core::eval::{generate_series, DataSpec, MethodSpec, OverlayKind, Source};
use tsbench_core::report::parse_metrics_csv;
use tsbench_core::seed::mix;

/// Simulation benchmark for one-step time-series forecasters.
#[derive(Parser)]
#[command(name = "tsbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON config; omitted means the full default grid.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's replication count.
    #[arg(long)]
    replications: Option<usize>,
    /// Override the config's worker-thread count (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; defaults to the config's output_dir joined to
    /// the TSBENCH_OUT root when that variable is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<(RunConfig, PathBuf)> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed_base = seed;
        }
        if let Some(replications) = self.replications {
            config.replications = replications;
        }
        if let Some(threads) = self.threads {
            config.parallelism = threads;
        }
        config.validate().context("after overrides")?;
        let out = match &self.out {
            Some(path) => path.clone(),
            None => output_root().join(&config.output_dir),
        };
        Ok((config, out))
    }
}

fn output_root() -> PathBuf {
    std::env::var_os("TSBENCH_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Subcommand)]
enum Command {
    /// Write one simulated series as CSV (columns t,value).
    Generate {
        /// Source name: a generator (ar, bl1, ..., tar2) or mm1/mm2.
        #[arg(long)]
        source: String,
        /// Overlay scenario: none, jump, random_walk, both.
        #[arg(long, default_value = "none")]
        overlay: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Jump regime when the overlay includes jumps: dense or sparse.
        #[arg(long, default_value = "dense")]
        jump_regime: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured evaluation grid and write metrics, ranks and a
    /// manifest.
    Run(ConfigArgs),
    /// Recompute the median-rank table from a metrics CSV.
    Rank {
        #[arg(long)]
        metrics: PathBuf,
        /// Window at which tree ensembles enter the ranking.
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rolling-origin evaluation on the daily demand dataset.
    Realdata {
        /// Semicolon-delimited demand file; bundled data when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Column names for products A, B, C.
        #[arg(long, num_args = 3)]
        columns: Option<Vec<String>>,
        #[arg(long, default_value_t = ';')]
        delimiter: char,
        #[arg(long, default_value_t = 50)]
        train: usize,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG figures from a metrics CSV.
    Plot {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            source,
            overlay,
            n,
            seed,
            jump_regime,
            out,
        } => generate_cmd(&source, &overlay, n, seed, &jump_regime, out),
        Command::Run(args) => run_cmd(&args),
        Command::Rank { metrics, window, out } => rank_cmd(&metrics, window, out),
        Command::Realdata {
            data,
            columns,
            delimiter,
            train,
            horizon,
            window,
            seed,
            out,
        } => realdata_cmd(data, columns, delimiter, train, horizon, window, seed, out),
        Command::Plot { metrics, out } => plot_cmd(&metrics, &out),
    }
}

fn generate_cmd(
    source: &str,
    overlay: &str,
    n: usize,
    seed: u64,
    jump_regime: &str,
    out: Option<PathBuf>,
) -> Result<()> {
    let Some(source_spec) = Source::from_name(source) else {
        bail!("unknown source '{source}'");
    };
    let Some(kind) = OverlayKind::from_name(overlay) else {
        bail!("unknown overlay '{overlay}'");
    };
    if source_spec.is_queue() && kind != OverlayKind::None {
        bail!("queue sources take no overlay");
    }
    let mut base_config = RunConfig::default();
    base_config.jump.regime = jump_regime.to_string();
    base_config.validate()?;
    let data = DataSpec::new(source_spec, kind.to_spec(&base_config.overlay_base()), n);

    let series = generate_series(&data, mix(seed, 0))?;
    let mut csv = String::from("t,value\n");
    for (t, v) in series.values().iter().enumerate().take(n) {
        csv.push_str(&format!("{},{}\n", t + 1, v));
    }

    let dir = out.unwrap_or_else(|| output_root().join("series"));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{source}_{overlay}_n{n}_seed{seed}.csv"));
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_cmd(args: &ConfigArgs) -> Result<()> {
    let (config, out_dir) = args.resolve()?;
    let settings = config.settings();
    eprintln!(
        "running {} settings ({} per method family) at {} replication(s), seed {}",
        settings.len(),
        config.settings_per_method(),
        config.replications,
        config.seed_base
    );
    let artifacts = execute_run(&config, &out_dir)?;
    println!("wrote {}", artifacts.metrics_path.display());
    println!("wrote {}", artifacts.ranks_path.display());
    println!("wrote {}", artifacts.manifest_path.display());
    Ok(())
}

fn rank_cmd(metrics: &PathBuf, window: usize, out: Option<PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(metrics)
        .with_context(|| format!("reading {}", metrics.display()))?;
    let records = parse_metrics_csv(&text)?;
    let csv = rank_from_records(&records, window)?;
    let path = out.unwrap_or_else(|| output_root().join("ranks.csv"));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn realdata_cmd(
    data: Option<PathBuf>,
    columns: Option<Vec<String>>,
    delimiter: char,
    train: usize,
    horizon: usize,
    window: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let text = match &data {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => BUNDLED_DEMAND_CSV.to_string(),
    };
    let columns: [String; 3] = match columns {
        Some(c) => {
            let arr: [String; 3] = c
                .try_into()
                .map_err(|_| anyhow::anyhow!("--columns takes exactly three names"))?;
            arr
        }
        None => DEFAULT_COLUMNS.map(|s| s.to_string()),
    };
    let dataset = load_demand_csv(&text, &columns, delimiter)?;

    let methods: Vec<MethodSpec> = tsbench_core::eval::default_methods(window);
    let scores = evaluate_demand(&dataset, &methods, train, horizon, seed)?;
    let csv = demand_scores_to_csv(&scores);

    let path = out.unwrap_or_else(|| output_root().join("realdata.csv"));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn plot_cmd(metrics: &PathBuf, out: &PathBuf) -> Result<()> {
    let text = std::fs::read_to_string(metrics)
        .with_context(|| format!("reading {}", metrics.display()))?;
    let records = parse_metrics_csv(&text)?;
    let written = emit_plots(&records, out)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
