use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use graphspace::ensembles::{self, ModelSpec};
use graphspace::experiments::{self, ExperimentConfig, Overrides, Preset};
use graphspace::geometry::{edev_exact, edev_mc};
use graphspace::graph::{load_graph, save_real_graph, write_graph, write_real_graph};
use graphspace::inference::{
    fit_sbm, greedy_min_entropy_partition, partition_entropy, permutation_test, DEFAULT_INNER_SAMPLES,
};
use graphspace::RngStream;

/// Statistical graph models through the geometry of their ensembles.
#[derive(Parser)]
#[command(name = "graphspace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one graph from a model.
    Generate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output graph file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the model's expected weight matrix.
    Barycenter {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ensemble entropy in nats.
    Entropy {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edit distance expected value of a graph against a model.
    Edev {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Closed-form evaluation (ER and SBM only).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Permutation test of "the graph was generated by the model".
    Test {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        q: u64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Monte-Carlo draws per EDEV when the model has no closed form.
        #[arg(long, default_value_t = DEFAULT_INNER_SAMPLES as u64, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy minimum-entropy block partition of a graph.
    Partition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        blocks: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a figure's data as CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Model specification (JSON).
    #[arg(long = "spec")]
    path: PathBuf,
}

impl SpecArg {
    fn load(&self) -> Result<ModelSpec> {
        ModelSpec::load(&self.path).with_context(|| format!("reading {}", self.path.display()))
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// fig2, fig3, fig4, fig5, fig6 or fig7.
    preset: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiply every default size by this factor.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Observed graphs per model.
    #[arg(long)]
    graphs: Option<usize>,
    /// Density grid points (fig3).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Also write SVG charts.
    #[arg(long)]
    svg: bool,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    emit(out, &format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { spec, seed, out } => {
            let g = ensembles::sample(&spec.load()?, RngStream::from_seed(seed))?;
            let mut buf = Vec::new();
            write_graph(&g, &mut buf)?;
            emit(out.as_deref(), std::str::from_utf8(&buf)?)
        }
        Command::Barycenter { spec, out } => {
            let b = ensembles::barycenter(&spec.load()?)?;
            match out {
                Some(path) => save_real_graph(&b, &path)?,
                None => write_real_graph(&b, &mut io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Entropy { spec, out } => {
            let spec = spec.load()?;
            let h = ensembles::entropy(&spec)?;
            emit_json(
                out.as_deref(),
                &json!({"model": spec.name(), "nats": h.nats, "approximate": h.approximate}),
            )
        }
        Command::Edev {
            graph,
            spec,
            samples,
            seed,
            exact,
            out,
        } => {
            let spec = spec.load()?;
            let g = load_graph(&graph)?;
            let value = if exact {
                json!({"mean": edev_exact(&g, &spec)?, "std_error": 0.0, "n_samples": null, "method": "exact"})
            } else {
                let e = edev_mc(&g, &spec, samples as usize, RngStream::from_seed(seed))?;
                json!({"mean": e.mean, "std_error": e.std_error, "n_samples": e.n_samples, "method": "monte-carlo"})
            };
            emit_json(out.as_deref(), &value)
        }
        Command::Test {
            graph,
            spec,
            q,
            delta,
            samples,
            seed,
            out,
        } => {
            let spec = spec.load()?;
            let g = load_graph(&graph)?;
            let report = permutation_test(&g, &spec, q as usize, delta, samples as usize, RngStream::from_seed(seed))?;
            emit_json(out.as_deref(), &serde_json::to_value(&report)?)
        }
        Command::Partition {
            graph,
            blocks,
            restarts,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            let p = greedy_min_entropy_partition(&g, blocks as usize, restarts as usize, RngStream::from_seed(seed))?;
            let fitted = fit_sbm(&g, &p)?;
            let value = json!({
                "block_of": p.assignment(),
                "entropy": partition_entropy(&g, &p)?,
                "block_matrix": fitted.block_matrix(),
            });
            emit_json(out.as_deref(), &value)
        }
        Command::Experiment(args) => {
            let preset: Preset = args.preset.parse()?;
            let config = ExperimentConfig {
                preset,
                out_dir: args.out,
                seed: args.seed,
                overrides: Overrides {
                    scale: args.scale,
                    samples: args.samples,
                    q: args.q,
                    graphs: args.graphs,
                    grid: args.grid,
                    blocks: args.blocks,
                    restarts: args.restarts,
                },
                svg: args.svg,
            };
            for path in experiments::run(&config)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GRAPHSPACE_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("GRAPHSPACE_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// 2 for bad input (arguments, specs, graph files), 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<graphspace::Error>()) {
        Some(e) if e.is_usage() => 2,
        Some(_) => 1,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
