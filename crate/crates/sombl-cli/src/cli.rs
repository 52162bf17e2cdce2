//! The `sombl` binary's argument surface and subcommand drivers.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use sombl::som::Schedule;
use sombl::{WeightScheme, WindowSpec};

use crate::config;
use crate::formats;
use crate::harness::{self, EncoderSpec, ExperimentSpec, SystemKind};

#[derive(Debug, Parser)]
#[command(
    name = "sombl",
    version,
    about = "Memory-based chunk tagging with map-edited nearest-neighbour search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a system and write its model file.
    Train(TrainArgs),
    /// Score a model on a test corpus.
    Eval(EvalArgs),
    /// Run a grid of experiments from a config file.
    Sweep(SweepArgs),
    /// Summarize a model or a corpus.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training corpus: one `word POS chunk` triple per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    pub out: PathBuf,
    /// Window shape LEFT-RIGHT around the focus tag.
    #[arg(long, default_value = "1-1", value_parser = WindowSpec::from_str)]
    pub window: WindowSpec,
    /// Classifier: mbl, sommbl or lsommbl.
    #[arg(long, default_value = "mbl", value_parser = SystemKind::from_str)]
    pub system: SystemKind,
    /// Window encoding for the mapped systems: orth, lex or file:<path>.
    #[arg(long, default_value = "orth", value_parser = EncoderSpec::from_str)]
    pub encoder: EncoderSpec,
    /// Feature weighting: uniform, ig or gr.
    #[arg(long, default_value = "gr", value_parser = WeightScheme::from_str)]
    pub weights: WeightScheme,
    /// Map size in units. Defaults to the square root of the number of
    /// stored instances, rounded up.
    #[arg(long)]
    pub map_size: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Training epochs (overrides the default schedule; give all four
    /// schedule flags together).
    #[arg(long, requires_all = ["initial_radius", "radius_step", "learning_rate"])]
    pub epochs: Option<usize>,
    /// Starting neighbourhood radius.
    #[arg(long, requires_all = ["epochs", "radius_step", "learning_rate"])]
    pub initial_radius: Option<usize>,
    /// Epochs between radius decrements.
    #[arg(long, requires_all = ["epochs", "initial_radius", "learning_rate"])]
    pub radius_step: Option<usize>,
    /// Update step size.
    #[arg(long, requires_all = ["epochs", "initial_radius", "radius_step"])]
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Test corpus: one `word POS chunk` triple per line.
    #[arg(long)]
    pub test: PathBuf,
    /// Winning units scanned per query (mapped plain system only).
    #[arg(long, default_value_t = sombl::classify::DEFAULT_WINNERS)]
    pub winners: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep configuration file (`key = value` lines).
    #[arg(long)]
    pub config: PathBuf,
    /// Write machine-readable records here (overrides the config).
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Write each row's model here (overrides the config).
    #[arg(long)]
    pub models_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["model", "corpus"]))]
pub struct InspectArgs {
    /// Model file to describe.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Corpus file to describe.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Window shape used when describing a corpus.
    #[arg(long, default_value = "1-1", value_parser = WindowSpec::from_str)]
    pub window: WindowSpec,
    /// Print the full memory-base dump instead of the summary.
    #[arg(long)]
    pub dump_base: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Inspect(args) => cmd_inspect(args),
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let schedule = match (args.epochs, args.initial_radius, args.radius_step, args.learning_rate)
    {
        (Some(epochs), Some(initial_radius), Some(radius_step), Some(learning_rate)) => {
            Some(Schedule { epochs, initial_radius, radius_step, learning_rate })
        }
        _ => None,
    };
    let train = formats::read_corpus(&args.corpus)?;
    let spec = ExperimentSpec {
        system: args.system,
        window: args.window,
        encoder: args.encoder,
        weights: args.weights,
        map_size: args.map_size,
        winners: sombl::classify::DEFAULT_WINNERS,
        seed: args.seed,
        schedule,
    };
    let model = harness::train_system(&train, &spec)?;
    formats::write_model(&args.out, &model)?;
    print!("{}", harness::describe_model(&model));
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let model = formats::read_model(&args.model)?;
    let test = formats::read_corpus(&args.test)?;
    let out = harness::evaluate(&model, &test, args.winners)?;
    println!("fscore        {:.2}", out.score.fscore);
    println!("precision     {:.2}", out.score.precision);
    println!("recall        {:.2}", out.score.recall);
    println!("tag accuracy  {:.2}", out.score.tag_accuracy);
    println!("queries       {}", out.queries);
    println!("comparisons   max {}, mean {:.2}", out.measured_max, out.measured_mean);
    if let Some(cost) = out.cost {
        println!(
            "cost          max {} ({:.1}% of items), avg {:.2}, min {:.2}",
            cost.max(),
            cost.max_percent_of_items(),
            cost.avg(),
            cost.min()
        );
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| anyhow::anyhow!("reading config {}: {e}", args.config.display()))?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(records) = args.records {
        cfg.records = Some(records);
    }
    if let Some(models_dir) = args.models_dir {
        cfg.models_dir = Some(models_dir);
    }
    let rows = harness::sweep(&cfg)?;
    print!("{}", harness::format_table(&rows));
    if let Some(path) = &cfg.records {
        std::fs::write(path, harness::format_records(&rows))
            .map_err(|e| anyhow::anyhow!("writing records {}: {e}", path.display()))?;
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    match (&args.model, &args.corpus) {
        (Some(path), None) => {
            let model = formats::read_model(path)?;
            if args.dump_base {
                print!("{}", formats::format_memory_base(&model.base));
            } else {
                print!("{}", harness::describe_model(&model));
            }
        }
        (None, Some(path)) => {
            let sentences = formats::read_corpus(path)?;
            if args.dump_base {
                let chunked = sombl::corpus::chunk_sentences(&sentences)?;
                let base = sombl::MemoryBase::build(
                    &chunked,
                    args.window,
                    WeightScheme::Uniform,
                )?;
                print!("{}", formats::format_memory_base(&base));
            } else {
                print!("{}", harness::describe_corpus(&sentences, args.window)?);
            }
        }
        _ => bail!("inspect needs exactly one of --model or --corpus"),
    }
    Ok(())
}
