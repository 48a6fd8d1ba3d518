use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "tagbench",
    about = "Benchmark harness for node classification over text-attributed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a citation graph from a paper corpus.
    Prepare(Common),
    /// Compute and export the train/validation/test split.
    Split(Common),
    /// Run the configured prompt experiment.
    Run(Common),
    /// Rebuild the report from an existing records file.
    Report(Common),
    /// Train message-passing baselines with random hyperparameter search.
    Mpnn(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Prepare(c) => {
            tagbench_cli::commands::cmd_prepare(&c.config, c.seed, c.out.as_deref())
        }
        Command::Split(c) => tagbench_cli::commands::cmd_split(&c.config, c.seed, c.out.as_deref()),
        Command::Run(c) => tagbench_cli::commands::cmd_run(&c.config, c.seed, c.out.as_deref()),
        Command::Report(c) => tagbench_cli::commands::cmd_report(&c.config, c.out.as_deref()),
        Command::Mpnn(c) => tagbench_cli::commands::cmd_mpnn(&c.config, c.seed, c.out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
