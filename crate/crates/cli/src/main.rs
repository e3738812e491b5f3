use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use upb_cli::config::Resolution;
use upb_cli::{list_experiments, load, run, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "upb", version, about = "Photon-blockade figure datasets from TOML configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResolutionArg {
    Low,
    Paper,
}

#[derive(clap::Args)]
struct Overrides {
    /// Output directory (default: out/<experiment>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: number of processors)
    #[arg(long)]
    workers: Option<usize>,
    /// Fock cutoff N_max
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, value_enum)]
    resolution: Option<ResolutionArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV tables plus a manifest
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check a configuration without running it
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the experiment identifiers
    ListExperiments,
}

impl Overrides {
    fn options(&self) -> RunOptions {
        RunOptions {
            out: self.out.clone(),
            workers: self.workers,
            cutoff: self.cutoff,
            resolution: self.resolution.map(|r| match r {
                ResolutionArg::Low => Resolution::Low,
                ResolutionArg::Paper => Resolution::Paper,
            }),
        }
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListExperiments => {
            for (id, description) in list_experiments() {
                println!("{id:<30} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config, overrides } => match load(&config, &overrides.options()) {
            Ok(cfg) => {
                println!("OK {}", config.display());
                for line in cfg.derived_summary() {
                    println!("  {line}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e.into()),
        },
        Command::Run { config, overrides } => {
            let opts = overrides.options();
            let cfg = match load(&config, &opts) {
                Ok(c) => c,
                Err(e) => return fail(e.into()),
            };
            match run(&cfg, opts.workers) {
                Ok(m) => {
                    for a in &m.artifacts {
                        println!("{}  {}", a.sha256, a.file);
                    }
                    if !m.converged {
                        eprintln!("warning: run marked non-converged in the manifest");
                    }
                    println!("wrote {} tables in {:.1} s", m.artifacts.len(), m.wall_time_s);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
