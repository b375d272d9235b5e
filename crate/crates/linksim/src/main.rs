use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fcwave::emit::{emit, Format};
use fcwave::tables::{complexity_grid, write_grid};
use fcwave::{load_scenario, run_scenario};
use fcwave_core::Numerology;

#[derive(Parser)]
#[command(name = "fcwave", version, about = "Filtered CP-OFDM link simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write `<id>.csv` and `<id>.svg`.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the scenario's drop count.
        #[arg(long)]
        drops: Option<usize>,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Print multiplication counts per QAM symbol as CSV.
    Complexity {
        /// Full grid over cases, schemes and slot lengths 1-14.
        #[arg(long, required = true)]
        grid: bool,
    },
}

fn run(cli: Cli) -> fcwave::Result<()> {
    match cli.cmd {
        Command::Run {
            scenario,
            out,
            drops,
            seed,
            no_plots,
        } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(d) = drops {
                s.drops = d;
            }
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let rows = run_scenario(&s)?;
            let csv = emit(&rows, Format::Csv, &out)?;
            eprintln!("wrote {}", csv.display());
            if !no_plots {
                let svg = emit(&rows, Format::Plot, &out)?;
                eprintln!("wrote {}", svg.display());
            }
        }
        Command::Complexity { .. } => {
            let num = Numerology::nr_15khz(1024)?;
            write_grid(&complexity_grid(&num)?, std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
