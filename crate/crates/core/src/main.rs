use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use equising::cli::{self, corpus, CliError, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "equising",
    version,
    about = "Equisingularity of families of curve germs"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every entry of a manifest
    Analyze {
        manifest: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
        /// seed for entries that do not set their own
        #[arg(long)]
        seed: Option<u64>,
        /// include wall-clock times (output is then not reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Run the built-in example corpus against its expectations
    Corpus {
        #[arg(long, default_value = "text")]
        format: Format,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a standard basis of the ideal in a JSON file {"ring": [...], "gens": [...]}
    Std {
        file: PathBuf,
        #[arg(long, default_value = "degrevlex")]
        order: String,
    },
}

fn execute(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Analyze {
            manifest,
            format,
            seed,
            timing,
        } => {
            let report = cli::run(&manifest, &RunConfig { seed, timing })?;
            print!("{}", report.render(format));
            Ok(())
        }
        Command::Corpus { format, seed } => {
            let (report, outcome) = cli::run_paper_corpus(seed)?;
            match format {
                Format::Json => print!("{}", corpus::corpus_json(&report, &outcome)),
                Format::Text => print!("{}", outcome.to_text()),
            }
            if outcome.all_passed {
                Ok(())
            } else {
                Err(CliError::Mismatch(outcome.failures()))
            }
        }
        Command::Std { file, order } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
            print!("{}", cli::debug_std(&text, &order)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
