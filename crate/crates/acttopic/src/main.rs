use std::path::PathBuf;
use std::process::ExitCode;

use acttopic::commands::{self, AssignArgs, EvalArgs, FitArgs, IngestArgs};
use acttopic::config::ConfigFile;
use acttopic::Error;
use clap::{Parser, Subcommand};

/// Topic models over bags of network activations.
#[derive(Parser)]
#[command(name = "acttopic", version)]
struct Cli {
    /// `key = value` configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn an activation or label file into a corpus file.
    Ingest(IngestArgs),
    /// Fit a mixture (EM) or LDA (collapsed Gibbs) model.
    Fit(FitArgs),
    /// Write per-document topic posteriors and hard assignments.
    Assign(AssignArgs),
    /// Density table, purity/NMI and top features per topic.
    Eval(EvalArgs),
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Ingest(args) => {
            let s = commands::ingest(args, &cfg)?;
            println!(
                "docs={} vocab={} empty_docs={} oov_dropped={}",
                s.docs, s.vocab, s.empty_docs, s.oov_dropped
            );
        }
        Command::Fit(args) => {
            let s = commands::fit(args, &cfg)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!("model={}", s.model_path.display());
            println!("trace={}", s.trace_path.display());
            println!("manifest={}", s.manifest_path.display());
            println!("log_likelihood={}", s.log_likelihood);
        }
        Command::Assign(args) => {
            let s = commands::assign(args, &cfg)?;
            if s.oov_dropped > 0 {
                eprintln!(
                    "warning: {} out-of-vocabulary tokens dropped",
                    s.oov_dropped
                );
            }
            println!(
                "assignments={} docs={} fold_in={}",
                s.out.display(),
                s.docs,
                s.folded_in
            );
        }
        Command::Eval(args) => {
            let s = commands::evaluate(args, &cfg)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(d) = &s.density {
                print!("{d}");
            }
            if let Some(m) = &s.metrics {
                print!("{}", acttopic::report::render_metrics(m));
            }
            if let Some(t) = &s.topics {
                print!("{t}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
