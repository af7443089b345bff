use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use smapprox::experiments::{run, ExperimentConfig, Format};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Norm,
    Prop1,
    Theorem1,
    Theorem2,
    Asymp,
    Theorem4,
    Majorant,
    Validate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Approximation experiments in Orlicz sequence spaces.
///
/// Exit codes: 0 ok, 1 config or parse error, 2 invariant violation.
#[derive(Debug, Parser)]
#[command(name = "smapprox", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Write output here instead of stdout (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format (overrides the config).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Replace the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Double h_grid and insert geometric midpoints into delta_list.
    #[arg(long)]
    refine: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match ExperimentConfig::load(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.refine {
        cfg = cfg.refined();
    }
    let command = cli.command.to_possible_value().expect("no skipped variants");
    let outcome = match run(command.get_name(), &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let format = match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => cfg.output.format,
    };
    let text = outcome.render(format);
    let out = cli.out.or_else(|| cfg.output.path.as_ref().map(|p| cfg.base_dir.join(p)));
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    if outcome.violation {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
