//! Command line front end: parse a curve document, run a command, print the
//! report. Exit codes: 0 all checks pass, 1 check failure, 2 input error,
//! 3 internal invariant breach.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use mesa_core::acyclic::AcyclicityMode;
use mesa_core::report::{run, Command as RunCommand, Flags};

#[derive(Parser)]
#[command(
    name = "mesa",
    about = "Combinatorial log curves: mesas, degrees, exact cohomology, contractions, strata",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Guaranteed,
    Generic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Input document; "-" reads stdin.
    input: PathBuf,
    /// Acyclicity engine mode (overrides the document's options.mode).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Pole bound for the truncated local ring model.
    #[arg(long)]
    truncation: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(clap::Subcommand)]
enum Sub {
    /// Check graph, PL and geometry consistency.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Write a DOT rendering of the dual graph to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decompose the section into mesas and report smallness/acyclicity.
    Mesa {
        #[command(flatten)]
        common: Common,
    },
    /// Multidegree table of the section's line bundle.
    Degrees {
        #[command(flatten)]
        common: Common,
    },
    /// Acyclicity verdicts; exact (h0, h1) where geometry is given.
    Cohomology {
        #[command(flatten)]
        common: Common,
    },
    /// Contract the mesas and describe the singularities.
    Contract {
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate face specializations and validate each stratum.
    Strata {
        #[command(flatten)]
        common: Common,
        /// Inspect a single stratum: comma-separated 1-based generator
        /// indices, e.g. "1,3".
        #[arg(long)]
        face: Option<String>,
    },
}

fn read_input(path: &PathBuf) -> std::io::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common, dot, face) = match &cli.command {
        Sub::Validate { common, dot } => (RunCommand::Validate, common, dot.clone(), None),
        Sub::Mesa { common } => (RunCommand::Mesa, common, None, None),
        Sub::Degrees { common } => (RunCommand::Degrees, common, None, None),
        Sub::Cohomology { common } => (RunCommand::Cohomology, common, None, None),
        Sub::Contract { common } => (RunCommand::Contract, common, None, None),
        Sub::Strata { common, face } => (RunCommand::Strata, common, None, face.clone()),
    };

    let bytes = match read_input(&common.input) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.input.display());
            return ExitCode::from(2);
        }
    };
    let (_, model) = match mesa_core::doc::parse(&bytes) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let face = match face.as_deref() {
        None => None,
        Some(list) => {
            let mut indices = Vec::new();
            for part in list.split(',').filter(|s| !s.is_empty()) {
                match part.trim().parse::<usize>() {
                    Ok(i) => indices.push(i),
                    Err(_) => {
                        eprintln!("error: bad face index {part:?}");
                        return ExitCode::from(2);
                    }
                }
            }
            Some(indices)
        }
    };
    let flags = Flags {
        mode: common.mode.map(|m| match m {
            ModeArg::Guaranteed => AcyclicityMode::Guaranteed,
            ModeArg::Generic => AcyclicityMode::Generic,
        }),
        truncation: common.truncation,
        face,
        ..Flags::default()
    };

    if let Some(dot_path) = dot {
        if let Err(e) = std::fs::write(&dot_path, model.graph.to_dot()) {
            eprintln!("error: cannot write {}: {e}", dot_path.display());
            return ExitCode::from(2);
        }
    }

    match run(cmd, &model, &flags) {
        Ok(report) => {
            match common.format {
                FormatArg::Text => print!("{}", report.text()),
                FormatArg::Json => print!("{}", report.json()),
            }
            ExitCode::from(u8::try_from(report.exit_code()).unwrap_or(1))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2))
        }
    }
}
