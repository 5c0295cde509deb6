use clap::{Parser, Subcommand};
use oddsymp::cli::{self, Command, Overrides, Report, EXIT_MALFORMED};
use oddsymp::verify::Suite;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact linear odd symplectic geometry, BV integration and quantum L∞ transfer.
#[derive(Parser)]
#[command(name = "oddsymp", version)]
struct Args {
    /// Truncation weight for series operations; overrides `options.w_max`.
    #[arg(long, global = true)]
    max_weight: Option<i64>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Isotropic / coisotropic / Lagrangian / symplectic status of a subspace or relation.
    Classify { file: String },
    /// Cospan factorization of a Lagrangian relation.
    Factorize { file: String },
    /// Compose a chain of relations or generalized Lagrangians.
    Compose { file: String },
    /// BV integral over a Lagrangian, or fiber integral along a reduction.
    Integrate { file: String },
    /// Effective action along a reduction.
    Transfer { file: String },
    /// Quantum master equation check.
    CheckQme { file: String },
    /// Certificate that a Lagrangian relation relates two theories.
    CheckRelation { file: String },
    /// Run the property suites on seeded random instances.
    Verify {
        /// symplectic, densities, bvalgebra, integral or quantum; all when absent.
        #[arg(long)]
        suite: Option<Suite>,
        /// Random instances per check.
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
}

fn read_input(file: &str) -> std::io::Result<String> {
    let mut s = String::new();
    if file == "-" {
        std::io::stdin().read_to_string(&mut s)?;
    } else {
        s = std::fs::read_to_string(file)?;
    }
    Ok(s)
}

fn emit(report: &Report, out: Option<&PathBuf>) -> ExitCode {
    let mut text = serde_json::to_string_pretty(&report.body).expect("reports serialize");
    text.push('\n');
    let written = match out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("oddsymp: cannot write report: {e}");
        return ExitCode::from(EXIT_MALFORMED);
    }
    ExitCode::from(report.exit)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            return ExitCode::from(code);
        }
    };
    let (command, file) = match args.verb {
        Verb::Verify { suite, instances } => return emit(&cli::run_verify(suite, args.seed, instances), args.out.as_ref()),
        Verb::Classify { file } => (Command::Classify, file),
        Verb::Factorize { file } => (Command::Factorize, file),
        Verb::Compose { file } => (Command::Compose, file),
        Verb::Integrate { file } => (Command::Integrate, file),
        Verb::Transfer { file } => (Command::Transfer, file),
        Verb::CheckQme { file } => (Command::CheckQme, file),
        Verb::CheckRelation { file } => (Command::CheckRelation, file),
    };
    let input = match read_input(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("oddsymp: cannot read {file}: {e}");
            return ExitCode::from(EXIT_MALFORMED);
        }
    };
    let overrides = Overrides { max_weight: args.max_weight };
    emit(&cli::execute(command, &input, &overrides), args.out.as_ref())
}
