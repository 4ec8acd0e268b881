mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperell::Error;

#[derive(Parser, Debug)]
#[command(
    name = "hyperell",
    version,
    about = "Local and archimedean invariants of hyperelliptic fibrations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Target absolute accuracy of numerical evaluations.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Proceed when the root configuration violates the standing hypotheses.
    #[arg(long, global = true)]
    override_assumptions: bool,
    #[arg(long, global = true, default_value_t = hyperell::schema::SCHEMA_VERSION)]
    schema_version: u32,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Cluster tree of a root configuration.
    Tree,
    /// Residual divisor and ord Λ of a root configuration.
    Residual,
    /// Correction divisors Φ_P on a special fiber.
    Phi,
    /// Local discriminant identity on a special fiber.
    VerifyLocal {
        /// Overrides `ord_lambda` in the fiber file.
        #[arg(long, allow_hyphen_values = true)]
        ord_lambda: Option<i64>,
    },
    /// Wronskian identities on local expansions of a hyperelliptic curve.
    Wronskian,
    /// Riemann theta and its norms.
    Theta,
    /// T-invariant samples at random points.
    Tinv,
    /// Faltings height from a ledger.
    Height,
    /// Lower bounds for the Faltings height from analytic data.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Text,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::NonConvergence(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.schema_version != hyperell::schema::SCHEMA_VERSION {
        eprintln!(
            "error: unsupported schema version {} (this build reads version {})",
            cli.schema_version,
            hyperell::schema::SCHEMA_VERSION
        );
        return ExitCode::from(2);
    }
    if cli.format == Format::Dot && cli.command != Command::Tree {
        eprintln!("error: --format dot is only available for `tree`");
        return ExitCode::from(2);
    }
    let Some(path) = cli.input.as_ref() else {
        eprintln!("error: --input is required");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let opts = commands::Options {
        format: cli.format,
        tol: cli.tol,
        seed: cli.seed,
        override_assumptions: cli.override_assumptions,
    };
    let result = commands::check_version(&text).and_then(|()| match cli.command {
        Command::Tree => commands::tree(&text, &opts),
        Command::Residual => commands::residual(&text, &opts),
        Command::Phi => commands::phi(&text, &opts),
        Command::VerifyLocal { ord_lambda } => commands::verify_local(&text, ord_lambda, &opts),
        Command::Wronskian => commands::wronskian(&text, &opts),
        Command::Theta => commands::theta(&text, &opts),
        Command::Tinv => commands::tinv(&text, &opts),
        Command::Height => commands::height(&text, &opts),
        Command::Report => commands::report(&text, &opts),
    });
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
