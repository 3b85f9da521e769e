use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

mod report;
mod spec;

use report::{Outcome, Suite};

const DEFAULT_MAX_GROUND: usize = 12;

/// Exact computations in Chow rings of matroids.
#[derive(Parser)]
#[command(name = "chowmat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Indent the JSON output
    #[arg(long, global = true)]
    pretty: bool,
    /// Refuse matroids with more elements than this
    #[arg(long, global = true, env = "CHOWMAT_MAX_GROUND")]
    max_ground: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, flats per rank and the Hilbert function
    Info { spec: PathBuf },
    /// Degree of a product of simplicial generators, by two routes
    Degree {
        spec: PathBuf,
        /// Subsets separated by ';', elements by ',', e.g. "0,1;0,2"
        #[arg(long, allow_hyphen_values = true)]
        flats: String,
    },
    /// Terms of the volume polynomial
    Volume { spec: PathBuf },
    /// Reduced characteristic polynomial and log-concavity
    Charpoly { spec: PathBuf },
    /// Run verification suites
    Verify {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Seed for the random degree-one classes
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Nested basis in one degree paired with relative nested quotients
    Nested {
        spec: PathBuf,
        #[arg(long)]
        corank: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Degree { .. } => "degree",
            Command::Volume { .. } => "volume",
            Command::Charpoly { .. } => "charpoly",
            Command::Verify { .. } => "verify",
            Command::Nested { .. } => "nested",
        }
    }

    fn spec(&self) -> &PathBuf {
        match self {
            Command::Info { spec }
            | Command::Degree { spec, .. }
            | Command::Volume { spec }
            | Command::Charpoly { spec }
            | Command::Verify { spec, .. }
            | Command::Nested { spec, .. } => spec,
        }
    }
}

fn run(cli: &Cli) -> Result<(serde_json::Value, bool), String> {
    let spec = spec::read_spec(cli.command.spec())?;
    let cap = cli.max_ground.unwrap_or(DEFAULT_MAX_GROUND);
    if spec.ground_size() > cap {
        return Err(format!(
            "ground set of size {} exceeds the cap {cap} (raise it with --max-ground or CHOWMAT_MAX_GROUND)",
            spec.ground_size()
        ));
    }
    let m = spec.build()?;
    let Outcome { report, passed } = match &cli.command {
        Command::Info { .. } => report::info(&m)?,
        Command::Degree { flats, .. } => report::degree(&m, &spec::parse_flats(flats, m.size())?)?,
        Command::Volume { .. } => report::volume(&m)?,
        Command::Charpoly { .. } => report::charpoly(&m)?,
        Command::Verify { suite, seed, .. } => report::verify(&m, *suite, *seed)?,
        Command::Nested { corank, .. } => report::nested(&m, *corank)?,
    };
    let doc = json!({
        "command": cli.command.name(),
        "matroid": report::summary(&m),
        "result": report,
        "passed": passed,
    });
    Ok((doc, passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let print = |v: &serde_json::Value| {
        if cli.pretty {
            serde_json::to_string_pretty(v).expect("json")
        } else {
            serde_json::to_string(v).expect("json")
        }
    };
    match run(&cli) {
        Ok((doc, passed)) => {
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{}", print(&doc));
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            let _ = writeln!(std::io::stderr(), "{}", print(&json!({"command": cli.command.name(), "error": msg})));
            ExitCode::from(2)
        }
    }
}
