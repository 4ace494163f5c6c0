use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use nilgrowth::cli::{run, Command, RunConfig};
use nilgrowth::wordmetric::DEFAULT_BUDGET;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Growth,
    Balls,
    Gamma,
    Conj,
    Layers,
    Coords,
    Cone,
    Clouds,
    Gnr,
    Classify,
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Growth => Command::Growth,
            Cmd::Balls => Command::Balls,
            Cmd::Gamma => Command::Gamma,
            Cmd::Conj => Command::Conj,
            Cmd::Layers => Command::Layers,
            Cmd::Coords => Command::Coords,
            Cmd::Cone => Command::Cone,
            Cmd::Clouds => Command::Clouds,
            Cmd::Gnr => Command::Gnr,
            Cmd::Classify => Command::Classify,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

/// Growth invariants of nilpotent and polynomial-growth matrix groups.
#[derive(Debug, Parser)]
#[command(name = "nilgrowth", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Descriptor file or `catalog:NAME`.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long = "kmax")]
    k_max: Option<u64>,
    /// Comma-separated scales, e.g. `10,20,40,80`.
    #[arg(long = "nlist", value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    /// Element as a word, e.g. `"a b a^-1 b^-1"`.
    #[arg(long)]
    word: Option<String>,
    /// `constant`, `polynomial:S`, `exponential:B:IDX` or a JSON weight file.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest number of ball elements to store.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Directory for report.json and CSV files; the report goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 5 when the result is inconclusive.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = RunConfig {
        command: args.command.into(),
        input: args.input,
        radius: args.radius,
        k_max: args.k_max,
        n_list: args.n_list,
        word: args.word,
        weight: args.weight,
        seed: args.seed,
        budget: args.budget,
        out: args.out,
        strict: args.strict,
    };
    let outcome = run(&cfg);
    match &cfg.out {
        Some(dir) => {
            if let Err(e) = outcome.write_to(dir) {
                eprintln!("nilgrowth: cannot write {}: {e}", dir.display());
                return ExitCode::from(1);
            }
            eprintln!("nilgrowth: wrote {}", dir.join("report.json").display());
        }
        None => print!("{}", outcome.report_text()),
    }
    if let Some(msg) = outcome.report.get("error").and_then(|e| e.get("message")) {
        eprintln!("nilgrowth: {}", msg.as_str().unwrap_or_default());
    }
    ExitCode::from(outcome.status.code() as u8)
}
