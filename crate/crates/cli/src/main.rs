mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdt_core::DEFAULT_DELTA;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_ABORT: u8 = 2;
pub const EXIT_AUDIT: u8 = 3;

/// Private data transfer over two independent erasure channels.
#[derive(Debug, Parser)]
#[command(name = "pdt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the capacity and rate bounds as JSON.
    Capacity {
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        #[arg(long = "N", default_value_t = 2)]
        files: usize,
    },
    /// Print the deterministic set-size plan as JSON.
    Plan(ParamArgs),
    /// Execute one run and print its record as JSON.
    Run {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Bob's choice; drawn from the seed when absent.
        #[arg(long)]
        u: Option<usize>,
        /// Cathy's choice; drawn from the seed when absent.
        #[arg(long)]
        w: Option<usize>,
        /// Include channel outputs and every message payload.
        #[arg(long)]
        dump: bool,
    },
    /// Monte Carlo over a grid of erasure probabilities, written as CSV.
    Sweep(SweepArgs),
    /// Exact privacy audit of a tiny configuration.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "N", default_value_t = 2)]
    pub files: usize,
    #[arg(long)]
    pub eps1: f64,
    #[arg(long)]
    pub eps2: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Root seed. `PDT_SEED` takes precedence when set.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated values of eps1.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps1_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps2_grid: Vec<f64>,
    #[arg(long = "N", default_value_t = 2)]
    pub files: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mutation {
    ExposeChoice,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "N", default_value_t = 2)]
    pub files: usize,
    /// Decimal or fraction, e.g. `0.5` or `2/3`.
    #[arg(long)]
    pub eps1: String,
    #[arg(long)]
    pub eps2: String,
    #[arg(long, default_value_t = 1)]
    pub size_l: usize,
    #[arg(long, default_value_t = 1)]
    pub size_lt: usize,
    /// Include the embedded two-party transfers.
    #[arg(long)]
    pub high_erasure: bool,
    #[arg(long, default_value_t = 1)]
    pub size_c: usize,
    #[arg(long, default_value_t = 1)]
    pub size_ct: usize,
    #[arg(long, value_enum)]
    pub mutate: Option<Mutation>,
    /// Largest number of atoms to enumerate.
    #[arg(long, default_value_t = pdt_core::audit::DEFAULT_BUDGET)]
    pub budget: f64,
}

impl SeedArg {
    pub fn resolve(&self) -> Result<u64, String> {
        match std::env::var("PDT_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| format!("PDT_SEED = {v:?} is not a 64-bit unsigned integer")),
            Err(_) => Ok(self.seed),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Capacity { eps1, eps2, files } => commands::capacity(eps1, eps2, files),
        Command::Plan(p) => commands::plan(&p),
        Command::Run { params, seed, u, w, dump } => commands::run(&params, &seed, u, w, dump),
        Command::Sweep(s) => commands::sweep(&s),
        Command::Audit(a) => commands::audit(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
