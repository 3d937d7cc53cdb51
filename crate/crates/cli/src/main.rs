mod compare;
mod simulate;
mod store;
mod verify;

use clap::{Parser, Subcommand};
use rvm_lab::strichartz::{strichartz_admissible, Lebesgue, StrichartzExponents};
use rvm_lab::Suite;
use std::path::PathBuf;
use std::process::ExitCode;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// A checked property does not hold (exit 1).
    Assertion(String),
    /// Bad arguments or configuration (exit 2).
    Usage(String),
    /// A required input is missing (exit 3).
    Missing(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Missing(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Assertion(m) | Failure::Usage(m) | Failure::Missing(m) => m,
        }
    }
}

pub type CliResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "rvm", version, about = "Planar relativistic Vlasov-Maxwell simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write diagnostics, snapshots and a manifest.
    Simulate {
        /// Scenario TOML file.
        scenario: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Override the grid size, as `N1xN2`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<[usize; 2]>,
    },
    /// Run an inequality suite; exits 1 when a hard-asserted check fails.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample count for the randomized identity and geometry checks.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Compare the retarded-field representation with the stored grid fields.
    FieldsCompare {
        /// Directory written by `simulate` with a stored history.
        run_dir: PathBuf,
        /// JSON array of `[t, x1, x2]` probes.
        #[arg(long)]
        probes: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact admissibility check of Strichartz exponents.
    StrichartzCheck {
        q1: Lebesgue,
        r1: Lebesgue,
        q2: Lebesgue,
        r2: Lebesgue,
        /// Read the last two exponents as the source pair `q2'`, `r2'`.
        #[arg(long)]
        dual: bool,
        /// Skip the redundant upper bound on `1/r1 + 1/r2`.
        #[arg(long)]
        drop_redundant: bool,
    },
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once('x').ok_or_else(|| format!("expected N1xN2, got {s:?}"))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok([n(a)?, n(b)?])
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: rvm_lab::LabError| e.to_string())
}

fn strichartz_check(e: StrichartzExponents, drop_redundant: bool) -> CliResult {
    let a = strichartz_admissible(&e, drop_redundant);
    println!("q1 = {}, r1 = {}, q2' = {}, r2' = {}", e.q1, e.r1, e.q2_dual(), e.r2_dual());
    println!("scaling: 1/q1 + 2/r1 = {}, 1/q2' + 2/r2' - 2 = {}", a.scaling_lhs, a.scaling_rhs);
    for c in &a.violated {
        println!("violated: {}", c.describe());
    }
    println!("admissible: {}", a.admissible);
    if a.admissible {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("{} condition(s) violated", a.violated.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { scenario, out, seed, dt, grid } => simulate::run(&scenario, &out, seed, dt, grid),
        Command::Verify { suite, seed, count } => verify::run(suite, seed, count),
        Command::FieldsCompare { run_dir, probes, out } => compare::run(&run_dir, &probes, out.as_deref()),
        Command::StrichartzCheck { q1, r1, q2, r2, dual, drop_redundant } => {
            let e = if dual { StrichartzExponents::from_dual(q1, r1, q2, r2) } else { StrichartzExponents { q1, r1, q2, r2 } };
            strichartz_check(e, drop_redundant)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
