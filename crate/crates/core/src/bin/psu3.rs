use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use psu3_core::config::{close_tasks, Budgets, RunConfig, Task, DEFAULT_MONTE_CARLO_TRIALS, DEFAULT_SEED};
use psu3_core::runner::run_with_log;
use psu3_core::{Error, OutputFormat};

/// Möbius functions, class posets and p-subgroup Euler characteristics of
/// PSU(3, q), q = 2^(2^n).
///
/// Every common option can also be set through its PSU3_* environment
/// variable; an explicit flag wins over the environment, which wins over the
/// built-in default.
#[derive(Parser, Debug)]
#[command(name = "psu3", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Field parameter: q = 2^(2^n).
    #[arg(long, global = true, env = "PSU3_N", default_value_t = 1)]
    n: u32,
    /// Worker threads (the computations are sequential and deterministic).
    #[arg(long, global = true, env = "PSU3_THREADS", default_value_t = 1)]
    threads: usize,
    /// Directory for cached geometry, BSGS, closure and class catalog.
    #[arg(long, global = true, env = "PSU3_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "PSU3_FORMAT", value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Seed for the Monte Carlo and sampled audits.
    #[arg(long, global = true, env = "PSU3_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Maximum number of intersection-closure nodes.
    #[arg(long, global = true, env = "PSU3_BUDGET_NODES", default_value_t = Budgets::default().nodes)]
    budget_nodes: usize,
    /// Maximum number of subgroup conjugacy classes.
    #[arg(long, global = true, env = "PSU3_BUDGET_CLASSES", default_value_t = Budgets::default().classes)]
    budget_classes: usize,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Progress and cache notices on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the geometry and the group (and populate the cache).
    Generate,
    /// Maximal subgroups, their intersection closure and the triangle counts.
    Maximals,
    /// The mu table on the intersection closure.
    Mu,
    /// Full class enumeration and lambda on the poset of classes.
    Lambda,
    /// Euler characteristics of the p-subgroup complexes.
    Chi {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        prime: Vec<u64>,
        /// Every prime dividing |G| and the smallest one that does not.
        #[arg(long)]
        all: bool,
    },
    /// Every check, with one verdict per claim.
    Verify {
        #[arg(long)]
        all: bool,
        #[arg(long, env = "PSU3_MC_TRIALS", default_value_t = DEFAULT_MONTE_CARLO_TRIALS)]
        trials: u64,
        /// Skip the q = 16 checks.
        #[arg(long)]
        no_stretch: bool,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let c = &cli.common;
    let (tasks, primes, trials, stretch) = match &cli.command {
        Command::Generate => (vec![Task::Geometry, Task::Group], vec![], DEFAULT_MONTE_CARLO_TRIALS, false),
        Command::Maximals => (vec![Task::Maximals], vec![], DEFAULT_MONTE_CARLO_TRIALS, false),
        Command::Mu => (vec![Task::Mu], vec![], DEFAULT_MONTE_CARLO_TRIALS, false),
        Command::Lambda => (vec![Task::Lambda], vec![], DEFAULT_MONTE_CARLO_TRIALS, false),
        Command::Chi { prime, .. } => (vec![Task::Chi], prime.clone(), DEFAULT_MONTE_CARLO_TRIALS, false),
        Command::Verify {
            trials, no_stretch, ..
        } => (vec![Task::Verify], vec![], *trials, !no_stretch),
    };
    let cfg = RunConfig {
        n: c.n,
        tasks: close_tasks(&tasks),
        threads: c.threads,
        cache_dir: c.cache_dir.clone(),
        output_format: c.format,
        rng_seed: c.seed,
        budgets: Budgets {
            nodes: c.budget_nodes,
            classes: c.budget_classes,
        },
        primes,
        monte_carlo_trials: trials,
        stretch,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("psu3: {e}");
            return ExitCode::from(2);
        }
    };
    let verbose = cli.common.verbose;
    let mut log = |m: &str| {
        if verbose {
            eprintln!("psu3: {m}");
        }
    };
    let doc = match run_with_log(&cfg, &mut log) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("psu3: {e}");
            return ExitCode::from(2);
        }
    };
    if verbose {
        for (task, secs) in &doc.timing {
            eprintln!("psu3: {task} took {secs:.2}s");
        }
    }
    for e in &doc.errors {
        eprintln!("psu3: {e}");
    }
    let text = match doc.render(cfg.output_format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("psu3: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.common.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("psu3: cannot write the report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(doc.exit_code() as u8)
}
