//! Run configuration shared by the CLI and the Python bindings.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Serialize;

use crate::classes::DEFAULT_CLASS_BUDGET;
use crate::error::{Error, Result};
use crate::maximal::DEFAULT_NODE_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Geometry,
    Group,
    Maximals,
    Mu,
    Lambda,
    Chi,
    Verify,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Geometry,
        Task::Group,
        Task::Maximals,
        Task::Mu,
        Task::Lambda,
        Task::Chi,
        Task::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Geometry => "geometry",
            Task::Group => "group",
            Task::Maximals => "maximals",
            Task::Mu => "mu",
            Task::Lambda => "lambda",
            Task::Chi => "chi",
            Task::Verify => "verify",
        }
    }

    /// Direct prerequisites.
    pub fn requires(self) -> &'static [Task] {
        match self {
            Task::Geometry => &[],
            Task::Group => &[Task::Geometry],
            Task::Maximals => &[Task::Group],
            Task::Mu => &[Task::Maximals],
            Task::Lambda | Task::Chi => &[Task::Group],
            Task::Verify => &[Task::Mu, Task::Lambda, Task::Chi],
        }
    }

    /// Tasks that can run at n = 2.
    pub fn allowed_at_q16(self) -> bool {
        matches!(self, Task::Geometry | Task::Group | Task::Maximals)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Maximum number of intersection-closure nodes.
    pub nodes: usize,
    /// Maximum number of subgroup conjugacy classes.
    pub classes: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            nodes: DEFAULT_NODE_BUDGET,
            classes: DEFAULT_CLASS_BUDGET,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20240601;
pub const DEFAULT_MONTE_CARLO_TRIALS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub n: u32,
    /// Requested tasks, closed under prerequisites.
    pub tasks: BTreeSet<Task>,
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub rng_seed: u64,
    pub budgets: Budgets,
    /// Primes for the χ task; empty means every prime dividing |G| plus the
    /// smallest one that does not.
    pub primes: Vec<u64>,
    pub monte_carlo_trials: u64,
    /// Whether `verify` also runs the q = 16 checks.
    pub stretch: bool,
}

impl RunConfig {
    pub fn new(n: u32, requested: &[Task]) -> Result<Self> {
        let cfg = RunConfig {
            n,
            tasks: close_tasks(requested),
            threads: 1,
            cache_dir: None,
            output_format: OutputFormat::Json,
            rng_seed: DEFAULT_SEED,
            budgets: Budgets::default(),
            primes: Vec::new(),
            monte_carlo_trials: DEFAULT_MONTE_CARLO_TRIALS,
            stretch: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Usage("n must be at least 1".into()));
        }
        if self.n > 2 {
            return Err(Error::Usage(format!(
                "n = {} is outside the supported range (n = 1 fully, n = 2 for geometry, group and maximals)",
                self.n
            )));
        }
        if self.tasks.is_empty() {
            return Err(Error::Usage("no task requested".into()));
        }
        if self.tasks != close_tasks(&self.tasks.iter().copied().collect::<Vec<_>>()) {
            return Err(Error::Usage("task set is not closed under prerequisites".into()));
        }
        if self.n == 2 {
            if let Some(t) = self.tasks.iter().find(|t| !t.allowed_at_q16()) {
                return Err(Error::Usage(format!(
                    "task {} is not available at n = 2: the intersection closure at q = 16 has \
                     millions of nodes (the self-polar triangle family alone has about 2.5 million \
                     members), far beyond the node budget of {}",
                    t.name(),
                    self.budgets.nodes
                )));
            }
        }
        if self.threads == 0 {
            return Err(Error::Usage("threads must be at least 1".into()));
        }
        if self.has(Task::Verify) && self.monte_carlo_trials == 0 {
            return Err(Error::Usage("verify needs at least one Monte Carlo trial".into()));
        }
        Ok(())
    }
}

pub fn close_tasks(requested: &[Task]) -> BTreeSet<Task> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<Task> = requested.to_vec();
    while let Some(t) = stack.pop() {
        if out.insert(t) {
            stack.extend_from_slice(t.requires());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_tasks() {
        assert_eq!(
            close_tasks(&[Task::Mu]).into_iter().collect::<Vec<_>>(),
            vec![Task::Geometry, Task::Group, Task::Maximals, Task::Mu]
        );
        assert_eq!(close_tasks(&[Task::Chi]).len(), 3);
        assert_eq!(close_tasks(&[Task::Verify]).len(), 7);
    }

    #[test]
    fn q16_is_limited() {
        assert!(RunConfig::new(2, &[Task::Maximals]).is_ok());
        let err = RunConfig::new(2, &[Task::Mu]).unwrap_err().to_string();
        assert!(err.contains("node budget"), "{err}");
        assert!(RunConfig::new(3, &[Task::Geometry]).is_err());
        assert!(RunConfig::new(0, &[Task::Geometry]).is_err());
    }
}
