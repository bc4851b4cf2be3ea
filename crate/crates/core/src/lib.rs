//! Subgroup-lattice Möbius functions, class posets and p-subgroup Euler
//! characteristics for the unitary groups PSU(3, 2^(2^n)).

pub mod cache;
pub mod classes;
pub mod config;
pub mod context;
pub mod error;
pub mod euler;
pub mod field;
pub mod geometry;
pub mod group;
pub mod maximal;
pub mod moebius;
pub mod perm;
pub mod report;
pub mod runner;
pub mod subgroup;
#[cfg(test)]
mod testkit;

pub use config::{OutputFormat, RunConfig, Task};
pub use error::{Error, Result};
pub use report::{ReportDocument, Status};
pub use runner::run;
