//! Library half of the `noncoh-cap` command: sweep configuration, table
//! schemas, subcommand implementations, and the acceptance criteria.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod criteria;
pub mod error;
pub mod table;

pub use commands::{cmd_asymptote, cmd_bounds, cmd_mc_verify, cmd_sweep, Faults, McCheck, McReport};
pub use config::{OutputFormat, Rho0Policy, SweepConfig};
pub use error::{CliError, CliResult};

/// Worker-count environment variable.
pub const THREADS_ENV: &str = "NONCOH_CAP_THREADS";

/// Builds the worker pool from [`THREADS_ENV`]; unset or empty means the
/// rayon default. Results never depend on the count.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
            })?;
            b = b.num_threads(n);
        }
        _ => {}
    }
    Ok(b.build()?)
}
