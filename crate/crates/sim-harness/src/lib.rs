//! Monte Carlo harness for coded-caching content delivery over a
//! multi-antenna downlink.
//!
//! This crate turns the analytic layers below it into experiments: it draws
//! single-cell channel realizations (annulus placement, log-distance path
//! loss, unit-power Rayleigh fading), runs paired trials of the delivery
//! schemes — greedy time-sharing, full superposition, the grouping
//! baseline, and the sparse joint redesign — over a rate grid, and reports
//! mean transmit power per scheme in dBW as CSV rows plus a gnuplot script.
//! It also regenerates the slot-count comparison table from the closed-form
//! bounds. The `cachesim` binary exposes all of it as subcommands.
//!
//! Determinism: a sweep is a pure function of its spec. Trial `i` reads
//! stream `i` of the master-seeded generator, trials are aggregated in
//! trial order regardless of worker-pool scheduling, and the CSV renderer
//! formats with fixed precision, so identical specs produce identical
//! bytes.
//!
//! # Example
//!
//! ```
//! use sim_harness::{reproduce_table1, CellConfig};
//!
//! // The published slot-count comparison regenerates from closed forms.
//! let rows = reproduce_table1();
//! assert_eq!(rows.len(), 10);
//! assert_eq!((rows[0].b_u, rows[0].b_l), (9, 45));
//! assert!((rows[0].ratio - 0.2).abs() < 1e-12);
//!
//! // The default cell matches the documented model.
//! let cell = CellConfig::default();
//! assert!((cell.path_loss_db(1000.0) - 148.1).abs() < 1e-12);
//! ```

pub mod cell;
pub mod channel;
pub mod sweep;
pub mod table1;

use thiserror::Error;

/// Errors raised while assembling or validating experiment configurations.
///
/// Solver failures inside a sweep are not errors: they are counted per row
/// as failed trials.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    /// A spec, instance, or scheme could not be constructed as requested.
    #[error("configuration error: {reason}")]
    Config { reason: String },
}

pub use cell::{dbw_to_watts, CellConfig, CI_TRIALS, DEFAULT_TRIALS};
pub use channel::{annulus_radius, draw_channels};
pub use sweep::{
    gnuplot_script, joint_init_plan, run_sweep, sweep_csv, Scheme, SweepRow, SweepSpec,
};
pub use table1::{reproduce_table1, table1_csv, Table1Row};
