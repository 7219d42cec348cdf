//! Joint delivery-pattern and beamforming design under a per-user,
//! per-slot decode budget.
//!
//! Scheduling heuristics fix which message goes in which slot before any
//! channel knowledge is used. This crate instead treats every per-slot rate
//! `R^𝒯(i)` as a variable and imposes the decoding-complexity budget as an
//! ℓ0 constraint — each user may see at most `s` nonzero-rate messages per
//! slot — smoothed by the concave surrogate `(2/π)·arctan(R/ξ)` so the
//! whole problem fits a successive-convex-approximation loop over `B`
//! equal-blocklength slots.
//!
//! [`solve_joint`] runs the loop from a budget-respecting schedule (extended
//! by an ε-activation so the surrogate can move rate anywhere), rounds
//! sub-threshold rates to zero, checks the exact census against the budget,
//! and certifies the rounded pattern with a fresh fixed-rate beamforming
//! solve. Both the certified solution and the induced plan are returned, so
//! results compare directly against scheduled baselines.
//!
//! ```
//! use caching_core::ProblemInstance;
//! use delivery_scheduler::{greedy_schedule, ScheduleConfig};
//! use beamforming_sca::ChannelRealization;
//! use num_complex::Complex64;
//! use sparse_joint_opt::{solve_joint, SparseConfig};
//!
//! // K = 3 users, t = 1: three pair-messages, all in one slot (s = 2).
//! let instance = ProblemInstance::with_uniform_noise(3, 3, 1, 2.0, 4, 1.0).unwrap();
//! let plan = greedy_schedule(&instance, &ScheduleConfig::new(2)).unwrap();
//! let channels = ChannelRealization::new(
//!     (0..3)
//!         .map(|u| {
//!             (0..4)
//!                 .map(|a| {
//!                     let p = 0.9 * (u as f64 + 1.0) * (a as f64 + 1.0);
//!                     Complex64::new(p.cos(), p.sin())
//!                 })
//!                 .collect()
//!         })
//!         .collect(),
//!     vec![1.0; 3],
//! )
//! .unwrap();
//!
//! let config = SparseConfig::for_instance(&instance, plan.num_slots(), 2);
//! let outcome = solve_joint(&channels, &instance, &config, &plan).unwrap();
//! assert!(outcome.solution.power > 0.0);
//! assert!(outcome.census.iter().flatten().all(|&c| c <= 2));
//! ```

mod joint;
mod smooth;
mod types;

pub use joint::solve_joint;
pub use smooth::{arctan_smooth, l0_census};
pub use types::{JointOutcome, SparseConfig, SparseError};
