//! Minimum-power multicast beamforming for coded-caching delivery plans.
//!
//! Given a delivery plan (which messages share each slot, their targets,
//! rates, and blocklength fractions) and one channel realization, this crate
//! finds per-slot beamforming vectors minimizing the average transmit power
//! `Σ_i (n_i/n) Σ_𝒯 ‖w_𝒯(i)‖²` while every user can jointly decode all
//! messages targeted to it. Joint decoding over the slot's multiple-access
//! channel is what distinguishes this from classic multigroup multicast: a
//! user with `c` targeted messages contributes `2^c − 1` rate-region
//! constraints, not one SINR threshold.
//!
//! The solver ([`sca_solve`]) is a successive convex approximation: each
//! non-convex SINR-sum constraint is split into a difference of convex
//! quadratics and the concave side linearized at the current point, giving
//! a second-order-cone (plus, in joint-rate mode, exponential-cone)
//! subproblem whose feasible set sits inside the true one. Starting points
//! come from zero-forcing with closed-form power scaling
//! ([`zero_forcing_init`]) or a per-slot semidefinite relaxation with
//! Gaussian randomization ([`sdr_init`]).
//!
//! # Example
//!
//! ```
//! use beamforming_sca::{sca_solve, verify_feasibility, ChannelRealization, SCAConfig};
//! use caching_core::ProblemInstance;
//! use delivery_scheduler::{greedy_schedule, ScheduleConfig};
//! use num_complex::Complex64;
//!
//! // K = 2 users, t = 1: a single XOR message targeted at both.
//! let instance = ProblemInstance::with_uniform_noise(2, 2, 1, 2.0, 4, 1.0).unwrap();
//! let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
//! let channels = ChannelRealization::new(
//!     vec![
//!         vec![Complex64::new(1.0, 0.4), Complex64::new(0.2, -0.8),
//!              Complex64::new(-0.5, 0.1), Complex64::new(0.3, 0.3)],
//!         vec![Complex64::new(0.7, -0.2), Complex64::new(-0.1, 0.9),
//!              Complex64::new(0.4, -0.4), Complex64::new(-0.6, 0.2)],
//!     ],
//!     vec![1.0, 1.0],
//! )
//! .unwrap();
//!
//! let solution = sca_solve(&plan, &channels, &SCAConfig::default()).unwrap();
//! let report = verify_feasibility(&solution, &plan, &channels, 1e-6).unwrap();
//! assert!(report.feasible);
//! assert!(solution.power > 0.0);
//! ```

pub mod descriptors;
pub mod init;
pub mod sca;
pub mod types;

pub use descriptors::{
    average_power, mac_constraint_set, sinr, verify_feasibility, watts_to_dbw,
    FeasibilityReport, MacDescriptor,
};
pub use init::{sdr_init, zero_forcing_init, SdrOutcome};
pub use sca::sca_solve;
pub use types::{
    BeamformingError, BeamformingSolution, ChannelRealization, EtaRecord, InitMode, SCAConfig,
    SlotBeams, TracePoint,
};
