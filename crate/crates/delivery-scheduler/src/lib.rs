//! Time-slot scheduling of coded multicast messages.
//!
//! Sending all `C(K, t+1)` XOR messages at once forces every receiver to
//! decode `C(K−1, t)` superposed streams — the MAC decoding region then has
//! `K·(2^{C(K−1,t)}−1)` constraints and the optimizer drowns. This crate
//! partitions the message set into `B` time slots so that no user decodes
//! more than `s` messages per slot, trading a small DoF loss for an
//! exponential cut in constraint count.
//!
//! # Features
//!
//! - Greedy slot packing under the decode limit, with documented
//!   deterministic tie-breaking ([`greedy_schedule`])
//! - Exact minimum-slot search for desk-scale instances ([`min_slots_exact`])
//! - Closed-form slot-count bounds and per-user DoF bounds as exact
//!   rationals ([`slots_upper_bound`], [`dof_lower_bound`])
//! - The grouping baseline that serves one `(t+α)`-subset of users per slot
//!   ([`baseline_plan`], [`baseline_slot_count`])
//! - MAC-constraint census for complexity comparisons ([`constraint_census`])
//!
//! # Example
//!
//! ```
//! use caching_core::ProblemInstance;
//! use delivery_scheduler::{greedy_schedule, ScheduleConfig};
//!
//! // K = 5 users, t = 1: ten pair messages; with s = 2 they pack into
//! // two slots of five messages each, every user decoding twice per slot.
//! let inst = ProblemInstance::with_uniform_noise(5, 5, 1, 4.0, 6, 1.0).unwrap();
//! let plan = greedy_schedule(&inst, &ScheduleConfig::new(2)).unwrap();
//! assert_eq!(plan.num_slots(), 2);
//! assert_eq!(plan.slot_messages[0].len(), 5);
//! assert!((plan.blocklength_fractions[0] - 0.5).abs() < 1e-12);
//! ```

pub mod baseline;
pub mod bounds;
pub mod census;
pub mod exact;
pub mod greedy;
pub mod plan;

pub use baseline::baseline_plan;
pub use bounds::{
    baseline_slot_count, dof_lower_bound, dof_of_plan, slots_upper_bound, SchedulerError,
};
pub use census::{constraint_census, CensusReport};
pub use exact::min_slots_exact;
pub use greedy::{greedy_schedule, ScheduleConfig, TieBreak};
pub use plan::DeliveryPlan;
