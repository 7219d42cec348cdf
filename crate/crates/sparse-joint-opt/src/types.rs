//! Configuration, outcome, and error types for the sparse joint solver.

use beamforming_sca::{BeamformingError, BeamformingSolution, InitMode, SCAConfig, TracePoint};
use caching_core::ProblemInstance;
use delivery_scheduler::DeliveryPlan;
use thiserror::Error;

/// Errors from the sparse joint optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SparseError {
    /// Configuration outside its documented domain.
    #[error("bad sparse configuration: {reason}")]
    BadConfig { reason: String },
    /// The provided initial plan is unusable for this problem.
    #[error("bad initial plan: {reason}")]
    BadInit { reason: String },
    /// No feasible dense starting point could be constructed.
    #[error("dense initialization failed: {reason}")]
    InitializationFailure { reason: String },
    /// After rounding, some user decodes more messages in a slot than the
    /// budget allows: the smoothing slack let the relaxed solution cheat.
    #[error("decode budget violated after rounding: user {user} decodes {count} > {budget} messages in slot {slot}")]
    BudgetViolation {
        user: u32,
        slot: usize,
        count: usize,
        budget: u32,
    },
    /// The beamforming layer failed (initialization or certification).
    #[error("beamforming layer: {0}")]
    Beamforming(#[from] BeamformingError),
    /// The conic backend rejected or failed on a dense subproblem.
    #[error("backend failure: {0}")]
    Backend(#[from] convex_backend::BackendError),
}

/// Controls for the smoothed-ℓ0 joint problem.
///
/// Slots have equal blocklength `1/B`. The embedded [`SCAConfig`] supplies
/// the loop controls (step size, stopping rule, feasibility tolerance) and
/// the initializer choice for the inner fixed-rate solves; its
/// `couple_slots`/`optimize_rates` flags are ignored here because the dense
/// problem is inherently coupled with free rates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseConfig {
    /// Number of delivery slots `B`, each of blocklength `1/B`.
    pub num_slots: usize,
    /// Per-user, per-slot decode budget `s`.
    pub budget: u32,
    /// Smoothing constant `ξ > 0` of the arctan surrogate.
    pub xi: f64,
    /// Rates below this threshold are rounded to zero after convergence.
    pub rounding_threshold: f64,
    /// Shared SCA controls.
    pub sca: SCAConfig,
}

impl SparseConfig {
    /// Defaults scaled to the instance: `ξ = 10⁻³·R/C(K,t)` and rounding
    /// threshold `10⁻⁴·R/C(K,t)`, so the surrogate is near-binary on active
    /// rates while numerically-zero rates fall well below the threshold.
    ///
    /// A zero-rate instance (nothing to deliver) gets small absolute
    /// fallbacks; [`solve_joint`](crate::solve_joint) short-circuits before
    /// they matter.
    #[must_use]
    pub fn for_instance(instance: &ProblemInstance, num_slots: usize, budget: u32) -> Self {
        let rho = instance.per_message_rate();
        let scale = if rho > 0.0 { rho } else { 1.0 };
        Self {
            num_slots,
            budget,
            xi: 1e-3 * scale,
            rounding_threshold: 1e-4 * scale,
            sca: SCAConfig::default(),
        }
    }

    /// Validates the documented domains against the per-message rate.
    ///
    /// # Errors
    ///
    /// [`SparseError::BadConfig`] when a field is out of range, the rounding
    /// threshold is not well below the per-message rate, or the embedded SCA
    /// controls are invalid. `InitMode::Provided` is rejected: the inner
    /// solves run on plans whose shapes the caller cannot know.
    pub fn validate(&self, per_message_rate: f64) -> Result<(), SparseError> {
        let bad = |reason: String| SparseError::BadConfig { reason };
        if self.num_slots == 0 {
            return Err(bad("number of slots must be positive".into()));
        }
        if self.budget == 0 {
            return Err(bad("decode budget must be positive".into()));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(bad(format!("smoothing constant ξ = {} must be positive", self.xi)));
        }
        if !(self.rounding_threshold > 0.0 && self.rounding_threshold.is_finite()) {
            return Err(bad(format!(
                "rounding threshold {} must be positive",
                self.rounding_threshold
            )));
        }
        if per_message_rate > 0.0 {
            // Well below the per-message rate, and small enough that zeroing
            // every slot of a message can never erase a full rate share.
            let cap = per_message_rate / (100.0_f64).max(2.0 * self.num_slots as f64);
            if self.rounding_threshold > cap {
                return Err(bad(format!(
                    "rounding threshold {} must be ≪ per-message rate {per_message_rate} (≤ {cap:.3e} for B = {})",
                    self.rounding_threshold, self.num_slots
                )));
            }
        }
        if matches!(self.sca.init, InitMode::Provided(_)) {
            return Err(bad(
                "provided beam initializers are not supported for the joint problem".into(),
            ));
        }
        self.sca.validate().map_err(SparseError::Beamforming)
    }
}

/// Result of [`solve_joint`](crate::solve_joint).
#[derive(Debug, Clone, PartialEq)]
pub struct JointOutcome {
    /// Certified solution: a fresh fixed-rate solve on the induced plan, so
    /// its power corresponds to an exactly-feasible, budget-respecting
    /// configuration.
    pub solution: BeamformingSolution,
    /// The rounded delivery pattern: `B` equal-blocklength slots, each
    /// listing the messages whose rounded rate survived.
    pub induced_plan: DeliveryPlan,
    /// Final objective of the smoothed dense SCA before rounding, watts.
    pub relaxed_power: f64,
    /// Exact post-rounding counts per `[user − 1][slot]`, all ≤ budget.
    pub census: Vec<Vec<usize>>,
    /// Dense-phase iterate trace (slot tag `None`: one coupled run).
    pub dense_trace: Vec<TracePoint>,
    /// Smoothed budget margin `s − (2/π)·max_{k,i} Σ arctan(r/ξ)` at each
    /// accepted dense iterate, aligned with `dense_trace`; the linearized
    /// rows are inner approximations, so these stay nonnegative.
    pub smoothed_margin_trace: Vec<f64>,
}
