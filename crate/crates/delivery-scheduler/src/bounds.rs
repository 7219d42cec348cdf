//! Closed-form slot-count bounds, baseline counts, and DoF rationals.

use caching_core::binomial;
use num_rational::Ratio;
use thiserror::Error;

/// Errors across the scheduling layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedulerError {
    /// Decode limit outside `1..=C(K−1, t)`.
    #[error("decode limit s = {s} outside 1..={max}")]
    DecodeLimitOutOfRange { s: u32, max: u64 },
    /// Exact search guard: instance has too many messages.
    #[error("exact search limited to C(K,t+1) <= {guard} messages, got {messages}")]
    InstanceTooLarge { messages: u64, guard: u64 },
    /// Exact search found no feasible partition within the slot cap.
    #[error("no partition with at most {cap} slots (cap below the optimum?)")]
    SearchCapExceeded { cap: usize },
    /// Baseline grouping needs (t+β) to divide (t+α).
    #[error("baseline requires (t+β) to divide (t+α): t={t}, α={alpha}, β={beta}")]
    BadBaseline { t: u32, alpha: u32, beta: u32 },
    /// Baseline group size exceeds the user population.
    #[error("baseline group size t+α = {group} exceeds K = {k}")]
    BaselineTooWide { group: u32, k: u32 },
    /// Malformed or wrong-version plan text.
    #[error("bad plan format: {reason}")]
    PlanFormat { reason: String },
    /// A structural plan invariant failed.
    #[error("plan invariant violated: {reason}")]
    Invariant { reason: String },
}

/// Upper bound `B_u` on the greedy slot count:
/// `min{ ⌈C(K,t+1)/(s·⌊K/(t+1)⌋)⌉, ⌈C(K−1,t)/(s−1)⌉+1 }`,
/// with only the first term at `s = 1` (the second divides by zero).
#[must_use]
pub fn slots_upper_bound(k: u32, t: u32, s: u32) -> u64 {
    let first =
        binomial(k as u64, (t + 1) as u64).div_ceil(s as u64 * (k / (t + 1)) as u64);
    if s == 1 {
        return first;
    }
    let second = binomial((k - 1) as u64, t as u64).div_ceil((s - 1) as u64) + 1;
    first.min(second)
}

/// Slot count of the grouping baseline:
/// `B_l = C(K, t+α)·(t+α)!/(δ!·((t+β)!)^δ)` with `δ = (t+α)/(t+β)`.
///
/// # Errors
///
/// Returns [`SchedulerError::BadBaseline`] when `(t+β)` does not divide
/// `(t+α)`, or [`SchedulerError::BaselineTooWide`] when `t+α > K`.
pub fn baseline_slot_count(k: u32, t: u32, alpha: u32, beta: u32) -> Result<u64, SchedulerError> {
    let big = t + alpha;
    let small = t + beta;
    if big > k {
        return Err(SchedulerError::BaselineTooWide { group: big, k });
    }
    if big % small != 0 {
        return Err(SchedulerError::BadBaseline { t, alpha, beta });
    }
    let delta = (big / small) as u128;
    let factorial = |n: u128| (1..=n).product::<u128>();
    let count = binomial(k as u64, big as u64) as u128 * factorial(big as u128)
        / (factorial(delta) * factorial(small as u128).pow(delta as u32));
    Ok(count as u64)
}

/// Per-user DoF lower bound `C(K,t)/(s·B_u)` as an exact rational.
#[must_use]
pub fn dof_lower_bound(k: u32, t: u32, s: u32) -> Ratio<u64> {
    Ratio::new(
        binomial(k as u64, t as u64),
        s as u64 * slots_upper_bound(k, t, s),
    )
}

/// Per-user DoF `C(K,t)/(s·B)` achieved by a plan with `B` slots.
#[must_use]
pub fn dof_of_plan(plan: &crate::plan::DeliveryPlan, s: u32) -> Ratio<u64> {
    Ratio::new(
        binomial(plan.num_users as u64, plan.caching_factor as u64),
        s as u64 * plan.num_slots() as u64,
    )
}
