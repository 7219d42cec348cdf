//! MAC-constraint census: how big the optimizer's constraint set gets.
//!
//! Superposition decoding at user `k` in slot `i` contributes one rate
//! constraint per non-empty subset of the `c_k(i)` messages it decodes —
//! `2^{c_k(i)} − 1` in total. The census tallies these per slot, which is
//! the complexity currency the decode limit `s` is spent on.

use crate::plan::DeliveryPlan;

/// Per-slot and total MAC-constraint counts for a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    /// `per_slot[i] = Σ_k (2^{c_k(i)} − 1)`.
    pub per_slot: Vec<u64>,
    /// Sum over slots.
    pub total: u64,
}

/// Counts the MAC decoding constraints the plan induces.
#[must_use]
pub fn constraint_census(plan: &DeliveryPlan) -> CensusReport {
    let per_slot: Vec<u64> = (0..plan.num_slots())
        .map(|i| {
            (1..=plan.num_users)
                .map(|k| (1u64 << plan.decode_count(k, i)) - 1)
                .sum()
        })
        .collect();
    let total = per_slot.iter().sum();
    CensusReport { per_slot, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{greedy_schedule, ScheduleConfig};
    use caching_core::{ksubsets, ProblemInstance};

    fn inst(k: u32, m: u32) -> ProblemInstance {
        ProblemInstance::with_uniform_noise(k, k, m, 4.0, 6, 1.0).unwrap()
    }

    #[test]
    fn full_superposition_k5() {
        // One slot, all ten messages: 5 users × (2⁴ − 1) = 75.
        let plan = greedy_schedule(&inst(5, 1), &ScheduleConfig::new(4)).unwrap();
        assert_eq!(plan.num_slots(), 1);
        assert_eq!(constraint_census(&plan).total, 75);
    }

    #[test]
    fn split_k5_s2_is_fifteen_per_slot() {
        // Two slots, everyone decoding twice: 5 × (2² − 1) = 15 each.
        let plan = greedy_schedule(&inst(5, 1), &ScheduleConfig::new(2)).unwrap();
        let census = constraint_census(&plan);
        assert_eq!(census.per_slot, vec![15, 15]);
        assert_eq!(census.total, 30);
    }

    #[test]
    fn single_message_slot_counts_targets() {
        // A lone (t+1)-subset message: one constraint per targeted user.
        let plan = DeliveryPlan::from_partition(4, 1, ksubsets(4, 2), vec![vec![0]], 1.0);
        assert_eq!(constraint_census(&plan).per_slot, vec![2]);
    }
}
