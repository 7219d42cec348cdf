//! Grouping baseline: serve one `(t+α)`-subset of users per slot.
//!
//! The baseline walks all `C(K, t+α)` user groups and, in each group's
//! slot, sends every `(t+1)`-subset message inside the group. A message
//! therefore recurs in `C(K−t−1, α−1)` slots and its rate is split equally
//! among them — the subfile is effectively chopped into that many
//! minifiles. Blocklength fractions are uniform.

use crate::bounds::SchedulerError;
use crate::plan::DeliveryPlan;
use caching_core::{binomial, ksubsets, subset_rank, ProblemInstance};

/// Builds the grouping baseline plan for group size `t+α`.
///
/// # Errors
///
/// Returns [`SchedulerError::BaselineTooWide`] when `t+α > K`.
pub fn baseline_plan(
    instance: &ProblemInstance,
    alpha: u32,
) -> Result<DeliveryPlan, SchedulerError> {
    let k = instance.num_users;
    let t = instance.caching_factor;
    let group = t + alpha;
    if group > k {
        return Err(SchedulerError::BaselineTooWide { group, k });
    }

    let targets = ksubsets(k, t + 1);
    let groups = ksubsets(k, group);
    let num_slots = groups.len();
    let incidence = binomial((k - t - 1) as u64, (alpha - 1) as u64) as f64;
    let split_rate = instance.per_message_rate() / incidence;

    let mut slot_messages: Vec<Vec<usize>> = Vec::with_capacity(num_slots);
    let mut rate_matrix = vec![vec![0.0; num_slots]; targets.len()];
    for (i, members) in groups.iter().enumerate() {
        let mut slot: Vec<usize> = inner_subsets(members, (t + 1) as usize)
            .into_iter()
            .map(|subset| subset_rank(k, &subset))
            .collect();
        slot.sort_unstable();
        for &m in &slot {
            rate_matrix[m][i] = split_rate;
        }
        slot_messages.push(slot);
    }

    Ok(DeliveryPlan {
        num_users: k,
        caching_factor: t,
        message_targets: targets,
        slot_messages,
        rate_matrix,
        blocklength_fractions: vec![1.0 / num_slots as f64; num_slots],
    })
}

/// All `size`-subsets of `members` (assumed sorted), in lexicographic order.
fn inner_subsets(members: &[u32], size: usize) -> Vec<Vec<u32>> {
    ksubsets(members.len() as u32, size as u32)
        .into_iter()
        .map(|positions| {
            positions
                .iter()
                .map(|&p| members[(p - 1) as usize])
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(k: u32, m: u32) -> ProblemInstance {
        ProblemInstance::with_uniform_noise(k, k, m, 4.0, 6, 1.0).unwrap()
    }

    #[test]
    fn k5_alpha2_ten_slots_three_way_split() {
        let instance = inst(5, 1);
        let plan = baseline_plan(&instance, 2).unwrap();
        assert_eq!(plan.num_slots(), 10); // C(5,3)
        for m in 0..plan.num_messages() {
            assert_eq!(plan.incidence(m), 3); // C(3,1)
            let total: f64 = plan.rate_matrix[m].iter().sum();
            assert!((total - instance.per_message_rate()).abs() < 1e-12);
        }
        for &f in &plan.blocklength_fractions {
            assert!((f - 0.1).abs() < 1e-15);
        }
        plan.validate(instance.per_message_rate()).unwrap();
    }

    #[test]
    fn k5_alpha2_group_members_decode_two() {
        // In a triple's slot each member decodes C(2,1) = 2 messages.
        let plan = baseline_plan(&inst(5, 1), 2).unwrap();
        // Slot 0 is group {1,2,3}.
        assert_eq!(plan.decode_counts(0), vec![2, 2, 2, 0, 0]);
    }

    #[test]
    fn alpha_equal_spread_degenerates_to_superposition() {
        // K = 4, t = 1, α = 3: single slot carrying all six messages.
        let plan = baseline_plan(&inst(4, 1), 3).unwrap();
        assert_eq!(plan.num_slots(), 1);
        assert_eq!(plan.slot_messages[0].len(), 6);
        assert_eq!(plan.incidence(0), 1); // C(2,2)
    }

    #[test]
    fn alpha_one_is_one_message_per_slot() {
        let plan = baseline_plan(&inst(4, 1), 1).unwrap();
        assert_eq!(plan.num_slots(), 6);
        for slot in &plan.slot_messages {
            assert_eq!(slot.len(), 1);
        }
    }

    #[test]
    fn oversize_group_rejected() {
        assert_eq!(
            baseline_plan(&inst(4, 1), 4),
            Err(SchedulerError::BaselineTooWide { group: 5, k: 4 })
        );
    }
}
