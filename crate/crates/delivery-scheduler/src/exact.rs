//! Exact minimum-slot search for desk-scale instances.
//!
//! Finds the true minimum number of slots by depth-first search over
//! message-to-slot assignments: messages are placed in lexicographic order,
//! and slots are interchangeable, so a new slot may only be opened once all
//! earlier ones are in use. The search answers "does a B-slot partition
//! exist?" for growing B starting at a counting lower bound.

use crate::bounds::SchedulerError;
use crate::plan::DeliveryPlan;
use caching_core::{binomial, ksubsets, ProblemInstance};

/// Largest message count the exhaustive search accepts.
const MESSAGE_GUARD: u64 = 30;

/// Computes the minimum slot count and a witness partition.
///
/// `cap` bounds the search (default: one slot per message, which is always
/// feasible). The witness carries the same rate and blocklength assignment
/// as a greedy plan: full per-message rate in the assigned slot, fractions
/// proportional to slot size.
///
/// # Errors
///
/// - [`SchedulerError::InstanceTooLarge`] when `C(K, t+1)` exceeds the
///   search guard of 30 messages.
/// - [`SchedulerError::DecodeLimitOutOfRange`] for `s ∉ 1..=C(K−1, t)`.
/// - [`SchedulerError::SearchCapExceeded`] when no partition with at most
///   `cap` slots exists.
pub fn min_slots_exact(
    instance: &ProblemInstance,
    s: u32,
    cap: Option<usize>,
) -> Result<(usize, DeliveryPlan), SchedulerError> {
    let k = instance.num_users;
    let t = instance.caching_factor;
    let max_s = binomial((k - 1) as u64, t as u64);
    if s == 0 || s as u64 > max_s {
        return Err(SchedulerError::DecodeLimitOutOfRange { s, max: max_s });
    }
    let num_messages = binomial(k as u64, (t + 1) as u64);
    if num_messages > MESSAGE_GUARD {
        return Err(SchedulerError::InstanceTooLarge {
            messages: num_messages,
            guard: MESSAGE_GUARD,
        });
    }

    let targets = ksubsets(k, t + 1);
    let m = targets.len();
    let cap = cap.unwrap_or(m);

    // Counting lower bounds: per-slot message capacity ⌊K·s/(t+1)⌋ and
    // per-user decode budget s against the C(K−1, t) messages each needs.
    let per_slot = (k as usize * s as usize) / (t as usize + 1);
    let lower = (m.div_ceil(per_slot)).max((max_s as usize).div_ceil(s as usize));

    for b in lower..=cap {
        if let Some(assignment) = feasible(&targets, k, s, b) {
            let mut slots: Vec<Vec<usize>> = vec![Vec::new(); b];
            for (msg, slot) in assignment.into_iter().enumerate() {
                slots[slot].push(msg);
            }
            slots.retain(|slot| !slot.is_empty());
            let num_slots = slots.len();
            let plan = DeliveryPlan::from_partition(
                k,
                t,
                targets,
                slots,
                instance.per_message_rate(),
            );
            return Ok((num_slots, plan));
        }
    }
    Err(SchedulerError::SearchCapExceeded { cap })
}

/// DFS: can all messages be packed into `b` slots? Returns the slot index
/// of each message on success.
fn feasible(targets: &[Vec<u32>], k: u32, s: u32, b: usize) -> Option<Vec<usize>> {
    let mut counts = vec![vec![0u32; k as usize + 1]; b];
    let mut used = vec![0usize; b];
    let mut assignment = vec![0usize; targets.len()];
    if dfs(targets, s, 0, &mut counts, &mut used, &mut assignment) {
        Some(assignment)
    } else {
        None
    }
}

fn dfs(
    targets: &[Vec<u32>],
    s: u32,
    idx: usize,
    counts: &mut [Vec<u32>],
    used: &mut [usize],
    assignment: &mut [usize],
) -> bool {
    if idx == targets.len() {
        return true;
    }
    for j in 0..counts.len() {
        // Slots are interchangeable: open them in order of first use.
        if j > 0 && used[j - 1] == 0 {
            break;
        }
        let fits = targets[idx].iter().all(|&u| counts[j][u as usize] < s);
        if !fits {
            continue;
        }
        for &u in &targets[idx] {
            counts[j][u as usize] += 1;
        }
        used[j] += 1;
        assignment[idx] = j;
        if dfs(targets, s, idx + 1, counts, used, assignment) {
            return true;
        }
        used[j] -= 1;
        for &u in &targets[idx] {
            counts[j][u as usize] -= 1;
        }
    }
    false
}
