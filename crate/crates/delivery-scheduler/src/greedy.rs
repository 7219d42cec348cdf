//! Greedy slot packing under the per-user decode limit.
//!
//! One slot at a time, the scheduler repeatedly picks the undelivered
//! message with the largest overlap with the currently least-served users
//! and adds it if nobody's decode count would exceed `s`. Slots close when
//! no remaining message fits; blocklength fractions are proportional to
//! slot size and each message carries the full per-message rate in its
//! single assigned slot.

use crate::bounds::SchedulerError;
use crate::plan::DeliveryPlan;
use caching_core::{binomial, ksubsets, ProblemInstance};

/// Tie-breaking rule among equal-overlap candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Overlap, then fewest candidates blocked, then most-loaded users,
    /// then lexicographic. Keeps the slot count within the closed-form
    /// upper bound on every instance small enough to verify exhaustively.
    #[default]
    Refined,
    /// Overlap, then lexicographic — the shortest rule that is still
    /// deterministic. Can exceed the upper bound (e.g. K = 5, t = 1,
    /// s = 1 packs pairs around user 1 first and needs 7 slots, not 5).
    Lex,
}

/// Configuration for [`greedy_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleConfig {
    /// Per-user decode limit `s`, in `1..=C(K−1, t)`.
    pub decode_limit: u32,
    /// Tie-breaking rule among equal candidates.
    pub tie_break: TieBreak,
    /// Keep scanning for a fitting message after the best-overlap candidate
    /// violates the limit (`true`, default), or close the slot immediately
    /// (`false`). Immediate closing can leave users idle in non-final slots
    /// and overshoot the slot-count bound.
    pub continue_scan: bool,
}

impl ScheduleConfig {
    /// Default configuration: refined tie-break, scanning on.
    #[must_use]
    pub fn new(decode_limit: u32) -> Self {
        Self {
            decode_limit,
            tie_break: TieBreak::Refined,
            continue_scan: true,
        }
    }

    /// Minimal variant: lexicographic ties, slot closes at the first
    /// non-fitting best candidate.
    #[must_use]
    pub fn minimal(decode_limit: u32) -> Self {
        Self {
            decode_limit,
            tie_break: TieBreak::Lex,
            continue_scan: false,
        }
    }
}

/// Packs all `C(K, t+1)` messages into slots with `max_k c_k(i) ≤ s`.
///
/// Each message lands in exactly one slot. Within a slot the scheduler
/// greedily serves the least-served users first; see [`TieBreak`] for how
/// ties are resolved.
///
/// # Errors
///
/// Returns [`SchedulerError::DecodeLimitOutOfRange`] if
/// `s ∉ 1..=C(K−1, t)` (beyond that every user could decode the full
/// message set in one shot and the limit is meaningless).
pub fn greedy_schedule(
    instance: &ProblemInstance,
    config: &ScheduleConfig,
) -> Result<DeliveryPlan, SchedulerError> {
    let k = instance.num_users;
    let t = instance.caching_factor;
    let s = config.decode_limit;
    let max_s = binomial((k - 1) as u64, t as u64);
    if s == 0 || s as u64 > max_s {
        return Err(SchedulerError::DecodeLimitOutOfRange { s, max: max_s });
    }

    let targets = ksubsets(k, t + 1);
    let mut remaining: Vec<usize> = (0..targets.len()).collect();
    let mut slots: Vec<Vec<usize>> = Vec::new();

    while !remaining.is_empty() {
        // Slot-start snapshot of each user's undelivered-message count,
        // used by the "most-loaded users" tie-break criterion.
        let mut degree = vec![0u32; k as usize + 1];
        for &m in &remaining {
            for &u in &targets[m] {
                degree[u as usize] += 1;
            }
        }

        let mut counts = vec![0u32; k as usize + 1];
        let mut slot: Vec<usize> = Vec::new();
        let mut candidates = remaining.clone();

        loop {
            let fits = |m: usize, counts: &[u32]| {
                targets[m].iter().all(|&u| counts[u as usize] < s)
            };
            let pool: Vec<usize> = if config.continue_scan {
                candidates
                    .iter()
                    .copied()
                    .filter(|&m| fits(m, &counts))
                    .collect()
            } else {
                candidates.clone()
            };
            if pool.is_empty() {
                break;
            }

            // Users with the smallest decode count so far.
            let min_count = (1..=k).map(|u| counts[u as usize]).min().unwrap();
            let overlap = |m: usize| {
                targets[m]
                    .iter()
                    .filter(|&&u| counts[u as usize] == min_count)
                    .count() as u32
            };
            // How many other candidates would still fit after adding m.
            let unblocked_after = |m: usize| {
                let mut next = counts.clone();
                for &u in &targets[m] {
                    next[u as usize] += 1;
                }
                candidates
                    .iter()
                    .filter(|&&other| other != m && fits(other, &next))
                    .count() as u32
            };
            let urgency = |m: usize| -> u32 {
                targets[m].iter().map(|&u| degree[u as usize]).sum()
            };

            // Ascending index order makes "first of the maxima" the
            // lexicographically smallest target set.
            let chosen = match config.tie_break {
                TieBreak::Refined => pool
                    .iter()
                    .copied()
                    .map(|m| ((overlap(m), unblocked_after(m), urgency(m)), m))
                    .fold(None::<((u32, u32, u32), usize)>, |best, cur| match best {
                        Some(b) if cur.0 <= b.0 => Some(b),
                        _ => Some(cur),
                    })
                    .map(|(_, m)| m)
                    .unwrap(),
                TieBreak::Lex => pool
                    .iter()
                    .copied()
                    .map(|m| (overlap(m), m))
                    .fold(None::<(u32, usize)>, |best, cur| match best {
                        Some(b) if cur.0 <= b.0 => Some(b),
                        _ => Some(cur),
                    })
                    .map(|(_, m)| m)
                    .unwrap(),
            };

            candidates.retain(|&m| m != chosen);
            if !config.continue_scan && !fits(chosen, &counts) {
                break;
            }
            for &u in &targets[chosen] {
                counts[u as usize] += 1;
            }
            slot.push(chosen);
            remaining.retain(|&m| m != chosen);
        }

        slot.sort_unstable();
        slots.push(slot);
    }

    Ok(DeliveryPlan::from_partition(
        k,
        t,
        targets,
        slots,
        instance.per_message_rate(),
    ))
}
