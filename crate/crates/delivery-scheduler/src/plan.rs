//! The delivery plan: slots, rates, blocklength split, decode counts.

use crate::bounds::SchedulerError;
use serde::{Deserialize, Serialize};

/// A delivery schedule over `B` time slots.
///
/// Message indices refer to the lexicographic enumeration of `(t+1)`-subsets
/// stored in `message_targets`, matching the order produced by
/// `caching_core::coded_messages`. Greedy and exact plans place each message
/// in exactly one slot; the grouping baseline places it in
/// `C(K−t−1, α−1)` slots with its rate split equally among them.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryPlan {
    /// Number of users `K`.
    pub num_users: u32,
    /// Caching factor `t`.
    pub caching_factor: u32,
    /// Target user set of each message, in lexicographic order.
    pub message_targets: Vec<Vec<u32>>,
    /// `slot_messages[i]` lists the message indices carried by slot `i`,
    /// in ascending order.
    pub slot_messages: Vec<Vec<usize>>,
    /// `rate_matrix[m][i]` = rate of message `m` in slot `i`
    /// (bits per channel use).
    pub rate_matrix: Vec<Vec<f64>>,
    /// `blocklength_fractions[i]` = n_i/n; sums to 1.
    pub blocklength_fractions: Vec<f64>,
}

/// Versioned wire form: rates stored sparsely as (message, slot, rate).
#[derive(Serialize, Deserialize)]
struct PlanWire {
    version: u32,
    num_users: u32,
    caching_factor: u32,
    message_targets: Vec<Vec<u32>>,
    slots: Vec<Vec<usize>>,
    rates: Vec<(usize, usize, f64)>,
    fractions: Vec<f64>,
}

const WIRE_VERSION: u32 = 1;

impl DeliveryPlan {
    /// Builds a single-assignment plan (each message in exactly one slot)
    /// with blocklength fractions proportional to slot size and rate
    /// `per_message_rate` on the assigned slot.
    #[must_use]
    pub fn from_partition(
        num_users: u32,
        caching_factor: u32,
        message_targets: Vec<Vec<u32>>,
        slot_messages: Vec<Vec<usize>>,
        per_message_rate: f64,
    ) -> Self {
        let num_messages = message_targets.len();
        let num_slots = slot_messages.len();
        let mut rate_matrix = vec![vec![0.0; num_slots]; num_messages];
        for (i, slot) in slot_messages.iter().enumerate() {
            for &m in slot {
                rate_matrix[m][i] = per_message_rate;
            }
        }
        let blocklength_fractions = slot_messages
            .iter()
            .map(|slot| slot.len() as f64 / num_messages as f64)
            .collect();
        Self {
            num_users,
            caching_factor,
            message_targets,
            slot_messages,
            rate_matrix,
            blocklength_fractions,
        }
    }

    /// Number of time slots `B`.
    #[must_use]
    pub fn num_slots(&self) -> usize {
        self.slot_messages.len()
    }

    /// Number of messages `|𝒮| = C(K, t+1)`.
    #[must_use]
    pub fn num_messages(&self) -> usize {
        self.message_targets.len()
    }

    /// Decode count `c_k(i) = |𝒮(i) ∩ 𝒮_k|` for user `k` (1-based) in slot `i`.
    #[must_use]
    pub fn decode_count(&self, k: u32, slot: usize) -> u32 {
        self.slot_messages[slot]
            .iter()
            .filter(|&&m| self.message_targets[m].contains(&k))
            .count() as u32
    }

    /// Decode counts of every user in slot `i` (index `k−1`).
    #[must_use]
    pub fn decode_counts(&self, slot: usize) -> Vec<u32> {
        (1..=self.num_users)
            .map(|k| self.decode_count(k, slot))
            .collect()
    }

    /// Indices of messages targeting user `k`: the set `𝒮_k`.
    #[must_use]
    pub fn targets_of(&self, k: u32) -> Vec<usize> {
        (0..self.num_messages())
            .filter(|&m| self.message_targets[m].contains(&k))
            .collect()
    }

    /// How many slots carry message `m` (1 for greedy/exact plans,
    /// `C(K−t−1, α−1)` for the baseline).
    #[must_use]
    pub fn incidence(&self, m: usize) -> usize {
        self.slot_messages
            .iter()
            .filter(|slot| slot.contains(&m))
            .count()
    }

    /// Checks the structural invariants: fractions sum to 1, every message
    /// accumulates at least `per_message_rate` across slots, and positive
    /// rates only appear where the message is actually scheduled.
    ///
    /// # Errors
    ///
    /// Returns [`SchedulerError::Invariant`] naming the first violation.
    pub fn validate(&self, per_message_rate: f64) -> Result<(), SchedulerError> {
        let num_slots = self.num_slots();
        let sum: f64 = self.blocklength_fractions.iter().sum();
        if self.blocklength_fractions.len() != num_slots {
            return Err(invariant("fraction count != slot count"));
        }
        if self.blocklength_fractions.iter().any(|&f| f < 0.0) {
            return Err(invariant("negative blocklength fraction"));
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invariant(&format!("fractions sum to {sum}, not 1")));
        }
        if self.rate_matrix.len() != self.num_messages() {
            return Err(invariant("rate matrix row count != message count"));
        }
        for (m, row) in self.rate_matrix.iter().enumerate() {
            if row.len() != num_slots {
                return Err(invariant("rate matrix column count != slot count"));
            }
            let total: f64 = row.iter().sum();
            if total < per_message_rate - 1e-12 {
                return Err(invariant(&format!(
                    "message {m} accumulates rate {total} < {per_message_rate}"
                )));
            }
            for (i, &r) in row.iter().enumerate() {
                if r > 0.0 && !self.slot_messages[i].contains(&m) {
                    return Err(invariant(&format!(
                        "message {m} has rate in slot {i} but is not scheduled there"
                    )));
                }
            }
        }
        for slot in &self.slot_messages {
            if slot.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invariant("slot message list not strictly ascending"));
            }
            if slot.iter().any(|&m| m >= self.num_messages()) {
                return Err(invariant("message index out of range"));
            }
        }
        Ok(())
    }

    /// Serializes to the versioned JSON wire format.
    ///
    /// # Panics
    ///
    /// Never: serialization of the wire struct cannot fail.
    #[must_use]
    pub fn to_json(&self) -> String {
        let rates = self
            .rate_matrix
            .iter()
            .enumerate()
            .flat_map(|(m, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &r)| r > 0.0)
                    .map(move |(i, &r)| (m, i, r))
            })
            .collect();
        let wire = PlanWire {
            version: WIRE_VERSION,
            num_users: self.num_users,
            caching_factor: self.caching_factor,
            message_targets: self.message_targets.clone(),
            slots: self.slot_messages.clone(),
            rates,
            fractions: self.blocklength_fractions.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("plan wire form is serializable")
    }

    /// Parses the versioned JSON wire format.
    ///
    /// # Errors
    ///
    /// Returns [`SchedulerError::PlanFormat`] on malformed JSON or an
    /// unsupported version.
    pub fn from_json(text: &str) -> Result<Self, SchedulerError> {
        let wire: PlanWire = serde_json::from_str(text).map_err(|e| {
            SchedulerError::PlanFormat {
                reason: e.to_string(),
            }
        })?;
        if wire.version != WIRE_VERSION {
            return Err(SchedulerError::PlanFormat {
                reason: format!("unsupported plan version {}", wire.version),
            });
        }
        let num_messages = wire.message_targets.len();
        let num_slots = wire.slots.len();
        let mut rate_matrix = vec![vec![0.0; num_slots]; num_messages];
        for (m, i, r) in wire.rates {
            if m >= num_messages || i >= num_slots {
                return Err(SchedulerError::PlanFormat {
                    reason: format!("rate triple ({m},{i}) out of range"),
                });
            }
            rate_matrix[m][i] = r;
        }
        Ok(Self {
            num_users: wire.num_users,
            caching_factor: wire.caching_factor,
            message_targets: wire.message_targets,
            slot_messages: wire.slots,
            rate_matrix,
            blocklength_fractions: wire.fractions,
        })
    }
}

fn invariant(reason: &str) -> SchedulerError {
    SchedulerError::Invariant {
        reason: reason.to_owned(),
    }
}
