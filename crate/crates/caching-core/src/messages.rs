//! Coded delivery messages: which XOR is sent for a given demand.
//!
//! For each (t+1)-subset `𝒯` of users the server forms
//! `s_𝒯 = ⊕_{k∈𝒯} V_{d_k, 𝒯\{k}}` — every member of `𝒯` can peel the XOR
//! down to its own missing subfile using cached pieces. The full message set
//! has `C(K, t+1)` entries; each user appears in `C(K−1, t)` of them.

use crate::combinatorics::{binomial, ksubsets, subset_rank};
use crate::instance::{CachingError, ProblemInstance};
use serde::{Deserialize, Serialize};

/// One multicast message `s_𝒯`, targeting the users in `𝒯`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticastMessage {
    /// Target users `𝒯` (1-based, strictly increasing).
    pub users: Vec<u32>,
    /// XOR composition: `(d_k, rank of 𝒯\{k})` for each `k ∈ 𝒯`, in the
    /// same order as `users`. Ranks index the t-subset enumeration.
    pub parts: Vec<(u32, usize)>,
}

impl MulticastMessage {
    /// Bitmask of target users (bit `k−1` set for user `k`).
    #[must_use]
    pub fn mask(&self) -> u64 {
        self.users.iter().fold(0u64, |m, &k| m | 1 << (k - 1))
    }

    /// Whether user `k` is a target of this message.
    #[must_use]
    pub fn targets(&self, k: u32) -> bool {
        self.users.binary_search(&k).is_ok()
    }
}

/// All `C(K, t+1)` coded messages for one demand realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedMessageSet {
    /// Messages in lexicographic order of their target sets.
    pub messages: Vec<MulticastMessage>,
    /// `per_user[k-1]` lists the message indices targeting user k
    /// (the set `S_k`, of size `C(K−1, t)`).
    per_user: Vec<Vec<usize>>,
}

impl CodedMessageSet {
    /// Indices of messages targeting user `k` (1-based): the set `S_k`.
    #[must_use]
    pub fn targets_of(&self, k: u32) -> &[usize] {
        &self.per_user[(k - 1) as usize]
    }

    /// Total number of messages, `C(K, t+1)`.
    #[must_use]
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    /// Whether the message set is empty (never true for a valid instance).
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }
}

/// Builds the coded message set for `demand`, where `demand[k-1] = d_k`.
///
/// # Errors
///
/// Returns [`CachingError::BadDemand`] if the demand vector has the wrong
/// length or requests a file outside `1..=N`.
pub fn coded_messages(
    instance: &ProblemInstance,
    demand: &[u32],
) -> Result<CodedMessageSet, CachingError> {
    let k_total = instance.num_users;
    if demand.len() != k_total as usize {
        return Err(CachingError::BadDemand {
            reason: format!("expected {} entries, got {}", k_total, demand.len()),
        });
    }
    if let Some(&bad) = demand.iter().find(|&&d| d == 0 || d > instance.num_files) {
        return Err(CachingError::BadDemand {
            reason: format!("file {bad} outside 1..={}", instance.num_files),
        });
    }

    let t = instance.caching_factor;
    let mut messages = Vec::with_capacity(binomial(k_total as u64, (t + 1) as u64) as usize);
    let mut per_user: Vec<Vec<usize>> = vec![Vec::new(); k_total as usize];
    for (idx, target) in ksubsets(k_total, t + 1).into_iter().enumerate() {
        let parts = target
            .iter()
            .map(|&k| {
                let rest: Vec<u32> = target.iter().copied().filter(|&j| j != k).collect();
                (demand[(k - 1) as usize], subset_rank(k_total, &rest))
            })
            .collect();
        for &k in &target {
            per_user[(k - 1) as usize].push(idx);
        }
        messages.push(MulticastMessage {
            users: target,
            parts,
        });
    }
    Ok(CodedMessageSet { messages, per_user })
}
