//! Placement phase: which subfile goes into which cache.
//!
//! Every file is split into `C(K, t)` equal subfiles `V_{i,𝒢}`, one per
//! t-subset `𝒢` of users, and user `k` caches `V_{i,𝒢}` for every file `i`
//! exactly when `k ∈ 𝒢`. Subsets are indexed by their rank in the shared
//! lexicographic enumeration ([`crate::ksubsets`]).

use crate::combinatorics::{binomial, ksubsets};
use crate::instance::ProblemInstance;
use serde::{Deserialize, Serialize};

/// Cache contents for all users, as (file index, t-subset rank) pairs.
///
/// File indices are 1-based (`1..=N`), matching demand vectors; subset ranks
/// index into [`PlacementMap::t_subsets`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementMap {
    /// The t-subsets of `[K]` in lexicographic order; rank = position here.
    pub t_subsets: Vec<Vec<u32>>,
    /// `per_user[k-1]` lists the (file, subset-rank) pairs cached by user k.
    per_user: Vec<Vec<(u32, usize)>>,
}

impl PlacementMap {
    /// Subfiles cached by user `k` (1-based).
    #[must_use]
    pub fn cached_subfiles(&self, k: u32) -> &[(u32, usize)] {
        &self.per_user[(k - 1) as usize]
    }

    /// Whether user `k` caches subfile `(file, subset_rank)`.
    #[must_use]
    pub fn caches(&self, k: u32, subset_rank: usize) -> bool {
        self.t_subsets[subset_rank].contains(&k)
    }

    /// Number of users.
    #[must_use]
    pub fn num_users(&self) -> u32 {
        self.per_user.len() as u32
    }
}

/// Computes the placement map for an instance.
///
/// Satisfies the cache budget with equality: each user caches
/// `N·C(K−1, t−1) = M·C(K, t)` subfiles.
#[must_use]
pub fn placement(instance: &ProblemInstance) -> PlacementMap {
    let k_total = instance.num_users;
    let t = instance.caching_factor;
    let t_subsets = ksubsets(k_total, t);
    let mut per_user: Vec<Vec<(u32, usize)>> = vec![Vec::new(); k_total as usize];
    for (rank, subset) in t_subsets.iter().enumerate() {
        for &member in subset {
            for file in 1..=instance.num_files {
                per_user[(member - 1) as usize].push((file, rank));
            }
        }
    }
    PlacementMap {
        t_subsets,
        per_user,
    }
}

/// Expected per-user cached-subfile count: `N·C(K−1, t−1)`.
#[must_use]
pub fn expected_cache_count(instance: &ProblemInstance) -> u64 {
    instance.num_files as u64
        * binomial(
            (instance.num_users - 1) as u64,
            (instance.caching_factor - 1) as u64,
        )
}
