//! End-to-end properties of placement + coded delivery.

use caching_core::{
    binomial, coded_messages, encode_messages, ksubsets, placement, simulate_decode,
    ProblemInstance, SubfileLibrary,
};
use proptest::prelude::*;

fn instance(n: u32, k: u32, m: u32) -> ProblemInstance {
    ProblemInstance::with_uniform_noise(n, k, m, 4.0, 6, 1.0).unwrap()
}

/// Every demand vector over small networks decodes bit-exactly.
#[test]
fn exhaustive_small_networks_decode() {
    // (N, K, M) with K ≤ 4; all N^K demand vectors each.
    for (n, k, m) in [(2, 2, 1), (3, 3, 1), (3, 3, 2), (4, 4, 1), (4, 4, 2), (4, 4, 3)] {
        let inst = instance(n, k, m);
        let plc = placement(&inst);
        let library = SubfileLibrary::generate(&inst, 8, 1);
        let mut demand = vec![1u32; k as usize];
        loop {
            let set = coded_messages(&inst, &demand).unwrap();
            let encoded = encode_messages(&library, &set);
            let files = simulate_decode(&inst, &plc, &set, &library, &encoded, &demand)
                .unwrap_or_else(|e| panic!("decode failed at {demand:?} ({n},{k},{m}): {e}"));
            for (idx, file) in files.iter().enumerate() {
                assert_eq!(*file, library.file_bytes(demand[idx]));
            }
            // Advance odometer over {1..N}^K.
            let mut pos = 0;
            loop {
                if pos == demand.len() {
                    break;
                }
                demand[pos] += 1;
                if demand[pos] <= n {
                    break;
                }
                demand[pos] = 1;
                pos += 1;
            }
            if pos == demand.len() {
                break;
            }
        }
    }
}

/// Message set partitions each user's missing subfiles: the ranks recovered
/// over the air are exactly the t-subsets not containing the user, once each.
#[test]
fn messages_cover_missing_subfiles_exactly_once() {
    for (n, k, m) in [(5, 5, 1), (5, 5, 2), (5, 5, 3), (6, 6, 2)] {
        let inst = instance(n, k, m);
        let set = coded_messages(&inst, &(1..=k).collect::<Vec<_>>()).unwrap();
        let subsets = ksubsets(k, inst.caching_factor);
        for user in 1..=k {
            let mut seen = vec![0u32; subsets.len()];
            for &idx in set.targets_of(user) {
                let msg = &set.messages[idx];
                let part = msg
                    .users
                    .iter()
                    .position(|&u| u == user)
                    .map(|p| msg.parts[p])
                    .unwrap();
                seen[part.1] += 1;
            }
            for (rank, subset) in subsets.iter().enumerate() {
                let expected = u32::from(!subset.contains(&user));
                assert_eq!(seen[rank], expected, "user {user} rank {rank}");
            }
        }
    }
}

/// |S| = C(K, t+1) and |S_k| = C(K−1, t) across the parameter grid.
#[test]
fn message_counts_match_binomials() {
    for k in 2..=7u32 {
        for t in 1..k {
            let inst = instance(k, k, t); // N = K makes any t admissible
            let set = coded_messages(&inst, &vec![1; k as usize]).unwrap();
            assert_eq!(set.len() as u64, binomial(k as u64, (t + 1) as u64));
            for user in 1..=k {
                assert_eq!(
                    set.targets_of(user).len() as u64,
                    binomial((k - 1) as u64, t as u64)
                );
            }
        }
    }
}

proptest! {
    /// Random demands over a K = 5 network decode bit-exactly.
    #[test]
    fn random_demands_decode(demand in proptest::collection::vec(1u32..=5, 5), m in 1u32..=4) {
        let inst = instance(5, 5, m);
        let plc = placement(&inst);
        let library = SubfileLibrary::generate(&inst, 8, 2);
        let set = coded_messages(&inst, &demand).unwrap();
        let encoded = encode_messages(&library, &set);
        let files = simulate_decode(&inst, &plc, &set, &library, &encoded, &demand).unwrap();
        for (idx, file) in files.iter().enumerate() {
            prop_assert_eq!(file.clone(), library.file_bytes(demand[idx]));
        }
    }

    /// Cache budget is met with equality: M·C(K,t) subfiles per user.
    #[test]
    fn cache_budget_exact(k in 2u32..=8, m_idx in 0u32..3) {
        let m = 1 + m_idx % (k - 1);
        let inst = instance(k, k, m);
        let plc = placement(&inst);
        let budget = m as u64 * binomial(k as u64, inst.caching_factor as u64);
        for user in 1..=k {
            prop_assert_eq!(plc.cached_subfiles(user).len() as u64, budget);
        }
    }
}
