//! Bit-level decode simulation over synthetic subfile payloads.
//!
//! To check end to end that the coded messages are sufficient — every user
//! reconstructs its demanded file exactly from its cache plus the XOR
//! messages — we materialize each subfile as a deterministic pseudo-random
//! byte string, encode the messages by XORing payloads, and replay the
//! receiver side: user `k` strips `s_𝒯` with cached subfiles to recover
//! `V_{d_k, 𝒯\{k}}`, then stitches the full file together.

use crate::combinatorics::binomial;
use crate::instance::ProblemInstance;
use crate::messages::CodedMessageSet;
use crate::placement::PlacementMap;
use thiserror::Error;

/// A subfile a user failed to recover (or recovered with wrong contents).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeFailure {
    /// The affected user (1-based).
    pub user: u32,
    /// The demanded file whose subfile is missing.
    pub file: u32,
    /// Rank of the t-subset indexing the subfile.
    pub subset_rank: usize,
}

/// Decode simulation failed: one or more subfiles were not recovered.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("decode failed: {} subfile(s) unrecovered, first = V_{{{},{}}} at user {}",
        .failures.len(), .failures[0].file, .failures[0].subset_rank, .failures[0].user)]
pub struct DecodeError {
    /// Every unrecovered subfile, in user order.
    pub failures: Vec<DecodeFailure>,
}

/// Deterministic synthetic payloads for every subfile `V_{i,𝒢}`.
///
/// Payloads are equal-length byte strings generated by a seeded SplitMix64
/// stream, so two libraries built with the same parameters are identical and
/// tests stay reproducible without carrying test data around.
#[derive(Debug, Clone)]
pub struct SubfileLibrary {
    /// `payloads[i-1][rank]` = bytes of `V_{i, 𝒢_rank}`.
    payloads: Vec<Vec<Vec<u8>>>,
    subfile_len: usize,
}

/// SplitMix64 step: a tiny, well-mixed generator for filler bytes.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D4_9BB1_3311_11EB);
    z ^ (z >> 31)
}

impl SubfileLibrary {
    /// Generates payloads for `instance` with `subfile_len` bytes each.
    #[must_use]
    pub fn generate(instance: &ProblemInstance, subfile_len: usize, seed: u64) -> Self {
        let num_subsets = binomial(
            instance.num_users as u64,
            instance.caching_factor as u64,
        ) as usize;
        let mut state = seed ^ 0xD1B5_4A32_D192_ED03;
        let mut payloads = Vec::with_capacity(instance.num_files as usize);
        for _ in 0..instance.num_files {
            let mut per_file = Vec::with_capacity(num_subsets);
            for _ in 0..num_subsets {
                let mut bytes = Vec::with_capacity(subfile_len);
                while bytes.len() < subfile_len {
                    let word = splitmix64(&mut state);
                    bytes.extend_from_slice(&word.to_le_bytes());
                }
                bytes.truncate(subfile_len);
                per_file.push(bytes);
            }
            payloads.push(per_file);
        }
        Self {
            payloads,
            subfile_len,
        }
    }

    /// Payload of `V_{file, 𝒢_rank}` (file 1-based).
    #[must_use]
    pub fn subfile(&self, file: u32, subset_rank: usize) -> &[u8] {
        &self.payloads[(file - 1) as usize][subset_rank]
    }

    /// Full file contents: subfiles concatenated in rank order.
    #[must_use]
    pub fn file_bytes(&self, file: u32) -> Vec<u8> {
        self.payloads[(file - 1) as usize].concat()
    }

    /// Bytes per subfile.
    #[must_use]
    pub fn subfile_len(&self) -> usize {
        self.subfile_len
    }
}

/// XOR two equal-length payloads in place (`acc ^= rhs`).
fn xor_into(acc: &mut [u8], rhs: &[u8]) {
    debug_assert_eq!(acc.len(), rhs.len());
    for (a, b) in acc.iter_mut().zip(rhs) {
        *a ^= b;
    }
}

/// Encodes every message in `set` as the XOR of its parts' payloads.
#[must_use]
pub fn encode_messages(library: &SubfileLibrary, set: &CodedMessageSet) -> Vec<Vec<u8>> {
    set.messages
        .iter()
        .map(|msg| {
            let mut acc = vec![0u8; library.subfile_len()];
            for &(file, rank) in &msg.parts {
                xor_into(&mut acc, library.subfile(file, rank));
            }
            acc
        })
        .collect()
}

/// Replays the receiver side and reconstructs every user's demanded file.
///
/// User `k` handles each message `s_𝒯` with `k ∈ 𝒯` by XORing out the
/// parts `V_{d_j, 𝒯\{j}}`, `j ≠ k` — all cached at `k` since `k ∈ 𝒯\{j}` —
/// leaving `V_{d_k, 𝒯\{k}}`. Cached subfiles of `d_k` fill the rest. The
/// reconstruction is compared byte for byte against the library.
///
/// On success, returns each user's reconstructed file (index `k−1`).
///
/// # Errors
///
/// Returns [`DecodeError`] listing every subfile that was missing after the
/// replay or whose recovered bytes differ from the ground truth.
pub fn simulate_decode(
    instance: &ProblemInstance,
    placement: &PlacementMap,
    set: &CodedMessageSet,
    library: &SubfileLibrary,
    encoded: &[Vec<u8>],
    demand: &[u32],
) -> Result<Vec<Vec<u8>>, DecodeError> {
    let num_subsets = placement.t_subsets.len();
    let mut failures = Vec::new();
    let mut reconstructed = Vec::with_capacity(instance.num_users as usize);

    for k in 1..=instance.num_users {
        let wanted = demand[(k - 1) as usize];
        // Recovered subfiles of file `wanted`, indexed by subset rank.
        let mut recovered: Vec<Option<Vec<u8>>> = vec![None; num_subsets];

        // From the cache: every 𝒢 ∋ k.
        for &(file, rank) in placement.cached_subfiles(k) {
            if file == wanted {
                recovered[rank] = Some(library.subfile(file, rank).to_vec());
            }
        }

        // From the air: peel each message targeting k.
        for &msg_idx in set.targets_of(k) {
            let msg = &set.messages[msg_idx];
            let mut acc = encoded[msg_idx].clone();
            let mut own_rank = None;
            for (&j, &(file, rank)) in msg.users.iter().zip(&msg.parts) {
                if j == k {
                    own_rank = Some(rank);
                } else {
                    // Side information: cached because k ∈ 𝒯\{j}.
                    debug_assert!(placement.caches(k, rank));
                    xor_into(&mut acc, library.subfile(file, rank));
                }
            }
            let rank = own_rank.expect("message targeting k contains a part for k");
            recovered[rank] = Some(acc);
        }

        // Stitch and verify against ground truth.
        let mut file_bytes = Vec::with_capacity(num_subsets * library.subfile_len());
        for (rank, slot) in recovered.into_iter().enumerate() {
            match slot {
                Some(bytes) if bytes == library.subfile(wanted, rank) => {
                    file_bytes.extend_from_slice(&bytes);
                }
                _ => failures.push(DecodeFailure {
                    user: k,
                    file: wanted,
                    subset_rank: rank,
                }),
            }
        }
        reconstructed.push(file_bytes);
    }

    if failures.is_empty() {
        Ok(reconstructed)
    } else {
        Err(DecodeError { failures })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::coded_messages;
    use crate::placement::placement;

    fn inst(n: u32, k: u32, m: u32) -> ProblemInstance {
        ProblemInstance::with_uniform_noise(n, k, m, 4.0, 6, 1.0).unwrap()
    }

    #[test]
    fn example1_distinct_demands_decode() {
        let instance = inst(5, 5, 1);
        let plc = placement(&instance);
        let library = SubfileLibrary::generate(&instance, 32, 7);
        let demand = vec![1, 2, 3, 4, 5];
        let set = coded_messages(&instance, &demand).unwrap();
        let encoded = encode_messages(&library, &set);
        let files =
            simulate_decode(&instance, &plc, &set, &library, &encoded, &demand).unwrap();
        for (k, file) in files.iter().enumerate() {
            assert_eq!(*file, library.file_bytes(demand[k]));
        }
    }

    #[test]
    fn repeated_demands_decode() {
        // All users want file 1; XORs still resolve.
        let instance = inst(4, 4, 1);
        let plc = placement(&instance);
        let library = SubfileLibrary::generate(&instance, 16, 11);
        let demand = vec![1, 1, 1, 1];
        let set = coded_messages(&instance, &demand).unwrap();
        let encoded = encode_messages(&library, &set);
        let files =
            simulate_decode(&instance, &plc, &set, &library, &encoded, &demand).unwrap();
        for file in &files {
            assert_eq!(*file, library.file_bytes(1));
        }
    }

    #[test]
    fn corrupted_message_is_caught() {
        let instance = inst(4, 4, 2);
        let plc = placement(&instance);
        let library = SubfileLibrary::generate(&instance, 16, 3);
        let demand = vec![2, 3, 4, 1];
        let set = coded_messages(&instance, &demand).unwrap();
        let mut encoded = encode_messages(&library, &set);
        encoded[0][0] ^= 0xFF;
        let err = simulate_decode(&instance, &plc, &set, &library, &encoded, &demand)
            .unwrap_err();
        // Message 0 targets users {1,2,3}; each loses exactly one subfile.
        assert_eq!(err.failures.len(), 3);
        let affected: Vec<u32> = err.failures.iter().map(|f| f.user).collect();
        assert_eq!(affected, vec![1, 2, 3]);
    }

    #[test]
    fn library_is_deterministic() {
        let instance = inst(3, 3, 1);
        let a = SubfileLibrary::generate(&instance, 24, 42);
        let b = SubfileLibrary::generate(&instance, 24, 42);
        let c = SubfileLibrary::generate(&instance, 24, 43);
        assert_eq!(a.file_bytes(2), b.file_bytes(2));
        assert_ne!(a.file_bytes(2), c.file_bytes(2));
    }
}
