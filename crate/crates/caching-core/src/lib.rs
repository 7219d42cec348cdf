//! Coded-caching placement and XOR multicast message construction.
//!
//! Implements the centralized placement phase of a cache-aided broadcast
//! network — `K` users each storing `M` files' worth of subfiles out of a
//! library of `N` files — and the delivery-phase coded messages: for every
//! `(t+1)`-subset `𝒯` of users (with caching factor `t = MK/N`), the XOR
//! message `s_𝒯 = ⊕_{k∈𝒯} V_{d_k, 𝒯\{k}}` that every member of `𝒯` can
//! strip using its cache.
//!
//! # Features
//!
//! - Validated problem instances (`t` must be a positive integer ≤ K−1)
//! - Placement maps with exact cache-budget accounting
//! - Coded-message sets `𝒮` and per-user target lists `𝒮_k`
//! - Bit-level decode simulation over synthetic subfile payloads
//! - Lexicographic subset enumeration shared by every downstream module
//!
//! # Example
//!
//! ```
//! use caching_core::{ProblemInstance, coded_messages, placement};
//!
//! // Example network: N = K = 5 files/users, M = 1 → t = 1.
//! let inst = ProblemInstance::new(5, 5, 1, 4.0, 6, vec![1.0; 5]).unwrap();
//! let plc = placement(&inst);
//! assert_eq!(plc.cached_subfiles(1).len(), 5); // N·C(K−1, t−1) = 5
//!
//! let demand = vec![1, 2, 3, 4, 5];
//! let set = coded_messages(&inst, &demand).unwrap();
//! assert_eq!(set.messages.len(), 10); // C(5, 2)
//! assert_eq!(set.targets_of(1).len(), 4); // C(K−1, t) = 4
//! ```

pub mod combinatorics;
pub mod decode;
pub mod instance;
pub mod messages;
pub mod placement;

pub use combinatorics::{binomial, ksubsets, subset_rank};
pub use decode::{encode_messages, simulate_decode, DecodeError, SubfileLibrary};
pub use instance::{CachingError, ProblemInstance};
pub use messages::{coded_messages, CodedMessageSet, MulticastMessage};
pub use placement::{placement, PlacementMap};
