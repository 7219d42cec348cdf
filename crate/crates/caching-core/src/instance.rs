//! Problem-instance type: static network and library parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failures when constructing a [`ProblemInstance`].
#[derive(Debug, Error, PartialEq)]
pub enum CachingError {
    /// `M·K/N` is not an integer; memory-sharing regimes are out of scope.
    #[error("caching factor t = M*K/N = {m}*{k}/{n} is not an integer")]
    NonIntegerCachingFactor { m: u32, k: u32, n: u32 },
    /// `t` fell outside `{1, …, K−1}` (t = 0 means no caching gain, t = K
    /// means everything is cached and nothing needs delivering).
    #[error("caching factor t = {t} outside the admissible range 1..={max}")]
    CachingFactorOutOfRange { t: u32, max: u32 },
    /// Fewer files than users: worst-case distinct demands not representable.
    #[error("library too small: N = {n} < K = {k}")]
    LibraryTooSmall { n: u32, k: u32 },
    /// Noise variances must be strictly positive, one per user.
    #[error("noise variance list invalid: expected {k} entries, all > 0")]
    BadNoise { k: u32 },
    /// General positivity violations for N, K, M, N_T or negative rate.
    #[error("parameter {name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    /// Demand vector has the wrong length or requests an unknown file.
    #[error("invalid demand: {reason}")]
    BadDemand { reason: String },
}

/// Static scenario: library, user population, caches, antennas, noise.
///
/// The caching factor `t = M·K/N` is derived and validated at construction;
/// every downstream quantity (subset sizes, message counts, per-message rate
/// `R / C(K,t)`) reads it from here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    /// Library size `N` (files).
    pub num_files: u32,
    /// Number of users `K` (≥ 2).
    pub num_users: u32,
    /// Per-user cache size `M` (files).
    pub cache_size: u32,
    /// Target file rate `R` in bits per channel use.
    pub file_rate: f64,
    /// Transmit antennas `N_T` at the base station.
    pub num_antennas: u32,
    /// Caching factor `t = M·K/N`, validated integer in `1..=K−1`.
    pub caching_factor: u32,
    /// Per-user noise variances `σ_k²` in watts, all > 0.
    pub noise_vars: Vec<f64>,
}

impl ProblemInstance {
    /// Builds and validates an instance (`make_instance`).
    ///
    /// `noise_vars` must hold one strictly positive variance per user.
    pub fn new(
        num_files: u32,
        num_users: u32,
        cache_size: u32,
        file_rate: f64,
        num_antennas: u32,
        noise_vars: Vec<f64>,
    ) -> Result<Self, CachingError> {
        for (name, value) in [
            ("N", num_files as f64),
            ("K", num_users as f64),
            ("M", cache_size as f64),
            ("N_T", num_antennas as f64),
        ] {
            if value <= 0.0 {
                return Err(CachingError::NonPositive { name, value });
            }
        }
        if file_rate < 0.0 {
            return Err(CachingError::NonPositive {
                name: "R",
                value: file_rate,
            });
        }
        if num_files < num_users {
            return Err(CachingError::LibraryTooSmall {
                n: num_files,
                k: num_users,
            });
        }
        let mk = cache_size as u64 * num_users as u64;
        if mk % num_files as u64 != 0 {
            return Err(CachingError::NonIntegerCachingFactor {
                m: cache_size,
                k: num_users,
                n: num_files,
            });
        }
        let t = (mk / num_files as u64) as u32;
        if t == 0 || t > num_users - 1 {
            return Err(CachingError::CachingFactorOutOfRange {
                t,
                max: num_users - 1,
            });
        }
        if noise_vars.len() != num_users as usize || noise_vars.iter().any(|&v| v.is_nan() || v <= 0.0) {
            return Err(CachingError::BadNoise { k: num_users });
        }
        Ok(Self {
            num_files,
            num_users,
            cache_size,
            file_rate,
            num_antennas,
            caching_factor: t,
            noise_vars,
        })
    }

    /// Convenience constructor with a common noise variance for all users.
    pub fn with_uniform_noise(
        num_files: u32,
        num_users: u32,
        cache_size: u32,
        file_rate: f64,
        num_antennas: u32,
        noise_var: f64,
    ) -> Result<Self, CachingError> {
        Self::new(
            num_files,
            num_users,
            cache_size,
            file_rate,
            num_antennas,
            vec![noise_var; num_users as usize],
        )
    }

    /// Per-message rate target `R / C(K, t)` in bits per channel use.
    #[must_use]
    pub fn per_message_rate(&self) -> f64 {
        self.file_rate / crate::binomial(self.num_users as u64, self.caching_factor as u64) as f64
    }
}
