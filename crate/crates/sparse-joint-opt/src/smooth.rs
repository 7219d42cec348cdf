//! The arctan surrogate for the ℓ0 rate indicator, and the exact census.
//!
//! `|r|₀` is approximated on `r ≥ 0` by `f(r) = (2/π)·arctan(r/ξ)` with a
//! prescribed constant `ξ > 0`: `f(0) = 0`, `f` increases concavely toward 1
//! as `r/ξ → ∞`. Summed over a user's messages in a slot, `Σ f ≤ s` is the
//! smooth stand-in for the decode budget; the SCA loop works with its
//! first-order Taylor expansion, and [`l0_census`] recovers the exact counts
//! after rounding.

use std::f64::consts::FRAC_PI_2;

/// Smoothed indicator `(2/π)·arctan(r/ξ)`, in `[0, 1)` for `r ≥ 0`.
///
/// Monotone increasing and concave on `r ≥ 0`.
#[must_use]
pub fn arctan_smooth(r: f64, xi: f64) -> f64 {
    debug_assert!(r >= 0.0 && xi > 0.0);
    (r / xi).atan() / FRAC_PI_2
}

/// Derivative of `arctan(r/ξ)` with respect to `r`: `ξ/(ξ² + r²)`.
///
/// This is the slope used by the linearized budget rows, which bound
/// `Σ arctan(r/ξ)` (without the `2/π` factor) by `π·s/2`.
#[must_use]
pub(crate) fn arctan_slope(r: f64, xi: f64) -> f64 {
    xi / (xi * xi + r * r)
}

/// Exact per-user, per-slot active-message counts `Σ_{𝒯∈𝒮_k} |R^𝒯(i)|₀`,
/// counting a rate as nonzero when it is at or above `threshold`.
///
/// `rates` is indexed `[message][slot]`; the result is indexed
/// `[user − 1][slot]`. Entries strictly below the threshold are what the
/// rounding pass zeroes, so they do not count.
#[must_use]
pub fn l0_census(
    message_targets: &[Vec<u32>],
    num_users: u32,
    rates: &[Vec<f64>],
    threshold: f64,
) -> Vec<Vec<usize>> {
    let num_slots = rates.first().map_or(0, Vec::len);
    let mut counts = vec![vec![0usize; num_slots]; num_users as usize];
    for (m, row) in rates.iter().enumerate() {
        for (i, &r) in row.iter().enumerate() {
            if r >= threshold {
                for &k in &message_targets[m] {
                    counts[(k - 1) as usize][i] += 1;
                }
            }
        }
    }
    counts
}
