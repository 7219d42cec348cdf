//! Per-trial channel generation: annulus placement, log-distance path loss,
//! unit-power Rayleigh fading.
//!
//! Determinism contract: trial `i` uses the ChaCha8 generator seeded with
//! the master seed and switched to stream `i`, and draws, for each user in
//! order, one uniform variate for the distance followed by `2·N_T` standard
//! normals for the fading taps. The same `(master seed, trial)` pair
//! therefore yields bit-identical channels on every platform, and distinct
//! trials read non-overlapping streams.

use beamforming_sca::ChannelRealization;
use caching_core::ProblemInstance;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cell::CellConfig;

/// Distance whose enclosed annulus area is the fraction `u` of the whole:
/// the inverse CDF of a uniform draw over the ring `[r_min, r_max]`.
#[must_use]
pub fn annulus_radius(u: f64, r_min: f64, r_max: f64) -> f64 {
    (u * (r_max * r_max - r_min * r_min) + r_min * r_min).sqrt()
}

/// Draws one trial's downlink channels for every user of `instance`.
///
/// Positions are uniform over the cell annulus, redrawn each trial; the
/// channel of user `k` is `√g_k · h̃_k` with `g_k` the link gain at the
/// drawn distance and `h̃_k` i.i.d. circularly-symmetric complex Gaussian
/// entries of unit variance. Expects a validated `cell`.
#[must_use]
pub fn draw_channels(
    cell: &CellConfig,
    instance: &ProblemInstance,
    trial: u64,
) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(cell.master_seed);
    rng.set_stream(trial);
    let n_t = instance.num_antennas as usize;
    let root_half = 0.5f64.sqrt();

    let channels: Vec<Vec<Complex64>> = (0..instance.num_users)
        .map(|_| {
            let d = annulus_radius(rng.random::<f64>(), cell.min_distance_m, cell.radius_m);
            let scale = cell.link_gain(d).sqrt();
            (0..n_t)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im) * root_half * scale
                })
                .collect()
        })
        .collect();

    let noise = vec![cell.noise_watts(); instance.num_users as usize];
    ChannelRealization::new(channels, noise)
        .expect("cell-model channels are well-formed by construction")
}
