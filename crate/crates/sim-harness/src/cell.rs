//! Single-cell geometry, path loss, and unit conversions.
//!
//! The cell is a disc: users fall uniformly over the annulus between a
//! minimum distance and the cell radius (a floor below which the log-distance
//! model would predict unbounded gain), and each link's average power gain is
//! `10^(−PL/10)` with `PL = 148.1 + 37.6·log10(d_km)` dB. Noise power is the
//! same for every user and configured in dBW.

use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Default Monte Carlo trial count (figure-grade runs).
pub const DEFAULT_TRIALS: usize = 300;
/// Reduced trial count for desk-scale runs.
pub const CI_TRIALS: usize = 50;

/// Cell geometry, propagation constants, and Monte Carlo bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CellConfig {
    /// Cell radius in meters.
    pub radius_m: f64,
    /// Minimum BS–user distance in meters (keeps the path gain finite).
    pub min_distance_m: f64,
    /// Path-loss intercept in dB at 1 km.
    pub pl_intercept_db: f64,
    /// Path-loss slope in dB per decade of distance.
    pub pl_slope_db: f64,
    /// Per-user noise power in dBW.
    pub noise_dbw: f64,
    /// Master seed; trial `i` reads stream `i` of this seed's generator.
    pub master_seed: u64,
    /// Number of Monte Carlo trials.
    pub trials: usize,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            radius_m: 500.0,
            min_distance_m: 35.0,
            pl_intercept_db: 148.1,
            pl_slope_db: 37.6,
            noise_dbw: -134.0,
            master_seed: 0,
            trials: DEFAULT_TRIALS,
        }
    }
}

impl CellConfig {
    /// Checks the documented invariants.
    ///
    /// # Errors
    ///
    /// [`HarnessError::Config`] when the annulus is empty or inverted, the
    /// trial count is zero, or a propagation constant is not finite.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |reason: &str| HarnessError::Config {
            reason: reason.to_owned(),
        };
        if !(self.min_distance_m > 0.0 && self.min_distance_m < self.radius_m) {
            return Err(bad("need 0 < min distance < radius"));
        }
        if !self.radius_m.is_finite() {
            return Err(bad("radius must be finite"));
        }
        if self.trials == 0 {
            return Err(bad("trial count must be at least 1"));
        }
        if !(self.pl_intercept_db.is_finite()
            && self.pl_slope_db.is_finite()
            && self.noise_dbw.is_finite())
        {
            return Err(bad("propagation constants must be finite"));
        }
        Ok(())
    }

    /// Path loss in dB at `distance_m` meters from the BS.
    #[must_use]
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        self.pl_intercept_db + self.pl_slope_db * (distance_m / 1000.0).log10()
    }

    /// Average link power gain `10^(−PL/10)` at `distance_m` meters.
    #[must_use]
    pub fn link_gain(&self, distance_m: f64) -> f64 {
        dbw_to_watts(-self.path_loss_db(distance_m))
    }

    /// Noise power in watts.
    #[must_use]
    pub fn noise_watts(&self) -> f64 {
        dbw_to_watts(self.noise_dbw)
    }
}

/// Decibel-watts to watts.
#[must_use]
pub fn dbw_to_watts(p_dbw: f64) -> f64 {
    10f64.powf(p_dbw / 10.0)
}
