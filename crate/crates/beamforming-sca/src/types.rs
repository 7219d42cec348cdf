//! Channel, configuration, and solution types.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from the beamforming layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamformingError {
    /// Channel data violates the type invariants.
    #[error("bad channel realization: {reason}")]
    BadChannels { reason: String },
    /// Plan, channel, and solution shapes disagree.
    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },
    /// SINR was requested for a (user, message) pair the message does not target.
    #[error("message {message} does not target user {user}")]
    NotTargeted { user: u32, message: usize },
    /// No initializer could produce a feasible starting point.
    #[error("initialization failure: {reason}")]
    InitializationFailure { reason: String },
    /// One slot's subproblem is infeasible; other slots may still be fine.
    #[error("slot {slot} infeasible: {reason}")]
    SlotInfeasible { slot: usize, reason: String },
    /// Configuration outside its documented domain.
    #[error("bad SCA configuration: {reason}")]
    BadConfig { reason: String },
    /// The conic backend rejected or failed on a subproblem.
    #[error("backend failure: {0}")]
    Backend(#[from] convex_backend::BackendError),
    /// Malformed serialized solution.
    #[error("solution deserialization failed: {reason}")]
    Format { reason: String },
}

/// One channel draw: per-user complex channel vectors (length `N_T`) and
/// per-user noise variances in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    channels: Vec<DVector<Complex64>>,
    noise_vars: Vec<f64>,
}

impl ChannelRealization {
    /// Builds a realization, validating the invariants: equal-length finite
    /// vectors with at least one nonzero entry each, positive noise.
    ///
    /// # Errors
    ///
    /// [`BeamformingError::BadChannels`] on any violation.
    pub fn new(
        channels: Vec<Vec<Complex64>>,
        noise_vars: Vec<f64>,
    ) -> Result<Self, BeamformingError> {
        let bad = |reason: &str| BeamformingError::BadChannels {
            reason: reason.to_owned(),
        };
        if channels.is_empty() {
            return Err(bad("no users"));
        }
        if channels.len() != noise_vars.len() {
            return Err(bad("channel and noise counts differ"));
        }
        let n_t = channels[0].len();
        for h in &channels {
            if h.len() != n_t || h.is_empty() {
                return Err(bad("channel vectors must share a positive length"));
            }
            if h.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(bad("non-finite channel entry"));
            }
            if h.iter().all(|c| c.norm_sqr() == 0.0) {
                return Err(bad("all-zero channel vector"));
            }
        }
        if noise_vars.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(bad("noise variances must be positive and finite"));
        }
        Ok(Self {
            channels: channels.into_iter().map(DVector::from_vec).collect(),
            noise_vars,
        })
    }

    /// Number of users.
    #[must_use]
    pub fn num_users(&self) -> usize {
        self.channels.len()
    }

    /// Number of transmit antennas.
    #[must_use]
    pub fn num_antennas(&self) -> usize {
        self.channels[0].len()
    }

    /// Channel vector of user `k` (1-based, matching the scheduler).
    #[must_use]
    pub fn channel(&self, k: u32) -> &DVector<Complex64> {
        &self.channels[(k - 1) as usize]
    }

    /// Noise variance of user `k` (1-based), in watts.
    #[must_use]
    pub fn noise_var(&self, k: u32) -> f64 {
        self.noise_vars[(k - 1) as usize]
    }

    /// Equivalent realization with unit noise: `h_k/σ_k`, `σ_k² = 1`.
    ///
    /// SINRs are invariant under this rescaling, so optimizing against the
    /// normalized channels yields the same beamformers and power while
    /// keeping solver data near unit scale.
    #[must_use]
    pub fn normalized(&self) -> Self {
        let channels = self
            .channels
            .iter()
            .zip(&self.noise_vars)
            .map(|(h, &v)| h / Complex64::new(v.sqrt(), 0.0))
            .collect();
        Self {
            channels,
            noise_vars: vec![1.0; self.noise_vars.len()],
        }
    }
}

/// Beamformers of one slot, aligned with `plan.slot_messages[i]`.
pub type SlotBeams = Vec<DVector<Complex64>>;

/// How `sca_solve` obtains its feasible starting point.
#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Null-space projection with closed-form scaling; falls back to SDR
    /// when the antenna count or channel geometry defeats it.
    ZeroForcing,
    /// Per-slot semidefinite relaxation with Gaussian randomization.
    Sdr,
    /// Caller-supplied beamformers (must be feasible for the plan).
    Provided(Vec<SlotBeams>),
}

/// Controls for the SCA loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SCAConfig {
    /// Step size μ ∈ (0, 1] for the iterate update `x + μ(x̂ − x)`.
    pub step_size: f64,
    /// Iteration cap.
    pub max_iterations: usize,
    /// Relative objective-change threshold for convergence.
    pub stop_rel_change: f64,
    /// Consecutive below-threshold iterations required to stop.
    pub stop_window: usize,
    /// Worst acceptable constraint margin when validating iterates.
    pub feasibility_tol: f64,
    /// Starting-point strategy.
    pub init: InitMode,
    /// Gaussian randomization budget for the SDR initializer.
    pub randomization_count: usize,
    /// Seed for the SDR randomization draws.
    pub init_seed: u64,
    /// Solve all slots in one coupled program instead of per-slot
    /// subproblems (always on when `optimize_rates` is set).
    pub couple_slots: bool,
    /// Treat per-slot rates as variables subject to the plan's per-message
    /// totals, instead of constants from the plan.
    pub optimize_rates: bool,
}

impl Default for SCAConfig {
    fn default() -> Self {
        Self {
            step_size: 1.0,
            max_iterations: 200,
            stop_rel_change: 1e-6,
            stop_window: 3,
            feasibility_tol: 1e-6,
            init: InitMode::ZeroForcing,
            randomization_count: 1000,
            init_seed: 0,
            couple_slots: false,
            optimize_rates: false,
        }
    }
}

impl SCAConfig {
    /// Validates the documented domains.
    ///
    /// # Errors
    ///
    /// [`BeamformingError::BadConfig`] when μ ∉ (0, 1] or a threshold is
    /// not positive.
    pub fn validate(&self) -> Result<(), BeamformingError> {
        let bad = |reason: &str| BeamformingError::BadConfig {
            reason: reason.to_owned(),
        };
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(bad("step size must lie in (0, 1]"));
        }
        if self.stop_rel_change <= 0.0 || self.feasibility_tol <= 0.0 {
            return Err(bad("thresholds must be positive"));
        }
        if self.stop_window == 0 || self.max_iterations == 0 {
            return Err(bad("iteration controls must be positive"));
        }
        Ok(())
    }
}

/// Final SINR-sum value of one MAC descriptor, for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRecord {
    /// User (1-based).
    pub user: u32,
    /// Slot index.
    pub slot: usize,
    /// Global message indices of the subset π.
    pub messages: Vec<usize>,
    /// Achieved Σ_{𝒯∈π} γ_k^𝒯(i) at the returned beamformers.
    pub value: f64,
}

/// One SCA iteration record (per slot in decoupled mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Slot of a decoupled run; `None` for a coupled run over all slots.
    pub slot: Option<usize>,
    /// Iteration number within its run, starting at 0 for the initializer.
    pub iteration: usize,
    /// Weighted power objective after this iteration, watts.
    pub objective: f64,
    /// Worst original-constraint margin at this iterate (rate units).
    pub worst_margin: f64,
}

/// Output of the SCA solver.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingSolution {
    /// Per-slot beamformers aligned with `plan.slot_messages`; zero vectors
    /// for scheduled messages carrying zero rate.
    pub beams: Vec<SlotBeams>,
    /// Rate matrix `[message][slot]` actually served (equals the plan's in
    /// fixed-rate mode).
    pub rates: Vec<Vec<f64>>,
    /// Achieved SINR sums per MAC descriptor.
    pub etas: Vec<EtaRecord>,
    /// Average transmit power Σ_i (n_i/n) Σ_𝒯 ‖w_𝒯(i)‖², watts.
    pub power: f64,
    /// Total subproblem solves performed.
    pub iterations: usize,
    /// Set when a subproblem solve failed and an earlier feasible iterate
    /// was returned instead.
    pub degraded: bool,
    /// Objective/margin trace, one entry per iteration.
    pub trace: Vec<TracePoint>,
}

#[derive(Serialize, Deserialize)]
struct BeamWire {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SolutionWire {
    version: u32,
    beams: Vec<Vec<BeamWire>>,
    rates: Vec<Vec<f64>>,
    etas: Vec<EtaRecord>,
    power: f64,
    iterations: usize,
    degraded: bool,
    trace: Vec<TracePoint>,
}

impl BeamformingSolution {
    /// Serializes to JSON with beamformers as re/im arrays.
    #[must_use]
    pub fn to_json(&self) -> String {
        let wire = SolutionWire {
            version: 1,
            beams: self
                .beams
                .iter()
                .map(|slot| {
                    slot.iter()
                        .map(|w| BeamWire {
                            re: w.iter().map(|c| c.re).collect(),
                            im: w.iter().map(|c| c.im).collect(),
                        })
                        .collect()
                })
                .collect(),
            rates: self.rates.clone(),
            etas: self.etas.clone(),
            power: self.power,
            iterations: self.iterations,
            degraded: self.degraded,
            trace: self.trace.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("solution serialization cannot fail")
    }

    /// Parses a solution serialized with [`BeamformingSolution::to_json`].
    ///
    /// # Errors
    ///
    /// [`BeamformingError::Format`] on malformed input.
    pub fn from_json(text: &str) -> Result<Self, BeamformingError> {
        let wire: SolutionWire =
            serde_json::from_str(text).map_err(|e| BeamformingError::Format {
                reason: e.to_string(),
            })?;
        if wire.version != 1 {
            return Err(BeamformingError::Format {
                reason: format!("unsupported version {}", wire.version),
            });
        }
        let mut beams = Vec::with_capacity(wire.beams.len());
        for slot in wire.beams {
            let mut out = Vec::with_capacity(slot.len());
            for b in slot {
                if b.re.len() != b.im.len() {
                    return Err(BeamformingError::Format {
                        reason: "re/im length mismatch".to_owned(),
                    });
                }
                out.push(DVector::from_iterator(
                    b.re.len(),
                    b.re.iter()
                        .zip(&b.im)
                        .map(|(&re, &im)| Complex64::new(re, im)),
                ));
            }
            beams.push(out);
        }
        Ok(Self {
            beams,
            rates: wire.rates,
            etas: wire.etas,
            power: wire.power,
            iterations: wire.iterations,
            degraded: wire.degraded,
            trace: wire.trace,
        })
    }

    /// Iteration trace as CSV: `slot,iteration,objective,worst_margin`.
    #[must_use]
    pub fn trace_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("slot,iteration,objective,worst_margin\n");
        for p in &self.trace {
            let slot = p.slot.map_or_else(|| "all".to_owned(), |s| s.to_string());
            let _ = writeln!(
                out,
                "{slot},{},{:.12e},{:.6e}",
                p.iteration, p.objective, p.worst_margin
            );
        }
        out
    }
}
