//! Monte Carlo sweeps: schemes × rate grid over shared channel draws.
//!
//! Every trial draws one channel realization and hands the *same* draw to
//! every (scheme, rate) cell — a paired comparison, so scheme gaps are not
//! blurred by independent fading. Trials are independent work items on a
//! worker pool; per-trial results are collected in trial order and reduced
//! sequentially, so the aggregates (and the CSV bytes) do not depend on how
//! the pool interleaved them.

use beamforming_sca::{sca_solve, verify_feasibility, watts_to_dbw, SCAConfig};
use caching_core::{binomial, ProblemInstance};
use delivery_scheduler::{baseline_plan, greedy_schedule, min_slots_exact, DeliveryPlan, ScheduleConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparse_joint_opt::{solve_joint, SparseConfig};
use std::fmt;
use std::str::FromStr;

use crate::cell::CellConfig;
use crate::channel::draw_channels;
use crate::HarnessError;

/// A delivery scheme to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scheme {
    /// Greedy time-sharing with decode budget `s`.
    Greedy { s: u32 },
    /// Full superposition: every message in one slot.
    Fs,
    /// Grouping baseline serving one `(t+α)`-subset per slot.
    Baseline { alpha: u32 },
    /// Sparse joint redesign with budget `s` over `slots` equal slots.
    Joint { s: u32, slots: usize },
}

impl Scheme {
    /// Compact label used in CSV rows and accepted back by [`FromStr`].
    #[must_use]
    pub fn label(&self) -> String {
        match self {
            Self::Greedy { s } => format!("greedy:{s}"),
            Self::Fs => "fs".to_owned(),
            Self::Baseline { alpha } => format!("baseline:{alpha}"),
            Self::Joint { s, slots } => format!("joint:{s}:{slots}"),
        }
    }

    /// Value of the CSV `s` column: the per-slot decode load the scheme
    /// imposes on a user (budget for greedy/joint, worst case otherwise).
    #[must_use]
    pub fn decode_column(&self, instance: &ProblemInstance) -> u32 {
        let k = instance.num_users;
        let t = instance.caching_factor;
        match self {
            Self::Greedy { s } | Self::Joint { s, .. } => *s,
            Self::Fs => binomial(u64::from(k - 1), u64::from(t)) as u32,
            Self::Baseline { alpha } => binomial(u64::from(t + alpha - 1), u64::from(t)) as u32,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Scheme {
    type Err = HarnessError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config {
            reason: format!(
                "unknown scheme '{text}' (expected fs, greedy:S, baseline:A, or joint:S:B)"
            ),
        };
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["fs"] => Ok(Self::Fs),
            ["greedy", s] => Ok(Self::Greedy {
                s: s.parse().map_err(|_| bad())?,
            }),
            ["baseline", a] => Ok(Self::Baseline {
                alpha: a.parse().map_err(|_| bad())?,
            }),
            ["joint", s, b] => Ok(Self::Joint {
                s: s.parse().map_err(|_| bad())?,
                slots: b.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Declarative sweep: one instance family, a scheme list, and a rate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Library size `N`.
    pub files: u32,
    /// User count `K`.
    pub users: u32,
    /// Per-user cache size `M` (files).
    pub cache: u32,
    /// BS antenna count `N_T`.
    pub antennas: u32,
    /// Cell model and Monte Carlo bookkeeping.
    #[serde(default)]
    pub cell: CellConfig,
    /// Schemes to pair on every draw.
    #[serde(rename = "scheme")]
    pub schemes: Vec<Scheme>,
    /// File-rate grid in bps/Hz, strictly increasing and nonnegative.
    pub rates: Vec<f64>,
    /// Output stem for the CSV artifact (used by the CLI).
    #[serde(default)]
    pub output: Option<String>,
}

impl SweepSpec {
    /// Parses a TOML sweep description.
    ///
    /// # Errors
    ///
    /// [`HarnessError::Config`] on syntax errors or invariant violations.
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let spec: Self = toml::from_str(text).map_err(|e| HarnessError::Config {
            reason: format!("bad sweep spec: {e}"),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the documented invariants.
    ///
    /// # Errors
    ///
    /// [`HarnessError::Config`] when the rate grid is empty, not strictly
    /// increasing, or negative; when no scheme is listed; or when the cell
    /// is invalid.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |reason: &str| HarnessError::Config {
            reason: reason.to_owned(),
        };
        self.cell.validate()?;
        if self.schemes.is_empty() {
            return Err(bad("at least one scheme is required"));
        }
        if self.rates.is_empty() {
            return Err(bad("rate grid must not be empty"));
        }
        if !self.rates.iter().all(|r| r.is_finite() && *r >= 0.0) {
            return Err(bad("rates must be finite and nonnegative"));
        }
        if !self.rates.windows(2).all(|p| p[0] < p[1]) {
            return Err(bad("rate grid must be strictly increasing"));
        }
        Ok(())
    }

    /// The problem instance at file rate `rate`.
    ///
    /// # Errors
    ///
    /// [`HarnessError::Config`] when the cache/library pair has no integer
    /// caching factor or a count is out of domain.
    pub fn instance(&self, rate: f64) -> Result<ProblemInstance, HarnessError> {
        ProblemInstance::with_uniform_noise(
            self.files,
            self.users,
            self.cache,
            rate,
            self.antennas,
            self.cell.noise_watts(),
        )
        .map_err(|e| HarnessError::Config {
            reason: e.to_string(),
        })
    }
}

/// Aggregated result of one (scheme, rate) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub rate: f64,
    /// Decode-load column for the CSV.
    pub s: u32,
    /// dBW of the mean power over successful trials (−∞ at zero power,
    /// NaN when no trial succeeded).
    pub mean_dbw: f64,
    /// Sample standard deviation of the per-trial dBW values.
    pub std_db: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
}

/// A scheme made concrete for one instance: either a fixed delivery plan
/// or the sparse joint problem's starting point.
enum Prepared {
    Fixed(DeliveryPlan),
    Joint {
        init: DeliveryPlan,
        config: SparseConfig,
    },
}

/// Builds an initial hard-assignment plan with exactly `slots` slots whose
/// decode counts respect `s`: the greedy plan when one lands on `slots`,
/// otherwise the closest greedy plan from below padded with empty slots,
/// otherwise an exact minimum-slot search capped at `slots`.
///
/// # Errors
///
/// [`HarnessError::Config`] when `s` is out of range for the instance or no
/// schedule with at most `slots` slots exists within the budget.
pub fn joint_init_plan(
    instance: &ProblemInstance,
    s: u32,
    slots: usize,
) -> Result<DeliveryPlan, HarnessError> {
    let config_err = |reason: String| HarnessError::Config { reason };
    if slots == 0 {
        return Err(config_err("joint scheme needs at least one slot".into()));
    }
    let mut below: Option<DeliveryPlan> = None;
    for budget in (1..=s).rev() {
        let plan = greedy_schedule(instance, &ScheduleConfig::new(budget))
            .map_err(|e| config_err(e.to_string()))?;
        if plan.num_slots() == slots {
            return Ok(plan);
        }
        if plan.num_slots() < slots
            && below
                .as_ref()
                .map_or(true, |best| plan.num_slots() > best.num_slots())
        {
            below = Some(plan);
        }
    }
    if let Some(plan) = below {
        return Ok(pad_plan(plan, slots));
    }
    let (_, plan) = min_slots_exact(instance, s, Some(slots)).map_err(|e| {
        config_err(format!(
            "no initial schedule with {slots} slots within budget {s}: {e}"
        ))
    })?;
    Ok(pad_plan(plan, slots))
}

/// Appends empty zero-fraction slots until the plan has `slots` of them.
fn pad_plan(mut plan: DeliveryPlan, slots: usize) -> DeliveryPlan {
    while plan.slot_messages.len() < slots {
        plan.slot_messages.push(Vec::new());
        plan.blocklength_fractions.push(0.0);
    }
    for row in &mut plan.rate_matrix {
        row.resize(slots, 0.0);
    }
    plan
}

fn prepare(instance: &ProblemInstance, scheme: &Scheme) -> Result<Prepared, HarnessError> {
    let config_err = |reason: String| HarnessError::Config { reason };
    match scheme {
        Scheme::Greedy { s } => greedy_schedule(instance, &ScheduleConfig::new(*s))
            .map(Prepared::Fixed)
            .map_err(|e| config_err(e.to_string())),
        Scheme::Fs => {
            let s_max =
                binomial(u64::from(instance.num_users - 1), u64::from(instance.caching_factor))
                    as u32;
            greedy_schedule(instance, &ScheduleConfig::new(s_max))
                .map(Prepared::Fixed)
                .map_err(|e| config_err(e.to_string()))
        }
        Scheme::Baseline { alpha } => baseline_plan(instance, *alpha)
            .map(Prepared::Fixed)
            .map_err(|e| config_err(e.to_string())),
        Scheme::Joint { s, slots } => {
            let init = joint_init_plan(instance, *s, *slots)?;
            let config = SparseConfig::for_instance(instance, *slots, *s);
            Ok(Prepared::Joint { init, config })
        }
    }
}

/// Solves one (scheme, rate) cell on one draw; `None` marks a failed trial
/// (solver error or final feasibility check rejected).
fn solve_one(
    prep: &Prepared,
    instance: &ProblemInstance,
    channels: &beamforming_sca::ChannelRealization,
) -> Option<f64> {
    match prep {
        Prepared::Fixed(plan) => {
            let solution = sca_solve(plan, channels, &SCAConfig::default()).ok()?;
            let report = verify_feasibility(&solution, plan, channels, 1e-6).ok()?;
            report.feasible.then_some(solution.power)
        }
        Prepared::Joint { init, config } => solve_joint(channels, instance, config, init)
            .ok()
            .map(|outcome| outcome.solution.power),
    }
}

/// Runs the sweep: paired trials over every (scheme, rate) cell.
///
/// Rows come back rate-major (all schemes at the first rate, then the
/// next). A cell where every trial failed is reported with NaN aggregates,
/// not an error.
///
/// # Errors
///
/// [`HarnessError::Config`] when the spec, an instance, or a scheme cannot
/// be constructed — never for solver failures, which are counted per row.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, HarnessError> {
    spec.validate()?;
    let instances: Vec<ProblemInstance> = spec
        .rates
        .iter()
        .map(|&r| spec.instance(r))
        .collect::<Result<_, _>>()?;

    let mut cells: Vec<(usize, &Scheme, Prepared)> = Vec::new();
    for (ri, instance) in instances.iter().enumerate() {
        for scheme in &spec.schemes {
            cells.push((ri, scheme, prepare(instance, scheme)?));
        }
    }

    // Channels depend only on (K, N_T, noise), which the rate grid shares.
    let per_trial: Vec<Vec<Option<f64>>> = (0..spec.cell.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let channels = draw_channels(&spec.cell, &instances[0], trial);
            cells
                .iter()
                .map(|(ri, _, prep)| solve_one(prep, &instances[*ri], &channels))
                .collect()
        })
        .collect();

    let rows = cells
        .iter()
        .enumerate()
        .map(|(ci, (ri, scheme, _))| {
            let powers: Vec<f64> = per_trial.iter().filter_map(|t| t[ci]).collect();
            let (mean_dbw, std_db) = aggregate(&powers);
            SweepRow {
                scheme: (*scheme).clone(),
                rate: spec.rates[*ri],
                s: scheme.decode_column(&instances[*ri]),
                mean_dbw,
                std_db,
                trials_ok: powers.len(),
                trials_failed: spec.cell.trials - powers.len(),
            }
        })
        .collect();
    Ok(rows)
}

/// Mean power in dBW and the sample std of per-trial dBW values. Zero-power
/// trials (R = 0) are excluded from the spread, which is then 0.
fn aggregate(powers: &[f64]) -> (f64, f64) {
    if powers.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean_w = powers.iter().sum::<f64>() / powers.len() as f64;
    let dbws: Vec<f64> = powers
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| watts_to_dbw(p))
        .collect();
    let std_db = if dbws.len() < 2 {
        0.0
    } else {
        let m = dbws.iter().sum::<f64>() / dbws.len() as f64;
        (dbws.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / (dbws.len() - 1) as f64).sqrt()
    };
    (watts_to_dbw(mean_w), std_db)
}

/// Formats a dB value for the CSV: finite values to six decimals,
/// non-finite ones as `nan`/`inf`/`-inf`.
fn fmt_db(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.is_infinite() {
        if v < 0.0 { "-inf".to_owned() } else { "inf".to_owned() }
    } else {
        format!("{v:.6}")
    }
}

/// Renders the sweep result as CSV with the documented columns.
#[must_use]
pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out =
        String::from("scheme,K,N,M,N_T,s,R_bps_hz,mean_P_dBW,std_P_dB,trials_ok,trials_failed\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.6},{},{},{},{}\n",
            row.scheme.label(),
            spec.users,
            spec.files,
            spec.cache,
            spec.antennas,
            row.s,
            row.rate,
            fmt_db(row.mean_dbw),
            fmt_db(row.std_db),
            row.trials_ok,
            row.trials_failed
        ));
    }
    out
}

/// A gnuplot script plotting mean power against rate, one line per scheme.
#[must_use]
pub fn gnuplot_script(csv_name: &str, spec: &SweepSpec) -> String {
    let mut script = String::from(
        "set datafile separator \",\"\nset xlabel \"R (bps/Hz)\"\n\
         set ylabel \"average transmit power (dBW)\"\nset key top left\nset grid\nplot \\\n",
    );
    let lines: Vec<String> = spec
        .schemes
        .iter()
        .map(|scheme| {
            let label = scheme.label();
            format!(
                "  \"{csv_name}\" every ::1 using 7:(strcol(1) eq \"{label}\" ? column(8) : 1/0) \
                 with linespoints title \"{label}\""
            )
        })
        .collect();
    script.push_str(&lines.join(", \\\n"));
    script.push('\n');
    script
}
