//! `cachesim`: CLI for coded-caching delivery simulation.
//!
//! Subcommands: `plan` (print a delivery schedule), `bounds` (closed-form
//! slot/DoF bounds), `table1` (slot-count comparison table), `solve` (one
//! beamforming solve on a drawn or supplied channel), `sweep` (Monte Carlo
//! sweep from a TOML spec), and `joint` (sparse joint redesign on one
//! draw). Exit codes: 0 on success, 2 for configuration errors, 3 when a
//! solve fails or a sweep produces no successful trial anywhere.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beamforming_sca::{
    sca_solve, verify_feasibility, watts_to_dbw, ChannelRealization, SCAConfig,
};
use caching_core::{binomial, ProblemInstance};
use clap::{Args, Parser, Subcommand};
use delivery_scheduler::{
    baseline_plan, baseline_slot_count, dof_lower_bound, greedy_schedule, slots_upper_bound,
    DeliveryPlan, ScheduleConfig,
};
use num_complex::Complex64;
use serde::Deserialize;
use sim_harness::{
    draw_channels, gnuplot_script, joint_init_plan, run_sweep, sweep_csv, table1_csv,
    reproduce_table1, CellConfig, Scheme, SweepSpec, DEFAULT_TRIALS,
};
use sparse_joint_opt::{solve_joint, SparseConfig};

#[derive(Parser)]
#[command(
    name = "cachesim",
    version,
    about = "Coded-caching delivery simulator: schedules, beamforming, Monte Carlo sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Instance parameters shared by most subcommands.
#[derive(Args)]
struct InstanceArgs {
    /// Library size N.
    #[arg(long, default_value_t = 4)]
    files: u32,
    /// Number of users K.
    #[arg(long, default_value_t = 4)]
    users: u32,
    /// Per-user cache size M, in files.
    #[arg(long, default_value_t = 1)]
    cache: u32,
    /// BS antenna count N_T.
    #[arg(long, default_value_t = 4)]
    antennas: u32,
    /// Target file rate R in bps/Hz.
    #[arg(long, default_value_t = 4.0)]
    rate: f64,
}

impl InstanceArgs {
    fn build(&self, noise_watts: f64) -> Result<ProblemInstance, CliError> {
        ProblemInstance::with_uniform_noise(
            self.files,
            self.users,
            self.cache,
            self.rate,
            self.antennas,
            noise_watts,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Cell-model overrides for channel draws.
#[derive(Args)]
struct CellArgs {
    /// Cell radius in meters.
    #[arg(long, default_value_t = 500.0)]
    radius_m: f64,
    /// Minimum BS-user distance in meters.
    #[arg(long, default_value_t = 35.0)]
    min_distance_m: f64,
    /// Noise power in dBW.
    #[arg(long, default_value_t = -134.0, allow_hyphen_values = true)]
    noise_dbw: f64,
    /// Master seed for channel draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial count (sweeps only; single solves draw trial 0).
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
}

impl CellArgs {
    fn cell(&self) -> Result<CellConfig, CliError> {
        let cell = CellConfig {
            radius_m: self.radius_m,
            min_distance_m: self.min_distance_m,
            noise_dbw: self.noise_dbw,
            master_seed: self.seed,
            trials: self.trials,
            ..CellConfig::default()
        };
        cell.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cell)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the delivery plan a scheme produces for an instance.
    Plan {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Scheme: fs, greedy:S, or baseline:A.
        #[arg(long, default_value = "fs")]
        scheme: String,
        /// Emit the plan as JSON instead of a summary.
        #[arg(long)]
        json: bool,
    },
    /// Closed-form slot-count and DoF bounds for (K, t, s).
    Bounds {
        #[arg(long)]
        users: u32,
        /// Caching factor t = MK/N.
        #[arg(long)]
        t: u32,
        /// Per-slot decode budget s.
        #[arg(long)]
        s: u32,
        /// Baseline group width α (optional; prints B_l and the ratio).
        #[arg(long)]
        alpha: Option<u32>,
        /// Baseline sub-group width β.
        #[arg(long, default_value_t = 1)]
        beta: u32,
    },
    /// Regenerate the slot-count comparison table as CSV.
    Table1,
    /// Solve the fixed-pattern beamforming problem on one channel draw.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        cell: CellArgs,
        /// JSON channel file; omitted, channels are drawn from the cell
        /// model at trial 0 of --seed.
        #[arg(long)]
        channels: Option<PathBuf>,
        /// Scheme: fs, greedy:S, or baseline:A.
        #[arg(long, default_value = "fs")]
        scheme: String,
        /// Emit the full solution as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a Monte Carlo sweep described by a TOML spec file.
    Sweep {
        /// Path to the sweep spec.
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV path (overrides the spec's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jointly redesign the delivery pattern and beams on one draw.
    Joint {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        cell: CellArgs,
        /// JSON channel file; omitted, channels are drawn from the cell
        /// model at trial 0 of --seed.
        #[arg(long)]
        channels: Option<PathBuf>,
        /// Per-slot decode budget s.
        #[arg(long, default_value_t = 2)]
        s: u32,
        /// Number of equal time slots B.
        #[arg(long, default_value_t = 2)]
        slots: usize,
        /// Emit the certified solution as JSON.
        #[arg(long)]
        json: bool,
    },
}

/// CLI failure modes mapped onto the documented exit codes.
enum CliError {
    /// Exit 2: arguments, spec files, or instances could not be built.
    Config(String),
    /// Exit 3: a solve failed, or a sweep had no successful trial at all.
    Failed(String),
}

fn main() -> ExitCode {
    match run(&Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Plan {
            instance,
            scheme,
            json,
        } => {
            let inst = instance.build(1.0)?;
            let (label, plan) = fixed_plan(&inst, scheme)?;
            if *json {
                println!("{}", plan.to_json());
            } else {
                print_plan(&label, &plan);
            }
            Ok(())
        }
        Command::Bounds {
            users,
            t,
            s,
            alpha,
            beta,
        } => bounds(*users, *t, *s, *alpha, *beta),
        Command::Table1 => {
            print!("{}", table1_csv(&reproduce_table1()));
            Ok(())
        }
        Command::Solve {
            instance,
            cell,
            channels,
            scheme,
            json,
        } => {
            let cell = cell.cell()?;
            let inst = instance.build(cell.noise_watts())?;
            let ch = load_or_draw(channels.as_deref(), &cell, &inst)?;
            let (label, plan) = fixed_plan(&inst, scheme)?;
            let solution = sca_solve(&plan, &ch, &SCAConfig::default())
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let report = verify_feasibility(&solution, &plan, &ch, 1e-6)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            if !report.feasible {
                return Err(CliError::Failed(format!(
                    "solution failed the feasibility check (worst MAC margin {:.3e})",
                    report.worst_mac_margin
                )));
            }
            if *json {
                println!("{}", solution.to_json());
            } else {
                println!(
                    "scheme={label} slots={} power_w={:.6e} power_dbw={:.3} \
                     iterations={} degraded={} worst_mac_margin={:.3e}",
                    plan.num_slots(),
                    solution.power,
                    watts_to_dbw(solution.power),
                    solution.iterations,
                    solution.degraded,
                    report.worst_mac_margin
                );
            }
            Ok(())
        }
        Command::Sweep { spec, out } => sweep(spec, out.as_deref()),
        Command::Joint {
            instance,
            cell,
            channels,
            s,
            slots,
            json,
        } => {
            let cell = cell.cell()?;
            let inst = instance.build(cell.noise_watts())?;
            let ch = load_or_draw(channels.as_deref(), &cell, &inst)?;
            let init = joint_init_plan(&inst, *s, *slots)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let config = SparseConfig::for_instance(&inst, *slots, *s);
            let outcome = solve_joint(&ch, &inst, &config, &init)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            if *json {
                println!("{}", outcome.solution.to_json());
            } else {
                let worst = outcome
                    .census
                    .iter()
                    .flatten()
                    .copied()
                    .max()
                    .unwrap_or(0);
                let sizes: Vec<usize> = outcome
                    .induced_plan
                    .slot_messages
                    .iter()
                    .map(Vec::len)
                    .collect();
                println!(
                    "joint s={s} slots={slots} relaxed_dbw={:.3} certified_dbw={:.3} \
                     max_decode={worst} slot_sizes={sizes:?} degraded={}",
                    watts_to_dbw(outcome.relaxed_power),
                    watts_to_dbw(outcome.solution.power),
                    outcome.solution.degraded
                );
            }
            Ok(())
        }
    }
}

/// Builds the fixed delivery plan named by a compact scheme label.
fn fixed_plan(
    instance: &ProblemInstance,
    scheme: &str,
) -> Result<(String, DeliveryPlan), CliError> {
    let parsed: Scheme = scheme
        .parse()
        .map_err(|e: sim_harness::HarnessError| CliError::Config(e.to_string()))?;
    let plan = match &parsed {
        Scheme::Greedy { s } => greedy_schedule(instance, &ScheduleConfig::new(*s))
            .map_err(|e| CliError::Config(e.to_string()))?,
        Scheme::Fs => {
            let s_max = binomial(
                u64::from(instance.num_users - 1),
                u64::from(instance.caching_factor),
            ) as u32;
            greedy_schedule(instance, &ScheduleConfig::new(s_max))
                .map_err(|e| CliError::Config(e.to_string()))?
        }
        Scheme::Baseline { alpha } => baseline_plan(instance, *alpha)
            .map_err(|e| CliError::Config(e.to_string()))?,
        Scheme::Joint { .. } => {
            return Err(CliError::Config(
                "the joint scheme has its own subcommand: use `cachesim joint`".to_owned(),
            ))
        }
    };
    Ok((parsed.label(), plan))
}

fn print_plan(label: &str, plan: &DeliveryPlan) {
    println!(
        "scheme={label} users={} t={} messages={} slots={}",
        plan.num_users,
        plan.caching_factor,
        plan.num_messages(),
        plan.num_slots()
    );
    for (i, members) in plan.slot_messages.iter().enumerate() {
        let targets: Vec<String> = members
            .iter()
            .map(|&m| {
                let t: Vec<String> = plan.message_targets[m]
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                format!("{{{}}}", t.join(","))
            })
            .collect();
        println!(
            "slot {i}: fraction={:.4} decode_counts={:?} messages=[{}]",
            plan.blocklength_fractions[i],
            plan.decode_counts(i),
            targets.join(" ")
        );
    }
}

fn bounds(users: u32, t: u32, s: u32, alpha: Option<u32>, beta: u32) -> Result<(), CliError> {
    if t >= users {
        return Err(CliError::Config(format!(
            "caching factor t = {t} must be below K = {users}"
        )));
    }
    let s_max = binomial(u64::from(users - 1), u64::from(t));
    if s == 0 || u64::from(s) > s_max {
        return Err(CliError::Config(format!(
            "decode budget s = {s} outside 1..={s_max}"
        )));
    }
    let b_u = slots_upper_bound(users, t, s);
    let dof = dof_lower_bound(users, t, s);
    println!("B_u={b_u} dof_lower_bound={}/{}", dof.numer(), dof.denom());
    if let Some(alpha) = alpha {
        let b_l = baseline_slot_count(users, t, alpha, beta)
            .map_err(|e| CliError::Config(e.to_string()))?;
        println!("B_l={b_l} ratio={:.4}", b_u as f64 / b_l as f64);
    }
    Ok(())
}

fn sweep(spec_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", spec_path.display())))?;
    let spec = SweepSpec::from_toml(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let rows = run_sweep(&spec).map_err(|e| CliError::Config(e.to_string()))?;

    let csv = sweep_csv(&spec, &rows);
    let csv_path: PathBuf = out
        .map(Path::to_path_buf)
        .or_else(|| spec.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));
    std::fs::write(&csv_path, &csv)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", csv_path.display())))?;
    let script = gnuplot_script(&csv_path.to_string_lossy(), &spec);
    let script_path = csv_path.with_extension("gp");
    std::fs::write(&script_path, script)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", script_path.display())))?;

    print!("{csv}");
    eprintln!(
        "wrote {} and {}",
        csv_path.display(),
        script_path.display()
    );
    if rows.iter().all(|r| r.trials_ok == 0) {
        return Err(CliError::Failed(
            "every trial of every cell failed".to_owned(),
        ));
    }
    Ok(())
}

/// JSON schema for supplying channels directly: a complex matrix per user
/// (entries as `[re, im]` pairs) and per-user noise variances in watts.
#[derive(Deserialize)]
struct ChannelsFile {
    channels: Vec<Vec<[f64; 2]>>,
    noise_vars: Vec<f64>,
}

fn load_or_draw(
    path: Option<&Path>,
    cell: &CellConfig,
    instance: &ProblemInstance,
) -> Result<ChannelRealization, CliError> {
    match path {
        None => Ok(draw_channels(cell, instance, 0)),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let file: ChannelsFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad channel file: {e}")))?;
            let channels = file
                .channels
                .iter()
                .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            ChannelRealization::new(channels, file.noise_vars)
                .map_err(|e| CliError::Config(e.to_string()))
        }
    }
}
