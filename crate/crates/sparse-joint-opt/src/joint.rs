//! The smoothed-ℓ0 joint design: one coupled SCA over all messages, all
//! slots, with the decode budget as a linearized arctan constraint.
//!
//! The dense problem keeps a beamformer and a rate variable for *every*
//! message in *every* slot (equal blocklengths `1/B`) and minimizes average
//! power subject to, per user `k` and slot `i`,
//!
//! - per-message rate totals `Σ_i R^𝒯(i) ≥ R/C(K,t)`,
//! - MAC rows `Σ_{𝒯∈π} R^𝒯(i) ≤ (1/B)·log₂(1 + η_π)` for every non-empty
//!   subset π of the messages targeting `k`,
//! - interference coupling `Σ_{ℐ∌k} |h_k^H w_ℐ|² + σ² ≤ Σ_{𝒯∈π} |h_k^H w_𝒯|²
//!   / η_π`, whose concave part `−S/η` is replaced by its tangent at the
//!   current point (the constraint is then scaled by `η̂_π > 0` so its
//!   coefficients stay bounded as rates approach zero),
//! - the smoothed budget `Σ_𝒯 [arctan(R̂/ξ) + ξ/(ξ²+R̂²)·(R − R̂)] ≤ π·s/2`.
//!
//! Tangents of concave functions lie above them, so every accepted iterate
//! satisfies the true smoothed constraints. After convergence, rates below
//! the rounding threshold are zeroed, the exact census is checked against
//! the budget, and a fresh fixed-rate solve on the induced plan certifies
//! the reported power.
//!
//! The starting point extends the initial schedule's beamformers (re-solved
//! under equal blocklengths) with an ε-activation: every unscheduled
//! (message, slot) pair receives a small rate and a zero-forcing beam sized
//! so all decoding constraints stay satisfied. Without it, the tangent rows
//! pin zero-SINR messages at zero rate and the pattern could never move.

use crate::smooth::{arctan_slope, arctan_smooth, l0_census};
use crate::types::{JointOutcome, SparseConfig, SparseError};
use beamforming_sca::{
    average_power, sca_solve, sinr, verify_feasibility, BeamformingSolution, ChannelRealization,
    SCAConfig, SlotBeams, TracePoint,
};
use caching_core::{ksubsets, ProblemInstance};
use convex_backend::{
    reformulate_log_rate, reformulate_quadratic, ConicProgram, LinearExpr, QuadTerm, SolveStatus,
    Tolerances,
};
use delivery_scheduler::DeliveryPlan;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Floor for linearization denominators `η̂`; constraint rows are scaled by
/// `η̂` so the floor only guards literal division by zero.
const ETA_FLOOR: f64 = 1e-12;

/// `h^H w` as two affine rows over interleaved real variables starting at
/// `base`: `(Re, Im)` per antenna. Mirrors the beamforming layer's layout.
fn gain_rows(h: &DVector<Complex64>, base: usize) -> (LinearExpr, LinearExpr) {
    let mut re = Vec::with_capacity(2 * h.len());
    let mut im = Vec::with_capacity(2 * h.len());
    for (a, ha) in h.iter().enumerate() {
        re.push((base + 2 * a, ha.re));
        re.push((base + 2 * a + 1, ha.im));
        im.push((base + 2 * a, -ha.im));
        im.push((base + 2 * a + 1, ha.re));
    }
    (
        LinearExpr::from_terms(re, 0.0),
        LinearExpr::from_terms(im, 0.0),
    )
}

/// Variable layout of the dense program. Beam blocks first, then rates,
/// then one η per (user, slot, subset); the η state vector shares the
/// subset indexing.
struct Layout {
    n_t: usize,
    num_messages: usize,
    num_slots: usize,
    /// First variable of the `2·N_T` block of `(slot, message)`.
    w_base: Vec<Vec<usize>>,
    /// Rate variable of `(message, slot)`.
    rate_var: Vec<Vec<usize>>,
    /// Messages targeting each user, ascending, indexed `[k − 1]`.
    targeted: Vec<Vec<usize>>,
    /// Messages not targeting each user, indexed `[k − 1]`.
    interferers: Vec<Vec<usize>>,
    /// η state offset of `[k − 1][slot]`; subset mask π sits at
    /// `offset + mask − 1`.
    eta_offset: Vec<Vec<usize>>,
    eta_var_start: usize,
    num_eta: usize,
    num_vars: usize,
}

impl Layout {
    fn new(plan: &DeliveryPlan, n_t: usize) -> Self {
        let num_messages = plan.num_messages();
        let num_slots = plan.num_slots();
        let num_users = plan.num_users;
        let mut next = 1; // variable 0 is the power epigraph
        let mut w_base = vec![vec![0usize; num_messages]; num_slots];
        for row in &mut w_base {
            for slot in row.iter_mut() {
                *slot = next;
                next += 2 * n_t;
            }
        }
        let mut rate_var = vec![vec![0usize; num_slots]; num_messages];
        for row in &mut rate_var {
            for v in row.iter_mut() {
                *v = next;
                next += 1;
            }
        }
        let targeted: Vec<Vec<usize>> = (1..=num_users).map(|k| plan.targets_of(k)).collect();
        let interferers: Vec<Vec<usize>> = (1..=num_users)
            .map(|k| {
                (0..num_messages)
                    .filter(|&m| !plan.message_targets[m].contains(&k))
                    .collect()
            })
            .collect();
        let mut eta_offset = vec![vec![0usize; num_slots]; num_users as usize];
        let mut num_eta = 0;
        for (kk, tgt) in targeted.iter().enumerate() {
            let subsets = (1usize << tgt.len()) - 1;
            for off in &mut eta_offset[kk] {
                *off = num_eta;
                num_eta += subsets;
            }
        }
        let eta_var_start = next;
        next += num_eta;
        Self {
            n_t,
            num_messages,
            num_slots,
            w_base,
            rate_var,
            targeted,
            interferers,
            eta_offset,
            eta_var_start,
            num_eta,
            num_vars: next,
        }
    }

    fn eta_index(&self, kk: usize, slot: usize, mask: usize) -> usize {
        self.eta_offset[kk][slot] + mask - 1
    }
}

/// Current iterate of the dense SCA.
struct DenseState {
    /// `[slot][message]`, full dense shape.
    beams: Vec<SlotBeams>,
    /// `[message][slot]`, all nonnegative.
    rates: Vec<Vec<f64>>,
    /// η̂ per (user, slot, subset), flat per [`Layout::eta_index`].
    eta_hat: Vec<f64>,
}

fn scratch_solution(beams: &[SlotBeams], rates: &[Vec<f64>]) -> BeamformingSolution {
    BeamformingSolution {
        beams: beams.to_vec(),
        rates: rates.to_vec(),
        etas: Vec::new(),
        power: 0.0,
        iterations: 0,
        degraded: false,
        trace: Vec::new(),
    }
}

/// Achieved `Σ_{𝒯∈π} γ` for every (user, slot, subset) at the given beams.
fn achieved_etas(
    norm: &ChannelRealization,
    plan: &DeliveryPlan,
    layout: &Layout,
    beams: &[SlotBeams],
) -> Result<Vec<f64>, SparseError> {
    let mut out = vec![0.0; layout.num_eta];
    for (kk, tgt) in layout.targeted.iter().enumerate() {
        let k = kk as u32 + 1;
        for i in 0..layout.num_slots {
            let gammas: Vec<f64> = tgt
                .iter()
                .map(|&m| sinr(norm, plan, i, &beams[i], k, m))
                .collect::<Result<_, _>>()
                .map_err(SparseError::Beamforming)?;
            for mask in 1usize..(1 << tgt.len()) {
                let sum: f64 = gammas
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &g)| g)
                    .sum();
                out[layout.eta_index(kk, i, mask)] = sum;
            }
        }
    }
    Ok(out)
}

/// Worst smoothed-budget margin `s − (2/π)·Σ_𝒯 arctan(r/ξ)` over all
/// (user, slot) cells.
fn smoothed_margin(layout: &Layout, rates: &[Vec<f64>], xi: f64, budget: u32) -> f64 {
    let mut worst = f64::INFINITY;
    for tgt in &layout.targeted {
        let mut sums = vec![0.0f64; layout.num_slots];
        for &m in tgt {
            for (acc, &r) in sums.iter_mut().zip(&rates[m]) {
                *acc += arctan_smooth(r.max(0.0), xi);
            }
        }
        for &sum in &sums {
            worst = worst.min(f64::from(budget) - sum);
        }
    }
    worst
}

/// Component of `v` orthogonal to the span of the blockers' channels, or
/// `None` when the blockers' Gram matrix is numerically singular.
fn project_out(blockers: &[&DVector<Complex64>], v: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    if blockers.is_empty() {
        return Some(v.clone());
    }
    let n_t = v.len();
    let a = DMatrix::from_fn(n_t, blockers.len(), |r, c| {
        blockers[c][r] / Complex64::new(blockers[c].norm(), 0.0)
    });
    let gram = a.adjoint() * &a;
    let chol = gram.cholesky()?;
    let coef = chol.solve(&(a.adjoint() * v));
    Some(v - &a * coef)
}

/// Builds the dense starting point: the initial schedule's beams re-solved
/// under equal blocklengths, plus an ε-activation of every unscheduled
/// (message, slot) pair.
#[allow(clippy::too_many_lines)]
fn dense_init(
    norm: &ChannelRealization,
    channels: &ChannelRealization,
    config: &SparseConfig,
    init_plan: &DeliveryPlan,
    dense_plan: &DeliveryPlan,
    inner: &SCAConfig,
    rho: f64,
) -> Result<(Vec<SlotBeams>, Vec<Vec<f64>>), SparseError> {
    let b = config.num_slots;
    let num_messages = init_plan.num_messages();
    let num_users = init_plan.num_users;
    let n_t = norm.num_antennas();
    let fail = |reason: String| SparseError::InitializationFailure { reason };

    // The schedule's own beamformers, re-solved for equal fractions 1/B.
    let mut eq_plan = init_plan.clone();
    eq_plan.blocklength_fractions = vec![1.0 / b as f64; b];
    let base = sca_solve(&eq_plan, channels, inner)?;
    let base_report = verify_feasibility(&base, &eq_plan, norm, config.sca.feasibility_tol)?;
    if !base_report.feasible {
        return Err(fail(format!(
            "equal-blocklength re-solve of the initial schedule is infeasible (margin {:.3e})",
            base_report.worst_mac_margin
        )));
    }
    // Existing deficit to cover: the re-solve is only feasible to tolerance.
    let deficit = (-base_report.worst_mac_margin).max(0.0) + 1e-9;

    let occupied =
        |m: usize, i: usize| init_plan.rate_matrix[m][i] > 0.0;
    let mut beams: Vec<SlotBeams> = vec![vec![DVector::zeros(n_t); num_messages]; b];
    for (i, (slot_beams, base_slot)) in beams.iter_mut().zip(&base.beams).enumerate() {
        for (pos, &m) in init_plan.slot_messages[i].iter().enumerate() {
            if occupied(m, i) {
                slot_beams[m] = base_slot[pos].clone();
            }
        }
    }

    // Interference-plus-noise and targeted SINR sums per (user, slot) at
    // the scheduled beams (unit noise after normalization).
    let ku = num_users as usize;
    let mut inf = vec![vec![1.0; b]; ku];
    let mut sig = vec![vec![0.0; b]; ku];
    for i in 0..b {
        for kk in 0..ku {
            let h = norm.channel(kk as u32 + 1);
            for (m, w) in beams[i].iter().enumerate() {
                if !occupied(m, i) {
                    continue;
                }
                let p = h.dotc(w).norm_sqr();
                if init_plan.message_targets[m].contains(&(kk as u32 + 1)) {
                    sig[kk][i] += p;
                } else {
                    inf[kk][i] += p;
                }
            }
        }
    }

    let mut rates: Vec<Vec<f64>> = init_plan.rate_matrix.clone();
    let any_inactive = (0..num_messages).any(|m| (0..b).any(|i| !occupied(m, i)));
    if !any_inactive {
        return Ok((beams, rates));
    }

    // Activation rate ε₀: small enough that every smoothed budget row keeps
    // at least half its slack, and far below the rounding threshold scale.
    let targeted: Vec<Vec<usize>> = (1..=num_users).map(|k| dense_plan.targets_of(k)).collect();
    let superposition = targeted[0].len(); // C(K−1, t), same for all users
    let mut frac = f64::INFINITY;
    for tgt in &targeted {
        for i in 0..b {
            let mut used = 0.0;
            let mut act = 0usize;
            for &m in tgt {
                if occupied(m, i) {
                    used += arctan_smooth(init_plan.rate_matrix[m][i], config.xi);
                } else {
                    act += 1;
                }
            }
            if act > 0 {
                frac = frac.min((f64::from(config.budget) - used) / (2.0 * act as f64));
            }
        }
    }
    if frac.is_nan() || frac <= 0.0 {
        return Err(fail(
            "initial schedule leaves no smoothed-budget slack for activation".into(),
        ));
    }
    let eps0 = (FRAC_PI_2 * config.xi * frac).min(1e-6 * rho);

    // SINR each activated message must contribute so that every decoding
    // subset — scheduled, activated, or mixed — keeps a nonnegative margin:
    // the activated rate mass costs at most C(K−1,t)·ε₀ bits on any subset.
    let growth = b as f64 * (deficit + superposition as f64 * eps0);
    let mut gamma_need = vec![vec![0.0; b]; ku];
    for kk in 0..ku {
        for i in 0..b {
            let gsum = sig[kk][i] / inf[kk][i];
            gamma_need[kk][i] = (1.0 + gsum) * (growth.exp2() - 1.0) + 1e-12;
        }
    }

    // Zero-forcing activation beams: the shared direction nulls every
    // non-target user, so no existing margin is disturbed.
    for m in 0..num_messages {
        if (0..b).all(|i| occupied(m, i)) {
            continue;
        }
        let targets = &init_plan.message_targets[m];
        let blockers: Vec<&DVector<Complex64>> = (1..=num_users)
            .filter(|k| !targets.contains(k))
            .map(|k| norm.channel(k))
            .collect();
        let mut pilot = DVector::zeros(n_t);
        for &k in targets {
            let h = norm.channel(k);
            pilot += h / Complex64::new(h.norm(), 0.0);
        }
        let dir = project_out(&blockers, &pilot)
            .ok_or_else(|| fail("blocker channels are numerically dependent".into()))?;
        if dir.norm() < 1e-9 {
            return Err(fail(format!(
                "no interference-free direction for message {m}: need N_T ≥ K − t"
            )));
        }
        let dir = &dir / Complex64::new(dir.norm(), 0.0);
        for i in 0..b {
            if occupied(m, i) {
                continue;
            }
            let mut power = 0.0f64;
            for &k in targets {
                let g = norm.channel(k).dotc(&dir).norm_sqr();
                if g < 1e-12 * norm.channel(k).norm_squared() {
                    return Err(fail(format!(
                        "activation direction for message {m} is orthogonal to user {k}"
                    )));
                }
                let kk = (k - 1) as usize;
                power = power.max(gamma_need[kk][i] * inf[kk][i] / g);
            }
            beams[i][m] = &dir * Complex64::new(power.sqrt(), 0.0);
            rates[m][i] = eps0;
        }
    }

    // The construction is conservative; verify it before trusting it.
    let report = verify_feasibility(
        &scratch_solution(&beams, &rates),
        dense_plan,
        norm,
        config.sca.feasibility_tol,
    )?;
    if !report.feasible {
        return Err(fail(format!(
            "activated starting point violates decoding constraints by {:.3e}",
            report.worst_mac_margin
        )));
    }
    Ok((beams, rates))
}

/// One coupled SCA run over the dense problem. Mutates `state`; returns
/// (trace, smoothed margins, solves, degraded).
#[allow(clippy::too_many_lines)]
fn run_dense(
    norm: &ChannelRealization,
    dense_plan: &DeliveryPlan,
    layout: &Layout,
    config: &SparseConfig,
    state: &mut DenseState,
) -> Result<(Vec<TracePoint>, Vec<f64>, usize, bool), SparseError> {
    let n_t = layout.n_t;
    let fraction = 1.0 / layout.num_slots as f64;
    let rho: Vec<f64> = (0..layout.num_messages)
        .map(|m| dense_plan.rate_matrix[m].iter().sum())
        .collect();
    let budget_bound = FRAC_PI_2 * f64::from(config.budget);

    let mut objective = average_power(&state.beams, dense_plan);
    let report0 = verify_feasibility(
        &scratch_solution(&state.beams, &state.rates),
        dense_plan,
        norm,
        config.sca.feasibility_tol,
    )?;
    let mut trace = vec![TracePoint {
        slot: None,
        iteration: 0,
        objective,
        worst_margin: report0.worst_mac_margin,
    }];
    let mut smoothed = vec![smoothed_margin(layout, &state.rates, config.xi, config.budget)];

    let tols = Tolerances::default();
    let mut solves = 0;
    let mut consecutive = 0;
    let mut degraded = false;
    for iteration in 1..=config.sca.max_iterations {
        let mut prog = ConicProgram::new(layout.num_vars);
        prog.set_objective_term(0, 1.0);

        // Average-power epigraph over every beam variable.
        let mut power_terms = Vec::with_capacity(2 * n_t * layout.num_messages * layout.num_slots);
        for row in &layout.w_base {
            for &base in row {
                for v in base..base + 2 * n_t {
                    power_terms.push(QuadTerm {
                        weight: fraction,
                        expr: LinearExpr::variable(v),
                    });
                }
            }
        }
        let (cone, rows) = reformulate_quadratic(&power_terms, &LinearExpr::variable(0))
            .map_err(SparseError::Backend)?;
        prog.add_block(cone, rows).map_err(SparseError::Backend)?;

        for (kk, tgt) in layout.targeted.iter().enumerate() {
            let k = kk as u32 + 1;
            let h = norm.channel(k);
            for i in 0..layout.num_slots {
                // Interference rows are shared by every subset of this cell.
                let inter_rows: Vec<(LinearExpr, LinearExpr)> = layout.interferers[kk]
                    .iter()
                    .map(|&m| gain_rows(h, layout.w_base[i][m]))
                    .collect();
                for mask in 1usize..(1 << tgt.len()) {
                    let idx = layout.eta_index(kk, i, mask);
                    let eta_var = layout.eta_var_start + idx;
                    let eta_hat = state.eta_hat[idx].max(ETA_FLOOR);

                    // Tangent of the fractional SINR constraint, scaled by
                    // η̂: η̂·Σ|h^H w_ℐ|² ≤ 2Σ Re{ĉ*(h^H w_𝒯)} − (Ŝ/η̂)·η − η̂.
                    let mut bound = LinearExpr::constant(-eta_hat);
                    let mut s_hat = 0.0;
                    let mut rate_sum = LinearExpr::constant(0.0);
                    for (j, &m) in tgt.iter().enumerate() {
                        if mask & (1 << j) == 0 {
                            continue;
                        }
                        let c_hat = h.dotc(&state.beams[i][m]);
                        s_hat += c_hat.norm_sqr();
                        let (re, im) = gain_rows(h, layout.w_base[i][m]);
                        bound = bound + re.scaled(2.0 * c_hat.re) + im.scaled(2.0 * c_hat.im);
                        rate_sum = rate_sum + LinearExpr::variable(layout.rate_var[m][i]);
                    }
                    bound = bound
                        + LinearExpr::variable(eta_var).scaled(-(s_hat / eta_hat));
                    let terms: Vec<QuadTerm> = inter_rows
                        .iter()
                        .flat_map(|(re, im)| {
                            [
                                QuadTerm { weight: eta_hat, expr: re.clone() },
                                QuadTerm { weight: eta_hat, expr: im.clone() },
                            ]
                        })
                        .collect();
                    let (cone, rows) =
                        reformulate_quadratic(&terms, &bound).map_err(SparseError::Backend)?;
                    prog.add_block(cone, rows).map_err(SparseError::Backend)?;

                    // MAC rate row through the exponential cone, and η ≥ 0.
                    let eta_expr = LinearExpr::variable(eta_var);
                    let (cone, rows) = reformulate_log_rate(&rate_sum, &eta_expr, fraction)
                        .map_err(SparseError::Backend)?;
                    prog.add_block(cone, rows).map_err(SparseError::Backend)?;
                    prog.add_nonneg(eta_expr).map_err(SparseError::Backend)?;
                }

                // Linearized smoothed budget for this (user, slot).
                let mut row = LinearExpr::constant(budget_bound);
                for &m in tgt {
                    let r_hat = state.rates[m][i];
                    let slope = arctan_slope(r_hat, config.xi);
                    row.constant -= (r_hat / config.xi).atan() - slope * r_hat;
                    row.terms.push((layout.rate_var[m][i], -slope));
                }
                prog.add_nonneg(row).map_err(SparseError::Backend)?;
            }
        }

        // Rates are nonnegative and meet the per-message totals.
        for (m, row) in layout.rate_var.iter().enumerate() {
            let mut total = LinearExpr::constant(-rho[m]);
            for &v in row {
                prog.add_nonneg(LinearExpr::variable(v))
                    .map_err(SparseError::Backend)?;
                total = total + LinearExpr::variable(v);
            }
            prog.add_nonneg(total).map_err(SparseError::Backend)?;
        }

        let report = prog.solve(&tols).map_err(SparseError::Backend)?;
        solves += 1;
        // The solver status is advisory: the gate below checks the original
        // constraints and the objective directly, salvaging almost-converged
        // points from shaky subproblem solves.
        if !report.x.iter().all(|v| v.is_finite()) {
            degraded = true;
            break;
        }

        let mut mu = config.sca.step_size;
        let mut accepted = false;
        while mu >= 1e-9 {
            let mut cand_beams = state.beams.clone();
            for ((cand_slot, old_slot), base_row) in
                cand_beams.iter_mut().zip(&state.beams).zip(&layout.w_base)
            {
                for ((cand, old), &base) in cand_slot.iter_mut().zip(old_slot).zip(base_row) {
                    let new = DVector::from_iterator(
                        n_t,
                        (0..n_t).map(|a| {
                            Complex64::new(report.x[base + 2 * a], report.x[base + 2 * a + 1])
                        }),
                    );
                    *cand = old + (new - old) * Complex64::new(mu, 0.0);
                }
            }
            let mut cand_rates = state.rates.clone();
            for (m, row) in layout.rate_var.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    let old = state.rates[m][i];
                    cand_rates[m][i] = (old + mu * (report.x[v] - old)).max(0.0);
                }
            }
            let feas = verify_feasibility(
                &scratch_solution(&cand_beams, &cand_rates),
                dense_plan,
                norm,
                config.sca.feasibility_tol,
            )?;
            let sm = smoothed_margin(layout, &cand_rates, config.xi, config.budget);
            let cand_power = average_power(&cand_beams, dense_plan);
            let descends = cand_power <= objective * (1.0 + 1e-9) + 1e-12;
            if feas.feasible && sm >= -1e-9 && descends {
                for idx in 0..layout.num_eta {
                    let v = report.x[layout.eta_var_start + idx].max(0.0);
                    state.eta_hat[idx] += mu * (v - state.eta_hat[idx]);
                }
                state.beams = cand_beams;
                state.rates = cand_rates;
                trace.push(TracePoint {
                    slot: None,
                    iteration,
                    objective: cand_power,
                    worst_margin: feas.worst_mac_margin,
                });
                smoothed.push(sm);
                let rel = (objective - cand_power).abs() / objective.abs().max(1e-12);
                objective = cand_power;
                if rel < config.sca.stop_rel_change {
                    consecutive += 1;
                } else {
                    consecutive = 0;
                }
                accepted = true;
                break;
            }
            mu *= 0.5;
        }
        if !accepted {
            // A healthy solve with no acceptable step means the iterate is
            // pinned by numerics: treat as converged. A failed solve that
            // also yields no step is a genuine breakdown.
            degraded = report.status != SolveStatus::Optimal;
            break;
        }
        if consecutive >= config.sca.stop_window {
            break;
        }
    }
    Ok((trace, smoothed, solves, degraded))
}

/// Jointly optimizes the delivery pattern and beamformers under the decode
/// budget, starting from a schedule produced for the same budget (or less)
/// with exactly `B` slots.
///
/// Returns the certified solution (a fixed-rate re-solve on the rounded
/// pattern), the induced plan with `B` equal-blocklength slots, the relaxed
/// dense objective, the exact census, and the dense-phase traces.
///
/// # Errors
///
/// - [`SparseError::BadConfig`] / [`SparseError::BadInit`] for domain and
///   shape violations (including an initial schedule that exceeds the
///   budget or does not have `B` slots);
/// - [`SparseError::InitializationFailure`] when no feasible activated
///   starting point exists (e.g. `N_T < K − t`);
/// - [`SparseError::BudgetViolation`] when the rounded pattern still
///   exceeds the budget somewhere — the smoothing was too loose;
/// - [`SparseError::Beamforming`] / [`SparseError::Backend`] passed through
///   from the inner solves.
///
/// # Panics
///
/// Never for inputs that pass validation: internal plan reconstruction is
/// checked with `expect` on invariants the rounding pass preserves.
#[allow(clippy::too_many_lines)]
pub fn solve_joint(
    channels: &ChannelRealization,
    instance: &ProblemInstance,
    config: &SparseConfig,
    init_plan: &DeliveryPlan,
) -> Result<JointOutcome, SparseError> {
    let rho = instance.per_message_rate();
    config.validate(rho)?;
    let bad = |reason: String| SparseError::BadInit { reason };

    let k = instance.num_users;
    if channels.num_users() != k as usize {
        return Err(bad(format!(
            "instance has {k} users but {} channels were supplied",
            channels.num_users()
        )));
    }
    if channels.num_antennas() != instance.num_antennas as usize {
        return Err(bad(format!(
            "instance has {} antennas but channels have {}",
            instance.num_antennas,
            channels.num_antennas()
        )));
    }
    let targets = ksubsets(k, instance.caching_factor + 1);
    if init_plan.num_users != k
        || init_plan.caching_factor != instance.caching_factor
        || init_plan.message_targets != targets
    {
        return Err(bad("initial plan does not match the instance's message enumeration".into()));
    }
    let b = config.num_slots;
    if init_plan.num_slots() != b {
        return Err(bad(format!(
            "initial plan has {} slots, config asks for {b}",
            init_plan.num_slots()
        )));
    }
    init_plan
        .validate(rho)
        .map_err(|e| bad(format!("initial plan invalid: {e}")))?;
    for i in 0..b {
        for user in 1..=k {
            let c = init_plan.decode_count(user, i);
            if c > config.budget {
                return Err(bad(format!(
                    "initial plan makes user {user} decode {c} > s = {} messages in slot {i}",
                    config.budget
                )));
            }
        }
    }

    let num_messages = targets.len();
    let equal_fractions = vec![1.0 / b as f64; b];

    if rho == 0.0 {
        // Nothing to deliver: zero rates, zero power, no scheduled messages.
        let induced_plan = DeliveryPlan {
            num_users: k,
            caching_factor: instance.caching_factor,
            message_targets: targets,
            slot_messages: vec![Vec::new(); b],
            rate_matrix: vec![vec![0.0; b]; num_messages],
            blocklength_fractions: equal_fractions,
        };
        let solution = BeamformingSolution {
            beams: vec![Vec::new(); b],
            rates: vec![vec![0.0; b]; num_messages],
            etas: Vec::new(),
            power: 0.0,
            iterations: 0,
            degraded: false,
            trace: Vec::new(),
        };
        return Ok(JointOutcome {
            solution,
            induced_plan,
            relaxed_power: 0.0,
            census: vec![vec![0; b]; k as usize],
            dense_trace: Vec::new(),
            smoothed_margin_trace: Vec::new(),
        });
    }

    // Per-message totals for (21c): ρ, anchored at each message's first
    // scheduled slot so the dense plan promises exactly the requirement.
    let mut requirement = vec![vec![0.0; b]; num_messages];
    for (m, row) in requirement.iter_mut().enumerate() {
        let designated = (0..b)
            .find(|&i| init_plan.rate_matrix[m][i] > 0.0)
            .expect("validated plan serves every message");
        row[designated] = rho;
    }
    let dense_plan = DeliveryPlan {
        num_users: k,
        caching_factor: instance.caching_factor,
        message_targets: targets.clone(),
        slot_messages: vec![(0..num_messages).collect(); b],
        rate_matrix: requirement,
        blocklength_fractions: equal_fractions.clone(),
    };

    let inner = SCAConfig {
        couple_slots: false,
        optimize_rates: false,
        ..config.sca.clone()
    };
    let norm = channels.normalized();
    let layout = Layout::new(&dense_plan, norm.num_antennas());
    let (init_beams, init_rates) =
        dense_init(&norm, channels, config, init_plan, &dense_plan, &inner, rho)?;
    let eta_hat = achieved_etas(&norm, &dense_plan, &layout, &init_beams)?;
    let mut state = DenseState {
        beams: init_beams,
        rates: init_rates,
        eta_hat,
    };
    let (dense_trace, smoothed_margin_trace, _solves, _degraded) =
        run_dense(&norm, &dense_plan, &layout, config, &mut state)?;
    let relaxed_power = average_power(&state.beams, &dense_plan);

    // Round, repair the totals, and take the exact census.
    let eps = config.rounding_threshold;
    let mut final_rates = state.rates.clone();
    for row in &mut final_rates {
        for r in row.iter_mut() {
            if *r < eps {
                *r = 0.0;
            }
        }
        let total: f64 = row.iter().sum();
        if total < rho {
            // The validated threshold keeps B·ε ≤ ρ/2, so rounding cannot
            // have zeroed the whole row.
            let j = (0..b)
                .filter(|&i| row[i] > 0.0)
                .max_by(|&a, &c| row[a].total_cmp(&row[c]))
                .expect("some slot survives rounding");
            row[j] += rho - total;
        }
    }
    let census = l0_census(&targets, k, &final_rates, eps);
    for (kk, row) in census.iter().enumerate() {
        for (i, &count) in row.iter().enumerate() {
            if count > config.budget as usize {
                return Err(SparseError::BudgetViolation {
                    user: kk as u32 + 1,
                    slot: i,
                    count,
                    budget: config.budget,
                });
            }
        }
    }

    let slot_messages: Vec<Vec<usize>> = (0..b)
        .map(|i| (0..num_messages).filter(|&m| final_rates[m][i] > 0.0).collect())
        .collect();
    let induced_plan = DeliveryPlan {
        num_users: k,
        caching_factor: instance.caching_factor,
        message_targets: targets,
        slot_messages,
        rate_matrix: final_rates,
        blocklength_fractions: equal_fractions,
    };
    induced_plan
        .validate(rho)
        .expect("rounded plan preserves the per-message totals by construction");

    // Certification: a fresh fixed-rate solve of the rounded pattern.
    let solution = sca_solve(&induced_plan, channels, &inner)?;
    Ok(JointOutcome {
        solution,
        induced_plan,
        relaxed_power,
        census,
        dense_trace,
        smoothed_margin_trace,
    })
}
