//! The successive-convex-approximation loop for minimum-power multicast
//! beamforming.
//!
//! Each iteration solves a conic inner approximation of the power problem
//! around the current point and moves by `x ← x + μ(x̂ − x)`. Per user and
//! slot, one epigraph variable `u ≥ Σ_{ℐ∌k} |h_k^H w_ℐ|² + σ²` bounds the
//! interference-plus-noise once and is shared by all of that user's MAC
//! subsets; each subset's coupling `η·u ≤ Σ_{𝒯∈π} |h_k^H w_𝒯|²` is handled
//! by the difference-of-convex split
//!
//! ```text
//! ¼(η + u)² ≤ Σ_{𝒯∈π} |h_k^H w_𝒯|² + ¼(η − u)²
//! ```
//!
//! whose right side is linearized at the current point. Tangents of convex
//! functions lie below them, so the linearized constraint implies the
//! original one: every iterate stays feasible. With fixed rates η is the
//! constant `2^{rate_sum·n/n_i} − 1` and the subproblem is SOC-only; with
//! rate variables η joins the program through an exponential-cone row.

use crate::descriptors::{
    average_power, descriptors_for_rates, mac_margins, receive_gain, sinr,
};
use crate::init::{sdr_init, zero_forcing_init};
use crate::types::{
    BeamformingError, BeamformingSolution, ChannelRealization, EtaRecord, InitMode, SCAConfig,
    SlotBeams, TracePoint,
};
use convex_backend::{
    reformulate_log_rate, reformulate_quadratic, ConicProgram, LinearExpr, QuadTerm, SolveStatus,
    Tolerances,
};
use delivery_scheduler::DeliveryPlan;
use nalgebra::DVector;
use num_complex::Complex64;

/// `h^H w` as two affine rows over interleaved real variables starting at
/// `base`: `(Re, Im)` per antenna.
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

/// Interference-plus-noise of user `k` in a slot (unit noise assumed).
fn interference_plus_noise(
    norm: &ChannelRealization,
    plan: &DeliveryPlan,
    slot: usize,
    beams: &SlotBeams,
    k: u32,
) -> f64 {
    let mut v = 1.0;
    for (j, &m) in plan.slot_messages[slot].iter().enumerate() {
        if !plan.message_targets[m].contains(&k) {
            v += receive_gain(norm, k, &beams[j]).norm_sqr();
        }
    }
    v
}

struct DescCtx {
    /// Positions into the run-slot's active list.
    positions: Vec<usize>,
    /// Global message ids (for reporting).
    messages: Vec<usize>,
    /// Fixed-rate SINR threshold Γ (unused in joint mode).
    threshold: f64,
    /// η variable (joint mode only).
    eta_var: Option<usize>,
    /// Index into the run's `eta_hat` state (joint mode only).
    eta_state: Option<usize>,
}

struct UserCtx {
    user: u32,
    interferers: Vec<usize>,
    u_var: Option<usize>,
    /// Index into the run's `u_hat` state (when `u_var` exists).
    u_state: Option<usize>,
    descs: Vec<DescCtx>,
}

struct SlotCtx {
    slot: usize,
    fraction: f64,
    /// Global message ids with a beamforming variable in this run.
    active: Vec<usize>,
    /// First variable index of each active message's 2·N_T block.
    w_base: Vec<usize>,
    users: Vec<UserCtx>,
}

struct RunState {
    /// Current beams, full plan shape.
    beams: Vec<SlotBeams>,
    /// Current rate matrix `[message][slot]`.
    rates: Vec<Vec<f64>>,
    /// Current interference-epigraph values, indexed by `u_state`.
    u_hat: Vec<f64>,
    /// Current η values, indexed by `eta_state` (joint mode).
    eta_hat: Vec<f64>,
}

/// Solves the minimum-power beamforming problem for the plan on the given
/// channels.
///
/// # Errors
///
/// Configuration, initialization, and shape errors; a mid-run subproblem
/// failure instead degrades the result (see
/// [`BeamformingSolution::degraded`]).
pub fn sca_solve(
    plan: &DeliveryPlan,
    channels: &ChannelRealization,
    config: &SCAConfig,
) -> Result<BeamformingSolution, BeamformingError> {
    config.validate()?;
    let norm = channels.normalized();
    let n_t = norm.num_antennas();

    // Starting point.
    let init_beams: Vec<SlotBeams> = match &config.init {
        InitMode::ZeroForcing => match zero_forcing_init(plan, &norm, &plan.rate_matrix) {
            Ok(b) => b,
            Err(BeamformingError::InitializationFailure { .. }) => sdr_all_slots(plan, &norm, config)?,
            Err(e) => return Err(e),
        },
        InitMode::Sdr => sdr_all_slots(plan, &norm, config)?,
        InitMode::Provided(beams) => {
            if beams.len() != plan.num_slots()
                || beams
                    .iter()
                    .zip(&plan.slot_messages)
                    .any(|(b, m)| b.len() != m.len() || b.iter().any(|w| w.len() != n_t))
            {
                return Err(BeamformingError::DimensionMismatch {
                    reason: "provided beams do not match the plan shape".to_owned(),
                });
            }
            beams.clone()
        }
    };
    let (init_margin, init_violations) =
        mac_margins(plan, &plan.rate_matrix, &norm, &init_beams, config.feasibility_tol)?;
    if init_margin < -config.feasibility_tol {
        let slot = init_violations.first().map_or(0, |(d, _)| d.slot);
        return Err(BeamformingError::SlotInfeasible {
            slot,
            reason: format!("initial point violates decoding constraints by {init_margin:.3e}"),
        });
    }

    let mut state = RunState {
        beams: init_beams,
        rates: plan.rate_matrix.clone(),
        u_hat: Vec::new(),
        eta_hat: Vec::new(),
    };
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut degraded = false;

    let runs: Vec<Vec<usize>> = if config.optimize_rates || config.couple_slots {
        vec![(0..plan.num_slots()).collect()]
    } else {
        (0..plan.num_slots()).map(|i| vec![i]).collect()
    };
    for slots in runs {
        let (iters, run_degraded) =
            run_sca(plan, &norm, config, &slots, &mut state, &mut trace)?;
        iterations += iters;
        degraded |= run_degraded;
    }

    // Final report quantities from the raw vectors.
    let power = average_power(&state.beams, plan);
    let mut etas = Vec::new();
    for slot in 0..plan.num_slots() {
        for k in 1..=plan.num_users {
            for desc in descriptors_for_rates(plan, &state.rates, k, slot) {
                let value: f64 = desc
                    .messages
                    .iter()
                    .map(|&m| sinr(&norm, plan, slot, &state.beams[slot], k, m))
                    .sum::<Result<f64, _>>()?;
                etas.push(EtaRecord {
                    user: k,
                    slot,
                    messages: desc.messages,
                    value,
                });
            }
        }
    }
    Ok(BeamformingSolution {
        beams: state.beams,
        rates: state.rates,
        etas,
        power,
        iterations,
        degraded,
        trace,
    })
}

fn sdr_all_slots(
    plan: &DeliveryPlan,
    norm: &ChannelRealization,
    config: &SCAConfig,
) -> Result<Vec<SlotBeams>, BeamformingError> {
    (0..plan.num_slots())
        .map(|slot| {
            let seed = config
                .init_seed
                .wrapping_add((slot as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            sdr_init(
                plan,
                norm,
                &plan.rate_matrix,
                slot,
                config.randomization_count,
                seed,
            )
            .map(|out| out.beams)
        })
        .collect()
}

/// One SCA run over a slot subset. Mutates `state` in place; appends trace
/// points; returns (solves performed, degraded flag).
fn run_sca(
    plan: &DeliveryPlan,
    norm: &ChannelRealization,
    config: &SCAConfig,
    slots: &[usize],
    state: &mut RunState,
    trace: &mut Vec<TracePoint>,
) -> Result<(usize, bool), BeamformingError> {
    let n_t = norm.num_antennas();
    let joint = config.optimize_rates;
    let slot_tag = if slots.len() == 1 { Some(slots[0]) } else { None };

    // --- Variable layout ----------------------------------------------
    let mut num_vars = 1; // p = 0
    let p_var = 0;
    let mut ctxs: Vec<SlotCtx> = Vec::with_capacity(slots.len());
    let mut rate_vars: Vec<Vec<Option<usize>>> =
        vec![vec![None; plan.num_slots()]; plan.num_messages()];
    state.u_hat.clear();
    state.eta_hat.clear();
    for &slot in slots {
        let members = &plan.slot_messages[slot];
        let active: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&m| {
                if joint {
                    true
                } else {
                    state.rates[m][slot] > 0.0
                }
            })
            .collect();
        let mut w_base = Vec::with_capacity(active.len());
        for _ in &active {
            w_base.push(num_vars);
            num_vars += 2 * n_t;
        }
        if joint {
            for &m in &active {
                rate_vars[m][slot] = Some(num_vars);
                num_vars += 1;
            }
        }
        let mut users = Vec::new();
        for k in 1..=plan.num_users {
            let decode_pos: Vec<usize> = active
                .iter()
                .enumerate()
                .filter(|&(_, &m)| plan.message_targets[m].contains(&k))
                .map(|(j, _)| j)
                .collect();
            if decode_pos.is_empty() {
                continue;
            }
            let interferers: Vec<usize> = active
                .iter()
                .enumerate()
                .filter(|&(_, &m)| !plan.message_targets[m].contains(&k))
                .map(|(j, _)| j)
                .collect();
            let (u_var, u_state) = if interferers.is_empty() {
                (None, None)
            } else {
                let v = num_vars;
                num_vars += 1;
                state
                    .u_hat
                    .push(interference_plus_noise(norm, plan, slot, &state.beams[slot], k));
                (Some(v), Some(state.u_hat.len() - 1))
            };
            let mut descs = Vec::new();
            for mask in 1u64..(1 << decode_pos.len()) {
                let positions: Vec<usize> = decode_pos
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &j)| j)
                    .collect();
                let messages: Vec<usize> = positions.iter().map(|&j| active[j]).collect();
                let rate_sum: f64 = messages.iter().map(|&m| state.rates[m][slot]).sum();
                let threshold =
                    (rate_sum / plan.blocklength_fractions[slot]).exp2() - 1.0;
                let (eta_var, eta_state) = if joint {
                    let v = num_vars;
                    num_vars += 1;
                    // Feasible η for the current point: the achieved sum.
                    let achieved: f64 = messages
                        .iter()
                        .map(|&m| sinr(norm, plan, slot, &state.beams[slot], k, m))
                        .sum::<Result<f64, _>>()?;
                    state.eta_hat.push(achieved);
                    (Some(v), Some(state.eta_hat.len() - 1))
                } else {
                    if rate_sum == 0.0 {
                        continue; // inactive subset in fixed mode
                    }
                    (None, None)
                };
                descs.push(DescCtx {
                    positions,
                    messages,
                    threshold,
                    eta_var,
                    eta_state,
                });
            }
            users.push(UserCtx {
                user: k,
                interferers,
                u_var,
                u_state,
                descs,
            });
        }
        ctxs.push(SlotCtx {
            slot,
            fraction: plan.blocklength_fractions[slot],
            active,
            w_base,
            users,
        });
    }

    let run_power = |beams: &[SlotBeams]| -> f64 {
        ctxs.iter()
            .map(|c| {
                c.fraction * beams[c.slot].iter().map(DVector::norm_squared).sum::<f64>()
            })
            .sum()
    };
    let mut objective = run_power(&state.beams);
    let (margin0, _) = mac_margins(plan, &state.rates, norm, &state.beams, f64::INFINITY)?;
    trace.push(TracePoint {
        slot: slot_tag,
        iteration: 0,
        objective,
        worst_margin: margin0,
    });

    if ctxs.iter().all(|c| c.users.iter().all(|u| u.descs.is_empty())) {
        return Ok((0, false)); // nothing to serve
    }

    // --- Iterations -----------------------------------------------------
    let tols = Tolerances::default();
    let mut solves = 0;
    let mut consecutive = 0;
    let mut degraded = false;
    for iteration in 1..=config.max_iterations {
        let mut prog = ConicProgram::new(num_vars);
        prog.set_objective_term(p_var, 1.0);

        // Weighted power epigraph over every beam variable.
        let mut power_terms = Vec::new();
        for c in &ctxs {
            for &base in &c.w_base {
                for v in base..base + 2 * n_t {
                    power_terms.push(QuadTerm {
                        weight: c.fraction,
                        expr: LinearExpr::variable(v),
                    });
                }
            }
        }
        let (cone, rows) = reformulate_quadratic(&power_terms, &LinearExpr::variable(p_var))?;
        prog.add_block(cone, rows)?;

        for c in &ctxs {
            for uc in &c.users {
                // Shared interference epigraph u ≥ Σ|h^H w_ℐ|² + σ².
                if let Some(u_var) = uc.u_var {
                    let h = norm.channel(uc.user);
                    let mut terms = Vec::new();
                    for &j in &uc.interferers {
                        let (re, im) = gain_rows(h, c.w_base[j]);
                        terms.push(QuadTerm { weight: 1.0, expr: re });
                        terms.push(QuadTerm { weight: 1.0, expr: im });
                    }
                    let bound = LinearExpr::variable(u_var) + LinearExpr::constant(-1.0);
                    let (cone, rows) = reformulate_quadratic(&terms, &bound)?;
                    prog.add_block(cone, rows)?;
                }

                let u_hat = uc.u_state.map_or(1.0, |s| state.u_hat[s]);
                for d in &uc.descs {
                    // Linearized signal side Σ 2Re{ĉ*(h^H w)} − |ĉ|².
                    let h = norm.channel(uc.user);
                    let mut signal = LinearExpr::constant(0.0);
                    for &j in &d.positions {
                        let c_hat = receive_gain(norm, uc.user, &state.beams[c.slot][j]);
                        let (re, im) = gain_rows(h, c.w_base[j]);
                        signal = signal
                            + re.scaled(2.0 * c_hat.re)
                            + im.scaled(2.0 * c_hat.im)
                            + LinearExpr::constant(-c_hat.norm_sqr());
                    }
                    let eta_hat = d.eta_state.map_or(d.threshold, |s| state.eta_hat[s]);
                    let diff = eta_hat - u_hat;
                    // η − u as an expression (η and/or u may be constants).
                    let eta_expr = d.eta_var.map_or_else(
                        || LinearExpr::constant(d.threshold),
                        LinearExpr::variable,
                    );
                    let u_expr = uc
                        .u_var
                        .map_or_else(|| LinearExpr::constant(1.0), LinearExpr::variable);
                    let bound = signal
                        + LinearExpr::constant(-0.25 * diff * diff)
                        + (eta_expr.clone() - u_expr.clone()).scaled(0.5 * diff);
                    let sum_expr = eta_expr.clone() + u_expr;
                    if d.eta_var.is_none() && uc.u_var.is_none() {
                        // Fully constant left side: ¼(Γ+1)² ≤ bound + ... with
                        // the algebra collapsing to Γ ≤ signal.
                        prog.add_nonneg(
                            bound + LinearExpr::constant(-0.25 * (d.threshold + 1.0).powi(2)),
                        )?;
                    } else {
                        let terms = [QuadTerm {
                            weight: 0.25,
                            expr: sum_expr,
                        }];
                        let (cone, rows) = reformulate_quadratic(&terms, &bound)?;
                        prog.add_block(cone, rows)?;
                    }
                    if joint {
                        // MAC rate row through the exponential cone.
                        let mut rate_sum = LinearExpr::constant(0.0);
                        for &m in &d.messages {
                            rate_sum = rate_sum
                                + LinearExpr::variable(rate_vars[m][c.slot].unwrap());
                        }
                        let (cone, rows) =
                            reformulate_log_rate(&rate_sum, &eta_expr, c.fraction)?;
                        prog.add_block(cone, rows)?;
                        prog.add_nonneg(eta_expr)?;
                    }
                }
            }
        }

        if joint {
            // Rates nonnegative; per-message totals meet the plan's totals.
            for (m, row) in rate_vars.iter().enumerate() {
                let mut total = LinearExpr::constant(0.0);
                let mut any = false;
                for &v in row.iter().flatten() {
                    prog.add_nonneg(LinearExpr::variable(v))?;
                    total = total + LinearExpr::variable(v);
                    any = true;
                }
                let requirement: f64 = plan.rate_matrix[m].iter().sum();
                if any {
                    prog.add_nonneg(total + LinearExpr::constant(-requirement))?;
                } else if requirement > 0.0 {
                    return Err(BeamformingError::DimensionMismatch {
                        reason: format!("message {m} has rate to serve but no slots in this run"),
                    });
                }
            }
        }

        let report = prog.solve(&tols)?;
        solves += 1;
        // The solver status is advisory: the acceptance gate below checks
        // the original constraints and the objective directly, which also
        // salvages almost-converged points from shaky subproblem solves.
        if !report.x.iter().all(|v| v.is_finite()) {
            degraded = true;
            break;
        }

        // Candidate extraction and the μ-step with feasibility backtracking.
        let mut mu = config.step_size;
        let mut accepted = false;
        while mu >= 1e-9 {
            let mut cand_beams = state.beams.clone();
            for c in &ctxs {
                for (j, &m) in c.active.iter().enumerate() {
                    let pos = plan.slot_messages[c.slot]
                        .iter()
                        .position(|&x| x == m)
                        .expect("active message is scheduled");
                    let base = c.w_base[j];
                    let new = DVector::from_iterator(
                        n_t,
                        (0..n_t).map(|a| {
                            Complex64::new(report.x[base + 2 * a], report.x[base + 2 * a + 1])
                        }),
                    );
                    let old = &state.beams[c.slot][pos];
                    cand_beams[c.slot][pos] = old + (new - old) * Complex64::new(mu, 0.0);
                }
            }
            let mut cand_rates = state.rates.clone();
            if joint {
                for c in &ctxs {
                    for &m in &c.active {
                        let v = rate_vars[m][c.slot].unwrap();
                        let old = state.rates[m][c.slot];
                        cand_rates[m][c.slot] = old + mu * (report.x[v] - old);
                    }
                }
            }
            let (margin, _) =
                mac_margins(plan, &cand_rates, norm, &cand_beams, f64::INFINITY)?;
            let descends =
                run_power(&cand_beams) <= objective * (1.0 + 1e-9) + 1e-12;
            if margin >= -config.feasibility_tol && descends {
                // Commit; auxiliaries follow the same μ rule.
                for c in &ctxs {
                    for uc in &c.users {
                        if let (Some(u_var), Some(s)) = (uc.u_var, uc.u_state) {
                            state.u_hat[s] += mu * (report.x[u_var] - state.u_hat[s]);
                        }
                        for d in &uc.descs {
                            if let (Some(e_var), Some(s)) = (d.eta_var, d.eta_state) {
                                state.eta_hat[s] += mu * (report.x[e_var] - state.eta_hat[s]);
                            }
                        }
                    }
                }
                state.beams = cand_beams;
                state.rates = cand_rates;
                trace.push(TracePoint {
                    slot: slot_tag,
                    iteration,
                    objective: run_power(&state.beams),
                    worst_margin: margin,
                });
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

        let new_objective = run_power(&state.beams);
        let rel = (objective - new_objective).abs() / objective.abs().max(1e-12);
        objective = new_objective;
        if rel < config.stop_rel_change {
            consecutive += 1;
            if consecutive >= config.stop_window {
                break;
            }
        } else {
            consecutive = 0;
        }
    }
    Ok((solves, degraded))
}
