//! Feasible starting points for the SCA loop: zero-forcing with closed-form
//! scaling, and per-slot semidefinite relaxation with Gaussian
//! randomization.

use crate::descriptors::{descriptors_for_rates, receive_gain};
use crate::types::{BeamformingError, ChannelRealization, SlotBeams};
use convex_backend::{solve_sdp, SdpConstraint, SdpProblem};
use delivery_scheduler::DeliveryPlan;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The full-set SINR threshold of user `k` in a slot: satisfying every
/// individual message at this level satisfies all MAC subsets, because
/// subset rate sums only shrink while SINR sums only grow.
fn full_set_threshold(
    plan: &DeliveryPlan,
    rates: &[Vec<f64>],
    k: u32,
    slot: usize,
) -> f64 {
    let rate_sum: f64 = plan.slot_messages[slot]
        .iter()
        .filter(|&&m| plan.message_targets[m].contains(&k))
        .map(|&m| rates[m][slot])
        .sum();
    (rate_sum / plan.blocklength_fractions[slot]).exp2() - 1.0
}

/// Orthogonal projector onto the complement of the rows of `blockers`
/// (each row a channel vector), i.e. `I − B^H (B B^H)^{-1} B`.
fn complement_projector(
    blockers: &[&DVector<Complex64>],
    n_t: usize,
) -> Result<DMatrix<Complex64>, BeamformingError> {
    let eye = DMatrix::<Complex64>::identity(n_t, n_t);
    if blockers.is_empty() {
        return Ok(eye);
    }
    let b = DMatrix::from_fn(blockers.len(), n_t, |r, c| blockers[r][c].conj());
    let gram = &b * b.adjoint();
    let chol = gram
        .cholesky()
        .ok_or_else(|| BeamformingError::InitializationFailure {
            reason: "blocking channels are linearly dependent".to_owned(),
        })?;
    Ok(eye - b.adjoint() * chol.inverse() * b)
}

/// Zero-forcing initializer. Every beamformer is nulled at all co-slot
/// users outside its target set, so interference vanishes, the MAC
/// constraints decouple, and the per-message power scaling is closed-form.
///
/// `rates` is a `[message][slot]` matrix (normally the plan's own).
///
/// # Errors
///
/// [`BeamformingError::InitializationFailure`] when the antenna count or
/// channel geometry leaves no usable null-space direction (caller should
/// fall back to SDR); [`BeamformingError::DimensionMismatch`] on shape
/// disagreements.
pub fn zero_forcing_init(
    plan: &DeliveryPlan,
    channels: &ChannelRealization,
    rates: &[Vec<f64>],
) -> Result<Vec<SlotBeams>, BeamformingError> {
    check_shapes(plan, channels, rates)?;
    let norm = channels.normalized();
    let n_t = norm.num_antennas();
    let mut beams = Vec::with_capacity(plan.num_slots());
    for slot in 0..plan.num_slots() {
        let members = &plan.slot_messages[slot];
        let active: Vec<bool> = members.iter().map(|&m| rates[m][slot] > 0.0).collect();
        let served: Vec<u32> = (1..=plan.num_users)
            .filter(|&k| {
                members
                    .iter()
                    .zip(&active)
                    .any(|(&m, &on)| on && plan.message_targets[m].contains(&k))
            })
            .collect();
        let mut slot_beams: SlotBeams = Vec::with_capacity(members.len());
        for (j, &m) in members.iter().enumerate() {
            if !active[j] {
                slot_beams.push(DVector::zeros(n_t));
                continue;
            }
            let targets = &plan.message_targets[m];
            let blockers: Vec<&DVector<Complex64>> = served
                .iter()
                .filter(|k| !targets.contains(k))
                .map(|&k| norm.channel(k))
                .collect();
            let proj = complement_projector(&blockers, n_t)?;
            // Aim along the projected sum of unit target channels.
            let mut aim = DVector::<Complex64>::zeros(n_t);
            for &k in targets {
                let h = norm.channel(k);
                aim += h / Complex64::new(h.norm(), 0.0);
            }
            let dir = &proj * aim;
            if dir.norm() < 1e-9 {
                return Err(BeamformingError::InitializationFailure {
                    reason: format!("null-space direction vanished for message {m} in slot {slot}"),
                });
            }
            let dir = &dir / Complex64::new(dir.norm(), 0.0);
            // Power: meet each target's full-set threshold on this message.
            let mut power = 0.0f64;
            for &k in targets {
                let gain = receive_gain(&norm, k, &dir).norm_sqr();
                let gamma = full_set_threshold(plan, rates, k, slot);
                if gamma == 0.0 {
                    continue;
                }
                if gain < 1e-12 * norm.channel(k).norm_squared() {
                    return Err(BeamformingError::InitializationFailure {
                        reason: format!(
                            "projected direction nearly orthogonal to user {k} in slot {slot}"
                        ),
                    });
                }
                power = power.max(gamma / gain);
            }
            slot_beams.push(dir * Complex64::new(power.sqrt(), 0.0));
        }
        beams.push(slot_beams);
    }
    Ok(beams)
}

/// Result of the per-slot SDR initializer.
#[derive(Debug, Clone)]
pub struct SdrOutcome {
    /// Feasible beamformers for the slot, aligned with
    /// `plan.slot_messages[slot]`.
    pub beams: SlotBeams,
    /// Optimal value of the semidefinite relaxation (a lower bound on the
    /// true slot power up to solver tolerance).
    pub relaxation_value: f64,
    /// Certified bound from the relaxation's dual certificate; rigorous
    /// lower bound on any feasible slot power.
    pub certified_lower_bound: f64,
    /// True when every relaxation matrix was numerically rank-1 and the
    /// principal components were extracted directly.
    pub rank_one: bool,
}

/// Semidefinite-relaxation initializer for one slot: solve the lifted
/// problem without rank constraints, then either extract rank-1 solutions
/// or run Gaussian randomization with closed-form feasibility rescaling.
///
/// # Errors
///
/// [`BeamformingError::SlotInfeasible`] when the relaxation itself cannot
/// be solved; [`BeamformingError::InitializationFailure`] when no feasible
/// candidate emerges within the randomization budget.
pub fn sdr_init(
    plan: &DeliveryPlan,
    channels: &ChannelRealization,
    rates: &[Vec<f64>],
    slot: usize,
    randomization_count: usize,
    seed: u64,
) -> Result<SdrOutcome, BeamformingError> {
    check_shapes(plan, channels, rates)?;
    let norm = channels.normalized();
    let n_t = norm.num_antennas();
    let members = &plan.slot_messages[slot];
    let active: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&m| rates[m][slot] > 0.0)
        .collect();
    if active.is_empty() {
        return Ok(SdrOutcome {
            beams: members.iter().map(|_| DVector::zeros(n_t)).collect(),
            relaxation_value: 0.0,
            certified_lower_bound: 0.0,
            rank_one: true,
        });
    }

    // Lifted constraints: Σ_{𝒯∈π} tr(H_k W_𝒯) − Γ·Σ_{ℐ∉𝒮_k} tr(H_k W_ℐ) ≥ Γσ².
    let outer = |k: u32| -> DMatrix<Complex64> {
        let h = norm.channel(k);
        DMatrix::from_fn(n_t, n_t, |i, j| h[i] * h[j].conj())
    };
    let mut constraints = Vec::new();
    for k in 1..=plan.num_users {
        for desc in descriptors_for_rates(plan, rates, k, slot) {
            let hk = outer(k);
            let mut mats = vec![DMatrix::<Complex64>::zeros(n_t, n_t); active.len()];
            for (j, &m) in active.iter().enumerate() {
                if desc.messages.contains(&m) {
                    mats[j] = hk.clone();
                } else if !plan.message_targets[m].contains(&k) {
                    mats[j] = &hk * Complex64::new(-desc.sinr_threshold, 0.0);
                }
                // Co-targeted messages outside π contribute nothing.
            }
            constraints.push(SdpConstraint {
                mats,
                rhs: desc.sinr_threshold,
            });
        }
    }
    let problem = SdpProblem {
        dims: vec![n_t; active.len()],
        objective: vec![DMatrix::identity(n_t, n_t); active.len()],
        constraints,
    };

    let start = strictly_feasible_start(&problem, plan, &norm, rates, slot, &active, n_t)?;
    let report = solve_sdp(&problem, &start, 1e-9).map_err(|e| BeamformingError::SlotInfeasible {
        slot,
        reason: e.to_string(),
    })?;

    // Principal components, and the rank-1 test.
    let mut principal: Vec<DVector<Complex64>> = Vec::with_capacity(active.len());
    let mut decompositions = Vec::with_capacity(active.len());
    let mut rank_one = true;
    for w in &report.matrices {
        let eig = w.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let top = eig.eigenvalues[order[0]].max(0.0);
        let second = if order.len() > 1 {
            eig.eigenvalues[order[1]].max(0.0)
        } else {
            0.0
        };
        if top > 0.0 && second / top > 1e-6 {
            rank_one = false;
        }
        principal.push(
            eig.eigenvectors.column(order[0]).into_owned() * Complex64::new(top.sqrt(), 0.0),
        );
        decompositions.push(eig);
    }

    let descriptors: Vec<_> = (1..=plan.num_users)
        .flat_map(|k| descriptors_for_rates(plan, rates, k, slot))
        .collect();
    let evaluate = |candidate: &[DVector<Complex64>]| -> Option<f64> {
        // Minimal common scaling β² making every descriptor hold: with all
        // beams scaled by β, Σγ = β²S/(β²I+σ²), so β²(S − ΓI) ≥ Γσ².
        let mut beta_sq = 0.0f64;
        for desc in &descriptors {
            let k = desc.user;
            let signal: f64 = desc
                .messages
                .iter()
                .map(|m| {
                    let j = active.iter().position(|a| a == m).unwrap();
                    receive_gain(&norm, k, &candidate[j]).norm_sqr()
                })
                .sum();
            let interference: f64 = active
                .iter()
                .enumerate()
                .filter(|&(_, &m)| !plan.message_targets[m].contains(&k))
                .map(|(j, _)| receive_gain(&norm, k, &candidate[j]).norm_sqr())
                .sum();
            let headroom = signal - desc.sinr_threshold * interference;
            if desc.sinr_threshold > 0.0 && headroom <= 0.0 {
                return None;
            }
            if desc.sinr_threshold > 0.0 {
                beta_sq = beta_sq.max(desc.sinr_threshold / headroom);
            }
        }
        Some(beta_sq)
    };

    let mut best: Option<(f64, Vec<DVector<Complex64>>)> = None;
    let mut consider = |candidate: Vec<DVector<Complex64>>| {
        if let Some(beta_sq) = evaluate(&candidate) {
            let scale = Complex64::new(beta_sq.sqrt(), 0.0);
            let scaled: Vec<_> = candidate.iter().map(|w| w * scale).collect();
            let power: f64 = scaled.iter().map(DVector::norm_squared).sum();
            if best.as_ref().map_or(true, |(p, _)| power < *p) {
                best = Some((power, scaled));
            }
        }
    };
    consider(principal);

    if !rank_one {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..randomization_count {
            let candidate: Vec<DVector<Complex64>> = decompositions
                .iter()
                .map(|eig| {
                    // w = U·(√λ ⊙ g) with g ~ CN(0, I) has E[w w^H] = W.
                    let g = DVector::from_iterator(
                        n_t,
                        (0..n_t).map(|_| {
                            Complex64::new(
                                rng.sample::<f64, _>(StandardNormal),
                                rng.sample::<f64, _>(StandardNormal),
                            ) / Complex64::new(2.0f64.sqrt(), 0.0)
                        }),
                    );
                    let scaled = DVector::from_iterator(
                        n_t,
                        g.iter()
                            .zip(eig.eigenvalues.iter())
                            .map(|(gi, &l)| gi * Complex64::new(l.max(0.0).sqrt(), 0.0)),
                    );
                    &eig.eigenvectors * scaled
                })
                .collect();
            consider(candidate);
        }
    }

    let Some((_, chosen)) = best else {
        return Err(BeamformingError::InitializationFailure {
            reason: format!(
                "no feasible randomized candidate for slot {slot} within {randomization_count} draws"
            ),
        });
    };
    // Map back to full slot alignment.
    let mut beams: SlotBeams = members.iter().map(|_| DVector::zeros(n_t)).collect();
    for (j, &m) in active.iter().enumerate() {
        let pos = members.iter().position(|&x| x == m).unwrap();
        beams[pos] = chosen[j].clone();
    }
    Ok(SdrOutcome {
        beams,
        relaxation_value: report.objective,
        certified_lower_bound: report.lower_bound,
        rank_one,
    })
}

/// A strictly feasible barrier start: scaled identity when every descriptor
/// has positive identity-direction slope, otherwise an inflated
/// zero-forcing point plus a small identity ridge.
#[allow(clippy::too_many_arguments)]
fn strictly_feasible_start(
    problem: &SdpProblem,
    plan: &DeliveryPlan,
    norm: &ChannelRealization,
    rates: &[Vec<f64>],
    slot: usize,
    active: &[usize],
    n_t: usize,
) -> Result<Vec<DMatrix<Complex64>>, BeamformingError> {
    let slack_floor = |mats: &[DMatrix<Complex64>]| -> f64 {
        problem
            .constraints
            .iter()
            .map(|con| {
                let v: f64 = con
                    .mats
                    .iter()
                    .zip(mats)
                    .map(|(a, x)| (a * x).trace().re)
                    .sum();
                v - con.rhs
            })
            .fold(f64::INFINITY, f64::min)
    };

    // Identity direction: works whenever no descriptor's interference side
    // outweighs its signal side at equal powers.
    let mut rho_needed = 0.0f64;
    let mut identity_ok = true;
    for con in &problem.constraints {
        let slope: f64 = con.mats.iter().map(|a| a.trace().re).sum();
        if slope <= 0.0 {
            identity_ok = false;
            break;
        }
        rho_needed = rho_needed.max((con.rhs + 1.0) / slope);
    }
    if identity_ok {
        let start =
            vec![DMatrix::<Complex64>::identity(n_t, n_t) * Complex64::new(rho_needed.max(1.0), 0.0); active.len()];
        if slack_floor(&start) > 0.0 {
            return Ok(start);
        }
    }

    // Zero-forcing point, inflated for strictness, plus a ridge.
    let zf = zero_forcing_init(plan, norm, rates)?;
    let members = &plan.slot_messages[slot];
    for inflate in [1.01, 1.1, 2.0, 10.0] {
        let mean_power: f64 = zf[slot].iter().map(DVector::norm_squared).sum::<f64>()
            / active.len() as f64;
        let ridge = (1e-8 * (1.0 + mean_power)).max(1e-10);
        let start: Vec<DMatrix<Complex64>> = active
            .iter()
            .map(|&m| {
                let pos = members.iter().position(|&x| x == m).unwrap();
                let w = &zf[slot][pos] * Complex64::new(inflate, 0.0);
                let mut x = DMatrix::<Complex64>::identity(n_t, n_t) * Complex64::new(ridge, 0.0);
                for i in 0..n_t {
                    for j in 0..n_t {
                        x[(i, j)] += w[i] * w[j].conj();
                    }
                }
                x
            })
            .collect();
        if slack_floor(&start) > 0.0 {
            return Ok(start);
        }
    }
    Err(BeamformingError::InitializationFailure {
        reason: format!("no strictly feasible relaxation start for slot {slot}"),
    })
}

fn check_shapes(
    plan: &DeliveryPlan,
    channels: &ChannelRealization,
    rates: &[Vec<f64>],
) -> Result<(), BeamformingError> {
    if channels.num_users() != plan.num_users as usize {
        return Err(BeamformingError::DimensionMismatch {
            reason: format!(
                "plan has {} users, channels have {}",
                plan.num_users,
                channels.num_users()
            ),
        });
    }
    if rates.len() != plan.num_messages()
        || rates.iter().any(|row| row.len() != plan.num_slots())
    {
        return Err(BeamformingError::DimensionMismatch {
            reason: "rate matrix shape does not match plan".to_owned(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::mac_margins;
    use caching_core::ProblemInstance;
    use delivery_scheduler::{greedy_schedule, ScheduleConfig};

    fn seeded_channels(k: usize, n_t: usize, seed: u64) -> ChannelRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels: Vec<Vec<Complex64>> = (0..k)
            .map(|_| {
                (0..n_t)
                    .map(|_| {
                        Complex64::new(
                            rng.sample::<f64, _>(StandardNormal),
                            rng.sample::<f64, _>(StandardNormal),
                        ) / Complex64::new(2.0f64.sqrt(), 0.0)
                    })
                    .collect()
            })
            .collect();
        ChannelRealization::new(channels, vec![1.0; k]).unwrap()
    }

    #[test]
    fn single_user_message_reduces_to_matched_filter() {
        // K=2, t=1 gives one message to both users; instead craft K=2 with
        // two single-user messages via s=1 at K=2... not expressible, so
        // check the closed form on the K=2 pair message with one antenna
        // direction: with a single message there is no interference and the
        // max-threshold target pins the power.
        let instance = ProblemInstance::with_uniform_noise(2, 2, 1, 2.0, 4, 0.5).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
        assert_eq!(plan.num_messages(), 1);
        // Make user 2's channel a scaled copy of user 1's so the projected
        // direction is exactly the common matched filter.
        let base = seeded_channels(1, 4, 7);
        let h1: Vec<Complex64> = base.channel(1).iter().copied().collect();
        let h2: Vec<Complex64> = h1.iter().map(|c| c * Complex64::new(2.0, 0.0)).collect();
        let ch = ChannelRealization::new(vec![h1, h2], vec![0.5, 0.5]).unwrap();

        let beams = zero_forcing_init(&plan, &ch, &plan.rate_matrix).unwrap();
        // User 1 is the bottleneck (weaker channel): P = (2^ρ − 1)σ²/‖h₁‖².
        let rho = instance.per_message_rate(); // single slot, n_i/n = 1
        let expected = (rho.exp2() - 1.0) * 0.5 / ch.channel(1).norm_squared();
        let got: f64 = beams[0][0].norm_squared();
        assert!(
            (got - expected).abs() < 1e-9 * expected,
            "got {got}, expected {expected}"
        );

        let (worst, _) = mac_margins(&plan, &plan.rate_matrix, &ch, &beams, 1e-9).unwrap();
        assert!(worst >= -1e-9, "worst margin {worst}");
    }

    #[test]
    fn disjoint_messages_with_orthogonal_channels_are_matched_filters() {
        // K=4, t=1, s=1 → slots of disjoint pair messages. Orthogonal
        // channels let the projector keep each matched filter untouched.
        let instance = ProblemInstance::with_uniform_noise(4, 4, 1, 4.0, 4, 1.0).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); 4]; 4];
        for (k, row) in rows.iter_mut().enumerate() {
            row[k] = Complex64::new(1.5, 0.0);
        }
        let ch = ChannelRealization::new(rows, vec![1.0; 4]).unwrap();
        let beams = zero_forcing_init(&plan, &ch, &plan.rate_matrix).unwrap();
        let (worst, _) = mac_margins(&plan, &plan.rate_matrix, &ch, &beams, 1e-9).unwrap();
        assert!(worst >= -1e-9);
        // Each beam lives on its targets' coordinates only: zero-forcing
        // against the co-slot pair removes their components entirely.
        for (slot, msgs) in plan.slot_messages.iter().enumerate() {
            for (j, &m) in msgs.iter().enumerate() {
                let w = &beams[slot][j];
                for k in 1..=4u32 {
                    let on_target = plan.message_targets[m].contains(&k);
                    let component = w[(k - 1) as usize].norm();
                    if on_target {
                        assert!(component > 1e-9);
                    } else {
                        assert!(component < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_forcing_feasible_on_random_channels() {
        // K=3, t=1, N_T=3: N_T ≥ K−t holds with equality margin 1.
        let instance = ProblemInstance::with_uniform_noise(3, 3, 1, 3.0, 3, 1.0).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(2)).unwrap();
        for seed in 0..20 {
            let ch = seeded_channels(3, 3, seed);
            let beams = zero_forcing_init(&plan, &ch, &plan.rate_matrix).unwrap();
            let (worst, _) = mac_margins(&plan, &plan.rate_matrix, &ch, &beams, 1e-9).unwrap();
            assert!(worst >= -1e-9, "seed {seed}: margin {worst}");
        }
    }

    #[test]
    fn rank_deficiency_reported() {
        // Two users in one slot, a single antenna: blocking the other user
        // leaves a zero null space.
        let instance = ProblemInstance::with_uniform_noise(4, 4, 1, 4.0, 1, 1.0).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
        let ch = seeded_channels(4, 1, 3);
        let err = zero_forcing_init(&plan, &ch, &plan.rate_matrix).unwrap_err();
        assert!(matches!(
            err,
            BeamformingError::InitializationFailure { .. }
        ));
    }

    #[test]
    fn sdr_single_user_is_tight() {
        // One pair message at K=2 with colinear channels acts like a single
        // bottleneck user; the relaxation is rank-1 and matches the
        // matched-filter closed form.
        let instance = ProblemInstance::with_uniform_noise(2, 2, 1, 2.0, 4, 0.25).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
        let base = seeded_channels(1, 4, 11);
        let h1: Vec<Complex64> = base.channel(1).iter().copied().collect();
        let h2: Vec<Complex64> = h1.iter().map(|c| c * Complex64::new(3.0, 0.0)).collect();
        let ch = ChannelRealization::new(vec![h1, h2], vec![0.25, 0.25]).unwrap();

        let out = sdr_init(&plan, &ch, &plan.rate_matrix, 0, 200, 99).unwrap();
        assert!(out.rank_one);
        let rho = instance.per_message_rate();
        let expected = (rho.exp2() - 1.0) * 0.25 / ch.channel(1).norm_squared();
        let got: f64 = out.beams[0].norm_squared();
        assert!(
            (got - expected).abs() < 1e-5 * expected,
            "got {got}, expected {expected}"
        );
        assert!(out.certified_lower_bound <= got * (1.0 + 1e-9));
    }

    #[test]
    fn sdr_multicast_respects_relaxation_bound() {
        // K=3, t=1: three pair messages in the FS slot; random channels.
        let instance = ProblemInstance::with_uniform_noise(3, 3, 1, 3.0, 4, 1.0).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(2)).unwrap();
        assert_eq!(plan.num_slots(), 1);
        for seed in 0..5 {
            let ch = seeded_channels(3, 4, 100 + seed);
            let out = sdr_init(&plan, &ch, &plan.rate_matrix, 0, 300, seed).unwrap();
            let extracted: f64 = out.beams.iter().map(DVector::norm_squared).sum();
            assert!(
                extracted >= out.relaxation_value * (1.0 - 1e-6),
                "seed {seed}: extracted {extracted} below relaxation {}",
                out.relaxation_value
            );
            assert!(out.certified_lower_bound <= out.relaxation_value * (1.0 + 1e-9));
            let (worst, _) =
                mac_margins(&plan, &plan.rate_matrix, &ch, std::slice::from_ref(&out.beams), 1e-9)
                    .unwrap();
            assert!(worst >= -1e-7, "seed {seed}: margin {worst}");
        }
    }

    #[test]
    fn sdr_zero_rates_give_zero_power() {
        let instance = ProblemInstance::with_uniform_noise(2, 2, 1, 2.0, 4, 1.0).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
        let ch = seeded_channels(2, 4, 42);
        let zero_rates = vec![vec![0.0; plan.num_slots()]; plan.num_messages()];
        let out = sdr_init(&plan, &ch, &zero_rates, 0, 10, 0).unwrap();
        assert_eq!(out.relaxation_value, 0.0);
        assert!(out.beams.iter().all(|w| w.norm_squared() == 0.0));
    }
}
