//! SINR evaluation, MAC decoding constraints, feasibility checks, and the
//! power objective.
//!
//! In slot `i` user `k` jointly decodes every targeted message over a
//! multiple-access channel; successful decoding requires, for every
//! non-empty subset π of those messages,
//!
//! ```text
//! Σ_{𝒯∈π} R^𝒯(i) ≤ (n_i/n)·log2(1 + Σ_{𝒯∈π} γ_k^𝒯(i)),
//! ```
//!
//! where the SINR counts only non-targeted messages as interference.

use crate::types::{BeamformingError, BeamformingSolution, ChannelRealization, SlotBeams};
use delivery_scheduler::DeliveryPlan;
use nalgebra::DVector;
use num_complex::Complex64;

/// `h_k^H w` for 1-based user `k`.
pub(crate) fn receive_gain(
    channels: &ChannelRealization,
    k: u32,
    w: &DVector<Complex64>,
) -> Complex64 {
    channels.channel(k).dotc(w)
}

/// SINR of message `message` (global index) at user `k` in slot `slot`,
/// given that slot's beamformers.
///
/// Interference sums over the slot's other messages that do **not** target
/// `k`; co-targeted messages are decoded jointly, not treated as noise.
///
/// # Errors
///
/// [`BeamformingError::NotTargeted`] if the message does not target `k`,
/// [`BeamformingError::DimensionMismatch`] if the beam list does not match
/// the slot.
pub fn sinr(
    channels: &ChannelRealization,
    plan: &DeliveryPlan,
    slot: usize,
    slot_beams: &SlotBeams,
    k: u32,
    message: usize,
) -> Result<f64, BeamformingError> {
    let members = &plan.slot_messages[slot];
    if slot_beams.len() != members.len() {
        return Err(BeamformingError::DimensionMismatch {
            reason: format!(
                "slot {slot} carries {} messages but {} beams were supplied",
                members.len(),
                slot_beams.len()
            ),
        });
    }
    let pos = members
        .iter()
        .position(|&m| m == message)
        .ok_or(BeamformingError::NotTargeted { user: k, message })?;
    if !plan.message_targets[message].contains(&k) {
        return Err(BeamformingError::NotTargeted { user: k, message });
    }
    let signal = receive_gain(channels, k, &slot_beams[pos]).norm_sqr();
    let mut denom = channels.noise_var(k);
    for (j, &m) in members.iter().enumerate() {
        if !plan.message_targets[m].contains(&k) {
            denom += receive_gain(channels, k, &slot_beams[j]).norm_sqr();
        }
    }
    Ok(signal / denom)
}

/// One MAC decoding constraint: the subset π, its rate sum, and the SINR
/// sum it requires.
#[derive(Debug, Clone, PartialEq)]
pub struct MacDescriptor {
    /// User (1-based).
    pub user: u32,
    /// Slot index.
    pub slot: usize,
    /// Global message indices of π, ascending.
    pub messages: Vec<usize>,
    /// Σ_{𝒯∈π} R^𝒯(i) in bps/Hz.
    pub rate_sum: f64,
    /// Required Σ_{𝒯∈π} γ_k^𝒯(i), i.e. `2^{rate_sum·n/n_i} − 1`.
    pub sinr_threshold: f64,
}

/// Descriptor generation against an arbitrary rate matrix (the plan's, or a
/// solution's in joint-rate mode). Messages with zero rate in the slot are
/// inactive: their subsets add nothing to the rate sum and only slacken the
/// SINR side, so the constraints they would generate are implied.
pub(crate) fn descriptors_for_rates(
    plan: &DeliveryPlan,
    rates: &[Vec<f64>],
    user: u32,
    slot: usize,
) -> Vec<MacDescriptor> {
    let active: Vec<usize> = plan.slot_messages[slot]
        .iter()
        .copied()
        .filter(|&m| rates[m][slot] > 0.0 && plan.message_targets[m].contains(&user))
        .collect();
    let fraction = plan.blocklength_fractions[slot];
    let mut out = Vec::with_capacity((1usize << active.len()) - 1);
    for mask in 1u64..(1u64 << active.len()) {
        let messages: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|&(j, _)| mask & (1 << j) != 0)
            .map(|(_, &m)| m)
            .collect();
        let rate_sum: f64 = messages.iter().map(|&m| rates[m][slot]).sum();
        out.push(MacDescriptor {
            user,
            slot,
            messages,
            rate_sum,
            sinr_threshold: (rate_sum / fraction).exp2() - 1.0,
        });
    }
    out
}

/// All MAC decoding constraints of user `k` in slot `i` under the plan's
/// rates: one descriptor per non-empty subset of the active targeted
/// messages (`2^{c_k(i)} − 1` of them).
#[must_use]
pub fn mac_constraint_set(plan: &DeliveryPlan, k: u32, slot: usize) -> Vec<MacDescriptor> {
    descriptors_for_rates(plan, &plan.rate_matrix, k, slot)
}

/// Average transmit power `Σ_i (n_i/n) Σ_𝒯 ‖w_𝒯(i)‖²` in watts.
#[must_use]
pub fn average_power(beams: &[SlotBeams], plan: &DeliveryPlan) -> f64 {
    beams
        .iter()
        .zip(&plan.blocklength_fractions)
        .map(|(slot, &frac)| frac * slot.iter().map(DVector::norm_squared).sum::<f64>())
        .sum()
}

/// Watts to dBW.
#[must_use]
pub fn watts_to_dbw(p: f64) -> f64 {
    10.0 * p.log10()
}

/// Feasibility report for a solution against a plan and channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// Worst MAC margin `(n_i/n)·log2(1+Σγ) − Σ R` over all descriptors,
    /// in rate units; `+∞` when there are no descriptors.
    pub worst_mac_margin: f64,
    /// Worst per-message served-rate margin `Σ_i R^𝒯(i) − (plan total)`.
    pub worst_rate_margin: f64,
    /// Descriptors violated beyond the tolerance, with their margins.
    pub violations: Vec<(MacDescriptor, f64)>,
    /// True iff both worst margins are ≥ −tol.
    pub feasible: bool,
}

/// Worst MAC margin (rate units) and the descriptors violated beyond `tol`,
/// for an arbitrary rate matrix and full-slot beam lists.
pub(crate) fn mac_margins(
    plan: &DeliveryPlan,
    rates: &[Vec<f64>],
    channels: &ChannelRealization,
    beams: &[SlotBeams],
    tol: f64,
) -> Result<(f64, Vec<(MacDescriptor, f64)>), BeamformingError> {
    if beams.len() != plan.num_slots() {
        return Err(BeamformingError::DimensionMismatch {
            reason: format!(
                "plan has {} slots but {} beam lists were supplied",
                plan.num_slots(),
                beams.len()
            ),
        });
    }
    let mut worst = f64::INFINITY;
    let mut violations = Vec::new();
    for (slot, slot_beams) in beams.iter().enumerate() {
        let fraction = plan.blocklength_fractions[slot];
        for k in 1..=plan.num_users {
            for desc in descriptors_for_rates(plan, rates, k, slot) {
                let gamma_sum: f64 = desc
                    .messages
                    .iter()
                    .map(|&m| sinr(channels, plan, slot, slot_beams, k, m))
                    .sum::<Result<f64, _>>()?;
                let margin = fraction * (1.0 + gamma_sum).log2() - desc.rate_sum;
                worst = worst.min(margin);
                if margin < -tol {
                    violations.push((desc, margin));
                }
            }
        }
    }
    Ok((worst, violations))
}

/// Recomputes every decoding constraint of the solution from raw vectors.
///
/// # Errors
///
/// [`BeamformingError::DimensionMismatch`] when the solution shape does not
/// match the plan.
pub fn verify_feasibility(
    solution: &BeamformingSolution,
    plan: &DeliveryPlan,
    channels: &ChannelRealization,
    tol: f64,
) -> Result<FeasibilityReport, BeamformingError> {
    if solution.beams.len() != plan.num_slots() || solution.rates.len() != plan.num_messages() {
        return Err(BeamformingError::DimensionMismatch {
            reason: "solution shape does not match plan".to_owned(),
        });
    }
    let (worst_mac, violations) =
        mac_margins(plan, &solution.rates, channels, &solution.beams, tol)?;
    // Served totals must meet the plan's per-message totals.
    let mut worst_rate = f64::INFINITY;
    for m in 0..plan.num_messages() {
        let promised: f64 = plan.rate_matrix[m].iter().sum();
        let served: f64 = solution.rates[m].iter().sum();
        if promised > 0.0 {
            worst_rate = worst_rate.min(served - promised);
        }
    }
    let feasible = worst_mac >= -tol && worst_rate >= -tol;
    Ok(FeasibilityReport {
        worst_mac_margin: worst_mac,
        worst_rate_margin: worst_rate,
        violations,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use caching_core::ProblemInstance;
    use delivery_scheduler::{greedy_schedule, ScheduleConfig};

    fn unit_channels(k: usize, n_t: usize) -> ChannelRealization {
        // Deterministic, pairwise non-orthogonal channels.
        let channels: Vec<Vec<Complex64>> = (0..k)
            .map(|u| {
                (0..n_t)
                    .map(|a| {
                        let phase = 0.7 * (u as f64 + 1.0) * (a as f64 + 1.0);
                        Complex64::new(phase.cos(), phase.sin())
                    })
                    .collect()
            })
            .collect();
        ChannelRealization::new(channels, vec![1.0; k]).unwrap()
    }

    fn fs_plan(k: u32, t: u32, rate: f64) -> DeliveryPlan {
        let instance = ProblemInstance::with_uniform_noise(k, k, t, rate, 4, 1.0).unwrap();
        let s = caching_core::binomial(u64::from(k) - 1, u64::from(t)) as u32;
        greedy_schedule(&instance, &ScheduleConfig::new(s)).unwrap()
    }

    #[test]
    fn matched_filter_sinr() {
        // Single-message slot: w = c·h/‖h‖ gives γ = c²‖h‖²/σ².
        let plan = fs_plan(2, 1, 2.0); // one message {1,2} per... K=2,t=1: C(2,2)=1 message
        assert_eq!(plan.num_messages(), 1);
        let ch = unit_channels(2, 4);
        let h = ch.channel(1);
        let c = 3.0;
        let w = h * Complex64::new(c / h.norm(), 0.0);
        let beams = vec![w];
        let got = sinr(&ch, &plan, 0, &beams, 1, 0).unwrap();
        let expected = c * c * h.norm_squared() / ch.noise_var(1);
        assert!((got - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn orthogonal_interferer_leaves_sinr_unchanged() {
        // K=4, t=1, s=1: each slot has disjoint pair messages.
        let instance = ProblemInstance::with_uniform_noise(4, 4, 1, 4.0, 4, 1.0).unwrap();
        let plan = greedy_schedule(&instance, &ScheduleConfig::new(1)).unwrap();
        let ch = unit_channels(4, 4);
        let slot = 0;
        let members = plan.slot_messages[slot].clone();
        assert_eq!(members.len(), 2);
        let (m0, m1) = (members[0], members[1]);
        let k = plan.message_targets[m0][0];
        let h = ch.channel(k).clone();
        let w0 = &h * Complex64::new(1.0 / h.norm(), 0.0);

        let baseline = sinr(
            &ch,
            &plan,
            slot,
            &vec![w0.clone(), DVector::zeros(4)],
            k,
            m0,
        )
        .unwrap();

        // Gram-Schmidt an interferer orthogonal to h_k.
        let g = ch.channel(plan.message_targets[m1][0]);
        let mut w1 = g - &h * (h.dotc(g) / Complex64::new(h.norm_squared(), 0.0));
        w1 *= Complex64::new(5.0 / w1.norm(), 0.0);
        assert!(h.dotc(&w1).norm() < 1e-12);

        let with_orth = sinr(&ch, &plan, slot, &vec![w0.clone(), w1], k, m0).unwrap();
        assert!((with_orth - baseline).abs() < 1e-9 * baseline);

        // Zero beamformer → zero SINR.
        let zero = sinr(
            &ch,
            &plan,
            slot,
            &vec![DVector::zeros(4), DVector::zeros(4)],
            k,
            m0,
        )
        .unwrap();
        assert_eq!(zero, 0.0);

        // Non-target user is a contract violation.
        let other = (1..=4)
            .find(|u| !plan.message_targets[m0].contains(u))
            .unwrap();
        assert!(matches!(
            sinr(
                &ch,
                &plan,
                slot,
                &vec![w0, DVector::zeros(4)],
                other,
                m0
            ),
            Err(BeamformingError::NotTargeted { .. })
        ));
    }

    #[test]
    fn descriptor_counts_follow_decode_counts() {
        // Full superposition at K=5, t=1: every user decodes 4 messages in
        // the single slot → 2⁴−1 = 15 descriptors each, 75 total.
        let plan = fs_plan(5, 1, 8.0);
        assert_eq!(plan.num_slots(), 1);
        let total: usize = (1..=5).map(|k| mac_constraint_set(&plan, k, 0).len()).sum();
        assert_eq!(total, 75);

        // c_k(i) = 2 → 3 descriptors.
        let instance = ProblemInstance::with_uniform_noise(5, 5, 1, 8.0, 4, 1.0).unwrap();
        let plan2 = greedy_schedule(&instance, &ScheduleConfig::new(2)).unwrap();
        let k = 1;
        let slot = 0;
        assert_eq!(plan2.decode_count(k, slot), 2);
        let descs = mac_constraint_set(&plan2, k, slot);
        assert_eq!(descs.len(), 3);

        // Thresholds follow 2^{rate_sum/fraction} − 1.
        for d in &descs {
            let expect = (d.rate_sum / plan2.blocklength_fractions[slot]).exp2() - 1.0;
            assert!((d.sinr_threshold - expect).abs() < 1e-12);
        }

        // A user absent from a slot has no descriptors.
        let empty: Vec<_> = (1..=5)
            .filter(|&k| plan2.decode_count(k, 0) == 0)
            .collect();
        for k in empty {
            assert!(mac_constraint_set(&plan2, k, 0).is_empty());
        }
    }

    #[test]
    fn average_power_is_the_weighted_sum() {
        let plan = fs_plan(2, 1, 2.0);
        // Single slot, single beam with ‖w‖² = 2 → P = 2.
        let beams = vec![vec![DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])]];
        assert!((average_power(&beams, &plan) - 2.0).abs() < 1e-15);
        assert!((watts_to_dbw(100.0) - 20.0).abs() < 1e-12);

        // Multi-slot plan: per-slot powers 1 and 3 weighted by the actual
        // blocklength fractions.
        let instance = ProblemInstance::with_uniform_noise(4, 4, 1, 4.0, 4, 1.0).unwrap();
        let plan2 = greedy_schedule(&instance, &ScheduleConfig::new(2)).unwrap();
        assert_eq!(plan2.num_slots(), 2);
        let per_slot: Vec<SlotBeams> = plan2
            .slot_messages
            .iter()
            .enumerate()
            .map(|(i, msgs)| {
                let total: f64 = if i == 0 { 1.0 } else { 3.0 };
                let each = (total / msgs.len() as f64).sqrt();
                msgs.iter()
                    .map(|_| DVector::from_vec(vec![Complex64::new(each / 2.0, 0.0); 4]))
                    .collect()
            })
            .collect();
        let expected =
            plan2.blocklength_fractions[0] * 1.0 + plan2.blocklength_fractions[1] * 3.0;
        assert!((average_power(&per_slot, &plan2) - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_beams_with_positive_rates_flagged_infeasible() {
        let plan = fs_plan(3, 1, 3.0);
        let ch = unit_channels(3, 4);
        let zero_solution = BeamformingSolution {
            beams: plan
                .slot_messages
                .iter()
                .map(|msgs| msgs.iter().map(|_| DVector::zeros(4)).collect())
                .collect(),
            rates: plan.rate_matrix.clone(),
            etas: Vec::new(),
            power: 0.0,
            iterations: 0,
            degraded: false,
            trace: Vec::new(),
        };
        let report = verify_feasibility(&zero_solution, &plan, &ch, 1e-6).unwrap();
        assert!(!report.feasible);
        assert!(!report.violations.is_empty());
        assert!(report.worst_mac_margin < 0.0);

        // Zero rates with zero beams: vacuously feasible.
        let mut zero_rates = zero_solution.clone();
        zero_rates.rates = vec![vec![0.0; plan.num_slots()]; plan.num_messages()];
        let report = verify_feasibility(&zero_rates, &plan, &ch, 1e-6).unwrap();
        // No active descriptors; rate margins compare 0-promise rows only.
        assert!(report.worst_mac_margin.is_infinite());
        assert!(!report.feasible); // plan promised positive totals
    }
}
