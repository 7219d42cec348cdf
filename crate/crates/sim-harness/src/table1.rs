//! Slot-count comparison table: greedy upper bound versus grouping baseline.

use delivery_scheduler::{baseline_slot_count, slots_upper_bound};
use num_rational::Ratio;

/// One row of the comparison: a `(K, t, s)` instance with a baseline
/// `(β, α)` pairing, the two slot counts, and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub k: u32,
    pub t: u32,
    pub s: u32,
    pub beta: u32,
    pub alpha: u32,
    /// Per-slot served-user load `K/(t+α)` of the baseline, exact.
    pub load: Ratio<u64>,
    /// Greedy slot-count upper bound `B_u`.
    pub b_u: u64,
    /// Baseline slot count `B_l`.
    pub b_l: u64,
    /// `B_u / B_l`.
    pub ratio: f64,
}

/// The ten published `(K, t, s, β, α)` pairings at `K = 10`, `s = 1`.
const CASES: [(u32, u32, u32, u32, u32); 10] = [
    (10, 1, 1, 1, 1),
    (10, 1, 1, 1, 3),
    (10, 1, 1, 1, 5),
    (10, 1, 1, 1, 7),
    (10, 1, 1, 1, 9),
    (10, 2, 1, 1, 1),
    (10, 2, 1, 1, 4),
    (10, 2, 1, 1, 7),
    (10, 3, 1, 1, 1),
    (10, 3, 1, 1, 5),
];

/// Regenerates the slot-count comparison rows from the closed forms.
#[must_use]
pub fn reproduce_table1() -> Vec<Table1Row> {
    CASES
        .iter()
        .map(|&(k, t, s, beta, alpha)| {
            let b_u = slots_upper_bound(k, t, s);
            let b_l = baseline_slot_count(k, t, alpha, beta)
                .expect("published pairings are divisible and fit the cell");
            Table1Row {
                k,
                t,
                s,
                beta,
                alpha,
                load: Ratio::new(u64::from(k), u64::from(t + alpha)),
                b_u,
                b_l,
                ratio: b_u as f64 / b_l as f64,
            }
        })
        .collect()
}

/// CSV rendering (one header plus one line per row).
#[must_use]
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("K,t,s,beta,alpha,K_over_t_plus_alpha,B_u,B_l,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}/{},{},{},{:.4}\n",
            r.k,
            r.t,
            r.s,
            r.beta,
            r.alpha,
            r.load.numer(),
            r.load.denom(),
            r.b_u,
            r.b_l,
            r.ratio
        ));
    }
    out
}
