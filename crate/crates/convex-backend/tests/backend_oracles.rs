//! End-to-end checks of the conic layer against hand-solvable programs,
//! including the interleaved complex-to-real convention the beamforming
//! crates rely on.

use convex_backend::{
    reformulate_log_rate, reformulate_quadratic, solve_sdp, ConicProgram, LinearExpr, QuadTerm,
    SdpConstraint, SdpProblem, SolveStatus, Tolerances,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// `min ‖w‖² s.t. Re(h^H w) ≥ 1` has optimum `1/‖h‖²` at the matched
/// filter `w = h/‖h‖²`. Variables are interleaved `[Re w_1, Im w_1, …]`.
#[test]
fn matched_filter_through_soc() {
    let h = [Complex64::new(1.0, -0.5), Complex64::new(0.3, 2.0)];
    let h_norm_sq: f64 = h.iter().map(|c| c.norm_sqr()).sum();

    let mut prog = ConicProgram::new(4); // Re w1, Im w1, Re w2, Im w2
    let p = prog.add_vars(1); // epigraph of ‖w‖²
    prog.set_objective_term(p, 1.0);

    // Re(h^H w) = Σ_k (Re h_k · Re w_k + Im h_k · Im w_k).
    let mut real_part = LinearExpr::constant(-1.0);
    for (k, hk) in h.iter().enumerate() {
        real_part = real_part + LinearExpr::variable(2 * k).scaled(hk.re);
        real_part = real_part + LinearExpr::variable(2 * k + 1).scaled(hk.im);
    }
    prog.add_nonneg(real_part).unwrap();

    let terms: Vec<QuadTerm> = (0..4)
        .map(|v| QuadTerm {
            weight: 1.0,
            expr: LinearExpr::variable(v),
        })
        .collect();
    let (cone, rows) = reformulate_quadratic(&terms, &LinearExpr::variable(p)).unwrap();
    prog.add_block(cone, rows).unwrap();

    let report = prog.solve(&Tolerances::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Optimal);
    let expected = 1.0 / h_norm_sq;
    assert!(
        (report.objective - expected).abs() < 1e-6 * expected.max(1.0),
        "objective {} vs {}",
        report.objective,
        expected
    );
    // The minimizer is the matched filter h/‖h‖².
    for (k, hk) in h.iter().enumerate() {
        assert!((report.x[2 * k] - hk.re / h_norm_sq).abs() < 1e-5);
        assert!((report.x[2 * k + 1] - hk.im / h_norm_sq).abs() < 1e-5);
    }
}

/// Maximizing a rate below a capacity-style log bound: `max r` subject to
/// `r ≤ log2(1 + η)`, `η ≤ 3` gives `r = 2`.
#[test]
fn rate_cap_through_exp_cone() {
    let mut prog = ConicProgram::new(2);
    let (r, eta) = (0, 1);
    prog.set_objective_term(r, -1.0); // maximize r

    let (cone, rows) =
        reformulate_log_rate(&LinearExpr::variable(r), &LinearExpr::variable(eta), 1.0).unwrap();
    prog.add_block(cone, rows).unwrap();
    prog.add_nonneg(LinearExpr::constant(3.0) - LinearExpr::variable(eta))
        .unwrap();
    prog.add_nonneg(LinearExpr::variable(r)).unwrap();

    let report = prog.solve(&Tolerances::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Optimal);
    assert!((report.x[r] - 2.0).abs() < 1e-6, "r = {}", report.x[r]);
}

/// The SDP engine and the SOC path agree on a problem both can express:
/// min tr(W) with tr(h h^H W) ≥ 1 is the (tight) semidefinite relaxation
/// of min ‖w‖² with |h^H w|² ≥ 1, so both optima equal 1/‖h‖².
#[test]
fn sdp_and_soc_agree_on_rank_one_program() {
    let h = [
        Complex64::new(0.8, 0.1),
        Complex64::new(-0.4, 1.2),
        Complex64::new(0.05, -0.7),
    ];
    let n = h.len();
    let h_norm_sq: f64 = h.iter().map(|c| c.norm_sqr()).sum();

    let hh = DMatrix::from_fn(n, n, |i, j| h[i] * h[j].conj());
    let problem = SdpProblem {
        dims: vec![n],
        objective: vec![DMatrix::<Complex64>::identity(n, n)],
        constraints: vec![SdpConstraint {
            mats: vec![hh],
            rhs: 1.0,
        }],
    };
    let start =
        vec![DMatrix::<Complex64>::identity(n, n) * Complex64::new(2.0 / h_norm_sq + 1.0, 0.0)];
    let report = solve_sdp(&problem, &start, 1e-9).unwrap();

    let expected = 1.0 / h_norm_sq;
    assert!((report.objective - expected).abs() < 1e-6 * expected.max(1.0));
    assert!(report.lower_bound <= report.objective + 1e-9);
    assert!(report.dual_residual < 1e-6);
}

/// Solving the same program twice yields identical iterates; the whole
/// pipeline is deterministic.
#[test]
fn repeated_solves_are_deterministic() {
    let build = || {
        let mut prog = ConicProgram::new(3);
        prog.set_objective_term(0, 1.0);
        prog.set_objective_term(1, 0.5);
        let (cone, rows) = reformulate_quadratic(
            &[
                QuadTerm {
                    weight: 2.0,
                    expr: LinearExpr::variable(1) + LinearExpr::constant(-0.25),
                },
                QuadTerm {
                    weight: 1.0,
                    expr: LinearExpr::variable(2),
                },
            ],
            &LinearExpr::variable(0),
        )
        .unwrap();
        prog.add_block(cone, rows).unwrap();
        prog.add_nonneg(LinearExpr::variable(2) + LinearExpr::constant(-1.0))
            .unwrap();
        prog
    };
    let a = build().solve(&Tolerances::default()).unwrap();
    let b = build().solve(&Tolerances::default()).unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.objective, b.objective);
}

/// Mixed cone program touching every cone type at once.
#[test]
fn mixed_cone_program() {
    // min p s.t. ‖(x−1, y−2)‖² ≤ p, x = y (zero cone), r ≤ log2(1+p), r ≥ 2.
    // Forcing r ≥ 2 needs p ≥ 3, which dominates the quadratic floor of
    // 0.5 at x = y = 1.5, so the optimum is 3.
    let mut prog = ConicProgram::new(4);
    let (x, y, p, r) = (0, 1, 2, 3);
    prog.set_objective_term(p, 1.0);

    let (cone, rows) = reformulate_quadratic(
        &[
            QuadTerm {
                weight: 1.0,
                expr: LinearExpr::variable(x) + LinearExpr::constant(-1.0),
            },
            QuadTerm {
                weight: 1.0,
                expr: LinearExpr::variable(y) + LinearExpr::constant(-2.0),
            },
        ],
        &LinearExpr::variable(p),
    )
    .unwrap();
    prog.add_block(cone, rows).unwrap();
    prog.add_equality(LinearExpr::variable(x) - LinearExpr::variable(y))
        .unwrap();
    let (cone, rows) =
        reformulate_log_rate(&LinearExpr::variable(r), &LinearExpr::variable(p), 1.0).unwrap();
    prog.add_block(cone, rows).unwrap();
    prog.add_nonneg(LinearExpr::variable(r) + LinearExpr::constant(-2.0))
        .unwrap();

    let report = prog.solve(&Tolerances::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Optimal);
    assert!((report.objective - 3.0).abs() < 1e-6, "{}", report.objective);
    assert!(report.max_violation < 1e-7);
}
