//! Program representation and the interior-point bridge.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, ExponentialConeT, IPSolver, NonnegativeConeT,
    SecondOrderConeT, SolverStatus, SupportedConeT, ZeroConeT,
};
use thiserror::Error;

/// Errors from program construction or the solver bridge.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    /// Block shape or coefficient problem, caught at insertion.
    #[error("malformed cone block: {reason}")]
    BadBlock { reason: String },
    /// A quadratic term with negative weight cannot enter a cone program.
    #[error("nonconvex input: quadratic term {term} has negative weight")]
    Nonconvex { term: usize },
    /// Log-rate rewrite needs a positive blocklength scale.
    #[error("nonconvex input: log-rate scale {scale} must be positive")]
    BadScale { scale: f64 },
    /// The solver rejected the assembled data.
    #[error("solver construction failed: {reason}")]
    Construction { reason: String },
    /// Starting point handed to the barrier engine is not strictly feasible.
    #[error("barrier start not strictly feasible: {reason}")]
    BadStart { reason: String },
}

/// Cone tags for constraint blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// Every expression equals zero.
    Zero,
    /// Every expression is nonnegative.
    NonNeg,
    /// `e₁ ≥ ‖(e₂, …, e_d)‖₂`.
    Soc,
    /// `(e₁, e₂, e₃)` with `e₂·exp(e₁/e₂) ≤ e₃`, `e₂ > 0`.
    Exp,
}

/// An affine expression `Σ coeff·x[var] + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearExpr {
    /// `(variable index, coefficient)` pairs; duplicates are summed.
    pub terms: Vec<(usize, f64)>,
    /// Additive constant.
    pub constant: f64,
}

impl LinearExpr {
    /// A constant expression.
    #[must_use]
    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    /// The bare variable `x[i]`.
    #[must_use]
    pub fn variable(i: usize) -> Self {
        Self {
            terms: vec![(i, 1.0)],
            constant: 0.0,
        }
    }

    /// Builds from term list and constant.
    #[must_use]
    pub fn from_terms(terms: Vec<(usize, f64)>, constant: f64) -> Self {
        Self { terms, constant }
    }

    /// Evaluates at a point.
    #[must_use]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(i, c)| acc + c * x[i])
    }

    /// Returns `self` scaled by `factor`.
    #[must_use]
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(i, c)| (i, c * factor)).collect(),
            constant: self.constant * factor,
        }
    }

    fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.terms.iter().all(|&(_, c)| c.is_finite())
    }
}

impl std::ops::Add for LinearExpr {
    type Output = LinearExpr;

    fn add(mut self, rhs: LinearExpr) -> LinearExpr {
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
        self
    }
}

impl std::ops::Sub for LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: LinearExpr) -> LinearExpr {
        self + rhs.scaled(-1.0)
    }
}

/// Solver tolerances; defaults match the feasibility margins asserted
/// downstream (1e−8 feasibility / duality gap against 1e−6 assertions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Feasibility tolerance.
    pub feasibility: f64,
    /// Duality-gap tolerance (absolute and relative).
    pub gap: f64,
    /// Interior-point iteration cap.
    pub max_iterations: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-8,
            gap: 1e-8,
            max_iterations: 200,
        }
    }
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Converged; reported point satisfies every block within tolerance.
    Optimal,
    /// Certificate of primal or dual infeasibility.
    Infeasible,
    /// Numerical trouble; the returned point is not certified.
    NumericalFailure,
    /// Iteration or time cap hit first.
    IterationLimit,
}

/// Result of a solve: status, primal point, objective, and the recomputed
/// worst constraint violation (normalized per block by `1 + max|constant|`).
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Termination status.
    pub status: SolveStatus,
    /// Primal values for all variables.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub objective: f64,
    /// Worst normalized violation across blocks, recomputed from `x`.
    pub max_violation: f64,
}

/// A linear-objective cone program over real variables.
///
/// Constraints are grouped into blocks; each block is a vector of affine
/// expressions whose joint value must lie in the tagged cone.
#[derive(Debug, Clone, Default)]
pub struct ConicProgram {
    num_vars: usize,
    objective: Vec<f64>,
    blocks: Vec<(Cone, Vec<LinearExpr>)>,
}

impl ConicProgram {
    /// A program over `num_vars` real variables with zero objective.
    #[must_use]
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            blocks: Vec::new(),
        }
    }

    /// Appends `n` fresh variables, returning the index of the first.
    pub fn add_vars(&mut self, n: usize) -> usize {
        let first = self.num_vars;
        self.num_vars += n;
        self.objective.resize(self.num_vars, 0.0);
        first
    }

    /// Number of variables.
    #[must_use]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Sets the objective coefficient of one variable (minimization).
    pub fn set_objective_term(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    /// Adds a constraint block.
    ///
    /// # Errors
    ///
    /// Returns [`BackendError::BadBlock`] for wrong block arity (SOC needs
    /// ≥ 2 rows, exponential exactly 3), non-finite coefficients, or
    /// variable indices out of range.
    pub fn add_block(&mut self, cone: Cone, exprs: Vec<LinearExpr>) -> Result<(), BackendError> {
        let bad = |reason: &str| BackendError::BadBlock {
            reason: reason.to_owned(),
        };
        match cone {
            Cone::Zero | Cone::NonNeg if exprs.is_empty() => {
                return Err(bad("empty block"));
            }
            Cone::Soc if exprs.len() < 2 => {
                return Err(bad("second-order cone needs at least 2 rows"));
            }
            Cone::Exp if exprs.len() != 3 => {
                return Err(bad("exponential cone needs exactly 3 rows"));
            }
            _ => {}
        }
        for e in &exprs {
            if !e.is_finite() {
                return Err(bad("non-finite coefficient"));
            }
            if e.terms.iter().any(|&(i, _)| i >= self.num_vars) {
                return Err(bad("variable index out of range"));
            }
        }
        self.blocks.push((cone, exprs));
        Ok(())
    }

    /// Sugar: one equality row `e = 0`.
    ///
    /// # Errors
    ///
    /// As [`ConicProgram::add_block`].
    pub fn add_equality(&mut self, e: LinearExpr) -> Result<(), BackendError> {
        self.add_block(Cone::Zero, vec![e])
    }

    /// Sugar: one inequality row `e ≥ 0`.
    ///
    /// # Errors
    ///
    /// As [`ConicProgram::add_block`].
    pub fn add_nonneg(&mut self, e: LinearExpr) -> Result<(), BackendError> {
        self.add_block(Cone::NonNeg, vec![e])
    }

    /// Human-readable dump for cross-checking against external solvers.
    #[must_use]
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "vars {}", self.num_vars);
        let obj: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0.0)
            .map(|(i, c)| format!("{c}*x{i}"))
            .collect();
        let _ = writeln!(out, "min {}", obj.join(" + "));
        for (cone, exprs) in &self.blocks {
            let _ = writeln!(out, "block {cone:?}");
            for e in exprs {
                let terms: Vec<String> =
                    e.terms.iter().map(|(i, c)| format!("{c}*x{i}")).collect();
                let _ = writeln!(out, "  {} + {}", terms.join(" + "), e.constant);
            }
        }
        out
    }

    /// Solves the program with Clarabel.
    ///
    /// # Errors
    ///
    /// Returns [`BackendError::Construction`] only if the solver rejects the
    /// assembled matrices; numerical trouble is reported through
    /// [`SolveReport::status`], never by panicking.
    pub fn solve(&self, tol: &Tolerances) -> Result<SolveReport, BackendError> {
        // Assemble s = b − Ax ∈ K from the expression blocks: the cone slot
        // holds the expression value, so A = −coeffs and b = constants.
        let num_rows: usize = self.blocks.iter().map(|(_, e)| e.len()).sum();
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut b = Vec::with_capacity(num_rows);
        let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(self.blocks.len());
        let mut row = 0;
        for (cone, exprs) in &self.blocks {
            for e in exprs {
                for &(i, c) in &e.terms {
                    triplets.push((row, i, -c));
                }
                b.push(e.constant);
                row += 1;
            }
            cones.push(match cone {
                Cone::Zero => ZeroConeT(exprs.len()),
                Cone::NonNeg => NonnegativeConeT(exprs.len()),
                Cone::Soc => SecondOrderConeT(exprs.len()),
                Cone::Exp => ExponentialConeT(),
            });
        }

        let a = csc_from_triplets(num_rows, self.num_vars, &mut triplets);
        let p = CscMatrix::zeros((self.num_vars, self.num_vars));
        let settings = DefaultSettings {
            verbose: false,
            max_iter: tol.max_iterations,
            tol_gap_abs: tol.gap,
            tol_gap_rel: tol.gap,
            tol_feas: tol.feasibility,
            ..DefaultSettings::default()
        };
        let mut solver = DefaultSolver::new(&p, &self.objective, &a, &b, &cones, settings)
            .map_err(|e| BackendError::Construction {
                reason: format!("{e:?}"),
            })?;
        solver.solve();

        let x = solver.solution.x.clone();
        let objective = self
            .objective
            .iter()
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum::<f64>();
        let max_violation = self.max_violation(&x);
        let mut status = match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
            SolverStatus::PrimalInfeasible
            | SolverStatus::DualInfeasible
            | SolverStatus::AlmostPrimalInfeasible
            | SolverStatus::AlmostDualInfeasible => SolveStatus::Infeasible,
            SolverStatus::MaxIterations | SolverStatus::MaxTime => SolveStatus::IterationLimit,
            _ => SolveStatus::NumericalFailure,
        };
        // Keep the contract honest: "optimal" implies the recomputed point
        // actually satisfies the blocks. AlmostSolved points that don't are
        // downgraded here.
        if status == SolveStatus::Optimal && max_violation > tol.feasibility.max(1e-7) {
            status = SolveStatus::NumericalFailure;
        }
        Ok(SolveReport {
            status,
            x,
            objective,
            max_violation,
        })
    }

    /// Worst violation over all blocks at `x`, each block normalized by
    /// `1 + max|constant|` so the measure is scale-aware.
    #[must_use]
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (cone, exprs) in &self.blocks {
            let vals: Vec<f64> = exprs.iter().map(|e| e.eval(x)).collect();
            let violation = match cone {
                Cone::Zero => vals.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
                Cone::NonNeg => vals.iter().fold(0.0f64, |m, &v| m.max(-v)),
                Cone::Soc => {
                    let norm = vals[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                    norm - vals[0]
                }
                Cone::Exp => exp_violation(vals[0], vals[1], vals[2]),
            };
            let scale = 1.0
                + exprs
                    .iter()
                    .map(|e| e.constant.abs())
                    .fold(0.0f64, f64::max);
            worst = worst.max(violation / scale);
        }
        worst
    }
}

/// Violation of `(x, y, z) ∈ K_exp = cl{y·e^{x/y} ≤ z, y > 0}`.
fn exp_violation(x: f64, y: f64, z: f64) -> f64 {
    if y > 0.0 {
        let arg = (x / y).min(700.0); // avoid overflow; anything this large is violated anyway
        y * arg.exp() - z
    } else {
        // Closure: y = 0 needs x ≤ 0 and z ≥ 0.
        (-y).max(x).max(-z)
    }
}

/// Builds a CSC matrix from (row, col, value) triplets.
fn csc_from_triplets(
    rows: usize,
    cols: usize,
    triplets: &mut [(usize, usize, f64)],
) -> CscMatrix<f64> {
    triplets.sort_unstable_by_key(|&(r, c, _)| (c, r));
    let mut colptr = Vec::with_capacity(cols + 1);
    let mut rowval = Vec::with_capacity(triplets.len());
    let mut nzval = Vec::with_capacity(triplets.len());
    let mut idx = 0;
    colptr.push(0);
    for col in 0..cols {
        let col_start = rowval.len();
        while idx < triplets.len() && triplets[idx].1 == col {
            let (r, _, v) = triplets[idx];
            // Duplicate (row, col) entries sum.
            if rowval.len() > col_start && *rowval.last().unwrap() == r {
                *nzval.last_mut().unwrap() += v;
            } else {
                rowval.push(r);
                nzval.push(v);
            }
            idx += 1;
        }
        colptr.push(rowval.len());
    }
    CscMatrix::new(rows, cols, colptr, rowval, nzval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_minimum_at_bound() {
        let mut p = ConicProgram::new(1);
        p.set_objective_term(0, 1.0);
        p.add_nonneg(LinearExpr::from_terms(vec![(0, 1.0)], -3.0)).unwrap();
        let report = p.solve(&Tolerances::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert!((report.x[0] - 3.0).abs() < 1e-7, "x = {}", report.x[0]);
        assert!(report.max_violation <= 1e-8);
    }

    #[test]
    fn soc_norm_bound() {
        // minimize t subject to t ≥ ‖(3, 4)‖ → t = 5.
        let mut p = ConicProgram::new(1);
        p.set_objective_term(0, 1.0);
        p.add_block(
            Cone::Soc,
            vec![
                LinearExpr::variable(0),
                LinearExpr::constant(3.0),
                LinearExpr::constant(4.0),
            ],
        )
        .unwrap();
        let report = p.solve(&Tolerances::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert!((report.x[0] - 5.0).abs() < 1e-6);
    }

    #[test]
    fn exp_cone_log_bound() {
        // maximize r subject to e^r ≤ 5 → r = ln 5.
        let mut p = ConicProgram::new(1);
        p.set_objective_term(0, -1.0);
        p.add_block(
            Cone::Exp,
            vec![
                LinearExpr::variable(0),
                LinearExpr::constant(1.0),
                LinearExpr::constant(5.0),
            ],
        )
        .unwrap();
        let report = p.solve(&Tolerances::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert!((report.x[0] - 5.0f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn infeasible_detected() {
        // x ≥ 3 and x ≤ 1 simultaneously.
        let mut p = ConicProgram::new(1);
        p.set_objective_term(0, 1.0);
        p.add_nonneg(LinearExpr::from_terms(vec![(0, 1.0)], -3.0)).unwrap();
        p.add_nonneg(LinearExpr::from_terms(vec![(0, -1.0)], 1.0)).unwrap();
        let report = p.solve(&Tolerances::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Infeasible);
    }

    #[test]
    fn malformed_blocks_rejected() {
        let mut p = ConicProgram::new(1);
        assert!(p.add_block(Cone::Soc, vec![LinearExpr::variable(0)]).is_err());
        assert!(p
            .add_block(
                Cone::Exp,
                vec![LinearExpr::variable(0), LinearExpr::constant(1.0)],
            )
            .is_err());
        assert!(p
            .add_nonneg(LinearExpr::from_terms(vec![(3, 1.0)], 0.0))
            .is_err());
        assert!(p
            .add_nonneg(LinearExpr::from_terms(vec![(0, f64::NAN)], 0.0))
            .is_err());
    }

    #[test]
    fn repeat_solves_agree() {
        let mut p = ConicProgram::new(2);
        p.set_objective_term(0, 1.0);
        p.set_objective_term(1, 0.5);
        p.add_nonneg(LinearExpr::from_terms(vec![(0, 1.0), (1, 1.0)], -2.0))
            .unwrap();
        p.add_nonneg(LinearExpr::variable(0)).unwrap();
        p.add_nonneg(LinearExpr::variable(1)).unwrap();
        let a = p.solve(&Tolerances::default()).unwrap();
        let b = p.solve(&Tolerances::default()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }

    #[test]
    fn dump_lists_blocks() {
        let mut p = ConicProgram::new(1);
        p.set_objective_term(0, 1.0);
        p.add_nonneg(LinearExpr::from_terms(vec![(0, 1.0)], -3.0)).unwrap();
        let text = p.dump();
        assert!(text.contains("min 1*x0"));
        assert!(text.contains("block NonNeg"));
    }
}
