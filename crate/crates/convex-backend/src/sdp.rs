//! Dense Hermitian semidefinite programs via a log-det barrier method.
//!
//! The SDR initializer needs to solve small trace-minimization programs
//!
//! ```text
//! minimize   Σ_m tr(C_m X_m)
//! subject to Σ_m tr(A_{j,m} X_m) ≥ b_j   for each constraint j,
//!            X_m ⪰ 0 Hermitian.
//! ```
//!
//! Matrix sizes here are the antenna count (≤ 8ish) and constraint counts a
//! few dozen, so a dense path-following barrier is plenty: minimize
//! `t·obj − Σ log det X_m − Σ log s_j` by Newton's method for a growing
//! sequence of `t`. The barrier's central point also yields dual
//! multipliers `y_j = 1/(t·s_j)`, whose objective `Σ y_j b_j` is a
//! certified lower bound on the SDP optimum (weak duality) up to the
//! reported dual residual.
//!
//! Hermitian matrices are parameterized by `n²` reals: the `n` diagonal
//! entries, then `(Re, Im)` pairs of the upper triangle in row-major order.

use crate::program::BackendError;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// One linear constraint `Σ_m tr(mats[m]·X_m) ≥ rhs`.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    /// One Hermitian coefficient matrix per matrix variable.
    pub mats: Vec<DMatrix<Complex64>>,
    /// Right-hand side.
    pub rhs: f64,
}

/// A trace-form Hermitian SDP (see module docs).
#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Dimensions of the matrix variables.
    pub dims: Vec<usize>,
    /// Objective coefficient matrices `C_m` (Hermitian).
    pub objective: Vec<DMatrix<Complex64>>,
    /// Inequality constraints.
    pub constraints: Vec<SdpConstraint>,
}

/// Solution of an [`SdpProblem`].
#[derive(Debug, Clone)]
pub struct SdpReport {
    /// Optimal matrix variables (Hermitian, PSD).
    pub matrices: Vec<DMatrix<Complex64>>,
    /// Primal objective at the returned point.
    pub objective: f64,
    /// Certified lower bound from the dual multipliers.
    pub lower_bound: f64,
    /// Worst negative eigenvalue of the dual slack matrices (0 when the
    /// dual certificate is exactly feasible).
    pub dual_residual: f64,
    /// Total Newton iterations.
    pub iterations: usize,
}

/// Number of real parameters for an `n×n` Hermitian matrix.
fn param_count(n: usize) -> usize {
    n * n
}

/// Rebuilds a Hermitian matrix from its parameter slice.
fn mat_from_params(n: usize, p: &[f64]) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(p[i], 0.0);
    }
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = Complex64::new(p[idx], p[idx + 1]);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
            idx += 2;
        }
    }
    m
}

/// Writes a Hermitian matrix into parameter form.
fn params_from_mat(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let mut p = vec![0.0; param_count(n)];
    for i in 0..n {
        p[i] = m[(i, i)].re;
    }
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            p[idx] = m[(i, j)].re;
            p[idx + 1] = m[(i, j)].im;
            idx += 2;
        }
    }
    p
}

/// Coefficients of the linear form `x ↦ tr(A·X(x))` over the parameters:
/// diagonal entries contribute `A_ii`, upper-triangle pairs `2Re A_ij`
/// and `2Im A_ij`.
fn trace_form(a: &DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![0.0; param_count(n)];
    for i in 0..n {
        c[i] = a[(i, i)].re;
    }
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            c[idx] = 2.0 * a[(i, j)].re;
            c[idx + 1] = 2.0 * a[(i, j)].im;
            idx += 2;
        }
    }
    c
}

/// Hermitian basis matrix for parameter `p` of an `n×n` variable.
fn basis(n: usize, p: usize) -> DMatrix<Complex64> {
    let mut e = DMatrix::<Complex64>::zeros(n, n);
    if p < n {
        e[(p, p)] = Complex64::new(1.0, 0.0);
        return e;
    }
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            if p == idx {
                e[(i, j)] = Complex64::new(1.0, 0.0);
                e[(j, i)] = Complex64::new(1.0, 0.0);
                return e;
            }
            if p == idx + 1 {
                e[(i, j)] = Complex64::new(0.0, 1.0);
                e[(j, i)] = Complex64::new(0.0, -1.0);
                return e;
            }
            idx += 2;
        }
    }
    unreachable!("parameter index out of range")
}

fn hermitianize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Smallest eigenvalue of a Hermitian matrix.
fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

struct Layout {
    offsets: Vec<usize>,
    total: usize,
}

fn layout(dims: &[usize]) -> Layout {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut total = 0;
    for &n in dims {
        offsets.push(total);
        total += param_count(n);
    }
    Layout { offsets, total }
}

/// Solves the SDP from a strictly feasible start (`X_m ≻ 0`, all slacks
/// strictly positive).
///
/// `gap_tol` controls the barrier's relative duality-gap target.
///
/// # Errors
///
/// - [`BackendError::BadBlock`] for inconsistent dimensions.
/// - [`BackendError::BadStart`] if the start is not strictly feasible.
pub fn solve_sdp(
    problem: &SdpProblem,
    start: &[DMatrix<Complex64>],
    gap_tol: f64,
) -> Result<SdpReport, BackendError> {
    let dims = &problem.dims;
    let bad = |reason: String| BackendError::BadBlock { reason };
    if problem.objective.len() != dims.len() || start.len() != dims.len() {
        return Err(bad("matrix count mismatch".into()));
    }
    for (m, &n) in dims.iter().enumerate() {
        if problem.objective[m].nrows() != n || problem.objective[m].ncols() != n {
            return Err(bad(format!("objective matrix {m} has wrong shape")));
        }
        if start[m].nrows() != n || start[m].ncols() != n {
            return Err(bad(format!("start matrix {m} has wrong shape")));
        }
    }
    for (j, con) in problem.constraints.iter().enumerate() {
        if con.mats.len() != dims.len() {
            return Err(bad(format!("constraint {j} has wrong matrix count")));
        }
        for (m, &n) in dims.iter().enumerate() {
            if con.mats[m].nrows() != n || con.mats[m].ncols() != n {
                return Err(bad(format!("constraint {j} matrix {m} has wrong shape")));
            }
        }
    }

    let lay = layout(dims);
    // Stacked linear forms.
    let obj_form: Vec<f64> = problem
        .objective
        .iter()
        .flat_map(|c| trace_form(&hermitianize(c)))
        .collect();
    let con_forms: Vec<Vec<f64>> = problem
        .constraints
        .iter()
        .map(|con| {
            con.mats
                .iter()
                .flat_map(|a| trace_form(&hermitianize(a)))
                .collect()
        })
        .collect();
    let rhs: Vec<f64> = problem.constraints.iter().map(|c| c.rhs).collect();

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    // Strict feasibility of the start.
    let mut x: Vec<f64> = start.iter().flat_map(|m| params_from_mat(&hermitianize(m))).collect();
    let matrices_at = |x: &[f64]| -> Vec<DMatrix<Complex64>> {
        dims.iter()
            .enumerate()
            .map(|(m, &n)| mat_from_params(n, &x[lay.offsets[m]..lay.offsets[m] + param_count(n)]))
            .collect()
    };
    let slacks_at =
        |x: &[f64]| -> Vec<f64> { con_forms.iter().zip(&rhs).map(|(a, b)| dot(a, x) - b).collect() };
    let in_domain = |x: &[f64]| -> bool {
        matrices_at(x).iter().all(|m| m.clone().cholesky().is_some())
            && slacks_at(x).iter().all(|&s| s > 0.0)
    };
    if matrices_at(&x).iter().any(|m| m.clone().cholesky().is_none()) {
        return Err(BackendError::BadStart {
            reason: "a start matrix is not positive definite".into(),
        });
    }
    if let Some(j) = slacks_at(&x).iter().position(|&s| s <= 0.0) {
        return Err(BackendError::BadStart {
            reason: format!("constraint {j} slack not strictly positive at start"),
        });
    }

    // Barrier complexity parameter: n per log-det block, 1 per slack.
    let nu = dims.iter().sum::<usize>() as f64 + rhs.len() as f64;
    let barrier_value = |x: &[f64], t: f64| -> f64 {
        let mats = matrices_at(x);
        let mut v = t * dot(&obj_form, x);
        for m in &mats {
            let chol = m.clone().cholesky().expect("domain point");
            // log det X = 2·Σ log L_ii for X = L L^H.
            v -= 2.0
                * (0..m.nrows())
                    .map(|i| chol.l_dirty()[(i, i)].re.ln())
                    .sum::<f64>();
        }
        for s in slacks_at(x) {
            v -= s.ln();
        }
        v
    };

    let mut t = nu / (1.0 + dot(&obj_form, &x).abs());
    let mut total_newton = 0usize;
    let max_outer = 60;
    for _ in 0..max_outer {
        // Newton-center f_t around the current point.
        for _ in 0..80 {
            total_newton += 1;
            let mats = matrices_at(&x);
            let slacks = slacks_at(&x);
            let mut grad = DVector::<f64>::zeros(lay.total);
            for (i, &c) in obj_form.iter().enumerate() {
                grad[i] = t * c;
            }
            let mut hess = DMatrix::<f64>::zeros(lay.total, lay.total);
            for (m, &n) in dims.iter().enumerate() {
                let inv = mats[m]
                    .clone()
                    .cholesky()
                    .expect("domain point")
                    .inverse();
                let g_ld = trace_form(&inv);
                let off = lay.offsets[m];
                let pc = param_count(n);
                for p in 0..pc {
                    grad[off + p] -= g_ld[p];
                }
                // Hessian of −log det: H[p][q] = tr(X⁻¹ E_p X⁻¹ E_q).
                for p in 0..pc {
                    let mp = &inv * basis(n, p) * &inv;
                    let row = trace_form(&mp);
                    for q in 0..pc {
                        hess[(off + p, off + q)] += row[q];
                    }
                }
            }
            for (j, a) in con_forms.iter().enumerate() {
                let s = slacks[j];
                for (p, &ap) in a.iter().enumerate() {
                    grad[p] -= ap / s;
                }
                let w = 1.0 / (s * s);
                for (p, &ap) in a.iter().enumerate() {
                    if ap == 0.0 {
                        continue;
                    }
                    for (q, &aq) in a.iter().enumerate() {
                        hess[(p, q)] += w * ap * aq;
                    }
                }
            }

            // Newton direction with a tiny ridge fallback.
            let mut ridge = 0.0;
            let dir = loop {
                let mut h = hess.clone();
                if ridge > 0.0 {
                    for i in 0..lay.total {
                        h[(i, i)] += ridge;
                    }
                }
                if let Some(chol) = h.cholesky() {
                    break chol.solve(&(-&grad));
                }
                ridge = if ridge == 0.0 { 1e-12 } else { ridge * 100.0 };
                if ridge > 1.0 {
                    return Err(BackendError::Construction {
                        reason: "barrier Hessian factorization failed".into(),
                    });
                }
            };

            let decrement = -grad.dot(&dir);
            if decrement * 0.5 < 1e-11 {
                break;
            }
            // In the quadratic-convergence region the Armijo comparison can
            // drown in floating-point noise (barrier values scale with t),
            // so take pure Newton steps gated only by domain membership.
            // λ = √decrement < 0.005 is far inside the region where pure
            // Newton converges for self-concordant barriers.
            let pure_newton = decrement * 0.5 < 1e-5;
            let f0 = if pure_newton { 0.0 } else { barrier_value(&x, t) };
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..70 {
                let cand: Vec<f64> = x
                    .iter()
                    .zip(dir.iter())
                    .map(|(xi, di)| xi + alpha * di)
                    .collect();
                let ok = if pure_newton {
                    in_domain(&cand)
                } else {
                    in_domain(&cand) && barrier_value(&cand, t) <= f0 - 0.25 * alpha * decrement
                };
                if ok {
                    x = cand;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break; // numerically centered already
            }
        }
        let obj = dot(&obj_form, &x);
        if nu / t <= gap_tol * (1.0 + obj.abs()) {
            break;
        }
        t *= 10.0;
    }

    // Dual certificate from the central point: y_j = 1/(t·s_j) with dual
    // slack matrices Z_m = C_m − Σ_j y_j A_{j,m}.
    let slacks = slacks_at(&x);
    let mut y: Vec<f64> = slacks.iter().map(|&s| 1.0 / (t * s)).collect();
    let dual_slack_eig = |y: &[f64]| -> f64 {
        let mut worst = f64::INFINITY;
        for m in 0..dims.len() {
            let mut z = hermitianize(&problem.objective[m]);
            for (j, con) in problem.constraints.iter().enumerate() {
                z -= hermitianize(&con.mats[m]) * Complex64::new(y[j], 0.0);
            }
            worst = worst.min(min_eigenvalue(&z));
        }
        worst
    };
    let mut worst_eig = dual_slack_eig(&y);
    if worst_eig < 0.0 {
        // Imperfect centering can leave Z slightly indefinite. Scaling y by
        // θ ∈ (0, 1) gives Z(θy) = θ·Z(y) + (1−θ)·C, which is PSD once
        // θ·|λ_min(Z)| ≤ (1−θ)·λ_min(C); possible whenever the objective
        // matrices are positive definite (true for power minimization).
        let obj_eig = problem
            .objective
            .iter()
            .map(|c| min_eigenvalue(&hermitianize(c)))
            .fold(f64::INFINITY, f64::min);
        if obj_eig > 0.0 {
            let theta = obj_eig / (obj_eig + 2.0 * (-worst_eig));
            for yi in &mut y {
                *yi *= theta;
            }
            worst_eig = dual_slack_eig(&y);
        }
    }
    let dual_residual = (-worst_eig).max(0.0);
    let lower_bound = y.iter().zip(&rhs).map(|(yi, bi)| yi * bi).sum::<f64>();

    Ok(SdpReport {
        matrices: matrices_at(&x),
        objective: dot(&obj_form, &x),
        lower_bound,
        dual_residual,
        iterations: total_newton,
    })
}
