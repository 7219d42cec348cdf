//! Deterministic rewrites from engineering form into cone blocks.
//!
//! Block layouts are fixed so identical inputs produce identical programs:
//!
//! - **Quadratic bound** `Σ_j κ_j·e_j(x)² ≤ u(x)` becomes one second-order
//!   cone block `[(u+1)/2, (u−1)/2, √κ₁·e₁, …, √κ_J·e_J]` (the rotated-cone
//!   embedding of `‖z‖² ≤ u·1`). With no quadratic terms it degenerates to
//!   the orthant row `u ≥ 0`.
//! - **Log-rate bound** `r(x) ≤ c·log₂(1 + η(x))` becomes one exponential
//!   cone block `[(ln 2 / c)·r, 1, 1 + η]`.

use crate::program::{BackendError, Cone, LinearExpr};

/// One weighted square `weight·expr²` on the left side of a quadratic bound.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTerm {
    /// Nonnegative weight `κ`.
    pub weight: f64,
    /// The affine expression being squared.
    pub expr: LinearExpr,
}

/// Rewrites `Σ_j weight_j·expr_j² ≤ bound` as a cone block.
///
/// # Errors
///
/// Returns [`BackendError::Nonconvex`] identifying the first term with a
/// negative weight.
pub fn reformulate_quadratic(
    terms: &[QuadTerm],
    bound: &LinearExpr,
) -> Result<(Cone, Vec<LinearExpr>), BackendError> {
    if let Some(term) = terms.iter().position(|t| t.weight < 0.0) {
        return Err(BackendError::Nonconvex { term });
    }
    let active: Vec<&QuadTerm> = terms.iter().filter(|t| t.weight > 0.0).collect();
    if active.is_empty() {
        // Affine passthrough: 0 ≤ bound.
        return Ok((Cone::NonNeg, vec![bound.clone()]));
    }
    let mut rows = Vec::with_capacity(active.len() + 2);
    let mut head = bound.scaled(0.5);
    head.constant += 0.5;
    rows.push(head);
    let mut neck = bound.scaled(0.5);
    neck.constant -= 0.5;
    rows.push(neck);
    for t in active {
        rows.push(t.expr.scaled(t.weight.sqrt()));
    }
    Ok((Cone::Soc, rows))
}

/// Rewrites `rate_sum ≤ scale·log₂(1 + eta)` as an exponential cone block.
///
/// # Errors
///
/// Returns [`BackendError::BadScale`] for `scale ≤ 0` (the bound would be
/// reversed or degenerate).
pub fn reformulate_log_rate(
    rate_sum: &LinearExpr,
    eta: &LinearExpr,
    scale: f64,
) -> Result<(Cone, Vec<LinearExpr>), BackendError> {
    if scale <= 0.0 || !scale.is_finite() {
        return Err(BackendError::BadScale { scale });
    }
    let x = rate_sum.scaled(std::f64::consts::LN_2 / scale);
    let mut z = eta.clone();
    z.constant += 1.0;
    Ok((Cone::Exp, vec![x, LinearExpr::constant(1.0), z]))
}
