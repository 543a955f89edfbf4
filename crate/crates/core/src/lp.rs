//! Small linear programs over diagonal tests `T = U diag(w) U†`, `w ∈ [0,1]^d`.
//!
//! Once a basis is fixed, both minimax problems below become LPs in the
//! diagonal weights. The rows `a_i`, `b_j` are the diagonals of the operators
//! in that basis.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

fn lp_error(e: impl std::fmt::Display) -> Error {
    Error::NonConvergence(format!("LP solver: {e}"))
}

/// `min_w max_i <a_i, 1 − w> + max_j <b_j, w>`.
pub(crate) fn minimax_error_diag(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let d = a[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<_> = (0..d).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let z1 = lp.add_var(1.0, (0.0, f64::INFINITY));
    let z2 = lp.add_var(1.0, (0.0, f64::INFINITY));
    for ai in a {
        // z1 ≥ Σ a_ik (1 − w_k)
        let expr: Vec<_> = std::iter::once((z1, 1.0))
            .chain(w.iter().zip(ai).map(|(&v, &c)| (v, c)))
            .collect();
        lp.add_constraint(expr, ComparisonOp::Ge, ai.iter().sum());
    }
    for bj in b {
        let expr: Vec<_> = std::iter::once((z2, 1.0))
            .chain(w.iter().zip(bj).map(|(&v, &c)| (v, -c)))
            .collect();
        lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
    }
    let sol = lp
        .solve()
        .map_err(lp_error)?
        .into_solution()
        .map_err(|_| lp_error("interrupted"))?;
    let weights = w.iter().map(|&v| sol.var_value(v).clamp(0.0, 1.0)).collect();
    Ok((sol.objective(), weights))
}

/// `min_w max_j <b_j, w>` subject to `<a_i, w> ≥ 1 − ε` for every `i`.
pub(crate) fn set_beta_diag(a: &[Vec<f64>], b: &[Vec<f64>], eps: f64) -> Result<(f64, Vec<f64>)> {
    let d = a[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<_> = (0..d).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let z = lp.add_var(1.0, (0.0, f64::INFINITY));
    for ai in a {
        let expr: Vec<_> = w.iter().zip(ai).map(|(&v, &c)| (v, c)).collect();
        // Slightly tightened so that round-off in the solver cannot leave the
        // constraint violated.
        lp.add_constraint(expr, ComparisonOp::Ge, 1.0 - eps + 1e-13);
    }
    for bj in b {
        let expr: Vec<_> = std::iter::once((z, 1.0))
            .chain(w.iter().zip(bj).map(|(&v, &c)| (v, -c)))
            .collect();
        lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
    }
    let sol = lp
        .solve()
        .map_err(lp_error)?
        .into_solution()
        .map_err(|_| lp_error("interrupted"))?;
    let weights = w.iter().map(|&v| sol.var_value(v).clamp(0.0, 1.0)).collect();
    Ok((sol.objective(), weights))
}
