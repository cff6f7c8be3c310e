//! Assembly and solution of the per-step tridiagonal system
//! `(2I + τ²·q_k·L_h) u_{k+1} = g_k`.
//!
//! The step matrix stores `2I + τ²q·L_h` with `L_h` the positive discrete
//! `−d²/dx²`, so every diagonal entry is positive and the matrix is strictly
//! diagonally dominant SPD: `2 + 2τ²q/h² > 2·τ²q/h²`. The Thomas algorithm
//! is unconditionally stable on such systems without pivoting; a pivot guard
//! converts malformed hand-built systems into a typed error.

use crate::error::SolverError;
use crate::grid::SpatialGrid;

/// Pivots smaller than this are treated as singular.
const PIVOT_FLOOR: f64 = 1e-300;

/// Tridiagonal matrix in banded form: `sub` and `sup` have length `m−1`,
/// `diag` has length `m`. Step matrices built by [`build_step_matrix`] are
/// symmetric (`sub == sup`) and strictly diagonally dominant.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TridiagonalSystem {
    /// Build from bands, validating the length relation.
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self, SolverError> {
        let m = diag.len();
        if m == 0 {
            return Err(SolverError::invalid("tridiagonal system: empty diagonal"));
        }
        if sub.len() + 1 != m || sup.len() + 1 != m {
            return Err(SolverError::invalid(format!(
                "tridiagonal system: band lengths {}/{}/{} violate (m-1, m, m-1)",
                sub.len(),
                m,
                sup.len()
            )));
        }
        Ok(TridiagonalSystem { sub, diag, sup })
    }

    /// Matrix order.
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product `A·x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        let m = self.order();
        if x.len() != m {
            return Err(SolverError::invalid(format!(
                "matvec: vector length {} does not match order {m}",
                x.len()
            )));
        }
        let mut y = vec![0.0; m];
        for i in 0..m {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < m {
                s += self.sup[i] * x[i + 1];
            }
            y[i] = s;
        }
        Ok(y)
    }
}

/// Assemble `2I + τ²·q·L_h` on `grid`:
/// diagonal entries `2 + 2τ²q/h²`, off-diagonal entries `−τ²q/h²`.
pub fn build_step_matrix(
    q: f64,
    tau: f64,
    grid: &SpatialGrid,
) -> Result<TridiagonalSystem, SolverError> {
    if !q.is_finite() || q <= 0.0 {
        return Err(SolverError::invalid(format!(
            "step matrix: coefficient q must be positive and finite, got {q}"
        )));
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(SolverError::invalid(format!(
            "step matrix: step size tau must be positive and finite, got {tau}"
        )));
    }
    let m = grid.m;
    let r = tau * tau * q / (grid.h * grid.h);
    Ok(TridiagonalSystem {
        sub: vec![-r; m - 1],
        diag: vec![2.0 + 2.0 * r; m],
        sup: vec![-r; m - 1],
    })
}

/// Solve `A·x = rhs` by the Thomas algorithm (no pivoting).
pub fn solve_tridiagonal(sys: &TridiagonalSystem, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    let m = sys.order();
    if rhs.len() != m {
        return Err(SolverError::invalid(format!(
            "solve_tridiagonal: rhs length {} does not match order {m}",
            rhs.len()
        )));
    }

    let mut factors = vec![0.0; m]; // eliminated superdiagonal
    let mut x = vec![0.0; m];

    let mut piv = sys.diag[0];
    if piv.abs() < PIVOT_FLOOR {
        return Err(SolverError::SingularSystem { row: 0, pivot: piv });
    }
    if m > 1 {
        factors[0] = sys.sup[0] / piv;
    }
    x[0] = rhs[0] / piv;

    for i in 1..m {
        piv = sys.diag[i] - sys.sub[i - 1] * factors[i - 1];
        if piv.abs() < PIVOT_FLOOR {
            return Err(SolverError::SingularSystem { row: i, pivot: piv });
        }
        if i + 1 < m {
            factors[i] = sys.sup[i] / piv;
        }
        x[i] = (rhs[i] - sys.sub[i - 1] * x[i - 1]) / piv;
    }

    for i in (0..m - 1).rev() {
        x[i] -= factors[i] * x[i + 1];
    }
    Ok(x)
}
