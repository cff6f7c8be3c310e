//! Independent numerical oracles used to vet the rest of the library.
//!
//! Nothing here shares code with the solver path: derivatives come from
//! high-order central differences applied to the exact solution alone,
//! integrals from composite trapezoid quadrature, and linear solves from
//! dense Gaussian elimination with partial pivoting. Hand-derived
//! manufactured sources must pass [`max_pde_residual`] before any
//! convergence result that uses them is trusted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolverError;
use crate::linsolve::TridiagonalSystem;
use crate::problems::ProblemSpec;

/// Sixth-order central second derivative,
/// `f''(x) ≈ [2f(x−3d) − 27f(x−2d) + 270f(x−d) − 490f(x) + 270f(x+d) − 27f(x+2d) + 2f(x+3d)] / (180d²)`.
pub fn d2_central(f: impl Fn(f64) -> f64, x: f64, d: f64) -> f64 {
    (2.0 * f(x - 3.0 * d) - 27.0 * f(x - 2.0 * d) + 270.0 * f(x - d) - 490.0 * f(x)
        + 270.0 * f(x + d)
        - 27.0 * f(x + 2.0 * d)
        + 2.0 * f(x + 3.0 * d))
        / (180.0 * d * d)
}

/// Sixth-order central first derivative,
/// `f'(x) ≈ [−f(x−3d) + 9f(x−2d) − 45f(x−d) + 45f(x+d) − 9f(x+2d) + f(x+3d)] / (60d)`.
pub fn d1_central(f: impl Fn(f64) -> f64, x: f64, d: f64) -> f64 {
    (-f(x - 3.0 * d) + 9.0 * f(x - 2.0 * d) - 45.0 * f(x - d) + 45.0 * f(x + d)
        - 9.0 * f(x + 2.0 * d)
        + f(x + 3.0 * d))
        / (60.0 * d)
}

/// Composite trapezoid rule on `[a, b]` with `intervals ≥ 1` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(intervals >= 1, "trapezoid needs at least one panel");
    let h = (b - a) / intervals as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..intervals {
        s += f(a + i as f64 * h);
    }
    s * h
}

/// Max absolute PDE residual `|u_tt − (α + β·I)·u_xx − f|` of a manufactured
/// problem at `n_points` random points of `(0,ℓ)×(0,t_max]`, with `u_tt` and
/// `u_xx` obtained by finite differences of the exact `u` alone and `I` taken
/// from the closed-form energy integral.
///
/// The stencil steps are `ℓ/100` in space and `max(1, t_max)/100` in time,
/// so the exact-solution callables must be evaluable slightly outside the
/// domain (closed-form expressions are).
pub fn max_pde_residual(
    problem: &ProblemSpec,
    n_points: usize,
    seed: u64,
    t_max: f64,
) -> Result<f64, SolverError> {
    let exact = problem.exact.as_ref().ok_or_else(|| {
        SolverError::invalid("max_pde_residual: problem has no exact solution attached")
    })?;
    if n_points == 0 || !t_max.is_finite() || t_max <= 0.0 {
        return Err(SolverError::invalid(
            "max_pde_residual: need n_points ≥ 1 and t_max > 0",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dx = problem.ell / 100.0;
    let dt = t_max.max(1.0) / 100.0;
    let mut worst = 0.0_f64;
    for _ in 0..n_points {
        let x = rng.gen_range(0.0..problem.ell);
        let t = rng.gen_range(0.0..t_max);
        let u = exact.u.clone();
        let u_tt = d2_central(|s| u(x, s), t, dt);
        let u_xx = d2_central(|s| u(s, t), x, dx);
        let coeff = (problem.alpha)(t) + (problem.beta)(t) * (exact.energy_integral)(t);
        let r = u_tt - coeff * u_xx - (problem.source)(x, t);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Max absolute difference between the closed-form energy integral `I(t)` and
/// high-resolution trapezoid quadrature of `u_x²`, with `u_x` obtained by
/// finite differences of the exact `u`, at `n_times` random times in
/// `(0, t_max]`.
pub fn max_energy_integral_error(
    problem: &ProblemSpec,
    n_times: usize,
    seed: u64,
    t_max: f64,
    intervals: usize,
) -> Result<f64, SolverError> {
    let exact = problem.exact.as_ref().ok_or_else(|| {
        SolverError::invalid("max_energy_integral_error: problem has no exact solution attached")
    })?;
    if n_times == 0 || intervals == 0 || !t_max.is_finite() || t_max <= 0.0 {
        return Err(SolverError::invalid(
            "max_energy_integral_error: need n_times ≥ 1, intervals ≥ 1, t_max > 0",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dx = problem.ell / 100.0;
    let mut worst = 0.0_f64;
    for _ in 0..n_times {
        let t = rng.gen_range(0.0..t_max);
        let u = exact.u.clone();
        let integrand = |x: f64| {
            let ux = d1_central(|s| u(s, t), x, dx);
            ux * ux
        };
        let quad = trapezoid(integrand, 0.0, problem.ell, intervals);
        worst = worst.max((quad - (exact.energy_integral)(t)).abs());
    }
    Ok(worst)
}

/// Expand a tridiagonal system into a dense row-major matrix.
pub fn dense_from_tridiagonal(sys: &TridiagonalSystem) -> Vec<Vec<f64>> {
    let m = sys.order();
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m {
        a[i][i] = sys.diag[i];
        if i > 0 {
            a[i][i - 1] = sys.sub[i - 1];
        }
        if i + 1 < m {
            a[i][i + 1] = sys.sup[i];
        }
    }
    a
}

/// Dense matrix-vector product.
pub fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

/// Dense Gaussian elimination with partial pivoting. Reference route only;
/// O(m³).
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, SolverError> {
    let m = a.len();
    if m == 0 || a.iter().any(|row| row.len() != m) || b.len() != m {
        return Err(SolverError::invalid(
            "dense_solve: matrix must be square and match the rhs length",
        ));
    }
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return Err(SolverError::SingularSystem {
                row: col,
                pivot: a[pivot_row][col],
            });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for i in col + 1..m {
            let (head, tail) = a.split_at_mut(i);
            let pivot = &head[col];
            let row = &mut tail[0];
            let factor = row[col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (r, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *r -= factor * p;
            }
            b[i] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = b[i];
        for j in i + 1..m {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}
