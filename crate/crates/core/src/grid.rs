//! Uniform spatial and temporal grids.
//!
//! Grids are stored as (step, count) pairs and node coordinates are computed
//! on demand as `j·h`, so spacing is exact by construction and trig
//! evaluations at nodes see no accumulation drift.

use crate::error::SolverError;

/// Uniform grid on `[0, ℓ]` with `m` interior nodes.
///
/// The mesh width is `h = ℓ/(m+1)`; nodes are `x_j = j·h` for
/// `j = 0..=m+1`. The boundary nodes `x_0` and `x_{m+1}` carry the
/// homogeneous Dirichlet data and are excluded from [`crate::Layer`]
/// vectors, which hold the `m` interior values only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    /// Domain length ℓ > 0.
    pub ell: f64,
    /// Number of interior nodes (≥ 2 when built through [`SpatialGrid::new`]).
    pub m: usize,
    /// Mesh width ℓ/(m+1).
    pub h: f64,
}

impl SpatialGrid {
    /// Build a uniform spatial grid. Requires `ell > 0` (finite) and `m ≥ 2`.
    pub fn new(ell: f64, m: usize) -> Result<Self, SolverError> {
        if !ell.is_finite() || ell <= 0.0 {
            return Err(SolverError::invalid(format!(
                "spatial grid: domain length must be positive and finite, got {ell}"
            )));
        }
        if m < 2 {
            return Err(SolverError::invalid(format!(
                "spatial grid: need at least 2 interior nodes, got {m}"
            )));
        }
        let h = ell / (m + 1) as f64;
        Ok(SpatialGrid { ell, m, h })
    }

    /// Coordinate of node `j` for `j = 0..=m+1`.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Index of the node nearest to `x`; the round trip `index_of(node(j)) == j`
    /// is exact for all grid nodes.
    #[inline]
    pub fn index_of(&self, x: f64) -> usize {
        (x / self.h).round() as usize
    }

    /// Coordinates of the interior nodes `x_1 .. x_m`.
    pub fn interior_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.m).map(|j| self.node(j))
    }
}

/// Uniform grid on `[0, T]` with `n` steps of size `τ = T/n`; `t_k = k·τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalGrid {
    /// Horizon T > 0.
    pub t_final: f64,
    /// Step count (≥ 2 when built through [`TemporalGrid::new`]).
    pub n: usize,
    /// Step size T/n.
    pub tau: f64,
}

impl TemporalGrid {
    /// Build a uniform temporal grid. Requires `t_final > 0` (finite) and `n ≥ 2`.
    pub fn new(t_final: f64, n: usize) -> Result<Self, SolverError> {
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(SolverError::invalid(format!(
                "temporal grid: horizon must be positive and finite, got {t_final}"
            )));
        }
        if n < 2 {
            return Err(SolverError::invalid(format!(
                "temporal grid: need at least 2 steps, got {n}"
            )));
        }
        let tau = t_final / n as f64;
        Ok(TemporalGrid { t_final, n, tau })
    }

    /// Time at layer `k` for `k = 0..=n`.
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.tau
    }
}
