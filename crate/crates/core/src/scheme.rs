//! The symmetric three-layer time-stepper: initialization of layers 0 and 1,
//! the per-step linear solve, and the full run loop.
//!
//! For `k = 1..n−1`, with `q_k = α(t_k) + β(t_k)·(L_h u_k, u_k)` evaluated at
//! the middle layer, the step solves
//!
//! ```text
//! (2I + τ²·q_k·L_h) u_{k+1} = g_k,
//! g_k = 2(τ²f_k + 2u_k) − (2I + τ²·q_k·L_h) u_{k−1}.
//! ```
//!
//! The step matrix is SPD for every `τ` and `q_k > 0`, so each solve succeeds
//! unconditionally; no stability restriction on `τ` is imposed. Blow-up, if
//! any, is detected by a finite-value guard and reported as a divergence
//! error carrying the offending step.

use crate::analysis::DiagnosticsTrace;
use crate::error::SolverError;
use crate::grid::{SpatialGrid, TemporalGrid};
use crate::linsolve::{build_step_matrix, solve_tridiagonal};
use crate::operators::{apply_l0, energy_seminorm_sq, eval_q, inner_l2, l2_norm, Layer};
use crate::problems::ProblemSpec;

/// Knobs for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepConfig {
    /// Keep every layer in the returned history (`n+1` layers). When false,
    /// only layers 0 and n are retained.
    pub store_full_history: bool,
    /// Record the per-step diagnostics trace.
    pub diagnostics_enabled: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            store_full_history: true,
            diagnostics_enabled: true,
        }
    }
}

/// The layers produced by a run, the grid they live on, and the nonlocal
/// coefficients `q_k` used at the interior steps `k = 1..n−1`.
#[derive(Debug, Clone)]
pub struct SolutionHistory {
    pub layers: Vec<Layer>,
    pub times: TemporalGrid,
    pub q_values: Vec<f64>,
}

impl SolutionHistory {
    /// True when every layer `0..=n` is present.
    pub fn is_full(&self) -> bool {
        self.layers.len() == self.times.n + 1
    }

    /// Final layer.
    pub fn last(&self) -> &Layer {
        self.layers
            .last()
            .expect("history holds at least two layers")
    }
}

/// Initialize layers 0 and 1:
/// `u₀ = ψ₀` sampled at interior nodes, and
/// `u₁ = ψ₀ + τψ₁ + (τ²/2)ψ₂` with `ψ₂ = f(·,0) + q₀·ψ₀''`, where
/// `q₀ = α(0) + β(0)·∫(ψ₀)_x²` and `ψ₀''` is the problem's closed-form
/// second derivative when supplied, else `−L_h ψ₀`.
pub fn init_layers(
    problem: &ProblemSpec,
    sgrid: &SpatialGrid,
    tgrid: &TemporalGrid,
) -> Result<(Layer, Layer), SolverError> {
    let tau = tgrid.tau;
    let u0 = Layer::from_fn(sgrid, |x| (problem.psi0)(x));
    let q0 = eval_q(0.0, &u0, problem, sgrid)?;

    let psi0_xx: Vec<f64> = match &problem.psi0_xx {
        Some(f) => sgrid.interior_nodes().map(|x| f(x)).collect(),
        None => apply_l0(&u0, sgrid)?.values.iter().map(|v| -v).collect(),
    };

    let half_tau2 = 0.5 * tau * tau;
    let values = sgrid
        .interior_nodes()
        .enumerate()
        .map(|(j, x)| {
            let psi2 = (problem.source)(x, 0.0) + q0 * psi0_xx[j];
            u0.values[j] + tau * (problem.psi1)(x) + half_tau2 * psi2
        })
        .collect();
    Ok((u0, Layer { values }))
}

/// Advance one step: from layers `k−1` and `k`, produce layer `k+1` and the
/// coefficient `q_k` that was used. Requires `1 ≤ k ≤ n−1`.
pub fn step(
    u_prev: &Layer,
    u_curr: &Layer,
    k: usize,
    problem: &ProblemSpec,
    sgrid: &SpatialGrid,
    tgrid: &TemporalGrid,
) -> Result<(Layer, f64), SolverError> {
    if k < 1 || k > tgrid.n - 1 {
        return Err(SolverError::invalid(format!(
            "step: index k = {k} outside 1..={}",
            tgrid.n - 1
        )));
    }
    let t_k = tgrid.node(k);
    let q = eval_q(t_k, u_curr, problem, sgrid)?;
    if !q.is_finite() {
        return Err(SolverError::Divergence {
            step: k,
            time: t_k,
            level: None,
        });
    }
    let tau2 = tgrid.tau * tgrid.tau;
    let sys = build_step_matrix(q, tgrid.tau, sgrid)?;
    let lh_prev = apply_l0(u_prev, sgrid)?;
    if u_curr.len() != sgrid.m {
        return Err(SolverError::invalid(
            "step: middle layer does not match the grid",
        ));
    }

    let mut g = vec![0.0; sgrid.m];
    for (j, x) in sgrid.interior_nodes().enumerate() {
        let f_kj = (problem.source)(x, t_k);
        g[j] = 2.0 * (tau2 * f_kj + 2.0 * u_curr.values[j])
            - (2.0 * u_prev.values[j] + tau2 * q * lh_prev.values[j]);
    }
    let next = solve_tridiagonal(&sys, &g)?;
    Ok((Layer { values: next }, q))
}

/// Scaled max-norm residual of the three-layer scheme at step `k`:
///
/// ```text
/// ‖ (u_{k+1} − 2u_k + u_{k−1})/τ² + (q_k/2)(L_h u_{k+1} + L_h u_{k−1}) − f_k ‖∞
/// ```
///
/// divided by `max(1, ‖f_k‖∞, ‖u_{k−1}‖∞, ‖u_k‖∞, ‖u_{k+1}‖∞)`. Evaluates the
/// scheme directly, independently of the tridiagonal solve path.
#[allow(clippy::too_many_arguments)]
pub fn step_residual_scaled(
    u_prev: &Layer,
    u_curr: &Layer,
    u_next: &Layer,
    q: f64,
    k: usize,
    problem: &ProblemSpec,
    sgrid: &SpatialGrid,
    tgrid: &TemporalGrid,
) -> Result<f64, SolverError> {
    let t_k = tgrid.node(k);
    let inv_tau2 = 1.0 / (tgrid.tau * tgrid.tau);
    let lh_next = apply_l0(u_next, sgrid)?;
    let lh_prev = apply_l0(u_prev, sgrid)?;
    if u_curr.len() != sgrid.m {
        return Err(SolverError::invalid(
            "step_residual_scaled: middle layer does not match the grid",
        ));
    }
    let mut worst = 0.0_f64;
    let mut f_inf = 0.0_f64;
    for (j, x) in sgrid.interior_nodes().enumerate() {
        let f_kj = (problem.source)(x, t_k);
        f_inf = f_inf.max(f_kj.abs());
        let r = (u_next.values[j] - 2.0 * u_curr.values[j] + u_prev.values[j]) * inv_tau2
            + 0.5 * q * (lh_next.values[j] + lh_prev.values[j])
            - f_kj;
        worst = worst.max(r.abs());
    }
    let scale = 1.0_f64
        .max(f_inf)
        .max(u_prev.linf_norm())
        .max(u_curr.linf_norm())
        .max(u_next.linf_norm());
    Ok(worst / scale)
}

/// Run the scheme over the whole grid. Returns the history (all `n+1` layers
/// when `store_full_history` is set) and, when enabled, the diagnostics
/// trace. Two runs with identical inputs produce bit-identical output.
pub fn run(
    problem: &ProblemSpec,
    sgrid: &SpatialGrid,
    tgrid: &TemporalGrid,
    config: StepConfig,
) -> Result<(SolutionHistory, Option<DiagnosticsTrace>), SolverError> {
    problem.validate_on_grid(tgrid)?;
    let n = tgrid.n;

    let (u0, u1) = init_layers(problem, sgrid, tgrid)?;
    if !u0.all_finite() {
        return Err(SolverError::Divergence {
            step: 0,
            time: 0.0,
            level: None,
        });
    }
    if !u1.all_finite() {
        return Err(SolverError::Divergence {
            step: 1,
            time: tgrid.node(1),
            level: None,
        });
    }

    let mut diag = if config.diagnostics_enabled {
        Some(DiagnosticsBuilder::new(problem, sgrid, tgrid))
    } else {
        None
    };
    if let Some(d) = &mut diag {
        d.push(0, &u0, None)?;
        d.push(1, &u1, Some(&u0))?;
    }

    let mut layers = Vec::with_capacity(if config.store_full_history { n + 1 } else { 2 });
    layers.push(u0.clone());
    if config.store_full_history {
        layers.push(u1.clone());
    }

    let mut q_values = Vec::with_capacity(n - 1);
    let mut prev = u0;
    let mut curr = u1;
    for k in 1..n {
        let (next, q) = step(&prev, &curr, k, problem, sgrid, tgrid)?;
        if !next.all_finite() {
            return Err(SolverError::Divergence {
                step: k + 1,
                time: tgrid.node(k + 1),
                level: None,
            });
        }
        q_values.push(q);
        if let Some(d) = &mut diag {
            d.push(k + 1, &next, Some(&curr))?;
        }
        if config.store_full_history {
            layers.push(next.clone());
        }
        prev = curr;
        curr = next;
    }
    if !config.store_full_history {
        layers.push(curr);
    }

    let history = SolutionHistory {
        layers,
        times: *tgrid,
        q_values,
    };
    Ok((history, diag.map(DiagnosticsBuilder::finish)))
}

/// Accumulates the per-layer quantities backing the a-priori boundedness
/// check: `μ_k = ‖Δu_{k−1}/τ‖²`, `γ_k = (L_h u_k, u_k)`, the composite
/// `δ_k = sqrt(λ_k + ξ_k)` with `λ_k = μ_k + ½(α_{k−1}+β_{k−1}γ_{k−1})γ_k`
/// and `ξ_k = ½α_k γ_{k−1}`, plus `‖L_h u_k‖`, `‖L_h^{1/2}(Δu_{k−1}/τ)‖`
/// (via the energy quadratic form), `q_k` and `‖f_k‖`.
struct DiagnosticsBuilder<'a> {
    problem: &'a ProblemSpec,
    sgrid: &'a SpatialGrid,
    tgrid: &'a TemporalGrid,
    trace: DiagnosticsTrace,
}

impl<'a> DiagnosticsBuilder<'a> {
    fn new(problem: &'a ProblemSpec, sgrid: &'a SpatialGrid, tgrid: &'a TemporalGrid) -> Self {
        let n = tgrid.n;
        DiagnosticsBuilder {
            problem,
            sgrid,
            tgrid,
            trace: DiagnosticsTrace {
                mu: Vec::with_capacity(n),
                gamma: Vec::with_capacity(n + 1),
                q: Vec::with_capacity(n + 1),
                lh_norm: Vec::with_capacity(n + 1),
                half_diff: Vec::with_capacity(n),
                delta: Vec::with_capacity(n),
                f_norm: Vec::with_capacity(n + 1),
            },
        }
    }

    fn push(&mut self, k: usize, u_k: &Layer, u_prev: Option<&Layer>) -> Result<(), SolverError> {
        let t_k = self.tgrid.node(k);
        let lh = apply_l0(u_k, self.sgrid)?;
        let gamma_k = inner_l2(&lh, u_k, self.sgrid)?;
        self.trace.gamma.push(gamma_k);
        self.trace.lh_norm.push(l2_norm(&lh, self.sgrid)?);
        self.trace
            .q
            .push((self.problem.alpha)(t_k) + (self.problem.beta)(t_k) * gamma_k);
        let f_k = Layer::from_fn(self.sgrid, |x| (self.problem.source)(x, t_k));
        self.trace.f_norm.push(l2_norm(&f_k, self.sgrid)?);

        if let Some(up) = u_prev {
            let inv_tau = 1.0 / self.tgrid.tau;
            let diff = Layer {
                values: u_k
                    .values
                    .iter()
                    .zip(&up.values)
                    .map(|(a, b)| (a - b) * inv_tau)
                    .collect(),
            };
            let mu_k = inner_l2(&diff, &diff, self.sgrid)?;
            self.trace.mu.push(mu_k);
            self.trace
                .half_diff
                .push(energy_seminorm_sq(&diff, self.sgrid)?.sqrt());

            // γ and coefficient values at k−1 enter λ_k and ξ_k
            let t_prev = self.tgrid.node(k - 1);
            let gamma_prev = self.trace.gamma[k - 1];
            let lambda_k = mu_k
                + 0.5
                    * ((self.problem.alpha)(t_prev) + (self.problem.beta)(t_prev) * gamma_prev)
                    * gamma_k;
            let xi_k = 0.5 * (self.problem.alpha)(t_k) * gamma_prev;
            self.trace.delta.push((lambda_k + xi_k).sqrt());
        }
        Ok(())
    }

    fn finish(self) -> DiagnosticsTrace {
        self.trace
    }
}
