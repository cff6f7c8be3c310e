//! Error norms of the temporal error estimate, convergence-order estimation,
//! the a-priori boundedness check, and standalone discrete-inequality
//! utilities (Grönwall-type bound and the Rogava–Tsiklauri recursion bound)
//! with brute-force randomized verifiers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::SolverError;
use crate::grid::{SpatialGrid, TemporalGrid};
use crate::operators::{energy_seminorm_sq, inner_l2, Layer};
use crate::problems::{ExactSolution, ProblemSpec};
use crate::scheme::{run, SolutionHistory, StepConfig};

/// Relative slack used when comparing floating-point realizations of
/// inequalities that are sharp (attained with equality) in exact arithmetic.
const REL_SLACK: f64 = 1e-12;

/// Per-step bounded quantities recorded during a run.
///
/// Index conventions, `n` being the step count:
/// `gamma`, `q`, `lh_norm`, `f_norm` have `n+1` entries for layers `0..=n`;
/// `mu`, `half_diff`, `delta` have `n` entries where entry `k−1` belongs to
/// `k = 1..=n` (they involve the backward difference `Δu_{k−1}/τ`).
#[derive(Debug, Clone, Default, Serialize)]
pub struct DiagnosticsTrace {
    /// `μ_k = ‖Δu_{k−1}/τ‖²`.
    pub mu: Vec<f64>,
    /// `γ_k = (L_h u_k, u_k)`.
    pub gamma: Vec<f64>,
    /// `q_k = α_k + β_k·γ_k`.
    pub q: Vec<f64>,
    /// `‖L_h u_k‖`.
    pub lh_norm: Vec<f64>,
    /// `‖L_h^{1/2}(Δu_{k−1}/τ)‖`, computed through the energy quadratic form.
    pub half_diff: Vec<f64>,
    /// `δ_k = sqrt(λ_k + ξ_k)`, the composite controlled by the a-priori bound.
    pub delta: Vec<f64>,
    /// `‖f(·, t_k)‖`.
    pub f_norm: Vec<f64>,
}

impl DiagnosticsTrace {
    pub fn all_finite(&self) -> bool {
        [
            &self.mu,
            &self.gamma,
            &self.q,
            &self.lh_norm,
            &self.half_diff,
            &self.delta,
            &self.f_norm,
        ]
        .iter()
        .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Per-layer error norms against an exact solution.
#[derive(Debug, Clone, Serialize)]
pub struct PerLayerError {
    pub k: usize,
    pub t: f64,
    /// `‖z_k‖`.
    pub l2: f64,
    /// `‖dz_k/dx‖` (discrete energy seminorm).
    pub grad: f64,
    /// `‖(z_{k+1} − z_k)/τ‖`; absent on the last layer.
    pub dt: Option<f64>,
}

/// Error norms of a run against the exact solution: `z_k = u(·,t_k) − u_k`.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    /// `max_{1≤k≤n} ‖dz_k/dx‖`.
    pub max_grad_err: f64,
    /// `max_{0≤k≤n−1} ‖(z_{k+1} − z_k)/τ‖`.
    pub max_dt_err: f64,
    /// `max_{1≤k≤n} ‖z_k‖`.
    pub max_l2_err: f64,
    /// `‖z_0‖` (zero whenever layer 0 is the sampled initial data).
    pub z0_l2: f64,
    pub per_layer: Vec<PerLayerError>,
}

impl ErrorReport {
    /// The telescoping identity `z_k = z_0 + τ·Σ Δz_i/τ` forces
    /// `max‖z_k‖ ≤ T·max‖Δz/τ‖ + ‖z_0‖`; true for every computed report.
    pub fn satisfies_telescoping_bound(&self, t_final: f64) -> bool {
        self.max_l2_err <= t_final * self.max_dt_err + self.z0_l2 + REL_SLACK
    }
}

/// Compute the error norms of a full history against `exact`.
pub fn error_norms(
    history: &SolutionHistory,
    exact: &ExactSolution,
    sgrid: &SpatialGrid,
    tgrid: &TemporalGrid,
) -> Result<ErrorReport, SolverError> {
    if !history.is_full() {
        return Err(SolverError::invalid(
            "error_norms: history does not hold all n+1 layers (store_full_history was off?)",
        ));
    }
    let n = tgrid.n;
    let inv_tau = 1.0 / tgrid.tau;

    let z: Vec<Layer> = (0..=n)
        .map(|k| {
            let t = tgrid.node(k);
            let layer = &history.layers[k];
            if layer.len() != sgrid.m {
                return Err(SolverError::invalid(
                    "error_norms: layer does not match the spatial grid",
                ));
            }
            Ok(Layer {
                values: sgrid
                    .interior_nodes()
                    .enumerate()
                    .map(|(j, x)| (exact.u)(x, t) - layer.values[j])
                    .collect(),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut per_layer = Vec::with_capacity(n + 1);
    let mut max_grad = 0.0_f64;
    let mut max_dt = 0.0_f64;
    let mut max_l2 = 0.0_f64;
    for k in 0..=n {
        let l2 = inner_l2(&z[k], &z[k], sgrid)?.sqrt();
        let grad = energy_seminorm_sq(&z[k], sgrid)?.sqrt();
        let dt = if k < n {
            let diff = Layer {
                values: z[k + 1]
                    .values
                    .iter()
                    .zip(&z[k].values)
                    .map(|(a, b)| (a - b) * inv_tau)
                    .collect(),
            };
            let d = inner_l2(&diff, &diff, sgrid)?.sqrt();
            max_dt = max_dt.max(d);
            Some(d)
        } else {
            None
        };
        if k >= 1 {
            max_grad = max_grad.max(grad);
            max_l2 = max_l2.max(l2);
        }
        per_layer.push(PerLayerError {
            k,
            t: tgrid.node(k),
            l2,
            grad,
            dt,
        });
    }
    Ok(ErrorReport {
        max_grad_err: max_grad,
        max_dt_err: max_dt,
        max_l2_err: max_l2,
        z0_l2: per_layer[0].l2,
        per_layer,
    })
}

/// One refinement level of a convergence study. `order_*` holds
/// `log₂(err_r / err_{r+1})`, the observed order between this row and the
/// next finer one; absent on the finest row.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub tau: f64,
    pub max_grad_err: f64,
    pub max_dt_err: f64,
    pub max_l2_err: f64,
    pub order_grad: Option<f64>,
    pub order_dt: Option<f64>,
    pub order_l2: Option<f64>,
}

/// Temporal-refinement table: `n` doubles (τ halves) from row to row.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// The orders observed on the `count` finest ratios, coarsest first.
    /// Each entry is `(order_grad, order_dt, order_l2)`.
    pub fn finest_orders(&self, count: usize) -> Vec<(f64, f64, f64)> {
        let with_order: Vec<&ConvergenceRow> = self
            .rows
            .iter()
            .filter(|r| r.order_grad.is_some())
            .collect();
        with_order
            .iter()
            .skip(with_order.len().saturating_sub(count))
            .map(|r| {
                (
                    r.order_grad.unwrap(),
                    r.order_dt.unwrap(),
                    r.order_l2.unwrap(),
                )
            })
            .collect()
    }
}

/// Run the scheme at `levels ≥ 3` temporal refinements `n = base_n·2^r`
/// (spatial grid fixed) and tabulate the error norms with observed orders.
/// The caller keeps the spatial grid fine enough that spatial error is
/// subdominant; the guidance is `h² ≲ τ²_finest/10`.
pub fn convergence_study(
    problem: &ProblemSpec,
    sgrid: &SpatialGrid,
    t_final: f64,
    base_n: usize,
    levels: usize,
) -> Result<ConvergenceTable, SolverError> {
    if levels < 3 {
        return Err(SolverError::invalid(format!(
            "convergence_study: need at least 3 levels to estimate a trend, got {levels}"
        )));
    }
    if levels > 30 {
        return Err(SolverError::invalid("convergence_study: too many levels"));
    }
    if base_n < 2 {
        return Err(SolverError::invalid(
            "convergence_study: base step count must be at least 2",
        ));
    }
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| {
            SolverError::invalid(format!(
                "convergence_study: problem '{}' has no exact solution",
                problem.name
            ))
        })?
        .clone();
    let finest = base_n
        .checked_shl((levels - 1) as u32)
        .filter(|&n| n <= 10_000_000)
        .ok_or_else(|| SolverError::invalid("convergence_study: refinement overflows"))?;
    let _ = finest;

    let config = StepConfig {
        store_full_history: true,
        diagnostics_enabled: false,
    };
    let mut rows = Vec::with_capacity(levels);
    for r in 0..levels {
        let n = base_n << r;
        let tgrid = TemporalGrid::new(t_final, n)?;
        let (history, _) = run(problem, sgrid, &tgrid, config).map_err(|e| match e {
            SolverError::Divergence { step, time, .. } => SolverError::Divergence {
                step,
                time,
                level: Some(r),
            },
            other => other,
        })?;
        let report = error_norms(&history, &exact, sgrid, &tgrid)?;
        rows.push(ConvergenceRow {
            n,
            tau: tgrid.tau,
            max_grad_err: report.max_grad_err,
            max_dt_err: report.max_dt_err,
            max_l2_err: report.max_l2_err,
            order_grad: None,
            order_dt: None,
            order_l2: None,
        });
    }
    for r in 0..levels - 1 {
        let next = rows[r + 1].clone();
        let row = &mut rows[r];
        row.order_grad = Some((row.max_grad_err / next.max_grad_err).log2());
        row.order_dt = Some((row.max_dt_err / next.max_dt_err).log2());
        row.order_l2 = Some((row.max_l2_err / next.max_l2_err).log2());
    }
    Ok(ConvergenceTable { rows })
}

fn check_nonnegative(name: &str, v: &[f64]) -> Result<(), SolverError> {
    if v.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(SolverError::invalid(format!(
            "{name}: entries must be nonnegative and finite"
        )));
    }
    Ok(())
}

/// The discrete Grönwall-type bound: given nonnegative `a = (a_1..a_k)` and
/// `h = (h_0..h_k)`, any nonnegative sequence with
/// `ε_{j+1} ≤ Σ_{i=1..j} a_i ε_i + Σ_{i=0..j} h_i` satisfies
/// `ε_{k+1} ≤ Σ_{i=1..k} α_{i,k}·h_{i−1} + h_k`, `α_{i,k} = Π_{j=i..k}(1+a_j)`.
/// Returns that bound.
pub fn gronwall_bound(a: &[f64], h: &[f64]) -> Result<f64, SolverError> {
    check_nonnegative("gronwall_bound: a", a)?;
    check_nonnegative("gronwall_bound: h", h)?;
    if h.len() != a.len() + 1 {
        return Err(SolverError::invalid(format!(
            "gronwall_bound: need len(h) = len(a) + 1, got {} and {}",
            h.len(),
            a.len()
        )));
    }
    let k = a.len();
    let mut bound = h[k];
    let mut prod = 1.0;
    for i in (1..=k).rev() {
        prod *= 1.0 + a[i - 1];
        bound += prod * h[i - 1];
    }
    Ok(bound)
}

/// The exponential relaxation of [`gronwall_bound`] obtained from the AM-GM
/// inequality: `e^{Σ a_j}·Σ_{i=1..k} h_{i−1} + h_k`. Always dominates the
/// sharp bound.
pub fn gronwall_exp_bound(a: &[f64], h: &[f64]) -> Result<f64, SolverError> {
    check_nonnegative("gronwall_exp_bound: a", a)?;
    check_nonnegative("gronwall_exp_bound: h", h)?;
    if h.len() != a.len() + 1 {
        return Err(SolverError::invalid(format!(
            "gronwall_exp_bound: need len(h) = len(a) + 1, got {} and {}",
            h.len(),
            a.len()
        )));
    }
    let k = a.len();
    let nu: f64 = a.iter().sum();
    let head: f64 = h[..k].iter().sum();
    Ok(nu.exp() * head + h[k])
}

/// Outcome of [`gronwall_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GronwallVerdict {
    /// Premise satisfied everywhere and the concluding bound holds.
    Holds,
    /// The sequence violates the premise at `index` (the implication does not
    /// apply to it).
    PremiseViolated { index: usize },
    /// Premise satisfied but the bound failed; this falsifies the bound
    /// implementation and can only indicate a bug.
    BoundViolated { excess: f64 },
}

/// Verify the Grönwall implication on concrete data. `epsilon` holds
/// `(ε_1, …, ε_{k+1})` with `k = len(a)`; `ε_0` never enters the inequality.
pub fn gronwall_check(
    a: &[f64],
    h: &[f64],
    epsilon: &[f64],
) -> Result<GronwallVerdict, SolverError> {
    check_nonnegative("gronwall_check: epsilon", epsilon)?;
    let k = a.len();
    if h.len() != k + 1 || epsilon.len() != k + 1 {
        return Err(SolverError::invalid(format!(
            "gronwall_check: need len(h) = len(epsilon) = len(a) + 1, got a: {k}, h: {}, epsilon: {}",
            h.len(),
            epsilon.len()
        )));
    }
    let bound = gronwall_bound(a, h)?;

    let mut weighted = 0.0; // Σ_{i=1..j} a_i ε_i
    let mut hsum = 0.0; // Σ_{i=0..j} h_i
    for j in 0..=k {
        hsum += h[j];
        let rhs = weighted + hsum;
        if epsilon[j] > rhs * (1.0 + REL_SLACK) {
            return Ok(GronwallVerdict::PremiseViolated { index: j });
        }
        if j < k {
            weighted += a[j] * epsilon[j];
        }
    }
    if epsilon[k] > bound * (1.0 + REL_SLACK) {
        return Ok(GronwallVerdict::BoundViolated {
            excess: epsilon[k] - bound,
        });
    }
    Ok(GronwallVerdict::Holds)
}

/// A bound for the recursion bound of [`rt_bound`] at one index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RtBound {
    /// `t_k` lies inside the validity window; the value bounds `α_k`.
    InRange(f64),
    /// `t_k ≥ 1/(s·α^s·a_k)`; no bound is asserted there.
    OutOfRange,
}

/// Bound for nonnegative sequences satisfying
/// `α_{k+1} ≤ α_k(1 + τ·α_k^s) + τ·c_k` with `s, τ > 0`:
///
/// `α_k ≤ α / (1 − s·α^s·t_k·a_k)^{1/s}` while `t_k = kτ < 1/(s·α^s·a_k)`,
/// where `α = max(1, α_0)` and `a_k = 1 + max_{0≤i≤k} c_i`.
///
/// Returns one entry per index `k = 0..len(c)`.
pub fn rt_bound(alpha0: f64, s: f64, tau: f64, c: &[f64]) -> Result<Vec<RtBound>, SolverError> {
    if !s.is_finite() || s <= 0.0 {
        return Err(SolverError::invalid(format!(
            "rt_bound: exponent s must be positive and finite, got {s}"
        )));
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(SolverError::invalid(format!(
            "rt_bound: step tau must be positive and finite, got {tau}"
        )));
    }
    if alpha0 < 0.0 || !alpha0.is_finite() {
        return Err(SolverError::invalid(format!(
            "rt_bound: alpha0 must be nonnegative and finite, got {alpha0}"
        )));
    }
    check_nonnegative("rt_bound: c", c)?;

    let alpha = alpha0.max(1.0);
    let alpha_s = alpha.powf(s);
    let mut cmax = 0.0_f64;
    let mut out = Vec::with_capacity(c.len());
    for (k, &ck) in c.iter().enumerate() {
        cmax = cmax.max(ck);
        let a_k = 1.0 + cmax;
        let t_k = k as f64 * tau;
        if t_k < 1.0 / (s * alpha_s * a_k) {
            let denom = 1.0 - s * alpha_s * t_k * a_k;
            out.push(RtBound::InRange(alpha / denom.powf(1.0 / s)));
        } else {
            out.push(RtBound::OutOfRange);
        }
    }
    Ok(out)
}

/// Result of [`energy_bound_check`].
#[derive(Debug, Clone, Serialize)]
pub struct EnergyBoundReport {
    /// True when every margin is nonnegative and finite.
    pub holds: bool,
    /// `c₄ = 2·max(c₂, c₃/2)·max(1/c₀, 1/c₁)`.
    pub c4: f64,
    pub min_margin: f64,
    /// `margins[k−1] = e^{c₄t_k}(δ₁ + 2t_k·max_{1≤i≤k}‖f_i‖) − δ_{k+1}` for
    /// `k = 1..=n−1`.
    pub margins: Vec<f64>,
}

/// Check the a-priori bound
/// `δ_{k+1} ≤ e^{c₄t_k}(δ₁ + 2t_k·max_{1≤i≤k}‖f_i‖)`
/// on a recorded diagnostics trace. The constants are closed-form data of
/// the problem: `c₀ ≤ α`, `c₁ ≤ β` (both strictly positive here),
/// `c₂ = max|α′|`, `c₃ = max|β′|`. The bound is a provable property of the scheme;
/// a failed margin indicates an implementation bug, not a model property.
///
/// For conservative data (constant coefficients, zero source) the bound is
/// attained with equality — δ is exactly conserved — so the verdict grants
/// margins a rounding allowance of `1e-10·max(1, rhs)` for the float drift
/// the conserved composite accumulates over the run. Margins are reported
/// raw.
pub fn energy_bound_check(
    trace: &DiagnosticsTrace,
    c0: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    tgrid: &TemporalGrid,
) -> Result<EnergyBoundReport, SolverError> {
    // NaN constants fall through to the finiteness check below
    if c0 <= 0.0 || c1 <= 0.0 || c2 < 0.0 || c3 < 0.0 {
        return Err(SolverError::invalid(format!(
            "energy_bound_check: constants must satisfy c0 > 0, c1 > 0, c2 ≥ 0, c3 ≥ 0, got ({c0}, {c1}, {c2}, {c3})"
        )));
    }
    if [c0, c1, c2, c3].iter().any(|c| !c.is_finite()) {
        return Err(SolverError::invalid(
            "energy_bound_check: constants must be finite",
        ));
    }
    let n = tgrid.n;
    if trace.delta.len() != n || trace.f_norm.len() != n + 1 {
        return Err(SolverError::invalid(format!(
            "energy_bound_check: trace is incomplete for n = {n} (delta: {}, f_norm: {})",
            trace.delta.len(),
            trace.f_norm.len()
        )));
    }

    let c4 = 2.0 * c2.max(0.5 * c3) * (1.0 / c0).max(1.0 / c1);
    let delta1 = trace.delta[0];
    let mut margins = Vec::with_capacity(n - 1);
    let mut fmax = 0.0_f64;
    let mut holds = true;
    let mut min_margin = f64::INFINITY;
    for k in 1..n {
        fmax = fmax.max(trace.f_norm[k]);
        let t_k = tgrid.node(k);
        let rhs = (c4 * t_k).exp() * (delta1 + 2.0 * t_k * fmax);
        let margin = rhs - trace.delta[k]; // trace.delta[k] = δ_{k+1}
        if margin.is_nan() || margin < -1e-10 * rhs.max(1.0) {
            holds = false;
        }
        min_margin = min_margin.min(margin);
        margins.push(margin);
    }
    Ok(EnergyBoundReport {
        holds,
        c4,
        min_margin,
        margins,
    })
}

/// Outcome of a randomized inequality suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub trials: u64,
    pub failures: u64,
    /// Largest relative excess over a bound observed across all trials
    /// (zero when everything held).
    pub worst_excess: f64,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.failures == 0
    }
}

/// Drive [`gronwall_check`] with seeded random instances of the maximal
/// equality recursion `ε_{j+1} := Σ a_i ε_i + Σ h_i` (which attains the
/// bound exactly) and with slack variants below it, also checking that the
/// exponential relaxation dominates the sharp bound.
pub fn gronwall_suite(seed: u64, trials: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0u64;
    let mut worst = 0.0_f64;
    for trial in 0..trials {
        let k = rng.gen_range(1..=200usize);
        let a_scale = [0.0, 0.05, 0.5, 2.0][rng.gen_range(0..4)];
        let h_scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let a: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..=1.0) * a_scale).collect();
        let h: Vec<f64> = (0..=k)
            .map(|_| rng.gen_range(0.0..=1.0) * h_scale)
            .collect();

        // maximal sequence on even trials, strictly admissible on odd ones
        let slack = if trial % 2 == 0 {
            1.0
        } else {
            rng.gen_range(0.0..1.0)
        };
        let mut epsilon = Vec::with_capacity(k + 1);
        let mut weighted = 0.0;
        let mut hsum = 0.0;
        for j in 0..=k {
            hsum += h[j];
            let eps = slack * (weighted + hsum);
            epsilon.push(eps);
            if j < k {
                weighted += a[j] * eps;
            }
        }

        let mut ok = matches!(gronwall_check(&a, &h, &epsilon), Ok(GronwallVerdict::Holds));
        let bound = gronwall_bound(&a, &h).expect("inputs are nonnegative");
        if epsilon[k] > bound * (1.0 + REL_SLACK) {
            ok = false;
            worst = worst.max((epsilon[k] - bound) / bound.max(1e-300));
        }
        let exp_bound = gronwall_exp_bound(&a, &h).expect("inputs are nonnegative");
        if bound > exp_bound * (1.0 + REL_SLACK) {
            ok = false;
            worst = worst.max((bound - exp_bound) / exp_bound.max(1e-300));
        }
        if !ok {
            failures += 1;
        }
    }
    SuiteReport {
        trials,
        failures,
        worst_excess: worst,
    }
}

/// Drive [`rt_bound`] with seeded random equality recursions
/// `α_{k+1} := α_k(1 + τ·α_k^s) + τ·c_k`; every in-range index must sit on
/// or below the bound.
pub fn rt_suite(seed: u64, trials: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0u64;
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let s: f64 = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let alpha0: f64 = rng.gen_range(0.0..=2.0);
        let tau = 10f64.powf(rng.gen_range(-3.0..=-1.0));
        let len = rng.gen_range(2..=400usize);
        let c: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..=1.0)).collect();

        let mut alpha_seq = Vec::with_capacity(len);
        alpha_seq.push(alpha0);
        for k in 0..len - 1 {
            let a = alpha_seq[k];
            let next = a * (1.0 + tau * a.powf(s)) + tau * c[k];
            alpha_seq.push(next);
            if !next.is_finite() {
                break;
            }
        }

        let bounds = rt_bound(alpha0, s, tau, &c).expect("inputs are valid");
        let mut ok = true;
        for (k, b) in bounds.iter().enumerate().take(alpha_seq.len()) {
            if let RtBound::InRange(limit) = b {
                if alpha_seq[k] > limit * (1.0 + REL_SLACK) {
                    ok = false;
                    worst = worst.max((alpha_seq[k] - limit) / limit.max(1e-300));
                }
            }
        }
        if !ok {
            failures += 1;
        }
    }
    SuiteReport {
        trials,
        failures,
        worst_excess: worst,
    }
}
