//! Problem definitions: coefficients, data, optional exact solution, the
//! manufactured-solution factory, and the built-in catalog.
//!
//! Functions are plain evaluation callables; the catalog maps stable string
//! keys to constructors so that configuration files reference keys instead
//! of serialized formulas.

use std::fmt;
use std::sync::Arc;

use crate::error::SolverError;
use crate::grid::TemporalGrid;

/// Pure function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Pure function of space.
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Pure function of space and time, called as `f(x, t)`.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Absolute tolerance for the compatibility conditions `ψ₀(0) = ψ₀(ℓ) = 0`
/// and `u(0,t) = u(ℓ,t) = 0`.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// Closed-form constants attached to a problem:
/// `c₀ ≤ α(t)`, `c₁ ≤ β(t)`, `c₂ = max|α′|`, `c₃ = max|β′|` on the horizon
/// of interest. `c₀` must be positive; `c₁ = 0` is admitted so the linear
/// limit `β ≡ 0` can be exercised, although the continuous theory assumes
/// `c₁ > 0` and the a-priori boundedness check requires it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CoefficientBounds {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CoefficientBounds {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.c0 > 0.0
            && self.c1 >= 0.0
            && self.c2 >= 0.0
            && self.c3 >= 0.0
            && [self.c0, self.c1, self.c2, self.c3]
                .iter()
                .all(|c| c.is_finite());
        if ok {
            Ok(())
        } else {
            Err(SolverError::invalid(format!(
                "coefficient bounds must satisfy c0 > 0, c1,c2,c3 ≥ 0 and be finite, got {self:?}"
            )))
        }
    }
}

/// Closed-form exact solution used for manufactured sources and error norms.
#[derive(Clone)]
pub struct ExactSolution {
    /// `u(x, t)`.
    pub u: SpaceTimeFn,
    /// `∂u/∂t`.
    pub u_t: SpaceTimeFn,
    /// `∂²u/∂x²`.
    pub u_xx: SpaceTimeFn,
    /// `I(t) = ∫₀^ℓ u_x(x,t)² dx` in closed form. Keeping it closed-form makes
    /// the manufactured source exact, so measured convergence error is
    /// attributable to the scheme alone.
    pub energy_integral: TimeFn,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution {{ .. }}")
    }
}

/// The continuous problem: coefficients `α`, `β`, source `f`, initial data
/// `ψ₀`, `ψ₁`, domain length `ℓ`, declared coefficient constants and an
/// optional exact solution.
#[derive(Clone)]
pub struct ProblemSpec {
    /// Catalog key or user label.
    pub name: String,
    /// Domain length ℓ > 0.
    pub ell: f64,
    pub alpha: TimeFn,
    pub beta: TimeFn,
    /// Source term `f(x, t)`.
    pub source: SpaceTimeFn,
    /// Initial displacement `ψ₀(x)`; must vanish at both ends.
    pub psi0: SpaceFn,
    /// Initial velocity `ψ₁(x)`.
    pub psi1: SpaceFn,
    /// Optional closed-form `ψ₀''`. When absent, layer initialization falls
    /// back to the discrete Laplacian of the sampled `ψ₀`.
    pub psi0_xx: Option<SpaceFn>,
    pub bounds: CoefficientBounds,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("ell", &self.ell)
            .field("bounds", &self.bounds)
            .field("has_exact", &self.exact.is_some())
            .field("has_psi0_xx", &self.psi0_xx.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Build a problem from raw data, checking `ℓ > 0`, the coefficient
    /// constants, and the compatibility conditions on `ψ₀`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        ell: f64,
        alpha: TimeFn,
        beta: TimeFn,
        source: SpaceTimeFn,
        psi0: SpaceFn,
        psi1: SpaceFn,
        bounds: CoefficientBounds,
    ) -> Result<Self, SolverError> {
        if !ell.is_finite() || ell <= 0.0 {
            return Err(SolverError::invalid(format!(
                "problem: domain length must be positive and finite, got {ell}"
            )));
        }
        bounds.validate()?;
        let p0 = psi0(0.0);
        let p1 = psi0(ell);
        if p0.abs() > COMPATIBILITY_TOL || p1.abs() > COMPATIBILITY_TOL {
            return Err(SolverError::invalid(format!(
                "problem: psi0 violates the compatibility conditions: psi0(0) = {p0:e}, psi0(ell) = {p1:e}"
            )));
        }
        Ok(ProblemSpec {
            name: name.into(),
            ell,
            alpha,
            beta,
            source,
            psi0,
            psi1,
            psi0_xx: None,
            bounds,
            exact: None,
        })
    }

    /// Attach an exact solution, checking its boundary compatibility and its
    /// consistency with `ψ₀`, `ψ₁` at sampled points.
    pub fn with_exact(mut self, exact: ExactSolution) -> Result<Self, SolverError> {
        check_exact_compatibility(&exact, self.ell)?;
        for i in 0..=32 {
            let x = self.ell * i as f64 / 32.0;
            let scale = 1.0_f64.max((self.psi0)(x).abs()).max((self.psi1)(x).abs());
            if ((exact.u)(x, 0.0) - (self.psi0)(x)).abs() > 1e-10 * scale
                || ((exact.u_t)(x, 0.0) - (self.psi1)(x)).abs() > 1e-10 * scale
            {
                return Err(SolverError::invalid(format!(
                    "problem: exact solution disagrees with the initial data at x = {x}"
                )));
            }
        }
        self.exact = Some(exact);
        Ok(self)
    }

    /// Attach a closed-form `ψ₀''` for layer initialization.
    pub fn with_psi0_xx(mut self, psi0_xx: SpaceFn) -> Self {
        self.psi0_xx = Some(psi0_xx);
        self
    }

    /// Check the declared bounds against the coefficients at every grid time,
    /// and the exact solution's boundary values when one is attached. Called
    /// by the run loop before time stepping.
    pub fn validate_on_grid(&self, tgrid: &TemporalGrid) -> Result<(), SolverError> {
        let slack = 1e-12;
        for k in 0..=tgrid.n {
            let t = tgrid.node(k);
            let a = (self.alpha)(t);
            let b = (self.beta)(t);
            if !a.is_finite() || a < self.bounds.c0 * (1.0 - slack) - slack {
                return Err(SolverError::invalid(format!(
                    "problem '{}': alpha({t}) = {a} violates declared lower bound c0 = {}",
                    self.name, self.bounds.c0
                )));
            }
            if !b.is_finite() || b < self.bounds.c1 * (1.0 - slack) - slack {
                return Err(SolverError::invalid(format!(
                    "problem '{}': beta({t}) = {b} violates declared lower bound c1 = {}",
                    self.name, self.bounds.c1
                )));
            }
            if let Some(exact) = &self.exact {
                let left = (exact.u)(0.0, t);
                let right = (exact.u)(self.ell, t);
                if left.abs() > COMPATIBILITY_TOL || right.abs() > COMPATIBILITY_TOL {
                    return Err(SolverError::invalid(format!(
                        "problem '{}': exact solution violates boundary conditions at t = {t}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_exact_compatibility(exact: &ExactSolution, ell: f64) -> Result<(), SolverError> {
    for i in 0..=32 {
        let t = 4.0 * i as f64 / 32.0;
        let left = (exact.u)(0.0, t);
        let right = (exact.u)(ell, t);
        if left.abs() > COMPATIBILITY_TOL || right.abs() > COMPATIBILITY_TOL {
            return Err(SolverError::invalid(format!(
                "exact solution violates u(0,t) = u(ell,t) = 0 at t = {t}: u(0) = {left:e}, u(ell) = {right:e}"
            )));
        }
    }
    Ok(())
}

/// Build a problem whose source is manufactured from a chosen exact solution:
/// `f := u_tt − (α(t) + β(t)·I(t))·u_xx`, `ψ₀ := u(·,0)`, `ψ₁ := u_t(·,0)`.
/// The resulting problem is solved exactly by `u` by construction. `u_tt`
/// must be supplied in closed form alongside the exact solution.
pub fn manufactured_problem(
    name: impl Into<String>,
    exact: ExactSolution,
    u_tt: SpaceTimeFn,
    alpha: TimeFn,
    beta: TimeFn,
    bounds: CoefficientBounds,
    ell: f64,
) -> Result<ProblemSpec, SolverError> {
    check_exact_compatibility(&exact, ell)?;
    let source: SpaceTimeFn = {
        let u_xx = exact.u_xx.clone();
        let energy = exact.energy_integral.clone();
        let alpha = alpha.clone();
        let beta = beta.clone();
        Arc::new(move |x, t| u_tt(x, t) - (alpha(t) + beta(t) * energy(t)) * u_xx(x, t))
    };
    let psi0: SpaceFn = {
        let u = exact.u.clone();
        Arc::new(move |x| u(x, 0.0))
    };
    let psi1: SpaceFn = {
        let u_t = exact.u_t.clone();
        Arc::new(move |x| u_t(x, 0.0))
    };
    ProblemSpec::new(name, ell, alpha, beta, source, psi0, psi1, bounds)?.with_exact(exact)
}

/// Stable keys of the built-in catalog.
pub fn catalog_keys() -> &'static [&'static str] {
    &[
        "cos-mode",
        "ramp-mode",
        "cos-mode-tv",
        "zero",
        "free-vibration",
    ]
}

/// Build the catalog problem `key` on `[0, ℓ]`; `ell = None` means the
/// default length 1. Entries:
///
/// - `cos-mode`: `u = sin(πx/ℓ)·cos t`, `α ≡ 1`, `β ≡ 1`.
/// - `ramp-mode`: `u = sin(πx/ℓ)·t`, `α = 1+t`, `β ≡ 1`. Linear in time, so
///   the three-layer scheme reproduces it up to spatial error.
/// - `cos-mode-tv`: `u = sin(πx/ℓ)·cos t`, `α = 1+t`, `β ≡ 1`; the
///   time-varying-coefficient counterpart of `cos-mode`.
/// - `zero`: `u ≡ 0` with `α ≡ β ≡ 1`.
/// - `free-vibration`: `f ≡ 0`, `ψ₀ = sin(πx/ℓ)`, `ψ₁ ≡ 0`, `α ≡ β ≡ 1`;
///   no exact solution attached.
pub fn catalog_problem(key: &str, ell: Option<f64>) -> Result<ProblemSpec, SolverError> {
    let ell = ell.unwrap_or(1.0);
    if !ell.is_finite() || ell <= 0.0 {
        return Err(SolverError::invalid(format!(
            "catalog: domain length must be positive and finite, got {ell}"
        )));
    }
    match key {
        "cos-mode" => cos_mode(ell, false),
        "cos-mode-tv" => cos_mode(ell, true),
        "ramp-mode" => ramp_mode(ell),
        "zero" => zero_problem(ell),
        "free-vibration" => free_vibration(ell),
        other => Err(SolverError::invalid(format!(
            "unknown catalog problem '{other}'; available: {}",
            catalog_keys().join(", ")
        ))),
    }
}

/// All catalog problems at the default length ℓ = 1.
pub fn builtin_catalog() -> Vec<ProblemSpec> {
    catalog_keys()
        .iter()
        .map(|k| catalog_problem(k, None).expect("catalog entries are valid"))
        .collect()
}

const ONE: fn(f64) -> f64 = |_| 1.0;

fn cos_mode(ell: f64, time_varying_alpha: bool) -> Result<ProblemSpec, SolverError> {
    let w = std::f64::consts::PI / ell;
    // I(t) = ∫₀^ℓ (w cos(wx) cos t)² dx = (π²/(2ℓ))·cos²t
    let i_coef = w * w * ell / 2.0;
    let exact = ExactSolution {
        u: Arc::new(move |x, t| (w * x).sin() * t.cos()),
        u_t: Arc::new(move |x, t| -(w * x).sin() * t.sin()),
        u_xx: Arc::new(move |x, t| -(w * w) * (w * x).sin() * t.cos()),
        energy_integral: Arc::new(move |t| i_coef * t.cos() * t.cos()),
    };
    let u_tt: SpaceTimeFn = Arc::new(move |x, t| -(w * x).sin() * t.cos());
    let (name, alpha, c2): (&str, TimeFn, f64) = if time_varying_alpha {
        ("cos-mode-tv", Arc::new(|t| 1.0 + t), 1.0)
    } else {
        ("cos-mode", Arc::new(ONE), 0.0)
    };
    manufactured_problem(
        name,
        exact,
        u_tt,
        alpha,
        Arc::new(ONE),
        CoefficientBounds {
            c0: 1.0,
            c1: 1.0,
            c2,
            c3: 0.0,
        },
        ell,
    )
}

fn ramp_mode(ell: f64) -> Result<ProblemSpec, SolverError> {
    let w = std::f64::consts::PI / ell;
    let i_coef = w * w * ell / 2.0;
    let exact = ExactSolution {
        u: Arc::new(move |x, t| (w * x).sin() * t),
        u_t: Arc::new(move |x, _| (w * x).sin()),
        u_xx: Arc::new(move |x, t| -(w * w) * (w * x).sin() * t),
        energy_integral: Arc::new(move |t| i_coef * t * t),
    };
    let u_tt: SpaceTimeFn = Arc::new(|_, _| 0.0);
    manufactured_problem(
        "ramp-mode",
        exact,
        u_tt,
        Arc::new(|t| 1.0 + t),
        Arc::new(ONE),
        CoefficientBounds {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 0.0,
        },
        ell,
    )
}

fn zero_problem(ell: f64) -> Result<ProblemSpec, SolverError> {
    let exact = ExactSolution {
        u: Arc::new(|_, _| 0.0),
        u_t: Arc::new(|_, _| 0.0),
        u_xx: Arc::new(|_, _| 0.0),
        energy_integral: Arc::new(|_| 0.0),
    };
    manufactured_problem(
        "zero",
        exact,
        Arc::new(|_, _| 0.0),
        Arc::new(ONE),
        Arc::new(ONE),
        CoefficientBounds {
            c0: 1.0,
            c1: 1.0,
            c2: 0.0,
            c3: 0.0,
        },
        ell,
    )
}

fn free_vibration(ell: f64) -> Result<ProblemSpec, SolverError> {
    let w = std::f64::consts::PI / ell;
    ProblemSpec::new(
        "free-vibration",
        ell,
        Arc::new(ONE),
        Arc::new(ONE),
        Arc::new(|_, _| 0.0),
        Arc::new(move |x| (w * x).sin()),
        Arc::new(|_| 0.0),
        CoefficientBounds {
            c0: 1.0,
            c1: 1.0,
            c2: 0.0,
            c3: 0.0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify;
    use std::f64::consts::PI;

    #[test]
    fn catalog_has_expected_entries() {
        let all = builtin_catalog();
        let names: Vec<&str> = all.iter().map(|p| p.name.as_str()).collect();
        assert!(names.contains(&"cos-mode"));
        assert!(names.contains(&"ramp-mode"));
        assert!(names.contains(&"cos-mode-tv"));
        assert!(names.contains(&"zero"));
        assert!(names.contains(&"free-vibration"));

        let fv = catalog_problem("free-vibration", None).unwrap();
        assert!(fv.exact.is_none());
        assert!(catalog_problem("nonexistent", None).is_err());
    }

    #[test]
    fn catalog_entries_pass_validation() {
        let tgrid = TemporalGrid::new(1.0, 16).unwrap();
        for p in builtin_catalog() {
            p.validate_on_grid(&tgrid)
                .unwrap_or_else(|e| panic!("catalog entry '{}' failed validation: {e}", p.name));
        }
    }

    #[test]
    fn zero_case_is_all_zero() {
        let p = catalog_problem("zero", None).unwrap();
        for i in 0..10 {
            let x = i as f64 / 10.0;
            let t = i as f64 / 7.0;
            assert_eq!((p.source)(x, t), 0.0);
            assert_eq!((p.psi0)(x), 0.0);
            assert_eq!((p.psi1)(x), 0.0);
        }
    }

    #[test]
    fn cos_mode_source_matches_hand_formula() {
        // f(x,t) = sin(πx)·[−cos t + π²(1 + (π²/2)cos²t)·cos t] on ℓ = 1
        let p = catalog_problem("cos-mode", None).unwrap();
        for (x, t) in [(0.3_f64, 0.0_f64), (0.7, 0.9), (0.11, 2.4)] {
            let want = (PI * x).sin()
                * (-t.cos() + PI * PI * (1.0 + PI * PI / 2.0 * t.cos() * t.cos()) * t.cos());
            let got = (p.source)(x, t);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn ramp_mode_source_matches_hand_formula() {
        // f(x,t) = π²(1 + t + (π²/2)t²)·t·sin(πx) on ℓ = 1
        let p = catalog_problem("ramp-mode", None).unwrap();
        for (x, t) in [(0.25, 0.5), (0.6, 1.0), (0.9, 0.1)] {
            let want = PI * PI * (1.0 + t + PI * PI / 2.0 * t * t) * t * (PI * x).sin();
            let got = (p.source)(x, t);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn manufactured_sources_pass_fd_oracle() {
        // anti-hallucination gate for the hand-derived f formulas, at the
        // default length and at a non-unit length
        for key in ["cos-mode", "ramp-mode", "cos-mode-tv", "zero"] {
            for ell in [None, Some(1.7)] {
                let p = catalog_problem(key, ell).unwrap();
                let r = verify::max_pde_residual(&p, 100, 4242, 1.0).unwrap();
                assert!(r <= 1e-8, "{key} (ell {ell:?}): residual {r:e}");
            }
        }
    }

    #[test]
    fn energy_integrals_match_quadrature() {
        // cheap version of the quadrature gate; the acceptance suite runs the
        // full-resolution one
        for key in ["cos-mode", "ramp-mode", "cos-mode-tv"] {
            let p = catalog_problem(key, None).unwrap();
            let err = verify::max_energy_integral_error(&p, 5, 7, 1.0, 20_000).unwrap();
            assert!(err <= 1e-6, "{key}: {err:e}");
        }
    }

    #[test]
    fn rejects_boundary_incompatible_exact() {
        // u = cos(πx)·cos t has u(0,t) = cos t ≠ 0
        let exact = ExactSolution {
            u: Arc::new(|x, t| (PI * x).cos() * t.cos()),
            u_t: Arc::new(|x, t| -(PI * x).cos() * t.sin()),
            u_xx: Arc::new(|x, t| -PI * PI * (PI * x).cos() * t.cos()),
            energy_integral: Arc::new(|t| PI * PI / 2.0 * t.cos() * t.cos()),
        };
        let r = manufactured_problem(
            "bad",
            exact,
            Arc::new(|x: f64, t: f64| -(PI * x).cos() * t.cos()),
            Arc::new(ONE),
            Arc::new(ONE),
            CoefficientBounds {
                c0: 1.0,
                c1: 1.0,
                c2: 0.0,
                c3: 0.0,
            },
            1.0,
        );
        assert!(matches!(r, Err(SolverError::InvalidArgument(_))));
    }

    #[test]
    fn rejects_incompatible_psi0() {
        let r = ProblemSpec::new(
            "bad-psi0",
            1.0,
            Arc::new(ONE),
            Arc::new(ONE),
            Arc::new(|_, _| 0.0),
            Arc::new(|x| x + 1.0),
            Arc::new(|_| 0.0),
            CoefficientBounds {
                c0: 1.0,
                c1: 1.0,
                c2: 0.0,
                c3: 0.0,
            },
        );
        assert!(matches!(r, Err(SolverError::InvalidArgument(_))));
    }

    #[test]
    fn rejects_bad_bounds() {
        let mk = |c0: f64, c1: f64| {
            CoefficientBounds {
                c0,
                c1,
                c2: 0.0,
                c3: 0.0,
            }
            .validate()
        };
        assert!(mk(0.0, 1.0).is_err());
        assert!(mk(-1.0, 1.0).is_err());
        assert!(mk(1.0, -0.5).is_err());
        assert!(mk(1.0, 0.0).is_ok()); // linear limit admitted
    }

    #[test]
    fn validation_catches_violated_alpha_bound() {
        // declare c0 = 2 but use α ≡ 1
        let p = ProblemSpec::new(
            "lying-alpha",
            1.0,
            Arc::new(ONE),
            Arc::new(ONE),
            Arc::new(|_, _| 0.0),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            CoefficientBounds {
                c0: 2.0,
                c1: 1.0,
                c2: 0.0,
                c3: 0.0,
            },
        )
        .unwrap();
        let tgrid = TemporalGrid::new(1.0, 4).unwrap();
        assert!(p.validate_on_grid(&tgrid).is_err());
    }
}
