//! Solver for the nonlinear Kirchhoff string equation with time-varying
//! coefficients,
//!
//! ```text
//! u_tt − (α(t) + β(t)·∫₀^ℓ u_x(x,t)² dx) u_xx = f(x,t),   (x,t) ∈ (0,ℓ)×(0,T],
//! u(x,0) = ψ₀(x),   u_t(x,0) = ψ₁(x),   u(0,t) = u(ℓ,t) = 0,
//! ```
//!
//! with `α(t) ≥ c₀ > 0` and `β(t) ≥ c₁ > 0`. Time is discretized by a
//! symmetric three-layer scheme in which the nonlocal coefficient
//! `q_k = α(t_k) + β(t_k)·∫ u_x²` is evaluated at the middle layer, so each
//! step solves one linear tridiagonal system
//!
//! ```text
//! (2I + τ²·q_k·L_h) u_{k+1} = 2(τ²f_k + 2u_k) − (2I + τ²·q_k·L_h) u_{k−1},
//! ```
//!
//! where `L_h` is the second-order finite-difference realization of `−d²/dx²`
//! with homogeneous Dirichlet data. The scheme is second-order accurate in τ
//! on a local time interval; the [`analysis`] module measures that rate with
//! manufactured solutions and monitors the discrete energy bounds that back
//! the stability argument.
//!
//! Module map:
//!
//! - [`grid`]: uniform spatial/temporal grids stored as (step, count).
//! - [`operators`]: `L_h`, the discrete L₂ inner product, the energy
//!   seminorm `(L_h u, u)`, and the nonlocal coefficient `q`.
//! - [`linsolve`]: per-step tridiagonal assembly and the Thomas solve.
//! - [`problems`]: problem definitions, manufactured-solution factory and
//!   the built-in catalog.
//! - [`scheme`]: layer initialization, the per-step solve and the run loop.
//! - [`analysis`]: error norms, convergence-order estimation, discrete
//!   Grönwall / Rogava–Tsiklauri inequality utilities and the a-priori
//!   boundedness check.
//! - [`verify`]: independent finite-difference and quadrature oracles used
//!   to vet hand-derived manufactured sources, plus a dense reference solver.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod linsolve;
pub mod operators;
pub mod problems;
pub mod scheme;
pub mod verify;

pub use error::SolverError;
pub use grid::{SpatialGrid, TemporalGrid};
pub use operators::Layer;
pub use problems::{ExactSolution, ProblemSpec};
pub use scheme::{SolutionHistory, StepConfig};
