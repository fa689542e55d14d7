//! Numerical toolkit for sign-changing bubble-tower profiles of the critical
//! biharmonic problem on a punctured ball.
//!
//! The library builds the alternating superposition of domain-projected
//! bubbles on the annulus ε < |x| < 1, evaluates the finite-dimensional
//! reduced energy Φ(μ,σ) together with its critical-point certificates, and
//! runs the rate-verification experiments (energy expansion, residual norms,
//! interaction integrals, projection defects) as reproducible sweeps.
//!
//! Module map:
//! - [`constants`]: dimensional bookkeeping (exact rational exponents) and the
//!   energy constants c₁, c₂, c₃.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration for radial and
//!   axisymmetric integrals, with infinite tails mapped to finite intervals.
//! - [`bubble`]: closed forms for the entire solution U, its Laplacian and
//!   bilaplacian, the derivative kernels Z⁰..Zᴺ and the nonlinearity.
//! - [`radial_solver`]: the Navier biharmonic solver on the annulus (two
//!   chained radial Poisson solves), bubble projections, the Robin function
//!   and the projection-expansion decomposition.
//! - [`reduced_energy`]: Φ, its gradient/Hessian, Newton search, and the
//!   tridiagonal determinant / σ-Hessian certificates.
//! - [`tower`]: tower assembly, Lᵠ norms, residual splits W₁/W₂ and the
//!   energy J_ε(V).
//! - [`experiments`]: orchestrated ε-sweeps with log-log rate fits.
//! - [`report`]: deterministic text + CSV report bundles.

pub mod bubble;
pub mod constants;
pub mod experiments;
pub mod quadrature;
pub mod radial_solver;
pub mod reduced_energy;
pub mod report;
pub mod spline;
pub mod tower;

pub use constants::{energy_constants, sphere_measure, EnergyConstants, ProblemDims};
pub use quadrature::{IntegralResult, QuadratureEngine};
