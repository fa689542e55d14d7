//! Radial Navier biharmonic solver on the annulus ε < r < 1 and the
//! projection machinery built on it.
//!
//! The fourth-order problem Δ²w = f with w = Δw = 0 on both spheres splits
//! into two radial Poisson problems (Δv = f, then Δw = v, both with zero
//! Dirichlet data). Each Poisson problem is solved by the exact
//! variation-of-parameters representation with the r^{N−1} integrating
//! factor — cumulative Gauss–Kronrod panel integrals on the graded grid, no
//! linear system:
//!
//!   (r^{N−1} w')' = r^{N−1} g,
//!   w(r) = [u₂(r)∫_ε^r u₁ s^{N−1} g ds + u₁(r)∫_r^1 u₂ s^{N−1} g ds] / C,
//!
//! with u₁ = r^{2−N} − ε^{2−N}, u₂ = r^{2−N} − 1 and the constant
//! C = (N−2)(ε^{2−N} − 1). Both boundary values vanish identically.
//!
//! Radial biharmonic functions on the annulus form the 4-dimensional family
//! A + Br² + Cr^{4−N} + Dr^{2−N}; [`BiharmonicExtension`] matches prescribed
//! Navier data in that family. Since U itself solves Δ²U = U^p away from its
//! center, the projection admits the exact representation P_εU = U − h with h
//! the extension of U's boundary data — used as the fast evaluation path and
//! as an independent oracle for the quadrature solver. The Robin function is
//! the two-parameter (bounded-branch) special case on the full ball.

use crate::bubble::{
    bubble_laplacian_radial, bubble_value_radial, z0_kernel_radial, z0_laplacian_radial,
};
use crate::constants::ProblemDims;
use crate::quadrature::{self, QuadratureEngine};
use crate::spline::CubicSpline;
use std::rc::Rc;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("grid too coarse: panel quadrature defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    GridTooCoarse { defect: f64, tol: f64 },
    #[error("grid construction: {0}")]
    BadGrid(String),
    #[error("projection expansion outside the scale regime: eps = {eps:.3e} not small against mu = {mu:.3e}")]
    RegimeViolation { eps: f64, mu: f64 },
}

/// Strictly increasing radii in [ε, 1], log-graded near ε and around the
/// requested interior scales (bubble cores).
#[derive(Debug, Clone)]
pub struct RadialGrid {
    epsilon: f64,
    n_dim: u32,
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// Build a graded grid with at least `min_nodes` nodes (lower bound 256).
    /// `scales` lists interior radii that need log-clustering (the μ_{iε}).
    pub fn graded(
        dims: &ProblemDims,
        epsilon: f64,
        min_nodes: usize,
        scales: &[f64],
    ) -> Result<Self, SolverError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SolverError::BadGrid(format!(
                "inner radius must lie in (0,1), got {epsilon}"
            )));
        }
        for &s in scales {
            if !(s > 0.0 && s < 1.0) {
                return Err(SolverError::BadGrid(format!(
                    "grading scale {s} outside (0,1)"
                )));
            }
        }
        let min_nodes = min_nodes.max(256);
        let decades = (1.0 / epsilon).log10();
        let per_decade = (min_nodes as f64 / decades).ceil().max(16.0);
        let mut nodes = log_range(epsilon, 1.0, (per_decade * decades).ceil() as usize + 1);
        for &s in scales {
            let lo = (s / 100.0).max(epsilon);
            let hi = (s * 100.0).min(1.0);
            let span = (hi / lo).log10();
            nodes.extend(log_range(lo, hi, (3.0 * per_decade * span).ceil() as usize + 1));
        }
        nodes.push(epsilon);
        nodes.push(1.0);
        nodes.sort_by(f64::total_cmp);
        // drop near-duplicates (relative spacing below 1e-12)
        let mut cleaned = Vec::with_capacity(nodes.len());
        for x in nodes {
            match cleaned.last() {
                Some(&last) if x - last <= 1e-12 * x => {}
                _ => cleaned.push(x),
            }
        }
        *cleaned.last_mut().unwrap() = 1.0;
        cleaned[0] = epsilon;
        if cleaned.len() < 256 {
            return Err(SolverError::BadGrid(format!(
                "grid ended up with {} nodes (< 256)",
                cleaned.len()
            )));
        }
        Ok(Self {
            epsilon,
            n_dim: dims.n(),
            nodes: cleaned,
        })
    }

    /// Build a grid from explicit radii: strictly increasing, at least 256
    /// nodes, last node 1; the first node is the inner radius ε.
    pub fn from_nodes(dims: &ProblemDims, nodes: Vec<f64>) -> Result<Self, SolverError> {
        if nodes.len() < 256 {
            return Err(SolverError::BadGrid(format!(
                "need at least 256 nodes, got {}",
                nodes.len()
            )));
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(SolverError::BadGrid("nodes must be strictly increasing".into()));
        }
        if !(nodes[0] > 0.0) || *nodes.last().unwrap() != 1.0 {
            return Err(SolverError::BadGrid(
                "nodes must start above 0 and end at 1".into(),
            ));
        }
        Ok(Self {
            epsilon: nodes[0],
            n_dim: dims.n(),
            nodes,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_dim(&self) -> u32 {
        self.n_dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Panels per decade around radius `s` (grading check for tower assembly).
    pub fn nodes_per_decade_near(&self, s: f64) -> usize {
        let lo = s / 10f64.sqrt();
        let hi = s * 10f64.sqrt();
        self.nodes.iter().filter(|&&x| x >= lo && x <= hi).count() * 2
    }
}

fn log_range(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// A radial function sampled on a grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn from_values(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.nodes().len(), values.len());
        assert!(values.iter().all(|v| v.is_finite()), "field values must be finite");
        Self { grid, values }
    }

    pub fn sample<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spline(&self) -> CubicSpline {
        CubicSpline::natural(self.grid.nodes(), &self.values)
    }

    /// Two-column CSV at full precision (17 significant digits).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            out.push_str(&format!("{:.16e},{:.16e}\n", r, v));
        }
        out
    }
}

// Gauss–Kronrod panel integrator for the cumulative integrals; the error
// estimates accumulate into the solver's coarseness defect.
fn panel_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    quadrature::gk15_panel(f, a, b)
}

/// Exact-quadrature solution of the radial Poisson problem
/// Δw = rhs, w(ε) = w(1) = 0, evaluable at any radius.
pub struct PoissonSolution {
    grid: Arc<RadialGrid>,
    rhs: Rc<dyn Fn(f64) -> f64>,
    /// cumulative ∫_ε^{r_i} u₁ s^{N−1} rhs ds
    cum_lo: Vec<f64>,
    /// cumulative ∫_{r_i}^1 u₂ s^{N−1} rhs ds
    cum_hi: Vec<f64>,
    norm_const: f64,
    phi_eps: f64,
    accumulated_error: f64,
}

impl PoissonSolution {
    fn solve(grid: Arc<RadialGrid>, rhs: Rc<dyn Fn(f64) -> f64>) -> Self {
        let n = grid.n_dim() as f64;
        let eps = grid.epsilon();
        let phi = |r: f64| r.powf(2.0 - n);
        let phi_eps = phi(eps);
        let norm_const = (n - 2.0) * (phi_eps - 1.0);
        let nodes = grid.nodes();
        let m = nodes.len();
        let mut cum_lo = vec![0.0; m];
        let mut cum_hi = vec![0.0; m];
        let mut err = 0.0;
        {
            let rhs = &rhs;
            let f_lo = move |s: f64| (phi(s) - phi_eps) * s.powf(n - 1.0) * rhs(s);
            for i in 1..m {
                let (v, e) = panel_integral(&f_lo, nodes[i - 1], nodes[i]);
                cum_lo[i] = cum_lo[i - 1] + v;
                err += e;
            }
        }
        {
            let rhs = &rhs;
            let f_hi = move |s: f64| (phi(s) - 1.0) * s.powf(n - 1.0) * rhs(s);
            for i in (0..m - 1).rev() {
                let (v, e) = panel_integral(&f_hi, nodes[i], nodes[i + 1]);
                cum_hi[i] = cum_hi[i + 1] + v;
                err += e;
            }
        }
        Self {
            grid,
            rhs,
            cum_lo,
            cum_hi,
            norm_const,
            phi_eps,
            accumulated_error: err,
        }
    }

    /// Sum of panel quadrature error estimates (grid coarseness proxy).
    pub fn accumulated_error(&self) -> f64 {
        self.accumulated_error
    }

    pub fn eval(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        let n = self.grid.n_dim() as f64;
        let r = r.clamp(nodes[0], 1.0);
        let i = match nodes.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => i.min(nodes.len() - 2),
            Err(0) => 0,
            Err(j) if j >= nodes.len() => nodes.len() - 2,
            Err(j) => j - 1,
        };
        let phi = |x: f64| x.powf(2.0 - n);
        let rhs = &self.rhs;
        let f_lo = |s: f64| (phi(s) - self.phi_eps) * s.powf(n - 1.0) * rhs(s);
        let f_hi = |s: f64| (phi(s) - 1.0) * s.powf(n - 1.0) * rhs(s);
        let (plo, _) = panel_integral(&f_lo, nodes[i], r);
        let (phi_part, _) = panel_integral(&f_hi, r, nodes[i + 1]);
        let int_lo = self.cum_lo[i] + plo;
        let int_hi = self.cum_hi[i + 1] + phi_part;
        let u1 = phi(r) - self.phi_eps;
        let u2 = phi(r) - 1.0;
        (u2 * int_lo + u1 * int_hi) / self.norm_const
    }

    pub fn to_field(&self) -> RadialField {
        RadialField::sample(self.grid.clone(), |r| self.eval(r))
    }
}

fn coarseness_check(sol: &PoissonSolution, engine: &QuadratureEngine) -> Result<(), SolverError> {
    let scale = sol
        .cum_lo
        .last()
        .map(|v| v.abs())
        .unwrap_or(0.0)
        .max(sol.cum_hi.first().map(|v| v.abs()).unwrap_or(0.0))
        .max(1e-300);
    let tol = engine.abs_tol.max(engine.rel_tol * scale);
    if sol.accumulated_error > tol * 1e3 {
        return Err(SolverError::GridTooCoarse {
            defect: sol.accumulated_error,
            tol: tol * 1e3,
        });
    }
    Ok(())
}

/// Solve Δw = rhs (radial Laplacian), w(ε) = w(1) = 0, from a closure.
pub fn poisson_solve_fn(
    grid: Arc<RadialGrid>,
    rhs: Rc<dyn Fn(f64) -> f64>,
    engine: &QuadratureEngine,
) -> Result<PoissonSolution, SolverError> {
    let sol = PoissonSolution::solve(grid, rhs);
    coarseness_check(&sol, engine)?;
    Ok(sol)
}

/// Field-in, field-out variant (interpolates the sampled right-hand side).
pub fn poisson_solve_radial(
    rhs: &RadialField,
    engine: &QuadratureEngine,
) -> Result<RadialField, SolverError> {
    let spline = rhs.spline();
    let sol = poisson_solve_fn(rhs.grid().clone(), Rc::new(move |r| spline.eval(r)), engine)?;
    Ok(sol.to_field())
}

/// Solution of the Navier biharmonic problem as a pair of chained Poisson
/// solves: Δ(Δw) = f with w = Δw = 0 on both spheres.
pub struct BiharmonicSolution {
    inner: Rc<PoissonSolution>,
    outer: PoissonSolution,
}

impl BiharmonicSolution {
    pub fn value(&self, r: f64) -> f64 {
        self.outer.eval(r)
    }

    /// Δw — the intermediate Poisson solution, no numerical differentiation.
    pub fn laplacian(&self, r: f64) -> f64 {
        self.inner.eval(r)
    }

    pub fn to_field(&self) -> RadialField {
        self.outer.to_field()
    }
}

pub fn navier_biharmonic_solve_fn(
    grid: Arc<RadialGrid>,
    f: Rc<dyn Fn(f64) -> f64>,
    engine: &QuadratureEngine,
) -> Result<BiharmonicSolution, SolverError> {
    let inner = Rc::new(poisson_solve_fn(grid.clone(), f, engine)?);
    let inner_for_outer = inner.clone();
    let outer = poisson_solve_fn(grid, Rc::new(move |r| inner_for_outer.eval(r)), engine)?;
    Ok(BiharmonicSolution { inner, outer })
}

pub fn navier_biharmonic_solve(
    f: &RadialField,
    engine: &QuadratureEngine,
) -> Result<RadialField, SolverError> {
    let spline = f.spline();
    let sol = navier_biharmonic_solve_fn(f.grid().clone(), Rc::new(move |r| spline.eval(r)), engine)?;
    Ok(sol.to_field())
}

/// P_εU on the grid: the Navier solve with right-hand side U^p (σ = 0).
pub fn project_bubble(
    dims: &ProblemDims,
    mu: f64,
    grid: Arc<RadialGrid>,
    engine: &QuadratureEngine,
) -> Result<RadialField, SolverError> {
    Ok(project_bubble_solution(dims, mu, grid, engine)?.to_field())
}

pub fn project_bubble_solution(
    dims: &ProblemDims,
    mu: f64,
    grid: Arc<RadialGrid>,
    engine: &QuadratureEngine,
) -> Result<BiharmonicSolution, SolverError> {
    let dims = *dims;
    let p = dims.p_f64();
    navier_biharmonic_solve_fn(
        grid,
        Rc::new(move |r| bubble_value_radial(&dims, mu, r).powf(p)),
        engine,
    )
}

/// P_εZ⁰ on the grid: the Navier solve with right-hand side pU^{p−1}Z⁰.
pub fn project_z0(
    dims: &ProblemDims,
    mu: f64,
    grid: Arc<RadialGrid>,
    engine: &QuadratureEngine,
) -> Result<RadialField, SolverError> {
    let dims = *dims;
    let p = dims.p_f64();
    let sol = navier_biharmonic_solve_fn(
        grid,
        Rc::new(move |r| {
            p * bubble_value_radial(&dims, mu, r).powf(p - 1.0) * z0_kernel_radial(&dims, mu, r)
        }),
        engine,
    )?;
    Ok(sol.to_field())
}

/// Radial biharmonic A + Br² + Cr^{4−N} + Dr^{2−N} on the annulus.
#[derive(Debug, Clone, Copy)]
pub struct BiharmonicExtension {
    n_dim: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl BiharmonicExtension {
    /// The member matching val/Δval at r = eps and r = rad.
    /// Uses Δ(r²) = 2N, Δ(r^{4−N}) = 2(4−N)r^{2−N}, Δ(r^{2−N}) = 0.
    pub fn matching_navier_data(
        n_dim: u32,
        eps: f64,
        rad: f64,
        val_eps: f64,
        val_out: f64,
        lap_eps: f64,
        lap_out: f64,
    ) -> Self {
        let n = n_dim as f64;
        let pe = eps.powf(2.0 - n);
        let pr = rad.powf(2.0 - n);
        let c = (lap_eps - lap_out) / (2.0 * (4.0 - n) * (pe - pr));
        let b = (lap_out - 2.0 * (4.0 - n) * c * pr) / (2.0 * n);
        let ge = val_eps - b * eps * eps - c * eps.powf(4.0 - n);
        let gr = val_out - b * rad * rad - c * rad.powf(4.0 - n);
        let d = (ge - gr) / (pe - pr);
        let a = gr - d * pr;
        Self { n_dim, a, b, c, d }
    }

    /// The bounded branch A + Br² on the full ball of radius `rad` (no
    /// puncture; regularity at 0).
    pub fn bounded_on_ball(n_dim: u32, rad: f64, val_out: f64, lap_out: f64) -> Self {
        let n = n_dim as f64;
        let b = lap_out / (2.0 * n);
        let a = val_out - b * rad * rad;
        Self { n_dim, a, b, c: 0.0, d: 0.0 }
    }

    /// The bounded (A, B) part alone.
    pub fn ball_part(&self) -> Self {
        Self { c: 0.0, d: 0.0, ..*self }
    }

    /// The hole-induced (C, D) part alone.
    pub fn hole_part(&self) -> Self {
        Self { a: 0.0, b: 0.0, ..*self }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.n_dim as f64;
        let mut v = self.a + self.b * r * r;
        if self.c != 0.0 {
            v += self.c * r.powf(4.0 - n);
        }
        if self.d != 0.0 {
            v += self.d * r.powf(2.0 - n);
        }
        v
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        let n = self.n_dim as f64;
        let mut v = 2.0 * n * self.b;
        if self.c != 0.0 {
            v += 2.0 * (4.0 - n) * self.c * r.powf(2.0 - n);
        }
        v
    }
}

/// Exact projection P_εU = U − h (h the biharmonic extension of U's Navier
/// data): the closed-form evaluation path, and the oracle the quadrature
/// solver is tested against.
#[derive(Debug, Clone, Copy)]
pub struct ProjectedBubble {
    dims: ProblemDims,
    pub mu: f64,
    pub eps: f64,
    pub correction: BiharmonicExtension,
}

impl ProjectedBubble {
    pub fn new(dims: &ProblemDims, mu: f64, eps: f64) -> Self {
        let h = BiharmonicExtension::matching_navier_data(
            dims.n(),
            eps,
            1.0,
            bubble_value_radial(dims, mu, eps),
            bubble_value_radial(dims, mu, 1.0),
            bubble_laplacian_radial(dims, mu, eps),
            bubble_laplacian_radial(dims, mu, 1.0),
        );
        Self {
            dims: *dims,
            mu,
            eps,
            correction: h,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        bubble_value_radial(&self.dims, self.mu, r) - self.correction.eval(r)
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        bubble_laplacian_radial(&self.dims, self.mu, r) - self.correction.laplacian(r)
    }

    /// U − P_εU = h, the projection defect.
    pub fn defect(&self, r: f64) -> f64 {
        self.correction.eval(r)
    }
}

/// Exact projection of the scale kernel: P_εZ⁰ = Z⁰ − (extension of its data).
#[derive(Debug, Clone, Copy)]
pub struct ProjectedZ0 {
    dims: ProblemDims,
    pub mu: f64,
    pub correction: BiharmonicExtension,
}

impl ProjectedZ0 {
    pub fn new(dims: &ProblemDims, mu: f64, eps: f64) -> Self {
        let h = BiharmonicExtension::matching_navier_data(
            dims.n(),
            eps,
            1.0,
            z0_kernel_radial(dims, mu, eps),
            z0_kernel_radial(dims, mu, 1.0),
            z0_laplacian_radial(dims, mu, eps),
            z0_laplacian_radial(dims, mu, 1.0),
        );
        Self {
            dims: *dims,
            mu,
            correction: h,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        z0_kernel_radial(&self.dims, self.mu, r) - self.correction.eval(r)
    }
}

/// H(0,0) on the unit ball: the biharmonic extension of the boundary data
/// H = r^{4−N}, ΔH = 2(4−N)r^{2−N} at r = 1, bounded branch at the origin.
pub fn robin_function(dims: &ProblemDims) -> f64 {
    robin_function_radius(dims, 1.0)
}

/// Same on the ball of radius `rad`; scales as rad^{4−N}.
pub fn robin_function_radius(dims: &ProblemDims, rad: f64) -> f64 {
    let n = dims.n() as f64;
    let ext = BiharmonicExtension::bounded_on_ball(
        dims.n(),
        rad,
        rad.powf(4.0 - n),
        2.0 * (4.0 - n) * rad.powf(2.0 - n),
    );
    ext.eval(0.0)
}

/// The Robin-function profile H(r, 0) on the unit ball (a + br²).
pub fn robin_profile(dims: &ProblemDims) -> BiharmonicExtension {
    let n = dims.n() as f64;
    BiharmonicExtension::bounded_on_ball(dims.n(), 1.0, 1.0, 2.0 * (4.0 - n))
}

/// First-order correction coefficients of the projection expansion at σ = 0:
///   a₁ = −ΔU_{1,0}(0)/(2(N−4)) · ε²/μ^{N/2},
///   a₂ = U_{1,0}(0)/μ^{(N−4)/2} + ΔU_{1,0}(0)/(2(N−4)) · ε²/μ^{N/2}.
pub fn expansion_coefficients(dims: &ProblemDims, mu: f64, eps: f64) -> (f64, f64) {
    let n = dims.n() as f64;
    let lap_u0 = bubble_laplacian_radial(dims, 1.0, 0.0); // −N(N−4)α_N
    let a1 = -lap_u0 / (2.0 * (n - 4.0)) * eps * eps / mu.powf(n / 2.0);
    let a2 = bubble_value_radial(dims, 1.0, 0.0) / mu.powf((n - 4.0) / 2.0) - a1;
    (a1, a2)
}

/// Pointwise envelope of the projection remainder (unit constants):
///   ε^{N−1}/μ^{(N+2)/2} · r^{−(N−4)}  +  ε^{N−1}/μ^{(N−2)/2} · r^{−(N−2)}.
pub fn remainder_envelope(dims: &ProblemDims, mu: f64, eps: f64, r: f64) -> f64 {
    let n = dims.n() as f64;
    eps.powf(n - 1.0) / mu.powf((n + 2.0) / 2.0) * r.powf(-(n - 4.0))
        + eps.powf(n - 1.0) / mu.powf((n - 2.0) / 2.0) * r.powf(-(n - 2.0))
}

/// The projection expansion P_εU = U − α_N μ^q H − a₁φ₁ − a₂φ₂ + R at σ = 0.
#[derive(Debug)]
pub struct ProjectionExpansion {
    pub a1: f64,
    pub a2: f64,
    pub robin_term: RadialField,
    pub remainder: RadialField,
}

/// Decompose the grid projection into the Robin term, the hole corrections
/// a₁φ₁((x)/ε) + a₂φ₂((x)/ε) and the remainder field.
pub fn expansion_decompose(
    dims: &ProblemDims,
    mu: f64,
    grid: Arc<RadialGrid>,
    engine: &QuadratureEngine,
) -> Result<ProjectionExpansion, SolverError> {
    let eps = grid.epsilon();
    if eps >= 0.1 * mu {
        return Err(SolverError::RegimeViolation { eps, mu });
    }
    let pu = project_bubble(dims, mu, grid.clone(), engine)?;
    Ok(expansion_from_projection(dims, mu, &pu))
}

/// Same decomposition from an already-computed projection field (allows the
/// exact closed-form projection to be decomposed as well).
pub fn expansion_from_projection(
    dims: &ProblemDims,
    mu: f64,
    pu: &RadialField,
) -> ProjectionExpansion {
    let grid = pu.grid().clone();
    let eps = grid.epsilon();
    let n = dims.n() as f64;
    let q = (n - 4.0) / 2.0;
    let (a1, a2) = expansion_coefficients(dims, mu, eps);
    let robin = robin_profile(dims);
    let alpha_mu_q = dims.alpha() * mu.powf(q);
    let robin_term = RadialField::sample(grid.clone(), |r| alpha_mu_q * robin.eval(r));
    let remainder_values: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(pu.values())
        .map(|(&r, &puv)| {
            puv - bubble_value_radial(dims, mu, r)
                + alpha_mu_q * robin.eval(r)
                + a1 * (eps / r).powf(n - 4.0)
                + a2 * (eps / r).powf(n - 2.0)
        })
        .collect();
    ProjectionExpansion {
        a1,
        a2,
        robin_term,
        remainder: RadialField::from_values(grid, remainder_values),
    }
}
