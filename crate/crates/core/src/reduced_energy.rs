//! The finite-dimensional reduced energy Φ(μ,σ) and its critical-point
//! certificates.
//!
//! In the ν-variables ν_i = μ_i^{(N−4)/2},
//!
//!   Φ = H₁ν₁² + F(σ_k)/ν_k^e + Σ_{l<k} g(σ_l) ν_{l+1}/ν_l,
//!
//! with H₁ = c₂H(ξ₀,ξ₀), F(σ) = c₃·ΔU_{1,0}(σ)U_{1,0}(σ), g(σ) = 2Γ(σ) and
//! e = 2(N−2)/(N−4). At a critical point with σ = 0 the balance chain
//!
//!   2H₁ν₁² = g(0)ν₂/ν₁ = … = g(0)ν_k/ν_{k−1} = e·F(0)/ν_k^e = λ
//!
//! holds, which also yields the closed-form scales used as the independent
//! oracle for the Newton iteration: λ^{1 + e/2 + e(k−1)} =
//! e·F(0)·(2H₁)^{e/2}·g(0)^{e(k−1)}.
//!
//! The interaction kernel is evaluated by axisymmetric quadrature,
//!
//!   Γ(x) = ∫ (1+|y−x|²)^{−(N+4)/2} |y|^{−(N−4)} dy,
//!
//! a function of |x| only. It also has an exact closed form: |y|^{4−N} is
//! 2(N−2)(N−4)|S^{N−1}| times the fundamental solution of Δ², and
//! Δ²(1+|x|²)^{−(N−4)/2} = N(N−4)(N−2)(N+2)(1+|x|²)^{−(N+4)/2}, so
//! Γ(x) = c₂(1+|x|²)^{−(N−4)/2}. The quadrature path is the implementation;
//! the closed form serves as its oracle.

use crate::bubble::{laplacian_value_product, laplacian_value_product_dt};
use crate::constants::{EnergyConstants, ProblemDims};
use crate::quadrature::{self, IntegralResult, QuadratureEngine};
use crate::spline::CubicSpline;
use std::collections::BTreeMap;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReducedEnergyError {
    #[error("point violates the box constraints: {0}")]
    OutsideBox(String),
    #[error("Newton diverged after {iters} iterations (|grad| = {grad_norm:.3e})")]
    Divergence { iters: usize, grad_norm: f64 },
    #[error("Newton step hit the box boundary: mu[{index}] = {value:.6e}")]
    BoundaryCollision { index: usize, value: f64 },
    #[error("singular Newton step: {0}")]
    SingularNewtonStep(String),
}

/// The argument of Φ: k scales and k centers inside the box
/// d < μ_i < 1/d, |σ_i| < 1/d.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub d: f64,
}

impl ReducedPoint {
    pub fn new(mu: Vec<f64>, sigma: Vec<Vec<f64>>, d: f64) -> Result<Self, ReducedEnergyError> {
        let pt = Self { mu, sigma, d };
        pt.check_box()?;
        Ok(pt)
    }

    /// σ = 0 point with the given scales.
    pub fn centered(mu: Vec<f64>, n_dim: u32, d: f64) -> Result<Self, ReducedEnergyError> {
        let k = mu.len();
        Self::new(mu, vec![vec![0.0; n_dim as usize]; k], d)
    }

    pub fn check_box(&self) -> Result<(), ReducedEnergyError> {
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(ReducedEnergyError::OutsideBox(format!(
                "box parameter d = {} not in (0,1)",
                self.d
            )));
        }
        for (i, &m) in self.mu.iter().enumerate() {
            if !(m > self.d && m < 1.0 / self.d) {
                return Err(ReducedEnergyError::OutsideBox(format!(
                    "mu[{i}] = {m} outside ({}, {})",
                    self.d,
                    1.0 / self.d
                )));
            }
        }
        for (i, s) in self.sigma.iter().enumerate() {
            let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm >= 1.0 / self.d {
                return Err(ReducedEnergyError::OutsideBox(format!(
                    "|sigma[{i}]| = {norm} >= of {}",
                    1.0 / self.d
                )));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }
}

/// ν_i = μ_i^{(N−4)/2}; the bijection used by the analytic ν-block.
#[derive(Debug, Clone, PartialEq)]
pub struct NuPoint {
    pub nu: Vec<f64>,
}

impl NuPoint {
    pub fn from_mu(dims: &ProblemDims, mu: &[f64]) -> Self {
        let q = (dims.n() as f64 - 4.0) / 2.0;
        Self {
            nu: mu.iter().map(|m| m.powf(q)).collect(),
        }
    }

    pub fn to_mu(&self, dims: &ProblemDims) -> Vec<f64> {
        let q_inv = 2.0 / (dims.n() as f64 - 4.0);
        self.nu.iter().map(|v| v.powf(q_inv)).collect()
    }
}

/// Γ by axisymmetric quadrature: the 1D reduction at x = 0, the (r,φ)
/// reduction otherwise. Depends on x only through |x|.
pub fn gamma_kernel(x_norm: f64, dims: &ProblemDims, engine: &QuadratureEngine) -> IntegralResult {
    let n = dims.n();
    let nf = n as f64;
    let pow = (nf + 4.0) / 2.0;
    if x_norm == 0.0 {
        // |S^{N−1}| ∫ r^{N−1} r^{−(N−4)} (1+r²)^{−(N+4)/2} dr, weight r³
        let sm = crate::constants::sphere_measure(n);
        let mut res = quadrature::integrate_radial(
            |r: f64| r.powi(3) * (1.0 + r * r).powf(-pow),
            0.0,
            f64::INFINITY,
            engine,
        );
        res.value *= sm;
        res.error_estimate *= sm;
        res
    } else {
        let t = x_norm;
        // the kernel concentrates on the ring ρ ≈ |x|
        let seeds = [0.5 * t, (t - 1.0).max(0.25 * t), t, t + 1.0, 2.0 * t];
        quadrature::integrate_radial_angular_with_breakpoints(
            |rho: f64, phi: f64| {
                let d2 = 1.0 + rho * rho + t * t - 2.0 * rho * t * phi.cos();
                d2.powf(-pow) * rho.powf(-(nf - 4.0))
            },
            0.0,
            f64::INFINITY,
            &seeds,
            n,
            engine,
        )
    }
}

/// Exact closed form Γ(x) = c₂ (1+|x|²)^{−(N−4)/2} (see the module docs);
/// oracle for the quadrature path.
pub fn gamma_kernel_closed_form(dims: &ProblemDims, x_norm: f64) -> f64 {
    crate::constants::c2_closed_form(dims.n()) * (1.0 + x_norm * x_norm).powf(-(dims.n() as f64 - 4.0) / 2.0)
}

/// Memoizing quadrature-backed evaluator for Γ(|x|). Values are deterministic
/// functions of the radius, so the cache never changes results.
pub struct GammaEval {
    dims: ProblemDims,
    engine: QuadratureEngine,
    memo: Mutex<BTreeMap<u64, f64>>,
}

impl GammaEval {
    pub fn new(dims: &ProblemDims, engine: QuadratureEngine) -> Self {
        Self {
            dims: *dims,
            engine,
            memo: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn value(&self, x_norm: f64) -> f64 {
        let key = x_norm.to_bits();
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return v;
        }
        let v = gamma_kernel(x_norm, &self.dims, &self.engine).value;
        self.memo.lock().unwrap().insert(key, v);
        v
    }

    /// Radial derivative by central differences with one Richardson step.
    pub fn radial_derivative(&self, x_norm: f64) -> f64 {
        let h = 1e-3 * (1.0 + x_norm);
        let d = |hh: f64| {
            (self.value(x_norm + hh) - self.value((x_norm - hh).abs())) / (2.0 * hh)
        };
        let d1 = d(h);
        let d2 = d(0.5 * h);
        (4.0 * d2 - d1) / 3.0
    }

    /// Cache Γ on a radial spline over [0, r_max] with `samples` knots per
    /// side. The kernel is even in the radius, so the knots are mirrored
    /// through 0 and the natural end conditions land where the curvature is
    /// negligible; evaluate through [`Self::value`]-compatible |t|.
    pub fn build_spline(&self, r_max: f64, samples: usize) -> CubicSpline {
        let samples = samples.max(8);
        let step = r_max / (samples - 1) as f64;
        let mut xs = Vec::with_capacity(2 * samples - 1);
        let mut ys = Vec::with_capacity(2 * samples - 1);
        for i in (1..samples).rev() {
            xs.push(-(i as f64) * step);
            ys.push(self.value(i as f64 * step));
        }
        for i in 0..samples {
            xs.push(i as f64 * step);
            ys.push(self.value(i as f64 * step));
        }
        CubicSpline::natural(&xs, &ys)
    }
}

/// Evaluation context for Φ: constants, the Robin value at the hole center,
/// and the Γ evaluator.
pub struct ReducedEnergy {
    dims: ProblemDims,
    consts: EnergyConstants,
    robin_h00: f64,
    gamma: GammaEval,
}

impl ReducedEnergy {
    pub fn new(
        dims: &ProblemDims,
        consts: EnergyConstants,
        robin_h00: f64,
        engine: QuadratureEngine,
    ) -> Self {
        Self {
            dims: *dims,
            consts,
            robin_h00,
            gamma: GammaEval::new(dims, engine),
        }
    }

    pub fn dims(&self) -> &ProblemDims {
        &self.dims
    }

    /// H₁ = c₂ H(ξ₀, ξ₀).
    pub fn h1(&self) -> f64 {
        self.consts.c2 * self.robin_h00
    }

    /// F(σ) = c₃ · ΔU_{1,0}(σ) U_{1,0}(σ), σ entering through t = |σ|².
    pub fn f_term(&self, t: f64) -> f64 {
        self.consts.c3 * laplacian_value_product(&self.dims, t)
    }

    pub fn f_term_dt(&self, t: f64) -> f64 {
        self.consts.c3 * laplacian_value_product_dt(&self.dims, t)
    }

    /// g(σ) = 2Γ(σ).
    pub fn g_term(&self, x_norm: f64) -> f64 {
        2.0 * self.gamma.value(x_norm)
    }

    /// e = 2(N−2)/(N−4), the ν_k-exponent.
    fn exponent_e(&self) -> f64 {
        2.0 * (self.dims.n() as f64 - 2.0) / (self.dims.n() as f64 - 4.0)
    }

    fn sigma_norm(s: &[f64]) -> f64 {
        s.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Φ(μ,σ) assembled exactly from the kernel, the bubble closed forms and
    /// the constants.
    pub fn value(&self, pt: &ReducedPoint) -> f64 {
        let k = pt.k();
        let nu = NuPoint::from_mu(&self.dims, &pt.mu).nu;
        let e = self.exponent_e();
        let sk = &pt.sigma[k - 1];
        let tk = sk.iter().map(|x| x * x).sum::<f64>();
        let mut phi = self.h1() * nu[0] * nu[0] + self.f_term(tk) / nu[k - 1].powf(e);
        for l in 0..k - 1 {
            phi += self.g_term(Self::sigma_norm(&pt.sigma[l])) * nu[l + 1] / nu[l];
        }
        phi
    }

    /// Gradient over (ν, σ): the ν-block analytic, the σ-block from the
    /// kernel derivative (finite differences + Richardson) and the closed
    /// form of F. Layout: [ν₁..ν_k, σ₁¹..σ₁ᴺ, …, σ_kᴺ].
    pub fn gradient(&self, pt: &ReducedPoint) -> Vec<f64> {
        let k = pt.k();
        let n = self.dims.n() as usize;
        let nu = NuPoint::from_mu(&self.dims, &pt.mu).nu;
        let e = self.exponent_e();
        let h1 = self.h1();
        let g: Vec<f64> = (0..k.saturating_sub(1))
            .map(|l| self.g_term(Self::sigma_norm(&pt.sigma[l])))
            .collect();
        let sk = &pt.sigma[k - 1];
        let tk = sk.iter().map(|x| x * x).sum::<f64>();
        let fk = self.f_term(tk);

        let mut grad = vec![0.0; k + n * k];
        for i in 0..k {
            let mut gi = 0.0;
            if i == 0 {
                gi += 2.0 * h1 * nu[0];
            } else {
                gi += g[i - 1] / nu[i - 1];
            }
            if i + 1 < k {
                gi -= g[i] * nu[i + 1] / (nu[i] * nu[i]);
            }
            if i == k - 1 {
                gi -= e * fk / nu[k - 1].powf(e + 1.0);
            }
            grad[i] = gi;
        }
        // σ_l-blocks, l < k: (ν_{l+1}/ν_l)·∇g(σ_l)
        for l in 0..k - 1 {
            let norm = Self::sigma_norm(&pt.sigma[l]);
            if norm > 0.0 {
                let dg = 2.0 * self.gamma.radial_derivative(norm);
                for j in 0..n {
                    grad[k + l * n + j] = nu[l + 1] / nu[l] * dg * pt.sigma[l][j] / norm;
                }
            }
        }
        // σ_k-block: ∇F(σ_k)/ν_k^e with F = c₃P(|σ|²), ∇ = 2P'(t)σ
        let fk_dt = self.f_term_dt(tk);
        for j in 0..n {
            grad[k + (k - 1) * n + j] = 2.0 * fk_dt * sk[j] / nu[k - 1].powf(e);
        }
        grad
    }

    /// Symmetric (k+Nk)² Hessian over (ν, σ): ν-block analytic, σ-blocks by
    /// 4th-order central differences, νσ cross-blocks by mixed differences.
    /// Φ is separable across the σ_l, so all σ_l–σ_m blocks (l≠m) vanish.
    pub fn hessian(&self, pt: &ReducedPoint) -> Vec<Vec<f64>> {
        let k = pt.k();
        let n = self.dims.n() as usize;
        let dim = k + n * k;
        let nu = NuPoint::from_mu(&self.dims, &pt.mu).nu;
        let e = self.exponent_e();
        let h1 = self.h1();
        let g: Vec<f64> = (0..k.saturating_sub(1))
            .map(|l| self.g_term(Self::sigma_norm(&pt.sigma[l])))
            .collect();
        let sk = &pt.sigma[k - 1];
        let tk = sk.iter().map(|x| x * x).sum::<f64>();
        let fk = self.f_term(tk);

        let mut hess = vec![vec![0.0; dim]; dim];
        // ν-block
        for i in 0..k {
            let mut d = 0.0;
            if i == 0 {
                d += 2.0 * h1;
            }
            if i + 1 < k {
                d += 2.0 * g[i] * nu[i + 1] / nu[i].powi(3);
            }
            if i == k - 1 {
                d += e * (e + 1.0) * fk / nu[k - 1].powf(e + 2.0);
            }
            hess[i][i] = d;
            if i + 1 < k {
                let off = -g[i] / (nu[i] * nu[i]);
                hess[i][i + 1] = off;
                hess[i + 1][i] = off;
            }
        }
        // σ-blocks: 4th-order FD of the single term carrying σ_l
        for l in 0..k {
            let weight_term: Box<dyn Fn(&[f64]) -> f64> = if l + 1 < k {
                let w = nu[l + 1] / nu[l];
                Box::new(move |s: &[f64]| w * 2.0 * self.gamma.value(Self::sigma_norm(s)))
            } else {
                let w = 1.0 / nu[k - 1].powf(e);
                Box::new(move |s: &[f64]| {
                    w * self.f_term(s.iter().map(|x| x * x).sum::<f64>())
                })
            };
            let block = fd_hessian(&*weight_term, &pt.sigma[l], 0.01);
            for i in 0..n {
                for j in 0..n {
                    hess[k + l * n + i][k + l * n + j] = block[i][j];
                }
            }
        }
        // νσ cross-blocks by mixed central differences of Φ
        let h_nu = 1e-5;
        let h_s = 1e-4;
        for i in 0..k {
            for l in 0..k {
                for j in 0..n {
                    let eval = |dnu: f64, ds: f64| {
                        let mut nu2 = nu.clone();
                        nu2[i] += dnu;
                        let mut pt2 = pt.clone();
                        pt2.mu = NuPoint { nu: nu2 }.to_mu(&self.dims);
                        pt2.sigma[l][j] += ds;
                        self.value(&pt2)
                    };
                    let m = (eval(h_nu, h_s) - eval(h_nu, -h_s) - eval(-h_nu, h_s)
                        + eval(-h_nu, -h_s))
                        / (4.0 * h_nu * h_s);
                    hess[i][k + l * n + j] = m;
                    hess[k + l * n + j][i] = m;
                }
            }
        }
        hess
    }

    /// Two-stage Newton search: first on the ν-block at σ = 0 (where the
    /// quadratic form is positive definite), then the full-space certificate.
    pub fn find_critical_point(
        &self,
        init: &ReducedPoint,
        options: &NewtonOptions,
    ) -> Result<CriticalCertificate, ReducedEnergyError> {
        init.check_box()?;
        let k = init.k();
        let e = self.exponent_e();
        let h1 = self.h1();
        let g0 = self.g_term(0.0);
        let f0 = self.f_term(0.0);
        let mut nu = NuPoint::from_mu(&self.dims, &init.mu).nu;

        let grad_nu = |nu: &[f64]| -> Vec<f64> {
            let mut g = vec![0.0; k];
            for i in 0..k {
                let mut gi = 0.0;
                if i == 0 {
                    gi += 2.0 * h1 * nu[0];
                } else {
                    gi += g0 / nu[i - 1];
                }
                if i + 1 < k {
                    gi -= g0 * nu[i + 1] / (nu[i] * nu[i]);
                }
                if i == k - 1 {
                    gi -= e * f0 / nu[k - 1].powf(e + 1.0);
                }
                g[i] = gi;
            }
            g
        };
        let hess_nu = |nu: &[f64]| -> Vec<Vec<f64>> {
            let mut h = vec![vec![0.0; k]; k];
            for i in 0..k {
                let mut d = 0.0;
                if i == 0 {
                    d += 2.0 * h1;
                }
                if i + 1 < k {
                    d += 2.0 * g0 * nu[i + 1] / nu[i].powi(3);
                }
                if i == k - 1 {
                    d += e * (e + 1.0) * f0 / nu[k - 1].powf(e + 2.0);
                }
                h[i][i] = d;
                if i + 1 < k {
                    h[i][i + 1] = -g0 / (nu[i] * nu[i]);
                    h[i + 1][i] = -g0 / (nu[i] * nu[i]);
                }
            }
            h
        };
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

        let mut gnorm = norm(&grad_nu(&nu));
        let mut iters = 0usize;
        while gnorm > options.grad_tol {
            if iters >= options.max_iters {
                return Err(ReducedEnergyError::Divergence {
                    iters,
                    grad_norm: gnorm,
                });
            }
            let grad = grad_nu(&nu);
            let hess = hess_nu(&nu);
            let step = solve_dense(&hess, &grad).map_err(ReducedEnergyError::SingularNewtonStep)?;
            // backtracking on the gradient norm
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand: Vec<f64> = nu.iter().zip(&step).map(|(v, s)| v - t * s).collect();
                if cand.iter().all(|&v| v > 0.0) {
                    let cn = norm(&grad_nu(&cand));
                    if cn < gnorm {
                        // box check in the μ variables
                        let mu_cand = NuPoint { nu: cand.clone() }.to_mu(&self.dims);
                        for (idx, &m) in mu_cand.iter().enumerate() {
                            if !(m > init.d && m < 1.0 / init.d) {
                                return Err(ReducedEnergyError::BoundaryCollision {
                                    index: idx,
                                    value: m,
                                });
                            }
                        }
                        nu = cand;
                        gnorm = cn;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(ReducedEnergyError::Divergence {
                    iters,
                    grad_norm: gnorm,
                });
            }
            iters += 1;
        }

        let mu_hat = NuPoint { nu: nu.clone() }.to_mu(&self.dims);
        let point = ReducedPoint::centered(mu_hat, self.dims.n(), init.d)?;
        let full_grad = self.gradient(&point);
        let full_grad_norm = norm(&full_grad);
        let hessian = self.hessian(&point);
        let lambda = 2.0 * h1 * nu[0] * nu[0];
        // every member of the balance chain, cross-checked against λ
        let mut chain = vec![lambda];
        for i in 0..k - 1 {
            chain.push(g0 * nu[i + 1] / nu[i]);
        }
        chain.push(e * f0 / nu[k - 1].powf(e));
        let chain_residual = chain
            .iter()
            .map(|m| ((m - lambda) / lambda).abs())
            .fold(0.0, f64::max);
        let q = q_matrix(&self.dims, k as u32, lambda, g0);
        let det_q = tridiagonal_determinant(&q);
        Ok(CriticalCertificate {
            point,
            nu: NuPoint { nu },
            grad_norm: full_grad_norm,
            hessian,
            q_matrix: q,
            lambda,
            det_q,
            det_q_target: det_q_target(&self.dims, k as u32, lambda),
            chain_residual,
            newton_iterations: iters,
        })
    }

    /// Closed-form critical scales from the balance chain; the independent
    /// oracle the Newton result is checked against.
    pub fn closed_form_scales(&self, k: usize) -> (f64, Vec<f64>) {
        let e = self.exponent_e();
        let h1 = self.h1();
        let g0 = self.g_term(0.0);
        let f0 = self.f_term(0.0);
        let exponent = 1.0 + e / 2.0 + e * (k as f64 - 1.0);
        let lambda = (e * f0 * (2.0 * h1).powf(e / 2.0) * g0.powf(e * (k as f64 - 1.0)))
            .powf(1.0 / exponent);
        let mut nu = vec![(lambda / (2.0 * h1)).sqrt()];
        for i in 1..k {
            nu.push(lambda * nu[i - 1] / g0);
        }
        (lambda, nu)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 200,
        }
    }
}

/// Everything the critical-point search certifies.
#[derive(Debug)]
pub struct CriticalCertificate {
    pub point: ReducedPoint,
    pub nu: NuPoint,
    pub grad_norm: f64,
    /// full (k+Nk)² Hessian over (ν, σ)
    pub hessian: Vec<Vec<f64>>,
    pub q_matrix: Vec<Vec<f64>>,
    pub lambda: f64,
    pub det_q: f64,
    pub det_q_target: f64,
    pub chain_residual: f64,
    pub newton_iterations: usize,
}

impl CriticalCertificate {
    /// Largest |entry| coupling the ν-block to the σ-block.
    pub fn max_off_block(&self) -> f64 {
        let k = self.point.k();
        let mut worst = 0.0f64;
        for (i, row) in self.hessian.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if (i < k) != (j < k) {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// key=value text record, matrices row-major, 17 significant digits.
    pub fn to_key_value_text(&self) -> String {
        let mut out = String::new();
        let fmt_vec = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{:.16e}", x))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("k = {}\n", self.point.k()));
        out.push_str(&format!("mu = {}\n", fmt_vec(&self.point.mu)));
        out.push_str(&format!("nu = {}\n", fmt_vec(&self.nu.nu)));
        out.push_str(&format!("grad_norm = {:.16e}\n", self.grad_norm));
        out.push_str(&format!("lambda = {:.16e}\n", self.lambda));
        out.push_str(&format!("det_q = {:.16e}\n", self.det_q));
        out.push_str(&format!("det_q_target = {:.16e}\n", self.det_q_target));
        out.push_str(&format!("chain_residual = {:.16e}\n", self.chain_residual));
        let flat_q: Vec<f64> = self.q_matrix.iter().flatten().copied().collect();
        out.push_str(&format!("q_matrix = {}\n", fmt_vec(&flat_q)));
        let flat_h: Vec<f64> = self.hessian.iter().flatten().copied().collect();
        out.push_str(&format!("hessian = {}\n", fmt_vec(&flat_h)));
        out
    }
}

/// The limiting tridiagonal matrix of the ν-Hessian at the balance chain:
/// first row (3λ, −g(0)), interior rows (−λ²/g(0), 2λ, −g(0)), last diagonal
/// entry (3N−8)λ/(N−4). For k = 1 the single entry is λ + (3N−8)λ/(N−4).
pub fn q_matrix(dims: &ProblemDims, k: u32, lambda: f64, g0: f64) -> Vec<Vec<f64>> {
    let n = dims.n() as f64;
    let k = k as usize;
    let last_diag = (3.0 * n - 8.0) * lambda / (n - 4.0);
    if k == 1 {
        return vec![vec![lambda + last_diag]];
    }
    let mut q = vec![vec![0.0; k]; k];
    q[0][0] = 3.0 * lambda;
    q[0][1] = -g0;
    for i in 1..k - 1 {
        q[i][i - 1] = -lambda * lambda / g0;
        q[i][i] = 2.0 * lambda;
        q[i][i + 1] = -g0;
    }
    q[k - 1][k - 2] = -lambda * lambda / g0;
    q[k - 1][k - 1] = last_diag;
    q
}

/// Determinant by the three-term tridiagonal recursion
/// D_i = a_i D_{i−1} − b_{i−1} c_{i−1} D_{i−2}.
pub fn tridiagonal_determinant(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    let mut d_prev = 1.0;
    let mut d = m[0][0];
    for i in 1..k {
        let next = m[i][i] * d - m[i - 1][i] * m[i][i - 1] * d_prev;
        d_prev = d;
        d = next;
    }
    d
}

/// The closed-form determinant target (4Nk − 8k − 4)/(N−4) · λᵏ.
pub fn det_q_target(dims: &ProblemDims, k: u32, lambda: f64) -> f64 {
    let n = dims.n() as f64;
    let kf = k as f64;
    (4.0 * n * kf - 8.0 * kf - 4.0) / (n - 4.0) * lambda.powi(k as i32)
}

/// 4th-order central-difference Hessian (with diagonal stencil
/// (−f₂ₕ + 16f_h − 30f₀ + 16f₋ₕ − f₋₂ₕ)/(12h²)) of a scalar field at `x`.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    let at = |deltas: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in deltas {
            y[i] += d;
        }
        f(&y)
    };
    let f0 = at(&[]);
    for i in 0..n {
        let fp = at(&[(i, h)]);
        let fm = at(&[(i, -h)]);
        let fp2 = at(&[(i, 2.0 * h)]);
        let fm2 = at(&[(i, -2.0 * h)]);
        out[i][i] = (-fp2 + 16.0 * fp - 30.0 * f0 + 16.0 * fm - fm2) / (12.0 * h * h);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            // 4th-order mixed stencil from two step sizes
            let mixed = |hh: f64| {
                (at(&[(i, hh), (j, hh)]) - at(&[(i, hh), (j, -hh)])
                    - at(&[(i, -hh), (j, hh)])
                    + at(&[(i, -hh), (j, -hh)]))
                    / (4.0 * hh * hh)
            };
            let m1 = mixed(h);
            let m2 = mixed(0.5 * h);
            let v = (4.0 * m2 - m1) / 3.0;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// The σ-Hessian certificate: 4th-order FD Hessian of ΔU_{1,0}·U_{1,0} at 0.
/// Diagonal by differentiation of the closed forms: α²(N−4)(2N²−4N−4);
/// off-diagonals vanish.
pub fn sigma_hessian_certificate(dims: &ProblemDims) -> Vec<Vec<f64>> {
    let dims = *dims;
    let f = move |x: &[f64]| {
        let t = x.iter().map(|v| v * v).sum::<f64>();
        laplacian_value_product(&dims, t)
    };
    let origin = vec![0.0; dims.n() as usize];
    // Richardson over the 4th-order stencil
    let h1 = fd_hessian(&f, &origin, 0.02);
    let h2 = fd_hessian(&f, &origin, 0.01);
    let n = origin.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (16.0 * h2[i][j] - h1[i][j]) / 15.0;
        }
    }
    out
}

/// Analytic diagonal of the σ-Hessian of ΔU_{1,0}·U_{1,0} at 0, from
/// P(t) = −α²(N−4)(N+2t)(1+t)^{−(N−2)}: 2P'(0) = α²(N−4)(2N²−4N−4).
pub fn sigma_hessian_diag_closed_form(dims: &ProblemDims) -> f64 {
    let n = dims.n() as f64;
    let a2 = dims.alpha() * dims.alpha();
    a2 * (n - 4.0) * (2.0 * n * n - 4.0 * n - 4.0)
}

/// Full-pivot LU determinant; the brute-force route the tridiagonal
/// recursion is checked against.
pub fn lu_determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let (pr, pv) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pv == 0.0 {
            return 0.0;
        }
        if pr != col {
            a.swap(col, pr);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Gaussian elimination with partial pivoting for the small Newton systems.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, String> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot < 1e-300 {
            return Err(format!("pivot {pivot:.3e} in column {col}"));
        }
        m.swap(col, pivot_row);
        x.swap(col, pivot_row);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= m[col][col];
        for r in 0..col {
            let factor = m[r][col];
            x[r] -= factor * x[col];
            m[r][col] = 0.0;
        }
    }
    Ok(x)
}

/// Φ context for the unit ball with quadrature-backed constants; the common
/// setup shared by the CLI, the experiments and the tests.
pub fn unit_ball_energy(dims: &ProblemDims, engine: &QuadratureEngine) -> ReducedEnergy {
    let consts = crate::constants::energy_constants(dims, engine)
        .expect("energy constants quadrature must converge");
    let robin = crate::radial_solver::robin_function(dims);
    ReducedEnergy::new(dims, consts, robin, *engine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn energy5(k: u32) -> ReducedEnergy {
        let dims = ProblemDims::new(5, k).unwrap();
        unit_ball_energy(&dims, &QuadratureEngine::with_tolerances(1e-12, 1e-12))
    }

    #[test]
    fn gamma_kernel_at_zero_n5() {
        // Γ(0) = 16π²/105 for N=5, equal to c₂ by the Beta identity
        let dims = ProblemDims::new(5, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-12, 1e-12);
        let g0 = gamma_kernel(0.0, &dims, &engine);
        assert!(g0.converged);
        assert_relative_eq!(g0.value, 16.0 * PI * PI / 105.0, max_relative = 1e-10);
    }

    #[test]
    fn gamma_2d_matches_1d_and_closed_form() {
        let engine = QuadratureEngine::with_tolerances(1e-10, 1e-10);
        for n in [5u32, 6, 7] {
            let dims = ProblemDims::new(n, 1).unwrap();
            let g0_1d = gamma_kernel(0.0, &dims, &engine);
            // 2D path at a tiny offset must agree with the 1D path at 0
            let g0_2d = gamma_kernel(1e-12, &dims, &engine);
            assert!(
                (g0_1d.value - g0_2d.value).abs()
                    <= 10.0 * (g0_1d.error_estimate + g0_2d.error_estimate).max(1e-9),
                "1D/2D mismatch for N={n}: {} vs {}",
                g0_1d.value,
                g0_2d.value
            );
            for t in [0.1, 0.7, 2.0] {
                let g = gamma_kernel(t, &dims, &engine);
                let cf = gamma_kernel_closed_form(&dims, t);
                assert_relative_eq!(g.value, cf, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn gamma_decays_and_is_even() {
        let dims = ProblemDims::new(5, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-10, 1e-10);
        let g0 = gamma_kernel(0.0, &dims, &engine).value;
        let g01 = gamma_kernel(0.1, &dims, &engine).value;
        assert!(g01 < g0, "kernel must decrease away from 0");
        // decay is |x|^{−(N−4)}: for N=5 that is 1/|x|, so at |x|=50 the
        // kernel sits at Γ(0)/√2501
        let g50 = gamma_kernel(50.0, &dims, &engine).value;
        assert_relative_eq!(g50, g0 / 2501f64.sqrt(), max_relative = 1e-6);
        assert!(g50 < 0.021 * g0);
        // radial symmetry: ∂Γ/∂x_i(0) by central differences along an axis
        // is identically zero because Γ sees only |x|
        let eval = GammaEval::new(&dims, engine);
        let h = 1e-4;
        let along_axis = |x1: f64| eval.value(x1.abs());
        let fd = (along_axis(h) - along_axis(-h)) / (2.0 * h);
        assert!(fd.abs() < 1e-8);
    }

    #[test]
    fn gamma_monte_carlo_oracle() {
        // seeded brute-force Monte Carlo of the (ρ,φ) reduction, mapped by
        // ρ = s/(1−s); independent of the quadrature path
        use rand::{Rng, SeedableRng};
        let dims = ProblemDims::new(5, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-10, 1e-10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20260810);
        let sm = crate::constants::sphere_measure(4);
        let mut mc = |t: f64, samples: usize| -> (f64, f64) {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..samples {
                let s: f64 = rng.gen();
                let phi: f64 = rng.gen::<f64>() * PI;
                let rho = s / (1.0 - s);
                let jac = PI / ((1.0 - s) * (1.0 - s));
                let d2 = 1.0 + rho * rho + t * t - 2.0 * rho * t * phi.cos();
                let v = sm * rho.powi(3) * phi.sin().powi(3) * d2.powf(-4.5) * jac;
                sum += v;
                sumsq += v * v;
            }
            let mean = sum / samples as f64;
            let var = (sumsq / samples as f64 - mean * mean) / samples as f64;
            (mean, var.sqrt())
        };
        let (m0, s0) = mc(0.0, 2_000_000);
        let (m01, s01) = mc(0.1, 2_000_000);
        let g0 = gamma_kernel(0.0, &dims, &engine).value;
        let g01 = gamma_kernel(0.1, &dims, &engine).value;
        assert!((m0 - g0).abs() < 5.0 * s0, "MC vs quadrature at 0");
        assert!((m01 - g01).abs() < 5.0 * s01, "MC vs quadrature at 0.1");
        assert!(
            m01 - m0 < 5.0 * (s0 + s01),
            "MC ordering consistent with a decreasing kernel"
        );
    }

    #[test]
    fn phi_value_k1_closed_form() {
        // Φ(μ₁) = (32π²/175)μ₁ + (4π²/7)/μ₁³ on the unit ball, N=5
        let re = energy5(1);
        assert_relative_eq!(re.h1(), 32.0 * PI * PI / 175.0, max_relative = 1e-10);
        assert_relative_eq!(re.f_term(0.0), 4.0 * PI * PI / 7.0, max_relative = 1e-10);
        for mu in [0.5, 1.0, 1.75, 3.0] {
            let pt = ReducedPoint::centered(vec![mu], 5, 0.05).unwrap();
            let expect = 32.0 * PI * PI / 175.0 * mu + 4.0 * PI * PI / 7.0 / mu.powi(3);
            assert_relative_eq!(re.value(&pt), expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn phi_coercive_k1() {
        let re = energy5(1);
        let at = |mu: f64| re.value(&ReducedPoint::centered(vec![mu], 5, 0.01).unwrap());
        let interior = at(1.75);
        assert!(at(0.02) > 10.0 * interior);
        assert!(at(60.0) > 10.0 * interior);
    }

    #[test]
    fn phi_k2_gamma_weight() {
        // the coupling term contributes 2Γ(σ₁)(μ₂/μ₁)^{1/2}: at (1, 0.25)
        // the weight is 0.5
        let re = energy5(2);
        let pt = ReducedPoint::centered(vec![1.0, 0.25], 5, 0.05).unwrap();
        let g0 = re.g_term(0.0);
        let bare = re.h1() * 1.0 + re.f_term(0.0) / 0.25f64.powf(3.0) // ν₂^{2(N−2)/(N−4)} = μ₂³
            ;
        assert_relative_eq!(re.value(&pt) - bare, g0 * 0.5, max_relative = 1e-9);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let re = energy5(2);
        let pts = [
            ReducedPoint::new(
                vec![1.3, 0.9],
                vec![vec![0.05, -0.02, 0.0, 0.01, 0.0], vec![0.0, 0.03, -0.04, 0.0, 0.02]],
                0.05,
            )
            .unwrap(),
            ReducedPoint::centered(vec![0.8, 1.6], 5, 0.05).unwrap(),
        ];
        for pt in &pts {
            let grad = re.gradient(pt);
            let nu0 = NuPoint::from_mu(re.dims(), &pt.mu);
            // ν-block
            for i in 0..pt.k() {
                let h = 1e-6;
                let f = |d: f64| {
                    let mut nu = nu0.nu.clone();
                    nu[i] += d;
                    let mut p2 = pt.clone();
                    p2.mu = NuPoint { nu }.to_mu(re.dims());
                    re.value(&p2)
                };
                let fd = (f(h) - f(-h)) / (2.0 * h);
                assert!(
                    (grad[i] - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                    "nu-block gradient off at {i}: {} vs {}",
                    grad[i],
                    fd
                );
            }
            // σ-block
            for l in 0..pt.k() {
                for j in 0..5 {
                    let h = 1e-5;
                    let f = |d: f64| {
                        let mut p2 = pt.clone();
                        p2.sigma[l][j] += d;
                        re.value(&p2)
                    };
                    let fd = (f(h) - f(-h)) / (2.0 * h);
                    let gi = grad[pt.k() + l * 5 + j];
                    assert!(
                        (gi - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                        "sigma gradient off at ({l},{j}): {gi} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn newton_k1_matches_closed_form() {
        // ν̂⁸ = 75/8, μ̂ = (75/8)^{1/4}, λ = 2H₁ν̂², det(Q) = 8λ
        let re = energy5(1);
        let init = ReducedPoint::centered(vec![1.0], 5, 0.05).unwrap();
        let cert = re.find_critical_point(&init, &NewtonOptions::default()).unwrap();
        assert!(cert.grad_norm < 1e-10);
        let nu8 = cert.nu.nu[0].powi(8);
        assert_relative_eq!(nu8, 75.0 / 8.0, max_relative = 1e-10);
        assert_relative_eq!(cert.point.mu[0], (75.0f64 / 8.0).powf(0.25), max_relative = 1e-10);
        assert_relative_eq!(cert.det_q, 8.0 * cert.lambda, max_relative = 1e-12);
        assert_relative_eq!(cert.det_q, cert.det_q_target, max_relative = 1e-12);
        // lambda ≈ 6.3159 and det_q ≈ 50.53
        assert_relative_eq!(cert.lambda, 6.315889, max_relative = 1e-5);
        // closed-form chain oracle agrees
        let (lam_cf, nu_cf) = re.closed_form_scales(1);
        assert_relative_eq!(lam_cf, cert.lambda, max_relative = 1e-12);
        assert_relative_eq!(nu_cf[0], cert.nu.nu[0], max_relative = 1e-12);
    }

    #[test]
    fn newton_k2_balance_chain() {
        let re = energy5(2);
        let init = ReducedPoint::centered(vec![1.0, 1.0], 5, 0.05).unwrap();
        let cert = re.find_critical_point(&init, &NewtonOptions::default()).unwrap();
        assert!(cert.grad_norm < 1e-10);
        assert!(
            cert.chain_residual < 1e-8,
            "chain residual {}",
            cert.chain_residual
        );
        let (lam_cf, nu_cf) = re.closed_form_scales(2);
        assert_relative_eq!(cert.lambda, lam_cf, max_relative = 1e-10);
        for (a, b) in cert.nu.nu.iter().zip(&nu_cf) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
        // basin check: perturbed starts land on the same point
        for scale in [0.8, 1.2] {
            let init2 = ReducedPoint::centered(vec![scale, 1.0 / scale], 5, 0.05).unwrap();
            let cert2 = re.find_critical_point(&init2, &NewtonOptions::default()).unwrap();
            assert_relative_eq!(cert2.point.mu[0], cert.point.mu[0], max_relative = 1e-9);
            assert_relative_eq!(cert2.point.mu[1], cert.point.mu[1], max_relative = 1e-9);
        }
    }

    #[test]
    fn newton_error_paths() {
        let re = energy5(1);
        // boundary collision: a box too tight to hold the minimizer
        let init = ReducedPoint::centered(vec![1.0], 5, 0.65).unwrap();
        let err = re.find_critical_point(&init, &NewtonOptions::default()).unwrap_err();
        assert!(
            matches!(err, ReducedEnergyError::BoundaryCollision { .. }),
            "expected boundary collision, got {err:?}"
        );
    }

    #[test]
    fn hessian_block_structure_at_critical_point() {
        let re = energy5(2);
        let init = ReducedPoint::centered(vec![1.0, 1.5], 5, 0.05).unwrap();
        let cert = re.find_critical_point(&init, &NewtonOptions::default()).unwrap();
        assert!(
            cert.max_off_block() < 1e-7,
            "off-block Hessian entries too large: {}",
            cert.max_off_block()
        );
        // σ-blocks: diagonal within each σ_l, isotropic for l < k
        let k = 2;
        let h = &cert.hessian;
        let d0 = h[k][k];
        for j in 1..5 {
            assert_relative_eq!(h[k + j][k + j], d0, max_relative = 1e-6);
        }
        assert!(d0 < 0.0, "g-block at a σ-maximum must be negative, got {d0}");
        // ν-block is positive definite at the minimum (2x2: diag + det)
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        assert!(h[0][0] > 0.0 && det > 0.0);
    }

    #[test]
    fn q_matrix_determinant_against_lu() {
        // recursion vs full LU across the (N,k) grid, with λ from the chain
        for n in 5..=9 {
            for k in 1..=4u32 {
                let dims = ProblemDims::new(n, k).unwrap();
                let re = unit_ball_energy(&dims, &QuadratureEngine::with_tolerances(1e-11, 1e-11));
                let (lambda, _) = re.closed_form_scales(k as usize);
                let q = q_matrix(&dims, k, lambda, re.g_term(0.0));
                let rec = tridiagonal_determinant(&q);
                let lu = lu_determinant(&q);
                let target = det_q_target(&dims, k, lambda);
                assert_relative_eq!(rec, lu, max_relative = 1e-12);
                assert_relative_eq!(rec, target, max_relative = 1e-10);
            }
        }
        // spot value: k=3, N=7 → det/λ³ = 56/3
        let dims = ProblemDims::new(7, 3).unwrap();
        assert_relative_eq!(
            det_q_target(&dims, 3, 1.0),
            56.0 / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn q_matrix_matches_scaled_nu_hessian() {
        // analytically Q = diag(ν̂_i²)·HessΦ_ν at the chain point; check the
        // determinant relation det(Q) = Πν̂_i²·det(HessΦ_ν) numerically and
        // that the ν-Hessian itself is nonsingular
        let re = energy5(3);
        let init = ReducedPoint::centered(vec![1.0, 1.0, 1.0], 5, 0.02).unwrap();
        let cert = re.find_critical_point(&init, &NewtonOptions::default()).unwrap();
        let k = 3;
        let mut hnu: Vec<Vec<f64>> = (0..k).map(|i| cert.hessian[i][0..k].to_vec()).collect();
        let det_h = lu_determinant(&hnu);
        assert!(det_h.abs() > 1e-12, "nu-Hessian must be nonsingular");
        for (i, row) in hnu.iter_mut().enumerate() {
            let w = cert.nu.nu[i] * cert.nu.nu[i];
            for v in row.iter_mut() {
                *v *= w;
            }
        }
        let det_scaled = lu_determinant(&hnu);
        assert_relative_eq!(det_scaled, cert.det_q, max_relative = 1e-6);
    }

    #[test]
    fn sigma_hessian_fd_certificate() {
        for n in [5u32, 6, 7] {
            let dims = ProblemDims::new(n, 1).unwrap();
            let h = sigma_hessian_certificate(&dims);
            let target = sigma_hessian_diag_closed_form(&dims);
            for i in 0..n as usize {
                assert_relative_eq!(h[i][i], target, max_relative = 1e-7);
                for j in 0..n as usize {
                    if i != j {
                        assert!(h[i][j].abs() < 1e-8, "off-diagonal {i},{j}: {}", h[i][j]);
                    }
                }
            }
        }
        // N=5: 26α² (the 4th-order FD oracle pins the closed-form constant)
        let dims = ProblemDims::new(5, 1).unwrap();
        assert_relative_eq!(
            sigma_hessian_diag_closed_form(&dims),
            26.0 * 105f64.powf(0.25),
            max_relative = 1e-13
        );
    }

    #[test]
    fn phi_coercive_on_box_boundary() {
        // the interior minimum beats every corner of the (d, 1/d) box in the
        // μ coordinates, for a spread of (N, k)
        for (n, k) in [(5u32, 1usize), (5, 2), (7, 2), (6, 3)] {
            let dims = ProblemDims::new(n, k as u32).unwrap();
            let re = unit_ball_energy(&dims, &QuadratureEngine::with_tolerances(1e-10, 1e-10));
            let (_, nu_hat) = re.closed_form_scales(k);
            let mu_hat = NuPoint { nu: nu_hat }.to_mu(&dims);
            let d = 0.02;
            let interior = re.value(&ReducedPoint::centered(mu_hat, n, d).unwrap());
            for corner in 0..(1usize << k) {
                let mu: Vec<f64> = (0..k)
                    .map(|i| if corner >> i & 1 == 1 { 1.0 / d * 0.999 } else { d * 1.001 })
                    .collect();
                let v = re.value(&ReducedPoint::centered(mu, n, d).unwrap());
                assert!(
                    v > interior,
                    "box corner {corner:b} below the minimum for N={n}, k={k}: {v} vs {interior}"
                );
            }
        }
    }

    #[test]
    fn gamma_spline_cache_accuracy() {
        // the radial spline cache over [0, 1/d] stays within the quadrature
        // tolerance of direct evaluations (and hence of the closed form)
        let dims = ProblemDims::new(5, 1).unwrap();
        let eval = GammaEval::new(&dims, QuadratureEngine::with_tolerances(1e-10, 1e-10));
        let spline = eval.build_spline(20.0, 320);
        for i in 0..200 {
            let t = 20.0 * i as f64 / 199.0;
            let exact = gamma_kernel_closed_form(&dims, t);
            assert!(
                (spline.eval(t) - exact).abs() < 2e-6 * exact.max(1e-3),
                "spline cache off at t={t}: {} vs {exact}",
                spline.eval(t)
            );
        }
    }

    #[test]
    fn argmin_scales_with_domain_radius() {
        // H₁ ∝ R^{4−N} shifts the k=1 minimizer by ν̂⁸ ∝ 1/H₁
        let dims = ProblemDims::new(5, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-12, 1e-12);
        let consts = crate::constants::energy_constants(&dims, &engine).unwrap();
        let robin_r = crate::radial_solver::robin_function_radius(&dims, 2.0);
        let re = ReducedEnergy::new(&dims, consts, robin_r, engine);
        let (_, nu) = re.closed_form_scales(1);
        let re_unit = energy5(1);
        let (_, nu_unit) = re_unit.closed_form_scales(1);
        // H(0,0) halves at R=2 (R^{4−N} = 1/2), so ν̂⁸ doubles
        assert_relative_eq!(
            nu[0].powi(8),
            2.0 * nu_unit[0].powi(8),
            max_relative = 1e-10
        );
    }

    #[test]
    fn certificate_serialization_layout() {
        let re = energy5(1);
        let init = ReducedPoint::centered(vec![1.0], 5, 0.05).unwrap();
        let cert = re.find_critical_point(&init, &NewtonOptions::default()).unwrap();
        let txt = cert.to_key_value_text();
        assert!(txt.contains("lambda = "));
        assert!(txt.contains("q_matrix = "));
        assert!(txt.lines().all(|l| l.is_ascii()));
    }
}
