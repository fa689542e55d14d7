//! Assembly of the sign-alternating tower V = Σ (−1)^{i+1} P_εU_{μ_{iε}} and
//! the quantities measured on it: Lᵠ norms, the residual split W₁ + W₂, and
//! the energy J_ε(V).
//!
//! The scales follow μ_{iε} = μ_i ε^{(2i−1)θ/(2k)}, geometrically separated
//! and alternating in sign, and the domain tiles into annuli with
//! geometric-mean boundaries √(μ_{lε}μ_{(l−1)ε}) (outer radius fixed at 0.5,
//! inner closure at ε). The quadratic part of the energy uses the identity
//! ⟨ΔPU_i, ΔPU_j⟩ = ∫U_i^p·PU_j available under Navier conditions, so no
//! numerical second derivatives enter anywhere.

use crate::bubble::bubble_value_radial;
use crate::constants::{rational_to_f64, sphere_measure, ProblemDims};
use crate::quadrature::{self, QuadratureEngine};
use crate::radial_solver::{project_bubble, ProjectedBubble, RadialField, RadialGrid, SolverError};
use std::sync::Arc;
use thiserror::Error;

/// Outer radius of the annulus decomposition; any fixed value works
/// asymptotically and 0.5 keeps the outer-region quadrature cheap.
pub const OUTER_DECOMPOSITION_RADIUS: f64 = 0.5;

#[derive(Debug, Error)]
pub enum TowerError {
    #[error("tower scales not strictly ordered at eps = {eps:.3e}: {detail}")]
    ScaleOrdering { eps: f64, detail: String },
    #[error("tower depth mismatch: dims.k = {expected}, got {got} scales")]
    DepthMismatch { expected: u32, got: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A tower configuration: hole radius, box parameters and derived scales.
#[derive(Debug, Clone)]
pub struct TowerConfig {
    dims: ProblemDims,
    pub epsilon: f64,
    pub mu: Vec<f64>,
    pub scales: Vec<f64>,
}

/// Derive the scales μ_{iε} = μ_i ε^{(2i−1)θ/(2k)} and verify the ordering
/// μ_{1ε} > … > μ_{kε} > ε.
pub fn tower_scales(dims: &ProblemDims, epsilon: f64, mu: Vec<f64>) -> Result<TowerConfig, TowerError> {
    if mu.len() != dims.k() as usize {
        return Err(TowerError::DepthMismatch {
            expected: dims.k(),
            got: mu.len(),
        });
    }
    let scales: Vec<f64> = mu
        .iter()
        .enumerate()
        .map(|(i, &m)| m * epsilon.powf(rational_to_f64(dims.scale_exponent(i as u32 + 1))))
        .collect();
    for w in scales.windows(2) {
        if !(w[0] > w[1]) {
            return Err(TowerError::ScaleOrdering {
                eps: epsilon,
                detail: format!("scales {w:?} not decreasing"),
            });
        }
    }
    if *scales.last().unwrap() <= epsilon {
        return Err(TowerError::ScaleOrdering {
            eps: epsilon,
            detail: format!(
                "innermost scale {:.3e} does not clear the hole radius",
                scales.last().unwrap()
            ),
        });
    }
    Ok(TowerConfig {
        dims: *dims,
        epsilon,
        mu,
        scales,
    })
}

impl TowerConfig {
    pub fn dims(&self) -> &ProblemDims {
        &self.dims
    }

    pub fn k(&self) -> usize {
        self.scales.len()
    }

    /// Radial seed points for adaptive quadrature: a decade around every
    /// scale plus the annulus boundaries.
    pub fn quadrature_seeds(&self) -> Vec<f64> {
        let mut seeds = Vec::new();
        for &s in &self.scales {
            for f in [0.1, 0.3, 1.0, 3.0, 10.0] {
                seeds.push(s * f);
            }
        }
        seeds.extend(self.annuli().boundaries.iter().copied());
        seeds.push(OUTER_DECOMPOSITION_RADIUS);
        seeds.retain(|&x| x > self.epsilon && x < 1.0);
        seeds.sort_by(f64::total_cmp);
        seeds.dedup();
        seeds
    }

    /// The annulus decomposition with μ_{0ε}μ_{1ε} = r² and
    /// μ_{kε}μ_{(k+1)ε} = ε² conventions.
    pub fn annuli(&self) -> AnnulusDecomposition {
        let k = self.k();
        let mut boundaries = Vec::with_capacity(k + 1);
        boundaries.push(self.epsilon);
        for l in (1..k).rev() {
            boundaries.push((self.scales[l] * self.scales[l - 1]).sqrt());
        }
        boundaries.push(OUTER_DECOMPOSITION_RADIUS);
        AnnulusDecomposition { boundaries }
    }
}

/// Ascending boundaries [ε, √(μ_kεμ_{k−1,ε}), …, √(μ₂εμ₁ε), r]; annulus
/// A_l (1-based, l = 1 outermost) spans (boundaries[k−l], boundaries[k−l+1]).
#[derive(Debug, Clone)]
pub struct AnnulusDecomposition {
    pub boundaries: Vec<f64>,
}

impl AnnulusDecomposition {
    pub fn count(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// (inner, outer) radii of A_l for 1-based l.
    pub fn annulus(&self, l: usize) -> (f64, f64) {
        let k = self.count();
        assert!(l >= 1 && l <= k);
        (self.boundaries[k - l], self.boundaries[k - l + 1])
    }
}

/// The exact evaluation path: every P_εU via its biharmonic extension.
#[derive(Debug, Clone)]
pub struct TowerEvaluator {
    dims: ProblemDims,
    pub bubbles: Vec<ProjectedBubble>,
}

impl TowerEvaluator {
    pub fn new(cfg: &TowerConfig) -> Self {
        let bubbles = cfg
            .scales
            .iter()
            .map(|&s| ProjectedBubble::new(&cfg.dims, s, cfg.epsilon))
            .collect();
        Self {
            dims: cfg.dims,
            bubbles,
        }
    }

    /// V(r) = Σ (−1)^{i+1} P_εU_i(r).
    pub fn value(&self, r: f64) -> f64 {
        self.bubbles
            .iter()
            .enumerate()
            .map(|(i, b)| if i % 2 == 0 { b.value(r) } else { -b.value(r) })
            .sum()
    }

    fn p(&self) -> f64 {
        self.dims.p_f64()
    }

    /// f(V) with f(u) = |u|^{p−1}u.
    pub fn nonlinearity(&self, r: f64) -> f64 {
        odd_power(self.value(r), self.p())
    }

    /// Σ (−1)^{i+1} f(P_εU_i).
    pub fn nonlinearity_sum(&self, r: f64) -> f64 {
        let p = self.p();
        self.bubbles
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let f = odd_power(b.value(r), p);
                if i % 2 == 0 {
                    f
                } else {
                    -f
                }
            })
            .sum()
    }
}

fn odd_power(u: f64, p: f64) -> f64 {
    u.signum() * u.abs().powf(p)
}

/// V on the grid via the Navier solver, per the projection contract. Warns
/// through the error channel when the grid does not resolve a scale.
pub fn assemble_tower(
    cfg: &TowerConfig,
    grid: Arc<RadialGrid>,
    engine: &QuadratureEngine,
) -> Result<RadialField, TowerError> {
    for &s in &cfg.scales {
        if grid.nodes_per_decade_near(s) < 16 {
            return Err(TowerError::ScaleOrdering {
                eps: cfg.epsilon,
                detail: format!("grid does not resolve scale {s:.3e} (need 16 nodes/decade)"),
            });
        }
    }
    let mut acc = vec![0.0; grid.nodes().len()];
    for (i, &s) in cfg.scales.iter().enumerate() {
        let pu = project_bubble(&cfg.dims, s, grid.clone(), engine)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (a, v) in acc.iter_mut().zip(pu.values()) {
            *a += sign * v;
        }
    }
    Ok(RadialField::from_values(grid, acc))
}

/// |u|_q over Ω_ε with weight |S^{N−1}| r^{N−1}, integrating the field's
/// spline interpolant panel by panel.
pub fn lq_norm(field: &RadialField, q: f64) -> f64 {
    assert!(q >= 1.0, "Lq norm needs q >= 1");
    let grid = field.grid();
    let sm = sphere_measure(grid.n_dim());
    let spline = field.spline();
    let nf = grid.n_dim() as f64;
    let mut total = 0.0;
    for w in grid.nodes().windows(2) {
        let (v, _) = quadrature::gk15_panel(
            &|r: f64| sm * r.powf(nf - 1.0) * spline.eval(r).abs().powf(q),
            w[0],
            w[1],
        );
        total += v;
    }
    total.powf(1.0 / q)
}

fn beta_norm_density(cfg: &TowerConfig, ev: &TowerEvaluator, r: f64, beta: f64) -> f64 {
    let sm = sphere_measure(cfg.dims.n());
    let nf = cfg.dims.n() as f64;
    sm * r.powf(nf - 1.0) * (ev.nonlinearity(r) - ev.nonlinearity_sum(r)).abs().powf(beta)
}

/// W₁ = |f(V) − Σ(−1)^{j+1}f(PU_j)|_{2N/(N+4)} with the per-annulus split of
/// its β-th power and the mean-value cross terms p^β∫|U_l^{p−1}U_{l±1}|^β.
#[derive(Debug)]
pub struct W1Breakdown {
    pub total: f64,
    /// ∫_{A_l}|…|^β for l = 1..k (outermost first)
    pub per_annulus: Vec<f64>,
    pub outer_region: f64,
    /// p^β ∫_{A_l}|U_l^{p−1}U_m|^β for the neighbor m closest in scale
    pub cross_terms: Vec<f64>,
}

pub fn residual_w1(cfg: &TowerConfig, engine: &QuadratureEngine) -> W1Breakdown {
    let beta = rational_to_f64(cfg.dims.beta());
    let p = cfg.dims.p_f64();
    let ev = TowerEvaluator::new(cfg);
    let ann = cfg.annuli();
    let seeds = cfg.quadrature_seeds();
    let k = cfg.k();
    let sm = sphere_measure(cfg.dims.n());
    let nf = cfg.dims.n() as f64;

    let mut per_annulus = Vec::with_capacity(k);
    let mut cross_terms = Vec::with_capacity(k);
    for l in 1..=k {
        let (lo, hi) = ann.annulus(l);
        let part = quadrature::integrate_radial_with_breakpoints(
            |r| beta_norm_density(cfg, &ev, r, beta),
            lo,
            hi,
            &seeds,
            engine,
        );
        per_annulus.push(part.value);
        if k == 1 {
            // no neighboring bubble: the residual itself vanishes
            cross_terms.push(0.0);
            continue;
        }
        // dominant neighbor: the next deeper bubble for l < k, else the
        // previous one
        let m = if l < k { l + 1 } else { l - 1 };
        let (sl, sm_scale) = (cfg.scales[l - 1], cfg.scales[m - 1]);
        let dims = cfg.dims;
        let cross = quadrature::integrate_radial_with_breakpoints(
            |r| {
                sm * r.powf(nf - 1.0)
                    * (p * bubble_value_radial(&dims, sl, r).powf(p - 1.0)
                        * bubble_value_radial(&dims, sm_scale, r))
                    .powf(beta)
            },
            lo,
            hi,
            &seeds,
            engine,
        );
        cross_terms.push(cross.value);
    }
    let outer = quadrature::integrate_radial_with_breakpoints(
        |r| beta_norm_density(cfg, &ev, r, beta),
        OUTER_DECOMPOSITION_RADIUS,
        1.0,
        &seeds,
        engine,
    );
    let total = (per_annulus.iter().sum::<f64>() + outer.value).powf(1.0 / beta);
    W1Breakdown {
        total,
        per_annulus,
        outer_region: outer.value,
        cross_terms,
    }
}

/// W₂ = |Σ(−1)^{j+1}(f(PU_j) − f(U_j))|_{2N/(N+4)}, with the mean-value
/// split pieces Σ∫|U^{p−1}(PU−U)|^β and Σ∫|PU−U|^{pβ}.
#[derive(Debug)]
pub struct W2Breakdown {
    pub total: f64,
    pub linear_piece: f64,
    pub power_piece: f64,
}

pub fn residual_w2(cfg: &TowerConfig, engine: &QuadratureEngine) -> W2Breakdown {
    let beta = rational_to_f64(cfg.dims.beta());
    let p = cfg.dims.p_f64();
    let ev = TowerEvaluator::new(cfg);
    let seeds = cfg.quadrature_seeds();
    let sm = sphere_measure(cfg.dims.n());
    let nf = cfg.dims.n() as f64;
    let dims = cfg.dims;

    let dens = |r: f64| {
        let diff: f64 = ev
            .bubbles
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let d = odd_power(b.value(r), p)
                    - odd_power(bubble_value_radial(&dims, b.mu, r), p);
                if i % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum();
        sm * r.powf(nf - 1.0) * diff.abs().powf(beta)
    };
    let total = quadrature::integrate_radial_with_breakpoints(dens, cfg.epsilon, 1.0, &seeds, engine)
        .value
        .powf(1.0 / beta);

    let linear = quadrature::integrate_radial_with_breakpoints(
        |r| {
            let s: f64 = ev
                .bubbles
                .iter()
                .map(|b| {
                    (bubble_value_radial(&dims, b.mu, r).powf(p - 1.0) * b.defect(r))
                        .abs()
                        .powf(beta)
                })
                .sum();
            sm * r.powf(nf - 1.0) * s
        },
        cfg.epsilon,
        1.0,
        &seeds,
        engine,
    );
    let power = quadrature::integrate_radial_with_breakpoints(
        |r| {
            let s: f64 = ev
                .bubbles
                .iter()
                .map(|b| b.defect(r).abs().powf(p * beta))
                .sum();
            sm * r.powf(nf - 1.0) * s
        },
        cfg.epsilon,
        1.0,
        &seeds,
        engine,
    );
    W2Breakdown {
        total,
        linear_piece: linear.value,
        power_piece: power.value,
    }
}

/// ⟨ΔPU_i, ΔPU_j⟩ computed as ∫U_i^p·PU_j (0-based indices).
pub fn cross_term_energy(
    cfg: &TowerConfig,
    i: usize,
    j: usize,
    engine: &QuadratureEngine,
) -> f64 {
    let ev = TowerEvaluator::new(cfg);
    let sm = sphere_measure(cfg.dims.n());
    let nf = cfg.dims.n() as f64;
    let p = cfg.dims.p_f64();
    let dims = cfg.dims;
    let seeds = cfg.quadrature_seeds();
    quadrature::integrate_radial_with_breakpoints(
        |r| {
            sm * r.powf(nf - 1.0)
                * bubble_value_radial(&dims, cfg.scales[i], r).powf(p)
                * ev.bubbles[j].value(r)
        },
        cfg.epsilon,
        1.0,
        &seeds,
        engine,
    )
    .value
}

/// J_ε(V) = ½Σ(−1)^{i+j}⟨ΔPU_i,ΔPU_j⟩ − 1/(p+1)∫|V|^{p+1}, the quadratic
/// part through the integration-by-parts identity.
pub fn tower_energy(cfg: &TowerConfig, engine: &QuadratureEngine) -> f64 {
    let k = cfg.k();
    let p = cfg.dims.p_f64();
    let ev = TowerEvaluator::new(cfg);
    let sm = sphere_measure(cfg.dims.n());
    let nf = cfg.dims.n() as f64;
    let seeds = cfg.quadrature_seeds();
    let mut quadratic = 0.0;
    for i in 0..k {
        for j in 0..k {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            quadratic += sign * cross_term_energy(cfg, i, j, engine);
        }
    }
    let potential = quadrature::integrate_radial_with_breakpoints(
        |r| sm * r.powf(nf - 1.0) * ev.value(r).abs().powf(p + 1.0),
        cfg.epsilon,
        1.0,
        &seeds,
        engine,
    )
    .value;
    0.5 * quadratic - potential / (p + 1.0)
}

/// Number of sign changes of the tower profile over the annulus (counted on
/// a log-uniform sampling).
pub fn sign_changes(cfg: &TowerConfig, samples: usize) -> usize {
    let ev = TowerEvaluator::new(cfg);
    let lo = cfg.epsilon * 1.0001;
    let hi = 0.9999;
    let mut count = 0;
    let mut prev = 0.0f64;
    for i in 0..samples {
        let r = lo * (hi / lo).powf(i as f64 / (samples - 1) as f64);
        let v = ev.value(r);
        if prev != 0.0 && v * prev < 0.0 {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    count
}
