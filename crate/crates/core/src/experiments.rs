//! Verification campaigns: ε-sweeps, log-log rate fits and report assembly.
//!
//! Each experiment sweeps a quantity over a geometric ε-range (samples are
//! independent and run in parallel with a deterministic collection order),
//! fits the decay rate and checks it — together with any leading constants —
//! against its closed-form target. Gated rows decide pass/fail; informational
//! rows record diagnostics (dominance splits, alternative constants,
//! floor structure) without gating.

use crate::bubble::bubble_value_radial;
use crate::constants::{
    c1_closed_form, c2_closed_form, energy_constants, rational_to_f64, sphere_measure, ProblemDims,
};
use crate::quadrature::{self, QuadratureEngine};
use crate::radial_solver::{
    expansion_coefficients, expansion_decompose, robin_function, robin_profile,
    BiharmonicExtension, ProjectedBubble, ProjectedZ0, RadialGrid,
};
use crate::reduced_energy::{
    det_q_target, gamma_kernel, lu_determinant, q_matrix, sigma_hessian_certificate,
    sigma_hessian_diag_closed_form, tridiagonal_determinant, unit_ball_energy, NewtonOptions,
    ReducedPoint,
};
use crate::tower::{residual_w1, residual_w2, tower_energy, tower_scales, TowerConfig};
use crate::bubble::z0_kernel_radial;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("rate fit needs at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("rate fit requires positive values (got {value:.3e} at eps = {eps:.3e})")]
    NonPositiveValue { eps: f64, value: f64 },
    #[error("rate fit requires distinct epsilons")]
    DuplicateEpsilon,
}

/// Least-squares line through (ln ε, ln v).
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

pub fn rate_fit(samples: &[(f64, f64)]) -> Result<RateFit, ExperimentError> {
    if samples.len() < 4 {
        return Err(ExperimentError::TooFewSamples(samples.len()));
    }
    for &(eps, v) in samples {
        if !(v > 0.0) {
            return Err(ExperimentError::NonPositiveValue { eps, value: v });
        }
    }
    let mut eps_sorted: Vec<f64> = samples.iter().map(|s| s.0).collect();
    eps_sorted.sort_by(f64::total_cmp);
    if eps_sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ExperimentError::DuplicateEpsilon);
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        n_points: samples.len(),
    })
}

/// One checked line of an experiment.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub quantity: String,
    pub measured: f64,
    pub target: f64,
    /// relative tolerance when target ≠ 0, absolute threshold otherwise
    pub tolerance: f64,
    pub passed: bool,
    /// informational rows never gate the experiment verdict
    pub gate: bool,
    /// where the target comes from (closed form, recursion identity, …)
    pub note: String,
}

impl ReportRow {
    fn rel(quantity: &str, measured: f64, target: f64, tol: f64, gate: bool, note: &str) -> Self {
        let passed = ((measured - target) / target).abs() <= tol;
        Self {
            quantity: quantity.into(),
            measured,
            target,
            tolerance: tol,
            passed,
            gate,
            note: note.into(),
        }
    }

    fn threshold(quantity: &str, measured: f64, limit: f64, gate: bool, note: &str) -> Self {
        Self {
            quantity: quantity.into(),
            measured,
            target: limit,
            tolerance: limit,
            passed: measured <= limit,
            gate,
            note: note.into(),
        }
    }
}

/// A sweep sample destined for the experiment's CSV.
#[derive(Debug, Clone)]
pub struct SweepSample {
    pub epsilon: f64,
    pub quantity: String,
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub inputs: String,
    pub rows: Vec<ReportRow>,
    pub samples: Vec<SweepSample>,
    pub duration: Duration,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().filter(|r| r.gate).all(|r| r.passed)
    }
}

/// Geometric sweep from `eps_min` up to `eps_max`, ascending.
pub fn geometric_sweep(eps_min: f64, eps_max: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2 && eps_max > eps_min && eps_min > 0.0);
    (0..samples)
        .map(|i| {
            (eps_min.ln() + (eps_max.ln() - eps_min.ln()) * i as f64 / (samples - 1) as f64).exp()
        })
        .collect()
}

fn fit_row(
    quantity: &str,
    samples: &[(f64, f64)],
    target: f64,
    tol: f64,
    gate: bool,
    note: &str,
) -> (ReportRow, Option<RateFit>) {
    match rate_fit(samples) {
        Ok(fit) => {
            let mut row = ReportRow::rel(quantity, fit.slope, target, tol, gate, note);
            if fit.r_squared < 0.99 {
                row.passed = false;
                row.note = format!("{} [r2 = {:.4} < 0.99]", row.note, fit.r_squared);
            } else {
                row.note = format!("{} [r2 = {:.6}]", row.note, fit.r_squared);
            }
            (row, Some(fit))
        }
        Err(e) => (
            ReportRow {
                quantity: quantity.into(),
                measured: f64::NAN,
                target,
                tolerance: tol,
                passed: false,
                gate,
                note: format!("fit failed: {e}"),
            },
            None,
        ),
    }
}

/// The certified critical scales for the experiments: Newton from a unit
/// start, cross-checked against the closed-form chain.
pub fn certified_mu_hat(dims: &ProblemDims, engine: &QuadratureEngine) -> Vec<f64> {
    let re = unit_ball_energy(dims, engine);
    let init = ReducedPoint::centered(vec![1.0; dims.k() as usize], dims.n(), 0.02)
        .expect("unit start inside the box");
    re.find_critical_point(&init, &NewtonOptions::default())
        .expect("critical point search must converge at the default setup")
        .point
        .mu
}

// ---------------------------------------------------------------------------
// energy expansion
// ---------------------------------------------------------------------------

/// J_ε(V) − 2kc₁α^{p+1}/N over an ε-sweep at the certified μ̂: rate against
/// (N−4)θ/(2k) and leading coefficient against (α^{p+1}/2)Φ(μ̂,0). For k = 1
/// the single-bubble pieces are split and checked separately.
pub fn energy_expansion_experiment(
    dims: &ProblemDims,
    eps_min: f64,
    eps_max: f64,
    n_samples: usize,
    engine: &QuadratureEngine,
) -> ExperimentReport {
    let start = Instant::now();
    let k = dims.k() as usize;
    let mu_hat = certified_mu_hat(dims, engine);
    let re = unit_ball_energy(dims, engine);
    let phi_hat = re.value(
        &ReducedPoint::centered(mu_hat.clone(), dims.n(), 0.02).expect("certified point in box"),
    );
    let alpha_p1 = dims.alpha_pow_p_plus_1();
    let j_limit = 2.0 * k as f64 * c1_closed_form(dims.n()) * alpha_p1 / dims.n() as f64;
    let rate_target = rational_to_f64(dims.leading_rate());
    let coef_target = 0.5 * alpha_p1 * phi_hat;

    let eps_list = geometric_sweep(eps_min, eps_max, n_samples);
    let per_eps: Vec<(f64, f64, f64, f64)> = eps_list
        .par_iter()
        .map(|&eps| {
            let cfg = tower_scales(dims, eps, mu_hat.clone()).expect("scales ordered");
            let j = tower_energy(&cfg, engine);
            // single-bubble split: I₂ = ½∫U^p·h with h = A+Br²+Cr^{4−N}+Dr^{2−N};
            // the (A,B) part carries the Robin term, (C,D) the hole corrections
            let (rob, hole) = if k == 1 {
                split_single_bubble_i2(dims, &cfg, engine)
            } else {
                (0.0, 0.0)
            };
            (eps, j, rob, hole)
        })
        .collect();

    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let excess: Vec<(f64, f64)> = per_eps.iter().map(|&(e, j, _, _)| (e, j - j_limit)).collect();
    for &(e, j, rob, hole) in &per_eps {
        samples.push(SweepSample {
            epsilon: e,
            quantity: "J_minus_limit".into(),
            value: j - j_limit,
            error_estimate: 0.0,
        });
        if k == 1 {
            samples.push(SweepSample {
                epsilon: e,
                quantity: "I2_robin_part".into(),
                value: rob,
                error_estimate: 0.0,
            });
            samples.push(SweepSample {
                epsilon: e,
                quantity: "I2_hole_part".into(),
                value: hole,
                error_estimate: 0.0,
            });
        }
    }

    let (row, _) = fit_row(
        "energy expansion rate",
        &excess,
        rate_target,
        0.10,
        true,
        "predicted rate (N-4)*theta/(2k)",
    );
    rows.push(row);
    // leading coefficient from the cleanest (smallest-ε) sample, normalized
    // by the predicted rate; the slowly-decaying corrections bias a free
    // intercept far more
    let (e0, v0) = excess[0];
    rows.push(ReportRow::rel(
        "energy leading coefficient",
        v0 / e0.powf(rate_target),
        coef_target,
        0.20,
        true,
        "(alpha^(p+1)/2) * Phi(mu_hat, 0) at the certified scales",
    ));

    if k == 1 {
        let robin_samples: Vec<(f64, f64)> =
            per_eps.iter().map(|&(e, _, rob, _)| (e, rob)).collect();
        let hole_samples: Vec<(f64, f64)> =
            per_eps.iter().map(|&(e, _, _, hole)| (e, hole)).collect();
        let (row, _) = fit_row(
            "ball-correction part rate",
            &robin_samples,
            rate_target,
            0.10,
            false,
            "Robin term of the single-bubble expansion",
        );
        rows.push(row);
        let rob_target =
            0.5 * alpha_p1 * c2_closed_form(dims.n()) * robin_function(dims)
                * mu_hat[0].powi(dims.n() as i32 - 4);
        rows.push(ReportRow::rel(
            "ball-correction part coefficient",
            robin_samples[0].1 / robin_samples[0].0.powf(rate_target),
            rob_target,
            0.10,
            false,
            "(alpha^(p+1)/2) * c2 * H(0,0) * mu_hat^(N-4)",
        ));
        let hole_measured = hole_samples[0].1 / hole_samples[0].0.powf(rate_target);
        let n = dims.n() as f64;
        let hole_c3 = 0.5 * alpha_p1 * re.f_term(0.0) / mu_hat[0].powi(dims.n() as i32 - 2);
        let hole_ext = alpha_p1 * sphere_measure(dims.n()) / (n + 2.0)
            / mu_hat[0].powi(dims.n() as i32 - 2);
        rows.push(ReportRow::rel(
            "hole part coefficient vs c3 scaling",
            hole_measured,
            hole_c3,
            0.05,
            false,
            "(alpha^(p+1)/2) * c3 * LapU(0)U(0) / mu_hat^(N-2); measured value sits 4/3 above it",
        ));
        rows.push(ReportRow::rel(
            "hole part coefficient vs extension closed form",
            hole_measured,
            hole_ext,
            0.05,
            false,
            "alpha^(p+1) * |S^(N-1)|/(N+2) / mu_hat^(N-2), from the exact C,D coefficients",
        ));
        // the third-order piece I₃ = J(PU) − I₁ − I₂ decays at least as fast
        // as its bound exponent min(Nθ/2, N(1−θ/2))
        let theta = dims.theta_f64();
        let bound = (n * theta / 2.0).min(n * (1.0 - theta / 2.0));
        let i3: Vec<(f64, f64)> = per_eps
            .iter()
            .map(|&(e, _, _, _)| {
                let cfg = tower_scales(dims, e, mu_hat.clone()).unwrap();
                (e, third_order_piece(dims, &cfg, engine).abs())
            })
            .collect();
        if let Ok(fit) = rate_fit(&i3) {
            rows.push(ReportRow {
                quantity: "third-order piece exponent >= bound".into(),
                measured: fit.slope,
                target: bound,
                tolerance: 0.0,
                passed: fit.slope >= bound * 0.9,
                gate: false,
                note: format!("bound exponent min(N*theta/2, N(1-theta/2)) [r2 = {:.4}]", fit.r_squared),
            });
        }
    }

    ExperimentReport {
        name: format!("energy-expansion-k{k}"),
        inputs: format!(
            "N={} k={k} eps in [{eps_min:.1e}, {eps_max:.1e}] x{n_samples}, mu_hat={mu_hat:?}",
            dims.n()
        ),
        rows,
        samples,
        duration: start.elapsed(),
    }
}

/// ½∫U^p·h split into the (A,B)-part (ball/Robin) and (C,D)-part (hole).
fn split_single_bubble_i2(
    dims: &ProblemDims,
    cfg: &TowerConfig,
    engine: &QuadratureEngine,
) -> (f64, f64) {
    let mu = cfg.scales[0];
    let pb = ProjectedBubble::new(dims, mu, cfg.epsilon);
    let ball = pb.correction.ball_part();
    let hole = pb.correction.hole_part();
    let sm = sphere_measure(dims.n());
    let nf = dims.n() as f64;
    let p = dims.p_f64();
    let seeds = cfg.quadrature_seeds();
    let dims = *dims;
    let part = |ext: BiharmonicExtension| {
        0.5 * quadrature::integrate_radial_with_breakpoints(
            |r| sm * r.powf(nf - 1.0) * bubble_value_radial(&dims, mu, r).powf(p) * ext.eval(r),
            cfg.epsilon,
            1.0,
            &seeds,
            engine,
        )
        .value
    };
    (part(ball), part(hole))
}

/// I₃ = J_ε(PU) − I₁ − I₂ for the single bubble.
fn third_order_piece(dims: &ProblemDims, cfg: &TowerConfig, engine: &QuadratureEngine) -> f64 {
    let mu = cfg.scales[0];
    let pb = ProjectedBubble::new(dims, mu, cfg.epsilon);
    let sm = sphere_measure(dims.n());
    let nf = dims.n() as f64;
    let p = dims.p_f64();
    let seeds = cfg.quadrature_seeds();
    let int = |f: &dyn Fn(f64) -> f64| {
        quadrature::integrate_radial_with_breakpoints(
            |r| sm * r.powf(nf - 1.0) * f(r),
            cfg.epsilon,
            1.0,
            &seeds,
            engine,
        )
        .value
    };
    let dims2 = *dims;
    let u = move |r: f64| bubble_value_radial(&dims2, mu, r);
    let j = 0.5 * int(&|r| u(r).powf(p) * pb.value(r))
        - int(&|r| pb.value(r).abs().powf(p + 1.0)) / (p + 1.0);
    let i1 = 2.0 / nf * int(&|r| u(r).powf(p + 1.0));
    let i2 = 0.5 * int(&|r| u(r).powf(p) * pb.defect(r));
    j - i1 - i2
}

// ---------------------------------------------------------------------------
// residual rates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    W1,
    W2,
}

/// Fitted decay rate of the residual norm W₁ (k ≥ 2) or W₂ against the
/// 5 ≤ N ≤ 11 prediction (N−4)θ/(2k).
pub fn residual_rate_experiment(
    dims: &ProblemDims,
    kind: ResidualKind,
    eps_min: f64,
    eps_max: f64,
    n_samples: usize,
    engine: &QuadratureEngine,
) -> ExperimentReport {
    let start = Instant::now();
    let k = dims.k() as usize;
    let mu_hat = certified_mu_hat(dims, engine);
    let rate_target = rational_to_f64(dims.leading_rate());
    let eps_list = geometric_sweep(eps_min, eps_max, n_samples);

    let mut rows = Vec::new();
    let mut samples = Vec::new();
    match kind {
        ResidualKind::W2 => {
            let sweep: Vec<(f64, f64, f64, f64)> = eps_list
                .par_iter()
                .map(|&eps| {
                    let cfg = tower_scales(dims, eps, mu_hat.clone()).expect("scales");
                    let w = residual_w2(&cfg, engine);
                    (eps, w.total, w.linear_piece, w.power_piece)
                })
                .collect();
            for &(e, total, lin, pow) in &sweep {
                samples.push(SweepSample {
                    epsilon: e,
                    quantity: "W2".into(),
                    value: total,
                    error_estimate: 0.0,
                });
                samples.push(SweepSample {
                    epsilon: e,
                    quantity: "W2_linear_piece".into(),
                    value: lin,
                    error_estimate: 0.0,
                });
                samples.push(SweepSample {
                    epsilon: e,
                    quantity: "W2_power_piece".into(),
                    value: pow,
                    error_estimate: 0.0,
                });
            }
            let pts: Vec<(f64, f64)> = sweep.iter().map(|&(e, t, _, _)| (e, t)).collect();
            let (row, _) = fit_row(
                "W2 rate",
                &pts,
                rate_target,
                0.15,
                true,
                "predicted rate (N-4)*theta/(2k), 5<=N<=11 regime",
            );
            rows.push(row);
            let (_, _, lin, pow) = sweep[sweep.len() / 2];
            rows.push(ReportRow::threshold(
                "W2 power piece / linear piece",
                pow / lin,
                1e-2,
                false,
                "the |U^(p-1)(PU-U)| term dominates the split",
            ));
        }
        ResidualKind::W1 => {
            let sweep: Vec<(f64, crate::tower::W1Breakdown)> = eps_list
                .par_iter()
                .map(|&eps| {
                    let cfg = tower_scales(dims, eps, mu_hat.clone()).expect("scales");
                    (eps, residual_w1(&cfg, engine))
                })
                .collect();
            for (e, w) in &sweep {
                samples.push(SweepSample {
                    epsilon: *e,
                    quantity: "W1".into(),
                    value: w.total,
                    error_estimate: 0.0,
                });
                for (l, v) in w.per_annulus.iter().enumerate() {
                    samples.push(SweepSample {
                        epsilon: *e,
                        quantity: format!("W1_annulus_{}", l + 1),
                        value: *v,
                        error_estimate: 0.0,
                    });
                }
            }
            let pts: Vec<(f64, f64)> = sweep.iter().map(|(e, w)| (*e, w.total)).collect();
            let (row, _) = fit_row(
                "W1 rate",
                &pts,
                rate_target,
                0.15,
                true,
                "predicted rate (N-4)*theta/(2k), 5<=N<=11 regime",
            );
            rows.push(row);
            // cross-term consistency at the smallest ε: each annulus
            // contribution is carried by the neighboring-bubble cross term
            // (mean-value factor p^β included)
            let (_, w0) = &sweep[0];
            let beta = rational_to_f64(dims.beta());
            let pbeta = dims.p_f64().powf(beta);
            for l in 0..k {
                let ratio = w0.per_annulus[l] / (pbeta * w0.cross_terms[l]);
                rows.push(ReportRow::rel(
                    &format!("annulus {} residual vs cross term", l + 1),
                    ratio,
                    1.0,
                    0.5,
                    false,
                    "within the mean-value factor of p^beta * int |U_l^(p-1) U_m|^beta",
                ));
            }
            rows.push(ReportRow::threshold(
                "outer region share of W1^beta",
                w0.outer_region / w0.per_annulus.iter().sum::<f64>(),
                1e-4,
                false,
                "the region beyond the decomposition radius is subdominant",
            ));
        }
    }

    ExperimentReport {
        name: format!(
            "residual-{}-k{k}",
            if kind == ResidualKind::W1 { "w1" } else { "w2" }
        ),
        inputs: format!(
            "N={} k={k} eps in [{eps_min:.1e}, {eps_max:.1e}] x{n_samples}, mu_hat={mu_hat:?}",
            dims.n()
        ),
        rows,
        samples,
        duration: start.elapsed(),
    }
}

// ---------------------------------------------------------------------------
// interaction integrals
// ---------------------------------------------------------------------------

/// Closed-form interaction integrals on the annulus decomposition (k = 2):
/// ∫_{A₁}U₁^pU₂ (rate and sharp constant), ∫_{A₁}U₂^{p+1}, and the
/// mixed-norm ∫_{A₁}|U₁^{p−1}U₂|^β.
pub fn interaction_integral_experiment(
    dims: &ProblemDims,
    eps_min: f64,
    eps_max: f64,
    n_samples: usize,
    engine: &QuadratureEngine,
) -> ExperimentReport {
    let start = Instant::now();
    assert_eq!(dims.k(), 2, "interaction experiment is a k = 2 check");
    let mu_hat = certified_mu_hat(dims, engine);
    let eps_list = geometric_sweep(eps_min, eps_max, n_samples);
    let sm = sphere_measure(dims.n());
    let nf = dims.n() as f64;
    let p = dims.p_f64();
    let beta = rational_to_f64(dims.beta());
    let theta = dims.theta_f64();

    let sweep: Vec<(f64, f64, f64, f64)> = eps_list
        .par_iter()
        .map(|&eps| {
            let cfg = tower_scales(dims, eps, mu_hat.clone()).expect("scales");
            let (lo, hi) = cfg.annuli().annulus(1);
            let (m1, m2) = (cfg.scales[0], cfg.scales[1]);
            let d = *dims;
            let seeds = [0.5 * m1, m1, 2.0 * m1];
            let int = |f: &dyn Fn(f64) -> f64| {
                quadrature::integrate_radial_with_breakpoints(
                    |r| sm * r.powf(nf - 1.0) * f(r),
                    lo,
                    hi,
                    &seeds,
                    engine,
                )
                .value
            };
            let i_cross = int(&|r| {
                bubble_value_radial(&d, m1, r).powf(p) * bubble_value_radial(&d, m2, r)
            });
            let i_deep = int(&|r| bubble_value_radial(&d, m2, r).powf(p + 1.0));
            let i_mixed = int(&|r| {
                (bubble_value_radial(&d, m1, r).powf(p - 1.0) * bubble_value_radial(&d, m2, r))
                    .powf(beta)
            });
            (eps, i_cross, i_deep, i_mixed)
        })
        .collect();

    let mut samples = Vec::new();
    for &(e, a, b, c) in &sweep {
        for (q, v) in [("A1_U1p_U2", a), ("A1_U2_p_plus_1", b), ("A1_mixed_beta", c)] {
            samples.push(SweepSample {
                epsilon: e,
                quantity: q.into(),
                value: v,
                error_estimate: 0.0,
            });
        }
    }

    let cross_rate_target = rational_to_f64(dims.leading_rate());
    let deep_rate_target = nf * theta / (2.0 * dims.k() as f64);
    let mixed_rate_target = cross_rate_target * beta;

    let mut rows = Vec::new();
    let cross_pts: Vec<(f64, f64)> = sweep.iter().map(|&(e, a, _, _)| (e, a)).collect();
    let (row, _) = fit_row(
        "A1 cross integral rate",
        &cross_pts,
        cross_rate_target,
        0.15,
        true,
        "predicted rate (N-4)*theta/(2k)",
    );
    rows.push(row);
    let gamma0 = gamma_kernel(0.0, dims, engine).value;
    let const_target =
        dims.alpha_pow_p_plus_1() * gamma0 * (mu_hat[1] / mu_hat[0]).powf((nf - 4.0) / 2.0);
    rows.push(ReportRow::rel(
        "A1 cross integral constant",
        cross_pts[0].1 / cross_pts[0].0.powf(cross_rate_target),
        const_target,
        0.05,
        true,
        "alpha^(p+1) * Gamma(0) * (mu2/mu1)^((N-4)/2)",
    ));
    let deep_pts: Vec<(f64, f64)> = sweep.iter().map(|&(e, _, b, _)| (e, b)).collect();
    let (row, _) = fit_row(
        "A1 deep-bubble L^(p+1) rate",
        &deep_pts,
        deep_rate_target,
        0.15,
        true,
        "predicted rate N*theta/(2k)",
    );
    rows.push(row);
    let mixed_pts: Vec<(f64, f64)> = sweep.iter().map(|&(e, _, _, c)| (e, c)).collect();
    let (row, _) = fit_row(
        "A1 mixed-norm beta rate",
        &mixed_pts,
        mixed_rate_target,
        0.15,
        false,
        "beta-weighted rate (N-4)*theta*beta/(2k), 5<=N<=11 regime",
    );
    rows.push(row);

    ExperimentReport {
        name: "interaction-integrals-k2".into(),
        inputs: format!(
            "N={} k=2 eps in [{eps_min:.1e}, {eps_max:.1e}] x{n_samples}, mu_hat={mu_hat:?}",
            dims.n()
        ),
        rows,
        samples,
        duration: start.elapsed(),
    }
}

// ---------------------------------------------------------------------------
// projection defect
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub enum DefectPath {
    /// μ tied to ε through the tower scaling μ_ε = μ₁ε^{θ/2} (k = 1); the
    /// sweep variable is ε.
    TiedScaling,
    /// ε = μ^a with the sweep variable μ (the fit runs against μ).
    PowerLaw { exponent: f64 },
}

/// Predicted defect exponent for ∫U^{p−1}(P_εU−U)², by dimension regime.
pub fn defect_regime_exponent(dims: &ProblemDims, path: DefectPath) -> f64 {
    let n = dims.n() as f64;
    // exponents (a₁ of μ^{a₁}, a₂ of (ε/μ)^{a₂})
    let (a1, a2) = if dims.n() >= 9 {
        (n, n)
    } else if dims.n() == 8 {
        (8.0, 12.0)
    } else {
        (2.0 * (n - 4.0), 2.0 * (n - 2.0))
    };
    match path {
        DefectPath::TiedScaling => {
            let s = dims.theta_f64() / 2.0;
            (a1 * s).min(a2 * (1.0 - s))
        }
        DefectPath::PowerLaw { exponent } => a1.min(a2 * (exponent - 1.0)),
    }
}

pub fn projection_defect_experiment(
    dims: &ProblemDims,
    eps_min: f64,
    eps_max: f64,
    n_samples: usize,
    mu1: f64,
    path: DefectPath,
    engine: &QuadratureEngine,
) -> ExperimentReport {
    let start = Instant::now();
    let sm = sphere_measure(dims.n());
    let nf = dims.n() as f64;
    let p = dims.p_f64();
    let sweep_vals = geometric_sweep(eps_min, eps_max, n_samples);
    let d = *dims;

    let sweep: Vec<(f64, f64)> = sweep_vals
        .par_iter()
        .map(|&x| {
            // x is ε on the tied path, μ on the power-law path
            let (mu, eps) = match path {
                DefectPath::TiedScaling => (mu1 * x.powf(dims.theta_f64() / 2.0), x),
                DefectPath::PowerLaw { exponent } => (x, x.powf(exponent)),
            };
            let pb = ProjectedBubble::new(&d, mu, eps);
            let seeds = [0.1 * mu, mu, 10.0 * mu];
            let v = quadrature::integrate_radial_with_breakpoints(
                |r| {
                    sm * r.powf(nf - 1.0)
                        * bubble_value_radial(&d, mu, r).powf(p - 1.0)
                        * pb.defect(r).powi(2)
                },
                eps,
                1.0,
                &seeds,
                engine,
            )
            .value;
            (x, v)
        })
        .collect();

    let target = defect_regime_exponent(dims, path);
    let mut rows = Vec::new();
    let (row, _) = fit_row(
        "projection defect rate",
        &sweep,
        target,
        0.15,
        true,
        "dimension-regime prediction for int U^(p-1)(PU-U)^2",
    );
    rows.push(row);

    let samples = sweep
        .iter()
        .map(|&(e, v)| SweepSample {
            epsilon: e,
            quantity: "defect_integral".into(),
            value: v,
            error_estimate: 0.0,
        })
        .collect();
    ExperimentReport {
        name: format!("projection-defect-n{}", dims.n()),
        inputs: format!(
            "N={} path={path:?} sweep in [{eps_min:.1e}, {eps_max:.1e}] x{n_samples}, mu1={mu1}",
            dims.n()
        ),
        rows,
        samples,
        duration: start.elapsed(),
    }
}

// ---------------------------------------------------------------------------
// projection-expansion remainder
// ---------------------------------------------------------------------------

/// The projection-expansion remainder at fixed bubble scale μ: sup|R(r*)| rate
/// against the stated ε^{N−1}, the envelope-ratio stability, and the exact
/// floor structure that the fixed-μ measurement actually exhibits.
pub fn remainder_experiment(
    dims: &ProblemDims,
    mu: f64,
    r_star: f64,
    eps_min: f64,
    eps_max: f64,
    n_samples: usize,
    grid_nodes: usize,
    engine: &QuadratureEngine,
) -> ExperimentReport {
    let start = Instant::now();
    let n = dims.n() as f64;
    let q = (n - 4.0) / 2.0;
    let eps_list = geometric_sweep(eps_min, eps_max, n_samples);
    let robin = robin_profile(dims);
    let alpha_mu_q = dims.alpha() * mu.powf(q);

    // ε-independent limit of the remainder at fixed μ: the ball-projection
    // correction αμ^q H − (U − P⁰U) (exact, two-parameter extension)
    let ball = BiharmonicExtension::bounded_on_ball(
        dims.n(),
        1.0,
        bubble_value_radial(dims, mu, 1.0),
        crate::bubble::bubble_laplacian_radial(dims, mu, 1.0),
    );
    let floor = |r: f64| alpha_mu_q * robin.eval(r) - ball.eval(r);

    let d = *dims;
    let per_eps: Vec<(f64, f64, f64, f64, f64)> = eps_list
        .par_iter()
        .map(|&eps| {
            // literal measurement through the grid solver route
            let grid = Arc::new(
                RadialGrid::graded(&d, eps, grid_nodes, &[mu.min(0.9), r_star]).unwrap(),
            );
            let exp = expansion_decompose(&d, mu, grid.clone(), engine).expect("regime holds");
            let r_at = exp.remainder.spline().eval(r_star);
            let mut ratio_sup = 0.0f64;
            for (&r, &rv) in grid.nodes().iter().zip(exp.remainder.values()) {
                let env = crate::radial_solver::remainder_envelope(&d, mu, eps, r);
                ratio_sup = ratio_sup.max(rv.abs() / env);
            }
            // exact-path remainder for the floor-subtracted diagnostics
            let exact_rem = |m: f64| {
                let pb = ProjectedBubble::new(&d, m, eps);
                let (a1, a2) = expansion_coefficients(&d, m, eps);
                pb.value(r_star) - bubble_value_radial(&d, m, r_star)
                    + d.alpha() * m.powf(q) * robin.eval(r_star)
                    + a1 * (eps / r_star).powf(n - 4.0)
                    + a2 * (eps / r_star).powf(n - 2.0)
            };
            let sub = (exact_rem(mu) - floor(r_star)).abs();
            // μ-derivative of the remainder by central differences, with the
            // μ-derivative of the floor removed
            let dm = 1e-5 * mu;
            let floor_at = |m: f64| {
                let ball_m = BiharmonicExtension::bounded_on_ball(
                    d.n(),
                    1.0,
                    bubble_value_radial(&d, m, 1.0),
                    crate::bubble::bubble_laplacian_radial(&d, m, 1.0),
                );
                d.alpha() * m.powf(q) * robin.eval(r_star) - ball_m.eval(r_star)
            };
            let dmu_rem = (exact_rem(mu + dm) - exact_rem(mu - dm)) / (2.0 * dm)
                - (floor_at(mu + dm) - floor_at(mu - dm)) / (2.0 * dm);
            (eps, r_at.abs(), ratio_sup, sub, dmu_rem.abs())
        })
        .collect();

    let mut samples = Vec::new();
    for &(e, lit, ratio, sub, dmu) in &per_eps {
        for (qn, v) in [
            ("remainder_at_rstar", lit),
            ("envelope_ratio_sup", ratio),
            ("remainder_minus_floor", sub),
            ("dmu_remainder_minus_floor", dmu),
        ] {
            samples.push(SweepSample {
                epsilon: e,
                quantity: qn.into(),
                value: v,
                error_estimate: 0.0,
            });
        }
    }

    let mut rows = Vec::new();
    let lit_pts: Vec<(f64, f64)> = per_eps.iter().map(|&(e, v, ..)| (e, v)).collect();
    let (row, _) = fit_row(
        "sup|R(r*)| rate",
        &lit_pts,
        n - 1.0,
        0.15,
        true,
        "stated envelope exponent N-1; at fixed mu the measurement plateaus at the ball-correction floor",
    );
    rows.push(row);
    let ratios: Vec<f64> = per_eps.iter().map(|&(_, _, r, _, _)| r).collect();
    let stability = ratios.iter().cloned().fold(0.0, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    rows.push(ReportRow::threshold(
        "envelope ratio stability factor",
        stability,
        2.0,
        true,
        "max/min of sup |R|/envelope across the sweep",
    ));
    rows.push(ReportRow::rel(
        "fixed-mu floor at r*",
        lit_pts[0].1,
        floor(r_star).abs(),
        1e-6,
        false,
        "closed-form limit alpha*mu^q*H - (U - ball projection); the solver route reproduces it",
    ));
    let sub_pts: Vec<(f64, f64)> = per_eps.iter().map(|&(e, _, _, s, _)| (e, s)).collect();
    let (row, _) = fit_row(
        "floor-subtracted remainder rate",
        &sub_pts,
        n - 2.0,
        0.15,
        false,
        "the hole correction beyond a1,a2 enters at epsilon^(N-2) for fixed mu",
    );
    rows.push(row);
    let dmu_pts: Vec<(f64, f64)> = per_eps.iter().map(|&(e, _, _, _, v)| (e, v)).collect();
    let (row, _) = fit_row(
        "mu-derivative remainder rate",
        &dmu_pts,
        n - 1.0,
        0.15,
        false,
        "stated mu-derivative envelope exponent N-1; same fixed-mu floor caveat",
    );
    rows.push(row);

    ExperimentReport {
        name: format!("remainder-expansion-n{}", dims.n()),
        inputs: format!(
            "N={} mu={mu} r*={r_star} eps in [{eps_min:.1e}, {eps_max:.1e}] x{n_samples}",
            dims.n()
        ),
        rows,
        samples,
        duration: start.elapsed(),
    }
}

// ---------------------------------------------------------------------------
// projected-kernel scaling
// ---------------------------------------------------------------------------

/// μ²⟨ΔPZ⁰, ΔPZ⁰⟩ along the tower scaling: positivity and stabilization to
/// the whole-space constant ∫pU^{p−1}(Z⁰)² (μ = 1). Samples are ordered by
/// descending ε so the last entries are the μ → 0 end.
pub fn pz_scaling_experiment(
    dims: &ProblemDims,
    eps_min: f64,
    eps_max: f64,
    n_samples: usize,
    mu1: f64,
    engine: &QuadratureEngine,
) -> ExperimentReport {
    let start = Instant::now();
    let sm = sphere_measure(dims.n());
    let nf = dims.n() as f64;
    let p = dims.p_f64();
    let mut eps_list = geometric_sweep(eps_min, eps_max, n_samples);
    eps_list.reverse();
    let s_exp = rational_to_f64(dims.scale_exponent(1));
    let d = *dims;

    let sweep: Vec<(f64, f64)> = eps_list
        .par_iter()
        .map(|&eps| {
            let mu = mu1 * eps.powf(s_exp);
            let pz = ProjectedZ0::new(&d, mu, eps);
            let seeds = [0.1 * mu, mu, 10.0 * mu];
            let v = quadrature::integrate_radial_with_breakpoints(
                |r| {
                    sm * r.powf(nf - 1.0)
                        * p
                        * bubble_value_radial(&d, mu, r).powf(p - 1.0)
                        * z0_kernel_radial(&d, mu, r)
                        * pz.value(r)
                },
                eps,
                1.0,
                &seeds,
                engine,
            )
            .value;
            (eps, mu * mu * v)
        })
        .collect();

    let whole_space = quadrature::integrate_radial_with_breakpoints(
        |r| {
            sm * r.powf(nf - 1.0)
                * p
                * bubble_value_radial(&d, 1.0, r).powf(p - 1.0)
                * z0_kernel_radial(&d, 1.0, r).powi(2)
        },
        0.0,
        f64::INFINITY,
        &[1.0, 10.0],
        engine,
    )
    .value;

    let mut rows = Vec::new();
    let positive = sweep.iter().all(|&(_, v)| v > 0.0);
    rows.push(ReportRow {
        quantity: "mu^2 <DPZ0,DPZ0> positive".into(),
        measured: sweep.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min),
        target: 0.0,
        tolerance: 0.0,
        passed: positive,
        gate: true,
        note: "scaled inner product stays positive along the sweep".into(),
    });
    let last = sweep[sweep.len() - 1].1;
    let prev = sweep[sweep.len() - 2].1;
    rows.push(ReportRow::threshold(
        "last-two variation",
        ((last - prev) / prev).abs(),
        0.05,
        true,
        "relative change between the two smallest-mu samples",
    ));
    rows.push(ReportRow::rel(
        "limit vs whole-space constant",
        last,
        whole_space,
        0.01,
        false,
        "int p U^(p-1) (Z0)^2 at mu = 1 (scale invariant)",
    ));

    let samples = sweep
        .iter()
        .map(|&(e, v)| SweepSample {
            epsilon: e,
            quantity: "mu2_pz_inner_product".into(),
            value: v,
            error_estimate: 0.0,
        })
        .collect();

    ExperimentReport {
        name: format!("pz-scaling-n{}", dims.n()),
        inputs: format!(
            "N={} eps in [{eps_min:.1e}, {eps_max:.1e}] x{n_samples} (descending), mu1={mu1}",
            dims.n()
        ),
        rows,
        samples,
        duration: start.elapsed(),
    }
}

// ---------------------------------------------------------------------------
// constants and critical-point pseudo-experiments (campaign rows)
// ---------------------------------------------------------------------------

pub fn constants_experiment(dims: &ProblemDims, engine: &QuadratureEngine) -> ExperimentReport {
    let start = Instant::now();
    let consts = energy_constants(dims, engine).expect("constants quadrature");
    let n = dims.n();
    let mut rows = vec![
        ReportRow::rel(
            "c1 (quadrature)",
            consts.c1,
            c1_closed_form(n),
            1e-8,
            true,
            "Beta identity |S|/2 * B(N/2, N/2)",
        ),
        ReportRow::rel(
            "c2 (quadrature)",
            consts.c2,
            c2_closed_form(n),
            1e-8,
            true,
            "Beta identity 2|S|/(N(N+2))",
        ),
        ReportRow::rel(
            "Gamma(0) (axisymmetric quadrature)",
            gamma_kernel(0.0, dims, engine).value,
            c2_closed_form(n),
            1e-8,
            true,
            "Gamma(0) = c2 by B(2, N/2) = B(N/2, 2)",
        ),
        ReportRow::rel(
            "sphere measure",
            sphere_measure(n),
            sphere_measure_by_recursion(n),
            1e-12,
            true,
            "dimension recursion |S^(n-1)| = 2 pi |S^(n-3)|/(n-2) from |S^0| = 2, |S^1| = 2 pi",
        ),
    ];
    for m in 5..=8u32 {
        let dm = ProblemDims::new(m, 1).unwrap();
        rows.push(ReportRow::rel(
            &format!("Robin H(0,0), N={m}"),
            robin_function(&dm),
            2.0 * (m as f64 - 2.0) / m as f64,
            1e-6,
            true,
            "bounded biharmonic extension: 2(N-2)/N",
        ));
    }
    ExperimentReport {
        name: format!("constants-n{n}"),
        inputs: format!("N={n}"),
        rows,
        samples: Vec::new(),
        duration: start.elapsed(),
    }
}

/// |S^{n−1}| by the dimension recursion, independent of the Gamma-function
/// route used by [`sphere_measure`].
fn sphere_measure_by_recursion(n: u32) -> f64 {
    let mut vals = vec![2.0, 2.0 * std::f64::consts::PI]; // |S^0|, |S^1|
    for m in 3..=n as usize {
        let next = 2.0 * std::f64::consts::PI * vals[m - 3] / (m as f64 - 2.0);
        vals.push(next);
    }
    vals[n as usize - 1]
}

pub fn critical_point_experiment(dims: &ProblemDims, engine: &QuadratureEngine) -> ExperimentReport {
    let start = Instant::now();
    let re = unit_ball_energy(dims, engine);
    let k = dims.k() as usize;
    let init = ReducedPoint::centered(vec![1.0; k], dims.n(), 0.02).unwrap();
    let mut rows = Vec::new();
    match re.find_critical_point(&init, &NewtonOptions::default()) {
        Ok(cert) => {
            rows.push(ReportRow::threshold(
                "gradient norm at critical point",
                cert.grad_norm,
                1e-10,
                true,
                "Newton convergence criterion",
            ));
            if dims.n() == 5 && k == 1 {
                rows.push(ReportRow::rel(
                    "nu_hat^8",
                    cert.nu.nu[0].powi(8),
                    75.0 / 8.0,
                    1e-10,
                    true,
                    "closed-form minimizer e*F/(2*H1) in the nu variables",
                ));
            }
            let (lam_cf, _) = re.closed_form_scales(k);
            rows.push(ReportRow::rel(
                "lambda vs closed-form chain",
                cert.lambda,
                lam_cf,
                1e-9,
                true,
                "balance-chain closed form",
            ));
            rows.push(ReportRow::threshold(
                "balance chain residual",
                cert.chain_residual,
                1e-8,
                true,
                "max relative deviation among the chain members",
            ));
            rows.push(ReportRow::rel(
                "det(Q) vs closed-form target",
                cert.det_q,
                cert.det_q_target,
                1e-8,
                true,
                "(4Nk-8k-4)/(N-4) * lambda^k",
            ));
            rows.push(ReportRow::rel(
                "det(Q) vs LU",
                cert.det_q,
                lu_determinant(&cert.q_matrix),
                1e-8,
                true,
                "full-pivot LU as the independent determinant route",
            ));
            rows.push(ReportRow::threshold(
                "Hessian off-block maximum",
                cert.max_off_block(),
                1e-7,
                true,
                "block-diagonality between the nu and sigma blocks",
            ));
        }
        Err(e) => {
            rows.push(ReportRow {
                quantity: "critical point search".into(),
                measured: f64::NAN,
                target: 0.0,
                tolerance: 0.0,
                passed: false,
                gate: true,
                note: format!("{e}"),
            });
        }
    }
    // σ-Hessian certificate rows on the same dimension
    let h = sigma_hessian_certificate(dims);
    let stated = {
        let n = dims.n() as f64;
        dims.alpha() * dims.alpha() * (n - 4.0) * (2.0 * n * n - 6.0 * n - 4.0)
    };
    rows.push(ReportRow::rel(
        "sigma-Hessian diagonal vs stated constant",
        h[0][0],
        stated,
        1e-6,
        true,
        "stated target alpha^2(N-4)(2N^2-6N-4); the FD value sits at 2N^2-4N-4",
    ));
    rows.push(ReportRow::rel(
        "sigma-Hessian diagonal vs closed form",
        h[0][0],
        sigma_hessian_diag_closed_form(dims),
        1e-7,
        false,
        "analytic derivative of the closed forms: alpha^2(N-4)(2N^2-4N-4)",
    ));
    let max_off = (0..h.len())
        .flat_map(|i| (0..h.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| h[i][j].abs())
        .fold(0.0, f64::max);
    rows.push(ReportRow::threshold(
        "sigma-Hessian off-diagonals",
        max_off,
        1e-8,
        true,
        "radial symmetry of the product term",
    ));
    // determinant identity across the (N,k) grid
    let mut worst_target = 0.0f64;
    let mut worst_lu = 0.0f64;
    for n in 5..=9u32 {
        for kk in 1..=4u32 {
            let dd = ProblemDims::new(n, kk).unwrap();
            let rr = unit_ball_energy(&dd, engine);
            let (lambda, _) = rr.closed_form_scales(kk as usize);
            let qm = q_matrix(&dd, kk, lambda, rr.g_term(0.0));
            let rec = tridiagonal_determinant(&qm);
            worst_target = worst_target
                .max(((rec - det_q_target(&dd, kk, lambda)) / det_q_target(&dd, kk, lambda)).abs());
            worst_lu = worst_lu.max(((rec - lu_determinant(&qm)) / rec).abs());
        }
    }
    rows.push(ReportRow::threshold(
        "det(Q) identity over (N,k) grid",
        worst_target,
        1e-8,
        true,
        "recursion vs (4Nk-8k-4)/(N-4)*lambda^k for N=5..9, k=1..4",
    ));
    rows.push(ReportRow::threshold(
        "det(Q) LU agreement over (N,k) grid",
        worst_lu,
        1e-8,
        true,
        "recursion vs full-pivot LU for N=5..9, k=1..4",
    ));

    ExperimentReport {
        name: format!("critical-point-n{}k{}", dims.n(), dims.k()),
        inputs: format!("N={} k={}", dims.n(), dims.k()),
        rows,
        samples: Vec::new(),
        duration: start.elapsed(),
    }
}

// ---------------------------------------------------------------------------
// campaign
// ---------------------------------------------------------------------------

/// Campaign configuration; the default runs the full N = 5 verification with
/// k ∈ {1, 2}.
#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub n: u32,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub grid_nodes: usize,
    /// restrict to experiments whose name contains this string
    pub only: Option<String>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            n: 5,
            quad_abs_tol: 1e-10,
            quad_rel_tol: 1e-10,
            grid_nodes: 900,
            only: None,
        }
    }
}

/// Run the campaign: constants, critical points, and every sweep experiment
/// at its verified window.
pub fn run_campaign(cfg: &CampaignConfig) -> Vec<ExperimentReport> {
    let engine = QuadratureEngine::with_tolerances(cfg.quad_abs_tol, cfg.quad_rel_tol);
    let dims1 = ProblemDims::new(cfg.n, 1).expect("dimension in range");
    let dims2 = ProblemDims::new(cfg.n, 2).expect("dimension in range");
    let jobs: Vec<(&str, Box<dyn Fn() -> ExperimentReport + Send + Sync>)> = vec![
        (
            "constants",
            Box::new(move || constants_experiment(&dims1, &engine)),
        ),
        (
            "critical-point-k1",
            Box::new(move || critical_point_experiment(&dims1, &engine)),
        ),
        (
            "critical-point-k2",
            Box::new(move || critical_point_experiment(&dims2, &engine)),
        ),
        (
            "energy-expansion",
            Box::new(move || energy_expansion_experiment(&dims1, 1e-6, 1e-3, 7, &engine)),
        ),
        (
            "residual-w2",
            Box::new(move || {
                residual_rate_experiment(&dims1, ResidualKind::W2, 1e-6, 1e-3, 7, &engine)
            }),
        ),
        (
            "residual-w1",
            Box::new(move || {
                residual_rate_experiment(&dims2, ResidualKind::W1, 1e-12, 1e-6, 13, &engine)
            }),
        ),
        (
            "interaction-integrals",
            Box::new(move || interaction_integral_experiment(&dims2, 1e-6, 1e-3, 7, &engine)),
        ),
        (
            "projection-defect",
            Box::new(move || {
                projection_defect_experiment(
                    &dims1,
                    1e-5,
                    1e-2,
                    7,
                    certified_mu_hat(&dims1, &engine)[0],
                    DefectPath::TiedScaling,
                    &engine,
                )
            }),
        ),
        (
            "remainder-expansion",
            Box::new(move || {
                remainder_experiment(&dims1, 0.5, 0.3, 1e-4, 1e-2, 9, 900, &engine)
            }),
        ),
        (
            "pz-scaling",
            Box::new(move || {
                pz_scaling_experiment(&dims1, 1e-6, 1e-3, 7, certified_mu_hat(&dims1, &engine)[0], &engine)
            }),
        ),
    ];
    jobs.into_iter()
        .filter(|(name, _)| match &cfg.only {
            Some(f) => name.contains(f.as_str()),
            None => true,
        })
        .map(|(_, job)| job())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rate_fit_exact_power_law() {
        let samples: Vec<(f64, f64)> = geometric_sweep(1e-6, 1e-2, 8)
            .into_iter()
            .map(|e| (e, 3.0 * e.powf(0.75)))
            .collect();
        let fit = rate_fit(&samples).unwrap();
        assert_relative_eq!(fit.slope, 0.75, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 3f64.ln(), max_relative = 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn rate_fit_with_correction_term() {
        // v = ε^{0.3}(1 + 0.1 ε^{0.2}) over [1e-6, 1e-3]: the fitted slope
        // stays within 0.02 of the leading exponent
        let samples: Vec<(f64, f64)> = geometric_sweep(1e-6, 1e-3, 7)
            .into_iter()
            .map(|e| (e, e.powf(0.3) * (1.0 + 0.1 * e.powf(0.2))))
            .collect();
        let fit = rate_fit(&samples).unwrap();
        assert!((fit.slope - 0.3).abs() < 0.02, "slope = {}", fit.slope);
    }

    #[test]
    fn rate_fit_constant_and_errors() {
        let flat: Vec<(f64, f64)> = geometric_sweep(1e-5, 1e-2, 5)
            .into_iter()
            .map(|e| (e, 2.0))
            .collect();
        let fit = rate_fit(&flat).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!(matches!(
            rate_fit(&flat[0..3]),
            Err(ExperimentError::TooFewSamples(3))
        ));
        let mut bad = flat.clone();
        bad[2].1 = -1.0;
        assert!(matches!(
            rate_fit(&bad),
            Err(ExperimentError::NonPositiveValue { .. })
        ));
        let mut dup = flat.clone();
        dup[1].0 = dup[0].0;
        assert!(matches!(rate_fit(&dup), Err(ExperimentError::DuplicateEpsilon)));
    }

    #[test]
    fn defect_regime_targets() {
        // N=5 tied path: both regime terms give (N−4)θ = 3/2
        let d5 = ProblemDims::new(5, 1).unwrap();
        assert_relative_eq!(
            defect_regime_exponent(&d5, DefectPath::TiedScaling),
            1.5,
            max_relative = 1e-14
        );
        // N=5, ε = μ³: dominant μ^{2(N−4)} = μ²
        assert_relative_eq!(
            defect_regime_exponent(&d5, DefectPath::PowerLaw { exponent: 3.0 }),
            2.0,
            max_relative = 1e-14
        );
        // N=9, ε = μ³: dominant μ^N
        let d9 = ProblemDims::new(9, 1).unwrap();
        assert_relative_eq!(
            defect_regime_exponent(&d9, DefectPath::PowerLaw { exponent: 3.0 }),
            9.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn defect_power_law_path_n5() {
        // ε = μ³ sweep: fitted slope within 15% of 2
        let dims = ProblemDims::new(5, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-10, 1e-10);
        let rep = projection_defect_experiment(
            &dims,
            3e-3,
            3e-2,
            6,
            1.0,
            DefectPath::PowerLaw { exponent: 3.0 },
            &engine,
        );
        let slope_row = &rep.rows[0];
        assert!(
            slope_row.passed,
            "power-law defect slope {} vs target {}",
            slope_row.measured, slope_row.target
        );
    }

    #[test]
    fn defect_power_law_path_n9() {
        // N=9 lives in the μ^N regime: along ε = μ³ the defect decays like
        // μ^9 (the hole term sits at μ^18)
        let dims = ProblemDims::new(9, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-11, 1e-11);
        let rep = projection_defect_experiment(
            &dims,
            1e-3,
            3e-2,
            6,
            1.0,
            DefectPath::PowerLaw { exponent: 3.0 },
            &engine,
        );
        let row = &rep.rows[0];
        assert!(
            row.passed,
            "N=9 defect slope {} vs target {} ({})",
            row.measured, row.target, row.note
        );
    }

    #[test]
    fn tolerance_halving_keeps_verdicts() {
        let dims = ProblemDims::new(5, 2).unwrap();
        let coarse = QuadratureEngine::with_tolerances(1e-10, 1e-10);
        let fine = QuadratureEngine::with_tolerances(5e-11, 5e-11);
        let a = interaction_integral_experiment(&dims, 1e-5, 1e-3, 5, &coarse);
        let b = interaction_integral_experiment(&dims, 1e-5, 1e-3, 5, &fine);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.passed, rb.passed, "verdict changed for {}", ra.quantity);
        }
    }

    #[test]
    fn constants_experiment_passes() {
        let dims = ProblemDims::new(5, 1).unwrap();
        let engine = QuadratureEngine::with_tolerances(1e-12, 1e-12);
        let rep = constants_experiment(&dims, &engine);
        assert!(rep.passed(), "{:#?}", rep.rows);
    }
}
