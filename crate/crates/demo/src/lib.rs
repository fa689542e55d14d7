//! wasm-bindgen surface for the browser demo (see `www/index.html`).
//!
//! Three interactive operations, all pure compute returning flat f64 buffers
//! the page renders onto canvases:
//! - the sign-changing tower profile V(r) on the punctured ball,
//! - the reduced energy along the ray through the certified critical scales,
//!   with the balance-chain certificate numbers,
//! - the interaction kernel Γ(|x|), quadrature path against the closed form.

use bubble_tower::constants::{c2_closed_form, ProblemDims};
use bubble_tower::quadrature::QuadratureEngine;
use bubble_tower::radial_solver::robin_function;
use bubble_tower::reduced_energy::{gamma_kernel, gamma_kernel_closed_form};
use bubble_tower::tower::{tower_scales, TowerEvaluator};
use wasm_bindgen::prelude::*;

fn dims_for(n: u32, k: u32) -> ProblemDims {
    let n = n.clamp(5, 9);
    let k = k.clamp(1, 4);
    ProblemDims::new(n, k).expect("clamped dims valid")
}

/// Closed-form pieces of the reduced energy at σ = 0 (quadrature-free so the
/// page stays responsive): H₁, g(0) = 2Γ(0) = 2c₂ and F(0).
fn phi_pieces(dims: &ProblemDims) -> (f64, f64, f64) {
    let n = dims.n() as f64;
    let c2 = c2_closed_form(dims.n());
    let h1 = c2 * robin_function(dims);
    let g0 = 2.0 * c2;
    let alpha2 = dims.alpha() * dims.alpha();
    let c3 = -3.0 * (n - 2.0) * bubble_tower::constants::sphere_measure(dims.n())
        / (2.0 * dims.alpha_pow_p_plus_1());
    let f0 = c3 * (-n * (n - 4.0) * alpha2);
    (h1, g0, f0)
}

/// Balance-chain critical scales (λ, ν̂).
fn chain(dims: &ProblemDims) -> (f64, Vec<f64>) {
    let (h1, g0, f0) = phi_pieces(dims);
    let n = dims.n() as f64;
    let k = dims.k() as usize;
    let e = 2.0 * (n - 2.0) / (n - 4.0);
    let exponent = 1.0 + e / 2.0 + e * (k as f64 - 1.0);
    let lambda =
        (e * f0 * (2.0 * h1).powf(e / 2.0) * g0.powf(e * (k as f64 - 1.0))).powf(1.0 / exponent);
    let mut nu = vec![(lambda / (2.0 * h1)).sqrt()];
    for i in 1..k {
        nu.push(lambda * nu[i - 1] / g0);
    }
    (lambda, nu)
}

fn phi_at(dims: &ProblemDims, nu: &[f64]) -> f64 {
    let (h1, g0, f0) = phi_pieces(dims);
    let n = dims.n() as f64;
    let e = 2.0 * (n - 2.0) / (n - 4.0);
    let k = nu.len();
    let mut phi = h1 * nu[0] * nu[0] + f0 / nu[k - 1].powf(e);
    for l in 0..k - 1 {
        phi += g0 * nu[l + 1] / nu[l];
    }
    phi
}

/// Tower profile: `points` log-spaced radii in (ε, 1), interleaved [r, V(r)].
#[wasm_bindgen]
pub fn tower_profile(n: u32, k: u32, eps_log10: f64, points: u32) -> Vec<f64> {
    let dims = dims_for(n, k);
    let eps = 10f64.powf(eps_log10.clamp(-9.0, -1.5));
    let (_, nu) = chain(&dims);
    let q_inv = 2.0 / (dims.n() as f64 - 4.0);
    let mu: Vec<f64> = nu.iter().map(|v| v.powf(q_inv)).collect();
    let cfg = match tower_scales(&dims, eps, mu) {
        Ok(c) => c,
        Err(_) => return Vec::new(),
    };
    let ev = TowerEvaluator::new(&cfg);
    let points = points.clamp(16, 4000) as usize;
    let lo = eps * 1.000001;
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let r = lo * (0.999999 / lo).powf(i as f64 / (points - 1) as f64);
        out.push(r);
        out.push(ev.value(r));
    }
    out
}

/// The derived scales μ_{iε} for the current sliders (annulus shading).
#[wasm_bindgen]
pub fn tower_scale_list(n: u32, k: u32, eps_log10: f64) -> Vec<f64> {
    let dims = dims_for(n, k);
    let eps = 10f64.powf(eps_log10.clamp(-9.0, -1.5));
    let (_, nu) = chain(&dims);
    let q_inv = 2.0 / (dims.n() as f64 - 4.0);
    let mu: Vec<f64> = nu.iter().map(|v| v.powf(q_inv)).collect();
    match tower_scales(&dims, eps, mu) {
        Ok(c) => c.scales,
        Err(_) => Vec::new(),
    }
}

/// Reduced energy along the ray t·ν̂, interleaved [t, Φ(t·ν̂, 0)].
#[wasm_bindgen]
pub fn phi_curve(n: u32, k: u32, points: u32) -> Vec<f64> {
    let dims = dims_for(n, k);
    let (_, nu_hat) = chain(&dims);
    let points = points.clamp(16, 2000) as usize;
    let (t_lo, t_hi) = (0.55, 2.2);
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (points - 1) as f64;
        let nu: Vec<f64> = nu_hat.iter().map(|v| t * v).collect();
        out.push(t);
        out.push(phi_at(&dims, &nu));
    }
    out
}

/// Certificate numbers for the info panel:
/// [λ, det(Q), det(Q) target, Φ(ν̂), μ̂₁, …, μ̂_k].
#[wasm_bindgen]
pub fn critical_point_info(n: u32, k: u32) -> Vec<f64> {
    let dims = dims_for(n, k);
    let (lambda, nu) = chain(&dims);
    let q = bubble_tower::reduced_energy::q_matrix(&dims, dims.k(), lambda, {
        let (_, g0, _) = phi_pieces(&dims);
        g0
    });
    let det = bubble_tower::reduced_energy::tridiagonal_determinant(&q);
    let target = bubble_tower::reduced_energy::det_q_target(&dims, dims.k(), lambda);
    let q_inv = 2.0 / (dims.n() as f64 - 4.0);
    let mut out = vec![lambda, det, target, phi_at(&dims, &nu)];
    out.extend(nu.iter().map(|v| v.powf(q_inv)));
    out
}

/// Interaction kernel profile, interleaved [t, Γ_quadrature(t), Γ_closed(t)].
#[wasm_bindgen]
pub fn gamma_profile(n: u32, t_max: f64, points: u32) -> Vec<f64> {
    let dims = dims_for(n, 1);
    let engine = QuadratureEngine::with_tolerances(1e-8, 1e-8);
    let t_max = t_max.clamp(0.5, 20.0);
    let points = points.clamp(8, 200) as usize;
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        out.push(t);
        out.push(gamma_kernel(t, &dims, &engine).value);
        out.push(gamma_kernel_closed_form(&dims, t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_profile_has_expected_signs() {
        let buf = tower_profile(5, 2, -4.0, 400);
        assert_eq!(buf.len(), 800);
        // alternating tower: negative deep inside, positive outside
        let first_v = buf[1];
        let mid_v = buf[buf.len() / 2 + 1];
        assert!(first_v < 0.0 || mid_v > 0.0);
        let n_changes = buf
            .chunks(2)
            .map(|c| c[1])
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|w| w[0] * w[1] < 0.0)
            .count();
        assert_eq!(n_changes, 1, "k=2 profile changes sign once");
    }

    #[test]
    fn phi_curve_has_minimum_at_unit_ray() {
        let buf = phi_curve(5, 1, 201);
        let (mut best_t, mut best_v) = (0.0, f64::INFINITY);
        for c in buf.chunks(2) {
            if c[1] < best_v {
                best_v = c[1];
                best_t = c[0];
            }
        }
        assert!((best_t - 1.0).abs() < 0.02, "minimum at t = {best_t}");
    }

    #[test]
    fn info_matches_known_k1_values() {
        let info = critical_point_info(5, 1);
        assert!((info[0] - 6.315889).abs() < 1e-4); // lambda
        assert!((info[1] - 8.0 * info[0]).abs() < 1e-9); // det(Q) = 8 lambda
        assert!((info[4] - 1.7498177).abs() < 1e-5); // mu_hat
    }

    #[test]
    fn gamma_profile_consistency() {
        let buf = gamma_profile(5, 3.0, 16);
        for c in buf.chunks(3) {
            assert!(
                (c[1] - c[2]).abs() <= 1e-5 * c[2].abs().max(1e-6),
                "quadrature vs closed form at t={}: {} vs {}",
                c[0],
                c[1],
                c[2]
            );
        }
    }
}
