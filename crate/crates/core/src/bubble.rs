//! Closed forms for the standard bubble and its derivative kernels.
//!
//! With q = (N−4)/2 and ρ = |x−ξ| the entire solution and its radial
//! derivatives are
//!
//!   U_{μ,ξ}(x)  = α_N μ^q (μ²+ρ²)^{−q},
//!   ΔU_{μ,ξ}    = −α_N (N−4) μ^q (Nμ² + 2ρ²) (μ²+ρ²)^{−N/2},
//!   Δ²U_{μ,ξ}   = α_N N(N−4)(N−2)(N+2) μ^{q+4} (μ²+ρ²)^{−(N+4)/2},
//!
//! and Δ²U = U^p holds identically because α_N^{p−1} = N(N−4)(N−2)(N+2).
//! The kernels Z⁰ = ∂U/∂μ and Zⁱ = ∂U/∂ξ_i span the kernel of the linearized
//! operator Δ² − f'(U).

use crate::constants::ProblemDims;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BubbleError {
    #[error("bubble scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("second derivative of |u|^(p-1)u is singular at u = 0 for p < 2")]
    SingularSecondDerivative,
}

/// Scale and center of a single bubble.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleParams {
    pub mu: f64,
    pub xi: Vec<f64>,
}

impl BubbleParams {
    pub fn new(mu: f64, xi: Vec<f64>) -> Result<Self, BubbleError> {
        if !(mu > 0.0) {
            return Err(BubbleError::NonPositiveScale(mu));
        }
        Ok(Self { mu, xi })
    }

    /// Radial bubble centered at the origin.
    pub fn radial(mu: f64, n_dim: u32) -> Result<Self, BubbleError> {
        Self::new(mu, vec![0.0; n_dim as usize])
    }

    fn rho2(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.xi.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

fn q_of(dims: &ProblemDims) -> f64 {
    (dims.n() as f64 - 4.0) / 2.0
}

/// U_{μ,ξ}(x).
pub fn bubble_value(dims: &ProblemDims, b: &BubbleParams, x: &[f64]) -> f64 {
    bubble_value_radial(dims, b.mu, b.rho2(x).sqrt())
}

/// ΔU_{μ,ξ}(x).
pub fn bubble_laplacian(dims: &ProblemDims, b: &BubbleParams, x: &[f64]) -> f64 {
    bubble_laplacian_radial(dims, b.mu, b.rho2(x).sqrt())
}

/// Δ²U_{μ,ξ}(x).
pub fn bubble_bilaplacian(dims: &ProblemDims, b: &BubbleParams, x: &[f64]) -> f64 {
    bubble_bilaplacian_radial(dims, b.mu, b.rho2(x).sqrt())
}

pub fn bubble_value_radial(dims: &ProblemDims, mu: f64, r: f64) -> f64 {
    let q = q_of(dims);
    dims.alpha() * (mu / (mu * mu + r * r)).powf(q)
}

pub fn bubble_laplacian_radial(dims: &ProblemDims, mu: f64, r: f64) -> f64 {
    let n = dims.n() as f64;
    let q = q_of(dims);
    let s = mu * mu + r * r;
    -dims.alpha() * (n - 4.0) * mu.powf(q) * (n * mu * mu + 2.0 * r * r) * s.powf(-n / 2.0)
}

pub fn bubble_bilaplacian_radial(dims: &ProblemDims, mu: f64, r: f64) -> f64 {
    let n = dims.n() as f64;
    let q = q_of(dims);
    let s = mu * mu + r * r;
    dims.alpha() * n * (n - 4.0) * (n - 2.0) * (n + 2.0) * mu.powf(q + 4.0)
        * s.powf(-(n + 4.0) / 2.0)
}

/// ∂(ΔU)/∂μ, needed to project Z⁰ through the Navier problem.
pub fn z0_laplacian_radial(dims: &ProblemDims, mu: f64, r: f64) -> f64 {
    let n = dims.n() as f64;
    let q = q_of(dims);
    let s = mu * mu + r * r;
    let poly = n * mu * mu + 2.0 * r * r;
    let t = q * mu.powf(q - 1.0) * poly * s.powf(-n / 2.0)
        + mu.powf(q) * 2.0 * n * mu * s.powf(-n / 2.0)
        - mu.powf(q) * poly * n * mu * s.powf(-(n + 2.0) / 2.0);
    -dims.alpha() * (n - 4.0) * t
}

pub fn z0_kernel_radial(dims: &ProblemDims, mu: f64, r: f64) -> f64 {
    let n = dims.n() as f64;
    let q = q_of(dims);
    let s = mu * mu + r * r;
    dims.alpha() * q * mu.powf((n - 6.0) / 2.0) * (r * r - mu * mu) * s.powf(-(n - 2.0) / 2.0)
}

/// Derivative kernels: index 0 is ∂U/∂μ, index i = 1..N is ∂U/∂ξ_i.
pub fn z_kernel(dims: &ProblemDims, b: &BubbleParams, index: u32, x: &[f64]) -> f64 {
    assert!(index <= dims.n(), "kernel index out of range");
    let n = dims.n() as f64;
    let q = q_of(dims);
    let rho2 = b.rho2(x);
    let s = b.mu * b.mu + rho2;
    if index == 0 {
        dims.alpha() * q * b.mu.powf((n - 6.0) / 2.0) * (rho2 - b.mu * b.mu)
            * s.powf(-(n - 2.0) / 2.0)
    } else {
        let i = index as usize - 1;
        dims.alpha() * (n - 4.0) * b.mu.powf(q) * (x[i] - b.xi[i]) * s.powf(-(n - 2.0) / 2.0)
    }
}

/// f(u) = |u|^{p−1}u and its first two derivatives.
pub fn nonlinearity(dims: &ProblemDims, u: f64, order: u8) -> Result<f64, BubbleError> {
    let p = dims.p_f64();
    match order {
        0 => Ok(u.abs().powf(p - 1.0) * u),
        1 => Ok(p * u.abs().powf(p - 1.0)),
        2 => {
            if p < 2.0 && u == 0.0 {
                return Err(BubbleError::SingularSecondDerivative);
            }
            Ok(p * (p - 1.0) * u.abs().powf(p - 3.0) * u)
        }
        _ => panic!("nonlinearity order must be 0, 1 or 2"),
    }
}

/// Max relative residual of Δ²U_{1,0} − U^p over the given radii, both sides
/// in closed form. Identically zero up to rounding since α_N is exact.
pub fn verify_entire_equation(dims: &ProblemDims, radii: &[f64]) -> f64 {
    let p = dims.p_f64();
    radii
        .iter()
        .map(|&r| {
            let lhs = bubble_bilaplacian_radial(dims, 1.0, r);
            let rhs = bubble_value_radial(dims, 1.0, r).powf(p);
            ((lhs - rhs) / rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// The product ΔU_{1,0}(x)·U_{1,0}(x) as a function of t = |x|²:
///   P(t) = −α² (N−4) (N + 2t) (1+t)^{−(N−2)}.
/// Its derivative in t drives the σ_k-block of the reduced energy.
pub fn laplacian_value_product(dims: &ProblemDims, t: f64) -> f64 {
    let n = dims.n() as f64;
    let a2 = dims.alpha() * dims.alpha();
    -a2 * (n - 4.0) * (n + 2.0 * t) * (1.0 + t).powf(-(n - 2.0))
}

pub fn laplacian_value_product_dt(dims: &ProblemDims, t: f64) -> f64 {
    let n = dims.n() as f64;
    let a2 = dims.alpha() * dims.alpha();
    -a2 * (n - 4.0)
        * (2.0 * (1.0 + t).powf(-(n - 2.0))
            - (n - 2.0) * (n + 2.0 * t) * (1.0 + t).powf(-(n - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dims5() -> ProblemDims {
        ProblemDims::new(5, 1).unwrap()
    }

    /// Radial Laplacian u'' + (N−1)u'/r by central differences.
    fn laplacian_fd(dims: &ProblemDims, mu: f64, r: f64, h: f64) -> f64 {
        let u = |x: f64| bubble_value_radial(dims, mu, x);
        let upp = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
        let up = (u(r + h) - u(r - h)) / (2.0 * h);
        upp + (dims.n() as f64 - 1.0) * up / r
    }

    #[test]
    fn value_at_center() {
        // N=5, μ=1: U(0) = α₅ = 105^{1/8}
        let dims = dims5();
        let b = BubbleParams::radial(1.0, 5).unwrap();
        assert_relative_eq!(
            bubble_value(&dims, &b, &[0.0; 5]),
            105f64.powf(0.125),
            max_relative = 1e-15
        );
    }

    #[test]
    fn decay_and_scaling() {
        let dims = dims5();
        let b = BubbleParams::new(0.7, vec![0.1, -0.2, 0.0, 0.0, 0.3]).unwrap();
        let far = bubble_value(&dims, &b, &[1e6, 0.0, 0.0, 0.0, 0.0]);
        assert!(far < 1e-5);
        // U_{μ,0}(μ y) = μ^{−q} U_{1,0}(y)
        let mu = 0.37;
        for y in [0.0, 0.4, 1.3, 7.0] {
            assert_relative_eq!(
                bubble_value_radial(&dims, mu, mu * y),
                mu.powf(-0.5) * bubble_value_radial(&dims, 1.0, y),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn laplacian_matches_finite_differences() {
        // ΔU_{1,0}(0) = −N(N−4)α_N and the radial formula at interior radii
        let dims = dims5();
        assert_relative_eq!(
            bubble_laplacian_radial(&dims, 1.0, 0.0),
            -5.0 * 105f64.powf(0.125),
            max_relative = 1e-15
        );
        for &r in &[0.1, 0.3, 0.7, 1.5, 4.0] {
            let fd = laplacian_fd(&dims, 1.0, r, 1e-4);
            assert_relative_eq!(
                bubble_laplacian_radial(&dims, 1.0, r),
                fd,
                max_relative = 1e-6
            );
        }
        // ΔU < 0 inside the unit ball
        for &r in &[0.05, 0.2, 0.5, 0.9] {
            assert!(laplacian_fd(&dims, 1.0, r, 1e-5) < 0.0);
        }
    }

    #[test]
    fn entire_equation_closed_forms() {
        let radii: Vec<f64> = (1..=10).map(|i| i as f64).map(|i| 0.1 * i.exp().min(10.0)).collect();
        for n in [5, 8] {
            let dims = ProblemDims::new(n, 1).unwrap();
            let res = verify_entire_equation(&dims, &radii);
            assert!(res < 1e-12, "closed-form residual too large: {res}");
        }
    }

    #[test]
    fn entire_equation_fd_bilaplacian() {
        // 4th-order residual by nested FD Laplacians stays within the
        // discretization budget
        let dims = dims5();
        let h = 1e-3;
        let lap = |r: f64| bubble_laplacian_radial(&dims, 1.0, r);
        for &r in &[0.5, 1.0, 2.0] {
            let lpp = (lap(r + h) - 2.0 * lap(r) + lap(r - h)) / (h * h);
            let lp = (lap(r + h) - lap(r - h)) / (2.0 * h);
            let bilap_fd = lpp + 4.0 * lp / r;
            let rhs = bubble_value_radial(&dims, 1.0, r).powi(9);
            assert!(
                ((bilap_fd - rhs) / rhs).abs() < 1e-5,
                "fd bilaplacian residual at r={r}"
            );
        }
    }

    #[test]
    fn z_kernels_at_center() {
        let dims = dims5();
        let mu = 0.8;
        let b = BubbleParams::radial(mu, 5).unwrap();
        let x0 = vec![0.0; 5];
        // Z⁰(ξ) = −α (N−4)/2 μ^{−(N−2)/2}
        assert_relative_eq!(
            z_kernel(&dims, &b, 0, &x0),
            -dims.alpha() * 0.5 * mu.powf(-1.5),
            max_relative = 1e-14
        );
        for i in 1..=5 {
            assert_eq!(z_kernel(&dims, &b, i, &x0), 0.0);
        }
    }

    #[test]
    fn z0_matches_mu_derivative() {
        let dims = dims5();
        for &(mu, r) in &[(0.3, 0.0), (0.3, 0.5), (1.2, 2.0), (2.0, 0.1)] {
            let h = 1e-6 * mu;
            let fd = (bubble_value_radial(&dims, mu + h, r) - bubble_value_radial(&dims, mu - h, r))
                / (2.0 * h);
            assert_relative_eq!(z0_kernel_radial(&dims, mu, r), fd, max_relative = 1e-8);
            let fd_lap = (bubble_laplacian_radial(&dims, mu + h, r)
                - bubble_laplacian_radial(&dims, mu - h, r))
                / (2.0 * h);
            assert_relative_eq!(z0_laplacian_radial(&dims, mu, r), fd_lap, max_relative = 1e-7);
        }
    }

    #[test]
    fn z0_integral_identity() {
        // ∫U^p Z⁰ = d/dμ[∫U^{p+1}/(p+1)] = 0 since ∫U^{p+1} is μ-invariant
        let dims = dims5();
        let engine = crate::quadrature::QuadratureEngine::with_tolerances(1e-12, 1e-12);
        let sm = crate::constants::sphere_measure(5);
        for mu in [0.4, 1.0, 2.3] {
            let res = crate::quadrature::integrate_radial_with_breakpoints(
                |r| {
                    sm * r.powi(4)
                        * bubble_value_radial(&dims, mu, r).powi(9)
                        * z0_kernel_radial(&dims, mu, r)
                },
                0.0,
                f64::INFINITY,
                &[mu, 10.0 * mu],
                &engine,
            );
            // scale of the positive part for a relative comparison
            let scale = crate::quadrature::integrate_radial_with_breakpoints(
                |r| {
                    sm * r.powi(4)
                        * bubble_value_radial(&dims, mu, r).powi(9)
                        * z0_kernel_radial(&dims, mu, r).abs()
                },
                0.0,
                f64::INFINITY,
                &[mu, 10.0 * mu],
                &engine,
            );
            assert!(
                res.value.abs() < 1e-9 * scale.value,
                "mu-invariance broken at mu={mu}: {} vs scale {}",
                res.value,
                scale.value
            );
        }
    }

    #[test]
    fn nonlinearity_values() {
        let dims = dims5();
        assert_relative_eq!(nonlinearity(&dims, -2.0, 0).unwrap(), -512.0);
        assert_relative_eq!(nonlinearity(&dims, 1.0, 1).unwrap(), 9.0);
        // f'' singular at 0 only for p < 2 (N > 12)
        let dims13 = ProblemDims::new(13, 1).unwrap();
        assert_eq!(
            nonlinearity(&dims13, 0.0, 2).unwrap_err(),
            BubbleError::SingularSecondDerivative
        );
        assert!(nonlinearity(&dims, 0.0, 2).is_ok());
    }

    #[test]
    fn product_derivative_matches_fd() {
        for n in [5, 6, 7, 9] {
            let dims = ProblemDims::new(n, 1).unwrap();
            let h = 1e-6;
            for &t in &[0.0, 0.3, 1.7] {
                let fd = (laplacian_value_product(&dims, t + h)
                    - laplacian_value_product(&dims, (t - h).max(0.0)))
                    / (h + (t + h - (t - h).max(0.0) - h));
                let fd = if t == 0.0 {
                    (laplacian_value_product(&dims, h) - laplacian_value_product(&dims, 0.0)) / h
                } else {
                    fd
                };
                assert_relative_eq!(
                    laplacian_value_product_dt(&dims, t),
                    fd,
                    max_relative = 1e-4
                );
            }
        }
    }

    proptest! {
        #[test]
        fn kellogg_symmetry(seed in 0u64..1000) {
            // bubble_value depends on x only through |x−ξ|: permuting and
            // reflecting the offset coordinates leaves the value unchanged
            let dims = dims5();
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut next = move || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0 };
            let xi: Vec<f64> = (0..5).map(|_| next()).collect();
            let off: Vec<f64> = (0..5).map(|_| next()).collect();
            let b = BubbleParams::new(0.9, xi.clone()).unwrap();
            let x: Vec<f64> = xi.iter().zip(&off).map(|(a, d)| a + d).collect();
            let v = bubble_value(&dims, &b, &x);
            // reflected and rotated (coordinate-permuted) offsets
            let x_ref: Vec<f64> = xi.iter().zip(&off).map(|(a, d)| a - d).collect();
            let mut perm = off.clone();
            perm.rotate_left(2);
            let x_perm: Vec<f64> = xi.iter().zip(&perm).map(|(a, d)| a + d).collect();
            prop_assert!((v - bubble_value(&dims, &b, &x_ref)).abs() <= 1e-14 * v.abs());
            prop_assert!((v - bubble_value(&dims, &b, &x_perm)).abs() <= 1e-14 * v.abs());
        }

        #[test]
        fn nonlinearity_is_odd(u in -10.0f64..10.0) {
            let dims = ProblemDims::new(5, 1).unwrap();
            let f = |v: f64| nonlinearity(&dims, v, 0).unwrap();
            prop_assert_eq!(f(-u), -f(u));
        }

        #[test]
        fn z0_fd_uniform(mu in 0.2f64..2.0, r in 0.0f64..3.0) {
            let dims = ProblemDims::new(5, 1).unwrap();
            let h = 1e-5 * mu;
            let fd = (bubble_value_radial(&dims, mu + h, r) - bubble_value_radial(&dims, mu - h, r)) / (2.0 * h);
            let z = z0_kernel_radial(&dims, mu, r);
            prop_assert!((z - fd).abs() <= 1e-6 * (1.0 + z.abs()));
        }
    }
}
