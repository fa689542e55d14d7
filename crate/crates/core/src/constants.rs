//! Dimensional constants and exponent bookkeeping.
//!
//! Everything downstream hangs off a handful of quantities:
//!
//!   p  = (N+4)/(N−4)                critical exponent,
//!   θ  = 2k(N−2)/(2k(N−2)−2)        tower scale exponent,
//!   α_N = (N(N−4)(N−2)(N+2))^{(N−4)/8}   bubble normalization,
//!   c₁ = ∫(1+|z|²)^{−N},  c₂ = ∫(1+|z|²)^{−(N+4)/2},
//!   c₃ = −3(N−2)·|S^{N−1}| / (2 α_N^{p+1}).
//!
//! Exponents are carried as exact rationals and converted to f64 only at
//! evaluation sites; the rate-fit targets depend on them being exact.

use crate::quadrature::{self, QuadratureEngine, QuadratureError};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use std::f64::consts::PI;
use thiserror::Error;

/// Exact rational exponent, e.g. θ or (2i−1)θ/(2k).
pub type Rational = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimsError {
    #[error("dimension N = {0} is below the supported range (need N >= 5)")]
    DimensionTooSmall(u32),
    #[error("tower depth k = {0} must be at least 1")]
    TowerDepthTooSmall(u32),
}

/// Dimension, critical exponent, tower depth and the derived scale exponent θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemDims {
    n: u32,
    k: u32,
    p: Rational,
    theta: Rational,
}

impl ProblemDims {
    /// Build the dimensional backbone for dimension `n >= 5` and tower depth
    /// `k >= 1`. Both p and θ are computed in exact rational arithmetic.
    pub fn new(n: u32, k: u32) -> Result<Self, DimsError> {
        if n < 5 {
            return Err(DimsError::DimensionTooSmall(n));
        }
        if k < 1 {
            return Err(DimsError::TowerDepthTooSmall(k));
        }
        let ni = n as i64;
        let ki = k as i64;
        let p = Rational::new(ni + 4, ni - 4);
        // θ = 2k(N−2) / (2k(N−2) − 2)
        let theta = Rational::new(2 * ki * (ni - 2), 2 * ki * (ni - 2) - 2);
        Ok(Self { n, k, p, theta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> Rational {
        self.p
    }

    pub fn theta(&self) -> Rational {
        self.theta
    }

    pub fn p_f64(&self) -> f64 {
        rational_to_f64(self.p)
    }

    pub fn theta_f64(&self) -> f64 {
        rational_to_f64(self.theta)
    }

    /// Exponent of ε in the i-th tower scale μ_{iε} = μ_i ε^{(2i−1)θ/(2k)},
    /// for 1-based `i`.
    pub fn scale_exponent(&self, i: u32) -> Rational {
        assert!(i >= 1 && i <= self.k, "tower index out of range");
        Rational::new(2 * i as i64 - 1, 2 * self.k as i64) * self.theta
    }

    /// The leading rate (N−4)θ/(2k) that governs the energy expansion and the
    /// residual norms for 5 ≤ N ≤ 11.
    pub fn leading_rate(&self) -> Rational {
        Rational::new(self.n as i64 - 4, 2 * self.k as i64) * self.theta
    }

    /// Dual exponent β = 2N/(N+4) of the residual norm.
    pub fn beta(&self) -> Rational {
        Rational::new(2 * self.n as i64, self.n as i64 + 4)
    }

    /// Bubble normalization α_N = (N(N−4)(N−2)(N+2))^{(N−4)/8}.
    pub fn alpha(&self) -> f64 {
        alpha_base(self.n).powf((self.n as f64 - 4.0) / 8.0)
    }

    /// α_N^{p+1} = (N(N−4)(N−2)(N+2))^{N/4}.
    pub fn alpha_pow_p_plus_1(&self) -> f64 {
        alpha_base(self.n).powf(self.n as f64 / 4.0)
    }
}

fn alpha_base(n: u32) -> f64 {
    let n = n as f64;
    n * (n - 4.0) * (n - 2.0) * (n + 2.0)
}

pub fn rational_to_f64(r: Rational) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

/// Γ(n/2) for integer n ≥ 1, computed exactly from Γ(1) = 1, Γ(1/2) = √π.
fn gamma_half_integer(n: u32) -> f64 {
    let mut z = if n % 2 == 0 { 1.0 } else { 0.5 };
    let mut g = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    while z + 0.5 < n as f64 / 2.0 + 0.25 {
        g *= z;
        z += 1.0;
    }
    g
}

/// Surface measure of the unit sphere S^{n−1} in ℝⁿ: 2π^{n/2}/Γ(n/2).
pub fn sphere_measure(n: u32) -> f64 {
    assert!(n >= 1, "sphere_measure needs n >= 1");
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// The energy constants of the reduced expansion, with the quadrature error
/// estimates of the two whole-space integrals.
#[derive(Debug, Clone, Copy)]
pub struct EnergyConstants {
    pub alpha_n: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub sphere_measure: f64,
    pub c1_error: f64,
    pub c2_error: f64,
}

/// Evaluate c₁ and c₂ by adaptive radial quadrature (whole space reduced to
/// ∫₀^∞ with weight |S^{N−1}| r^{N−1}) and assemble c₃ from closed forms.
pub fn energy_constants(
    dims: &ProblemDims,
    engine: &QuadratureEngine,
) -> Result<EnergyConstants, QuadratureError> {
    let n = dims.n();
    let sm = sphere_measure(n);
    let exp1 = n as f64;
    let exp2 = (n as f64 + 4.0) / 2.0;
    let i1 = quadrature::integrate_radial(
        |r: f64| r.powi(n as i32 - 1) * (1.0 + r * r).powf(-exp1),
        0.0,
        f64::INFINITY,
        engine,
    );
    let i2 = quadrature::integrate_radial(
        |r: f64| r.powi(n as i32 - 1) * (1.0 + r * r).powf(-exp2),
        0.0,
        f64::INFINITY,
        engine,
    );
    for res in [&i1, &i2] {
        if !res.converged {
            return Err(QuadratureError::NotConverged {
                error_estimate: res.error_estimate,
            });
        }
    }
    let c3 = -3.0 * (n as f64 - 2.0) * sm / (2.0 * dims.alpha_pow_p_plus_1());
    Ok(EnergyConstants {
        alpha_n: dims.alpha(),
        c1: sm * i1.value,
        c2: sm * i2.value,
        c3,
        sphere_measure: sm,
        c1_error: sm * i1.error_estimate,
        c2_error: sm * i2.error_estimate,
    })
}

/// Closed forms for c₁ and c₂ via the Beta identity
/// ∫₀^∞ r^{m}(1+r²)^{−q} dr = ½ B((m+1)/2, q−(m+1)/2).
/// These are the independent targets the quadrature values are tested against.
pub fn c1_closed_form(n: u32) -> f64 {
    sphere_measure(n) * 0.5 * beta_half_integers(n, n)
}

pub fn c2_closed_form(n: u32) -> f64 {
    // B(N/2, 2) = Γ(N/2)Γ(2)/Γ(N/2+2) = 4/(N(N+2))
    sphere_measure(n) * 2.0 / (n as f64 * (n as f64 + 2.0))
}

/// B(a/2, b/2) for integer a, b via exact half-integer Gamma values.
fn beta_half_integers(a: u32, b: u32) -> f64 {
    gamma_half_integer(a) * gamma_half_integer(b) / gamma_half_integer(a + b)
}
