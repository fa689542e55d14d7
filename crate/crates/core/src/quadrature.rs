//! Adaptive Gauss–Kronrod quadrature for radial and axisymmetric integrals.
//!
//! One-dimensional integrals use the embedded 7/15-point pair with
//! worst-interval-first bisection. Infinite tails are mapped to a finite
//! interval by r = a + t/(1−t) (no truncation radius), and an integrable
//! endpoint singularity r^{−γ} declared through
//! [`QuadratureEngine::singularity_exponent`] is removed by the substitution
//! r = a + u^{1/(1−γ)}.
//!
//! Axisymmetric integrals over ℝᴺ reduce to (r, φ) with the weight
//! |S^{N−2}| sin^{N−2}φ · r^{N−1}; the polar integral is evaluated by the same
//! adaptive rule at a tighter tolerance and the two error estimates are
//! combined in quadrature.

use crate::constants::sphere_measure;
use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge (error estimate {error_estimate:.3e})")]
    NotConverged { error_estimate: f64 },
}

/// Immutable configuration for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureEngine {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Power γ of an integrable singularity (x−a)^{−γ}, 0 < γ < 1, at the
    /// left endpoint. `None` for regular integrands.
    pub singularity_exponent: Option<f64>,
}

impl Default for QuadratureEngine {
    fn default() -> Self {
        Self::with_tolerances(1e-10, 1e-10)
    }
}

impl QuadratureEngine {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        assert!(abs_tol > 0.0 && rel_tol > 0.0, "tolerances must be positive");
        Self {
            abs_tol,
            rel_tol,
            max_subdivisions: 4000,
            singularity_exponent: None,
        }
    }

    pub fn with_singularity(mut self, gamma: f64) -> Self {
        assert!(gamma > 0.0 && gamma < 1.0, "singularity power must be in (0,1)");
        self.singularity_exponent = Some(gamma);
        self
    }

    pub fn with_max_subdivisions(mut self, max: usize) -> Self {
        assert!(max >= 16, "max_subdivisions must be at least 16");
        self.max_subdivisions = max;
        self
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value, error estimate and effort of one integration call.
#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

// 15-point Kronrod nodes with the embedded 7-point Gauss weights (QUADPACK).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss–Kronrod 7/15 on [a,b]; returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_kronrod = fc * WGK[7];
    let mut res_gauss = fc * WG[3];
    let mut res_abs = res_kronrod.abs();
    let mut samples = [0.0f64; 15];
    samples[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        samples[j] = f1;
        samples[14 - j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            // odd Kronrod indices carry the embedded Gauss nodes
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((samples[j] - mean).abs() + (samples[14 - j] - mean).abs());
    }
    let value = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; ties broken by insertion order for determinism
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Gauss–Kronrod 7/15 pair on a single finite panel: (value, error estimate).
/// The radial solver builds its cumulative integrals from this.
pub(crate) fn gk15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    if b <= a {
        return (0.0, 0.0);
    }
    gk15(f, a, b)
}

/// Adaptive integration of `f` over the finite segments delimited by `nodes`.
fn adaptive_segments<F: Fn(f64) -> f64>(
    f: &F,
    nodes: &[f64],
    engine: &QuadratureEngine,
) -> IntegralResult {
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for w in nodes.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        total_value += v;
        total_error += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            seq: {
                seq += 1;
                seq
            },
        });
    }
    let mut subdivisions = 0usize;
    while total_error > engine.tolerance_for(total_value) && subdivisions < engine.max_subdivisions
    {
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at f64 resolution; keep its estimate
            total_error = total_error.max(engine.tolerance_for(total_value) * 0.5);
            heap.push(Segment { seq: worst.seq, ..worst });
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        seq += 1;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, seq });
        seq += 1;
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, seq });
        subdivisions += 1;
    }
    let converged = total_error <= engine.tolerance_for(total_value);
    IntegralResult {
        value: total_value,
        error_estimate: total_error.max(0.0),
        subdivisions_used: subdivisions,
        converged,
    }
}

/// Integrate `f` over [a, b]; `b` may be `f64::INFINITY`. The integrand is
/// taken as-is (no geometric weight); radial weights belong to the caller.
pub fn integrate_radial<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    engine: &QuadratureEngine,
) -> IntegralResult {
    integrate_radial_with_breakpoints(f, a, b, &[], engine)
}

/// Same as [`integrate_radial`] with interior breakpoints seeding the initial
/// subdivision (bubble cores, annulus boundaries).
pub fn integrate_radial_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    engine: &QuadratureEngine,
) -> IntegralResult {
    assert!(a.is_finite() && b > a, "bad integration interval");
    match engine.singularity_exponent {
        Some(gamma) => {
            // split off a unit-length singular panel when the tail is infinite
            let split = if b.is_finite() { b } else { a + 1.0 };
            let pow = 1.0 / (1.0 - gamma);
            let u_max = (split - a).powf(1.0 - gamma);
            let g = |u: f64| f(a + u.powf(pow)) * pow * u.powf(gamma * pow);
            let mut nodes = vec![0.0];
            for &bp in breakpoints {
                if bp > a && bp < split {
                    nodes.push((bp - a).powf(1.0 - gamma));
                }
            }
            nodes.push(u_max);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            let head = adaptive_segments(&g, &nodes, engine);
            if b.is_finite() {
                head
            } else {
                let no_sing = QuadratureEngine {
                    singularity_exponent: None,
                    ..*engine
                };
                let tail = integrate_radial_with_breakpoints(f, split, b, breakpoints, &no_sing);
                combine(head, tail)
            }
        }
        None if b.is_finite() => {
            let mut nodes = vec![a];
            for &bp in breakpoints {
                if bp > a && bp < b {
                    nodes.push(bp);
                }
            }
            nodes.push(b);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            adaptive_segments(&f, &nodes, engine)
        }
        None => {
            // r = a + t/(1−t) maps [0,1) onto [a,∞); dr = dt/(1−t)²
            let g = |t: f64| {
                let om = 1.0 - t;
                f(a + t / om) / (om * om)
            };
            let mut nodes = vec![0.0];
            for &bp in breakpoints {
                if bp > a {
                    let s = bp - a;
                    nodes.push(s / (1.0 + s));
                }
            }
            nodes.push(0.5);
            nodes.push(1.0);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            adaptive_segments(&g, &nodes, engine)
        }
    }
}

fn combine(x: IntegralResult, y: IntegralResult) -> IntegralResult {
    IntegralResult {
        value: x.value + y.value,
        error_estimate: x.error_estimate + y.error_estimate,
        subdivisions_used: x.subdivisions_used + y.subdivisions_used,
        converged: x.converged && y.converged,
    }
}

/// Axisymmetric integral over ℝᴺ (dimension `n_dim`) of a function of
/// (r, φ), φ being the polar angle from the symmetry axis:
///
///   ∫ f(r,φ) · |S^{N−2}| sin^{N−2}φ · r^{N−1} dφ dr,   r ∈ [a, b], φ ∈ [0, π].
///
/// The polar integral runs at 10× tighter tolerance; its worst relative error
/// is combined with the radial error estimate in quadrature.
pub fn integrate_radial_angular<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n_dim: u32,
    engine: &QuadratureEngine,
) -> IntegralResult {
    integrate_radial_angular_with_breakpoints(f, a, b, &[], n_dim, engine)
}

/// [`integrate_radial_angular`] with radial breakpoints seeding the outer
/// subdivision (e.g. the ring where an off-axis kernel concentrates).
pub fn integrate_radial_angular_with_breakpoints<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    n_dim: u32,
    engine: &QuadratureEngine,
) -> IntegralResult {
    assert!(n_dim >= 3, "axisymmetric reduction needs N >= 3");
    let weight = sphere_measure(n_dim - 1);
    // the polar integral must resolve to relative accuracy even where its
    // value is small: the outer error estimator assumes exact evaluations
    let inner_engine = QuadratureEngine {
        abs_tol: engine.abs_tol * 1e-6,
        rel_tol: engine.rel_tol * 0.1,
        singularity_exponent: None,
        ..*engine
    };
    let sin_pow = (n_dim - 2) as i32;
    let worst_inner_rel = Cell::new(0.0f64);
    let inner_ok = Cell::new(true);
    let radial = |r: f64| {
        let res = integrate_radial(
            |phi: f64| f(r, phi) * phi.sin().powi(sin_pow),
            0.0,
            std::f64::consts::PI,
            &inner_engine,
        );
        if !res.converged {
            inner_ok.set(false);
        }
        let rel = res.error_estimate / res.value.abs().max(f64::MIN_POSITIVE);
        if rel > worst_inner_rel.get() {
            worst_inner_rel.set(rel);
        }
        weight * r.powi(n_dim as i32 - 1) * res.value
    };
    let outer = integrate_radial_with_breakpoints(radial, a, b, breakpoints, engine);
    let inner_err = worst_inner_rel.get() * outer.value.abs();
    let error = (outer.error_estimate.powi(2) + inner_err.powi(2)).sqrt();
    IntegralResult {
        value: outer.value,
        error_estimate: error,
        subdivisions_used: outer.subdivisions_used,
        converged: outer.converged && inner_ok.get() && error <= engine.tolerance_for(outer.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_constant() {
        let engine = QuadratureEngine::default();
        let r = integrate_radial(|_| 1.0, 0.0, 1.0, &engine);
        assert!(r.converged);
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn beta_identity_tail() {
        // ∫₀^∞ r⁴ (1+r²)^{−5} dr = ½ B(5/2, 5/2) = 3π/256
        let engine = QuadratureEngine::default();
        let r = integrate_radial(|x: f64| x.powi(4) * (1.0 + x * x).powi(-5), 0.0, f64::INFINITY, &engine);
        assert!(r.converged);
        assert_relative_eq!(r.value, 3.0 * PI / 256.0, max_relative = 1e-12);
    }

    #[test]
    fn declared_left_singularity() {
        // ∫₀¹ r^{−1/2} dr = 2
        let engine = QuadratureEngine::default().with_singularity(0.5);
        let r = integrate_radial(|x: f64| x.powf(-0.5), 0.0, 1.0, &engine);
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn refinement_consistency() {
        // refining tolerances by 10x moves the value by less than the
        // reported error estimate
        let f = |x: f64| (x * 7.3).sin().exp() * (1.0 + x * x).powi(-3);
        let coarse = QuadratureEngine::with_tolerances(1e-8, 1e-8);
        let fine = QuadratureEngine::with_tolerances(1e-9, 1e-9);
        let rc = integrate_radial(f, 0.0, f64::INFINITY, &coarse);
        let rf = integrate_radial(f, 0.0, f64::INFINITY, &fine);
        assert!(rc.converged && rf.converged);
        assert!(
            (rc.value - rf.value).abs() <= rc.error_estimate.max(1e-15),
            "refinement moved the value by more than the estimate: {} vs {}",
            (rc.value - rf.value).abs(),
            rc.error_estimate
        );
    }

    #[test]
    fn linearity() {
        let engine = QuadratureEngine::default();
        let f = |x: f64| (1.0 + x * x).powi(-4);
        let g = |x: f64| x * x * (1.0 + x * x).powi(-5);
        let (a, b) = (2.5, -1.75);
        let rf = integrate_radial(f, 0.0, f64::INFINITY, &engine);
        let rg = integrate_radial(g, 0.0, f64::INFINITY, &engine);
        let rc = integrate_radial(|x| a * f(x) + b * g(x), 0.0, f64::INFINITY, &engine);
        let budget = 2.0 * (a.abs() * rf.error_estimate + b.abs() * rg.error_estimate + rc.error_estimate);
        assert!((rc.value - (a * rf.value + b * rg.value)).abs() <= budget.max(1e-14));
    }

    #[test]
    fn ball_volume_radial_angular() {
        // f ≡ 1 over the unit ball in ℝ³: 4π/3
        let engine = QuadratureEngine::with_tolerances(1e-10, 1e-10);
        let r = integrate_radial_angular(|_, _| 1.0, 0.0, 1.0, 3, &engine);
        assert!(r.converged);
        assert_relative_eq!(r.value, 4.0 * PI / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let engine = QuadratureEngine::with_tolerances(1e-300, 1e-300).with_max_subdivisions(16);
        let r = integrate_radial(|x: f64| (50.0 * x).sin().abs(), 0.0, 1.0, &engine);
        assert!(!r.converged);
        assert!(r.error_estimate > 0.0);
    }

    #[test]
    fn breakpoints_help_sharp_features() {
        let engine = QuadratureEngine::with_tolerances(1e-12, 1e-12);
        let spike = |x: f64| 1e-6 / ((x - 0.3).powi(2) + 1e-12);
        let r = integrate_radial_with_breakpoints(spike, 0.0, 1.0, &[0.3], &engine);
        // arctan antiderivative: atan((1-0.3)/1e-6) + atan(0.3/1e-6)
        let exact = (0.7f64 / 1e-6).atan() + (0.3f64 / 1e-6).atan();
        assert!(r.converged);
        assert_relative_eq!(r.value, exact, max_relative = 1e-9);
    }
}
