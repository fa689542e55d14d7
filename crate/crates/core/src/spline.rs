//! Natural cubic spline on a strictly increasing grid.
//!
//! Used to interpolate sampled radial fields (Lᵠ norms, CSV round-trips) and
//! to cache the interaction kernel Γ on a radial grid. The second-derivative
//! system is tridiagonal and solved by the Thomas algorithm.

/// Solve a tridiagonal system in place: `sub` is the subdiagonal (len n−1),
/// `diag` the diagonal (len n), `sup` the superdiagonal (len n−1).
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    assert!(sub.len() == n - 1 && sup.len() == n - 1 && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = sup[i] / m;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / m;
    }
    rhs[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = d[i] - c[i] * rhs[i + 1];
    }
}

#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots (natural boundary: zero at the ends)
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 3, "spline needs at least 3 knots");
        assert_eq!(n, ys.len());
        assert!(
            xs.windows(2).all(|w| w[1] > w[0]),
            "spline knots must be strictly increasing"
        );
        let mut sub = vec![0.0; n - 3];
        let mut diag = vec![0.0; n - 2];
        let mut sup = vec![0.0; n - 3];
        let mut rhs = vec![0.0; n - 2];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            if i > 1 {
                sub[i - 2] = h0;
            }
            if i < n - 2 {
                sup[i - 1] = h1;
            }
            rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        if n == 3 {
            rhs[0] /= diag[0];
        } else {
            solve_tridiagonal(&sub, &diag, &sup, &mut rhs);
        }
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&rhs);
        Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        }
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) if i >= self.xs.len() => self.xs.len() - 2,
            Err(i) => i - 1,
        }
    }

    /// Evaluate the interpolant; clamped-linear beyond the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[i] + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tridiagonal_solve() {
        // [2 1 0; 1 2 1; 0 1 2] x = [4, 8, 8] → x = [1, 2, 3]
        let mut rhs = vec![4.0, 8.0, 8.0];
        solve_tridiagonal(&[1.0, 1.0], &[2.0, 2.0, 2.0], &[1.0, 1.0], &mut rhs);
        assert_relative_eq!(rhs[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(rhs[1], 2.0, max_relative = 1e-14);
        assert_relative_eq!(rhs[2], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn reproduces_smooth_function() {
        let xs: Vec<f64> = (0..200).map(|i| 0.01 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (2.0 * x).sin() / (1.0 + x)).collect();
        let sp = CubicSpline::natural(&xs, &ys);
        // natural end conditions cost accuracy in the outermost segments;
        // check the interior ones
        for i in 10..189 {
            let x = xs[i] + 0.004;
            let exact = (2.0 * x).sin() / (1.0 + x);
            assert!((sp.eval(x) - exact).abs() < 2e-7, "at x={x}");
        }
    }

    #[test]
    fn interpolates_knots_exactly() {
        let xs = [0.0, 0.5, 1.3, 2.0, 3.1];
        let ys = [1.0, -0.4, 2.2, 0.0, 5.0];
        let sp = CubicSpline::natural(&xs, &ys);
        for (x, y) in xs.iter().zip(ys.iter()) {
            assert_relative_eq!(sp.eval(*x), *y, max_relative = 1e-13);
        }
    }
}
