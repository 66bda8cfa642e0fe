//! Quadrature rules: Gauss–Legendre for analytic integrands, and a
//! tanh-sinh rule with geometric panel grading for integrands carrying
//! algebraic endpoint singularities.

use crate::{Error, Real, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::domain("Gauss–Legendre order must be positive"));
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize(n).expect("small integer");
    let (one, two) = (T::one(), T::lit(2.0));
    for i in 0..n.div_ceil(2) {
        let fi = T::from_usize(i).expect("small integer");
        let mut x = (T::PI() * (fi + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, x);
            for k in 2..=n {
                let kf = T::from_usize(k).expect("small integer");
                let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { one } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - one);
            let dx = pn / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        // recompute P_n' at the converged node for the weight
        let (mut p0, mut p1) = (one, x);
        for k in 2..=n {
            let kf = T::from_usize(k).expect("small integer");
            let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        if n > 1 {
            dp = nf * (x * p1 - p0) / (x * x - one);
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Ok((nodes, weights))
}

/// A point handed to tanh-sinh integrands: the abscissa and its exact
/// distances to the panel ends, so singular factors can be evaluated
/// without cancellation.
#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub x: f64,
    pub from_left: f64,
    pub from_right: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct TanhSinh {
    /// Relative tolerance on the change between successive refinements.
    pub rel_tol: f64,
    /// Absolute floor for the same test.
    pub abs_tol: f64,
    /// Maximum number of step halvings after the initial step 1/2.
    pub max_level: u32,
    /// Half-width of the truncated parameter range.
    pub t_max: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        TanhSinh { rel_tol: 1e-13, abs_tol: 1e-300, max_level: 8, t_max: 6.0 }
    }
}

/// Result of an adaptive rule with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl TanhSinh {
    pub fn with_tol(rel_tol: f64) -> Self {
        TanhSinh { rel_tol, ..Default::default() }
    }

    /// `∫_a^b f` for `f` integrable with at most algebraic endpoint singularities.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<Estimate>
    where
        F: FnMut(Node) -> f64,
    {
        if !(b > a) {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let h = 0.5 * (b - a);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut eval = |t: f64| -> f64 {
            let u = half_pi * t.sinh();
            let e = (-2.0 * u.abs()).exp();
            let near = h * 2.0 * e / (1.0 + e);
            let far = h * 2.0 / (1.0 + e);
            if near <= 0.0 {
                return 0.0;
            }
            let w = h * half_pi * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            let node = if u >= 0.0 {
                Node { x: b - near, from_left: far, from_right: near }
            } else {
                Node { x: a + near, from_left: near, from_right: far }
            };
            let v = f(node);
            if v == 0.0 {
                0.0
            } else {
                w * v
            }
        };
        let mut step = 0.5;
        let n0 = (self.t_max / step).ceil() as i64;
        let mut sum = eval(0.0);
        for k in 1..=n0 {
            let t = k as f64 * step;
            sum += eval(t) + eval(-t);
        }
        let mut value = sum * step;
        let mut error = f64::INFINITY;
        for _ in 0..self.max_level {
            step *= 0.5;
            let n = (self.t_max / step).ceil() as i64;
            let mut extra = 0.0;
            let mut k = 1;
            while k <= n {
                let t = k as f64 * step;
                extra += eval(t) + eval(-t);
                k += 2;
            }
            sum += extra;
            let next = sum * step;
            error = (next - value).abs();
            value = next;
            if !value.is_finite() {
                return Err(Error::numerical("tanh-sinh produced a non-finite value"));
            }
            if error <= self.rel_tol * value.abs() || error <= self.abs_tol {
                return Ok(Estimate { value, error });
            }
        }
        Ok(Estimate { value, error })
    }

    /// Integrates over consecutive panels `[breaks[i], breaks[i+1]]`.
    pub fn integrate_panels<F>(&self, breaks: &[f64], mut f: F) -> Result<Estimate>
    where
        F: FnMut(usize, Node) -> f64,
    {
        let mut total = Estimate { value: 0.0, error: 0.0 };
        for (i, w) in breaks.windows(2).enumerate() {
            let e = self.integrate(w[0], w[1], |n| f(i, n))?;
            total.value += e.value;
            total.error += e.error;
        }
        Ok(total)
    }
}

/// Breakpoints on `[a, b]` refined geometrically toward `a` at scale `near_a`
/// and toward `b` at scale `near_b` (ratio 4), so features of size `near_*`
/// next to an endpoint are resolved.
pub fn graded_breaks(a: f64, b: f64, near_a: Option<f64>, near_b: Option<f64>) -> Vec<f64> {
    let len = b - a;
    let mut pts = vec![a, b];
    if let Some(s) = near_a.filter(|s| *s > 0.0 && *s < 0.25 * len) {
        let mut d = s;
        while d < 0.5 * len {
            pts.push(a + d);
            d *= 4.0;
        }
    }
    if let Some(s) = near_b.filter(|s| *s > 0.0 && *s < 0.25 * len) {
        let mut d = s;
        while d < 0.5 * len {
            pts.push(b - d);
            d *= 4.0;
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * len);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exactness_and_symmetry() {
        for &n in &[1usize, 2, 5, 16, 64, 128, 257] {
            let (x, w) = gauss_legendre::<f64>(n).unwrap();
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-15);
                if i > 0 {
                    assert!(x[i] > x[i - 1]);
                }
            }
            if n >= 2 {
                let m2: f64 = x.iter().zip(&w).map(|(a, b)| a * a * b).sum();
                assert!((m2 - 2.0 / 3.0).abs() < 1e-14);
            }
        }
        let (x, w) = gauss_legendre::<f64>(10).unwrap();
        let m18: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(18) * b).sum();
        assert!((m18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        let ts = TanhSinh::default();
        // ∫_0^1 t^{-0.7} (1-t)^{-0.4} dt = B(0.3, 0.6)
        let v = ts.integrate(0.0, 1.0, |n| n.from_left.powf(-0.7) * n.from_right.powf(-0.4)).unwrap();
        let want = crate::kernels::beta(0.3, 0.6);
        assert!((v.value - want).abs() < 1e-11 * want, "{} {}", v.value, want);
        let v = ts.integrate(-1.0, 2.0, |n| n.x * n.x).unwrap();
        assert!((v.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn graded_panels_resolve_near_singularity() {
        // ∫_0^1 (t + x)^{-0.5} dt = 2(√(1+x) − √x)
        let x = 1e-9;
        let br = graded_breaks(0.0, 1.0, Some(x), None);
        let v = TanhSinh::default().integrate_panels(&br, |i, n| (br[i] + n.from_left + x).powf(-0.5)).unwrap();
        let want = 2.0 * ((1.0 + x).sqrt() - x.sqrt());
        assert!((v.value - want).abs() < 1e-12, "{} {}", v.value, want);
    }
}
