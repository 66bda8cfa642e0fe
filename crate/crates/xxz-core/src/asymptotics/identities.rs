//! Euler β and Gaudin–Mehta integrals against their Γ / Barnes-G values.

use super::Check;
use crate::kernels::{gamma, gaudin_mehta_value};
use crate::quadrature::{gauss_legendre, TanhSinh};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const QUAD_TOL: f64 = 1e-8;

/// `∫₀¹ t^{a−1}(1−t)^{b−1} dt` by tanh-sinh.
pub fn euler_beta_integral(a: f64, b: f64) -> Result<f64> {
    Ok(TanhSinh::with_tol(1e-14).integrate(0.0, 1.0, |n| n.from_left.powf(a - 1.0) * n.from_right.powf(b - 1.0))?.value)
}

fn vandermonde_sq(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..x.len() {
        for j in 0..i {
            v *= (x[i] - x[j]).powi(2);
        }
    }
    v
}

/// `∫_{ℝⁿ} e^{−|x|²} Π_{a<b}(x_a − x_b)² dx` by tensor Gauss–Legendre on `[−8, 8]ⁿ`, `n ≤ 2`.
pub fn gaudin_mehta_quadrature(n: usize) -> Result<f64> {
    let (t, w) = gauss_legendre::<f64>(96)?;
    let h = 8.0;
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        let mut weight = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            x[k] = h * t[i];
            weight *= h * w[i] * (-x[k] * x[k]).exp();
        }
        total += weight * vandermonde_sq(&x);
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < t.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return Ok(total);
        }
    }
}

/// Stratified Gaussian sampling of the Gaudin–Mehta integral: `(mean, standard error)`.
pub fn gaudin_mehta_mc(n: usize, per_axis: usize, seed: u64) -> (f64, f64) {
    let normal = Normal::new(0.0, FRAC_1_SQRT_2).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = per_axis.pow(n as u32);
    let (mut sum, mut diff2) = (0.0, 0.0);
    let mut x = [vec![0.0; n], vec![0.0; n]];
    for c in 0..cells {
        for p in x.iter_mut() {
            let mut idx = c;
            for coord in p.iter_mut() {
                let u: f64 = rng.random();
                *coord =
                    normal.inverse_cdf((((idx % per_axis) as f64 + u) / per_axis as f64).clamp(1e-300, 1.0 - 1e-16));
                idx /= per_axis;
            }
        }
        let (a, b) = (vandermonde_sq(&x[0]), vandermonde_sq(&x[1]));
        sum += 0.5 * (a + b);
        diff2 += (a - b) * (a - b);
    }
    let norm = PI.powf(0.5 * n as f64);
    let nc = cells as f64;
    (norm * sum / nc, norm * (diff2 / 4.0).sqrt() / nc)
}

pub fn identity_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &(a, b, exact) in &[(0.5, 0.5, PI), (2.0, 3.0, 1.0 / 12.0)] {
        let got = euler_beta_integral(a, b)?;
        let via_gamma = gamma(a) * gamma(b) / gamma(a + b);
        let pass = ((got - exact) / exact).abs() <= QUAD_TOL && ((via_gamma - exact) / exact).abs() <= QUAD_TOL;
        out.push(Check::new(format!("euler_beta({a},{b})"), exact, got, QUAD_TOL, pass));
    }
    for n in 1..=2 {
        let want = gaudin_mehta_value::<f64>(n as u32)?;
        let got = gaudin_mehta_quadrature(n)?;
        out.push(Check::new(
            format!("gaudin_mehta(n={n})"),
            want,
            got,
            QUAD_TOL,
            ((got - want) / want).abs() <= QUAD_TOL,
        ));
    }
    let want = gaudin_mehta_value::<f64>(3)?;
    let (got, se) = gaudin_mehta_mc(3, 48, 5);
    out.push(Check::new("gaudin_mehta(n=3)", want, got, 3.0 * se, (got - want).abs() <= 3.0 * se).with_std_error(se));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_pass() {
        let checks = identity_checks().unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        assert!((gaudin_mehta_quadrature(2).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn beta_at_other_points() {
        for &(a, b) in &[(0.3, 0.9), (1.7, 0.4)] {
            let want = gamma(a) * gamma(b) / gamma(a + b);
            assert!((euler_beta_integral(a, b).unwrap() / want - 1.0).abs() < 1e-10);
        }
    }
}
