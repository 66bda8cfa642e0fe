//! Least-squares fits of `y = Σ_{j≤d} c_j x^j + A·|x|^μ` by variable
//! projection: linear SVD solve at fixed `μ`, scan then golden refinement on `μ`.

use crate::roots::golden_min;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Exponent search range.
pub const MU_RANGE: (f64, f64) = (-0.99, 6.0);
const SCAN_STEP: f64 = 0.005;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// Polynomial coefficients `c_0..c_d`.
    pub smooth: Vec<f64>,
    /// Root-mean-square residual.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedFit {
    pub exponent: f64,
    /// Amplitudes of `Ξ(x)|x|^μ` and `Ξ(−x)|x|^μ`.
    pub amplitude_plus: f64,
    pub amplitude_minus: f64,
    pub smooth: Vec<f64>,
    pub residual: f64,
}

/// Weighted linear least squares on columns scaled to unit norm.
fn lstsq(cols: &[Vec<f64>], y: &[f64], w: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, n) = (y.len(), cols.len());
    let mut a = DMatrix::<f64>::zeros(m, n);
    let mut scale = vec![0.0; n];
    for (j, c) in cols.iter().enumerate() {
        let norm = c.iter().zip(w).map(|(v, wi)| (v * wi).powi(2)).sum::<f64>().sqrt();
        scale[j] = if norm > 0.0 { norm } else { 1.0 };
        for i in 0..m {
            a[(i, j)] = c[i] * w[i] / scale[j];
        }
    }
    let b = DVector::from_iterator(m, y.iter().zip(w).map(|(v, wi)| v * wi));
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&b, 1e-14).map_err(|e| Error::numerical(format!("least squares failed: {e}")))?;
    let rss = (&a * &sol - &b).norm_squared();
    let coef = (0..n).map(|j| sol[j] / scale[j]).collect();
    Ok((coef, (rss / m as f64).sqrt()))
}

fn optimise<F>(mut rss: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = MU_RANGE;
    let steps = ((hi - lo) / SCAN_STEP).round() as usize;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=steps {
        let mu = lo + (hi - lo) * i as f64 / steps as f64;
        let r = rss(mu)?;
        if r < best.1 {
            best = (mu, r);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::numerical("power-law fit: residual is not finite anywhere on the scan"));
    }
    let a = (best.0 - SCAN_STEP).max(lo);
    let b = (best.0 + SCAN_STEP).min(hi);
    Ok(golden_min(rss, a, b, 1e-9)?.0)
}

fn check_inputs(xs: &[f64], ys: &[f64], params: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::domain("fit: xs and ys differ in length"));
    }
    if xs.len() < params + 3 {
        return Err(Error::domain(format!("fit: need at least {} samples, got {}", params + 3, xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::domain("fit: non-finite sample"));
    }
    Ok(())
}

/// One-sided fit on `x > 0`, unit weights.
pub fn fit_power_law(xs: &[f64], ys: &[f64], smooth_degree: usize) -> Result<PowerFit> {
    fit_power_law_weighted(xs, ys, &vec![1.0; xs.len()], smooth_degree)
}

pub fn fit_power_law_weighted(xs: &[f64], ys: &[f64], w: &[f64], smooth_degree: usize) -> Result<PowerFit> {
    check_inputs(xs, ys, smooth_degree + 2)?;
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::domain("fit: abscissae must be positive"));
    }
    let cols = |mu: f64| -> Vec<Vec<f64>> {
        let mut c: Vec<Vec<f64>> = (0..=smooth_degree).map(|j| xs.iter().map(|x| x.powi(j as i32)).collect()).collect();
        c.push(xs.iter().map(|x| x.powf(mu)).collect());
        c
    };
    let mu = optimise(|mu| Ok(lstsq(&cols(mu), ys, w)?.1))?;
    let (coef, residual) = lstsq(&cols(mu), ys, w)?;
    Ok(PowerFit { exponent: mu, amplitude: coef[smooth_degree + 1], smooth: coef[..=smooth_degree].to_vec(), residual })
}

/// Joint fit of samples at `x` (`y_plus`) and `−x` (`y_minus`), `x > 0`,
/// sharing the polynomial part across both sides.
pub fn fit_two_sided(
    xs: &[f64],
    y_plus: &[f64],
    y_minus: &[f64],
    w: Option<(&[f64], &[f64])>,
    smooth_degree: usize,
) -> Result<TwoSidedFit> {
    check_inputs(xs, y_plus, smooth_degree + 3)?;
    check_inputs(xs, y_minus, smooth_degree + 3)?;
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::domain("fit: abscissae must be positive"));
    }
    let n = xs.len();
    let signed: Vec<f64> = xs.iter().copied().chain(xs.iter().map(|x| -x)).collect();
    let ys: Vec<f64> = y_plus.iter().chain(y_minus).copied().collect();
    let weights: Vec<f64> = match w {
        Some((a, b)) => a.iter().chain(b).copied().collect(),
        None => vec![1.0; 2 * n],
    };
    let cols = |mu: f64| -> Vec<Vec<f64>> {
        let mut c: Vec<Vec<f64>> =
            (0..=smooth_degree).map(|j| signed.iter().map(|x| x.powi(j as i32)).collect()).collect();
        c.push(signed.iter().map(|&x| if x > 0.0 { x.powf(mu) } else { 0.0 }).collect());
        c.push(signed.iter().map(|&x| if x < 0.0 { (-x).powf(mu) } else { 0.0 }).collect());
        c
    };
    let mu = optimise(|mu| Ok(lstsq(&cols(mu), &ys, &weights)?.1))?;
    let (coef, residual) = lstsq(&cols(mu), &ys, &weights)?;
    let d = smooth_degree;
    Ok(TwoSidedFit {
        exponent: mu,
        amplitude_plus: coef[d + 1],
        amplitude_minus: coef[d + 2],
        smooth: coef[..=d].to_vec(),
        residual,
    })
}

/// `count` points per decade from `lo` to `hi`, log-spaced, both included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power() {
        let xs = log_grid(1e-4, 1e-1, 8);
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x.powf(0.7)).collect();
        let f = fit_power_law(&xs, &ys, 0).unwrap();
        assert!((f.exponent - 0.7).abs() < 1e-6, "{f:?}");
        assert!((f.amplitude - 2.0).abs() < 1e-6);
    }

    #[test]
    fn power_over_linear() {
        let xs = log_grid(1e-4, 1e-1, 8);
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + x + 3.0 * x.powf(1.4)).collect();
        let f = fit_power_law(&xs, &ys, 1).unwrap();
        assert!((f.exponent - 1.4).abs() < 1e-4, "{f:?}");
        assert!((f.amplitude - 3.0).abs() < 1e-4);
    }

    #[test]
    fn contaminated_power() {
        let xs = log_grid(1e-4, 1e-2, 12);
        let ys: Vec<f64> = xs.iter().map(|x| x.powf(2.5) * (1.0 + 0.1 * x)).collect();
        let f = fit_power_law(&xs, &ys, 0).unwrap();
        assert!((f.exponent - 2.5).abs() < 0.01, "{f:?}");
    }

    #[test]
    fn two_sided_recovers_both_amplitudes() {
        let xs = log_grid(1e-4, 1e-1, 8);
        let yp: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x + 1.5 * x.powf(0.3)).collect();
        let ym: Vec<f64> = xs.iter().map(|x| 0.5 + 2.0 * x - 0.7 * x.powf(0.3)).collect();
        let f = fit_two_sided(&xs, &yp, &ym, None, 1).unwrap();
        assert!((f.exponent - 0.3).abs() < 1e-6, "{f:?}");
        assert!((f.amplitude_plus - 1.5).abs() < 1e-5);
        assert!((f.amplitude_minus + 0.7).abs() < 1e-5);
    }

    #[test]
    fn rejects_short_input() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0], 0).is_err());
    }
}
