//! `𝒥(x) = ∫₀^δ t^{a₀}(t + x)^{b₀} dt` and its `x → 0⁺` power-law term.

use super::fit::{fit_power_law, log_grid};
use super::Check;
use crate::kernels::gamma;
use crate::quadrature::{graded_breaks, TanhSinh};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Coefficient of `x^{1+a₀+b₀}`.
pub fn lemma_constant(a0: f64, b0: f64) -> f64 {
    -(PI * b0).sin() * gamma(1.0 + a0) * gamma(1.0 + b0) * gamma(-1.0 - a0 - b0) / PI
}

fn check_params(a0: f64, b0: f64, delta: f64) -> Result<()> {
    if !(a0 > -1.0 && b0 > -1.0) {
        return Err(Error::config("need a₀, b₀ > −1"));
    }
    let s = a0 + b0;
    if (s - s.round()).abs() < 1e-9 || (b0 - b0.round()).abs() < 1e-9 {
        return Err(Error::config("need a₀ + b₀ ∉ ℤ and b₀ ∉ ℤ"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config("need δ ∈ (0, 1)"));
    }
    Ok(())
}

/// Quadrature for `x > 0`.
pub fn lemma_integral(a0: f64, b0: f64, delta: f64, x: f64) -> Result<f64> {
    check_params(a0, b0, delta)?;
    if !(x > 0.0) {
        return Err(Error::domain("lemma integral needs x > 0"));
    }
    let breaks = graded_breaks(0.0, delta, Some(x), None);
    let est = TanhSinh::with_tol(1e-14).integrate_panels(&breaks, |i, n| {
        let t = if i == 0 { n.from_left } else { n.x };
        t.powf(a0) * (t + x).powf(b0)
    })?;
    Ok(est.value)
}

pub fn lemma_beta_aux_check(a0: f64, b0: f64, delta: f64, xs: &[f64]) -> Result<Vec<Check>> {
    let ys = xs.iter().map(|&x| lemma_integral(a0, b0, delta, x)).collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(xs, &ys, 2)?;
    let mu = 1.0 + a0 + b0;
    let c = lemma_constant(a0, b0);
    let tag = format!("(a₀={a0},b₀={b0})");
    Ok(vec![
        Check::new(format!("lemma_exponent{tag}"), mu, fit.exponent, 0.02, ((fit.exponent - mu) / mu).abs() <= 0.02),
        Check::new(format!("lemma_amplitude{tag}"), c, fit.amplitude, 0.05, ((fit.amplitude - c) / c).abs() <= 0.05),
    ])
}

/// Default grid: 12 points per decade on `[1e−5, 1e−2]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-5, 1e-2, 12)
}
