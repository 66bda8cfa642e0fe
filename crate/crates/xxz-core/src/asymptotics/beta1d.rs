//! One-dimensional β-like integrals
//! `ℐ(x) = ∫_J 𝒢 Π_υ Ξ(z_υ + x)(z_υ + x)^{δ_υ−1}` with constant exponents,
//! their leading small-`x` prediction and the fitted checks.

use super::fit::{fit_two_sided, log_grid};
use super::Check;
use crate::kernels::gamma;
use crate::quadrature::{graded_breaks, Estimate, TanhSinh};
use crate::roots::{brent, Tolerance};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smooth real function on the integration interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZFunc {
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    /// `a·sin(bλ + c) + d`.
    Sine { a: f64, b: f64, c: f64, d: f64 },
}

impl ZFunc {
    pub fn affine(c0: f64, c1: f64) -> ZFunc {
        ZFunc::Poly(vec![c0, c1])
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            ZFunc::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            ZFunc::Sine { a, b, c, d } => a * (b * x + c).sin() + d,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            ZFunc::Poly(c) => c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &ci)| acc * x + k as f64 * ci),
            ZFunc::Sine { a, b, c, .. } => a * b * (b * x + c).cos(),
        }
    }

    /// `z(x₀ + h) − z(x₀)` without cancellation.
    pub fn increment(&self, x0: f64, h: f64) -> f64 {
        match self {
            ZFunc::Poly(c) => {
                // Taylor shift: coefficients of z(x₀ + h) in powers of h.
                let mut t = c.clone();
                let n = t.len();
                for i in 0..n {
                    for j in (i..n - 1).rev() {
                        t[j] += x0 * t[j + 1];
                    }
                }
                t.iter().skip(1).rev().fold(0.0, |acc, &ci| acc * h + ci) * h
            }
            ZFunc::Sine { a, b, c, .. } => 2.0 * a * (b * x0 + c + 0.5 * b * h).cos() * (0.5 * b * h).sin(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymCase1D {
    pub z_plus: ZFunc,
    pub z_minus: ZFunc,
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// `𝒢^(1)(λ₀)`; the integrand density is `𝒢 = g1·δ₊δ₋`.
    pub g1: f64,
    pub lambda0: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseClass {
    /// `z'₊ z'₋ < 0`.
    A,
    /// `z'₊ z'₋ > 0`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: CaseClass,
    pub value: f64,
    /// `𝔭 = −sgn z'₊ · sgn(z'₊ − z'₋)`.
    pub p: f64,
    /// Side weights `sin(πδ_{±𝔭})/π` (case b) or the gate `(1, 0)` / `(0, 1)` (case a).
    pub weights: (f64, f64),
    pub flagged: bool,
}

const ROOT_SCAN: usize = 4000;

impl AsymCase1D {
    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !(self.a < self.lambda0 && self.lambda0 < self.b) {
            return Err(Error::config("λ₀ must lie inside J = [a, b]"));
        }
        if !(self.delta_plus > 0.0 && self.delta_minus > 0.0) {
            return Err(Error::config("δ_± must be positive"));
        }
        Ok(())
    }

    /// Requires a common simple zero at `λ₀` with distinct slopes.
    pub fn validate_common_zero(&self) -> Result<()> {
        self.validate()?;
        let scale = 1e-10 * (1.0 + self.z_plus.derivative(self.lambda0).abs());
        if self.z_plus.value(self.lambda0).abs() > scale || self.z_minus.value(self.lambda0).abs() > scale {
            return Err(Error::config("z_± must vanish at λ₀"));
        }
        let (dp, dm) = (self.z_plus.derivative(self.lambda0), self.z_minus.derivative(self.lambda0));
        if dp == 0.0 || dm == 0.0 || dp == dm {
            return Err(Error::config("need simple zeros with z'₊(λ₀) ≠ z'₋(λ₀)"));
        }
        Ok(())
    }

    fn roots(&self, z: &ZFunc, x: f64) -> Result<Vec<f64>> {
        let f = |l: f64| z.value(l) + x;
        let mut out = Vec::new();
        let h = (self.b - self.a) / ROOT_SCAN as f64;
        let mut prev = (self.a, f(self.a));
        for i in 1..=ROOT_SCAN {
            let l = if i == ROOT_SCAN { self.b } else { self.a + h * i as f64 };
            let v = f(l);
            if v == 0.0 {
                out.push(l);
            } else if prev.1 != 0.0 && prev.1.signum() != v.signum() {
                out.push(brent(|t| Ok(f(t)), prev.0, l, Tolerance { x_abs: 0.0, max_iter: 200 })?);
            }
            prev = (l, v);
        }
        Ok(out)
    }

    /// Quadrature of `ℐ(x)`.
    pub fn integral(&self, x: f64) -> Result<Estimate> {
        self.validate()?;
        let g = self.g1 * self.delta_plus * self.delta_minus;
        if g == 0.0 {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let rp = self.roots(&self.z_plus, x)?;
        let rm = self.roots(&self.z_minus, x)?;
        let mut pts: Vec<f64> = rp.iter().chain(&rm).copied().collect();
        pts.push(self.a);
        pts.push(self.b);
        pts.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        pts.dedup();
        let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let rule = TanhSinh::with_tol(1e-12);
        let mut total = Estimate { value: 0.0, error: 0.0 };
        for w in pts.windows(2) {
            let (l, r) = (w[0], w[1]);
            let mid = 0.5 * (l + r);
            if self.z_plus.value(mid) + x <= 0.0 || self.z_minus.value(mid) + x <= 0.0 {
                continue;
            }
            let breaks = graded_breaks(l, r, Some(gap), Some(gap));
            let last = breaks.len() - 2;
            let (lp, rp_) = (self.z_plus.value(l) + x, self.z_plus.value(r) + x);
            let (lm, rm_) = (self.z_minus.value(l) + x, self.z_minus.value(r) + x);
            let piece = rule.integrate_panels(&breaks, |i, n| {
                let dl = if i == 0 { n.from_left } else { n.x - l };
                let dr = if i == last { n.from_right } else { r - n.x };
                let (zp, zm) = if dl <= dr {
                    (self.z_plus.increment(l, dl) + lp, self.z_minus.increment(l, dl) + lm)
                } else {
                    (self.z_plus.increment(r, -dr) + rp_, self.z_minus.increment(r, -dr) + rm_)
                };
                if zp <= 0.0 || zm <= 0.0 {
                    0.0
                } else {
                    g * zp.powf(self.delta_plus - 1.0) * zm.powf(self.delta_minus - 1.0)
                }
            })?;
            total.value += piece.value;
            total.error += piece.error;
        }
        Ok(total)
    }

    /// Leading singular term of `ℐ(x)`.
    pub fn prediction(&self, x: f64) -> Result<Prediction> {
        self.validate_common_zero()?;
        let (zp, zm) = (self.z_plus.derivative(self.lambda0), self.z_minus.derivative(self.lambda0));
        let (dp, dm) = (self.delta_plus, self.delta_minus);
        let big_x = x * (zp - zm);
        let core = self.g1 * dp * dm * big_x.abs().powf(dp + dm - 1.0) / (zp.abs().powf(dm) * zm.abs().powf(dp));
        let p = -zp.signum() * (zp - zm).signum();
        if zp * zm < 0.0 {
            let gate = if zp * big_x > 0.0 { 1.0 } else { 0.0 };
            let value = gate * core * gamma(dp) * gamma(dm) / gamma(dp + dm);
            let weights = if zp * (zp - zm) > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
            Ok(Prediction { class: CaseClass::A, value, p, weights, flagged: false })
        } else {
            let s = 1.0 - dp - dm;
            let flagged = (s - s.round()).abs() < 1e-6 && s <= 1e-6;
            let (d_p, d_mp) = if p > 0.0 { (dp, dm) } else { (dm, dp) };
            let weights = ((PI * d_p).sin() / PI, (PI * d_mp).sin() / PI);
            let side = if x > 0.0 { weights.0 } else { weights.1 };
            let value = core * gamma(dp) * gamma(dm) * gamma(s) * side;
            Ok(Prediction { class: CaseClass::B, value, p, weights, flagged })
        }
    }
}

/// The case-a affine example `z₊ = λ`, `z₋ = −λ` on `[−1, 1]` with `𝒢 = δ₊δ₋`.
pub fn affine_case_a(delta_plus: f64, delta_minus: f64) -> AsymCase1D {
    AsymCase1D {
        z_plus: ZFunc::affine(0.0, 1.0),
        z_minus: ZFunc::affine(0.0, -1.0),
        delta_plus,
        delta_minus,
        g1: 1.0,
        lambda0: 0.0,
        a: -1.0,
        b: 1.0,
    }
}

/// The case-b example `z₊ = λ`, `z₋ = 2λ` on `[−1, 1]`.
pub fn case_b(delta_plus: f64, delta_minus: f64) -> AsymCase1D {
    AsymCase1D { z_minus: ZFunc::affine(0.0, 2.0), ..affine_case_a(delta_plus, delta_minus) }
}

/// No common zero: `z₊ = λ + 0.3`, `z₋ = 0.4 − λ`.
pub fn regular_case() -> AsymCase1D {
    AsymCase1D {
        z_plus: ZFunc::affine(0.3, 1.0),
        z_minus: ZFunc::affine(0.4, -1.0),
        delta_plus: 0.7,
        delta_minus: 0.6,
        g1: 1.0,
        lambda0: 0.0,
        a: -1.0,
        b: 1.0,
    }
}

/// Case a: quadrature against the closed prediction on the `δ` grid.
pub fn check_case_a(x: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &dp in &[0.3, 0.7, 1.2] {
        for &dm in &[0.4, 0.9] {
            let c = affine_case_a(dp, dm);
            let got = c.integral(x)?.value;
            let want = c.prediction(x)?.value;
            let rel = ((got - want) / want).abs();
            out.push(Check::new(format!("beta1d_case_a(δ₊={dp},δ₋={dm})"), want, got, 1e-6, rel <= 1e-6));
        }
    }
    Ok(out)
}

/// Case b: exponent and side ratio from a two-sided fit on `x ∈ [1e−5, 1e−3]`.
pub fn check_case_b(delta_plus: f64, delta_minus: f64) -> Result<Vec<Check>> {
    let c = case_b(delta_plus, delta_minus);
    let xs = log_grid(1e-5, 1e-3, 12);
    let yp = xs.iter().map(|&x| Ok(c.integral(x)?.value)).collect::<Result<Vec<_>>>()?;
    let ym = xs.iter().map(|&x| Ok(c.integral(-x)?.value)).collect::<Result<Vec<_>>>()?;
    let fit = fit_two_sided(&xs, &yp, &ym, None, 1)?;
    let pred = c.prediction(1e-4)?;
    let mu = delta_plus + delta_minus - 1.0;
    let ratio = pred.weights.0 / pred.weights.1;
    let got_ratio = fit.amplitude_plus / fit.amplitude_minus;
    Ok(vec![
        Check::new("beta1d_case_b_exponent", mu, fit.exponent, 0.02, ((fit.exponent - mu) / mu).abs() <= 0.02),
        Check::new("beta1d_case_b_side_ratio", ratio, got_ratio, 0.03, ((got_ratio - ratio) / ratio).abs() <= 0.03),
    ])
}

/// No common zero: second divided differences across `x = 0` stay bounded.
pub fn check_regular() -> Result<Check> {
    let c = regular_case();
    let i0 = c.integral(0.0)?.value;
    let d2 = |h: f64| -> Result<f64> { Ok((c.integral(h)?.value - 2.0 * i0 + c.integral(-h)?.value) / (h * h)) };
    let coarse = d2(1e-2)?;
    let fine = d2(1e-3)?;
    let drift = ((fine - coarse) / coarse.abs().max(1.0)).abs();
    Ok(Check::new("beta1d_regular_smooth", coarse, fine, 0.05, drift <= 0.05))
}
