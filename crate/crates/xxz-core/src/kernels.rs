//! Lieb-type kernel `K(λ|η)`, bare phases, and the special-function values
//! (Barnes G at integers, Gaudin–Mehta constants, Γ) used by the other
//! modules. Everything is evaluated with real arithmetic only: a rapidity is
//! a real part plus a tag saying whether it sits on `ℝ` or on `ℝ + iπ/2`.

use crate::{Error, Real, Result};
use std::ops::{Add, Neg, Sub};

/// Denominators smaller than this are treated as kernel poles.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Beyond this |λ| the kernel is replaced by its exponential tail.
const TAIL_START: f64 = 40.0;

/// Imaginary part of a rapidity, modulo `iπ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    /// `Im λ = 0`.
    Real,
    /// `Im λ = π/2`.
    Shifted,
}

impl Branch {
    pub fn from_parity(parity: u8) -> Branch {
        if parity.is_multiple_of(2) {
            Branch::Real
        } else {
            Branch::Shifted
        }
    }

    pub fn is_shifted(self) -> bool {
        self == Branch::Shifted
    }
}

impl Add for Branch {
    type Output = Branch;
    fn add(self, rhs: Branch) -> Branch {
        if self == rhs {
            Branch::Real
        } else {
            Branch::Shifted
        }
    }
}

/// A rapidity `re + i·(0 or π/2)`; sums and differences wrap the imaginary
/// part modulo `iπ`, under which every function here is periodic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rapidity<T> {
    pub re: T,
    pub branch: Branch,
}

impl<T: Real> Rapidity<T> {
    pub fn real(re: T) -> Self {
        Rapidity { re, branch: Branch::Real }
    }

    pub fn shifted(re: T) -> Self {
        Rapidity { re, branch: Branch::Shifted }
    }

    pub fn on(branch: Branch, re: T) -> Self {
        Rapidity { re, branch }
    }
}

impl<T: Real> Add for Rapidity<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Rapidity { re: self.re + rhs.re, branch: self.branch + rhs.branch }
    }
}

impl<T: Real> Sub for Rapidity<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Rapidity { re: self.re - rhs.re, branch: self.branch + rhs.branch }
    }
}

impl<T: Real> Neg for Rapidity<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Rapidity { re: -self.re, branch: self.branch }
    }
}

/// Kernel parameter `η`. Composite angles such as `rζ/2` may exceed `π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle<T> {
    eta: T,
}

impl<T: Real> Angle<T> {
    pub fn new(eta: T) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::domain(format!("angle must be finite, got {eta}")));
        }
        Ok(Angle { eta })
    }

    pub fn value(self) -> T {
        self.eta
    }

    /// `η − π⌊η/π⌋ ∈ [0, π)`.
    pub fn hat(self) -> T {
        let pi = T::PI();
        self.eta - pi * (self.eta / pi).floor()
    }

    /// True when `sin 2η` vanishes to rounding; the kernel is then identically zero.
    pub fn is_degenerate(self) -> bool {
        (self.eta + self.eta).sin().abs() <= T::lit(8.0) * T::epsilon()
    }
}

/// `sgn` with `sgn(0) = 0`, zero meaning `|x| ≤ 1e-13`.
pub fn sgn0<T: Real>(x: T) -> T {
    if x.abs() <= T::lit(1e-13) {
        T::zero()
    } else {
        x.signum()
    }
}

fn denominator<T: Real>(lambda: Rapidity<T>, eta: Angle<T>) -> (T, T, T) {
    let s = eta.value().sin();
    let two = T::lit(2.0);
    let sign = if lambda.branch.is_shifted() { -T::one() } else { T::one() };
    let x = lambda.re;
    let d = match lambda.branch {
        Branch::Real => x.sinh().powi(2) + s * s,
        Branch::Shifted => s * s - x.cosh().powi(2),
    };
    (d, sign * (two * x).sinh(), sign * two * (two * x).cosh())
}

/// `K(λ|η) = sin 2η / (2π sinh(λ+iη) sinh(λ−iη))`, real on both branches.
pub fn kernel_k<T: Real>(lambda: Rapidity<T>, eta: Angle<T>) -> Result<T> {
    if eta.is_degenerate() {
        return Ok(T::zero());
    }
    let (d, _, _) = denominator(lambda, eta);
    if d.abs() < T::lit(POLE_TOLERANCE) {
        return Err(Error::domain(format!("kernel pole: λ={} ({:?}), η={}", lambda.re, lambda.branch, eta.value())));
    }
    Ok((eta.value() + eta.value()).sin() / (T::lit(2.0) * T::PI() * d))
}

/// `(K, ∂λK, ∂²λK)`.
pub fn kernel_k_derivs<T: Real>(lambda: Rapidity<T>, eta: Angle<T>) -> Result<(T, T, T)> {
    let zero = T::zero();
    if eta.is_degenerate() {
        return Ok((zero, zero, zero));
    }
    let two = T::lit(2.0);
    if lambda.re.abs() > T::lit(TAIL_START) {
        let k = kernel_k(lambda, eta)?;
        let s = lambda.re.signum();
        return Ok((k, -two * s * k, T::lit(4.0) * k));
    }
    let (d, d1, d2) = denominator(lambda, eta);
    if d.abs() < T::lit(POLE_TOLERANCE) {
        return Err(Error::domain(format!("kernel pole: λ={} ({:?}), η={}", lambda.re, lambda.branch, eta.value())));
    }
    let a = (eta.value() + eta.value()).sin() / (two * T::PI());
    let k = a / d;
    let k1 = -a * d1 / (d * d);
    let k2 = a * (two * d1 * d1 - d2 * d) / (d * d * d);
    Ok((k, k1, k2))
}

fn string_angles<T: Real>(r: u32, zeta: Angle<T>) -> Result<(Angle<T>, Angle<T>)> {
    if r == 0 {
        return Err(Error::domain("string length must be at least 1"));
    }
    let half = T::lit(0.5) * zeta.value();
    let rr = T::from_u32(r).expect("small integer");
    Ok((Angle::new(half * (rr + T::one()))?, Angle::new(half * (rr - T::one()))?))
}

/// `K_r(λ) = K(λ|ζ(r+1)/2) + K(λ|ζ(r−1)/2)`; for `r = 1` the second term vanishes.
pub fn kernel_kr<T: Real>(lambda: Rapidity<T>, r: u32, zeta: Angle<T>) -> Result<T> {
    let (a, b) = string_angles(r, zeta)?;
    Ok(kernel_k(lambda, a)? + kernel_k(lambda, b)?)
}

/// `(K_r, K_r', K_r'')`.
pub fn kernel_kr_derivs<T: Real>(lambda: Rapidity<T>, r: u32, zeta: Angle<T>) -> Result<(T, T, T)> {
    let (a, b) = string_angles(r, zeta)?;
    let (x0, x1, x2) = kernel_k_derivs(lambda, a)?;
    let (y0, y1, y2) = kernel_k_derivs(lambda, b)?;
    Ok((x0 + y0, x1 + y1, x2 + y2))
}

/// Bare phase `θ(λ|η)`, the primitive of `2πK` vanishing at the origin.
///
/// Real λ: `2·atan(cot η · tanh λ)`. On `ℝ + iπ/2` the path first climbs the
/// imaginary axis, passing the pole at `iη̂` on its left, which contributes
/// `−π·sgn(π − 2η̂)`; the horizontal leg then adds `−2·atan(tan η · tanh λ)`.
pub fn bare_phase<T: Real>(lambda: Rapidity<T>, eta: Angle<T>) -> T {
    if eta.is_degenerate() {
        return T::zero();
    }
    let two = T::lit(2.0);
    let t = lambda.re.tanh();
    match lambda.branch {
        Branch::Real => two * (t / eta.value().tan()).atan(),
        Branch::Shifted => {
            let jump = -T::PI() * sgn0(T::PI() - two * eta.hat());
            jump - two * (eta.value().tan() * t).atan()
        }
    }
}

/// `θ_r = θ(·|ζ(r+1)/2) + θ(·|ζ(r−1)/2)`; `θ_1 = θ(·|ζ)`.
pub fn bare_phase_r<T: Real>(lambda: Rapidity<T>, r: u32, zeta: Angle<T>) -> Result<T> {
    let (a, b) = string_angles(r, zeta)?;
    Ok(bare_phase(lambda, a) + bare_phase(lambda, b))
}

/// Barnes `G(n) = ∏_{k=1}^{n−2} k!` at positive integers.
pub fn barnes_g<T: Real>(n: u32) -> Result<T> {
    if n == 0 {
        return Err(Error::domain("Barnes G needs n ≥ 1"));
    }
    let mut g = T::one();
    let mut fact = T::one();
    for k in 1..n.saturating_sub(1) {
        fact = fact * T::from_u32(k).expect("small integer");
        g = g * fact;
    }
    Ok(g)
}

/// `∫_{ℝⁿ} e^{−|y|²} ∏_{a<b}(y_a − y_b)² dy = 2^{−n²/2} (2π)^{n/2} G(n+2)`.
pub fn gaudin_mehta_value<T: Real>(n: u32) -> Result<T> {
    if n == 0 {
        return Err(Error::domain("Gaudin–Mehta integral needs n ≥ 1"));
    }
    let nn = T::from_u32(n).expect("small integer");
    let half = T::lit(0.5);
    let two_pi = T::lit(2.0) * T::PI();
    Ok(half.powf(nn * nn * half) * two_pi.powf(nn * half) * barnes_g::<T>(n + 2)?)
}

/// Euler Γ on the real line (poles return ±∞ or NaN).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `1/Γ(x)`, continuous through the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Euler β-integral through Γ.
pub fn beta(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) * rgamma(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn ang(x: f64) -> Angle<f64> {
        Angle::new(x).unwrap()
    }

    #[test]
    fn kernel_closed_values() {
        let r0 = Rapidity::real(0.0);
        assert_eq!(kernel_k(r0, ang(FRAC_PI_2)).unwrap(), 0.0);
        assert!((kernel_k(r0, ang(FRAC_PI_4)).unwrap() - 1.0 / PI).abs() < 1e-15);
        let want = 1.0 / FRAC_PI_3.tan() / PI;
        assert!((kernel_k(r0, ang(FRAC_PI_3)).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.18377).abs() < 1e-5);
    }

    #[test]
    fn kr_values() {
        let r0 = Rapidity::real(0.0);
        assert!(kernel_kr(r0, 2, ang(FRAC_PI_2)).unwrap().abs() < 1e-15);
        let k1 = kernel_kr(r0, 1, ang(FRAC_PI_3)).unwrap();
        assert!((k1 - kernel_k(r0, ang(FRAC_PI_3)).unwrap()).abs() < 1e-16);
        let far = kernel_kr(Rapidity::real(400.0), 3, ang(1.1)).unwrap();
        assert_eq!(far, 0.0);
    }

    #[test]
    fn kernel_even_on_both_branches() {
        for &eta in &[0.3, 1.0, 2.2, 4.0] {
            for i in 0..50 {
                let x = -5.0 + 0.2 * i as f64 + 0.01;
                for &b in &[Branch::Real, Branch::Shifted] {
                    let a = kernel_k(Rapidity::on(b, x), ang(eta)).unwrap();
                    let c = kernel_k(Rapidity::on(b, -x), ang(eta)).unwrap();
                    assert!((a - c).abs() <= 1e-14 * a.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn free_fermion_kernel_vanishes() {
        for i in 0..40 {
            let x = -4.0 + 0.2 * i as f64;
            assert_eq!(kernel_k(Rapidity::real(x), ang(FRAC_PI_2)).unwrap(), 0.0);
            assert_eq!(kernel_k(Rapidity::shifted(x + 0.05), ang(FRAC_PI_2)).unwrap(), 0.0);
        }
    }

    #[test]
    fn shifted_branch_is_sign_flipped_denominator() {
        let (x, eta) = (0.7, 0.9);
        let k = kernel_k(Rapidity::shifted(x), ang(eta)).unwrap();
        let want = (2.0 * eta).sin() / (2.0 * PI * (eta.sin().powi(2) - x.cosh().powi(2)));
        assert!((k - want).abs() < 1e-15);
    }

    #[test]
    fn pole_is_rejected() {
        // η just below π/2 keeps sin 2η ≠ 0 while sin²η − cosh²0 ≈ −1e-14.
        let eta = FRAC_PI_2 - 1e-7;
        let e = kernel_k(Rapidity::shifted(0.0), ang(eta));
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn phase_derivative_matches_kernel() {
        let h = 1e-5;
        for &eta in &[0.4, 1.2, 2.5] {
            for &b in &[Branch::Real, Branch::Shifted] {
                for i in 0..41 {
                    let x = -5.0 + 0.25 * i as f64;
                    let d = (bare_phase(Rapidity::on(b, x + h), ang(eta))
                        - bare_phase(Rapidity::on(b, x - h), ang(eta)))
                        / (2.0 * h);
                    let k = 2.0 * PI * kernel_k(Rapidity::on(b, x), ang(eta)).unwrap();
                    assert!((d - k).abs() <= 1e-6 * k.abs().max(1e-3), "{eta} {b:?} {x}");
                }
            }
        }
    }

    #[test]
    fn phase_values() {
        assert_eq!(bare_phase(Rapidity::real(0.0), ang(0.7)), 0.0);
        for i in 0..10 {
            assert_eq!(bare_phase(Rapidity::real(i as f64 - 5.0), ang(FRAC_PI_2)), 0.0);
        }
        let v = bare_phase(Rapidity::real(1.0), ang(FRAC_PI_4));
        assert!((v - 2.0 * 1f64.tanh().atan()).abs() < 1e-15);
        let oracle = crate::quadrature::TanhSinh::default()
            .integrate(0.0, 1.0, |n| 2.0 * PI * kernel_k(Rapidity::real(n.x), ang(FRAC_PI_4)).unwrap())
            .unwrap();
        assert!((v - oracle.value).abs() < 1e-13);
        assert!((v - 1.30176).abs() < 1e-5);
        let odd = bare_phase(Rapidity::real(-0.8), ang(2.0)) + bare_phase(Rapidity::real(0.8), ang(2.0));
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn kernel_derivatives_by_differences() {
        let h = 1e-4;
        for &b in &[Branch::Real, Branch::Shifted] {
            for &x in &[-2.0, -0.3, 0.4, 1.7, 41.0] {
                let e = ang(1.1);
                let (k, k1, k2) = kernel_k_derivs(Rapidity::on(b, x), e).unwrap();
                let f = |y: f64| kernel_k(Rapidity::on(b, y), e).unwrap();
                let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
                let d2 = (f(x + h) - 2.0 * k + f(x - h)) / (h * h);
                let scale = k.abs().max(1e-300);
                assert!((k1 - d1).abs() < 1e-6 * scale.max(k1.abs()), "{b:?} {x}");
                assert!((k2 - d2).abs() < 1e-4 * scale.max(k2.abs()), "{b:?} {x}");
            }
        }
    }

    #[test]
    fn barnes_and_gaudin_mehta() {
        assert_eq!(barnes_g::<f64>(1).unwrap(), 1.0);
        assert_eq!(barnes_g::<f64>(2).unwrap(), 1.0);
        assert_eq!(barnes_g::<f64>(3).unwrap(), 1.0);
        assert_eq!(barnes_g::<f64>(4).unwrap(), 2.0);
        assert_eq!(barnes_g::<f64>(5).unwrap(), 12.0);
        assert_eq!(barnes_g::<f64>(6).unwrap(), 288.0);
        assert!(barnes_g::<f64>(0).is_err());
        // G(n+1) = Γ(n) G(n)
        for n in 2..10u32 {
            let lhs = barnes_g::<f64>(n + 1).unwrap();
            let rhs = gamma(n as f64) * barnes_g::<f64>(n).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * lhs);
        }
        assert!((gaudin_mehta_value::<f64>(1).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gaudin_mehta_value::<f64>(2).unwrap() - PI).abs() < 1e-14);
        let g3 = 0.5f64.powf(4.5) * (2.0 * PI).powf(1.5) * 12.0;
        assert!((gaudin_mehta_value::<f64>(3).unwrap() - g3).abs() < 1e-13);
    }

    #[test]
    fn gamma_on_negative_axis() {
        let want = gamma(0.9) / ((-2.1) * (-1.1) * (-0.1));
        assert!((gamma(-2.1) - want).abs() < 1e-12 * want.abs());
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((beta(2.0, 3.0) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn generic_over_f32() {
        let k = kernel_k(Rapidity::real(0.0f32), Angle::new(std::f32::consts::FRAC_PI_4).unwrap()).unwrap();
        assert!((k - 1.0 / std::f32::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn branch_arithmetic() {
        let a = Rapidity::shifted(1.0);
        let b = Rapidity::shifted(0.25);
        assert_eq!((a - b).branch, Branch::Real);
        assert_eq!((a - Rapidity::real(2.0)).branch, Branch::Shifted);
        assert_eq!((-a).branch, Branch::Shifted);
    }
}
