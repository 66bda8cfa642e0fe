//! Bracketing root finding (Brent) and golden-section minimisation.

use crate::{Error, Real, Result};

/// Stopping rule for [`brent`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance<T> {
    pub x_abs: T,
    pub max_iter: usize,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Tolerance { x_abs: T::lit(4.0) * T::epsilon(), max_iter: 200 }
    }
}

/// Root of `f` in `[a, b]` given a sign change, by Brent's method.
///
/// The returned point `x` satisfies `|x − x*| ≲ x_abs + 2ε|x|` or `f(x) = 0`.
pub fn brent<T, F>(mut f: F, a: T, b: T, tol: Tolerance<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::numerical(format!("root not bracketed on [{a}, {b}]: f = ({fa}, {fb})")));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol.x_abs;
        let m = half * (c - b);
        if m.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let lim1 = T::lit(3.0) * m * q - (tol1 * q).abs();
            let lim2 = (e * q).abs();
            if two * p < lim1.min(lim2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if m > T::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = f(b)?;
        if !fb.is_finite() {
            return Err(Error::numerical(format!("non-finite function value at {b}")));
        }
    }
    Err(Error::numerical(format!("Brent did not converge near {b}")))
}

/// Minimiser of a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_min<F>(mut f: F, a: f64, b: f64, x_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > x_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
