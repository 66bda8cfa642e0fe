//! Equal-velocity structure of the particle/hole dispersion.

use crate::momentum::MomentumSpace;
use crate::roots::{brent, Tolerance};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

fn tol() -> Tolerance<f64> {
    Tolerance { x_abs: 1e-14, max_iter: 300 }
}

/// Window of an enabled string: `𝔥^(r)([−p_F, p_F]) = [K_m^(r), K_M^(r)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringWindow {
    pub r: u32,
    pub k_min: f64,
    pub k_max: f64,
}

/// One checked hypothesis with its worst observed margin (positive = holds).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct VelocityAtlas {
    space: Arc<MomentumSpace>,
    p_m: f64,
    p_big_m: f64,
    k_m: f64,
    k_big_m: f64,
    mid: f64,
    strings: Vec<StringWindow>,
}

impl VelocityAtlas {
    pub fn build(space: Arc<MomentumSpace>) -> Result<Self> {
        let o = space.observables();
        let p_f = o.p_f();
        let v_f = o.v_f();
        let mid = 0.5 * space.period();
        let slope = |k: f64| space.velocity_slope(1, k);
        let v = |k: f64| space.velocity(1, k);
        let inset = 1e-9 * (mid - p_f);
        let p_m = brent(slope, p_f + inset, mid - inset, tol())
            .map_err(|e| Error::numerical(format!("velocity maximum not bracketed: {e}")))?;
        let p_big_m = brent(slope, mid + inset, 2.0 * mid - p_f - inset, tol())
            .map_err(|e| Error::numerical(format!("velocity minimum not bracketed: {e}")))?;
        let k_m = brent(|k| Ok(v(k)? - v_f), p_m, mid, tol())
            .map_err(|e| Error::numerical(format!("no k with v₁(k) = v_F: {e}")))?;
        let k_big_m = brent(|k| Ok(v(k)? + v_f), mid, p_big_m, tol())
            .map_err(|e| Error::numerical(format!("no k with v₁(k) = −v_F: {e}")))?;
        let mut atlas = VelocityAtlas { space, p_m, p_big_m, k_m, k_big_m, mid, strings: Vec::new() };
        let rs: Vec<u32> = atlas.space.observables().params().strings.iter().map(|s| s.r).collect();
        for r in rs {
            let a = atlas.h(r, -p_f)?;
            let b = atlas.h(r, p_f)?;
            atlas.strings.push(StringWindow { r, k_min: a.min(b), k_max: a.max(b) });
        }
        Ok(atlas)
    }

    pub fn space(&self) -> &MomentumSpace {
        &self.space
    }

    pub fn shared_space(&self) -> Arc<MomentumSpace> {
        Arc::clone(&self.space)
    }

    /// Location of the velocity maximum on `ℐ₁`.
    pub fn p_m(&self) -> f64 {
        self.p_m
    }

    /// Location of the velocity minimum on `ℐ₁`.
    pub fn p_big_m(&self) -> f64 {
        self.p_big_m
    }

    pub fn k_m(&self) -> f64 {
        self.k_m
    }

    pub fn k_big_m(&self) -> f64 {
        self.k_big_m
    }

    /// Centre of `ℐ₁`, `π − p_F·sgn(π−2ζ)`.
    pub fn midpoint(&self) -> f64 {
        self.mid
    }

    pub fn string_windows(&self) -> &[StringWindow] {
        &self.strings
    }

    /// `|(K_m + K_M) − 2·midpoint|`.
    pub fn window_asymmetry(&self) -> f64 {
        (self.k_m + self.k_big_m - 2.0 * self.mid).abs()
    }

    /// Inset used for derivative quantities near the window ends.
    pub fn margin(&self) -> f64 {
        1e-4 * (self.k_big_m - self.k_m)
    }

    /// Clamps `k` into the inset window; the flag reports a clamp.
    pub fn clamp_window(&self, k: f64) -> (f64, bool) {
        let (a, b) = (self.k_m + self.margin(), self.k_big_m - self.margin());
        if k < a {
            (a, true)
        } else if k > b {
            (b, true)
        } else {
            (k, false)
        }
    }

    fn v1(&self, k: f64) -> Result<f64> {
        self.space.velocity(1, k)
    }

    /// `𝔱(k) ∈ [−p_F, p_F]` with `v₁(𝔱(k)) = v₁(k)`, for `k ∈ [K_m, K_M]`.
    pub fn t(&self, k: f64) -> Result<f64> {
        if !(k >= self.k_m - 1e-12 && k <= self.k_big_m + 1e-12) {
            return Err(Error::domain(format!("𝔱 needs k in [{}, {}], got {k}", self.k_m, self.k_big_m)));
        }
        let target = self.v1(k)?;
        let p_f = self.space.observables().p_f();
        let v_f = self.space.observables().v_f();
        if target >= v_f {
            return Ok(p_f);
        }
        if target <= -v_f {
            return Ok(-p_f);
        }
        brent(|t| Ok(self.v1(t)? - target), -p_f, p_f, tol())
    }

    /// `𝔱'(k) = v₁'(k) / v₁'(𝔱(k))`.
    pub fn t_prime(&self, k: f64) -> Result<f64> {
        let tk = self.t(k)?;
        Ok(self.space.velocity_slope(1, k)? / self.space.velocity_slope(1, tk)?)
    }

    /// `𝔭 = 𝔱⁻¹ : [−p_F, p_F] → [K_m, K_M]`.
    pub fn p(&self, t: f64) -> Result<f64> {
        let p_f = self.space.observables().p_f();
        if !(t.abs() <= p_f + 1e-12) {
            return Err(Error::domain(format!("𝔭 needs t in [−p_F, p_F], got {t}")));
        }
        let target = self.v1(t)?;
        let g = |k: f64| Ok(self.v1(k)? - target);
        if g(self.k_m)? <= 0.0 {
            return Ok(self.k_m);
        }
        if g(self.k_big_m)? >= 0.0 {
            return Ok(self.k_big_m);
        }
        brent(g, self.k_m, self.k_big_m, tol())
    }

    /// `𝔭_L : [p_F, P_m] → [P_m, K_m]`.
    pub fn p_left(&self, k: f64) -> Result<f64> {
        let p_f = self.space.observables().p_f();
        if !(k >= p_f - 1e-12 && k <= self.p_m + 1e-12) {
            return Err(Error::domain(format!("𝔭_L needs k in [p_F, P_m], got {k}")));
        }
        let target = self.v1(k)?;
        self.equal_velocity_on(target, self.p_m, self.k_m)
    }

    /// `𝔭_R : [P_M, p₊] → [K_M, P_M]`.
    pub fn p_right(&self, k: f64) -> Result<f64> {
        let hi = self.space.intervals().particle.1;
        if !(k >= self.p_big_m - 1e-12 && k <= hi + 1e-12) {
            return Err(Error::domain(format!("𝔭_R needs k in [P_M, p₊], got {k}")));
        }
        let target = self.v1(k)?;
        self.equal_velocity_on(target, self.k_big_m, self.p_big_m)
    }

    fn equal_velocity_on(&self, target: f64, a: f64, b: f64) -> Result<f64> {
        let g = |k: f64| Ok(self.v1(k)? - target);
        let (ga, gb) = (g(a)?, g(b)?);
        if ga == 0.0 || ga.signum() == gb.signum() {
            return Ok(if ga.abs() <= gb.abs() { a } else { b });
        }
        brent(g, a, b, tol())
    }

    /// `𝔥^(r)(t)` with `v_r(𝔥^(r)(t)) = v₁(t)`.
    pub fn h(&self, r: u32, t: f64) -> Result<f64> {
        let iv = self
            .space
            .intervals()
            .strings
            .iter()
            .find(|s| s.0 == r)
            .copied()
            .ok_or_else(|| Error::config(format!("string length r = {r} is not enabled")))?;
        let target = self.v1(t)?;
        let span = iv.2 - iv.1;
        let (a, b) = (iv.1 + 1e-9 * span, iv.2 - 1e-9 * span);
        brent(|k| Ok(self.space.velocity(r, k)? - target), a, b, tol())
            .map_err(|e| Error::numerical(format!("𝔥^({r}) not bracketed at t = {t}: {e}")))
    }

    /// `𝔥^(r)'(t) = v₁'(t) / v_r'(𝔥^(r)(t))`.
    pub fn h_prime(&self, r: u32, t: f64) -> Result<f64> {
        let k = self.h(r, t)?;
        Ok(self.space.velocity_slope(1, t)? / self.space.velocity_slope(r, k)?)
    }

    /// Checks each velocity hypothesis on `grid` samples per interval.
    pub fn verify_hypotheses(&self, grid: usize) -> Result<Vec<HypothesisCheck>> {
        let grid = grid.max(8);
        let o = self.space.observables();
        let (p_f, v_f) = (o.p_f(), o.v_f());
        let hi = self.space.intervals().particle.1;
        let sample = |a: f64, b: f64| -> Vec<f64> { (1..grid).map(|i| a + (b - a) * i as f64 / grid as f64).collect() };
        let mut out = Vec::new();
        let mut push =
            |name: &str, margin: f64| out.push(HypothesisCheck { name: name.to_string(), pass: margin > 0.0, margin });

        let mut m = f64::INFINITY;
        for k in sample(-p_f, p_f) {
            m = m.min(v_f - self.v1(k)?.abs());
        }
        push("fermi_zone_subsonic", m);

        let monotone = |a: f64, b: f64, sign: f64| -> Result<f64> {
            let ks = sample(a, b);
            let mut worst = f64::INFINITY;
            let mut prev = self.v1(ks[0])?;
            for &k in &ks[1..] {
                let cur = self.v1(k)?;
                worst = worst.min(sign * (cur - prev));
                prev = cur;
            }
            Ok(worst)
        };
        let inc = monotone(-p_f, self.p_m, 1.0)?.min(monotone(self.p_big_m, hi, 1.0)?);
        push("increasing_outside_extrema", inc);
        push("decreasing_between_extrema", monotone(self.p_m, self.p_big_m, -1.0)?);
        push("extrema_symmetric", 1e-8 - (self.p_m + self.p_big_m - 2.0 * self.mid).abs());

        let mut inside = f64::INFINITY;
        for k in sample(self.k_m, self.k_big_m) {
            inside = inside.min(v_f - self.v1(k)?.abs());
        }
        push("window_subsonic", inside);
        let mut outside = f64::INFINITY;
        for k in sample(p_f, self.k_m).into_iter().chain(sample(self.k_big_m, hi)) {
            outside = outside.min(self.v1(k)?.abs() - v_f);
        }
        push("supersonic_outside_window", outside);
        push("window_symmetric", 1e-8 - self.window_asymmetry());

        let ks = sample(self.k_m, self.k_big_m);
        let mut dec = f64::INFINITY;
        let mut resid: f64 = 0.0;
        let mut prev = self.t(ks[0])?;
        for &k in &ks[1..] {
            let t = self.t(k)?;
            dec = dec.min(prev - t);
            resid = resid.max((self.v1(k)? - self.v1(t)?).abs());
            prev = t;
        }
        push("t_strictly_decreasing", dec);
        push("t_equal_velocity", 1e-8 - resid);

        for (name, a, b, f) in
            [("p_left_decreasing", p_f, self.p_m, 0u8), ("p_right_decreasing", self.p_big_m, hi, 1u8)]
        {
            let ks = sample(a, b);
            let map = |k: f64| if f == 0 { self.p_left(k) } else { self.p_right(k) };
            let mut worst = f64::INFINITY;
            let mut prev = map(ks[0])?;
            for &k in &ks[1..] {
                let c = map(k)?;
                worst = worst.min(prev - c);
                prev = c;
            }
            push(name, worst);
        }

        for w in &self.strings {
            let iv = self.space.intervals().strings.iter().find(|s| s.0 == w.r).copied().expect("enabled");
            let span = iv.2 - iv.1;
            let ks = sample(iv.1 + 1e-6 * span, iv.2 - 1e-6 * span);
            let mut vmax: f64 = 0.0;
            let mut sign_change = 0usize;
            let mut prev = self.space.velocity_slope(w.r, ks[0])?;
            for &k in &ks {
                let s = self.space.velocity_slope(w.r, k)?;
                if s.signum() != prev.signum() {
                    sign_change += 1;
                }
                prev = s;
                vmax = vmax.max(self.space.velocity(w.r, k)?.abs());
            }
            push(
                &format!("string_{}_velocity_monotone", w.r),
                if sign_change == 0 { 1.0 } else { -(sign_change as f64) },
            );
            push(&format!("string_{}_velocity_exceeds_v_f", w.r), vmax - v_f);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{FieldSpec, ModelParams, Observables};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn atlas(params: ModelParams) -> VelocityAtlas {
        let o = Arc::new(Observables::solve(&params).unwrap());
        VelocityAtlas::build(Arc::new(MomentumSpace::new(o).unwrap())).unwrap()
    }

    #[test]
    fn free_fermion_window() {
        let a = atlas(ModelParams { j: 1.0, zeta: FRAC_PI_2, field: FieldSpec::Field(2.0), n: 48, strings: vec![] });
        assert!((a.k_m() - (PI - FRAC_PI_3)).abs() < 1e-9);
        assert!((a.k_big_m() - (PI + FRAC_PI_3)).abs() < 1e-9);
        assert!((a.p_m() - FRAC_PI_2).abs() < 1e-6);
        for i in 0..=20 {
            let k = a.k_m() + (a.k_big_m() - a.k_m()) * i as f64 / 20.0;
            assert!((a.t(k).unwrap() - (PI - k)).abs() < 1e-8, "{k}");
        }
        assert!((a.t(a.k_m()).unwrap() - FRAC_PI_3).abs() < 1e-6);
        assert!((a.t(a.k_big_m()).unwrap() + FRAC_PI_3).abs() < 1e-6);
        assert!(a.verify_hypotheses(64).unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn interacting_structure() {
        for (delta, d) in [(0.57, 0.21), (-0.60, 0.30)] {
            let a = atlas(ModelParams::from_delta(1.0, delta, FieldSpec::Density(d), 64).unwrap());
            let v_f = a.space().observables().v_f();
            assert!((a.space().velocity(1, a.k_m()).unwrap() - v_f).abs() < 1e-8);
            assert!((a.space().velocity(1, a.k_big_m()).unwrap() + v_f).abs() < 1e-8);
            assert!(a.window_asymmetry() < 1e-8);
            let checks = a.verify_hypotheses(80).unwrap();
            for c in &checks {
                assert!(c.pass, "{delta}: {c:?}");
            }
            // 𝔱' by finite differences
            let (k0, _) = a.clamp_window(0.5 * (a.k_m() + a.k_big_m()) + 0.1);
            let h = 1e-5;
            let fd = (a.t(k0 + h).unwrap() - a.t(k0 - h).unwrap()) / (2.0 * h);
            let tp = a.t_prime(k0).unwrap();
            assert!(tp < 0.0);
            assert!((fd - tp).abs() < 1e-5 * tp.abs());
            // 𝔭 inverts 𝔱
            let t = a.t(k0).unwrap();
            assert!((a.p(t).unwrap() - k0).abs() < 1e-9);
            let pf = a.space().observables().p_f();
            let kl = 0.5 * (pf + a.p_m());
            let pl = a.p_left(kl).unwrap();
            assert!(pl > a.p_m() && pl < a.k_m());
            assert!((a.space().velocity(1, pl).unwrap() - a.space().velocity(1, kl).unwrap()).abs() < 1e-8);
        }
    }
}
