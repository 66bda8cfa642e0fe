//! Momentum representation: the piecewise-shifted `p̂₁`, its inverse on the
//! oriented concatenation of rapidity segments, and the derived dispersion,
//! velocity, phase and charge as functions of momentum.

use crate::kernels::Branch;
use crate::observables::Observables;
use crate::{Error, Rapidity, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Points per inverse-map table.
const TABLE_POINTS: usize = 2049;
/// Largest `tanh λ` sampled on unbounded segments.
const U_EDGE: f64 = 1.0 - 1e-15;
/// Rapidity at which the unbounded segments are truncated.
const LAMBDA_CAP: f64 = 40.0;

/// Rapidity segment carrying a momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// `λ ∈ [−q, q]`.
    Hole,
    /// `λ ∈ [q, ∞)`.
    ParticleRight,
    /// `λ ∈ ℝ + iπ/2`, traversed from `+∞` to `−∞`.
    ParticleTop,
    /// `λ ∈ (−∞, −q]`.
    ParticleLeft,
}

impl Segment {
    pub fn branch(self) -> Branch {
        if self == Segment::ParticleTop {
            Branch::Shifted
        } else {
            Branch::Real
        }
    }
}

/// Endpoints of the momentum ranges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumIntervals {
    /// `[−p_F, p_F]`.
    pub hole: (f64, f64),
    /// `[p_F, 2π − p_F − 2p_F·sgn(π−2ζ)]`.
    pub particle: (f64, f64),
    /// `p̂₁(+∞)`, junction of the right and top segments.
    pub right_top: f64,
    /// `p̂₁(−∞)`, junction of the top and left segments.
    pub top_left: f64,
    /// `(r, p₋^(r), p₊^(r))` for each enabled string.
    pub strings: Vec<(u32, f64, f64)>,
}

/// A momentum resolved to its rapidity with dispersion data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State {
    pub k: f64,
    pub lambda: Rapidity,
    /// `None` for strings with `r ≥ 2`.
    pub segment: Option<Segment>,
    pub energy: f64,
    pub velocity: f64,
    /// `dv/dk`.
    pub velocity_slope: f64,
}

/// Samples `(k, λ, dk/dλ)` ordered by increasing `k`.
#[derive(Clone, Debug)]
struct Table {
    branch: Branch,
    k: Vec<f64>,
    lam: Vec<f64>,
    dk: Vec<f64>,
    /// λ bounding the region below `k[0]` and above `k[last]`.
    lam_below: f64,
    lam_above: f64,
    /// `k` at those λ.
    k_min: f64,
    k_max: f64,
}

impl Table {
    fn build<F>(branch: Branch, lams: &[f64], lam_below: f64, lam_above: f64, eval: F) -> Result<Table>
    where
        F: Fn(f64) -> Result<(f64, f64)>,
    {
        let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(lams.len());
        for &l in lams {
            let (k, d) = eval(l)?;
            rows.push((k, l, d));
        }
        let increasing = rows.last().expect("non-empty").0 >= rows[0].0;
        if !increasing {
            rows.reverse();
        }
        for w in rows.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::numerical(format!("momentum not monotone between λ = {} and {}", w[0].1, w[1].1)));
            }
        }
        let k_min = eval(lam_below)?.0.min(rows[0].0);
        let k_max = eval(lam_above)?.0.max(rows.last().expect("non-empty").0);
        Ok(Table {
            branch,
            k: rows.iter().map(|r| r.0).collect(),
            lam: rows.iter().map(|r| r.1).collect(),
            dk: rows.iter().map(|r| r.2).collect(),
            lam_below,
            lam_above,
            k_min,
            k_max,
        })
    }

    /// Rapidity with `eval(λ).0 = k`: Hermite guess, then Newton kept
    /// inside the table bracket with bisection fallback.
    fn invert<F>(&self, k: f64, eval: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<(f64, f64)>,
    {
        let n = self.k.len();
        let (mut a, mut b, guess) = if k <= self.k[0] {
            if k <= self.k_min {
                return Ok(self.lam_below);
            }
            (self.lam_below, self.lam[0], 0.5 * (self.lam_below + self.lam[0]))
        } else if k >= self.k[n - 1] {
            if k >= self.k_max {
                return Ok(self.lam_above);
            }
            (self.lam[n - 1], self.lam_above, 0.5 * (self.lam[n - 1] + self.lam_above))
        } else {
            let i = self.k.partition_point(|&x| x <= k).saturating_sub(1).min(n - 2);
            let (k0, k1) = (self.k[i], self.k[i + 1]);
            let (l0, l1) = (self.lam[i], self.lam[i + 1]);
            let hk = k1 - k0;
            let g = if hk > 0.0 {
                let t = (k - k0) / hk;
                let (m0, m1) = (hk / self.dk[i], hk / self.dk[i + 1]);
                let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
                let h10 = t * (1.0 - t) * (1.0 - t);
                let h01 = t * t * (3.0 - 2.0 * t);
                let h11 = t * t * (t - 1.0);
                h00 * l0 + h10 * m0 + h01 * l1 + h11 * m1
            } else {
                0.5 * (l0 + l1)
            };
            (l0, l1, g)
        };
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let (fa, _) = eval(a)?;
        let up = {
            let (fb, _) = eval(b)?;
            fb >= fa
        };
        let mut x = if guess.is_finite() && guess > a && guess < b { guess } else { 0.5 * (a + b) };
        for _ in 0..100 {
            let (f, d) = eval(x)?;
            let r = f - k;
            if r == 0.0 {
                return Ok(x);
            }
            if (r > 0.0) == up {
                b = x;
            } else {
                a = x;
            }
            let newton = x - r / d;
            let next = if d != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || (b - a) <= 1e-15 * (1.0 + x.abs()) {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::numerical(format!("momentum inversion did not converge at k = {k}")))
    }
}

/// Momentum maps built over solved observables.
#[derive(Clone, Debug)]
pub struct MomentumSpace {
    obs: Arc<Observables>,
    hole: Table,
    right: Table,
    top: Table,
    left: Table,
    strings: Vec<(u32, Table)>,
    intervals: MomentumIntervals,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl MomentumSpace {
    pub fn new(obs: Arc<Observables>) -> Result<Self> {
        let q = obs.q();
        let m = TABLE_POINTS;
        let tq = q.tanh();
        let right_lams: Vec<f64> = linspace(tq, U_EDGE, m).into_iter().map(f64::atanh).collect();
        let left_lams: Vec<f64> = right_lams.iter().map(|l| -l).collect();
        let top_lams: Vec<f64> = linspace(-U_EDGE, U_EDGE, m).into_iter().map(f64::atanh).collect();
        let hole_lams = linspace(-q, q, m);
        let ev = |seg: Segment| {
            let o = Arc::clone(&obs);
            move |l: f64| hat_p1_raw(&o, Rapidity::on(seg.branch(), l), seg)
        };
        let hole = Table::build(Branch::Real, &hole_lams, -q, q, ev(Segment::Hole))?;
        let right = Table::build(Branch::Real, &right_lams, q, LAMBDA_CAP, ev(Segment::ParticleRight))?;
        let top = Table::build(Branch::Shifted, &top_lams, LAMBDA_CAP, -LAMBDA_CAP, ev(Segment::ParticleTop))?;
        let left = Table::build(Branch::Real, &left_lams, -LAMBDA_CAP, -q, ev(Segment::ParticleLeft))?;
        let mut strings = Vec::new();
        let mut string_ranges = Vec::new();
        for s in obs.params().strings.clone() {
            let lams: Vec<f64> = linspace(-U_EDGE, U_EDGE, m).into_iter().map(f64::atanh).collect();
            let o = Arc::clone(&obs);
            let br = s.branch();
            let f = move |l: f64| -> Result<(f64, f64)> {
                let (p, d, _) = o.momentum_derivs(s.r, Rapidity::on(br, l))?;
                Ok((p, d))
            };
            let slope = f(0.0)?.1;
            if slope == 0.0 {
                return Err(Error::numerical(format!("p_{}' vanishes at the origin", s.r)));
            }
            let (below, above) = if slope > 0.0 { (-LAMBDA_CAP, LAMBDA_CAP) } else { (LAMBDA_CAP, -LAMBDA_CAP) };
            let t = Table::build(br, &lams, below, above, &f)?;
            string_ranges.push((s.r, t.k_min, t.k_max));
            strings.push((s.r, t));
        }
        let p_f = obs.p_f();
        let intervals = MomentumIntervals {
            hole: (-p_f, p_f),
            particle: (p_f, 2.0 * PI - p_f - 2.0 * p_f * obs.sign()),
            right_top: right.k_max,
            top_left: top.k_max,
            strings: string_ranges,
        };
        Ok(MomentumSpace { obs, hole, right, top, left, strings, intervals })
    }

    pub fn observables(&self) -> &Observables {
        &self.obs
    }

    pub fn shared_observables(&self) -> Arc<Observables> {
        Arc::clone(&self.obs)
    }

    pub fn intervals(&self) -> &MomentumIntervals {
        &self.intervals
    }

    /// Period `2π − 2p_F·sgn(π−2ζ)` of `v₁`.
    pub fn period(&self) -> f64 {
        2.0 * PI - 2.0 * self.obs.p_f() * self.obs.sign()
    }

    /// `p̂₁(λ)` after checking that λ lies in the segment.
    pub fn hat_p1(&self, lambda: Rapidity, segment: Segment) -> Result<f64> {
        let q = self.obs.q();
        let tol = 1e-12 * (1.0 + q);
        let ok = lambda.branch == segment.branch()
            && match segment {
                Segment::Hole => lambda.re.abs() <= q + tol,
                Segment::ParticleRight => lambda.re >= q - tol,
                Segment::ParticleTop => true,
                Segment::ParticleLeft => lambda.re <= -q + tol,
            };
        if !ok {
            return Err(Error::domain(format!("λ = {:?} is not on segment {segment:?}", lambda)));
        }
        Ok(hat_p1_raw(&self.obs, lambda, segment)?.0)
    }

    fn segment_of(&self, k: f64) -> Result<Segment> {
        let p_f = self.obs.p_f();
        let (lo, hi) = (-p_f, self.intervals.particle.1);
        let slack = 1e-12;
        if !(k >= lo - slack && k <= hi + slack) {
            return Err(Error::domain(format!("momentum {k} outside [{lo}, {hi}]")));
        }
        Ok(if k <= p_f {
            Segment::Hole
        } else if k <= self.intervals.right_top {
            Segment::ParticleRight
        } else if k <= self.intervals.top_left {
            Segment::ParticleTop
        } else {
            Segment::ParticleLeft
        })
    }

    /// Inverse of `p̂₁` on `[−p_F, p₊^(1)]`; `±p_F` map exactly to `±q`.
    pub fn hat_p1_inverse(&self, k: f64) -> Result<(Rapidity, Segment)> {
        let seg = self.segment_of(k)?;
        let p_f = self.obs.p_f();
        if k == p_f {
            return Ok((Rapidity::real(self.obs.q()), Segment::Hole));
        }
        if k == -p_f {
            return Ok((Rapidity::real(-self.obs.q()), Segment::Hole));
        }
        let table = match seg {
            Segment::Hole => &self.hole,
            Segment::ParticleRight => &self.right,
            Segment::ParticleTop => &self.top,
            Segment::ParticleLeft => &self.left,
        };
        let lam = table.invert(k, |l| hat_p1_raw(&self.obs, Rapidity::on(seg.branch(), l), seg))?;
        Ok((Rapidity::on(table.branch, lam), seg))
    }

    /// Inverse of `p_r` on `ℐ_r`; `r = 1` defers to `p̂₁`.
    pub fn inverse(&self, r: u32, k: f64) -> Result<(Rapidity, Option<Segment>)> {
        if r == 1 {
            let (l, s) = self.hat_p1_inverse(k)?;
            return Ok((l, Some(s)));
        }
        let (_, table) = self
            .strings
            .iter()
            .find(|(rr, _)| *rr == r)
            .ok_or_else(|| Error::config(format!("string length r = {r} is not enabled")))?;
        let (lo, hi) = (table.k_min, table.k_max);
        if !(k >= lo - 1e-12 && k <= hi + 1e-12) {
            return Err(Error::domain(format!("momentum {k} outside ℐ_{r} = [{lo}, {hi}]")));
        }
        let lam = table.invert(k, |l| {
            let (p, d, _) = self.obs.momentum_derivs(r, Rapidity::on(table.branch, l))?;
            Ok((p, d))
        })?;
        Ok((Rapidity::on(table.branch, lam), None))
    }

    /// Energy, velocity and velocity slope at momentum `k`.
    pub fn state(&self, r: u32, k: f64) -> Result<State> {
        let (lambda, segment) = self.inverse(r, k)?;
        let (e, e1, e2) = self.obs.energy_derivs(r, lambda)?;
        let (_, p1, p2) = self.obs.momentum_derivs(r, lambda)?;
        Ok(State {
            k,
            lambda,
            segment,
            energy: e,
            velocity: e1 / p1,
            velocity_slope: (e2 * p1 - e1 * p2) / (p1 * p1 * p1),
        })
    }

    /// `𝔢_r(k)`.
    pub fn energy(&self, r: u32, k: f64) -> Result<f64> {
        Ok(self.state(r, k)?.energy)
    }

    /// `𝔳_r(k)`.
    pub fn velocity(&self, r: u32, k: f64) -> Result<f64> {
        Ok(self.state(r, k)?.velocity)
    }

    /// `𝔳_r'(k)`.
    pub fn velocity_slope(&self, r: u32, k: f64) -> Result<f64> {
        Ok(self.state(r, k)?.velocity_slope)
    }

    /// `𝔳₁` extended periodically to the whole line.
    pub fn velocity_periodic(&self, k: f64) -> Result<f64> {
        let lo = -self.obs.p_f();
        let per = self.period();
        let kk = lo + (k - lo).rem_euclid(per);
        self.velocity(1, kk)
    }

    /// `φ_r(s, k) = φ_r(p̂₁⁻¹(s), p̂_r⁻¹(k))`; `s` must map to a real rapidity.
    pub fn phase(&self, r: u32, s: f64, k: f64) -> Result<f64> {
        let (lam, _) = self.hat_p1_inverse(s)?;
        if lam.branch.is_shifted() {
            return Err(Error::domain("dressed phase needs a real first rapidity"));
        }
        let (mu, _) = self.inverse(r, k)?;
        self.obs.dressed_phase(r, lam.re, mu)
    }

    /// `𝒵(s) = Z(p̂₁⁻¹(s))` for `s` mapping to a real rapidity.
    pub fn charge(&self, s: f64) -> Result<f64> {
        let (lam, _) = self.hat_p1_inverse(s)?;
        if lam.branch.is_shifted() {
            return Err(Error::domain("dressed charge evaluated on real rapidities only"));
        }
        self.obs.charge(lam.re)
    }
}

/// `(p̂₁(λ), dp̂₁/dλ)` on a segment, no domain check.
fn hat_p1_raw(obs: &Observables, lambda: Rapidity, segment: Segment) -> Result<(f64, f64)> {
    let (p, d, _) = obs.momentum_derivs(1, lambda)?;
    let shift = match segment {
        Segment::Hole | Segment::ParticleRight => 0.0,
        Segment::ParticleTop => 2.0 * PI,
        Segment::ParticleLeft => 2.0 * PI - 2.0 * obs.p_f() * obs.sign(),
    };
    Ok((p + shift, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{FieldSpec, ModelParams, StringSpec};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn space(delta: f64, d: f64, n: usize) -> MomentumSpace {
        let p = ModelParams::from_delta(1.0, delta, FieldSpec::Density(d), n).unwrap();
        MomentumSpace::new(Arc::new(Observables::solve(&p).unwrap())).unwrap()
    }

    #[test]
    fn free_fermion_dispersion() {
        let p = ModelParams { j: 1.0, zeta: FRAC_PI_2, field: FieldSpec::Field(2.0), n: 48, strings: vec![] };
        let m = MomentumSpace::new(Arc::new(Observables::solve(&p).unwrap())).unwrap();
        assert!((m.intervals().particle.1 - (2.0 * PI - FRAC_PI_3)).abs() < 1e-12);
        for i in 0..=100 {
            let k = -FRAC_PI_3 + (2.0 * PI) * i as f64 / 100.0;
            let k = k.min(m.intervals().particle.1);
            let st = m.state(1, k).unwrap();
            assert!((st.energy - (2.0 - 4.0 * k.cos())).abs() < 1e-9, "{k}");
            assert!((st.velocity - 4.0 * k.sin()).abs() < 1e-8, "{k}");
            if st.segment == Some(Segment::Hole) {
                let want = (2.0 * st.lambda.re).sinh().atan();
                assert!((k - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn junctions_and_monotonicity() {
        for (delta, d) in [(0.57, 0.21), (-0.6, 0.3)] {
            let m = space(delta, d, 64);
            let o = m.observables();
            let iv = m.intervals().clone();
            let zeta = o.zeta();
            let p_inf = PI - zeta - o.p_f() + 2.0 * o.p_f() * zeta / PI;
            assert!((iv.right_top - p_inf).abs() < 1e-10);
            assert!((iv.top_left - (m.period() - p_inf)).abs() < 1e-10);
            assert!((m.hat_p1(Rapidity::real(o.q()), Segment::Hole).unwrap() - o.p_f()).abs() < 1e-14);
            let mut last = f64::NEG_INFINITY;
            for t in [&m.hole, &m.right, &m.top, &m.left] {
                for &k in &t.k {
                    assert!(k >= last - 1e-15);
                    last = k;
                }
            }
            assert!((last - iv.particle.1).abs() < 1e-12);
            // energy continuity across the junctions
            for kj in [iv.right_top, iv.top_left] {
                let a = m.energy(1, kj - 1e-10).unwrap();
                let b = m.energy(1, kj + 1e-10).unwrap();
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn round_trip_200_momenta() {
        let m = space(0.57, 0.21, 64);
        let (lo, hi) = (m.intervals().hole.0, m.intervals().particle.1);
        for i in 0..200 {
            let k = lo + (hi - lo) * (i as f64 + 0.5) / 200.0;
            let (l, s) = m.hat_p1_inverse(k).unwrap();
            assert!((m.hat_p1(l, s).unwrap() - k).abs() < 1e-12, "{k}");
        }
        assert!(m.hat_p1_inverse(hi + 0.1).is_err());
        assert!(m.hat_p1(Rapidity::real(0.0), Segment::ParticleRight).is_err());
    }

    #[test]
    fn velocity_reflection_and_fermi_zone() {
        let m = space(0.57, 0.21, 64);
        let o = m.observables();
        let per = m.period();
        assert!((m.velocity(1, o.p_f()).unwrap() - o.v_f()).abs() < 1e-12);
        assert!(m.energy(1, o.p_f()).unwrap().abs() < 1e-12);
        assert!(m.energy(1, -o.p_f()).unwrap().abs() < 1e-12);
        for i in 1..100 {
            let k = -o.p_f() + (per) * i as f64 / 100.0;
            let a = m.velocity_periodic(k).unwrap();
            let b = m.velocity_periodic(per - k).unwrap();
            assert!((a + b).abs() < 1e-9, "{k}");
            if k < o.p_f() {
                assert!(a.abs() < o.v_f());
            }
        }
    }

    #[test]
    fn phase_and_charge_in_momentum() {
        let m = space(0.57, 0.21, 64);
        let o = m.observables();
        let pf = o.p_f();
        let a = m.phase(1, pf, pf).unwrap();
        let b = o.dressed_phase(1, o.q(), Rapidity::real(o.q())).unwrap();
        assert_eq!(a, b);
        assert_eq!(m.charge(pf).unwrap(), o.charge(o.q()).unwrap());
    }

    #[test]
    fn string_momenta_invert() {
        let p = ModelParams::from_delta(1.0, 0.5, FieldSpec::Density(0.2), 48)
            .unwrap()
            .with_strings(vec![StringSpec { r: 2, parity: 0 }])
            .unwrap();
        let m = MomentumSpace::new(Arc::new(Observables::solve(&p).unwrap())).unwrap();
        let (_, lo, hi) = m.intervals().strings[0];
        assert!(hi > lo);
        for i in 1..50 {
            let k = lo + (hi - lo) * i as f64 / 50.0;
            let (l, _) = m.inverse(2, k).unwrap();
            let back = m.observables().momentum(2, l).unwrap();
            assert!((back - k).abs() < 1e-11);
            assert!(m.energy(2, k).unwrap() > 0.0);
        }
        assert!(m.inverse(3, 0.0).is_err());
    }
}
