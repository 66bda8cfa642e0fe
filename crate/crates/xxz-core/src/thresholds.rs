//! Threshold curves `(𝒫₀, ℰ₀)`, their edge exponents, universal amplitudes
//! (form factor set to one) and side weights.

use crate::excitations::ExcitationConfig;
use crate::kernels::{barnes_g, gamma, rgamma};
use crate::momentum::MomentumSpace;
use crate::velocity::VelocityAtlas;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

/// Distance to a Γ pole below which a sample is flagged degenerate.
pub const POLE_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ThresholdKind {
    OneHole {
        ell_plus: i32,
        ell_minus: i32,
    },
    /// Branches 1, 3 carry `(ℓ₊, ℓ₋) = (−1, 0)`, branches 2, 4 carry `(0, −1)`;
    /// 1, 2 live on `(p_F, K_m)` and 3, 4 on `(K_M, p₊)`.
    OneParticle {
        branch: u8,
    },
    OneString {
        r: u32,
        ell_plus: i32,
        ell_minus: i32,
    },
    ParticleHole {
        ell_plus: i32,
        ell_minus: i32,
    },
    ParticleTwoHoles {
        ell_plus: i32,
        ell_minus: i32,
    },
    Multi {
        n_p: u32,
        n_h: u32,
        ell_plus: i32,
        ell_minus: i32,
    },
    MultiString {
        r: u32,
        n_st: u32,
        n_h: u32,
        ell_plus: i32,
        ell_minus: i32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// A Γ factor sits within `POLE_GUARD` of a pole.
    Degenerate,
    /// Some `δ_υ ≤ 0`.
    NonPositiveDelta,
    /// `𝒫'(t₀)` vanishes.
    NotDiffeomorphism,
    /// Derivative data taken at the clamped window edge.
    Clamped,
}

impl Flag {
    fn name(self) -> &'static str {
        match self {
            Flag::Degenerate => "degenerate",
            Flag::NonPositiveDelta => "nonpositive_delta",
            Flag::NotDiffeomorphism => "not_diffeomorphism",
            Flag::Clamped => "clamped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSample {
    pub kind: ThresholdKind,
    /// `k₀` or `t₀`.
    pub param: f64,
    pub p0: f64,
    pub e0: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub exponent: f64,
    pub amplitude_universal: f64,
    /// Coefficients of `Ξ(δω)` and `Ξ(−δω)`.
    pub side_weights: (f64, f64),
    pub flags: Vec<Flag>,
}

impl ThresholdSample {
    /// `𝒫₀` reduced to `[0, 2π)`.
    pub fn k(&self) -> f64 {
        self.p0.rem_euclid(TAU)
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.iter().any(|f| matches!(f, Flag::Degenerate | Flag::NonPositiveDelta))
    }

    /// Mirror image about `k = π`.
    pub fn reflected(&self) -> ThresholdSample {
        ThresholdSample { p0: TAU - self.k(), ..self.clone() }
    }

    pub fn csv_row(&self, name: &str) -> String {
        let flags: Vec<&str> = self.flags.iter().map(|f| f.name()).collect();
        format!(
            "{name},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.param,
            self.k(),
            self.e0,
            self.delta_plus,
            self.delta_minus,
            self.exponent,
            self.amplitude_universal,
            self.side_weights.0,
            self.side_weights.1,
            flags.join("|")
        )
    }
}

pub const CSV_HEADER: &str = "kind,param,k,omega,delta_plus,delta_minus,exponent,amp_universal,w_plus,w_minus,flags";

fn umklapp_branch(branch: u8) -> (i32, i32) {
    if branch % 2 == 1 {
        (-1, 0)
    } else {
        (0, -1)
    }
}

impl ThresholdKind {
    pub fn label(&self) -> String {
        match *self {
            ThresholdKind::OneHole { ell_plus, ell_minus } => format!("one_hole({ell_plus},{ell_minus})"),
            ThresholdKind::OneParticle { branch } => format!("one_particle({branch})"),
            ThresholdKind::OneString { r, ell_plus, ell_minus } => format!("one_string({r};{ell_plus},{ell_minus})"),
            ThresholdKind::ParticleHole { ell_plus, ell_minus } => format!("particle_hole({ell_plus},{ell_minus})"),
            ThresholdKind::ParticleTwoHoles { ell_plus, ell_minus } => {
                format!("particle_two_holes({ell_plus},{ell_minus})")
            }
            ThresholdKind::Multi { n_p, n_h, ell_plus, ell_minus } => {
                format!("multi({n_p},{n_h};{ell_plus},{ell_minus})")
            }
            ThresholdKind::MultiString { r, n_st, n_h, ell_plus, ell_minus } => {
                format!("multi_string({r};{n_st},{n_h};{ell_plus},{ell_minus})")
            }
        }
    }

    /// Umklapp pair and the counts `(n_h, r, n_r)`.
    fn content(&self) -> ((i32, i32), u32, u32, u32) {
        match *self {
            ThresholdKind::OneHole { ell_plus, ell_minus } => ((ell_plus, ell_minus), 1, 1, 0),
            ThresholdKind::OneParticle { branch } => (umklapp_branch(branch), 0, 1, 1),
            ThresholdKind::OneString { r, ell_plus, ell_minus } => ((ell_plus, ell_minus), 0, r, 1),
            ThresholdKind::ParticleHole { ell_plus, ell_minus } => ((ell_plus, ell_minus), 1, 1, 1),
            ThresholdKind::ParticleTwoHoles { ell_plus, ell_minus } => ((ell_plus, ell_minus), 2, 1, 1),
            ThresholdKind::Multi { n_p, n_h, ell_plus, ell_minus } => ((ell_plus, ell_minus), n_h, 1, n_p),
            ThresholdKind::MultiString { r, n_st, n_h, ell_plus, ell_minus } => ((ell_plus, ell_minus), n_h, r, n_st),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ((lp, lm), n_h, r, n_r) = self.content();
        if let ThresholdKind::OneParticle { branch } = *self {
            if !(1..=4).contains(&branch) {
                return Err(Error::config(format!("particle branch must be 1..4, got {branch}")));
            }
        }
        match *self {
            ThresholdKind::Multi { n_p, n_h, .. } if n_h < 1 || n_p + n_h < 2 => {
                return Err(Error::config("multi thresholds need n_h ≥ 1 and n_p + n_h ≥ 2"));
            }
            ThresholdKind::MultiString { r, n_st, n_h, .. } if n_h < 1 || n_st + n_h < 2 || r < 2 => {
                return Err(Error::config("multi string thresholds need r ≥ 2, n_h ≥ 1 and n_st + n_h ≥ 2"));
            }
            ThresholdKind::OneString { r, .. } if r < 2 => {
                return Err(Error::config("one_string needs r ≥ 2; use one_particle for r = 1"));
            }
            _ => {}
        }
        let count = lp as i64 + lm as i64 + (r * n_r) as i64;
        if count != n_h as i64 {
            return Err(Error::config(format!("{}: Umklapp integers violate n_h = Σ r·n_r + ℓ₊ + ℓ₋", self.label())));
        }
        Ok(())
    }

    /// Open parameter interval of the curve.
    pub fn domain(&self, atlas: &VelocityAtlas) -> Result<(f64, f64)> {
        self.validate()?;
        let space = atlas.space();
        let p_f = space.observables().p_f();
        Ok(match *self {
            ThresholdKind::OneHole { .. } | ThresholdKind::Multi { .. } | ThresholdKind::MultiString { .. } => {
                (-p_f, p_f)
            }
            ThresholdKind::OneParticle { branch } if branch <= 2 => (p_f, atlas.k_m()),
            ThresholdKind::OneParticle { .. } => (atlas.k_big_m(), space.intervals().particle.1),
            ThresholdKind::OneString { r, .. } => {
                let iv = space
                    .intervals()
                    .strings
                    .iter()
                    .find(|s| s.0 == r)
                    .ok_or_else(|| Error::config(format!("string length r = {r} is not enabled")))?;
                (iv.1, iv.2)
            }
            ThresholdKind::ParticleHole { .. } | ThresholdKind::ParticleTwoHoles { .. } => {
                (atlas.k_m(), atlas.k_big_m())
            }
        })
    }

    /// `𝐊₀` at the curve parameter.
    pub fn configuration(&self, param: f64, atlas: &VelocityAtlas) -> Result<ExcitationConfig> {
        let ((ell_plus, ell_minus), n_h, r, n_r) = self.content();
        let (holes, k) = match *self {
            ThresholdKind::OneHole { .. } => (vec![param], None),
            ThresholdKind::OneParticle { .. } | ThresholdKind::OneString { .. } => (vec![], Some(param)),
            ThresholdKind::ParticleHole { .. } | ThresholdKind::ParticleTwoHoles { .. } => {
                (vec![atlas.t(param)?; n_h as usize], Some(param))
            }
            ThresholdKind::Multi { n_p, .. } => {
                let k = if n_p > 0 { Some(atlas.p(param)?) } else { None };
                (vec![param; n_h as usize], k)
            }
            ThresholdKind::MultiString { r, .. } => (vec![param; n_h as usize], Some(atlas.h(r, param)?)),
        };
        let mut strings = BTreeMap::new();
        if let Some(k) = k {
            strings.insert(r, vec![k; n_r as usize]);
        }
        Ok(ExcitationConfig { ell_plus, ell_minus, holes, strings, spin: 0 })
    }
}

/// `n` points across `(lo, hi)`, inset by `1e−9` of the width.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let inset = 1e-9 * (hi - lo);
    let (a, b) = (lo + inset, hi - inset);
    match n {
        0 => vec![],
        1 => vec![0.5 * (a + b)],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn near_pole(x: f64) -> bool {
    x <= POLE_GUARD && (x - x.round()).abs() < POLE_GUARD
}

struct Pieces {
    flags: Vec<Flag>,
}

impl Pieces {
    fn gamma(&mut self, x: f64) -> f64 {
        if near_pole(x) {
            self.flags.push(Flag::Degenerate);
        }
        gamma(x)
    }
}

fn denominators(v_f: f64, v: f64, dp: f64, dm: f64) -> f64 {
    (v_f + v).abs().powf(dm) * (v_f - v).abs().powf(dp)
}

/// Evaluates one point of a threshold curve.
pub fn threshold_sample(kind: ThresholdKind, param: f64, atlas: &VelocityAtlas) -> Result<ThresholdSample> {
    kind.validate()?;
    let space = atlas.space();
    let o = space.observables();
    let v_f = o.v_f();
    let cfg = kind.configuration(param, atlas)?;
    let p0 = cfg.momentum(space)?;
    let e0 = cfg.energy(space)?;
    let (dp, dm) = cfg.edge_exponents(space)?;
    let sum = dp + dm;
    let mut pc = Pieces { flags: Vec::new() };
    if dp <= 1e-12 || dm <= 1e-12 {
        pc.flags.push(Flag::NonPositiveDelta);
    }
    let two_pi = TAU;
    let (exponent, amplitude, weights) = match kind {
        ThresholdKind::OneHole { .. } => {
            let v = space.velocity(1, param)?;
            if sum <= POLE_GUARD {
                pc.flags.push(Flag::Degenerate);
            }
            let a = two_pi * two_pi * rgamma(sum) / denominators(v_f, v, dp, dm);
            (sum - 1.0, a, (1.0, 0.0))
        }
        ThresholdKind::OneParticle { .. } | ThresholdKind::OneString { .. } => {
            let r = if let ThresholdKind::OneString { r, .. } = kind { r } else { 1 };
            let v = space.velocity(r, param)?;
            if v.abs() > v_f {
                let eta = -v.signum();
                let (d_eta, d_other) = if eta > 0.0 { (dp, dm) } else { (dm, dp) };
                let a = two_pi * two_pi * pc.gamma(1.0 - sum) / denominators(v_f, v, dp, dm);
                (sum - 1.0, a, ((PI * d_eta).sin() / PI, (PI * d_other).sin() / PI))
            } else {
                if sum <= POLE_GUARD {
                    pc.flags.push(Flag::Degenerate);
                }
                let a = two_pi * two_pi * rgamma(sum) / denominators(v_f, v, dp, dm);
                (sum - 1.0, a, (1.0, 0.0))
            }
        }
        ThresholdKind::ParticleHole { .. } | ThresholdKind::ParticleTwoHoles { .. } => {
            let (kc, clamped) = atlas.clamp_window(param);
            if clamped {
                pc.flags.push(Flag::Clamped);
            }
            let tp = atlas.t_prime(kc)?;
            let v1p_t = space.velocity_slope(1, atlas.t(kc)?)?;
            let v = space.velocity(1, param)?;
            let den = denominators(v_f, v, dp, dm);
            if let ThresholdKind::ParticleHole { .. } = kind {
                let delta = sum - 0.5;
                let a = two_pi * two_pi / (1.0 - tp).sqrt() * (two_pi / v1p_t).sqrt() * pc.gamma(-delta) / den;
                (delta, a, ((PI * delta).cos() / PI, 1.0 / PI))
            } else {
                let delta = sum + 1.0;
                let a = -two_pi.powi(3) / (1.0 - 2.0 * tp).sqrt() * v1p_t.powi(-2) * pc.gamma(-delta) / den;
                (delta, a, ((PI * delta).sin() / PI, 0.0))
            }
        }
        ThresholdKind::Multi { n_p, n_h, .. } => {
            let (np, nh) = (n_p as f64, n_h as f64);
            let v1p_t = space.velocity_slope(1, param)?;
            let (p_prime, particle_factor) = if n_p > 0 {
                let k = atlas.p(param)?;
                let v1p_k = space.velocity_slope(1, k)?;
                (v1p_t / v1p_k, (-1.0 / v1p_k).powf(0.5 * np * np))
            } else {
                (0.0, 1.0)
            };
            let big_p = np * p_prime - nh;
            if big_p.abs() < 1e-10 {
                pc.flags.push(Flag::NotDiffeomorphism);
            }
            let theta = sum + 0.5 * (np * np + nh * nh - 3.0);
            let v = space.velocity(1, param)?;
            let a = big_p.abs().powf(-0.5)
                * particle_factor
                * (1.0 / v1p_t).powf(0.5 * (nh * nh - 1.0))
                * barnes_g::<f64>(n_p + 1)?
                * barnes_g::<f64>(n_h + 1)?
                * two_pi.powf(0.5 * (3.0 + np + nh))
                * pc.gamma(-theta)
                / denominators(v_f, v, dp, dm);
            let w = ((PI * sum).sin() / PI, (0.5 * PI * (np * np + nh * nh - 1.0)).sin() / PI);
            (theta, a, w)
        }
        ThresholdKind::MultiString { r, n_st, n_h, .. } => {
            let (ns, nh) = (n_st as f64, n_h as f64);
            let k = atlas.h(r, param)?;
            let vrp = space.velocity_slope(r, k)?;
            let h_prime = space.velocity_slope(1, param)? / vrp;
            let big_p = ns * h_prime - nh;
            if big_p.abs() < 1e-10 {
                pc.flags.push(Flag::NotDiffeomorphism);
            }
            let sigma = vrp.signum();
            let s_r = -big_p.signum();
            let theta = sum + 0.5 * (ns * ns + nh * nh - 3.0);
            let minus_sigma = if sigma < 0.0 { 1.0 } else { 0.0 };
            let nu_plus = sum + 0.5 * minus_sigma * ns * ns - 0.5 * (1.0 - s_r);
            let nu_minus = 0.5 * (1.0 - minus_sigma) * ns * ns + 0.5 * nh * nh + 0.5 * (1.0 - s_r);
            let v = space.velocity(1, param)?;
            let a = big_p.abs().powf(-0.5)
                * vrp.abs().powf(-0.5 * ns * ns)
                * (1.0 / space.velocity_slope(1, param)?).powf(0.5 * (nh * nh - 1.0))
                * barnes_g::<f64>(n_st + 1)?
                * barnes_g::<f64>(n_h + 1)?
                * two_pi.powf(0.5 * (3.0 + ns + nh))
                * pc.gamma(-theta)
                / denominators(v_f, v, dp, dm);
            (theta, a, ((PI * nu_plus).sin() / PI, (PI * nu_minus).sin() / PI))
        }
    };
    let mut flags = pc.flags;
    flags.sort();
    flags.dedup();
    Ok(ThresholdSample {
        kind,
        param,
        p0,
        e0,
        delta_plus: dp,
        delta_minus: dm,
        exponent,
        amplitude_universal: amplitude,
        side_weights: weights,
        flags,
    })
}

/// Samples a curve on `grid`, in parallel; output order follows `grid`.
pub fn threshold_curve(kind: ThresholdKind, grid: &[f64], atlas: &VelocityAtlas) -> Result<Vec<ThresholdSample>> {
    kind.validate()?;
    grid.par_iter().map(|&x| threshold_sample(kind, x, atlas)).collect()
}

/// Curve-specific closed forms `(δ₊, δ₋)` for the hole, particle, ph and p2h families.
pub fn closed_form_deltas(kind: ThresholdKind, param: f64, atlas: &VelocityAtlas) -> Result<(f64, f64)> {
    let space: &MomentumSpace = atlas.space();
    let o = space.observables();
    let pf = o.p_f();
    let phi = |s: f64, k: f64| space.phase(1, s, k);
    let left_tail = |k: f64| -> Result<f64> {
        if k > space.intervals().top_left {
            Ok(o.sign() * space.charge(pf)?)
        } else {
            Ok(0.0)
        }
    };
    let (tp, tm) = match kind {
        ThresholdKind::OneHole { ell_plus: 1, ell_minus: 0 } => {
            (phi(pf, param)? - phi(pf, pf)? - 1.0, phi(-pf, param)? - phi(-pf, pf)?)
        }
        ThresholdKind::OneParticle { branch } if branch == 1 || branch == 3 => {
            let c = left_tail(param)?;
            (1.0 - phi(pf, param)? + phi(pf, pf)? + c, phi(-pf, pf)? - phi(-pf, param)? + c)
        }
        ThresholdKind::OneParticle { branch } if branch == 2 || branch == 4 => {
            let c = left_tail(param)?;
            (phi(pf, -pf)? - phi(pf, param)? + c, -1.0 + phi(-pf, -pf)? - phi(-pf, param)? + c)
        }
        ThresholdKind::ParticleHole { ell_plus: 0, ell_minus: 0 } => {
            let t = atlas.t(param)?;
            (phi(pf, t)? - phi(pf, param)?, phi(-pf, t)? - phi(-pf, param)?)
        }
        ThresholdKind::ParticleTwoHoles { ell_plus: 1, ell_minus: 0 } => {
            let t = atlas.t(param)?;
            (
                -1.0 + 2.0 * phi(pf, t)? - phi(pf, param)? - phi(pf, pf)?,
                2.0 * phi(-pf, t)? - phi(-pf, param)? - phi(-pf, pf)?,
            )
        }
        _ => return Err(Error::domain(format!("no closed form for {}", kind.label()))),
    };
    Ok((tp * tp, tm * tm))
}

/// Predicted singular part `𝒜 |δω|^μ {w₊Ξ(δω) + w₋Ξ(−δω)}`.
pub fn singular_profile(sample: &ThresholdSample, d_omega: &[f64]) -> Result<Vec<f64>> {
    if sample.is_degenerate() {
        return Err(Error::domain(format!("degenerate sample of {}", sample.kind.label())));
    }
    let (wp, wm) = sample.side_weights;
    let mu = sample.exponent;
    Ok(d_omega
        .iter()
        .map(|&x| {
            if x == 0.0 {
                if mu > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                let w = if x > 0.0 { wp } else { wm };
                if w == 0.0 {
                    0.0
                } else {
                    sample.amplitude_universal * x.abs().powf(mu) * w
                }
            }
        })
        .collect())
}

/// One named curve of the two-particle picture.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedCurve {
    pub name: String,
    pub kind: ThresholdKind,
    pub reflected: bool,
    pub samples: Vec<ThresholdSample>,
}

/// The curve families of the sector with at most two holes and two particles.
pub fn sector_kinds() -> Vec<(&'static str, ThresholdKind)> {
    vec![
        ("C_h1", ThresholdKind::OneHole { ell_plus: 1, ell_minus: 0 }),
        ("C_h2", ThresholdKind::OneHole { ell_plus: 0, ell_minus: 1 }),
        ("C_p1", ThresholdKind::OneParticle { branch: 1 }),
        ("C_p2", ThresholdKind::OneParticle { branch: 2 }),
        ("C_p3", ThresholdKind::OneParticle { branch: 3 }),
        ("C_p4", ThresholdKind::OneParticle { branch: 4 }),
        ("C_ph1", ThresholdKind::ParticleHole { ell_plus: 0, ell_minus: 0 }),
        ("C_ph2", ThresholdKind::ParticleHole { ell_plus: 1, ell_minus: -1 }),
        ("C_p2h", ThresholdKind::ParticleTwoHoles { ell_plus: 1, ell_minus: 0 }),
    ]
}

/// All curves on `points` parameters each, plus their mirror images about `k = π`.
pub fn curve_dataset(atlas: &VelocityAtlas, points: usize) -> Result<Vec<NamedCurve>> {
    let mut out = Vec::new();
    for (name, kind) in sector_kinds() {
        let (lo, hi) = kind.domain(atlas)?;
        let samples = threshold_curve(kind, &interior_grid(lo, hi, points), atlas)?;
        let mirror = samples.iter().map(ThresholdSample::reflected).collect();
        out.push(NamedCurve { name: name.to_string(), kind, reflected: false, samples });
        out.push(NamedCurve { name: format!("{name}_refl"), kind, reflected: true, samples: mirror });
    }
    Ok(out)
}

pub fn dataset_csv(curves: &[NamedCurve]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in curves {
        for p in &c.samples {
            s.push_str(&p.csv_row(&c.name));
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{FieldSpec, ModelParams, Observables};
    use std::f64::consts::FRAC_PI_2;
    use std::sync::Arc;

    fn atlas(p: ModelParams) -> VelocityAtlas {
        let o = Arc::new(Observables::solve(&p).unwrap());
        VelocityAtlas::build(Arc::new(MomentumSpace::new(o).unwrap())).unwrap()
    }

    fn interacting() -> VelocityAtlas {
        atlas(ModelParams::from_delta(1.0, 0.57, FieldSpec::Density(0.21), 64).unwrap())
    }

    #[test]
    fn free_fermion_hole_curve() {
        let a = atlas(ModelParams { j: 1.0, zeta: FRAC_PI_2, field: FieldSpec::Field(2.0), n: 32, strings: vec![] });
        let kind = ThresholdKind::OneHole { ell_plus: 1, ell_minus: 0 };
        let (lo, hi) = kind.domain(&a).unwrap();
        let pf = a.space().observables().p_f();
        for s in threshold_curve(kind, &interior_grid(lo, hi, 9), &a).unwrap() {
            assert!((s.e0 - (4.0 * s.param.cos() - 2.0)).abs() < 1e-9);
            assert!((s.p0 - (pf - s.param)).abs() < 1e-14);
            assert!(s.flags.contains(&Flag::NonPositiveDelta));
            assert_eq!(s.side_weights.1, 0.0);
        }
    }

    #[test]
    fn counting_constraint_enforced() {
        assert!(ThresholdKind::OneHole { ell_plus: 1, ell_minus: 1 }.validate().is_err());
        assert!(ThresholdKind::OneParticle { branch: 5 }.validate().is_err());
        assert!(ThresholdKind::Multi { n_p: 2, n_h: 0, ell_plus: -2, ell_minus: 0 }.validate().is_err());
        assert!(ThresholdKind::Multi { n_p: 1, n_h: 2, ell_plus: 1, ell_minus: 0 }.validate().is_ok());
    }

    #[test]
    fn hole_endpoint_and_closed_forms() {
        let a = interacting();
        let pf = a.space().observables().p_f();
        let h = threshold_sample(ThresholdKind::OneHole { ell_plus: 1, ell_minus: 0 }, pf * (1.0 - 1e-12), &a).unwrap();
        assert!(h.e0.abs() < 1e-9 && h.p0.abs() < 1e-9);
        let kinds = [
            ThresholdKind::OneHole { ell_plus: 1, ell_minus: 0 },
            ThresholdKind::OneParticle { branch: 1 },
            ThresholdKind::OneParticle { branch: 4 },
            ThresholdKind::ParticleHole { ell_plus: 0, ell_minus: 0 },
            ThresholdKind::ParticleTwoHoles { ell_plus: 1, ell_minus: 0 },
        ];
        for kind in kinds {
            let (lo, hi) = kind.domain(&a).unwrap();
            for x in interior_grid(lo, hi, 5) {
                let s = threshold_sample(kind, x, &a).unwrap();
                let (cp, cm) = closed_form_deltas(kind, x, &a).unwrap();
                assert!((s.delta_plus - cp).abs() < 1e-10, "{}", kind.label());
                assert!((s.delta_minus - cm).abs() < 1e-10, "{}", kind.label());
            }
        }
    }

    #[test]
    fn multi_reduces_to_p2h() {
        let a = interacting();
        let k0 = 0.5 * (a.k_m() + a.k_big_m()) + 0.1;
        let p2h = threshold_sample(ThresholdKind::ParticleTwoHoles { ell_plus: 1, ell_minus: 0 }, k0, &a).unwrap();
        let t0 = a.t(k0).unwrap();
        let m = threshold_sample(ThresholdKind::Multi { n_p: 1, n_h: 2, ell_plus: 1, ell_minus: 0 }, t0, &a).unwrap();
        assert!((m.delta_plus - p2h.delta_plus).abs() < 1e-10);
        assert!((m.delta_minus - p2h.delta_minus).abs() < 1e-10);
        assert!((m.exponent - p2h.exponent).abs() < 1e-10);
        assert!((m.p0 - p2h.p0).abs() < 1e-9 && (m.e0 - p2h.e0).abs() < 1e-9);
    }

    #[test]
    fn profiles_and_sides() {
        let a = interacting();
        let ph = threshold_sample(
            ThresholdKind::ParticleHole { ell_plus: 0, ell_minus: 0 },
            0.5 * (a.k_m() + a.k_big_m()),
            &a,
        )
        .unwrap();
        let d = 1e-6;
        let pr = singular_profile(&ph, &[d, -d]).unwrap();
        assert!((pr[0] / pr[1] - (PI * ph.exponent).cos()).abs() < 1e-12);
        let h = threshold_sample(ThresholdKind::OneHole { ell_plus: 1, ell_minus: 0 }, 0.1, &a).unwrap();
        let ph_h = singular_profile(&h, &[-0.1, 0.0, 0.1]).unwrap();
        assert_eq!(ph_h[0], 0.0);
        assert!(ph_h[2] > 0.0);
        assert!(h.amplitude_universal > 0.0);
        let p2h = threshold_sample(
            ThresholdKind::ParticleTwoHoles { ell_plus: 1, ell_minus: 0 },
            0.5 * (a.k_m() + a.k_big_m()),
            &a,
        )
        .unwrap();
        assert_eq!(p2h.side_weights.1, 0.0);
    }
}
