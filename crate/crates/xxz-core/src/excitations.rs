//! Excitation content `𝐊`, its total momentum and energy, and the shift
//! function giving the edge exponents `Δ_± = ϑ_±²`.

use crate::momentum::{MomentumSpace, Segment};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExcitationConfig {
    /// Umklapp deficiencies `ℓ₊`, `ℓ₋`.
    pub ell_plus: i32,
    pub ell_minus: i32,
    /// Hole momenta in `[−p_F, p_F]`.
    #[serde(default)]
    pub holes: Vec<f64>,
    /// Momenta per string length; `r = 1` holds the particles.
    #[serde(default)]
    pub strings: BTreeMap<u32, Vec<f64>>,
    /// Operator spin `s_γ`.
    #[serde(default)]
    pub spin: i32,
}

/// `ϑ_±` and `Δ_± = ϑ_±²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shift {
    pub theta_plus: f64,
    pub theta_minus: f64,
}

impl Shift {
    pub fn delta_plus(&self) -> f64 {
        self.theta_plus * self.theta_plus
    }

    pub fn delta_minus(&self) -> f64 {
        self.theta_minus * self.theta_minus
    }
}

impl ExcitationConfig {
    pub fn hole(ell_plus: i32, ell_minus: i32, t: f64) -> Self {
        ExcitationConfig { ell_plus, ell_minus, holes: vec![t], ..Default::default() }
    }

    pub fn particle(ell_plus: i32, ell_minus: i32, k: f64) -> Self {
        let mut strings = BTreeMap::new();
        strings.insert(1, vec![k]);
        ExcitationConfig { ell_plus, ell_minus, strings, ..Default::default() }
    }

    pub fn n_holes(&self) -> usize {
        self.holes.len()
    }

    pub fn n_strings(&self, r: u32) -> usize {
        self.strings.get(&r).map_or(0, Vec::len)
    }

    /// Disjoint union; Umklapp integers and spins add.
    pub fn union(&self, other: &ExcitationConfig) -> ExcitationConfig {
        let mut strings = self.strings.clone();
        for (r, ks) in &other.strings {
            strings.entry(*r).or_default().extend(ks.iter().copied());
        }
        let mut holes = self.holes.clone();
        holes.extend(other.holes.iter().copied());
        ExcitationConfig {
            ell_plus: self.ell_plus + other.ell_plus,
            ell_minus: self.ell_minus + other.ell_minus,
            holes,
            strings,
            spin: self.spin + other.spin,
        }
    }

    /// Counting constraint `n_h = Σ r·n_r + ℓ₊ + ℓ₋` and momentum ranges.
    pub fn validate(&self, space: &MomentumSpace) -> Result<()> {
        let mut count: i64 = self.ell_plus as i64 + self.ell_minus as i64;
        for (r, ks) in &self.strings {
            count += *r as i64 * ks.len() as i64;
        }
        if count != self.holes.len() as i64 {
            return Err(Error::config(format!(
                "counting constraint violated: n_h = {} but Σ r·n_r + ℓ₊ + ℓ₋ = {count}",
                self.holes.len()
            )));
        }
        let p_f = space.observables().p_f();
        for &t in &self.holes {
            if !(t.abs() <= p_f + 1e-12) {
                return Err(Error::config(format!("hole momentum {t} outside [−p_F, p_F]")));
            }
        }
        for (&r, ks) in &self.strings {
            for &k in ks {
                space.inverse(r, k).map_err(|e| Error::config(format!("string momentum: {e}")))?;
                if r == 1 && k < p_f {
                    return Err(Error::config(format!("particle momentum {k} inside the Fermi zone")));
                }
            }
        }
        Ok(())
    }

    /// `𝒫(𝐊) = Σ k_a^(r) + p_F(ℓ₊ − ℓ₋) + π s_γ − Σ t_a`.
    pub fn momentum(&self, space: &MomentumSpace) -> Result<f64> {
        self.validate(space)?;
        let p_f = space.observables().p_f();
        let ks: f64 = self.strings.values().flatten().sum();
        let ts: f64 = self.holes.iter().sum();
        Ok(ks + p_f * (self.ell_plus - self.ell_minus) as f64 + PI * self.spin as f64 - ts)
    }

    /// `ℰ(𝐊) = Σ 𝔢_r(k_a^(r)) − Σ 𝔢₁(t_a)`.
    pub fn energy(&self, space: &MomentumSpace) -> Result<f64> {
        self.validate(space)?;
        let mut e = 0.0;
        for (&r, ks) in &self.strings {
            for &k in ks {
                e += space.energy(r, k)?;
            }
        }
        for &t in &self.holes {
            e -= space.energy(1, t)?;
        }
        Ok(e)
    }

    /// Number of particles whose rapidity lies on `(−∞, −q)`.
    pub fn left_particles(&self, space: &MomentumSpace) -> Result<usize> {
        let mut n = 0;
        for &k in self.strings.get(&1).map(Vec::as_slice).unwrap_or(&[]) {
            if space.hat_p1_inverse(k)?.1 == Segment::ParticleLeft {
                n += 1;
            }
        }
        Ok(n)
    }

    /// `ϑ_υ(𝐊)` for `υ = ±1`.
    pub fn shift_function(&self, upsilon: i32, space: &MomentumSpace) -> Result<f64> {
        if upsilon != 1 && upsilon != -1 {
            return Err(Error::domain("υ must be ±1"));
        }
        self.validate(space)?;
        let o = space.observables();
        let p_f = o.p_f();
        let u = upsilon as f64;
        let s = u * p_f;
        let z_f = o.charge(o.q())?;
        let ell_u = if upsilon == 1 { self.ell_plus } else { self.ell_minus } as f64;
        let mut theta = -u * ell_u + 0.5 * self.spin as f64 * z_f;
        for &t in &self.holes {
            theta += space.phase(1, s, t)?;
        }
        for (&r, ks) in &self.strings {
            for &k in ks {
                theta -= space.phase(r, s, k)?;
            }
        }
        theta -= self.ell_plus as f64 * space.phase(1, s, p_f)?;
        theta -= self.ell_minus as f64 * space.phase(1, s, -p_f)?;
        theta += o.sign() * self.left_particles(space)? as f64 * z_f;
        Ok(theta)
    }

    pub fn shift(&self, space: &MomentumSpace) -> Result<Shift> {
        Ok(Shift { theta_plus: self.shift_function(1, space)?, theta_minus: self.shift_function(-1, space)? })
    }

    /// `(Δ₊, Δ₋)`.
    pub fn edge_exponents(&self, space: &MomentumSpace) -> Result<(f64, f64)> {
        let s = self.shift(space)?;
        Ok((s.delta_plus(), s.delta_minus()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{FieldSpec, ModelParams, Observables, StringSpec};
    use std::f64::consts::FRAC_PI_2;
    use std::sync::Arc;

    fn space(p: ModelParams) -> MomentumSpace {
        MomentumSpace::new(Arc::new(Observables::solve(&p).unwrap())).unwrap()
    }

    #[test]
    fn free_fermion_hole() {
        let m = space(ModelParams { j: 1.0, zeta: FRAC_PI_2, field: FieldSpec::Field(2.0), n: 32, strings: vec![] });
        let k = ExcitationConfig::hole(1, 0, 0.3);
        let s = k.shift(&m).unwrap();
        assert_eq!((s.theta_plus, s.theta_minus), (-1.0, 0.0));
        assert_eq!(k.edge_exponents(&m).unwrap(), (1.0, 0.0));
        let pf = m.observables().p_f();
        assert!((k.momentum(&m).unwrap() - (pf - 0.3)).abs() < 1e-15);
        assert!((k.energy(&m).unwrap() - (4.0 * 0.3f64.cos() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn hole_closed_form_and_additivity() {
        let m = space(ModelParams::from_delta(1.0, 0.57, FieldSpec::Density(0.21), 64).unwrap());
        let pf = m.observables().p_f();
        let k = ExcitationConfig::hole(1, 0, 0.0);
        let s = k.shift(&m).unwrap();
        let plus = m.phase(1, pf, 0.0).unwrap() - m.phase(1, pf, pf).unwrap() - 1.0;
        let minus = m.phase(1, -pf, 0.0).unwrap() - m.phase(1, -pf, pf).unwrap();
        assert!((s.theta_plus - plus).abs() < 1e-12);
        assert!((s.theta_minus - minus).abs() < 1e-12);
        let empty = ExcitationConfig::default();
        assert_eq!(empty.momentum(&m).unwrap(), 0.0);
        assert_eq!(empty.energy(&m).unwrap(), 0.0);
        let (p0, e0) = (k.momentum(&m).unwrap(), k.energy(&m).unwrap());
        assert!((p0 - pf).abs() < 1e-15);
        let part =
            ExcitationConfig::particle(0, 0, 3.0).union(&ExcitationConfig { holes: vec![0.1], ..Default::default() });
        let both = k.union(&part);
        assert!((both.momentum(&m).unwrap() - p0 - part.momentum(&m).unwrap()).abs() < 1e-14);
        assert!((both.energy(&m).unwrap() - e0 - part.energy(&m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn constraint_and_left_particles() {
        let m = space(ModelParams::from_delta(1.0, 0.57, FieldSpec::Density(0.21), 48).unwrap());
        assert!(ExcitationConfig::hole(1, 1, 0.0).validate(&m).is_err());
        let hi = m.intervals().particle.1;
        let k = ExcitationConfig::particle(-1, 0, hi - 0.05);
        assert_eq!(k.left_particles(&m).unwrap(), 1);
        assert_eq!(ExcitationConfig::particle(-1, 0, 2.0).left_particles(&m).unwrap(), 0);
    }

    #[test]
    fn single_string_energy() {
        let p = ModelParams::from_delta(1.0, 0.5, FieldSpec::Density(0.2), 48)
            .unwrap()
            .with_strings(vec![StringSpec { r: 2, parity: 0 }])
            .unwrap();
        let m = space(p);
        let (_, lo, hi) = m.intervals().strings[0];
        let k = 0.5 * (lo + hi);
        let mut strings = BTreeMap::new();
        strings.insert(2, vec![k]);
        let c = ExcitationConfig { ell_plus: -1, ell_minus: -1, strings, ..Default::default() };
        assert!((c.energy(&m).unwrap() - m.energy(2, k).unwrap()).abs() < 1e-15);
        let (dp, dm) = c.edge_exponents(&m).unwrap();
        assert!(dp >= 0.0 && dm >= 0.0);
    }
}
