//! Dressed quantities of the massless chain in rapidity space.
//!
//! With `𝒦 = K(·|ζ)` on `[−Q, Q]`, the dressed energy splits by linearity as
//! `ε(λ|Q) = h·Z_Q(λ) − 4πJ sin ζ · g_Q(λ)`, where `Z_Q` and `g_Q` solve
//! `f + 𝒦∗f = 1` and `f + 𝒦∗f = K(·|ζ/2)`. The Fermi rapidity `q` is the
//! positive zero of `Q ↦ ε(Q|Q)`, and `p₁' = 2π g_q`.
//!
//! Every off-grid value (and its λ-derivatives) comes from the Nyström
//! extension of the nodal solution, so derivatives cost no accuracy.

use crate::fredholm::{GridFunction, NystromSolver, QuadratureGrid};
use crate::kernels::{bare_phase, bare_phase_r, kernel_k, kernel_k_derivs, kernel_kr_derivs, sgn0, Branch};
use crate::roots::{brent, Tolerance};
use crate::{Angle, Rapidity};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Search window for the Fermi rapidity.
pub const Q_MIN: f64 = 1e-6;
pub const Q_MAX: f64 = 50.0;

/// Exactly one way of fixing the magnetic field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    Field(f64),
    Density(f64),
    FermiRapidity(f64),
}

/// An enabled bound state of length `r ≥ 2` living on `ℝ + i·parity·π/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringSpec {
    pub r: u32,
    pub parity: u8,
}

impl StringSpec {
    pub fn branch(self) -> Branch {
        Branch::from_parity(self.parity)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub j: f64,
    pub zeta: f64,
    pub field: FieldSpec,
    pub n: usize,
    #[serde(default)]
    pub strings: Vec<StringSpec>,
}

impl ModelParams {
    /// Parameters at anisotropy `Δ = cos ζ`.
    pub fn from_delta(j: f64, delta: f64, field: FieldSpec, n: usize) -> Result<Self> {
        if !(delta > -1.0 && delta < 1.0) {
            return Err(Error::config(format!("anisotropy must lie in (−1, 1), got {delta}")));
        }
        let p = ModelParams { j, zeta: delta.acos(), field, n, strings: Vec::new() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_strings(mut self, strings: Vec<StringSpec>) -> Result<Self> {
        self.strings = strings;
        self.validate()?;
        Ok(self)
    }

    pub fn delta(&self) -> f64 {
        self.zeta.cos()
    }

    /// `h_c = 4J(1 + Δ)`.
    pub fn critical_field(&self) -> f64 {
        4.0 * self.j * (1.0 + self.delta())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0 && self.j.is_finite()) {
            return Err(Error::config(format!("J must be positive, got {}", self.j)));
        }
        if !(self.zeta > 0.0 && self.zeta < PI) {
            return Err(Error::config(format!("ζ must lie in (0, π), got {}", self.zeta)));
        }
        if self.n < 8 {
            return Err(Error::config(format!("quadrature order must be ≥ 8, got {}", self.n)));
        }
        match self.field {
            FieldSpec::Field(h) if !(h > 0.0 && h < self.critical_field()) => {
                return Err(Error::config(format!(
                    "field h = {h} outside the massless window (0, {})",
                    self.critical_field()
                )))
            }
            FieldSpec::Density(d) if !(d > 0.0 && d < 0.5) => {
                return Err(Error::config(format!("density must lie in (0, 1/2), got {d}")))
            }
            FieldSpec::FermiRapidity(q) if !(q > 0.0 && q < Q_MAX) => {
                return Err(Error::config(format!("Fermi rapidity must lie in (0, {Q_MAX}), got {q}")))
            }
            _ => {}
        }
        for s in &self.strings {
            if s.r < 2 || s.parity > 1 {
                return Err(Error::config(format!(
                    "string spec needs r ≥ 2 and parity 0 or 1, got r={} parity={}",
                    s.r, s.parity
                )));
            }
        }
        Ok(())
    }
}

fn floor_tol(x: f64) -> f64 {
    (x + 1e-12).floor()
}

/// `η̂ = η − π⌊η/π⌋`.
fn hat(eta: f64) -> f64 {
    eta - PI * floor_tol(eta / PI)
}

/// `ℓ_r(ζ) = 1 − r + 2⌊rζ/2π⌋`.
pub fn ell_r(r: u32, zeta: f64) -> f64 {
    1.0 - r as f64 + 2.0 * floor_tol(r as f64 * zeta / (2.0 * PI))
}

/// `m_r(ζ) = 2 − r − δ_{r1} + 2Σ_± ⌊ζ(r ± 1)/2π⌋`.
pub fn m_r(r: u32, zeta: f64) -> f64 {
    let rf = r as f64;
    let d = if r == 1 { 1.0 } else { 0.0 };
    2.0 - rf - d + 2.0 * (floor_tol(zeta * (rf + 1.0) / (2.0 * PI)) + floor_tol(zeta * (rf - 1.0) / (2.0 * PI)))
}

/// `sgn(π − 2ζ)` with `sgn(0) = 0`.
pub fn sign_pi_minus_2zeta(zeta: f64) -> f64 {
    sgn0(PI - 2.0 * zeta)
}

/// Solves the two driving problems on `[−Q, Q]`.
struct Pair {
    solver: NystromSolver<f64>,
    z: GridFunction<f64>,
    g: GridFunction<f64>,
}

impl Pair {
    fn new(q: f64, n: usize, zeta: Angle) -> Result<Self> {
        let grid = Arc::new(QuadratureGrid::new(q, n)?);
        let half = Angle::new(0.5 * zeta.value())?;
        let solver = NystromSolver::new(grid, |x| kernel_k(Rapidity::real(x), zeta))?;
        let z = solver.solve(|_| Ok(1.0))?;
        let g = solver.solve(|x| kernel_k(Rapidity::real(x), half))?;
        Ok(Pair { solver, z, g })
    }

    /// `(Z_Q(λ), g_Q(λ))` by Nyström extension at real λ.
    fn at(&self, lambda: f64, zeta: Angle) -> Result<(f64, f64)> {
        let half = Angle::new(0.5 * zeta.value())?;
        let conv = |f: &GridFunction<f64>| f.try_weighted_sum(|mu| kernel_k(Rapidity::real(lambda - mu), zeta));
        let z = 1.0 - conv(&self.z)?;
        let g = kernel_k(Rapidity::real(lambda), half)? - conv(&self.g)?;
        Ok((z, g))
    }

    /// `p₁(Q)` from the explicit formula with `p₁' = 2π g_Q`.
    fn fermi_momentum(&self, zeta: Angle) -> Result<f64> {
        let q = self.solver.grid().q();
        let half = Angle::new(0.5 * zeta.value())?;
        let conv = self.g.weighted_sum(|mu| bare_phase(Rapidity::real(q - mu), zeta));
        Ok(bare_phase(Rapidity::real(q), half) - conv)
    }
}

/// Solved observables; immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct Observables {
    params: ModelParams,
    zeta: Angle,
    q: f64,
    h: f64,
    p_f: f64,
    v_f: f64,
    solver: NystromSolver<f64>,
    z: GridFunction<f64>,
    eps: GridFunction<f64>,
    dp: GridFunction<f64>,
    edge_adjoint: [Vec<f64>; 2],
}

impl Observables {
    /// Resolves the field specification and solves every core equation.
    pub fn solve(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let zeta = Angle::new(params.zeta)?;
        let n = params.n;
        let sin_term = 4.0 * PI * params.j * params.zeta.sin();
        let tol = Tolerance { x_abs: 1e-15, max_iter: 200 };
        let (q, h) = match params.field {
            FieldSpec::Field(h) => {
                let f = |qq: f64| -> Result<f64> {
                    let p = Pair::new(qq, n, zeta)?;
                    let (z, g) = p.at(qq, zeta)?;
                    Ok(h * z - sin_term * g)
                };
                let q = brent(f, Q_MIN, Q_MAX, tol).map_err(|e| match e {
                    Error::Numerical(m) if m.contains("not bracketed") => {
                        Error::domain(format!("field outside massless window: {m}"))
                    }
                    other => other,
                })?;
                (q, h)
            }
            FieldSpec::Density(d) => {
                let f = |qq: f64| -> Result<f64> { Ok(Pair::new(qq, n, zeta)?.fermi_momentum(zeta)? / PI - d) };
                let q = brent(f, Q_MIN, Q_MAX, tol)
                    .map_err(|e| Error::domain(format!("density {d} not reachable: {e}")))?;
                let p = Pair::new(q, n, zeta)?;
                let (z, g) = p.at(q, zeta)?;
                (q, sin_term * g / z)
            }
            FieldSpec::FermiRapidity(q) => {
                let p = Pair::new(q, n, zeta)?;
                let (z, g) = p.at(q, zeta)?;
                (q, sin_term * g / z)
            }
        };
        let pair = Pair::new(q, n, zeta)?;
        let grid = pair.solver.shared_grid();
        let eps_vals: Vec<f64> =
            pair.z.values().iter().zip(pair.g.values()).map(|(z, g)| h * z - sin_term * g).collect();
        let eps = GridFunction::new(Arc::clone(&grid), eps_vals)?;
        let dp = GridFunction::new(Arc::clone(&grid), pair.g.values().iter().map(|g| 2.0 * PI * g).collect())?;
        let p_f = pair.fermi_momentum(zeta)?;
        let mut obs = Observables {
            params: params.clone(),
            zeta,
            q,
            h,
            p_f,
            v_f: 0.0,
            solver: pair.solver,
            z: pair.z,
            eps,
            dp,
            edge_adjoint: [Vec::new(), Vec::new()],
        };
        obs.edge_adjoint = [obs.adjoint_at(q)?, obs.adjoint_at(-q)?];
        let (_, e1, _) = obs.energy_derivs(1, Rapidity::real(q))?;
        let (_, p1, _) = obs.momentum_derivs(1, Rapidity::real(q))?;
        obs.v_f = e1 / p1;
        Ok(obs)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn zeta(&self) -> f64 {
        self.zeta.value()
    }

    pub fn j(&self) -> f64 {
        self.params.j
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    pub fn v_f(&self) -> f64 {
        self.v_f
    }

    /// `D = p_F/π`.
    pub fn density(&self) -> f64 {
        self.p_f / PI
    }

    /// `sgn(π − 2ζ)` with `sgn(0) = 0`.
    pub fn sign(&self) -> f64 {
        sign_pi_minus_2zeta(self.zeta())
    }

    pub fn grid(&self) -> &QuadratureGrid<f64> {
        self.solver.grid()
    }

    /// Nodal values of `Z`, `ε₁` and `p₁'`.
    pub fn charge_nodes(&self) -> &GridFunction<f64> {
        &self.z
    }

    pub fn energy_nodes(&self) -> &GridFunction<f64> {
        &self.eps
    }

    pub fn momentum_derivative_nodes(&self) -> &GridFunction<f64> {
        &self.dp
    }

    fn check_r(&self, r: u32, lambda: Rapidity) -> Result<()> {
        if r == 1 {
            return Ok(());
        }
        match self.params.strings.iter().find(|s| s.r == r) {
            None => Err(Error::config(format!("string length r = {r} is not enabled"))),
            Some(s) if s.branch() != lambda.branch => Err(Error::domain(format!(
                "r = {r} strings live on parity {} but λ is on {:?}",
                s.parity, lambda.branch
            ))),
            Some(_) => Ok(()),
        }
    }

    /// Branch on which `r`-strings live (`r = 1` returns `Real`).
    pub fn string_branch(&self, r: u32) -> Result<Branch> {
        if r == 1 {
            return Ok(Branch::Real);
        }
        self.params
            .strings
            .iter()
            .find(|s| s.r == r)
            .map(|s| s.branch())
            .ok_or_else(|| Error::config(format!("string length r = {r} is not enabled")))
    }

    /// `Z(λ)` at real λ.
    pub fn charge(&self, lambda: f64) -> Result<f64> {
        let conv = self.z.try_weighted_sum(|mu| kernel_k(Rapidity::real(lambda - mu), self.zeta))?;
        Ok(1.0 - conv)
    }

    /// `(ε_r, ε_r', ε_r'')` at λ, with `ε₁ = ε(·|q)`.
    pub fn energy_derivs(&self, r: u32, lambda: Rapidity) -> Result<(f64, f64, f64)> {
        self.check_r(r, lambda)?;
        let rf = r as f64;
        let bare = Angle::new(0.5 * rf * self.zeta())?;
        let c = 4.0 * PI * self.params.j * self.zeta().sin();
        let (k0, k1, k2) = kernel_k_derivs(lambda, bare)?;
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let g = self.grid();
        for ((&mu, &w), &e) in g.nodes().iter().zip(g.weights()).zip(self.eps.values()) {
            let (a, b, cc) = kernel_kr_derivs(lambda - Rapidity::real(mu), r, self.zeta)?;
            s0 += w * a * e;
            s1 += w * b * e;
            s2 += w * cc * e;
        }
        Ok((rf * self.h - c * k0 - s0, -c * k1 - s1, -c * k2 - s2))
    }

    pub fn energy(&self, r: u32, lambda: Rapidity) -> Result<f64> {
        Ok(self.energy_derivs(r, lambda)?.0)
    }

    /// `(p_r', p_r'')` at λ.
    fn momentum_slope(&self, r: u32, lambda: Rapidity) -> Result<(f64, f64)> {
        let bare = Angle::new(0.5 * r as f64 * self.zeta())?;
        let (k0, k1, _) = kernel_k_derivs(lambda, bare)?;
        let (mut s1, mut s2) = (0.0, 0.0);
        let g = self.grid();
        for ((&mu, &w), &d) in g.nodes().iter().zip(g.weights()).zip(self.dp.values()) {
            let (a, b, _) = kernel_kr_derivs(lambda - Rapidity::real(mu), r, self.zeta)?;
            s1 += w * a * d;
            s2 += w * b * d;
        }
        Ok((2.0 * PI * k0 - s1, 2.0 * PI * k1 - s2))
    }

    /// Dressed momentum `p_r(λ)` including the Umklapp constants and the
    /// strip-indicator corrections; `iπ`-periodic in λ.
    pub fn momentum(&self, r: u32, lambda: Rapidity) -> Result<f64> {
        self.check_r(r, lambda)?;
        let zeta = self.zeta();
        let bare = Angle::new(0.5 * r as f64 * zeta)?;
        let g = self.grid();
        let mut conv = 0.0;
        for ((&mu, &w), &d) in g.nodes().iter().zip(g.weights()).zip(self.dp.values()) {
            conv += w * bare_phase_r(lambda - Rapidity::real(mu), r, self.zeta)? * d;
        }
        let mut p = bare_phase(lambda, bare) - conv / (2.0 * PI) + PI * ell_r(r, zeta) - self.p_f * m_r(r, zeta);
        for sigma in [1.0, -1.0] {
            if r == 1 && sigma < 0.0 {
                continue;
            }
            let eta = hat(0.5 * (r as f64 + sigma) * zeta);
            let threshold = eta.min(PI - eta);
            let im = if lambda.branch.is_shifted() { 0.5 * PI } else { 0.0 };
            if im >= threshold - 1e-13 {
                p -= 2.0 * self.p_f * sgn0(1.0 - 2.0 * eta / PI);
            }
        }
        Ok(p)
    }

    /// `(p_r, p_r', p_r'')` at λ.
    pub fn momentum_derivs(&self, r: u32, lambda: Rapidity) -> Result<(f64, f64, f64)> {
        let p = self.momentum(r, lambda)?;
        let (d1, d2) = self.momentum_slope(r, lambda)?;
        Ok((p, d1, d2))
    }

    /// `y` with `(I + W𝒦)ᵀ y = (w_j K(λ − ν_j))_j`.
    fn adjoint_at(&self, lambda: f64) -> Result<Vec<f64>> {
        let g = self.grid();
        let c: Result<Vec<f64>> = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(&nu, &w)| Ok(w * kernel_k(Rapidity::real(lambda - nu), self.zeta)?))
            .collect();
        self.solver.solve_transposed(&c?)
    }

    fn phase_rhs(&self, r: u32, lambda: f64, mu: Rapidity) -> Result<f64> {
        Ok(bare_phase_r(Rapidity::real(lambda) - mu, r, self.zeta)? / (2.0 * PI) + 0.5 * m_r(r, self.zeta()))
    }

    fn phase_with(&self, y: &[f64], r: u32, lambda: f64, mu: Rapidity) -> Result<f64> {
        let mut s = 0.0;
        for (&nu, &yj) in self.grid().nodes().iter().zip(y) {
            s += yj * self.phase_rhs(r, nu, mu)?;
        }
        Ok(self.phase_rhs(r, lambda, mu)? - s)
    }

    /// Dressed phase `φ_r(λ, μ)` at real λ.
    ///
    /// Uses `φ(λ) = g(λ) − yᵀg` with `y` the adjoint vector for λ, so a phase
    /// at `λ = ±q` costs one pass over the nodes for any μ.
    pub fn dressed_phase(&self, r: u32, lambda: f64, mu: Rapidity) -> Result<f64> {
        self.check_r(r, mu)?;
        if lambda == self.q {
            self.phase_with(&self.edge_adjoint[0], r, lambda, mu)
        } else if lambda == -self.q {
            self.phase_with(&self.edge_adjoint[1], r, lambda, mu)
        } else {
            self.phase_with(&self.adjoint_at(lambda)?, r, lambda, mu)
        }
    }

    /// Nodal values `φ_r(ν_i, μ)`.
    pub fn dressed_phase_nodes(&self, r: u32, mu: Rapidity) -> Result<GridFunction<f64>> {
        self.check_r(r, mu)?;
        self.solver.solve(|nu| self.phase_rhs(r, nu, mu))
    }

    /// Residuals of the two charge/phase identities,
    /// `max_i |φ₁(λ_i,q) − φ₁(λ_i,−q) + 1 − Z(λ_i)|` and
    /// `|1 + φ₁(q,q) − φ₁(−q,q) − 1/Z(q)|`.
    pub fn identity_residuals(&self) -> Result<(f64, f64)> {
        let q = self.q;
        let plus = self.dressed_phase_nodes(1, Rapidity::real(q))?;
        let minus = self.dressed_phase_nodes(1, Rapidity::real(-q))?;
        let first = plus
            .values()
            .iter()
            .zip(minus.values())
            .zip(self.z.values())
            .map(|((a, b), z)| (a - b + 1.0 - z).abs())
            .fold(0.0, f64::max);
        let zq = self.charge(q)?;
        let lhs = 1.0 + self.dressed_phase(1, q, Rapidity::real(q))? - self.dressed_phase(1, -q, Rapidity::real(q))?;
        Ok((first, (lhs - 1.0 / zq).abs()))
    }
}
