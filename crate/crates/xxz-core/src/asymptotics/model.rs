//! Gaussian model integral
//! `𝒥(x) = ∫ e^{−|y|²} V(y) Π_υ Ξ(x + z_υ)(x + z_υ)^{δ_υ−1} dy`,
//! `z_υ = ½Σ ε y² − (u + υv) Σ ξ y`, with its leading small-`x` term.
//!
//! Two variables: nested tanh-sinh with factorised quadratics.
//! Three or four: Monte Carlo under the Gaussian, common random numbers across `x`.

use super::fit::{fit_two_sided, log_grid};
use super::Check;
use crate::kernels::{barnes_g, gamma};
use crate::quadrature::{gauss_legendre, graded_breaks, Estimate, Node, TanhSinh};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::PI;

/// Truncation of each coordinate; the Gaussian tail beyond is below 1e−15.
pub const BOX: f64 = 6.0;
/// MC refuses below this exponent: the variance blows up.
pub const MC_MIN_DELTA: f64 = 0.2;
const MC_CHUNK: usize = 256;
const MC_LINE_TOL: f64 = 1e-7;
const MC_GL_POINTS: usize = 16;
const GL_POINTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelIntegralSpec {
    pub ell: usize,
    pub n_r: Vec<u32>,
    pub eps_r: Vec<i32>,
    pub xi_r: Vec<f64>,
    pub u: f64,
    pub v: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPrediction {
    pub theta: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    /// `|x|^ϑ` coefficient without the side weights.
    pub amplitude: f64,
    /// `sin(πν_±)/π`.
    pub weights: (f64, f64),
    pub value: f64,
    pub flagged: bool,
}

/// MC estimates on a grid of `x`, sharing samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McGrid {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

impl ModelIntegralSpec {
    /// `n` variables of a single group, `ε = +1`, `ξ = 1`.
    pub fn single(n: u32, u: f64, v: f64, delta_plus: f64, delta_minus: f64) -> Self {
        ModelIntegralSpec { ell: 1, n_r: vec![n], eps_r: vec![1], xi_r: vec![1.0], u, v, delta_plus, delta_minus }
    }

    pub fn total(&self) -> usize {
        self.n_r.iter().map(|&n| n as usize).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.ell;
        if l == 0 || self.n_r.len() != l || self.eps_r.len() != l || self.xi_r.len() != l {
            return Err(Error::config("n_r, eps_r, xi_r must all have length ell ≥ 1"));
        }
        if self.n_r.contains(&0) || self.total() < 2 {
            return Err(Error::config("need n_r ≥ 1 and Σ n_r ≥ 2"));
        }
        if self.eps_r.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::config("eps_r must be ±1"));
        }
        if self.xi_r.iter().any(|&x| x == 0.0 || !x.is_finite()) {
            return Err(Error::config("xi_r must be nonzero"));
        }
        if !(self.v > 0.0) || self.u.abs() == self.v {
            return Err(Error::config("need v > 0 and u ≠ ±v"));
        }
        if !(self.delta_plus > 0.0 && self.delta_minus > 0.0) {
            return Err(Error::config("δ_± must be positive"));
        }
        if self.signature() == 0.0 {
            return Err(Error::config("Σ ε_r ξ_r² n_r must not vanish"));
        }
        Ok(())
    }

    fn signature(&self) -> f64 {
        (0..self.ell).map(|r| self.eps_r[r] as f64 * self.xi_r[r].powi(2) * self.n_r[r] as f64).sum()
    }

    /// `ϑ = ½Σn_r² − 3/2 + δ₊ + δ₋`.
    pub fn theta(&self) -> f64 {
        0.5 * self.n_r.iter().map(|&n| (n * n) as f64).sum::<f64>() - 1.5 + self.delta_plus + self.delta_minus
    }

    /// `ς = sgn(−Σ ε_r n_r ξ_r²)`.
    pub fn varsigma(&self) -> f64 {
        -self.signature().signum()
    }

    /// `σ_υ = 1 − υu/v`.
    pub fn sigma(&self, upsilon: i32) -> f64 {
        1.0 - upsilon as f64 * self.u / self.v
    }

    pub fn nu(&self, eps: i32) -> f64 {
        let e = eps as f64;
        let mut nu = -(1.0 + e * self.varsigma()) / 4.0;
        for r in 0..self.ell {
            if eps * self.eps_r[r] == -1 {
                nu += 0.5 * (self.n_r[r] * self.n_r[r]) as f64;
            }
        }
        if e * self.sigma(1) > 0.0 {
            nu += self.delta_plus;
        }
        if e * self.sigma(-1) > 0.0 {
            nu += self.delta_minus;
        }
        nu
    }

    pub fn prediction(&self, x: f64) -> Result<ModelPrediction> {
        self.validate()?;
        let theta = self.theta();
        let flagged = theta >= -1e-9 && (theta - theta.round()).abs() < 1e-6;
        let (dp, dm) = (self.delta_plus, self.delta_minus);
        let mut groups = 1.0;
        for r in 0..self.ell {
            let n = self.n_r[r] as f64;
            let kron = if r == 0 { 1.0 } else { 0.0 };
            groups *= barnes_g::<f64>(2 + self.n_r[r])? * (2.0 * PI).powf(0.5 * (n - kron));
        }
        let amplitude = gamma(dp) * gamma(dm) * gamma(-theta) * (2.0 * self.v).powf(dp + dm - 1.0)
            / ((self.v - self.u).abs().powf(dp) * (self.v + self.u).abs().powf(dm))
            * groups
            / self.signature().abs().sqrt();
        let (nu_plus, nu_minus) = (self.nu(1), self.nu(-1));
        let weights = ((PI * nu_plus).sin() / PI, (PI * nu_minus).sin() / PI);
        let side = if x > 0.0 { weights.0 } else { weights.1 };
        let value = if flagged { f64::NAN } else { x.abs().powf(theta) * amplitude * side };
        Ok(ModelPrediction { theta, nu_plus, nu_minus, amplitude, weights, value, flagged })
    }

    /// Per-variable `(ε, ξ, group)`.
    fn variables(&self) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::with_capacity(self.total());
        for r in 0..self.ell {
            for _ in 0..self.n_r[r] {
                out.push((self.eps_r[r] as f64, self.xi_r[r], r));
            }
        }
        out
    }
}

/// `Ξ(w) w^{δ−1}`.
fn jump_power(w: f64, delta: f64) -> f64 {
    if w > 0.0 {
        w.powf(delta - 1.0)
    } else {
        0.0
    }
}

/// `q(y) = a y² + b y + c` held through its real roots when it has any.
#[derive(Clone, Copy, Debug)]
struct Quadratic {
    a: f64,
    b: f64,
    c: f64,
    roots: Option<(f64, f64)>,
}

impl Quadratic {
    fn new(a: f64, b: f64, c: f64) -> Self {
        let disc = b * b - 4.0 * a * c;
        let roots = if disc > 0.0 {
            let s = -0.5 * (b + b.signum() * disc.sqrt());
            let (r1, r2) = if s == 0.0 { (0.0, 0.0) } else { (s / a, c / s) };
            Some((r1.min(r2), r1.max(r2)))
        } else {
            None
        };
        Quadratic { a, b, c, roots }
    }

    fn vertex(&self) -> f64 {
        -self.b / (2.0 * self.a)
    }

    /// Value at a node of the panel `[l, r]`, using exact distances to
    /// whichever panel end is a root.
    fn eval(&self, n: &Node, l: f64, r: f64) -> f64 {
        match self.roots {
            Some((r1, r2)) => {
                let d = |root: f64| {
                    if root == l {
                        n.from_left
                    } else if root == r {
                        -n.from_right
                    } else {
                        n.x - root
                    }
                };
                self.a * d(r1) * d(r2)
            }
            None => (self.a * n.x + self.b) * n.x + self.c,
        }
    }
}

/// A sub-panel `[l, r]` of the parent panel `[pl, pr]` between consecutive
/// singular points.
#[derive(Clone, Copy, Debug)]
struct SubPanel {
    l: f64,
    r: f64,
    pl: f64,
    pr: f64,
}

impl SubPanel {
    fn touches_end(&self) -> bool {
        self.l == self.pl || self.r == self.pr
    }

    /// Node with distances to the parent ends.
    fn node(&self, n: Node) -> Node {
        Node {
            x: n.x,
            from_left: if self.l == self.pl { n.from_left } else { n.x - self.pl },
            from_right: if self.r == self.pr { n.from_right } else { self.pr - n.x },
        }
    }
}

/// Sub-panels between the singular points `pts` (clipped to `[lo, hi]`), graded
/// geometrically toward each point at its scale or at the neighbouring gap.
fn refined_panels(lo: f64, hi: f64, pts: &mut Vec<(f64, f64)>) -> Vec<SubPanel> {
    pts.retain(|p| p.0 > lo && p.0 < hi);
    pts.push((lo, f64::INFINITY));
    pts.push((hi, f64::INFINITY));
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    pts.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 = b.1.min(a.1);
            true
        } else {
            false
        }
    });
    let mut out = Vec::new();
    for i in 0..pts.len() - 1 {
        let (pl, pr) = (pts[i].0, pts[i + 1].0);
        let w = pr - pl;
        let mut left = pts[i].1;
        if i > 0 {
            left = left.min(pl - pts[i - 1].0);
        }
        let mut right = pts[i + 1].1;
        if i + 2 < pts.len() {
            right = right.min(pts[i + 2].0 - pr);
        }
        let near = |s: f64| if s.is_finite() { Some(s.min(w)) } else { None };
        let b = graded_breaks(pl, pr, near(left), near(right));
        out.extend(b.windows(2).map(|s| SubPanel { l: s[0], r: s[1], pl, pr }));
    }
    out
}

/// Tanh-sinh on sub-panels ending at a singular point, Gauss–Legendre elsewhere.
struct PanelRule {
    ts: TanhSinh,
    gl: (Vec<f64>, Vec<f64>),
}

impl PanelRule {
    fn new(tol: f64, gl_points: usize) -> Result<Self> {
        Ok(PanelRule { ts: TanhSinh::with_tol(tol), gl: gauss_legendre::<f64>(gl_points)? })
    }

    fn integrate<F: FnMut(Node) -> f64>(&self, p: &SubPanel, mut f: F) -> Result<Estimate> {
        if p.touches_end() {
            return self.ts.integrate(p.l, p.r, |n| f(p.node(n)));
        }
        let (c, h) = (0.5 * (p.l + p.r), 0.5 * (p.r - p.l));
        let mut value = 0.0;
        for (t, w) in self.gl.0.iter().zip(&self.gl.1) {
            let x = c + h * t;
            value += w * f(Node { x, from_left: x - p.pl, from_right: p.pr - x });
        }
        Ok(Estimate { value: h * value, error: 0.0 })
    }
}

/// `∫ e^{−t²} V Π_υ Ξ(x + z_υ)(x + z_υ)^{δ_υ−1} dt` over the last coordinate,
/// the others fixed at `rest` (their Gaussian weight left out).
fn line_integral(
    spec: &ModelIntegralSpec,
    vars: &[(f64, f64, usize)],
    rest: &[f64],
    x: f64,
    rule: &PanelRule,
) -> Result<Estimate> {
    let m = vars.len() - 1;
    let (en, xin, gn) = vars[m];
    let (mut quad, mut lin, mut vdm) = (0.0, 0.0, 1.0);
    let mut partners = Vec::new();
    for (i, &(e, xi, g)) in vars[..m].iter().enumerate() {
        quad += 0.5 * e * rest[i] * rest[i];
        lin += xi * rest[i];
        for j in 0..i {
            if vars[j].2 == g {
                vdm *= (rest[i] - rest[j]).powi(2);
            }
        }
        if g == gn {
            partners.push(rest[i]);
        }
    }
    let (dp, dm) = (spec.delta_plus, spec.delta_minus);
    let q = [spec.u + spec.v, spec.u - spec.v].map(|cu| Quadratic::new(0.5 * en, -cu * xin, x + quad - cu * lin));
    let mut pts = Vec::new();
    for qu in &q {
        if let Some((r1, r2)) = qu.roots {
            pts.push((r1, f64::INFINITY));
            pts.push((r2, f64::INFINITY));
        } else {
            let min = qu.c - qu.b * qu.b / (4.0 * qu.a);
            pts.push((qu.vertex(), (min.abs() / qu.a.abs()).sqrt()));
        }
    }
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for p in refined_panels(-BOX, BOX, &mut pts) {
        let mid = p.node(Node { x: 0.5 * (p.l + p.r), from_left: 0.5 * (p.r - p.l), from_right: 0.5 * (p.r - p.l) });
        if q[0].eval(&mid, p.pl, p.pr) <= 0.0 || q[1].eval(&mid, p.pl, p.pr) <= 0.0 {
            continue;
        }
        let est = rule.integrate(&p, |n| {
            let t = n.x;
            let pair: f64 = partners.iter().map(|&s| (t - s) * (t - s)).product();
            (-t * t).exp()
                * vdm
                * pair
                * jump_power(q[0].eval(&n, p.pl, p.pr), dp)
                * jump_power(q[1].eval(&n, p.pl, p.pr), dm)
        })?;
        total.value += est.value;
        total.error += est.error;
    }
    Ok(total)
}

fn quad2(spec: &ModelIntegralSpec, x: f64, tol: f64) -> Result<Estimate> {
    let vars = spec.variables();
    let ((e1, xi1, _), (e2, xi2, _)) = (vars[0], vars[1]);
    let c = [spec.u + spec.v, spec.u - spec.v];
    let rule = PanelRule::new(tol, GL_POINTS)?;
    let mut inner_rel = 0.0f64;
    let mut inner = |y1: f64| -> Result<f64> {
        let est = line_integral(spec, &vars, &[y1], x, &rule)?;
        if est.value != 0.0 {
            inner_rel = inner_rel.max(est.error / est.value.abs());
        }
        Ok((-y1 * y1).exp() * est.value)
    };

    // Outer singular points: discriminant zeros and the common zeros of ẑ₊, ẑ₋.
    let mut pts: Vec<(f64, f64)> = vec![(0.0, x.abs())];
    for &cu in &c {
        // −ε₁ε₂ y² + 2ε₂cξ₁ y + c²ξ₂² − 2ε₂x = 0
        let q = Quadratic::new(-e1 * e2, 2.0 * e2 * cu * xi1, cu * cu * xi2 * xi2 - 2.0 * e2 * x);
        if let Some((r1, r2)) = q.roots {
            pts.push((r1, x.abs()));
            pts.push((r2, x.abs()));
        }
    }
    let k = 0.5 * (e1 + e2 * xi1 * xi1 / (xi2 * xi2));
    if k != 0.0 && -x / k > 0.0 {
        let y = (-x / k).sqrt();
        pts.push((y, x.abs()));
        pts.push((-y, x.abs()));
    }
    let mut total = Estimate { value: 0.0, error: 0.0 };
    let mut failure = None;
    for p in refined_panels(-BOX, BOX, &mut pts) {
        let est = rule.integrate(&p, |n| match inner(n.x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        })?;
        total.value += est.value;
        total.error += est.error;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    total.error += inner_rel * total.value.abs();
    Ok(total)
}

/// Conditional estimator over cells `c0..c1` of the stratified grid: two
/// independent Gaussian points per cell for the first `Σn − 1` coordinates,
/// the last coordinate integrated by quadrature. Returns per-`x` sums of cell
/// means and of squared within-cell differences.
fn mc_cells(
    spec: &ModelIntegralSpec,
    xs: &[f64],
    seed: u64,
    chunk: u64,
    cells: (usize, usize),
    per_axis: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let vars = spec.variables();
    let rule = PanelRule::new(MC_LINE_TOL, MC_GL_POINTS)?;
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let m = vars.len() - 1;
    let mut mean = vec![0.0; xs.len()];
    let mut diff2 = vec![0.0; xs.len()];
    let mut pts = [vec![0.0; m], vec![0.0; m]];
    let k = per_axis as f64;
    for c in cells.0..cells.1 {
        for p in pts.iter_mut() {
            let mut idx = c;
            for coord in p.iter_mut() {
                let cell = (idx % per_axis) as f64;
                idx /= per_axis;
                let u: f64 = rng.random();
                *coord = normal.inverse_cdf(((cell + u) / k).clamp(1e-300, 1.0 - 1e-16));
            }
        }
        for (j, &x) in xs.iter().enumerate() {
            let a = line_integral(spec, &vars, &pts[0], x, &rule)?.value;
            let b = line_integral(spec, &vars, &pts[1], x, &rule)?.value;
            mean[j] += 0.5 * (a + b);
            diff2[j] += (a - b) * (a - b);
        }
    }
    Ok((mean, diff2))
}

fn pairwise_sum(mut parts: Vec<(Vec<f64>, Vec<f64>)>) -> (Vec<f64>, Vec<f64>) {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for k in 0..a.0.len() {
                    a.0[k] += b.0[k];
                    a.1[k] += b.1[k];
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

/// Stratified Monte Carlo on a grid of `x`, one sample set shared by all `x`.
/// `samples` is rounded up to `2·K^{Σn−1}` for an integer `K`. Bitwise
/// reproducible for fixed `seed` and `samples`, whatever the worker count.
pub fn model_integral_mc(spec: &ModelIntegralSpec, xs: &[f64], samples: u64, seed: u64) -> Result<McGrid> {
    spec.validate()?;
    if spec.delta_plus.min(spec.delta_minus) < MC_MIN_DELTA {
        return Err(Error::config(format!(
            "min(δ₊, δ₋) < {MC_MIN_DELTA}: the integrand is too singular for Monte Carlo; \
             raise δ or use a two-variable spec with quadrature"
        )));
    }
    let m = spec.total() - 1;
    let per_axis = ((samples.max(2) as f64 / 2.0).powf(1.0 / m as f64).ceil() as usize).max(1);
    let cells = per_axis.pow(m as u32);
    let chunks = cells.div_ceil(MC_CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| mc_cells(spec, xs, seed, c as u64, (c * MC_CHUNK, ((c + 1) * MC_CHUNK).min(cells)), per_axis))
        .collect::<Result<Vec<_>>>()?;
    let (sum, diff2) = pairwise_sum(parts);
    let norm = PI.powf(0.5 * m as f64);
    let nc = cells as f64;
    let values = sum.iter().map(|s| norm * s / nc).collect();
    // Var(cell mean) = (a − b)²/4 per cell.
    let std_errors = diff2.iter().map(|d| norm * (d / 4.0).sqrt() / nc).collect();
    Ok(McGrid { xs: xs.to_vec(), values, std_errors, samples: 2 * cells as u64, seed })
}

/// `𝒥(x)`: quadrature for two variables, Monte Carlo (1e7 samples, seed 0) for three or four.
pub fn model_integral(spec: &ModelIntegralSpec, x: f64) -> Result<Estimate> {
    spec.validate()?;
    match spec.total() {
        2 => quad2(spec, x, 1e-12),
        3 | 4 => {
            let g = model_integral_mc(spec, &[x], 10_000_000, 0)?;
            Ok(Estimate { value: g.values[0], error: g.std_errors[0] })
        }
        n => Err(Error::config(format!("Σ n_r = {n} is beyond desk scale (2 to 4)"))),
    }
}

/// Two-variable quadrature at a chosen tolerance.
pub fn model_integral_quad(spec: &ModelIntegralSpec, x: f64, tol: f64) -> Result<Estimate> {
    spec.validate()?;
    if spec.total() != 2 {
        return Err(Error::config("quadrature path needs Σ n_r = 2"));
    }
    quad2(spec, x, tol)
}

/// Fit outcome on both sides of `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub spec: ModelIntegralSpec,
    pub xs: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_errors: Option<(Vec<f64>, Vec<f64>)>,
    pub checks: Vec<Check>,
    /// Refits on windows shrunk toward `x = 0`.
    pub window_sensitivity: Vec<WindowFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowFit {
    pub x_max: f64,
    pub points: usize,
    pub exponent: f64,
    pub side_ratio: f64,
}

/// Fits on the leading `n`, `2n/3` and `n/2` abscissae (skipping windows too short for the degree).
fn window_sensitivity(
    xs: &[f64],
    plus: &[f64],
    minus: &[f64],
    w: Option<(&[f64], &[f64])>,
    degree: usize,
) -> Vec<WindowFit> {
    let n = xs.len();
    let mut lens = vec![n, (2 * n).div_ceil(3), n.div_ceil(2)];
    lens.dedup();
    lens.into_iter()
        .filter(|&m| m >= degree + 4)
        .filter_map(|m| {
            let wm = w.map(|(a, b)| (&a[..m], &b[..m]));
            let f = fit_two_sided(&xs[..m], &plus[..m], &minus[..m], wm, degree).ok()?;
            Some(WindowFit {
                x_max: xs[m - 1],
                points: m,
                exponent: f.exponent,
                side_ratio: f.amplitude_plus / f.amplitude_minus,
            })
        })
        .collect()
}

fn checks_from(
    spec: &ModelIntegralSpec,
    tag: &str,
    xs: &[f64],
    plus: &[f64],
    minus: &[f64],
    w: Option<(&[f64], &[f64])>,
    degree: usize,
) -> Result<Vec<Check>> {
    let pred = spec.prediction(xs[0])?;
    let fit = fit_two_sided(xs, plus, minus, w, degree)?;
    let ratio = pred.weights.0 / pred.weights.1;
    let got = fit.amplitude_plus / fit.amplitude_minus;
    let nonneg = plus.iter().chain(minus).all(|&v| v >= 0.0);
    Ok(vec![
        Check::new(
            format!("model_exponent[{tag}]"),
            pred.theta,
            fit.exponent,
            0.05,
            ((fit.exponent - pred.theta) / pred.theta).abs() <= 0.05,
        ),
        Check::new(format!("model_side_ratio[{tag}]"), ratio, got, 0.10, ((got - ratio) / ratio).abs() <= 0.10),
        Check::new(format!("model_nonnegative[{tag}]"), 1.0, if nonneg { 1.0 } else { 0.0 }, 0.0, nonneg),
    ])
}

/// Quadrature samples at `±x` over `xs` and the two-sided fit.
pub fn model_quadrature_check(spec: &ModelIntegralSpec, tag: &str, xs: &[f64], degree: usize) -> Result<ModelReport> {
    let plus = xs.par_iter().map(|&x| Ok(model_integral_quad(spec, x, 1e-13)?.value)).collect::<Result<Vec<_>>>()?;
    let minus = xs.par_iter().map(|&x| Ok(model_integral_quad(spec, -x, 1e-13)?.value)).collect::<Result<Vec<_>>>()?;
    let checks = checks_from(spec, tag, xs, &plus, &minus, None, degree)?;
    let window_sensitivity = window_sensitivity(xs, &plus, &minus, None, degree);
    Ok(ModelReport { spec: spec.clone(), xs: xs.to_vec(), plus, minus, std_errors: None, checks, window_sensitivity })
}

/// Monte Carlo samples at `±x` (one shared sample set) and the weighted two-sided fit.
pub fn model_mc_check(
    spec: &ModelIntegralSpec,
    tag: &str,
    xs: &[f64],
    samples: u64,
    seed: u64,
    degree: usize,
) -> Result<ModelReport> {
    let grid: Vec<f64> = xs.iter().copied().chain(xs.iter().map(|x| -x)).collect();
    let g = model_integral_mc(spec, &grid, samples, seed)?;
    let n = xs.len();
    let (plus, minus) = (g.values[..n].to_vec(), g.values[n..].to_vec());
    let (sp, sm) = (g.std_errors[..n].to_vec(), g.std_errors[n..].to_vec());
    let wp: Vec<f64> = sp.iter().map(|s| 1.0 / s.max(1e-300)).collect();
    let wm: Vec<f64> = sm.iter().map(|s| 1.0 / s.max(1e-300)).collect();
    let mut checks = checks_from(spec, tag, xs, &plus, &minus, Some((&wp, &wm)), degree)?;
    let worst = sp.iter().chain(&sm).cloned().fold(0.0, f64::max);
    for c in &mut checks {
        c.std_error = Some(worst);
    }
    let window_sensitivity = window_sensitivity(xs, &plus, &minus, Some((&wp, &wm)), degree);
    Ok(ModelReport {
        spec: spec.clone(),
        xs: xs.to_vec(),
        plus,
        minus,
        std_errors: Some((sp, sm)),
        checks,
        window_sensitivity,
    })
}

/// Two-variable spec with `|u| < v`.
pub fn golden_spec() -> ModelIntegralSpec {
    ModelIntegralSpec::single(2, 0.3, 1.0, 0.8, 0.8)
}

/// Three-variable Monte Carlo spec with `|u| > v` and `ϑ < 1`.
pub fn mc_spec() -> ModelIntegralSpec {
    ModelIntegralSpec {
        ell: 3,
        n_r: vec![1, 1, 1],
        eps_r: vec![1, 1, 1],
        xi_r: vec![1.0, 1.0, 1.0],
        u: 1.5,
        v: 1.0,
        delta_plus: 0.45,
        delta_minus: 0.4,
    }
}

/// Quadrature grid and smooth degree for [`golden_spec`].
pub fn quadrature_grid() -> (Vec<f64>, usize) {
    (log_grid(1e-5, 1e-2, 6), 3)
}

/// Monte Carlo grid, smooth degree, sample count and seed for [`mc_spec`].
pub fn mc_setup() -> (Vec<f64>, usize, u64, u64) {
    (log_grid(1e-3, 1e-1, 6), 2, 1 << 16, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_exponents() {
        let s = golden_spec();
        assert!((s.theta() - 2.1).abs() < 1e-15);
        assert_eq!(s.varsigma(), -1.0);
        assert!((s.nu(1) - 1.6).abs() < 1e-15);
        assert!((s.nu(-1) - 1.5).abs() < 1e-15);
        let p = s.prediction(0.01).unwrap();
        assert!((p.weights.0 / p.weights.1 - 0.951_056_516_295_153_6).abs() < 1e-12);
        let m = mc_spec();
        assert!((m.theta() - 0.85).abs() < 1e-15);
        assert_eq!((m.sigma(1) < 0.0, m.sigma(-1) > 0.0), (true, true));
        assert!((m.nu(1) - 0.4).abs() < 1e-15 && (m.nu(-1) - 1.45).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let mut s = golden_spec();
        s.u = 1.0;
        assert!(s.validate().is_err());
        let mut s = golden_spec();
        s.eps_r = vec![1, -1];
        assert!(s.validate().is_err());
        let s =
            ModelIntegralSpec { ell: 2, n_r: vec![1, 1], eps_r: vec![1, -1], xi_r: vec![1.0, 1.0], ..golden_spec() };
        assert!(s.validate().is_err());
        let weak = ModelIntegralSpec { delta_plus: 0.1, ..mc_spec() };
        assert!(model_integral_mc(&weak, &[0.1], 1000, 1).is_err());
    }

    /// With `δ_± = 1` the integrand is the Gaussian on `{z_± > −x}`; in 2D with
    /// `ε = +1` and a huge `x` this is the whole plane: `∫e^{−|y|²}(y₁−y₂)² = π`.
    #[test]
    fn quadrature_full_plane() {
        let s = ModelIntegralSpec::single(2, 0.3, 1.0, 1.0, 1.0);
        let got = model_integral_quad(&s, 100.0, 1e-12).unwrap().value;
        assert!((got - PI).abs() < 1e-10, "{got}");
        let a = model_integral_quad(&s, -0.2, 1e-12).unwrap().value;
        let b = model_integral_quad(&s, 0.1, 1e-12).unwrap().value;
        assert!(0.0 <= a && a <= b && b <= got);
    }

    /// Plain Gaussian sampling of all coordinates: mean and standard error.
    fn plain_mc(spec: &ModelIntegralSpec, x: f64, n: usize, seed: u64) -> (f64, f64) {
        use rand_distr::StandardNormal;
        let vars = spec.variables();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut s1, mut s2) = (0.0, 0.0);
        let mut y = vec![0.0; vars.len()];
        for _ in 0..n {
            for v in y.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *v = g * std::f64::consts::FRAC_1_SQRT_2;
            }
            let (zp, zm, vdm) = parts(spec, &vars, &y);
            let f = vdm * jump_power(x + zp, spec.delta_plus) * jump_power(x + zm, spec.delta_minus);
            s1 += f;
            s2 += f * f;
        }
        let norm = PI.powf(0.5 * vars.len() as f64);
        let mean = s1 / n as f64;
        (norm * mean, norm * ((s2 / n as f64 - mean * mean) / n as f64).sqrt())
    }

    /// `(z₊, z₋, V)` at `y`.
    fn parts(spec: &ModelIntegralSpec, vars: &[(f64, f64, usize)], y: &[f64]) -> (f64, f64, f64) {
        let (mut quad, mut lin, mut vdm) = (0.0, 0.0, 1.0);
        for (i, &(e, xi, g)) in vars.iter().enumerate() {
            quad += 0.5 * e * y[i] * y[i];
            lin += xi * y[i];
            for j in 0..i {
                if vars[j].2 == g {
                    vdm *= (y[i] - y[j]).powi(2);
                }
            }
        }
        (quad - (spec.u + spec.v) * lin, quad - (spec.u - spec.v) * lin, vdm)
    }

    #[test]
    fn stratified_mc_agrees_with_quadrature() {
        let s = golden_spec();
        let xs = [0.05, -0.05];
        let g = model_integral_mc(&s, &xs, 4000, 7).unwrap();
        for (k, &x) in xs.iter().enumerate() {
            let q = model_integral_quad(&s, x, 1e-11).unwrap().value;
            assert!(
                (g.values[k] - q).abs() < 4.0 * g.std_errors[k],
                "{x}: {} ± {} vs {q}",
                g.values[k],
                g.std_errors[k]
            );
        }
        assert_eq!(g, model_integral_mc(&s, &xs, 4000, 7).unwrap());
    }

    #[test]
    fn stratified_mc_agrees_with_plain_sampling() {
        let s = mc_spec();
        for x in [0.05, -0.05] {
            let g = model_integral_mc(&s, &[x], 2000, 3).unwrap();
            let (m, se) = plain_mc(&s, x, 1_000_000, 11);
            let tol = 4.0 * (se * se + g.std_errors[0].powi(2)).sqrt();
            assert!((g.values[0] - m).abs() < tol, "{x}: {} ± {} vs {m} ± {se}", g.values[0], g.std_errors[0]);
            assert!(g.values[0] >= 0.0 && g.std_errors[0] > 0.0);
        }
    }
}
