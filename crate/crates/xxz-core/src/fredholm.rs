//! Nyström discretisation of
//! `f(λ) + ∫_{−Q}^{Q} 𝒦(λ − μ) f(μ) dμ = g(λ)`
//! on Gauss–Legendre nodes, with a dense LU factorisation and the natural
//! off-grid extension `f(λ) = g(λ) − Σ_j w_j 𝒦(λ − μ_j) f_j`.

use crate::kernels::Rapidity;
use crate::quadrature::gauss_legendre;
use crate::{Error, Real, Result};
use std::sync::Arc;

/// Gauss–Legendre nodes and weights on `[−Q, Q]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid<T> {
    q: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn new(q: T, n: usize) -> Result<Self> {
        if !(q > T::zero()) || !q.is_finite() {
            return Err(Error::domain(format!("interval half-width must be positive, got {q}")));
        }
        if n < 8 {
            return Err(Error::domain(format!("quadrature order must be at least 8, got {n}")));
        }
        let (x, w) = gauss_legendre::<T>(n)?;
        Ok(QuadratureGrid {
            q,
            nodes: x.into_iter().map(|x| q * x).collect(),
            weights: w.into_iter().map(|w| q * w).collect(),
        })
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_j w_j f(μ_j)`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Nodal values of a solution, sharing its grid.
#[derive(Clone, Debug)]
pub struct GridFunction<T> {
    grid: Arc<QuadratureGrid<T>>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: Arc<QuadratureGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain("grid function length does not match its grid"));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn grid(&self) -> &QuadratureGrid<T> {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<QuadratureGrid<T>> {
        Arc::clone(&self.grid)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `∫_{−Q}^{Q} a(μ) f(μ) dμ` by the grid rule.
    pub fn weighted_sum<F: FnMut(T) -> T>(&self, mut a: F) -> T {
        let g = &*self.grid;
        g.nodes.iter().zip(&g.weights).zip(&self.values).fold(T::zero(), |acc, ((&x, &w), &v)| acc + w * a(x) * v)
    }

    /// Fallible variant of [`weighted_sum`](Self::weighted_sum).
    pub fn try_weighted_sum<F: FnMut(T) -> Result<T>>(&self, mut a: F) -> Result<T> {
        let g = &*self.grid;
        let mut acc = T::zero();
        for ((&x, &w), &v) in g.nodes.iter().zip(&g.weights).zip(&self.values) {
            acc = acc + w * a(x)? * v;
        }
        Ok(acc)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Dense LU factorisation with partial pivoting, row-major.
#[derive(Clone, Debug)]
struct Lu<T> {
    n: usize,
    a: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> Lu<T> {
    fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let mut min_pivot = T::infinity();
        for k in 0..n {
            let (p, big) =
                (k..n)
                    .map(|i| (i, a[i * n + k].abs()))
                    .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(big);
            if !(big > scale * T::epsilon() * T::from_usize(n).expect("small integer")) {
                return Err(Error::numerical(format!(
                    "singular Nyström matrix: pivot {big} at column {k}, scale {scale}"
                )));
            }
            if p != k {
                piv.swap(p, k);
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                }
            }
            let inv = T::one() / a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] * inv;
                a[i * n + k] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] = a[i * n + j] - l * u;
                    }
                }
            }
        }
        Ok(Lu { n, a, piv })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.a[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.a[i * n + j] * x[j];
            }
            x[i] = s / self.a[i * n + i];
        }
        x
    }

    /// Solves `Aᵀ y = c`.
    fn solve_transposed(&self, c: &[T]) -> Vec<T> {
        let n = self.n;
        // Aᵀ = Uᵀ Lᵀ P
        let mut z = c.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s = s - self.a[j * n + i] * z[j];
            }
            z[i] = s / self.a[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s = s - self.a[j * n + i] * z[j];
            }
            z[i] = s;
        }
        let mut y = vec![T::zero(); n];
        for (i, &p) in self.piv.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

/// Factorised `I + W𝒦` for a fixed difference kernel on a fixed grid.
#[derive(Clone, Debug)]
pub struct NystromSolver<T> {
    grid: Arc<QuadratureGrid<T>>,
    lu: Lu<T>,
}

impl<T: Real> NystromSolver<T> {
    /// Assembles and factors `A_ij = δ_ij + w_j 𝒦(λ_i − λ_j)`.
    pub fn new<K>(grid: Arc<QuadratureGrid<T>>, kernel: K) -> Result<Self>
    where
        K: Fn(T) -> Result<T>,
    {
        let n = grid.len();
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let k = kernel(grid.nodes[i] - grid.nodes[j])?;
                a[i * n + j] = grid.weights[j] * k + if i == j { T::one() } else { T::zero() };
            }
        }
        let lu = Lu::factor(n, a)?;
        Ok(NystromSolver { grid, lu })
    }

    pub fn grid(&self) -> &QuadratureGrid<T> {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<QuadratureGrid<T>> {
        Arc::clone(&self.grid)
    }

    /// Solution for driving term values `g(λ_i)`.
    pub fn solve_values(&self, rhs: &[T]) -> Result<GridFunction<T>> {
        if rhs.len() != self.grid.len() {
            return Err(Error::domain("right-hand side length does not match the grid"));
        }
        GridFunction::new(self.shared_grid(), self.lu.solve(rhs))
    }

    /// Solution for the driving term `g`.
    pub fn solve<G>(&self, rhs: G) -> Result<GridFunction<T>>
    where
        G: Fn(T) -> Result<T>,
    {
        let g: Result<Vec<T>> = self.grid.nodes.iter().map(|&x| rhs(x)).collect();
        self.solve_values(&g?)
    }

    /// `y` with `(I + W𝒦)ᵀ y = c`, so that `cᵀf = yᵀg` for every solve `f` of `g`.
    pub fn solve_transposed(&self, c: &[T]) -> Result<Vec<T>> {
        if c.len() != self.grid.len() {
            return Err(Error::domain("adjoint right-hand side length does not match the grid"));
        }
        Ok(self.lu.solve_transposed(c))
    }
}

/// One-shot solve of `f + 𝒦∗f = g` on `grid`.
pub fn solve_second_kind<T, K, G>(kernel: K, rhs: G, grid: Arc<QuadratureGrid<T>>) -> Result<GridFunction<T>>
where
    T: Real,
    K: Fn(T) -> Result<T>,
    G: Fn(T) -> Result<T>,
{
    NystromSolver::new(grid, kernel)?.solve(rhs)
}

/// Nyström extension `f(λ) = g(λ) − Σ_j w_j 𝒦(λ − μ_j) f_j` at any rapidity,
/// given `g(λ)` and a kernel accepting shifted arguments.
pub fn evaluate_offgrid<T, K>(f: &GridFunction<T>, kernel: K, rhs_at: T, lambda: Rapidity<T>) -> Result<T>
where
    T: Real,
    K: Fn(Rapidity<T>) -> Result<T>,
{
    let conv = f.try_weighted_sum(|mu| kernel(lambda - Rapidity::real(mu)))?;
    Ok(rhs_at - conv)
}

/// `max_i |f_i + Σ_j w_j 𝒦(λ_i − λ_j) f_j − g(λ_i)|`.
pub fn residual<T, K, G>(f: &GridFunction<T>, kernel: K, rhs: G) -> Result<T>
where
    T: Real,
    K: Fn(T) -> Result<T>,
    G: Fn(T) -> Result<T>,
{
    let mut worst = T::zero();
    for (i, &x) in f.grid().nodes().iter().enumerate() {
        let conv = f.try_weighted_sum(|mu| kernel(x - mu))?;
        worst = worst.max((f.values()[i] + conv - rhs(x)?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel_k, Angle};

    fn lieb(zeta: f64) -> impl Fn(f64) -> Result<f64> {
        let eta = Angle::new(zeta).unwrap();
        move |x| kernel_k(Rapidity::real(x), eta)
    }

    #[test]
    fn grid_integrates_polynomials() {
        let g = QuadratureGrid::<f64>::new(1.0, 16).unwrap();
        assert_eq!(g.len(), 16);
        for i in 0..16 {
            assert!((g.nodes()[i] + g.nodes()[15 - i]).abs() < 1e-15);
        }
        let g = QuadratureGrid::<f64>::new(2.5, 32).unwrap();
        assert!((g.integrate(|_| 1.0) - 5.0).abs() < 1e-13);
        let g = QuadratureGrid::<f64>::new(1.0, 32).unwrap();
        assert!((g.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-14);
        assert!(QuadratureGrid::<f64>::new(1.0, 4).is_err());
        assert!(QuadratureGrid::<f64>::new(-1.0, 16).is_err());
    }

    #[test]
    fn zero_kernel_returns_rhs() {
        let grid = Arc::new(QuadratureGrid::new(1.3, 20).unwrap());
        let f = solve_second_kind(|_| Ok(0.0), |x: f64| Ok(x.cos()), grid).unwrap();
        for (x, v) in f.grid().nodes().iter().zip(f.values()) {
            assert_eq!(*v, x.cos());
        }
        let v = evaluate_offgrid(&f, |_| Ok(0.0), 0.7, Rapidity::real(3.0)).unwrap();
        assert_eq!(v, 0.7);
    }

    #[test]
    fn residual_symmetry_and_extension() {
        let zeta = 1.1;
        let k = lieb(zeta);
        let grid = Arc::new(QuadratureGrid::new(1.2, 64).unwrap());
        let f = solve_second_kind(&k, |_| Ok(1.0), Arc::clone(&grid)).unwrap();
        assert!(residual(&f, &k, |_| Ok(1.0)).unwrap() < 1e-13);
        let n = grid.len();
        for i in 0..n {
            assert!((f.values()[i] - f.values()[n - 1 - i]).abs() < 1e-13);
        }
        let eta = Angle::new(zeta).unwrap();
        for i in [0, 7, 31] {
            let x = grid.nodes()[i];
            let e = evaluate_offgrid(&f, |r| kernel_k(r, eta), 1.0, Rapidity::real(x)).unwrap();
            assert!((e - f.values()[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_self_convergence() {
        let k = lieb(0.96 * std::f64::consts::FRAC_PI_2);
        let g = |x: f64| Ok(0.4 - 2.0 / (2.0 * x).cosh());
        let eta = Angle::new(0.96 * std::f64::consts::FRAC_PI_2).unwrap();
        let at = |n: usize| {
            let grid = Arc::new(QuadratureGrid::new(1.0, n).unwrap());
            let f = solve_second_kind(&k, g, grid).unwrap();
            evaluate_offgrid(&f, |r| kernel_k(r, eta), g(0.37).unwrap(), Rapidity::real(0.37)).unwrap()
        };
        let (a, b, c) = (at(16), at(32), at(64));
        assert!((b - c).abs() < 1e-14 + 1e-3 * (a - b).abs());
        assert!((b - c).abs() < 1e-13);
    }

    #[test]
    fn transposed_solve_is_adjoint() {
        let k = lieb(2.0);
        let grid = Arc::new(QuadratureGrid::new(0.8, 24).unwrap());
        let s = NystromSolver::new(grid, &k).unwrap();
        let g: Vec<f64> = s.grid().nodes().iter().map(|x| (3.0 * x).sin() + 0.2).collect();
        let c: Vec<f64> = s.grid().nodes().iter().map(|x| x * x - 0.1 * x).collect();
        let f = s.solve_values(&g).unwrap();
        let y = s.solve_transposed(&c).unwrap();
        let lhs: f64 = c.iter().zip(f.values()).map(|(a, b)| a * b).sum();
        let rhs: f64 = y.iter().zip(&g).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn singular_system_reported() {
        let grid = Arc::new(QuadratureGrid::<f64>::new(1.0, 8).unwrap());
        // I + W𝒦 with 𝒦 ≡ −1/2 annihilates constants on [−1, 1]
        let err = NystromSolver::new(grid, |_| Ok(-0.5)).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn generic_in_f32() {
        let grid = Arc::new(QuadratureGrid::<f32>::new(1.0, 16).unwrap());
        let f = solve_second_kind(|x: f32| Ok(0.1 * (-x * x).exp()), |_| Ok(1.0f32), grid).unwrap();
        assert!(f.values().iter().all(|v| *v < 1.0 && *v > 0.7));
    }
}
