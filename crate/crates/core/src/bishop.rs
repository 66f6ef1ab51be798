//! Analytic discs, Bishop's equation, and the matrix functions `G`, `G0`
//! with their constants `C` and `K`.

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::circle::{cauchy_pv_conj_entries, cauchy_pv_entries, CircleFunction, Grid, Shape, C64, TAU_HOLO};
use crate::error::{Error, Result};
use crate::manifold::{stack, GraphManifold};

/// Tolerance for the base-point normalization `phi(1) = 0`.
pub const TAU_BASE: f64 = 1e-10;
/// Smallest admissible `|det|` of the holomorphic extension of `G(1 + i h_y)`.
pub const TAU_DET: f64 = 1e-6;

/// Boundary values of a holomorphic map `D -> C^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticDisc {
    components: Vec<CircleFunction>,
    base_normalized: bool,
}

impl AnalyticDisc {
    /// Checks that every component extends holomorphically.
    pub fn new(components: Vec<CircleFunction>) -> Result<Self> {
        for (j, c) in components.iter().enumerate() {
            if c.shape() != Shape::Scalar {
                return Err(Error::PreconditionViolated(format!("component {j} is not scalar")));
            }
            if c.negative_tail() > TAU_HOLO * c.l2_norm() {
                return Err(Error::PreconditionViolated(format!(
                    "component {j} does not extend holomorphically (negative tail {:e})",
                    c.negative_tail()
                )));
            }
        }
        let base_normalized = components
            .iter()
            .all(|c| c.at_one()[0].norm() <= TAU_BASE * c.l2_norm().max(1.0));
        Ok(AnalyticDisc {
            components,
            base_normalized,
        })
    }

    /// Disc whose components are polynomials `sum_k c_k sigma^k`.
    pub fn from_polynomials(coeffs: &[Vec<C64>]) -> Result<Self> {
        let comps = coeffs
            .iter()
            .map(|p| {
                let d = p.len().saturating_sub(1);
                let mut full = vec![C64::new(0.0, 0.0); 2 * d + 1];
                full[d..d + p.len()].copy_from_slice(p);
                CircleFunction::from_coeffs(d, full)
            })
            .collect();
        Self::new(comps)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn components(&self) -> &[CircleFunction] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &CircleFunction {
        &self.components[j]
    }

    pub fn is_base_normalized(&self) -> bool {
        self.base_normalized
    }

    /// All components as one vector-valued function.
    pub fn as_vector(&self) -> CircleFunction {
        stack(&self.components)
    }

    pub fn eval_boundary(&self, theta: f64) -> Vec<C64> {
        self.components.iter().map(|c| c.eval_scalar(theta)).collect()
    }

    /// `phi(sigma_j)` at every grid point.
    pub fn boundary_points(&self, grid: Grid) -> Vec<Vec<C64>> {
        let samples: Vec<Vec<C64>> = self.components.iter().map(|c| c.scalar_samples(grid)).collect();
        (0..grid.size)
            .map(|j| samples.iter().map(|s| s[j]).collect())
            .collect()
    }

    /// Power-series evaluation inside the disc.
    pub fn eval_interior(&self, zeta: C64) -> Result<Vec<C64>> {
        if zeta.norm() >= 1.0 {
            return Err(Error::PreconditionViolated(format!(
                "interior evaluation needs |zeta| < 1, found {}",
                zeta.norm()
            )));
        }
        Ok(self.components.iter().map(|c| c.eval_interior(zeta)[0]).collect())
    }

    /// `phi o alpha` for the automorphism `alpha(zeta) = (zeta + a)/(1 + conj(a) zeta)`,
    /// refit at `degree`; returns the disc and the largest refit residual.
    pub fn pullback(&self, a: C64, degree: usize) -> Result<(AnalyticDisc, f64)> {
        let mut residual = 0.0f64;
        let mut comps = Vec::with_capacity(self.n());
        for c in &self.components {
            let p = crate::circle::mobius_pullback(c, a, degree)?;
            residual = residual.max(p.refit_residual);
            comps.push(p.function);
        }
        Ok((AnalyticDisc::new(comps)?, residual))
    }

    pub fn scaled(&self, t: f64) -> AnalyticDisc {
        AnalyticDisc {
            components: self.components.iter().map(|c| c.scale(C64::new(t, 0.0))).collect(),
            base_normalized: self.base_normalized,
        }
    }
}

/// Power-series evaluation of a disc at an interior point.
pub fn eval_interior(phi: &AnalyticDisc, zeta: C64) -> Result<Vec<C64>> {
    phi.eval_interior(zeta)
}

/// `w = eps (sigma - 1) e_1` in `C^s`.
pub fn linear_w(s: usize, eps: f64) -> AnalyticDisc {
    let mut comps = vec![CircleFunction::zeros(Shape::Scalar, 1); s];
    if s > 0 {
        comps[0] = CircleFunction::from_coeffs(1, vec![C64::new(0.0, 0.0), C64::new(-eps, 0.0), C64::new(eps, 0.0)]);
    }
    AnalyticDisc::new(comps).expect("polynomial discs are holomorphic")
}

/// Discrete stand-in for the distance of a disc to the constant discs:
/// `sup |phi - mean phi| + sup |d phi / d theta|`.
pub fn size_proxy(phi: &AnalyticDisc) -> f64 {
    let v = phi.as_vector();
    let grid = Grid::for_degree(v.degree().max(8));
    let centred = v.sub(&CircleFunction::from_entries(
        Shape::Vector(phi.n()),
        &v.mean().into_iter().map(CircleFunction::constant).collect::<Vec<_>>(),
    ));
    sup_euclidean(&centred, grid) + sup_euclidean(&v.derivative(), grid)
}

fn sup_euclidean(f: &CircleFunction, grid: Grid) -> f64 {
    let s = f.samples(grid);
    (0..grid.size)
        .map(|j| s.iter().map(|e| e[j].norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Options for the fixed-point solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BishopOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Working degree of boundary data.
    pub degree: usize,
    /// Grid size used to sample `h`.
    pub grid: usize,
}

impl Default for BishopOptions {
    fn default() -> Self {
        BishopOptions {
            tol: 1e-12,
            max_iter: 500,
            degree: 64,
            grid: 512,
        }
    }
}

impl BishopOptions {
    fn grid(&self) -> Grid {
        let min = Grid::for_degree(self.degree).size;
        Grid::with_size(self.grid.max(min).next_power_of_two())
    }
}

/// l2 operator norm of `T1` on trigonometric polynomials of the given
/// degree, by power iteration on `T1^* T1`.
pub fn hilbert_t1_norm(degree: usize) -> f64 {
    let n = degree as isize;
    let sign = |k: isize| k.signum() as f64;
    let apply = |v: &[C64]| -> Vec<C64> {
        let mut w: Vec<C64> = (-n..=n)
            .zip(v)
            .map(|(k, a)| a * C64::new(0.0, -sign(k)))
            .collect();
        let s: C64 = w.iter().sum();
        w[degree] -= s;
        w
    };
    let apply_adjoint = |w: &[C64]| -> Vec<C64> {
        let w0 = w[degree];
        (-n..=n)
            .zip(w)
            .map(|(k, a)| (a - w0) * C64::new(0.0, sign(k)))
            .collect()
    };
    let mut v: Vec<C64> = (-n..=n).map(|k| C64::new(1.0 + 0.01 * k as f64, 0.0)).collect();
    let mut estimate = 0.0;
    for _ in 0..500 {
        let u = apply_adjoint(&apply(&v));
        let norm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v = u.into_iter().map(|c| c / norm).collect();
        if (next - estimate).abs() <= 1e-14 * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate.sqrt()
}

fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    a.singular_values().max()
}

/// Attached disc produced by Bishop's equation.
#[derive(Clone, Debug, Serialize)]
pub struct BishopSolution {
    pub iterations: usize,
    pub final_update_norm: f64,
    pub attachment_residual: f64,
    pub aliasing_tail: f64,
    /// Largest `|h_y|` met by the iterates.
    pub lambda_observed: f64,
    pub t1_norm: f64,
    pub update_history: Vec<f64>,
    pub disc: AnalyticDisc,
    #[serde(skip)]
    pub x: CircleFunction,
    #[serde(skip)]
    pub y: CircleFunction,
    #[serde(skip)]
    pub w: AnalyticDisc,
    #[serde(skip)]
    pub options: BishopOptions,
}

impl BishopSolution {
    /// `(w, y)` at every grid point of `grid`.
    pub fn boundary_wy(&self, grid: Grid) -> Vec<(Vec<C64>, Vec<f64>)> {
        let ws = self.w.boundary_points(grid);
        let ys = self.y.samples(grid);
        ws.into_iter()
            .enumerate()
            .map(|(j, w)| (w, ys.iter().map(|e| e[j].re).collect()))
            .collect()
    }

    pub fn grid(&self) -> Grid {
        self.options.grid()
    }
}

fn real_samples(f: &CircleFunction, grid: Grid) -> Vec<Vec<f64>> {
    let s = f.samples(grid);
    (0..grid.size).map(|j| s.iter().map(|e| e[j].re).collect()).collect()
}

fn fit_real_vector(values: &[Vec<f64>], degree: usize) -> (CircleFunction, f64) {
    let d = values[0].len();
    let samples: Vec<Vec<C64>> = (0..d)
        .map(|e| values.iter().map(|v| C64::new(v[e], 0.0)).collect())
        .collect();
    let fitted = CircleFunction::fit_samples(Shape::Vector(d), &samples, degree);
    (fitted.function.real_part(), fitted.aliasing_tail)
}

/// Solves `y = T1 h(w, y)` by Picard iteration from `y = 0` and lifts `w`
/// to the attached disc `(z, w)` with `z = x + i T1 x`.
pub fn solve_bishop(mf: &GraphManifold, w: &AnalyticDisc, opts: &BishopOptions) -> Result<BishopSolution> {
    if w.n() != mf.s() {
        return Err(Error::PreconditionViolated(format!(
            "w must have {} components, found {}",
            mf.s(),
            w.n()
        )));
    }
    if !w.is_base_normalized() {
        return Err(Error::PreconditionViolated("w(1) = 0 is required".into()));
    }
    let grid = opts.grid();
    let n = opts.degree;
    let t1 = hilbert_t1_norm(n);
    let ws = w.boundary_points(grid);
    let mut ys = vec![vec![0.0; mf.m]; grid.size];
    let mut history = Vec::new();
    let mut lambda_obs = 0.0f64;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        for (wj, yj) in ws.iter().zip(&ys) {
            lambda_obs = lambda_obs.max(spectral_norm(&mf.h_y(wj, yj)));
        }
        if lambda_obs * t1 >= 1.0 {
            return Err(Error::ContractionViolated {
                lambda: lambda_obs,
                operator_norm: t1,
            });
        }
        let xs: Vec<Vec<f64>> = ws.iter().zip(&ys).map(|(wj, yj)| mf.h(wj, yj)).collect();
        let (x, _) = fit_real_vector(&xs, n);
        let next = real_samples(&x.hilbert_t1(), grid);
        let update = next
            .iter()
            .zip(&ys)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        ys = next;
        history.push(update);
        if update < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: opts.max_iter,
            last_update: history.last().copied().unwrap_or(f64::NAN),
        });
    }
    let xs: Vec<Vec<f64>> = ws.iter().zip(&ys).map(|(wj, yj)| mf.h(wj, yj)).collect();
    let (x, aliasing_tail) = fit_real_vector(&xs, n);
    let y = x.hilbert_t1().real_part();
    let z = x.add(&y.scale(C64::new(0.0, 1.0)));

    let x_s = real_samples(&x, grid);
    let y_s = real_samples(&y, grid);
    let attachment = ws
        .iter()
        .zip(x_s.iter().zip(&y_s))
        .flat_map(|(wj, (xj, yj))| {
            let h = mf.h(wj, yj);
            xj.iter().zip(h).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);

    let mut comps = z.entries();
    comps.extend(w.components().iter().cloned());
    Ok(BishopSolution {
        iterations: history.len(),
        final_update_norm: history.last().copied().unwrap_or(0.0),
        attachment_residual: attachment,
        aliasing_tail,
        lambda_observed: lambda_obs,
        t1_norm: t1,
        update_history: history,
        disc: AnalyticDisc::new(comps)?,
        x,
        y,
        w: w.clone(),
        options: *opts,
    })
}

fn ser_real_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect();
    rows.serialize(s)
}

/// `G`, `G0`, `C`, `K` along a solved disc and the residuals of their
/// defining identities.
#[derive(Clone, Debug, Serialize)]
pub struct GMatrices {
    #[serde(skip)]
    pub g: CircleFunction,
    #[serde(skip)]
    pub g0: CircleFunction,
    /// `h_y o phi`.
    #[serde(skip)]
    pub h_y: CircleFunction,
    #[serde(serialize_with = "ser_real_matrix")]
    pub c: DMatrix<f64>,
    #[serde(serialize_with = "ser_real_matrix")]
    pub k: DMatrix<f64>,
    pub g_iterations: usize,
    pub g0_iterations: usize,
    /// `sup |G - 1 + T1[G h_y]|`.
    pub g_residual: f64,
    /// `sup |G0 - 1 + T0[G0 h_y]|`.
    pub g0_residual: f64,
    /// `max |G0 G^{-1} - C|` over the grid.
    pub constancy_residual: f64,
    /// `sup |T0 G0 - G0 h_y + K|`.
    pub lemma2_residual: f64,
    /// Relative negative tail of `G (1 + i h_y)`.
    pub holomorphy_residual: f64,
    pub min_extension_det: f64,
    pub det_c: f64,
}

/// `h_y o phi` as an `m x m` matrix function.
pub fn h_y_on_disc(mf: &GraphManifold, sol: &BishopSolution) -> (CircleFunction, f64) {
    let grid = sol.grid();
    let values: Vec<DMatrix<C64>> = sol
        .boundary_wy(grid)
        .iter()
        .map(|(w, y)| mf.h_y(w, y).map(|v| C64::new(v, 0.0)))
        .collect();
    let fitted = CircleFunction::fit_matrix_samples(&values, Some(sol.options.degree));
    (fitted.function, fitted.aliasing_tail)
}

/// `h_w o phi` as an `m x (n-m)` matrix function.
pub fn h_w_on_disc(mf: &GraphManifold, sol: &BishopSolution) -> (CircleFunction, f64) {
    let grid = sol.grid();
    let values: Vec<DMatrix<C64>> = sol
        .boundary_wy(grid)
        .iter()
        .map(|(w, y)| mf.h_w(w, y))
        .collect();
    let fitted = CircleFunction::fit_matrix_samples(&values, Some(sol.options.degree));
    (fitted.function, fitted.aliasing_tail)
}

fn picard_matrix(
    h: &CircleFunction,
    opts: &BishopOptions,
    transform: impl Fn(&CircleFunction) -> CircleFunction,
) -> Result<(CircleFunction, usize)> {
    let m = h.shape().dims().0;
    let id = CircleFunction::identity(m);
    let mut g = id.with_degree(opts.degree);
    for it in 1..=opts.max_iter {
        let next = id.sub(&transform(&g.mul_truncated(h, opts.degree))).with_degree(opts.degree);
        let update = next.sub(&g).sup_bound();
        g = next;
        if update < opts.tol {
            return Ok((g, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        last_update: f64::NAN,
    })
}

fn check_matrix_contraction(h: &CircleFunction, t1: f64) -> Result<()> {
    let grid = Grid::for_degree(h.degree());
    let lambda = h
        .matrix_samples(grid)
        .iter()
        .map(|v| v.singular_values().max())
        .fold(0.0, f64::max);
    if lambda * t1 >= 1.0 {
        return Err(Error::ContractionViolated {
            lambda,
            operator_norm: t1,
        });
    }
    Ok(())
}

/// Solves `G = 1 - T1[G h_y]`.
pub fn solve_g(h_y: &CircleFunction, opts: &BishopOptions) -> Result<(CircleFunction, usize)> {
    check_matrix_contraction(h_y, hilbert_t1_norm(opts.degree))?;
    picard_matrix(h_y, opts, |f| f.hilbert_t1())
}

/// Solves `G0 = 1 - T0[G0 h_y]`.
pub fn solve_g0(h_y: &CircleFunction, opts: &BishopOptions) -> Result<(CircleFunction, usize)> {
    check_matrix_contraction(h_y, 1.0)?;
    picard_matrix(h_y, opts, |f| f.hilbert_t0())
}

/// `C = mean(G0 G^{-1})` and `max |G0 G^{-1} - C|` over a grid.
pub fn constant_c(g: &CircleFunction, g0: &CircleFunction) -> Result<(DMatrix<f64>, f64)> {
    let grid = Grid::for_degree(g.degree().max(g0.degree()));
    let gs = g.matrix_samples(grid);
    let g0s = g0.matrix_samples(grid);
    let mut products = Vec::with_capacity(grid.size);
    for (a, b) in g0s.iter().zip(&gs) {
        let inv = b.clone().try_inverse().ok_or(Error::SingularG)?;
        products.push(a * inv);
    }
    let m = g.shape().dims().0;
    let mean = products
        .iter()
        .fold(DMatrix::<C64>::zeros(m, m), |acc, p| acc + p)
        / C64::new(grid.size as f64, 0.0);
    let residual = products
        .iter()
        .flat_map(|p| (p - &mean).iter().map(|v| v.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    let imag = mean.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok((mean.map(|v| v.re), residual.max(imag)))
}

fn min_extension_det(e: &CircleFunction) -> f64 {
    let mut min = f64::INFINITY;
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let count = if r == 0.0 { 1 } else { 64 };
        for j in 0..count {
            let zeta = C64::from_polar(r, std::f64::consts::TAU * j as f64 / count as f64);
            min = min.min(e.eval_interior_matrix(zeta).determinant().norm());
        }
    }
    min
}

/// All matrix data of a solved disc on a graph manifold.
pub fn g_matrices(mf: &GraphManifold, sol: &BishopSolution) -> Result<GMatrices> {
    let opts = sol.options;
    let (h, _) = h_y_on_disc(mf, sol);
    let (g, g_iterations) = solve_g(&h, &opts)?;
    let (g0, g0_iterations) = solve_g0(&h, &opts)?;
    let m = mf.m;
    let id = CircleFunction::identity(m);
    let i = C64::new(0.0, 1.0);

    let gh = g.mul(&h);
    let g_res = g.sub(&id).add(&gh.hilbert_t1());
    let g0h = g0.mul(&h);
    let g0_res = g0.sub(&id).add(&g0h.hilbert_t0());

    let ext = g.add(&gh.scale(i));
    let holomorphy_residual = ext.negative_tail() / ext.l2_norm().max(f64::MIN_POSITIVE);
    let min_det = min_extension_det(&ext);
    if min_det < TAU_DET {
        return Err(Error::DegenerateExtension { min_det });
    }

    let (c, constancy_residual) = constant_c(&g, &g0)?;
    let k_complex = g0h.mean_matrix();
    let lemma2 = g0
        .hilbert_t0()
        .sub(&g0h)
        .add(&CircleFunction::constant_matrix(&k_complex));
    let sup = |f: &CircleFunction| f.sup_norm(Grid::for_degree(f.degree()));
    Ok(GMatrices {
        g_residual: sup(&g_res),
        g0_residual: sup(&g0_res),
        lemma2_residual: sup(&lemma2),
        constancy_residual,
        holomorphy_residual,
        min_extension_det: min_det,
        det_c: c.determinant(),
        k: k_complex.map(|v| v.re),
        c,
        g,
        g0,
        h_y: h,
        g_iterations,
        g0_iterations,
    })
}

/// Residuals of the two integral identities linking `X` and `Y = T1 X`:
/// `int (X - K Y)/(sigma - 1) = int G0 (X - h_y Y)/(sigma - 1)` and the
/// same with `conj(sigma) - 1`. `X` is `C^m`-valued with `X(1) = 0`.
pub fn check_prop4(gm: &GMatrices, x: &CircleFunction) -> Result<(f64, f64)> {
    let m = gm.k.nrows();
    if x.shape() != Shape::Vector(m) {
        return Err(Error::PreconditionViolated(format!("X must be a vector of length {m}")));
    }
    let at_one = x.at_one().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if at_one > 1e-9 * x.l2_norm().max(1.0) {
        return Err(Error::PreconditionViolated(format!(
            "X(1) = 0 is required, found |X(1)| = {at_one:e}"
        )));
    }
    let y = x.hilbert_t1();
    let k = gm.k.map(|v| C64::new(v, 0.0));
    let lhs = x.sub(&y.left_mul_const(&k));
    let rhs = gm.g0.mul(&x.sub(&gm.h_y.mul(&y)));
    let diff = |a: Vec<C64>, b: Vec<C64>| a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    let r1 = diff(cauchy_pv_entries(&lhs)?, cauchy_pv_entries(&rhs)?);
    let r2 = diff(cauchy_pv_conj_entries(&lhs)?, cauchy_pv_conj_entries(&rhs)?);
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::cauchy_pv_at_one;
    use crate::manifold::registry;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn t1_norm_matches_closed_form() {
        for n in [1usize, 8, 64] {
            let est = hilbert_t1_norm(n);
            assert!((est - ((2 * n + 1) as f64).sqrt()).abs() < 1e-6, "n={n}: {est}");
        }
    }

    #[test]
    fn interior_evaluation_examples() {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let d = AnalyticDisc::from_polynomials(&[vec![zero, one], vec![zero]]).unwrap();
        assert_eq!(d.eval_interior(zero).unwrap(), vec![zero, zero]);
        let d = AnalyticDisc::from_polynomials(&[vec![zero, zero, one], vec![zero, one]]).unwrap();
        let v = d.eval_interior(c(0.5, 0.0)).unwrap();
        assert!((v[0] - c(0.25, 0.0)).norm() < 1e-15 && (v[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(d.eval_interior(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn size_proxy_examples() {
        let zero = c(0.0, 0.0);
        let eps = 0.2;
        let d = AnalyticDisc::from_polynomials(&[vec![zero, c(eps, 0.0)], vec![zero]]).unwrap();
        assert!((size_proxy(&d) - 2.0 * eps).abs() < 1e-14);
        assert!((size_proxy(&d.scaled(3.0)) - 6.0 * eps).abs() < 1e-13);
        let k = AnalyticDisc::from_polynomials(&[vec![c(0.3, 0.1)], vec![c(1.0, 0.0)]]).unwrap();
        assert_eq!(size_proxy(&k), 0.0);
    }

    #[test]
    fn flat_bishop_is_trivial() {
        let mf = registry::flat(2).unwrap();
        let sol = solve_bishop(&mf, &linear_w(1, 0.3), &BishopOptions::default()).unwrap();
        assert_eq!(sol.disc.component(0).l2_norm(), 0.0);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn quadric_bishop_substitution() {
        let mf = registry::quadric(2).unwrap();
        let eps = 0.1;
        let sol = solve_bishop(&mf, &linear_w(1, eps), &BishopOptions::default()).unwrap();
        assert!(sol.attachment_residual < 1e-10);
        for t in [0.0, 0.4, 2.0, 5.5] {
            let w = sol.w.eval_boundary(t)[0];
            assert!((sol.x.eval(t)[0].re - w.norm_sqr()).abs() < 1e-12);
        }
        let x = sol.x.entry(0);
        let y = sol.y.entry(0);
        assert!(x.hilbert_t1().sub(&y).l2_norm() < 1e-14);
        assert!(sol.disc.component(0).negative_tail() < 1e-14);
    }

    #[test]
    fn mixed_bishop_converges_quickly() {
        let mf = registry::mixed(0.05, 2).unwrap();
        let sol = solve_bishop(&mf, &linear_w(1, 0.1), &BishopOptions::default()).unwrap();
        assert!(sol.iterations < 50, "{} iterations", sol.iterations);
        assert!(sol.attachment_residual <= 10.0 * 1e-12);
        let ratio_bound = sol.lambda_observed * sol.t1_norm + 0.1;
        for pair in sol.update_history.windows(2) {
            if pair[0] > 1e-13 {
                assert!(pair[1] <= ratio_bound * pair[0]);
            }
        }
    }

    #[test]
    fn interior_value_matches_principal_value() {
        let mf = registry::mixed(0.05, 2).unwrap();
        let sol = solve_bishop(&mf, &linear_w(1, 0.1), &BishopOptions::default()).unwrap();
        let z0 = sol.disc.eval_interior(c(0.0, 0.0)).unwrap()[0];
        let pv = cauchy_pv_at_one(&sol.x.entry(0)).unwrap();
        assert!((z0 - pv).norm() < 1e-9, "{z0} vs {pv}");
    }

    #[test]
    fn contraction_violation_detected() {
        let mf = registry::mixed(5.0, 2).unwrap();
        let err = solve_bishop(&mf, &linear_w(1, 0.5), &BishopOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ContractionViolated { .. }));
    }

    #[test]
    fn base_point_required() {
        let mf = registry::flat(2).unwrap();
        let w = AnalyticDisc::from_polynomials(&[vec![c(0.0, 0.0), c(0.1, 0.0)]]).unwrap();
        assert!(solve_bishop(&mf, &w, &BishopOptions::default()).is_err());
    }

    #[test]
    fn g_examples() {
        let opts = BishopOptions::default();
        let zero = CircleFunction::zeros(Shape::Matrix(1, 1), 0);
        let (g, _) = solve_g(&zero, &opts).unwrap();
        assert!(g.sub(&CircleFunction::identity(1)).l2_norm() == 0.0);
        let cst = CircleFunction::constant_matrix(&DMatrix::from_element(1, 1, c(0.01, 0.0)));
        let (g, _) = solve_g(&cst, &opts).unwrap();
        assert!(g.sub(&CircleFunction::identity(1)).l2_norm() < 1e-15);

        let mf = registry::mixed(0.05, 2).unwrap();
        let sol = solve_bishop(&mf, &linear_w(1, 0.1), &opts).unwrap();
        let gm = g_matrices(&mf, &sol).unwrap();
        assert!(gm.g_residual <= 1e-10);
        assert!(gm.constancy_residual <= 1e-9);
        assert!(gm.lemma2_residual <= 1e-9);
        assert!(gm.det_c.abs() > 0.0);
        assert!((gm.g.at_one()[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn prop4_trivial_cases() {
        let opts = BishopOptions::default();
        let mf = registry::flat(2).unwrap();
        let sol = solve_bishop(&mf, &linear_w(1, 0.1), &opts).unwrap();
        let gm = g_matrices(&mf, &sol).unwrap();
        let zero = CircleFunction::zeros(Shape::Vector(1), 0);
        assert_eq!(check_prop4(&gm, &zero).unwrap(), (0.0, 0.0));
        let x = crate::random::TrigRng::seeded(5).complex_vector_vanishing_at_one(1, 6);
        assert_eq!(check_prop4(&gm, &x).unwrap(), (0.0, 0.0));
        let bad = CircleFunction::from_entries(Shape::Vector(1), &[CircleFunction::constant(c(1.0, 0.0))]);
        assert!(check_prop4(&gm, &bad).is_err());
    }
}
