//! Differential of the interior evaluation map on attached discs, the
//! holomorphic extension of the complex tangent line for defect-one discs,
//! and the codimension-two example.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::bishop::{
    g_matrices, h_w_on_disc, h_y_on_disc, hilbert_t1_norm, linear_w, solve_bishop, BishopOptions, BishopSolution,
};
use crate::circle::{cauchy_pv_entries, CircleFunction, Grid, Shape, C64};
use crate::defect::{defect_conormal, DefectOptions, KernelReport};
use crate::error::{Error, Result};
use crate::linalg::{kernel, rank};
use crate::manifold::{counterexample_polys, graph_to_implicit, registry, GraphManifold, HTerm};

/// Default number of powers in the perturbation basis.
pub const DEFAULT_NP: usize = 8;
/// Discrete Cauchy-Riemann tolerance.
pub const TAU_CR: f64 = 1e-6;
/// Tolerance for boundary directions in projective space.
pub const TAU_BND: f64 = 1e-6;

/// Perturbations `c (sigma^l - 1) e_j`, `c in {1, i}`, `1 <= l <= N_p`.
#[derive(Clone, Debug)]
pub struct PerturbationBasis {
    pub s: usize,
    pub n_p: usize,
    pub elements: Vec<CircleFunction>,
}

impl PerturbationBasis {
    pub fn standard(s: usize, n_p: usize) -> Self {
        let mut elements = Vec::with_capacity(2 * s * n_p);
        for j in 0..s {
            for l in 1..=n_p as isize {
                for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let p = CircleFunction::monomial(l, unit).sub(&CircleFunction::constant(unit));
                    let entries: Vec<CircleFunction> = (0..s)
                        .map(|e| if e == j { p.clone() } else { CircleFunction::zeros(Shape::Scalar, 0) })
                        .collect();
                    elements.push(CircleFunction::from_entries(Shape::Vector(s), &entries));
                }
            }
        }
        PerturbationBasis { s, n_p, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Data along a solved disc shared by all linearized solves.
pub struct LinearizationData {
    h_w: CircleFunction,
    h_y: CircleFunction,
    opts: BishopOptions,
}

impl LinearizationData {
    pub fn new(mf: &GraphManifold, sol: &BishopSolution) -> Result<Self> {
        let (h_y, _) = h_y_on_disc(mf, sol);
        let t1 = hilbert_t1_norm(sol.options.degree);
        let lambda = h_y
            .matrix_samples(Grid::for_degree(h_y.degree()))
            .iter()
            .map(|v| v.singular_values().max())
            .fold(0.0, f64::max);
        if lambda * t1 >= 1.0 {
            return Err(Error::ContractionViolated {
                lambda,
                operator_norm: t1,
            });
        }
        let (h_w, _) = h_w_on_disc(mf, sol);
        Ok(LinearizationData {
            h_w,
            h_y,
            opts: sol.options,
        })
    }
}

/// Complex-linear parts `X`, `Y = T1 X` of the derivative of `(x, y)`.
#[derive(Clone, Debug)]
pub struct Linearized {
    pub x: CircleFunction,
    pub y: CircleFunction,
    pub residual: f64,
    pub iterations: usize,
}

impl Linearized {
    /// `x_dot = X + conj(X)`.
    pub fn x_dot(&self) -> CircleFunction {
        self.x.add(&self.x.conj())
    }

    /// Boundary values of `z_dot = x_dot + i T1 x_dot`.
    pub fn z_dot(&self) -> CircleFunction {
        let xd = self.x_dot();
        xd.add(&xd.hilbert_t1().scale(C64::new(0.0, 1.0)))
    }
}

fn solve_linearized(data: &LinearizationData, wdot: &CircleFunction) -> Result<Linearized> {
    let a = data.h_w.mul(wdot);
    let degree = a.degree();
    let mut x = a.clone();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next = a.add(&data.h_y.mul(&x.hilbert_t1())).with_degree(degree);
        let update = next.sub(&x).sup_bound();
        x = next;
        if update < data.opts.tol {
            break;
        }
        if iterations >= data.opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                last_update: update,
            });
        }
    }
    let y = x.hilbert_t1();
    let residual = x.sub(&a).sub(&data.h_y.mul(&y)).sup_bound();
    Ok(Linearized { x, y, residual, iterations })
}

/// Solves `X = h_w w_dot + h_y Y`, `Y = T1 X` by Picard iteration.
pub fn linearized_bishop(mf: &GraphManifold, sol: &BishopSolution, wdot: &CircleFunction) -> Result<Linearized> {
    let data = LinearizationData::new(mf, sol)?;
    solve_linearized(&data, wdot)
}

/// Boundary values of `(z_dot, w_dot)` for every basis perturbation.
pub struct LinearizedFamily {
    pub n: usize,
    pub z_dot: Vec<CircleFunction>,
    pub w_dot: Vec<CircleFunction>,
    pub x_dot: Vec<CircleFunction>,
    pub max_residual: f64,
}

impl LinearizedFamily {
    pub fn new(mf: &GraphManifold, sol: &BishopSolution, basis: &PerturbationBasis) -> Result<Self> {
        let data = LinearizationData::new(mf, sol)?;
        let solved: Vec<Linearized> = basis
            .elements
            .par_iter()
            .map(|w| solve_linearized(&data, w))
            .collect::<Result<_>>()?;
        Ok(LinearizedFamily {
            n: mf.n,
            max_residual: solved.iter().map(|l| l.residual).fold(0.0, f64::max),
            z_dot: solved.iter().map(|l| l.z_dot()).collect(),
            x_dot: solved.iter().map(|l| l.x_dot()).collect(),
            w_dot: basis.elements.clone(),
        })
    }

    /// `(z_dot(zeta), w_dot(zeta))` for every basis element, `|zeta| <= 1`.
    pub fn vectors_at(&self, zeta: C64) -> Vec<Vec<C64>> {
        self.z_dot
            .iter()
            .zip(&self.w_dot)
            .map(|(z, w)| {
                let mut v = z.eval_interior(zeta);
                v.extend(w.eval_interior(zeta));
                v
            })
            .collect()
    }
}

/// Image of the differential of `phi -> phi(zeta)`.
#[derive(Clone, Debug, Serialize)]
pub struct EvalDifferentialImage {
    pub zeta: [f64; 2],
    pub vectors: Vec<Vec<[f64; 2]>>,
    pub real_dim: usize,
    pub complex_span_dim: usize,
    pub complex_codim: usize,
    pub is_complex_subspace: bool,
    pub real_singular_values: Vec<f64>,
    pub complex_singular_values: Vec<f64>,
    pub real_gap: Option<f64>,
    pub complex_gap: Option<f64>,
    /// `max |z_dot(0) + (1/pi) int x_dot/(sigma - 1)|`; zero unless `zeta = 0`.
    pub pv_crosscheck: f64,
    pub max_linearization_residual: f64,
}

fn image_from_vectors(n: usize, zeta: C64, vectors: &[Vec<C64>]) -> Result<EvalDifferentialImage> {
    let b = vectors.len();
    let real = DMatrix::from_fn(2 * n, b, |r, c| {
        let v = vectors[c][r / 2];
        if r % 2 == 0 {
            v.re
        } else {
            v.im
        }
    });
    let complex = DMatrix::from_fn(n, b, |r, c| vectors[c][r]);
    let rr = rank(&real);
    let cr = rank(&complex);
    if rr.ambiguous || cr.ambiguous {
        let best = [rr.gap_ratio, cr.gap_ratio]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
        return Err(Error::Ambiguous {
            required: crate::linalg::GAP_REQUIRED,
            best_gap: best,
        });
    }
    Ok(EvalDifferentialImage {
        zeta: [zeta.re, zeta.im],
        vectors: vectors
            .iter()
            .map(|v| v.iter().map(|c| [c.re, c.im]).collect())
            .collect(),
        real_dim: rr.rank,
        complex_span_dim: cr.rank,
        complex_codim: n - cr.rank,
        is_complex_subspace: rr.rank == 2 * cr.rank,
        real_singular_values: rr.singular_values,
        complex_singular_values: cr.singular_values,
        real_gap: rr.gap_ratio,
        complex_gap: cr.gap_ratio,
        pv_crosscheck: 0.0,
        max_linearization_residual: 0.0,
    })
}

/// Differentials `(z_dot(zeta), w_dot(zeta))` over the basis, with their real
/// and complex spans.
pub fn evaluation_differential(
    mf: &GraphManifold,
    sol: &BishopSolution,
    basis: &PerturbationBasis,
    zeta: C64,
) -> Result<EvalDifferentialImage> {
    if zeta.norm() >= 1.0 {
        return Err(Error::PreconditionViolated("evaluation point must lie in the open disc".into()));
    }
    let family = LinearizedFamily::new(mf, sol, basis)?;
    let vectors = family.vectors_at(zeta);
    let mut image = image_from_vectors(mf.n, zeta, &vectors)?;
    image.max_linearization_residual = family.max_residual;
    if zeta == C64::new(0.0, 0.0) {
        let mut worst = 0.0f64;
        for (xd, v) in family.x_dot.iter().zip(&vectors) {
            let at_one = CircleFunction::from_entries(
                xd.shape(),
                &xd.at_one().into_iter().map(CircleFunction::constant).collect::<Vec<_>>(),
            );
            for (pv, z) in cauchy_pv_entries(&xd.sub(&at_one))?.iter().zip(v) {
                worst = worst.max((pv - z).norm());
            }
        }
        image.pv_crosscheck = worst;
    }
    Ok(image)
}

/// Unit vector with its largest component (lowest index on ties) made
/// real and positive.
pub fn phase_fixed(v: &[C64]) -> Vec<C64> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    for (i, c) in v.iter().enumerate() {
        if c.norm() > v[best].norm() {
            best = i;
        }
    }
    let phase = v[best] / v[best].norm();
    v.iter().map(|c| c / (phase * norm)).collect()
}

fn annihilator(family: &LinearizedFamily, zeta: C64) -> Result<Vec<C64>> {
    let vectors = family.vectors_at(zeta);
    let w = DMatrix::from_fn(vectors.len(), family.n, |r, c| vectors[r][c]);
    let k = kernel(&w);
    if k.ambiguous {
        return Err(Error::Ambiguous {
            required: crate::linalg::GAP_REQUIRED,
            best_gap: k.gap_ratio.unwrap_or(0.0),
        });
    }
    if k.dimension != 1 {
        return Err(Error::DefectNotOne { found: k.dimension });
    }
    Ok(phase_fixed(k.basis[0].as_slice()))
}

/// Options for [`v_of_zeta_extension`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtensionOptions {
    pub radial: usize,
    pub angular: usize,
    pub r_max: f64,
    pub step: f64,
    pub boundary_points: usize,
    pub n_p: usize,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            radial: 16,
            angular: 16,
            r_max: 0.75,
            step: 1.0 / 64.0,
            boundary_points: 64,
            n_p: DEFAULT_NP,
        }
    }
}

/// Annihilating direction of `V(zeta)` at one sample point.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionSample {
    pub zeta: [f64; 2],
    pub direction: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    pub defect: usize,
    /// Coordinate used for the affine chart `a / a_j`.
    pub chart_index: usize,
    pub cr_residual: f64,
    pub boundary_residual: f64,
    pub samples: Vec<DirectionSample>,
    pub passed: bool,
}

/// Checks that `zeta -> V(zeta)` is holomorphic (through the affine chart of
/// its annihilator) and tends to the complex tangent line on the boundary.
pub fn v_of_zeta_extension(
    mf: &GraphManifold,
    sol: &BishopSolution,
    zetas: &[C64],
    opts: &ExtensionOptions,
) -> Result<ExtensionReport> {
    if mf.m != 1 {
        return Err(Error::PreconditionViolated("the extension test needs a hypersurface".into()));
    }
    let implicit = graph_to_implicit(mf);
    let defect = defect_conormal(&implicit, &sol.disc, &DefectOptions::default())?;
    if defect.dimension != 1 {
        return Err(Error::DefectNotOne {
            found: defect.dimension,
        });
    }
    let family = LinearizedFamily::new(mf, sol, &PerturbationBasis::standard(mf.s(), opts.n_p))?;
    let a0 = annihilator(&family, C64::new(0.0, 0.0))?;
    let chart_index = (0..a0.len())
        .fold(0, |best, i| if a0[i].norm() > a0[best].norm() { i } else { best });
    let chart = |zeta: C64| -> Result<Vec<C64>> {
        let a = annihilator(&family, zeta)?;
        Ok(a.iter().map(|c| c / a[chart_index]).collect())
    };

    let h = opts.step;
    let stencil = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];
    let points: Vec<C64> = (0..opts.radial)
        .flat_map(|i| {
            let r = opts.r_max * (i + 1) as f64 / opts.radial as f64;
            (0..opts.angular).map(move |j| C64::from_polar(r, std::f64::consts::TAU * j as f64 / opts.angular as f64))
        })
        .collect();
    let residuals: Vec<f64> = points
        .par_iter()
        .map(|&z| -> Result<f64> {
            let n = a0.len();
            let mut dx = vec![C64::new(0.0, 0.0); n];
            let mut dy = vec![C64::new(0.0, 0.0); n];
            for (t, wgt) in stencil {
                let fx = chart(z + C64::new(t * h, 0.0))?;
                let fy = chart(z + C64::new(0.0, t * h))?;
                for i in 0..n {
                    dx[i] += fx[i] * (wgt / (12.0 * h));
                    dy[i] += fy[i] * (wgt / (12.0 * h));
                }
            }
            let i = C64::new(0.0, 1.0);
            let mut worst = 0.0f64;
            for k in 0..n {
                let dbar = (dx[k] + i * dy[k]) * 0.5;
                let d = (dx[k] - i * dy[k]) * 0.5;
                worst = worst.max(dbar.norm() / d.norm().max(1.0));
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let cr_residual = residuals.into_iter().fold(0.0, f64::max);

    let mut boundary_residual = 0.0f64;
    for j in 0..opts.boundary_points {
        let theta = std::f64::consts::TAU * (j as f64 + 0.5) / opts.boundary_points as f64;
        let sigma = C64::from_polar(1.0, theta);
        let a = annihilator(&family, sigma)?;
        let p = sol.disc.eval_boundary(theta);
        let r = implicit.rho_z(&p);
        let rv: Vec<C64> = (0..r.ncols()).map(|c| r[(0, c)]).collect();
        let rn = rv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let rhat: Vec<C64> = rv.iter().map(|c| c / rn).collect();
        let inner: C64 = rhat.iter().zip(&a).map(|(x, y)| x.conj() * y).sum();
        let dist = a
            .iter()
            .zip(&rhat)
            .map(|(x, y)| (x - inner * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        boundary_residual = boundary_residual.max(dist);
    }

    let samples = zetas
        .iter()
        .map(|&z| {
            annihilator(&family, z).map(|a| DirectionSample {
                zeta: [z.re, z.im],
                direction: a.iter().map(|c| [c.re, c.im]).collect(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExtensionReport {
        defect: defect.dimension,
        chart_index,
        cr_residual,
        boundary_residual,
        samples,
        passed: cr_residual <= TAU_CR && boundary_residual <= TAU_BND,
    })
}

/// Real annihilator of the image at `zeta = 0` and the holomorphy check of
/// `a'' G h_w` with `a'' = C a (1 + iK)^{-1}`, for hypersurfaces.
#[derive(Clone, Debug, Serialize)]
pub struct Prop5Report {
    pub annihilator_dim: usize,
    pub a_double_prime: Vec<[f64; 2]>,
    pub certificate: f64,
}

pub fn prop5_certificate(mf: &GraphManifold, sol: &BishopSolution, n_p: usize) -> Result<Prop5Report> {
    if mf.m != 1 {
        return Err(Error::PreconditionViolated("needs a hypersurface".into()));
    }
    let family = LinearizedFamily::new(mf, sol, &PerturbationBasis::standard(mf.s(), n_p))?;
    let vectors = family.vectors_at(C64::new(0.0, 0.0));
    let n = mf.n;
    // Re(alpha . v) = sum Re(alpha_i) Re(v_i) - Im(alpha_i) Im(v_i)
    let mat = DMatrix::from_fn(vectors.len(), 2 * n, |r, c| {
        let v = vectors[r][c % n];
        if c < n {
            v.re
        } else {
            -v.im
        }
    });
    let k = kernel(&mat);
    let gm = g_matrices(mf, sol)?;
    let (hw, _) = h_w_on_disc(mf, sol);
    let ghw = gm.g.mul(&hw);
    let scale = ghw.l2_norm();
    let (kk, cc) = (gm.k[(0, 0)], gm.c[(0, 0)]);
    let mut certificate = 0.0f64;
    let mut a_pp = Vec::new();
    for alpha in &k.basis {
        let a = C64::new(alpha[0], alpha[n]);
        let app = a / C64::new(1.0, kk) * cc;
        a_pp.push([app.re, app.im]);
        if scale > 0.0 && app.norm() > 0.0 {
            let t = ghw.scale(app).negative_tail() / (scale * app.norm());
            certificate = certificate.max(t);
        }
    }
    Ok(Prop5Report {
        annihilator_dim: k.dimension,
        a_double_prime: a_pp,
        certificate,
    })
}

/// Defect against the codimension of the evaluation image, at `N_p` and
/// `2 N_p`.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Report {
    pub manifold: String,
    pub defect: KernelReport,
    pub image: EvalDifferentialImage,
    pub image_doubled: EvalDifferentialImage,
    pub codim_matches: bool,
    pub stable: bool,
}

pub fn theorem2_check(mf: &GraphManifold, sol: &BishopSolution, n_p: usize) -> Result<Theorem2Report> {
    let defect = defect_conormal(&graph_to_implicit(mf), &sol.disc, &DefectOptions::default())?;
    let zero = C64::new(0.0, 0.0);
    let image = evaluation_differential(mf, sol, &PerturbationBasis::standard(mf.s(), n_p), zero)?;
    let image_doubled = evaluation_differential(mf, sol, &PerturbationBasis::standard(mf.s(), 2 * n_p), zero)?;
    Ok(Theorem2Report {
        manifold: mf.name.clone(),
        codim_matches: image.complex_codim == defect.dimension,
        stable: image.real_dim == image_doubled.real_dim && image.complex_span_dim == image_doubled.complex_span_dim,
        defect,
        image,
        image_doubled,
    })
}

/// One named construction check.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub nu: u32,
    pub checks: Vec<ConstructionCheck>,
    pub defect: KernelReport,
    pub image: EvalDifferentialImage,
    /// `max |a . z_dot(0) + conj(a) . conj(z_dot(0))|` with `a = (1, i)`.
    pub omega_max: f64,
    pub h_table: Vec<HTerm>,
}

impl CounterexampleReport {
    pub fn v_is_proper(&self) -> bool {
        self.image.real_dim < 6
    }
}

/// Builds the single-`nu` example, verifies its defining properties, and
/// computes the defect and the evaluation image of `phi_nu = (0, 0, (zeta-1)/nu)`.
pub fn counterexample_instance(nu: u32) -> Result<CounterexampleReport> {
    let mf = registry::counterexample(nu)?;
    let nuf = nu as f64;
    let polys = counterexample_polys(nuf);
    let grid = Grid::with_size(256);
    let a = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64, tolerance: f64| {
        checks.push(ConstructionCheck {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        });
    };

    push("h is real", polys.iter().map(|p| p.reality_defect()).fold(0.0, f64::max), 0.0);
    let zero = [C64::new(0.0, 0.0)];
    let at_origin = mf
        .h(&zero, &[0.0, 0.0])
        .iter()
        .map(|v| v.abs())
        .chain(mf.h_w(&zero, &[0.0, 0.0]).iter().map(|v| v.norm()))
        .fold(0.0, f64::max);
    push("h and dh vanish at 0", at_origin, 1e-15);

    let mut on_circle = 0.0f64;
    let mut factor = 0.0f64;
    for (_, sigma) in grid.points() {
        let w = [(sigma - 1.0) / nuf];
        on_circle = mf.h(&w, &[0.0, 0.0]).iter().fold(on_circle, |m, v| m.max(v.abs()));
        let hw = mf.h_w(&w, &[0.0, 0.0]);
        let f = (sigma - 1.0).norm_sqr() / nuf;
        let sb = sigma.conj();
        for r in 0..2 {
            let expected = (C64::new(1.0, 0.0) + sb) * (sb * a[r] + a[r].conj()) * f;
            factor = factor.max((hw[(r, 0)] - expected).norm());
        }
    }
    push("h vanishes on the circle |nu w + 1| = 1", on_circle, 1e-12);
    push("h_w = F (1 + conj s)(conj s a + conj a) on that circle", factor, 1e-12);

    let sol = solve_bishop(&mf, &linear_w(1, 1.0 / nuf), &BishopOptions::default())?;
    let z_size = (0..2).map(|j| sol.disc.component(j).l2_norm()).fold(0.0, f64::max);
    push("attached disc has z = 0", z_size, 1e-12);

    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::ConstructionCheckFailed(format!(
            "{} (residual {:e})",
            bad.name, bad.residual
        )));
    }

    let defect = defect_conormal(&graph_to_implicit(&mf), &sol.disc, &DefectOptions::default())?;
    let image = evaluation_differential(&mf, &sol, &PerturbationBasis::standard(1, DEFAULT_NP), C64::new(0.0, 0.0))?;
    let omega_max = image
        .vectors
        .iter()
        .map(|v| {
            let z = [C64::new(v[0][0], v[0][1]), C64::new(v[1][0], v[1][1])];
            let s: C64 = (0..2).map(|i| a[i] * z[i] + a[i].conj() * z[i].conj()).sum();
            s.norm()
        })
        .fold(0.0, f64::max);
    Ok(CounterexampleReport {
        nu,
        checks,
        defect,
        image,
        omega_max,
        h_table: mf.audit.clone().unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lift(g: &GraphManifold, eps: f64) -> BishopSolution {
        solve_bishop(g, &linear_w(g.s(), eps), &BishopOptions::default()).unwrap()
    }

    #[test]
    fn basis_vanishes_at_one() {
        let b = PerturbationBasis::standard(2, 4);
        assert_eq!(b.len(), 16);
        for e in &b.elements {
            assert!(e.at_one().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn flat_linearization_is_zero() {
        let g = registry::flat(2).unwrap();
        let sol = lift(&g, 0.1);
        let b = PerturbationBasis::standard(1, 2);
        let l = linearized_bishop(&g, &sol, &b.elements[0]).unwrap();
        assert_eq!(l.x.l2_norm(), 0.0);
        assert_eq!(l.y.l2_norm(), 0.0);
    }

    #[test]
    fn quadric_linearization_closed_form() {
        let g = registry::quadric(2).unwrap();
        let sol = lift(&g, 0.1);
        let b = PerturbationBasis::standard(1, 3);
        let (hw, _) = h_w_on_disc(&g, &sol);
        for w in &b.elements {
            let l = linearized_bishop(&g, &sol, w).unwrap();
            assert!(l.x.sub(&hw.mul(w)).l2_norm() < 1e-15);
            assert_eq!(l.iterations, 1);
        }
    }

    #[test]
    fn mixed_linearization_residual() {
        let g = registry::mixed(0.05, 2).unwrap();
        let sol = lift(&g, 0.1);
        for w in &PerturbationBasis::standard(1, 3).elements {
            assert!(linearized_bishop(&g, &sol, w).unwrap().residual <= 1e-10);
        }
    }

    #[test]
    fn flat_image() {
        let g = registry::flat(2).unwrap();
        let sol = lift(&g, 0.1);
        let im = evaluation_differential(&g, &sol, &PerturbationBasis::standard(1, DEFAULT_NP), C64::new(0.0, 0.0)).unwrap();
        assert_eq!((im.real_dim, im.complex_span_dim, im.complex_codim), (2, 1, 1));
        assert!(im.is_complex_subspace);
    }

    #[test]
    fn quadric_image_is_everything() {
        let g = registry::quadric(2).unwrap();
        let sol = lift(&g, 0.1);
        let im = evaluation_differential(&g, &sol, &PerturbationBasis::standard(1, DEFAULT_NP), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(im.complex_codim, 0);
        assert!(im.is_complex_subspace);
        assert!(im.pv_crosscheck < 1e-9);
    }

    #[test]
    fn phase_fixing() {
        let v = phase_fixed(&[C64::new(0.0, 2.0), C64::new(1.0, 0.0)]);
        assert!((v[0] - C64::new(2.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        let t = phase_fixed(&[C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]);
        assert!(t[0].im == 0.0 && t[0].re > 0.0);
    }

    #[test]
    fn extension_flat_is_constant() {
        let g = registry::flat(2).unwrap();
        let sol = lift(&g, 0.1);
        let r = v_of_zeta_extension(&g, &sol, &[C64::new(0.3, 0.2)], &ExtensionOptions::default()).unwrap();
        assert!(r.passed);
        let d = &r.samples[0].direction;
        assert!((d[0][0] - 1.0).abs() < 1e-12 && d[1][0].abs() < 1e-12 && d[1][1].abs() < 1e-12);
    }

    #[test]
    fn extension_rejects_defect_zero() {
        let g = registry::quadric(2).unwrap();
        let sol = lift(&g, 0.1);
        assert!(matches!(
            v_of_zeta_extension(&g, &sol, &[], &ExtensionOptions::default()),
            Err(Error::DefectNotOne { found: 0 })
        ));
    }
}
