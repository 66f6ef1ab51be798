//! The defect of an attached disc: holomorphically extendable sections of
//! the conormal bundle, Tumanov's space `V_phi`, the spaces `V_f`, the
//! winding bound for hypersurfaces and the Fredholm diagnostic.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::bishop::{h_w_on_disc, AnalyticDisc, BishopSolution, GMatrices};
use crate::circle::{winding_number, CircleFunction, Grid, Shape, C64};
use crate::error::{Error, Result};
use crate::linalg::{kernel_with, Kernel, GAP_REQUIRED, TAU_RANK};
use crate::manifold::{conormal_frame_on_disc, GraphManifold, ImplicitManifold};

/// Truncation data of a kernel computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub n_gamma: usize,
    pub n_c: usize,
    pub grid: usize,
}

/// Numerical kernel dimension with the evidence behind it.
#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub dimension: usize,
    pub singular_values: Vec<f64>,
    /// Smallest kept over largest discarded singular value; `None` when the
    /// map is exactly zero.
    pub gap_ratio: Option<f64>,
    pub truncation: Truncation,
    pub stabilization: Vec<(usize, usize)>,
    /// Gap ratio at every truncation, in ladder order.
    pub rung_gaps: Vec<(usize, Option<f64>)>,
    pub ambiguous: bool,
    /// Largest relative defect of a reconstructed kernel element.
    pub certificate_residual: f64,
    pub aliasing_tail: f64,
    #[serde(skip)]
    pub kernel: Vec<CircleFunction>,
}

impl KernelReport {
    /// Whether the last two truncations agree.
    pub fn stabilized(&self) -> bool {
        let s = &self.stabilization;
        s.len() < 2 || s[s.len() - 1].1 == s[s.len() - 2].1
    }
}

/// Options for ladder-based kernel computations.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectOptions {
    pub ladder: Vec<usize>,
    pub tau_rank: f64,
    pub gap_required: f64,
}

impl Default for DefectOptions {
    fn default() -> Self {
        DefectOptions {
            ladder: vec![4, 8, 16, 32],
            tau_rank: TAU_RANK,
            gap_required: GAP_REQUIRED,
        }
    }
}

impl DefectOptions {
    pub fn with_ladder(ladder: &[usize]) -> Self {
        DefectOptions {
            ladder: ladder.to_vec(),
            ..Self::default()
        }
    }
}

struct Rung {
    n: usize,
    n_c: usize,
    kernel: Kernel<f64>,
    sections: Vec<CircleFunction>,
    certificate: f64,
}

fn assemble(rungs: Vec<Rung>, opts: &DefectOptions, grid: usize, aliasing_tail: f64) -> Result<KernelReport> {
    if rungs.iter().all(|r| r.kernel.ambiguous) {
        let best = rungs
            .iter()
            .filter_map(|r| r.kernel.gap_ratio)
            .fold(0.0, f64::max);
        return Err(Error::Ambiguous {
            required: opts.gap_required,
            best_gap: best,
        });
    }
    let stabilization = rungs.iter().map(|r| (r.n, r.kernel.dimension)).collect();
    let rung_gaps = rungs.iter().map(|r| (r.n, r.kernel.gap_ratio)).collect();
    let last = rungs.into_iter().last().expect("nonempty ladder");
    Ok(KernelReport {
        dimension: last.kernel.dimension,
        singular_values: last.kernel.singular_values,
        gap_ratio: last.kernel.gap_ratio,
        truncation: Truncation {
            n_gamma: last.n,
            n_c: last.n_c,
            grid,
        },
        stabilization,
        rung_gaps,
        ambiguous: last.kernel.ambiguous,
        certificate_residual: last.certificate,
        aliasing_tail,
        kernel: last.sections,
    })
}

fn relative_tail(f: &CircleFunction) -> f64 {
    let norm = f.l2_norm();
    if norm == 0.0 {
        0.0
    } else {
        f.negative_tail() / norm
    }
}

/// Real trigonometric basis function number `b` of degree `<= n`:
/// `1`, then `sigma^k + sigma^-k` and `i (sigma^k - sigma^-k)`.
fn real_trig_basis(b: usize) -> (usize, C64, C64) {
    if b == 0 {
        return (0, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    let k = b.div_ceil(2);
    if b % 2 == 1 {
        (k, C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    } else {
        (k, C64::new(0.0, 1.0), C64::new(0.0, -1.0))
    }
}

fn real_trig_from_params(params: &[f64]) -> CircleFunction {
    let n = (params.len() - 1) / 2;
    let mut coeffs = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for (b, &v) in params.iter().enumerate() {
        let (k, plus, minus) = real_trig_basis(b);
        coeffs[n + k] += plus * v;
        coeffs[n - k] += minus * v;
    }
    CircleFunction::from_coeffs(n, coeffs)
}

fn conormal_rung(frame: &CircleFunction, n_gamma: usize, opts: &DefectOptions) -> Rung {
    let (m, n) = frame.shape().dims();
    let n_rho = frame.degree();
    let n_c = n_gamma + n_rho;
    let per_row = 2 * n_gamma + 1;
    let rows = 2 * n * n_c;
    let mut a = DMatrix::<f64>::zeros(rows.max(1), m * per_row);
    for i in 0..m {
        for b in 0..per_row {
            let (k0, plus, minus) = real_trig_basis(b);
            let col = i * per_row + b;
            let mut r = 0;
            for j in 0..n {
                let e = i * n + j;
                for k in -(n_c as isize)..0 {
                    let mut v = frame.entry_coeff(e, k - k0 as isize) * plus;
                    if k0 > 0 {
                        v += frame.entry_coeff(e, k + k0 as isize) * minus;
                    }
                    a[(r, col)] = v.re;
                    a[(r + 1, col)] = v.im;
                    r += 2;
                }
            }
        }
    }
    let kernel = kernel_with(&a, opts.tau_rank, opts.gap_required);
    let mut sections = Vec::new();
    let mut certificate = 0.0f64;
    for v in &kernel.basis {
        let gamma = CircleFunction::from_entries(
            Shape::Matrix(1, m),
            &(0..m)
                .map(|i| real_trig_from_params(&v.as_slice()[i * per_row..(i + 1) * per_row]))
                .collect::<Vec<_>>(),
        );
        let section = gamma.mul(frame);
        certificate = certificate.max(relative_tail(&section));
        sections.push(gamma);
    }
    Rung {
        n: n_gamma,
        n_c,
        kernel,
        sections,
        certificate,
    }
}

/// Real dimension of the space of real `gamma` with `gamma . rho_z[phi]`
/// extending holomorphically, over the truncation ladder. The kernel
/// sections stored in the report are the `1 x m` row functions `gamma`.
pub fn defect_conormal(mf: &ImplicitManifold, phi: &AnalyticDisc, opts: &DefectOptions) -> Result<KernelReport> {
    let frame = conormal_frame_on_disc(mf, phi)?;
    let grid = Grid::for_degree(2 * phi.degree() + 16).size;
    let rungs: Vec<Rung> = opts
        .ladder
        .par_iter()
        .map(|&ng| conormal_rung(&frame.frame, ng, opts))
        .collect();
    assemble(rungs, opts, grid, frame.aliasing_tail)
}

/// `dim {c in R^m : c G (h_w o phi) extends holomorphically}`.
pub fn tumanov_vphi(mf: &GraphManifold, sol: &BishopSolution, gm: &GMatrices) -> Result<KernelReport> {
    let (hw, tail) = h_w_on_disc(mf, sol);
    let p = gm.g.mul(&hw);
    let (m, s) = p.shape().dims();
    let np = p.degree();
    let rows = 2 * s * np;
    let mut a = DMatrix::<f64>::zeros(rows.max(1), m);
    for i in 0..m {
        let mut r = 0;
        for j in 0..s {
            for k in -(np as isize)..0 {
                let v = p.entry_coeff(i * s + j, k);
                a[(r, i)] = v.re;
                a[(r + 1, i)] = v.im;
                r += 2;
            }
        }
    }
    let kernel = kernel_with(&a, TAU_RANK, GAP_REQUIRED);
    let mut certificate = 0.0f64;
    let mut sections = Vec::new();
    for v in &kernel.basis {
        let c = DMatrix::from_fn(1, m, |_, i| C64::new(v[i], 0.0));
        let section = p.left_mul_const(&c);
        certificate = certificate.max(relative_tail(&section));
        sections.push(section);
    }
    let rung = Rung {
        n: 0,
        n_c: np,
        kernel,
        sections,
        certificate,
    };
    assemble(vec![rung], &DefectOptions::default(), sol.grid().size, tail)
}

/// `V_f` report with the expected dimension `sup(0, 2s + 1)`.
#[derive(Clone, Debug, Serialize)]
pub struct VfReport {
    pub winding: i64,
    pub expected: usize,
    pub report: KernelReport,
}

fn vf_rung(fbar: &CircleFunction, n_g: usize, opts: &DefectOptions) -> Rung {
    let nf = fbar.degree() as isize;
    let top = n_g as isize + nf;
    let rows = 2 * (top as usize + 1);
    let cols = 2 * (n_g + 1);
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    for t in 0..=n_g as isize {
        for (part, c) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
            let col = 2 * t as usize + part;
            for k in 0..=top {
                let q = c * fbar.coeff(k - t) - (c * fbar.coeff(-k - t)).conj();
                a[(2 * k as usize, col)] = q.re;
                a[(2 * k as usize + 1, col)] = q.im;
            }
        }
    }
    let kernel = kernel_with(&a, opts.tau_rank, opts.gap_required);
    let mut certificate = 0.0f64;
    let mut sections = Vec::new();
    for v in &kernel.basis {
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * n_g + 1];
        for t in 0..=n_g {
            coeffs[n_g + t] = C64::new(v[2 * t], v[2 * t + 1]);
        }
        let g = CircleFunction::from_coeffs(n_g, coeffs);
        let prod = g.mul(fbar);
        let norm = prod.l2_norm();
        if norm > 0.0 {
            certificate = certificate.max(prod.imag_part().l2_norm() / norm);
        }
        sections.push(g);
    }
    Rung {
        n: n_g,
        n_c: top as usize,
        kernel,
        sections,
        certificate,
    }
}

/// Real dimension of `{g holomorphic : g / f real on the circle}`,
/// computed as `g conj(f)` real, over the ladder of degrees of `g`.
pub fn vf_dimension(f: &CircleFunction, opts: &DefectOptions) -> Result<VfReport> {
    let winding = winding_number(f)?;
    let fbar = f.conj().scale(C64::new(1.0 / f.l2_norm(), 0.0));
    let rungs: Vec<Rung> = opts.ladder.par_iter().map(|&ng| vf_rung(&fbar, ng, opts)).collect();
    let grid = Grid::for_degree(f.degree()).size;
    let report = assemble(rungs, opts, grid, 0.0)?;
    Ok(VfReport {
        winding,
        expected: (2 * winding + 1).max(0) as usize,
        report,
    })
}

/// Default truncation ladder for [`vf_dimension`].
pub fn vf_options() -> DefectOptions {
    DefectOptions::with_ladder(&[16, 32, 64])
}

/// Winding bound for hypersurfaces along a coordinate direction.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub direction: usize,
    pub winding: i64,
    pub bound: usize,
}

/// `s = winding of rho_{z_j} o phi` and the bound `sup(0, 2s + 1)` on the
/// defect.
pub fn defect_bound_hypersurface(mf: &ImplicitManifold, phi: &AnalyticDisc, direction: usize) -> Result<BoundReport> {
    if mf.m != 1 {
        return Err(Error::PreconditionViolated("the winding bound needs a hypersurface".into()));
    }
    if direction >= mf.n {
        return Err(Error::PreconditionViolated(format!("direction {direction} out of range")));
    }
    let frame = conormal_frame_on_disc(mf, phi)?;
    let winding = winding_number(&frame.frame.entry(direction))?;
    Ok(BoundReport {
        direction,
        winding,
        bound: (2 * winding + 1).max(0) as usize,
    })
}

/// Kernel of the discretized Fredholm operator and the check that the
/// defect sections `b = gamma A` lie in it.
#[derive(Clone, Debug, Serialize)]
pub struct FredholmReport {
    pub split: Vec<usize>,
    pub report: KernelReport,
    pub defect_dimension: usize,
    pub family_dimension: usize,
    /// Largest of `|L b| / |b|` and the relative distance of `b` to the
    /// computed kernel, over the defect family.
    pub family_certificate: f64,
    pub c_degree: usize,
    pub c_aliasing_tail: f64,
}

/// `I(u)`: multiply coefficient `k` by `1/2` for `k >= 0` and `-1/2` otherwise.
fn plemelj(u: &CircleFunction) -> CircleFunction {
    let n = u.degree() as isize;
    let shape = u.shape();
    let entries: Vec<CircleFunction> = (0..shape.len())
        .map(|e| {
            let coeffs = (-n..=n)
                .map(|k| u.entry_coeff(e, k) * if k >= 0 { 0.5 } else { -0.5 })
                .collect();
            CircleFunction::from_coeffs(n as usize, coeffs)
        })
        .collect();
    CircleFunction::from_entries(shape, &entries)
}

/// `L'(b) = b + I(b C) C^{-1} - I(b) - conj(b_0) C^{-1}` for a row `b`.
fn fredholm_apply(b: &CircleFunction, c: &CircleFunction, c_inv: &CircleFunction) -> CircleFunction {
    let m = b.shape().dims().1;
    let b0 = DMatrix::from_fn(1, m, |_, j| b.entry_coeff(j, 0).conj());
    let constant = CircleFunction::constant_matrix(&b0).mul(c_inv);
    b.add(&plemelj(&b.mul(c)).mul(c_inv))
        .sub(&plemelj(b))
        .sub(&constant)
}

fn flatten(f: &CircleFunction, degree: usize) -> DVector<f64> {
    let g = f.with_degree(degree);
    DVector::from_iterator(
        2 * g.raw_coeffs().len(),
        g.raw_coeffs().iter().flat_map(|c| [c.re, c.im]),
    )
}

fn row_params(b: &CircleFunction, n_b: usize) -> DVector<f64> {
    flatten(b, n_b)
}

/// Discretizes the Fredholm operator on `1 x m` rows `b` of degree `<= N_b`
/// and reports its real kernel dimension. The `split` picks the `m`
/// coordinates forming `A = (d rho_k / d z_j)_{j in split}`.
pub fn fredholm_kernel_estimate(
    mf: &ImplicitManifold,
    phi: &AnalyticDisc,
    split: &[usize],
    ladder: &[usize],
) -> Result<FredholmReport> {
    let m = mf.m;
    if split.len() != m || split.iter().any(|&j| j >= mf.n) {
        return Err(Error::PreconditionViolated(format!(
            "split must name {m} coordinates out of {}",
            mf.n
        )));
    }
    let frame = conormal_frame_on_disc(mf, phi)?.frame;
    let n = mf.n;
    let a_fn = CircleFunction::from_entries(
        Shape::Matrix(m, m),
        &(0..m)
            .flat_map(|r| split.iter().map(move |&j| (r, j)))
            .map(|(r, j)| frame.entry(r * n + j))
            .collect::<Vec<_>>(),
    );
    let grid = Grid::for_degree(4 * a_fn.degree() + 32);
    let samples = a_fn.matrix_samples(grid);
    let scale = samples.iter().map(|a| a.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let min_det = samples
        .iter()
        .map(|a| a.determinant().norm())
        .fold(f64::INFINITY, f64::min);
    if min_det < 1e-8 * scale.powi(m as i32) {
        return Err(Error::DegenerateA { min_det });
    }
    let mut cs = Vec::with_capacity(samples.len());
    let mut cinvs = Vec::with_capacity(samples.len());
    for a in &samples {
        let abar = a.map(|v| v.conj());
        let ainv = a.clone().try_inverse().ok_or(Error::DegenerateA { min_det })?;
        let abar_inv = abar.clone().try_inverse().ok_or(Error::DegenerateA { min_det })?;
        cs.push(&ainv * &abar);
        cinvs.push(abar_inv * a);
    }
    let c_fit = CircleFunction::fit_matrix_samples(&cs, None);
    let cinv_fit = CircleFunction::fit_matrix_samples(&cinvs, None);
    let c = c_fit.function;
    let c_inv = cinv_fit.function;

    let defect = defect_conormal(mf, phi, &DefectOptions::default())?;
    let family: Vec<CircleFunction> = defect.kernel.iter().map(|g| g.mul(&a_fn).trimmed(1e-15)).collect();

    let opts = DefectOptions::default();
    let rungs: Vec<(Rung, f64)> = ladder
        .par_iter()
        .map(|&n_b| {
            let out_degree = n_b + c.degree() + c_inv.degree();
            let mut cols = Vec::with_capacity(2 * m * (2 * n_b + 1));
            for e in 0..m {
                for k in -(n_b as isize)..=n_b as isize {
                    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                        let entries: Vec<CircleFunction> = (0..m)
                            .map(|j| {
                                if j == e {
                                    CircleFunction::monomial(k, unit)
                                } else {
                                    CircleFunction::zeros(Shape::Scalar, 0)
                                }
                            })
                            .collect();
                        let b = CircleFunction::from_entries(Shape::Matrix(1, m), &entries);
                        cols.push(flatten(&fredholm_apply(&b, &c, &c_inv), out_degree));
                    }
                }
            }
            let mat = DMatrix::from_columns(&cols);
            let kernel = kernel_with(&mat, opts.tau_rank, opts.gap_required);
            let basis = DMatrix::from_columns(&kernel.basis);
            let mut cert = 0.0f64;
            for b in &family {
                let norm = b.l2_norm();
                if norm == 0.0 {
                    continue;
                }
                let image = fredholm_apply(b, &c, &c_inv).l2_norm() / norm;
                let p = row_params(b, n_b);
                let dist = if kernel.basis.is_empty() {
                    p.norm()
                } else {
                    (&p - &basis * (basis.transpose() * &p)).norm()
                } / p.norm();
                cert = cert.max(image).max(dist);
            }
            let sections = kernel
                .basis
                .iter()
                .map(|v| {
                    let entries: Vec<CircleFunction> = (0..m)
                        .map(|e| {
                            let w = 2 * n_b + 1;
                            let coeffs = (0..w)
                                .map(|i| {
                                    let idx = 2 * (e * w + i);
                                    C64::new(v[idx], v[idx + 1])
                                })
                                .collect();
                            CircleFunction::from_coeffs(n_b, coeffs)
                        })
                        .collect();
                    CircleFunction::from_entries(Shape::Matrix(1, m), &entries)
                })
                .collect();
            (
                Rung {
                    n: n_b,
                    n_c: out_degree,
                    kernel,
                    sections,
                    certificate: 0.0,
                },
                cert,
            )
        })
        .collect();
    let family_certificate = rungs.last().map(|r| r.1).unwrap_or(0.0);
    let mut report = assemble(rungs.into_iter().map(|r| r.0).collect(), &opts, grid.size, c_fit.aliasing_tail)?;
    report.certificate_residual = family_certificate;
    Ok(FredholmReport {
        split: split.to_vec(),
        defect_dimension: defect.dimension,
        family_dimension: family.len(),
        family_certificate,
        c_degree: c.degree(),
        c_aliasing_tail: c_fit.aliasing_tail.max(cinv_fit.aliasing_tail),
        report,
    })
}

/// Default truncation ladder for [`fredholm_kernel_estimate`].
pub const FREDHOLM_LADDER: [usize; 2] = [16, 32];

/// The disc `zeta -> (zeta, 0)`.
pub fn prop1_disc() -> AnalyticDisc {
    let zero = C64::new(0.0, 0.0);
    AnalyticDisc::from_polynomials(&[vec![zero, C64::new(1.0, 0.0)], vec![zero]]).expect("polynomial disc")
}

/// Defect of `(zeta, 0)` on `{Re(z_1^k z_2) = 0}` (optionally perturbed),
/// against the expected `2k + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct Prop1Report {
    pub k: u32,
    pub perturbed: bool,
    pub expected: usize,
    pub defect: KernelReport,
    pub bound: BoundReport,
    /// Smallest gap ratio over the truncations with `N_gamma >= 2k + 4`.
    pub min_gap_resolved: Option<f64>,
    pub passed: bool,
}

pub fn prop1_example(k: u32, perturbed: bool) -> Result<Prop1Report> {
    let mf = if perturbed {
        crate::manifold::registry::prop1_perturbed(k)
    } else {
        crate::manifold::registry::prop1(k)
    };
    let phi = prop1_disc();
    let defect = defect_conormal(&mf, &phi, &DefectOptions::default())?;
    let bound = defect_bound_hypersurface(&mf, &phi, 1)?;
    let expected = 2 * k as usize + 1;
    let min_gap_resolved = defect
        .rung_gaps
        .iter()
        .filter(|(n, _)| *n >= 2 * k as usize + 4)
        .map(|(_, g)| g.unwrap_or(f64::INFINITY))
        .reduce(f64::min);
    let passed = defect.dimension == expected
        && !defect.ambiguous
        && min_gap_resolved.is_some_and(|g| g >= 1e6)
        && bound.bound == expected;
    Ok(Prop1Report {
        k,
        perturbed,
        expected,
        defect,
        bound,
        min_gap_resolved,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bishop::{g_matrices, linear_w, solve_bishop, BishopOptions};
    use crate::manifold::{graph_to_implicit, registry};

    fn lift(g: &GraphManifold, eps: f64) -> BishopSolution {
        solve_bishop(g, &linear_w(g.s(), eps), &BishopOptions::default()).unwrap()
    }

    #[test]
    fn real_trig_basis_is_real() {
        for b in 0..9 {
            let mut p = vec![0.0; 9];
            p[b] = 1.0;
            assert!(real_trig_from_params(&p).reality_defect() < 1e-15);
        }
    }

    #[test]
    fn prop1_small_k() {
        for k in 0..=3 {
            let r = prop1_example(k, false).unwrap();
            assert!(r.passed, "k={k}: {:?}", r.defect.stabilization);
            let r = prop1_example(k, true).unwrap();
            assert!(r.passed, "perturbed k={k}");
        }
    }

    #[test]
    fn flat_defect_one_by_brute_force() {
        // gamma real with gamma/2 holomorphic: only the constants survive
        let mf = graph_to_implicit(&registry::flat(2).unwrap());
        let phi = lift(&registry::flat(2).unwrap(), 0.1).disc;
        let r = defect_conormal(&mf, &phi, &DefectOptions::default()).unwrap();
        assert_eq!(r.dimension, 1);
        let mut count = 0;
        for b in 0..9 {
            let mut p = vec![0.0; 9];
            p[b] = 1.0;
            let g = real_trig_from_params(&p).scale(C64::new(0.5, 0.0));
            if g.negative_tail() == 0.0 {
                count += 1;
            }
        }
        assert_eq!(count, 1);
    }

    #[test]
    fn quadric_defect_zero() {
        let g = registry::quadric(2).unwrap();
        let phi = lift(&g, 0.1).disc;
        let r = defect_conormal(&graph_to_implicit(&g), &phi, &DefectOptions::default()).unwrap();
        assert_eq!(r.dimension, 0);
        assert!(!r.ambiguous);
    }

    #[test]
    fn conormal_frame_examples() {
        let phi = prop1_disc();
        let f = conormal_frame_on_disc(&registry::prop1(2), &phi).unwrap().frame;
        assert!(f.entry(0).l2_norm() < 1e-15);
        assert!(f.entry(1).sub(&CircleFunction::monomial(2, C64::new(1.0, 0.0))).l2_norm() < 1e-14);
        let q = registry::quadric(2).unwrap();
        let eps = 0.1;
        let sol = lift(&q, eps);
        let f = conormal_frame_on_disc(&graph_to_implicit(&q), &sol.disc).unwrap().frame;
        // w = eps(sigma - 1): the w-block is -conj(w)
        let expected = CircleFunction::from_coeffs(1, vec![C64::new(-eps, 0.0), C64::new(eps, 0.0), C64::new(0.0, 0.0)]);
        assert!(f.entry(1).sub(&expected).l2_norm() < 1e-14);
        assert!(f.entry(0).sub(&CircleFunction::constant(C64::new(0.5, 0.0))).l2_norm() < 1e-14);
    }

    #[test]
    fn not_attached_detected() {
        let zero = C64::new(0.0, 0.0);
        let phi = AnalyticDisc::from_polynomials(&[vec![C64::new(0.3, 0.0)], vec![zero, C64::new(0.1, 0.0)]]).unwrap();
        let mf = graph_to_implicit(&registry::flat(2).unwrap());
        assert!(matches!(defect_conormal(&mf, &phi, &DefectOptions::default()), Err(Error::NotAttached { .. })));
    }

    #[test]
    fn vphi_agrees_with_conormal() {
        for g in [registry::flat(2).unwrap(), registry::quadric(2).unwrap(), registry::mixed(0.05, 2).unwrap()] {
            let sol = lift(&g, 0.1);
            let gm = g_matrices(&g, &sol).unwrap();
            let v = tumanov_vphi(&g, &sol, &gm).unwrap();
            let d = defect_conormal(&graph_to_implicit(&g), &sol.disc, &DefectOptions::default()).unwrap();
            assert_eq!(v.dimension, d.dimension, "{}", g.name);
        }
    }

    #[test]
    fn vf_examples() {
        let opts = vf_options();
        let r = vf_dimension(&CircleFunction::monomial(2, C64::new(1.0, 0.0)), &opts).unwrap();
        assert_eq!((r.report.dimension, r.expected), (5, 5));
        let r = vf_dimension(&CircleFunction::monomial(-1, C64::new(1.0, 0.0)), &opts).unwrap();
        assert_eq!((r.report.dimension, r.expected), (0, 0));
        let f = CircleFunction::from_fn(Shape::Scalar, 40, Grid::for_degree(40), |t| {
            let s = C64::from_polar(1.0, t);
            vec![s * (C64::new(0.2 * t.cos(), 0.2 * t.sin())).exp()]
        })
        .function;
        let r = vf_dimension(&f, &opts).unwrap();
        assert_eq!((r.report.dimension, r.expected), (3, 3));
        assert!(r.report.certificate_residual < 1e-7);
    }

    #[test]
    fn bound_examples() {
        let phi = prop1_disc();
        for k in 0..4 {
            let b = defect_bound_hypersurface(&registry::prop1(k), &phi, 1).unwrap();
            assert_eq!((b.winding, b.bound), (k as i64, 2 * k as usize + 1));
        }
        let flat = registry::flat(2).unwrap();
        let b = defect_bound_hypersurface(&graph_to_implicit(&flat), &lift(&flat, 0.1).disc, 0).unwrap();
        assert_eq!(b.bound, 1);
        let q = registry::quadric(2).unwrap();
        let b = defect_bound_hypersurface(&graph_to_implicit(&q), &lift(&q, 0.1).disc, 0).unwrap();
        assert_eq!(b.bound, 1);
    }

    #[test]
    fn fredholm_examples() {
        let flat = registry::flat(2).unwrap();
        let r = fredholm_kernel_estimate(&graph_to_implicit(&flat), &lift(&flat, 0.1).disc, &[0], &FREDHOLM_LADDER).unwrap();
        assert_eq!(r.report.dimension, 1);
        assert!(r.family_certificate < 1e-7);
        for k in 0..=3 {
            let r = fredholm_kernel_estimate(&registry::prop1(k), &prop1_disc(), &[1], &FREDHOLM_LADDER).unwrap();
            assert!(r.report.dimension >= r.defect_dimension, "k={k}");
            assert_eq!(r.family_dimension, 2 * k as usize + 1);
            assert!(r.family_certificate < 1e-7, "k={k}: {:e}", r.family_certificate);
        }
    }
}
