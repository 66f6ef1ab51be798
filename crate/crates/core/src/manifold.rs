//! Generic real submanifolds of `C^n`, given either implicitly by `rho = 0`
//! or as a graph `x = h(w, y)` over the complex tangent directions.
//!
//! Graph coordinates are ordered `(z_1, ..., z_m, w_1, ..., w_{n-m})` with
//! `z = x + iy`. All derivatives are closed-form.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bishop::AnalyticDisc;
use crate::circle::{CircleFunction, Grid, Shape, C64};
use crate::error::{Error, Result};

/// Attachment tolerance for `|rho(phi(sigma))|`.
pub const TAU_ATTACH: f64 = 1e-8;
/// Relative singular-value floor for the conormal frame along a disc.
pub const TAU_FRAME: f64 = 1e-8;

type RhoFn = Arc<dyn Fn(&[C64]) -> Vec<f64> + Send + Sync>;
type RhoZFn = Arc<dyn Fn(&[C64]) -> DMatrix<C64> + Send + Sync>;
type DeletedFn = Arc<dyn Fn(&[C64]) -> bool + Send + Sync>;
type HFn = Arc<dyn Fn(&[C64], &[f64]) -> Vec<f64> + Send + Sync>;
type HwFn = Arc<dyn Fn(&[C64], &[f64]) -> DMatrix<C64> + Send + Sync>;
type HyFn = Arc<dyn Fn(&[C64], &[f64]) -> DMatrix<f64> + Send + Sync>;

/// `M = {rho = 0}` with `rho: C^n -> R^m` and `rho_z = (d rho_k / d z_j)`.
#[derive(Clone)]
pub struct ImplicitManifold {
    pub name: String,
    pub m: usize,
    pub n: usize,
    rho: RhoFn,
    rho_z: RhoZFn,
    deleted: Option<DeletedFn>,
}

impl fmt::Debug for ImplicitManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitManifold")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("n", &self.n)
            .finish()
    }
}

impl ImplicitManifold {
    pub fn new(
        name: impl Into<String>,
        m: usize,
        n: usize,
        rho: impl Fn(&[C64]) -> Vec<f64> + Send + Sync + 'static,
        rho_z: impl Fn(&[C64]) -> DMatrix<C64> + Send + Sync + 'static,
    ) -> Self {
        ImplicitManifold {
            name: name.into(),
            m,
            n,
            rho: Arc::new(rho),
            rho_z: Arc::new(rho_z),
            deleted: None,
        }
    }

    /// Points excluded from the manifold (where the equation degenerates).
    pub fn with_deleted_set(mut self, pred: impl Fn(&[C64]) -> bool + Send + Sync + 'static) -> Self {
        self.deleted = Some(Arc::new(pred));
        self
    }

    pub fn rho(&self, z: &[C64]) -> Vec<f64> {
        (self.rho)(z)
    }

    pub fn rho_z(&self, z: &[C64]) -> DMatrix<C64> {
        (self.rho_z)(z)
    }

    pub fn is_deleted(&self, z: &[C64]) -> bool {
        self.deleted.as_ref().is_some_and(|d| d(z))
    }

    /// Checks that `rho_z` has rank `m` at every given point.
    pub fn check_genericity(&self, points: &[Vec<C64>]) -> Result<()> {
        for p in points {
            if self.is_deleted(p) {
                continue;
            }
            let rel = relative_min_singular(&self.rho_z(p));
            if rel < TAU_FRAME {
                return Err(Error::RankDeficientFrame { min_singular: rel });
            }
        }
        Ok(())
    }
}

fn relative_min_singular(a: &DMatrix<C64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// `M = {x = h(w, y)}` with `h: C^{n-m} x R^m -> R^m` real.
#[derive(Clone)]
pub struct GraphManifold {
    pub name: String,
    pub m: usize,
    pub n: usize,
    h: HFn,
    h_w: HwFn,
    h_y: HyFn,
    /// Bound for `|h_y|` on the domain.
    pub lambda: f64,
    /// Domain radius.
    pub radius: f64,
    /// Largest `size_proxy` of discs this example is meant to carry.
    pub max_disc_size: f64,
    /// Coefficient table of `h`, when it is a polynomial in `(w, conj w)`.
    pub audit: Option<Vec<HTerm>>,
}

impl fmt::Debug for GraphManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphManifold")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("n", &self.n)
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl GraphManifold {
    /// Builds the manifold and checks `h(0,0) = 0`, `dh(0,0) = 0`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        m: usize,
        n: usize,
        lambda: f64,
        max_disc_size: f64,
        h: impl Fn(&[C64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        h_w: impl Fn(&[C64], &[f64]) -> DMatrix<C64> + Send + Sync + 'static,
        h_y: impl Fn(&[C64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let g = GraphManifold {
            name: name.into(),
            m,
            n,
            h: Arc::new(h),
            h_w: Arc::new(h_w),
            h_y: Arc::new(h_y),
            lambda,
            radius: 1.0,
            max_disc_size,
            audit: None,
        };
        g.check_origin()?;
        Ok(g)
    }

    pub fn s(&self) -> usize {
        self.n - self.m
    }

    pub fn h(&self, w: &[C64], y: &[f64]) -> Vec<f64> {
        (self.h)(w, y)
    }

    /// `dh/dw`, an `m x (n-m)` complex matrix.
    pub fn h_w(&self, w: &[C64], y: &[f64]) -> DMatrix<C64> {
        (self.h_w)(w, y)
    }

    /// `dh/d(conj w)`; the conjugate of `h_w` because `h` is real.
    pub fn h_wbar(&self, w: &[C64], y: &[f64]) -> DMatrix<C64> {
        self.h_w(w, y).map(|c| c.conj())
    }

    /// `dh/dy`, an `m x m` real matrix.
    pub fn h_y(&self, w: &[C64], y: &[f64]) -> DMatrix<f64> {
        (self.h_y)(w, y)
    }

    fn check_origin(&self) -> Result<()> {
        let w0 = vec![C64::new(0.0, 0.0); self.s()];
        let y0 = vec![0.0; self.m];
        let h0 = self.h(&w0, &y0).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let dw = self.h_w(&w0, &y0).iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let dy = self.h_y(&w0, &y0).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let worst = h0.max(dw).max(dy);
        if worst > 1e-14 {
            return Err(Error::InvalidSpec(format!(
                "{}: h and dh must vanish at the origin (found {worst:e})",
                self.name
            )));
        }
        Ok(())
    }

    /// Splits a point of `C^n` into `(w, x, y)`.
    pub fn split_point(&self, p: &[C64]) -> (Vec<C64>, Vec<f64>, Vec<f64>) {
        let w = p[self.m..].to_vec();
        let x = p[..self.m].iter().map(|z| z.re).collect();
        let y = p[..self.m].iter().map(|z| z.im).collect();
        (w, x, y)
    }
}

/// `rho = x - h(w, y)` with `rho_z = (1/2 (I + i h_y), -h_w)`.
pub fn graph_to_implicit(g: &GraphManifold) -> ImplicitManifold {
    let (m, n) = (g.m, g.n);
    let for_rho = g.clone();
    let for_rho_z = g.clone();
    ImplicitManifold::new(
        format!("{}/implicit", g.name),
        m,
        n,
        move |p| {
            let (w, x, y) = for_rho.split_point(p);
            let h = for_rho.h(&w, &y);
            x.iter().zip(&h).map(|(a, b)| a - b).collect()
        },
        move |p| {
            let (w, _, y) = for_rho_z.split_point(p);
            let hy = for_rho_z.h_y(&w, &y);
            let hw = for_rho_z.h_w(&w, &y);
            let mut out = DMatrix::zeros(m, n);
            for r in 0..m {
                for c in 0..m {
                    let delta = if r == c { 1.0 } else { 0.0 };
                    out[(r, c)] = C64::new(0.5 * delta, 0.5 * hy[(r, c)]);
                }
                for c in 0..n - m {
                    out[(r, m + c)] = -hw[(r, c)];
                }
            }
            out
        },
    )
}

/// Conormal frame `sigma -> rho_z[phi(sigma)]` along an attached disc.
#[derive(Clone, Debug)]
pub struct ConormalFrame {
    /// `m x n` matrix function.
    pub frame: CircleFunction,
    pub aliasing_tail: f64,
    pub attachment_residual: f64,
    pub min_relative_singular: f64,
}

pub fn conormal_frame_on_disc(mf: &ImplicitManifold, disc: &AnalyticDisc) -> Result<ConormalFrame> {
    if disc.n() != mf.n {
        return Err(Error::PreconditionViolated(format!(
            "disc lives in C^{} but the manifold in C^{}",
            disc.n(),
            mf.n
        )));
    }
    let grid = Grid::for_degree(2 * disc.degree() + 16);
    let points = disc.boundary_points(grid);
    let mut attachment = 0.0f64;
    let mut min_rel = f64::INFINITY;
    let mut values = Vec::with_capacity(points.len());
    for p in &points {
        if mf.is_deleted(p) {
            return Err(Error::DeletedSet);
        }
        attachment = mf.rho(p).iter().fold(attachment, |a, v| a.max(v.abs()));
        let r = mf.rho_z(p);
        min_rel = min_rel.min(relative_min_singular(&r));
        values.push(r);
    }
    if attachment > TAU_ATTACH {
        return Err(Error::NotAttached {
            max_residual: attachment,
        });
    }
    if min_rel < TAU_FRAME {
        return Err(Error::RankDeficientFrame {
            min_singular: min_rel,
        });
    }
    let fitted = CircleFunction::fit_matrix_samples(&values, None);
    Ok(ConormalFrame {
        frame: fitted.function,
        aliasing_tail: fitted.aliasing_tail,
        attachment_residual: attachment,
        min_relative_singular: min_rel,
    })
}

/// Polynomial in `(w, conj w)` for one complex variable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WPoly {
    terms: BTreeMap<(u32, u32), C64>,
}

/// One monomial `c w^p conj(w)^q` of a component of `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HTerm {
    pub component: usize,
    pub p: u32,
    pub q: u32,
    pub re: f64,
    pub im: f64,
}

impl WPoly {
    pub fn constant(c: C64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), c);
        WPoly { terms }.cleaned()
    }

    pub fn monomial(p: u32, q: u32, c: C64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((p, q), c);
        WPoly { terms }.cleaned()
    }

    fn cleaned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() != 0.0);
        self
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &rhs.terms {
            *terms.entry(*k).or_default() += c;
        }
        WPoly { terms }.cleaned()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        WPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
        .cleaned()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut terms: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for ((p1, q1), a) in &self.terms {
            for ((p2, q2), b) in &rhs.terms {
                *terms.entry((p1 + p2, q1 + q2)).or_default() += a * b;
            }
        }
        WPoly { terms }.cleaned()
    }

    pub fn d_w(&self) -> Self {
        WPoly {
            terms: self
                .terms
                .iter()
                .filter(|((p, _), _)| *p > 0)
                .map(|((p, q), c)| ((p - 1, *q), c * *p as f64))
                .collect(),
        }
    }

    pub fn d_wbar(&self) -> Self {
        WPoly {
            terms: self
                .terms
                .iter()
                .filter(|((_, q), _)| *q > 0)
                .map(|((p, q), c)| ((*p, q - 1), c * *q as f64))
                .collect(),
        }
    }

    pub fn eval(&self, w: C64) -> C64 {
        let wb = w.conj();
        self.terms
            .iter()
            .map(|((p, q), c)| c * w.powu(*p) * wb.powu(*q))
            .sum()
    }

    /// Largest `|c_{pq} - conj(c_{qp})|`; zero for real-valued polynomials.
    pub fn reality_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|((p, q), c)| {
                let mirror = self.terms.get(&(*q, *p)).copied().unwrap_or_default();
                (c - mirror.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        self.terms.iter().map(|((p, q), c)| (*p, *q, *c))
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `|nu w + a|^2 = nu^2 w wbar + a nu w + a nu wbar + a^2` for real `a`.
fn shifted_abs2(nu: f64, a: f64) -> WPoly {
    WPoly::monomial(1, 1, c(nu * nu, 0.0))
        .add(&WPoly::monomial(1, 0, c(a * nu, 0.0)))
        .add(&WPoly::monomial(0, 1, c(a * nu, 0.0)))
        .add(&WPoly::constant(c(a * a, 0.0)))
}

/// The two components of the codimension-two example `h` for a given `nu`:
/// `(|nu w + 1|^2 - 1) |w|^2 (|nu w + 2|^2, 2 nu Im w)`.
pub fn counterexample_polys(nu: f64) -> [WPoly; 2] {
    let d = shifted_abs2(nu, 1.0).sub(&WPoly::constant(c(1.0, 0.0)));
    let w2 = WPoly::monomial(1, 1, c(1.0, 0.0));
    let base = d.mul(&w2);
    let im_w = WPoly::monomial(1, 0, c(0.0, -nu)).add(&WPoly::monomial(0, 1, c(0.0, nu)));
    [base.mul(&shifted_abs2(nu, 2.0)), base.mul(&im_w)]
}

/// Named examples.
pub mod registry {
    use super::*;

    fn zero_real(rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::zeros(rows, cols)
    }

    /// `2 Re(z_1^k z_2) = 0` on `C^2` minus `{z_1 = 0}`.
    pub fn prop1(k: u32) -> ImplicitManifold {
        ImplicitManifold::new(
            format!("prop1:k={k}"),
            1,
            2,
            move |z| vec![2.0 * (z[0].powu(k) * z[1]).re],
            move |z| prop1_gradient(k, z),
        )
        .with_deleted_set(|z| z[0].norm() == 0.0)
    }

    fn prop1_gradient(k: u32, z: &[C64]) -> DMatrix<C64> {
        let d1 = if k == 0 {
            c(0.0, 0.0)
        } else {
            z[0].powu(k - 1) * z[1] * k as f64
        };
        DMatrix::from_row_slice(1, 2, &[d1, z[0].powu(k)])
    }

    /// `prop1(k)` plus `(|z_1|^2 - 1)^2`.
    pub fn prop1_perturbed(k: u32) -> ImplicitManifold {
        ImplicitManifold::new(
            format!("prop1_perturbed:k={k}"),
            1,
            2,
            move |z| {
                let q = z[0].norm_sqr() - 1.0;
                vec![2.0 * (z[0].powu(k) * z[1]).re + q * q]
            },
            move |z| {
                let mut g = prop1_gradient(k, z);
                g[(0, 0)] += z[0].conj() * (2.0 * (z[0].norm_sqr() - 1.0));
                g
            },
        )
        .with_deleted_set(|z| z[0].norm() == 0.0)
    }

    /// The Levi-flat hyperplane `x_1 = 0` in `C^n`.
    pub fn flat(n: usize) -> Result<GraphManifold> {
        check_n(n, 2)?;
        GraphManifold::new(
            format!("flat:n={n}"),
            1,
            n,
            0.0,
            f64::INFINITY,
            |_, _| vec![0.0],
            move |_, _| DMatrix::zeros(1, n - 1),
            |_, _| zero_real(1, 1),
        )
    }

    /// `x = |w|^2` in `C^n`.
    pub fn quadric(n: usize) -> Result<GraphManifold> {
        check_n(n, 2)?;
        GraphManifold::new(
            format!("quadric:n={n}"),
            1,
            n,
            0.0,
            0.3,
            |w, _| vec![w.iter().map(|v| v.norm_sqr()).sum()],
            move |w, _| DMatrix::from_fn(1, n - 1, |_, j| w[j].conj()),
            |_, _| zero_real(1, 1),
        )
    }

    /// `x = eps (|w|^2 + y Re w_1)` in `C^n`.
    pub fn mixed(eps: f64, n: usize) -> Result<GraphManifold> {
        check_n(n, 2)?;
        GraphManifold::new(
            format!("mixed:eps={eps},n={n}"),
            1,
            n,
            eps.abs(),
            0.3,
            move |w, y| vec![eps * (w.iter().map(|v| v.norm_sqr()).sum::<f64>() + y[0] * w[0].re)],
            move |w, y| {
                DMatrix::from_fn(1, n - 1, |_, j| {
                    let extra = if j == 0 { 0.5 * y[0] } else { 0.0 };
                    (w[j].conj() + extra) * eps
                })
            },
            move |w, _| DMatrix::from_element(1, 1, eps * w[0].re),
        )
    }

    /// `x = eps y Re w_1` in `C^2`: every disc over a real-free `w` stays in
    /// `z = 0`, and the defect stays 1.
    pub fn tilted(eps: f64) -> Result<GraphManifold> {
        GraphManifold::new(
            format!("tilted:eps={eps}"),
            1,
            2,
            eps.abs(),
            0.3,
            move |w, y| vec![eps * y[0] * w[0].re],
            move |_, y| DMatrix::from_element(1, 1, c(0.5 * eps * y[0], 0.0)),
            move |w, _| DMatrix::from_element(1, 1, eps * w[0].re),
        )
    }

    /// `x = eps Re(w_1^2)` in `C^2`, the image of a hyperplane under a
    /// holomorphic change of coordinates; defect 1 with a moving
    /// complex tangent line.
    pub fn pluriharmonic(eps: f64) -> Result<GraphManifold> {
        GraphManifold::new(
            format!("pluriharmonic:eps={eps}"),
            1,
            2,
            0.0,
            0.3,
            move |w, _| vec![eps * (w[0] * w[0]).re],
            move |w, _| DMatrix::from_element(1, 1, w[0] * eps),
            |_, _| zero_real(1, 1),
        )
    }

    /// Codimension-two example in `C^3` built for one `nu`.
    pub fn counterexample(nu: u32) -> Result<GraphManifold> {
        if nu == 0 {
            return Err(Error::InvalidSpec("nu must be a positive integer".into()));
        }
        let polys = counterexample_polys(nu as f64);
        let audit = polys
            .iter()
            .enumerate()
            .flat_map(|(component, p)| {
                p.terms()
                    .map(move |(p, q, v)| HTerm {
                        component,
                        p,
                        q,
                        re: v.re,
                        im: v.im,
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let for_h = polys.clone();
        let derivs = [polys[0].d_w(), polys[1].d_w()];
        let mut g = GraphManifold::new(
            format!("counterexample:nu={nu}"),
            2,
            3,
            0.0,
            2.0 / nu as f64,
            move |w, _| vec![for_h[0].eval(w[0]).re, for_h[1].eval(w[0]).re],
            move |w, _| DMatrix::from_fn(2, 1, |r, _| derivs[r].eval(w[0])),
            |_, _| zero_real(2, 2),
        )?;
        g.audit = Some(audit);
        Ok(g)
    }

    fn check_n(n: usize, min: usize) -> Result<()> {
        if n < min {
            return Err(Error::InvalidSpec(format!("n must be at least {min}")));
        }
        Ok(())
    }
}

/// A registry manifold in its native form.
#[derive(Clone, Debug)]
pub enum Manifold {
    Implicit(ImplicitManifold),
    Graph(GraphManifold),
}

impl Manifold {
    pub fn name(&self) -> &str {
        match self {
            Manifold::Implicit(m) => &m.name,
            Manifold::Graph(g) => &g.name,
        }
    }

    pub fn implicit(&self) -> ImplicitManifold {
        match self {
            Manifold::Implicit(m) => m.clone(),
            Manifold::Graph(g) => graph_to_implicit(g),
        }
    }

    pub fn graph(&self) -> Option<&GraphManifold> {
        match self {
            Manifold::Graph(g) => Some(g),
            Manifold::Implicit(_) => None,
        }
    }
}

/// Parses `name` or `name:key=value,key=value`, e.g. `prop1:k=3`.
pub fn parse_manifold(spec: &str) -> Result<Manifold> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params: BTreeMap<&str, &str> = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, found `{kv}`")))?;
        params.insert(k.trim(), v.trim());
    }
    let known: &[&str] = match name {
        "prop1" | "prop1_perturbed" => &["k"],
        "flat" | "quadric" => &["n"],
        "mixed" => &["eps", "n"],
        "tilted" | "pluriharmonic" => &["eps"],
        "counterexample" => &["nu"],
        _ => return Err(Error::InvalidSpec(format!("unknown manifold `{name}`"))),
    };
    if let Some(bad) = params.keys().find(|k| !known.contains(k)) {
        return Err(Error::InvalidSpec(format!("unknown parameter `{bad}` for `{name}`")));
    }
    fn get<T: std::str::FromStr>(p: &BTreeMap<&str, &str>, key: &str, default: T) -> Result<T> {
        match p.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("cannot parse `{key}={v}`"))),
        }
    }
    Ok(match name {
        "prop1" => Manifold::Implicit(registry::prop1(get(&params, "k", 1)?)),
        "prop1_perturbed" => Manifold::Implicit(registry::prop1_perturbed(get(&params, "k", 1)?)),
        "flat" => Manifold::Graph(registry::flat(get(&params, "n", 2)?)?),
        "quadric" => Manifold::Graph(registry::quadric(get(&params, "n", 2)?)?),
        "mixed" => Manifold::Graph(registry::mixed(get(&params, "eps", 0.05)?, get(&params, "n", 2)?)?),
        "tilted" => Manifold::Graph(registry::tilted(get(&params, "eps", 0.1)?)?),
        "pluriharmonic" => Manifold::Graph(registry::pluriharmonic(get(&params, "eps", 0.5)?)?),
        _ => Manifold::Graph(registry::counterexample(get(&params, "nu", 2)?)?),
    })
}

/// Vector of circle functions as a single `Vector(d)` function.
pub(crate) fn stack(entries: &[CircleFunction]) -> CircleFunction {
    CircleFunction::from_entries(Shape::Vector(entries.len()), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::TrigRng;

    fn random_point(rng: &mut TrigRng, n: usize, r: f64) -> Vec<C64> {
        (0..n).map(|_| rng.point_in_disc(r)).collect()
    }

    fn graphs() -> Vec<GraphManifold> {
        vec![
            registry::flat(2).unwrap(),
            registry::flat(3).unwrap(),
            registry::quadric(2).unwrap(),
            registry::quadric(3).unwrap(),
            registry::mixed(0.05, 2).unwrap(),
            registry::mixed(0.3, 3).unwrap(),
            registry::tilted(0.2).unwrap(),
            registry::pluriharmonic(0.5).unwrap(),
            registry::counterexample(2).unwrap(),
            registry::counterexample(3).unwrap(),
        ]
    }

    #[test]
    fn second_order_vanishing() {
        let mut rng = TrigRng::seeded(11);
        for g in graphs() {
            for _ in 0..50 {
                let t = 1e-2 * (rng.uniform().abs() + 0.1);
                let w: Vec<C64> = (0..g.s()).map(|_| rng.complex() * t).collect();
                let y: Vec<f64> = (0..g.m).map(|_| rng.uniform() * t).collect();
                let size = w.iter().map(|v| v.norm()).sum::<f64>() + y.iter().map(|v| v.abs()).sum::<f64>();
                let h = g.h(&w, &y);
                let hmax = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                assert!(hmax <= 50.0 * size * size, "{}: |h| = {hmax:e}", g.name);
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let step = 1e-5;
        let mut rng = TrigRng::seeded(12);
        for g in graphs() {
            for _ in 0..5 {
                let w: Vec<C64> = (0..g.s()).map(|_| rng.complex() * 0.3).collect();
                let y: Vec<f64> = (0..g.m).map(|_| rng.uniform() * 0.3).collect();
                let hw = g.h_w(&w, &y);
                let hy = g.h_y(&w, &y);
                for j in 0..g.s() {
                    let shifted = |d: C64| {
                        let mut v = w.clone();
                        v[j] += d;
                        g.h(&v, &y)
                    };
                    let px = shifted(C64::new(step, 0.0));
                    let mx = shifted(C64::new(-step, 0.0));
                    let py = shifted(C64::new(0.0, step));
                    let my = shifted(C64::new(0.0, -step));
                    for r in 0..g.m {
                        let dx = (px[r] - mx[r]) / (2.0 * step);
                        let dy = (py[r] - my[r]) / (2.0 * step);
                        let fd = C64::new(dx, -dy) * 0.5;
                        let err = (fd - hw[(r, j)]).norm();
                        assert!(err <= 1e-6 * (1.0 + fd.norm()), "{} h_w: {err:e}", g.name);
                    }
                }
                for j in 0..g.m {
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp[j] += step;
                    ym[j] -= step;
                    let (hp, hm) = (g.h(&w, &yp), g.h(&w, &ym));
                    for r in 0..g.m {
                        let fd = (hp[r] - hm[r]) / (2.0 * step);
                        assert!((fd - hy[(r, j)]).abs() <= 1e-6 * (1.0 + fd.abs()), "{} h_y", g.name);
                    }
                }
            }
        }
    }

    #[test]
    fn implicit_gradients_match_finite_differences() {
        let step = 1e-5;
        let mut rng = TrigRng::seeded(13);
        let mut all: Vec<ImplicitManifold> = graphs().iter().map(graph_to_implicit).collect();
        for k in 0..4 {
            all.push(registry::prop1(k));
            all.push(registry::prop1_perturbed(k));
        }
        for mf in all {
            for _ in 0..5 {
                let p = random_point(&mut rng, mf.n, 0.4);
                let rz = mf.rho_z(&p);
                for j in 0..mf.n {
                    let shifted = |d: C64| {
                        let mut v = p.clone();
                        v[j] += d;
                        mf.rho(&v)
                    };
                    let px = shifted(C64::new(step, 0.0));
                    let mx = shifted(C64::new(-step, 0.0));
                    let py = shifted(C64::new(0.0, step));
                    let my = shifted(C64::new(0.0, -step));
                    for r in 0..mf.m {
                        let fd = C64::new(px[r] - mx[r], -(py[r] - my[r])) / (4.0 * step);
                        let err = (fd - rz[(r, j)]).norm();
                        assert!(err <= 1e-6 * (1.0 + fd.norm()), "{}: {err:e}", mf.name);
                    }
                }
            }
        }
    }

    #[test]
    fn graph_to_implicit_examples() {
        let z0 = vec![C64::new(0.0, 0.0); 2];
        let flat = graph_to_implicit(&registry::flat(2).unwrap());
        let r = flat.rho_z(&z0);
        assert_eq!(r[(0, 0)], C64::new(0.5, 0.0));
        assert_eq!(r[(0, 1)], C64::new(0.0, 0.0));
        let q = graph_to_implicit(&registry::quadric(2).unwrap());
        let p = vec![C64::new(0.1, 0.2), C64::new(0.3, -0.4)];
        assert_eq!(q.rho_z(&p)[(0, 1)], -C64::new(0.3, 0.4));
        let mixed = graph_to_implicit(&registry::mixed(0.05, 2).unwrap());
        assert_eq!(mixed.rho_z(&z0)[(0, 0)], C64::new(0.5, 0.0));
    }

    #[test]
    fn genericity_on_random_points() {
        let mut rng = TrigRng::seeded(14);
        for g in graphs() {
            let mf = graph_to_implicit(&g);
            let pts: Vec<Vec<C64>> = (0..20).map(|_| random_point(&mut rng, mf.n, 0.5)).collect();
            mf.check_genericity(&pts).unwrap();
        }
    }

    #[test]
    fn counterexample_polynomial_is_real() {
        for nu in [1.0, 2.0, 3.0] {
            for p in counterexample_polys(nu) {
                assert_eq!(p.reality_defect(), 0.0);
            }
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_manifold("prop1:k=3").unwrap().name(), "prop1:k=3");
        assert_eq!(parse_manifold("quadric:n=2").unwrap().implicit().n, 2);
        assert_eq!(parse_manifold("mixed:eps=0.05").unwrap().graph().unwrap().lambda, 0.05);
        assert!(parse_manifold("bogus").is_err());
        assert!(parse_manifold("prop1:q=2").is_err());
        assert!(parse_manifold("prop1:k=x").is_err());
        assert!(parse_manifold("flat:n=1").is_err());
    }
}
