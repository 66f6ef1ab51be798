//! Truncated Fourier series on the unit circle and the singular-integral
//! toolbox built on them.
//!
//! A [`CircleFunction`] stores the coefficients `a_k`, `k in [-N, N]`, of
//! `theta -> sum a_k e^{ik theta}` for every entry of a scalar, vector or
//! matrix valued function. All operations are pure and return new values.
//!
//! Principal values at `sigma = 1` are never computed by quadrature here: the
//! numerator is divided by `sigma - 1` exactly at the coefficient level.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for "vanishes at sigma = 1".
pub const TAU_ZERO: f64 = 1e-9;
/// Relative tolerance for "extends holomorphically".
pub const TAU_HOLO: f64 = 1e-8;
/// `min |f|` must exceed this fraction of `max |f|` for a winding number.
pub const TAU_WIND: f64 = 1e-6;

/// Value shape of a circle function. Vectors are columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Scalar,
    Vector(usize),
    Matrix(usize, usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        let (r, c) = self.dims();
        r * c
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(rows, cols)`; a vector of length `d` is `d x 1`.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            Shape::Scalar => (1, 1),
            Shape::Vector(d) => (d, 1),
            Shape::Matrix(r, c) => (r, c),
        }
    }

    fn product(self, rhs: Shape) -> Shape {
        match (self, rhs) {
            (Shape::Scalar, s) | (s, Shape::Scalar) => s,
            (_, Shape::Vector(_)) => Shape::Vector(self.dims().0),
            _ => Shape::Matrix(self.dims().0, rhs.dims().1),
        }
    }
}

/// Equispaced sampling grid on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub size: usize,
}

impl Grid {
    /// Smallest power of two `M >= 4(N + 1)`; products of two degree-`N`
    /// functions sample on it without aliasing.
    pub fn for_degree(degree: usize) -> Self {
        Grid {
            size: (4 * (degree + 1)).next_power_of_two(),
        }
    }

    pub fn with_size(size: usize) -> Self {
        assert!(size.is_power_of_two(), "grid size must be a power of two");
        Grid { size }
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.size as f64
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        (0..self.size).map(move |j| {
            let t = self.theta(j);
            (t, C64::from_polar(1.0, t))
        })
    }

    /// Oversampling factor relative to a working degree.
    pub fn oversampling(&self, degree: usize) -> f64 {
        self.size as f64 / (2 * degree + 1) as f64
    }
}

fn fft_in_place(data: &mut [C64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    plan.process(data);
}

fn wrap(k: isize, m: usize) -> usize {
    k.rem_euclid(m as isize) as usize
}

/// Truncated Fourier series on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleFunction {
    degree: usize,
    shape: Shape,
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct CircleFunctionRepr {
    degree: usize,
    coeffs: Vec<[f64; 2]>,
    shape: Shape,
}

impl Serialize for CircleFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircleFunctionRepr {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            shape: self.shape,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CircleFunctionRepr::deserialize(d)?;
        let expected = repr.shape.len() * (2 * repr.degree + 1);
        if repr.coeffs.len() != expected {
            return Err(serde::de::Error::custom(format!(
                "expected {expected} coefficients, found {}",
                repr.coeffs.len()
            )));
        }
        Ok(CircleFunction {
            degree: repr.degree,
            shape: repr.shape,
            coeffs: repr.coeffs.iter().map(|c| C64::new(c[0], c[1])).collect(),
        })
    }
}

/// Result of refitting sampled data to a truncated series.
#[derive(Clone, Debug)]
pub struct Fitted {
    pub function: CircleFunction,
    /// l2 norm of the discarded coefficients.
    pub aliasing_tail: f64,
}

impl CircleFunction {
    pub fn zeros(shape: Shape, degree: usize) -> Self {
        CircleFunction {
            degree,
            shape,
            coeffs: vec![C64::new(0.0, 0.0); shape.len() * (2 * degree + 1)],
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_coeffs(0, vec![c])
    }

    /// Constant matrix function.
    pub fn constant_matrix(m: &DMatrix<C64>) -> Self {
        let shape = Shape::Matrix(m.nrows(), m.ncols());
        let mut f = Self::zeros(shape, 0);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                f.coeffs[r * m.ncols() + c] = m[(r, c)];
            }
        }
        f
    }

    pub fn identity(m: usize) -> Self {
        Self::constant_matrix(&DMatrix::identity(m, m))
    }

    /// `c * sigma^k`.
    pub fn monomial(k: isize, c: C64) -> Self {
        let n = k.unsigned_abs();
        let mut f = Self::zeros(Shape::Scalar, n);
        f.coeffs[(k + n as isize) as usize] = c;
        f
    }

    /// Scalar function from coefficients `a_{-N}, ..., a_N`.
    pub fn from_coeffs(degree: usize, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), 2 * degree + 1, "coefficient count must be 2N+1");
        CircleFunction {
            degree,
            shape: Shape::Scalar,
            coeffs,
        }
    }

    /// Assemble a shaped function from scalar entries (row-major for matrices).
    pub fn from_entries(shape: Shape, entries: &[CircleFunction]) -> Self {
        assert_eq!(entries.len(), shape.len(), "entry count does not match shape");
        let degree = entries.iter().map(|e| e.degree).max().unwrap_or(0);
        let mut coeffs = Vec::with_capacity(shape.len() * (2 * degree + 1));
        for e in entries {
            assert_eq!(e.shape, Shape::Scalar, "entries must be scalar");
            coeffs.extend(e.with_degree(degree).coeffs);
        }
        CircleFunction {
            degree,
            shape,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn width(&self) -> usize {
        2 * self.degree + 1
    }

    fn entry_slice(&self, e: usize) -> &[C64] {
        let w = self.width();
        &self.coeffs[e * w..(e + 1) * w]
    }

    /// Raw coefficients, entry-major, each entry ordered `k = -N..=N`.
    pub fn raw_coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Scalar entry `e` (row-major index).
    pub fn entry(&self, e: usize) -> CircleFunction {
        CircleFunction::from_coeffs(self.degree, self.entry_slice(e).to_vec())
    }

    pub fn entry_rc(&self, r: usize, c: usize) -> CircleFunction {
        self.entry(r * self.shape.dims().1 + c)
    }

    pub fn entries(&self) -> Vec<CircleFunction> {
        (0..self.shape.len()).map(|e| self.entry(e)).collect()
    }

    /// Coefficient `a_k` of a scalar function (zero outside the band).
    pub fn coeff(&self, k: isize) -> C64 {
        self.entry_coeff(0, k)
    }

    pub fn entry_coeff(&self, e: usize, k: isize) -> C64 {
        if k.unsigned_abs() > self.degree {
            return C64::new(0.0, 0.0);
        }
        self.entry_slice(e)[(k + self.degree as isize) as usize]
    }

    /// Coefficients `a_k` of every entry.
    pub fn coeff_entries(&self, k: isize) -> Vec<C64> {
        (0..self.shape.len()).map(|e| self.entry_coeff(e, k)).collect()
    }

    pub fn mean(&self) -> Vec<C64> {
        self.coeff_entries(0)
    }

    pub fn mean_matrix(&self) -> DMatrix<C64> {
        let (r, c) = self.shape.dims();
        DMatrix::from_row_slice(r, c, &self.mean())
    }

    fn map_coeffs(&self, f: impl Fn(isize, C64) -> C64) -> Self {
        let n = self.degree as isize;
        let w = self.width();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| f((i % w) as isize - n, a))
            .collect();
        CircleFunction {
            degree: self.degree,
            shape: self.shape,
            coeffs,
        }
    }

    /// Same function stored at another degree (truncates or pads).
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut out = Self::zeros(self.shape, degree);
        let w = 2 * degree + 1;
        let m = degree.min(self.degree) as isize;
        for e in 0..self.shape.len() {
            for k in -m..=m {
                out.coeffs[e * w + (k + degree as isize) as usize] = self.entry_coeff(e, k);
            }
        }
        out
    }

    /// Lowest degree keeping the discarded tail below `rel_tol * ||f||`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let total = self.l2_norm();
        let mut tail2 = 0.0;
        let mut keep = self.degree;
        while keep > 0 {
            let ring: f64 = (0..self.shape.len())
                .map(|e| {
                    self.entry_coeff(e, keep as isize).norm_sqr()
                        + self.entry_coeff(e, -(keep as isize)).norm_sqr()
                })
                .sum();
            if (tail2 + ring).sqrt() > rel_tol * total {
                break;
            }
            tail2 += ring;
            keep -= 1;
        }
        self.with_degree(keep)
    }

    /// l2 norm of all coefficients (equal to the normalized L2 norm).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient-wise l1 bound of the sup norm over entries.
    pub fn sup_bound(&self) -> f64 {
        (0..self.shape.len())
            .map(|e| self.entry_slice(e).iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max_j |f(theta_j)|` over entries on the grid.
    pub fn sup_norm(&self, grid: Grid) -> f64 {
        self.samples(grid)
            .iter()
            .flat_map(|s| s.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// Values of every entry at `theta`.
    pub fn eval(&self, theta: f64) -> Vec<C64> {
        let n = self.degree as isize;
        let phases: Vec<C64> = (-n..=n)
            .map(|k| C64::from_polar(1.0, k as f64 * theta))
            .collect();
        (0..self.shape.len())
            .map(|e| {
                self.entry_slice(e)
                    .iter()
                    .zip(&phases)
                    .map(|(a, p)| a * p)
                    .sum()
            })
            .collect()
    }

    pub fn eval_scalar(&self, theta: f64) -> C64 {
        self.eval(theta)[0]
    }

    /// Values at `sigma = 1`.
    pub fn at_one(&self) -> Vec<C64> {
        (0..self.shape.len())
            .map(|e| self.entry_slice(e).iter().sum())
            .collect()
    }

    /// Power series `sum_{k >= 0} a_k zeta^k` of every entry; the holomorphic
    /// extension for functions with vanishing negative tail.
    pub fn eval_interior(&self, zeta: C64) -> Vec<C64> {
        let n = self.degree as isize;
        (0..self.shape.len())
            .map(|e| {
                (0..=n)
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, k| acc * zeta + self.entry_coeff(e, k))
            })
            .collect()
    }

    pub fn eval_interior_matrix(&self, zeta: C64) -> DMatrix<C64> {
        let (r, c) = self.shape.dims();
        DMatrix::from_row_slice(r, c, &self.eval_interior(zeta))
    }

    /// Samples of each entry on the grid, `out[e][j] = f_e(theta_j)`.
    pub fn samples(&self, grid: Grid) -> Vec<Vec<C64>> {
        let m = grid.size;
        assert!(
            m > 2 * self.degree,
            "grid of size {m} cannot resolve degree {}",
            self.degree
        );
        let n = self.degree as isize;
        (0..self.shape.len())
            .map(|e| {
                let mut buf = vec![C64::new(0.0, 0.0); m];
                for k in -n..=n {
                    buf[wrap(k, m)] = self.entry_coeff(e, k);
                }
                fft_in_place(&mut buf, true);
                buf
            })
            .collect()
    }

    pub fn scalar_samples(&self, grid: Grid) -> Vec<C64> {
        self.samples(grid).swap_remove(0)
    }

    /// Matrix value at each grid point.
    pub fn matrix_samples(&self, grid: Grid) -> Vec<DMatrix<C64>> {
        let (r, c) = self.shape.dims();
        let s = self.samples(grid);
        (0..grid.size)
            .map(|j| DMatrix::from_fn(r, c, |i, k| s[i * c + k][j]))
            .collect()
    }

    /// Least-squares fit of degree `degree` to grid samples of each entry.
    pub fn fit_samples(shape: Shape, samples: &[Vec<C64>], degree: usize) -> Fitted {
        assert_eq!(samples.len(), shape.len());
        let m = samples[0].len();
        assert!(m > 2 * degree, "grid of size {m} cannot resolve degree {degree}");
        let mut out = Self::zeros(shape, degree);
        let w = 2 * degree + 1;
        let n = degree as isize;
        let mut tail2 = 0.0;
        for (e, s) in samples.iter().enumerate() {
            let mut buf = s.clone();
            fft_in_place(&mut buf, false);
            let scale = 1.0 / m as f64;
            for (i, c) in buf.iter().enumerate() {
                let k = if i <= m / 2 { i as isize } else { i as isize - m as isize };
                let c = c * scale;
                if k.abs() <= n {
                    out.coeffs[e * w + (k + n) as usize] = c;
                } else {
                    tail2 += c.norm_sqr();
                }
            }
        }
        Fitted {
            function: out,
            aliasing_tail: tail2.sqrt(),
        }
    }

    /// Fit at the largest resolvable degree, then trim the tail below
    /// `rel_tol`. The reported tail includes the trimmed part.
    pub fn fit_samples_auto(shape: Shape, samples: &[Vec<C64>], rel_tol: f64) -> Fitted {
        let m = samples[0].len();
        let full = Self::fit_samples(shape, samples, m / 2 - 1);
        let trimmed = full.function.trimmed(rel_tol);
        let dropped = full.function.sub(&trimmed).l2_norm();
        Fitted {
            aliasing_tail: (full.aliasing_tail.powi(2) + dropped.powi(2)).sqrt(),
            function: trimmed,
        }
    }

    pub fn fit_matrix_samples(values: &[DMatrix<C64>], degree: Option<usize>) -> Fitted {
        let (r, c) = values[0].shape();
        let shape = Shape::Matrix(r, c);
        let samples: Vec<Vec<C64>> = (0..r * c)
            .map(|e| values.iter().map(|v| v[(e / c, e % c)]).collect())
            .collect();
        match degree {
            Some(d) => Self::fit_samples(shape, &samples, d),
            None => Self::fit_samples_auto(shape, &samples, 1e-15),
        }
    }

    /// Sample `f` on the grid and fit.
    pub fn from_fn(
        shape: Shape,
        degree: usize,
        grid: Grid,
        f: impl Fn(f64) -> Vec<C64>,
    ) -> Fitted {
        let values: Vec<Vec<C64>> = grid.points().map(|(t, _)| f(t)).collect();
        let samples: Vec<Vec<C64>> = (0..shape.len())
            .map(|e| values.iter().map(|v| v[e]).collect())
            .collect();
        Self::fit_samples(shape, &samples, degree)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a - b)
    }

    fn combine(&self, rhs: &Self, op: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.shape, rhs.shape, "shape mismatch");
        let degree = self.degree.max(rhs.degree);
        let a = self.with_degree(degree);
        let b = rhs.with_degree(degree);
        CircleFunction {
            degree,
            shape: self.shape,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| op(*x, *y)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_coeffs(|_, a| a * c)
    }

    /// Multiply by a constant matrix on the left.
    pub fn left_mul_const(&self, m: &DMatrix<C64>) -> Self {
        Self::constant_matrix(m).mul(self).reshaped_like(self.shape, m.nrows())
    }

    fn reshaped_like(mut self, original: Shape, rows: usize) -> Self {
        if let Shape::Vector(_) = original {
            self.shape = Shape::Vector(rows);
        }
        self
    }

    /// Pointwise product (matrix product for shaped values). The result
    /// carries degree `N1 + N2` and is exact.
    pub fn mul(&self, rhs: &Self) -> Self {
        let shape = self.shape.product(rhs.shape);
        let degree = self.degree + rhs.degree;
        let mut out = Self::zeros(shape, degree);
        let w = 2 * degree + 1;
        let (r1, c1) = self.shape.dims();
        let (r2, c2) = rhs.shape.dims();
        let entry_pairs: Vec<(usize, Vec<(usize, usize)>)> = match (self.shape, rhs.shape) {
            (Shape::Scalar, _) => (0..rhs.shape.len()).map(|e| (e, vec![(0, e)])).collect(),
            (_, Shape::Scalar) => (0..self.shape.len()).map(|e| (e, vec![(e, 0)])).collect(),
            _ => {
                assert_eq!(c1, r2, "inner dimensions do not match");
                let mut v = Vec::new();
                for i in 0..r1 {
                    for j in 0..c2 {
                        v.push((i * c2 + j, (0..c1).map(|k| (i * c1 + k, k * c2 + j)).collect()));
                    }
                }
                v
            }
        };
        for (e, pairs) in entry_pairs {
            let dst = &mut out.coeffs[e * w..(e + 1) * w];
            for (ea, eb) in pairs {
                let a = self.entry_slice(ea);
                let b = rhs.entry_slice(eb);
                for (i, x) in a.iter().enumerate() {
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        dst[i + j] += x * y;
                    }
                }
            }
        }
        out
    }

    /// Product truncated back to `degree`.
    pub fn mul_truncated(&self, rhs: &Self, degree: usize) -> Self {
        self.mul(rhs).with_degree(degree)
    }

    /// Pointwise complex conjugate: `c_k = conj(a_{-k})`.
    pub fn conj(&self) -> Self {
        let n = self.degree as isize;
        let mut out = self.clone();
        let w = self.width();
        for e in 0..self.shape.len() {
            for k in -n..=n {
                out.coeffs[e * w + (k + n) as usize] = self.entry_coeff(e, -k).conj();
            }
        }
        out
    }

    /// Pointwise real part.
    pub fn real_part(&self) -> Self {
        self.add(&self.conj()).scale(C64::new(0.5, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        self.sub(&self.conj()).scale(C64::new(0.0, -0.5))
    }

    /// Pointwise transpose of a matrix-valued function.
    pub fn transpose(&self) -> Self {
        let (r, c) = self.shape.dims();
        let entries: Vec<CircleFunction> = (0..c)
            .flat_map(|j| (0..r).map(move |i| (i, j)))
            .map(|(i, j)| self.entry_rc(i, j))
            .collect();
        Self::from_entries(Shape::Matrix(c, r), &entries)
    }

    /// `max_k |a_k - conj(a_{-k})|`; zero for real-valued functions.
    pub fn reality_defect(&self) -> f64 {
        self.sub(&self.conj()).coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Derivative with respect to `theta`.
    pub fn derivative(&self) -> Self {
        self.map_coeffs(|k, a| a * C64::new(0.0, k as f64))
    }

    /// `sqrt(sum_{k<0} |a_k|^2)` over all entries.
    pub fn negative_tail(&self) -> f64 {
        let n = self.degree as isize;
        (0..self.shape.len())
            .flat_map(|e| (-n..0).map(move |k| (e, k)))
            .map(|(e, k)| self.entry_coeff(e, k).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Whether the function extends holomorphically to the disc, to `TAU_HOLO`.
    pub fn is_holomorphic(&self) -> bool {
        self.negative_tail() <= TAU_HOLO * self.l2_norm()
    }

    /// Hilbert transform normalized at 0: `b_k = -i sign(k) a_k`.
    pub fn hilbert_t0(&self) -> Self {
        self.map_coeffs(|k, a| match k.signum() {
            1 => a * C64::new(0.0, -1.0),
            -1 => a * C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        })
    }

    /// Hilbert transform normalized at 1: `T1 f = T0 f - (T0 f)(1)`.
    pub fn hilbert_t1(&self) -> Self {
        let mut out = self.hilbert_t0();
        let at_one = out.at_one();
        let n = self.degree;
        let w = self.width();
        for (e, v) in at_one.into_iter().enumerate() {
            out.coeffs[e * w + n] -= v;
        }
        out
    }
}

/// Divide a scalar series by `sigma - 1`: returns the quotient coefficients
/// `b_k`, `k in [-N-1, N]` (index `k + N + 1`), where the entry at `k = -N-1`
/// is the consistency residual `f(1)`.
fn deconvolve_at_one(f: &CircleFunction) -> (Vec<C64>, isize) {
    let f = f.with_degree(f.degree().max(1));
    let n = f.degree() as isize;
    let offset = n + 1;
    let mut b = vec![C64::new(0.0, 0.0); (2 * n + 2) as usize];
    // b_N = 0; b_k = a_{k+1} + b_{k+1}
    for k in (-n - 1..n).rev() {
        b[(k + offset) as usize] = f.coeff(k + 1) + b[(k + 1 + offset) as usize];
    }
    (b, offset)
}

fn check_vanishes_at_one(f: &CircleFunction) -> Result<()> {
    let tolerance = TAU_ZERO * f.l2_norm();
    let value = f.at_one()[0].norm();
    if value > tolerance {
        return Err(Error::NotVanishingAtOne { value, tolerance });
    }
    Ok(())
}

/// `-(1/pi) int_0^{2pi} f(sigma)/(sigma - 1) dtheta` for scalar `f` with
/// `f(1) = 0`, via exact division by `sigma - 1`.
pub fn cauchy_pv_at_one(f: &CircleFunction) -> Result<C64> {
    check_vanishes_at_one(f)?;
    let (b, offset) = deconvolve_at_one(f);
    Ok(b[offset as usize] * -2.0)
}

/// `-(1/pi) int_0^{2pi} f(sigma)/(conj(sigma) - 1) dtheta`, using
/// `1/(conj(sigma) - 1) = -sigma/(sigma - 1)`.
pub fn cauchy_pv_at_one_conj(f: &CircleFunction) -> Result<C64> {
    check_vanishes_at_one(f)?;
    let (b, offset) = deconvolve_at_one(f);
    Ok(b[(offset - 1) as usize] * 2.0)
}

/// Entry-wise [`cauchy_pv_at_one`] for shaped functions.
pub fn cauchy_pv_entries(f: &CircleFunction) -> Result<Vec<C64>> {
    f.entries().iter().map(cauchy_pv_at_one).collect()
}

pub fn cauchy_pv_conj_entries(f: &CircleFunction) -> Result<Vec<C64>> {
    f.entries().iter().map(cauchy_pv_at_one_conj).collect()
}

/// Winding number of a nonvanishing scalar function around 0.
pub fn winding_number(f: &CircleFunction) -> Result<i64> {
    let mut grid = Grid::with_size((8 * (f.degree() + 1)).next_power_of_two().max(256));
    loop {
        let s = f.scalar_samples(grid);
        let (min, max) = s
            .iter()
            .map(|c| c.norm())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if min.is_nan() || min <= TAU_WIND * max {
            return Err(Error::NearZeroOnCircle { min, max });
        }
        let mut total = 0.0;
        let mut largest_step = 0.0f64;
        for j in 0..s.len() {
            let step = (s[(j + 1) % s.len()] / s[j]).arg();
            largest_step = largest_step.max(step.abs());
            total += step;
        }
        // refine until consecutive samples are well resolved
        if largest_step < PI / 4.0 || grid.size >= 1 << 18 {
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        grid = Grid::with_size(grid.size * 2);
    }
}

/// l2 norm of the negative-frequency coefficients and the coefficients
/// themselves (`a_{-1}, a_{-2}, ...` per entry).
pub fn negative_tail(f: &CircleFunction) -> (f64, Vec<Vec<C64>>) {
    let n = f.degree() as isize;
    let coeffs = (0..f.shape().len())
        .map(|e| (1..=n).map(|k| f.entry_coeff(e, -k)).collect())
        .collect();
    (f.negative_tail(), coeffs)
}

/// Residuals of the two mean-value identities for `f` with `f(1) = 0`:
/// `mean(f + i T1 f) = -(1/pi) int f/(sigma-1)` and the conjugate one.
pub fn check_lemma3(f: &CircleFunction) -> Result<(f64, f64)> {
    let t1 = f.hilbert_t1();
    let i = C64::new(0.0, 1.0);
    let plus = f.add(&t1.scale(i)).mean()[0];
    let minus = f.sub(&t1.scale(i)).mean()[0];
    let r1 = (plus - cauchy_pv_at_one(f)?).norm();
    let r2 = (minus - cauchy_pv_at_one_conj(f)?).norm();
    Ok((r1, r2))
}

/// `|int A/(sigma-1)|` and `|int A/(conj(sigma)-1)|` for
/// `A = fg - (T0 f)(T1 g)`, where `mean f = 0` and `g(1) = 0`.
pub fn check_lemma4(f: &CircleFunction, g: &CircleFunction) -> Result<(f64, f64)> {
    let mean = f.mean()[0].norm();
    if mean > TAU_ZERO * f.l2_norm().max(1.0) {
        return Err(Error::PreconditionViolated(format!(
            "lemma 4 requires mean(f) = 0, found |mean f| = {mean:e}"
        )));
    }
    let g1 = g.at_one()[0].norm();
    if g1 > TAU_ZERO * g.l2_norm().max(1.0) {
        return Err(Error::PreconditionViolated(format!(
            "lemma 4 requires g(1) = 0, found |g(1)| = {g1:e}"
        )));
    }
    let a = f.mul(g).sub(&f.hilbert_t0().mul(&g.hilbert_t1()));
    // the integrals are -pi times the normalized principal values
    Ok((
        PI * cauchy_pv_at_one(&a)?.norm(),
        PI * cauchy_pv_at_one_conj(&a)?.norm(),
    ))
}

/// Boundary values of `f o alpha`, `alpha(zeta) = (zeta + a)/(1 + conj(a) zeta)`.
#[derive(Clone, Debug)]
pub struct MobiusPullback {
    pub function: CircleFunction,
    pub refit_residual: f64,
}

pub fn mobius_pullback(f: &CircleFunction, a: C64, degree: usize) -> Result<MobiusPullback> {
    if a.norm() >= 1.0 {
        return Err(Error::PreconditionViolated(format!(
            "automorphism parameter must satisfy |a| < 1, found {}",
            a.norm()
        )));
    }
    let grid = Grid::for_degree(degree.max(f.degree()));
    let fitted = CircleFunction::from_fn(f.shape(), degree, grid, |t| {
        let s = C64::from_polar(1.0, t);
        let alpha = (s + a) / (C64::new(1.0, 0.0) + a.conj() * s);
        f.eval(alpha.arg())
    });
    Ok(MobiusPullback {
        function: fitted.function,
        refit_residual: fitted.aliasing_tail,
    })
}
