//! Numerical rank and kernel computations with an explicit spectral-gap rule.

use nalgebra::{ComplexField, DMatrix, DVector};

/// Relative singular-value threshold.
pub const TAU_RANK: f64 = 1e-8;
/// Minimum ratio between the smallest kept and the largest discarded
/// singular value for a rank decision to count as unambiguous.
pub const GAP_REQUIRED: f64 = 1e3;

/// Numerical rank of a matrix together with the evidence for it.
#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `None` when the matrix is exactly zero.
    pub gap_ratio: Option<f64>,
    pub ambiguous: bool,
}

/// Numerical kernel: its dimension and an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Kernel<T: ComplexField<RealField = f64>> {
    pub dimension: usize,
    pub singular_values: Vec<f64>,
    pub gap_ratio: Option<f64>,
    pub ambiguous: bool,
    pub basis: Vec<DVector<T>>,
}

fn classify(sv: &[f64], tau: f64, gap_required: f64) -> (usize, Option<f64>, bool) {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, None, false);
    }
    let rank = sv.iter().take_while(|&&s| s > tau * smax).count();
    let smallest_kept = sv[rank - 1];
    let largest_dropped = sv.get(rank).copied().unwrap_or(0.0);
    let gap = smallest_kept / largest_dropped.max(f64::EPSILON * smax);
    (rank, Some(gap), gap < gap_required)
}

/// Singular values in descending order with the matching right singular
/// vectors (as rows of `V^H`).
fn sorted_svd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> (Vec<f64>, Vec<DVector<T>>) {
    let (rows, cols) = a.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| v_t.row(i).transpose().map(|x| x.conjugate()))
        .collect();
    (values, vectors)
}

/// Kernel of `a` with the relative threshold `tau` and the gap rule.
pub fn kernel_with<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tau: f64,
    gap_required: f64,
) -> Kernel<T> {
    let cols = a.ncols();
    if cols == 0 {
        return Kernel {
            dimension: 0,
            singular_values: Vec::new(),
            gap_ratio: None,
            ambiguous: false,
            basis: Vec::new(),
        };
    }
    let (sv, vectors) = sorted_svd(a);
    let (rank, gap_ratio, ambiguous) = classify(&sv, tau, gap_required);
    Kernel {
        dimension: cols - rank,
        singular_values: sv,
        gap_ratio,
        ambiguous,
        basis: vectors.into_iter().skip(rank).collect(),
    }
}

pub fn kernel<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Kernel<T> {
    kernel_with(a, TAU_RANK, GAP_REQUIRED)
}

/// Numerical rank; wide matrices are handled through their adjoint.
pub fn rank<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> RankInfo {
    let m = if a.nrows() < a.ncols() {
        a.adjoint()
    } else {
        a.clone()
    };
    if m.ncols() == 0 {
        return RankInfo {
            rank: 0,
            singular_values: Vec::new(),
            gap_ratio: None,
            ambiguous: false,
        };
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let (rank, gap_ratio, ambiguous) = classify(&sv, TAU_RANK, GAP_REQUIRED);
    RankInfo {
        rank,
        singular_values: sv,
        gap_ratio,
        ambiguous,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn kernel_of_rank_one() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let k = kernel(&a);
        assert_eq!(k.dimension, 2);
        assert!(!k.ambiguous);
        for v in &k.basis {
            assert!((&a * v).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let a = DMatrix::<f64>::zeros(4, 3);
        let k = kernel(&a);
        assert_eq!(k.dimension, 3);
        assert_eq!(k.gap_ratio, None);
        assert_eq!(rank(&a).rank, 0);
    }

    #[test]
    fn ambiguous_without_gap() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-7, 1e-9]));
        let k = kernel(&a);
        assert_eq!(k.dimension, 1);
        assert!(k.ambiguous);
    }

    #[test]
    fn complex_rank_of_wide_matrix() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(1, 3, &[one, i, one + i]);
        let r = rank(&a);
        assert_eq!(r.rank, 1);
        let k = kernel(&a);
        assert_eq!(k.dimension, 2);
        for v in &k.basis {
            assert!((&a * v).norm() < 1e-12);
        }
    }
}
