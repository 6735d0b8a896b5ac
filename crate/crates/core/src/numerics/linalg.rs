//! Dense kernels: Hermitian eigendecomposition, SVD-based null spaces,
//! pseudo-inverse square roots and partial traces.
//!
//! Hermitian eigendecomposition and QR are delegated to `nalgebra`; the SVD is
//! a one-sided Jacobi sweep. Outputs are sorted so the ordering is a
//! deterministic function of the input bits.

use alloc::vec::Vec;
use core::ops::Range;

use super::jacobi::{jacobi, orthonormal_columns};
use super::matrix::{ComplexMatrix, ZERO};
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

/// Relative gap below which neighbouring eigenvalues are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-7;

/// Eigendecomposition of the Hermitian part of `h`.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second matrix.
pub fn eigh(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(h.is_square(), "eigh needs a square matrix");
    let n = h.rows();
    let herm = h.hermitian_part().to_dmatrix();
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Thin singular value decomposition `A = U diag(s) V^dag`, singular values descending.
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    let (values, images, v) = jacobi(a);
    // left vectors of tiny singular values are inaccurate; Gram-Schmidt in
    // descending order keeps the accurate ones and repairs the rest
    let candidates = (0..k)
        .map(|j| (values[j] > 0.0).then(|| images[j].iter().map(|z| z / values[j]).collect()))
        .collect();
    let u_cols = orthonormal_columns(m, candidates);
    Svd {
        u: ComplexMatrix::from_fn(m, k, |i, j| u_cols[j][i]),
        singular_values: values[..k].to_vec(),
        v: v.columns(0..k),
    }
}

/// Orthonormal basis of the null space of `l`, as columns of an `n x k` matrix
/// (`None` when the null space is trivial). Singular values at or below
/// `max(rank_eps * sigma_max, floor)` count as zero.
pub(crate) fn null_space_matrix(
    l: &ComplexMatrix,
    rank_eps: f64,
    floor: f64,
) -> Option<ComplexMatrix> {
    let n = l.cols();
    if l.is_zero() {
        return Some(ComplexMatrix::identity(n));
    }
    // the Jacobi sweep returns a full right basis for any shape
    let (singular_values, _, v) = jacobi(l);
    let sigma_max = singular_values[0];
    let cutoff = (rank_eps * sigma_max).max(floor);
    let first_null = singular_values.iter().position(|&s| s <= cutoff)?;
    Some(v.columns(first_null..n))
}

/// Upper-triangular factor `R` of `A = Q R` (`min(rows, cols) x cols`).
pub(crate) fn qr_r(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(&a.to_dmatrix().qr().r())
}

/// Orthonormal basis of `{v : L v = 0}`; singular values at or below
/// `rank_eps * sigma_max` count as zero.
pub fn null_space(l: &ComplexMatrix, tol: &Tolerance) -> Vec<ComplexMatrix> {
    match null_space_matrix(l, tol.rank_eps, 0.0) {
        None => Vec::new(),
        Some(basis) => (0..basis.cols())
            .map(|j| ComplexMatrix::column_vector(&basis.column(j)))
            .collect(),
    }
}

fn check_psd(h: &ComplexMatrix, tol: &Tolerance) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            context: "positive semidefinite input",
            expected: h.rows(),
            found: h.cols(),
        });
    }
    let scale = h.max_abs().max(1.0);
    let defect = (h - &h.adjoint()).max_abs();
    if defect > tol.abs_eps * scale {
        return Err(Error::InvalidArgument(alloc::format!(
            "matrix is not Hermitian (|H - H^dag| = {defect:e})"
        )));
    }
    let (values, vectors) = eigh(h);
    let lowest = values[0];
    let largest = values[values.len() - 1];
    if lowest < -tol.abs_eps * largest.max(1.0) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: lowest,
        });
    }
    Ok((values, vectors))
}

/// `H^{-1/2}` on the support of `H`, zero on its kernel.
pub fn pinv_sqrt(h: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let (values, vectors) = check_psd(h, tol)?;
    let largest = values[values.len() - 1];
    let cutoff = tol.rank_eps * largest;
    let weights: Vec<f64> = values
        .iter()
        .map(|&l| {
            if largest > 0.0 && l > cutoff {
                1.0 / libm::sqrt(l)
            } else {
                0.0
            }
        })
        .collect();
    Ok(spectral_sum(&vectors, &weights))
}

/// Projector onto the eigenvectors of a PSD matrix with eigenvalue above
/// `rank_eps * lambda_max`, plus the orthonormal basis of its kernel.
pub fn support_split(
    h: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<(ComplexMatrix, Vec<ComplexMatrix>)> {
    let (values, vectors) = check_psd(h, tol)?;
    let largest = values[values.len() - 1];
    let cutoff = tol.rank_eps * largest;
    let mut weights = Vec::with_capacity(values.len());
    let mut kernel = Vec::new();
    for (j, &l) in values.iter().enumerate() {
        if largest > 0.0 && l > cutoff {
            weights.push(1.0);
        } else {
            weights.push(0.0);
            kernel.push(ComplexMatrix::column_vector(&vectors.column(j)));
        }
    }
    Ok((spectral_sum(&vectors, &weights), kernel))
}

/// `sum_j w_j v_j v_j^dag` over the columns of `vectors`.
fn spectral_sum(vectors: &ComplexMatrix, weights: &[f64]) -> ComplexMatrix {
    let n = vectors.rows();
    ComplexMatrix::from_fn(n, n, |i, k| {
        let mut acc = ZERO;
        for (j, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                acc += vectors[(i, j)] * vectors[(k, j)].conj() * w;
            }
        }
        acc
    })
}

/// Orthonormal basis (columns) of the range of a projector.
pub fn projector_range(p: &ComplexMatrix) -> ComplexMatrix {
    split_projector(p).0
}

/// Range and kernel bases (as column matrices, possibly with zero columns
/// represented by `None`) of a projector.
pub(crate) fn split_projector(p: &ComplexMatrix) -> (ComplexMatrix, Option<ComplexMatrix>) {
    let n = p.rows();
    let (values, vectors) = eigh(p);
    let first_range = values.iter().position(|&l| l > 0.5).unwrap_or(n);
    let range = if first_range < n {
        vectors.columns(first_range..n)
    } else {
        ComplexMatrix::zeros(n, 0)
    };
    let kernel = (first_range > 0).then(|| vectors.columns(0..first_range));
    (range, kernel)
}

/// Validates that `p` is an orthogonal projector within `abs_eps`.
pub fn check_projector(p: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    if !p.is_square() {
        return Err(Error::NotProjector {
            residual: f64::INFINITY,
        });
    }
    let residual = (p - &p.adjoint()).max_abs().max((&(p * p) - p).max_abs());
    if residual > tol.abs_eps.max(1e-8) {
        return Err(Error::NotProjector { residual });
    }
    Ok(())
}

/// Groups ascending eigenvalues whose neighbouring gaps are at most
/// `rel_gap * scale`, where `scale` is the spectral range or, when larger, the
/// largest magnitude (a numerically flat spectrum stays one cluster).
pub fn cluster_eigenvalues(values: &[f64], rel_gap: f64) -> Vec<Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let spread = values[values.len() - 1] - values[0];
    let magnitude = values[0].abs().max(values[values.len() - 1].abs());
    let threshold = rel_gap * spread.max(magnitude);
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..values.len() {
        if values[k] - values[k - 1] > threshold {
            clusters.push(start..k);
            start = k;
        }
    }
    clusters.push(start..values.len());
    clusters
}

/// Unitary factor of the polar decomposition of a square matrix.
pub fn polar_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let Svd { u, v, .. } = svd(m);
    &u * &v.adjoint()
}

/// Reduced matrix on the factors listed in `keep`.
///
/// `dims` are the factor dimensions of a tensor product (first factor most
/// significant); `keep` is any nonempty set of factor indices.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch {
            context: "partial trace side",
            expected: total,
            found: if m.is_square() { m.rows() } else { m.cols() },
        });
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument(
            "factor dimensions must be positive".into(),
        ));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one factor".into(),
        ));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "factor index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let side: usize = kept_dims.iter().product();
    let env: usize = traced_dims.iter().product();

    // Full index from (kept multi-index, traced multi-index).
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut digits = alloc::vec![0usize; dims.len()];
        let mut rem = kept_idx;
        for (pos, &f) in kept.iter().enumerate().rev() {
            digits[f] = rem % kept_dims[pos];
            rem /= kept_dims[pos];
        }
        let mut rem = traced_idx;
        for (pos, &f) in traced.iter().enumerate().rev() {
            digits[f] = rem % traced_dims[pos];
            rem /= traced_dims[pos];
        }
        digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
    };

    let mut out = ComplexMatrix::zeros(side, side);
    for i in 0..side {
        for j in 0..side {
            let mut acc = ZERO;
            for e in 0..env {
                acc += m[(compose(i, e), compose(j, e))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
