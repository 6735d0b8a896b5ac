use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{null_space_matrix, svd, ComplexMatrix, Tolerance, ZERO};

/// Relative residual above which a candidate extends a span during closure.
pub(crate) const SPAN_EPS: f64 = 1e-8;

/// Linear subspace of `L(C^dim_h)` with a Hilbert-Schmidt orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpace {
    dim_h: usize,
    basis: Vec<ComplexMatrix>,
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Containment {
    pub contained: bool,
    /// `|X - proj(X)|` in the Hilbert-Schmidt norm.
    pub residual: f64,
}

impl OperatorSpace {
    pub fn empty(dim_h: usize) -> Self {
        Self {
            dim_h,
            basis: Vec::new(),
        }
    }

    /// Wraps a basis the caller guarantees to be orthonormal.
    pub(crate) fn from_orthonormal(dim_h: usize, basis: Vec<ComplexMatrix>) -> Self {
        Self { dim_h, basis }
    }

    /// All of `L(C^n)`, spanned by the matrix units `|i><j|`.
    pub fn full(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(ComplexMatrix::unit(n, i, j));
            }
        }
        Self { dim_h: n, basis }
    }

    #[inline]
    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    /// Dimension of the span.
    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_h, self.dim_h);
        for b in &self.basis {
            out += &b.scale(b.hs_inner(x));
        }
        out
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: &Tolerance) -> Result<Containment> {
        check_shape(self.dim_h, x, "operator membership")?;
        let residual = (x - &self.project(x)).hs_norm();
        Ok(Containment {
            contained: residual <= tol.abs_eps * x.hs_norm().max(1.0),
            residual,
        })
    }

    /// Largest membership residual of `other`'s basis in `self`.
    pub fn containment_residual(&self, other: &OperatorSpace) -> f64 {
        other
            .basis
            .iter()
            .map(|b| (b - &self.project(b)).hs_norm())
            .fold(0.0, f64::max)
    }

    /// Equal dimension and mutual containment, returning the worst residual.
    pub fn same_span(&self, other: &OperatorSpace, eps: f64) -> (bool, f64) {
        let residual = self
            .containment_residual(other)
            .max(other.containment_residual(self));
        (self.dim() == other.dim() && residual <= eps, residual)
    }

    /// `max |<b_i, b_j> - delta_ij|` over the basis.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.hs_inner(b) - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn check_shape(dim_h: usize, x: &ComplexMatrix, context: &'static str) -> Result<()> {
    if x.rows() != dim_h || x.cols() != dim_h {
        return Err(Error::DimensionMismatch {
            context,
            expected: dim_h,
            found: if x.rows() != dim_h {
                x.rows()
            } else {
                x.cols()
            },
        });
    }
    Ok(())
}

/// Hilbert-Schmidt orthonormal basis of the span of `ops`.
///
/// The dimension is the numerical rank of the stacked vectorized operators:
/// singular values above `rank_eps * sigma_max` and above `abs_eps` count.
pub fn orthonormalize(
    ops: &[ComplexMatrix],
    dim_h: usize,
    tol: &Tolerance,
) -> Result<OperatorSpace> {
    for op in ops {
        check_shape(dim_h, op, "orthonormalize")?;
    }
    if ops.is_empty() {
        return Ok(OperatorSpace::empty(dim_h));
    }
    let n2 = dim_h * dim_h;
    // Columns are the vectorized operators.
    let stacked = ComplexMatrix::from_fn(n2, ops.len(), |r, c| ops[c].data()[r]);
    let dec = svd(&stacked);
    let sigma_max = dec.singular_values[0];
    let cutoff = (tol.rank_eps * sigma_max).max(tol.abs_eps);
    let rank = dec
        .singular_values
        .iter()
        .take_while(|&&s| s > cutoff)
        .count();
    let basis = (0..rank)
        .map(|k| {
            let mut col = dec.u.column(k);
            fix_phase(&mut col);
            ComplexMatrix::new(dim_h, dim_h, col).expect("vectorized column")
        })
        .collect();
    Ok(OperatorSpace { dim_h, basis })
}

/// Rotates a vector so its largest-magnitude entry is real positive.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (k, z) in v.iter().enumerate() {
        // small slack keeps the choice stable under rounding
        if z.norm() > best_abs + 1e-12 {
            best = k;
            best_abs = z.norm();
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Intersection of two spans, via the null space of `[A | -B]`.
pub fn intersect(a: &OperatorSpace, b: &OperatorSpace, tol: &Tolerance) -> Result<OperatorSpace> {
    if a.dim_h != b.dim_h {
        return Err(Error::DimensionMismatch {
            context: "intersect",
            expected: a.dim_h,
            found: b.dim_h,
        });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(OperatorSpace::empty(a.dim_h));
    }
    let n2 = a.dim_h * a.dim_h;
    let (ka, kb) = (a.dim(), b.dim());
    let m = ComplexMatrix::from_fn(n2, ka + kb, |r, c| {
        if c < ka {
            a.basis[c].data()[r]
        } else {
            -b.basis[c - ka].data()[r]
        }
    });
    // orthonormal columns: singular values are at most sqrt(2)
    let Some(null) = null_space_matrix(&m, tol.rank_eps, tol.rank_eps) else {
        return Ok(OperatorSpace::empty(a.dim_h));
    };
    let common: Vec<ComplexMatrix> = (0..null.cols())
        .map(|j| {
            let mut x = ComplexMatrix::zeros(a.dim_h, a.dim_h);
            for (i, ai) in a.basis.iter().enumerate() {
                let c = null[(i, j)];
                if c != ZERO {
                    x += &ai.scale(c);
                }
            }
            x
        })
        .collect();
    orthonormalize(&common, a.dim_h, tol)
}

/// Incremental Gram-Schmidt accumulator used by algebra closure.
pub(crate) struct SpanBuilder {
    dim_h: usize,
    basis: Vec<ComplexMatrix>,
    floor: f64,
}

impl SpanBuilder {
    pub(crate) fn new(dim_h: usize, floor: f64) -> Self {
        Self {
            dim_h,
            basis: Vec::new(),
            floor,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.basis.len()
    }

    pub(crate) fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Adds the component of `op` orthogonal to the current span, if it is
    /// significant. Returns whether the span grew.
    pub(crate) fn push(&mut self, op: &ComplexMatrix) -> bool {
        let norm = op.hs_norm();
        if norm <= self.floor {
            return false;
        }
        let mut r = op.clone();
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.hs_inner(&r);
                if c != ZERO {
                    r -= &b.scale(c);
                }
            }
        }
        let rn = r.hs_norm();
        if rn <= SPAN_EPS * norm || rn <= self.floor {
            return false;
        }
        self.basis.push(r.scale_re(1.0 / rn));
        true
    }

    pub(crate) fn finish(self) -> OperatorSpace {
        OperatorSpace {
            dim_h: self.dim_h,
            basis: self.basis,
        }
    }
}
