//! Seeded random matrices.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::polar_unitary;
use super::matrix::ComplexMatrix;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng)) * core::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(n, n, rng).hermitian_part()
}

/// Random unitary from the polar factor of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    polar_unitary(&ginibre(n, n, rng))
}

/// Random `rows x cols` isometry (`rows >= cols`).
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols);
    unitary(rows, rng).columns(0..cols)
}

/// Density matrix `G G^dag / Tr(G G^dag)` of the given rank.
pub fn density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rank, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_re(1.0 / tr)
}

/// Real Gaussian linear combination of Hermitian matrices.
pub fn hermitian_combination<R: Rng + ?Sized>(
    terms: &[ComplexMatrix],
    rng: &mut R,
) -> Option<ComplexMatrix> {
    let mut iter = terms.iter();
    let first = iter.next()?;
    let mut acc = first.scale_re(gaussian(rng));
    for t in iter {
        acc += &t.scale_re(gaussian(rng));
    }
    Some(acc)
}

/// Hermitian parts `(B + B^dag)/2` and `(B - B^dag)/2i` of each operator, dropping zeros.
pub fn hermitian_generators(ops: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(2 * ops.len());
    for b in ops {
        let re = b.hermitian_part();
        let im = (b - &b.adjoint()).scale(Complex64::new(0.0, -0.5));
        for h in [re, im] {
            if h.max_abs() > 1e-14 {
                out.push(h);
            }
        }
    }
    out
}
