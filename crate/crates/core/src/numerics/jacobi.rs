//! One-sided (Hestenes) Jacobi singular value decomposition.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};

const MAX_SWEEPS: usize = 80;

/// Full right basis and column images of `A V`.
///
/// Returns singular values (descending, one per column of `A`), the matching
/// columns of `A V` and the unitary `V` (`n x n`).
pub(crate) fn jacobi(a: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>, ComplexMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = alloc::vec![ZERO; n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let eps = f64::EPSILON * (m.max(1) as f64);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let phase = gamma / g;
                rotate(&mut cols, i, j, c, s, phase);
                rotate(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let values = order.iter().map(|&k| norms[k]).collect();
    let images = order.iter().map(|&k| cols[k].clone()).collect();
    let v = ComplexMatrix::from_fn(n, n, |r, c| v[order[c]][r]);
    (values, images, v)
}

/// `[x_i, x_j] <- [x_i, x_j] G` with `G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]`.
fn rotate(x: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let (left, right) = x.split_at_mut(j);
    let (xi, xj) = (&mut left[i], &mut right[0]);
    let sp = phase * s;
    let sm = phase.conj() * s;
    for (a, b) in xi.iter_mut().zip(xj.iter_mut()) {
        let (ai, bj) = (*a, *b);
        *a = ai * c - bj * sm;
        *b = ai * sp + bj * c;
    }
}

/// Gram-Schmidt over candidate columns in order; candidates that are missing
/// or nearly dependent are replaced from the standard basis.
pub(crate) fn orthonormal_columns(
    m: usize,
    candidates: Vec<Option<Vec<Complex64>>>,
) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(candidates.len());
    let mut pending = 0;
    for c in candidates {
        match c.and_then(|w| reduce(&basis, w)) {
            Some(w) => basis.push(w),
            None => pending += 1,
        }
    }
    // fill gaps after the accurate columns so those stay untouched; the unit
    // vector with the largest residual always has norm^2 >= (m - len) / m
    let mut fills: Vec<Vec<Complex64>> = Vec::new();
    while fills.len() < pending {
        let all: Vec<Vec<Complex64>> = basis.iter().chain(fills.iter()).cloned().collect();
        let best = (0..m)
            .map(|unit| {
                let mut e = alloc::vec![ZERO; m];
                e[unit] = Complex64::new(1.0, 0.0);
                project_out(&all, e)
            })
            .max_by(|x, y| norm(x).total_cmp(&norm(y)))
            .expect("completion needs a nonempty space");
        let n = norm(&best);
        fills.push(best.into_iter().map(|z| z / n).collect());
    }
    basis.extend(fills);
    basis
}

fn norm(w: &[Complex64]) -> f64 {
    libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum())
}

fn project_out(basis: &[Vec<Complex64>], mut w: Vec<Complex64>) -> Vec<Complex64> {
    for _ in 0..2 {
        for b in basis {
            let p: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk -= p * bk;
            }
        }
    }
    w
}

fn reduce(basis: &[Vec<Complex64>], w: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let start = norm(&w);
    let w = project_out(basis, w);
    let n = norm(&w);
    (n > 0.5 * start && n > 0.0).then(|| w.into_iter().map(|z| z / n).collect())
}
