//! Block (Wedderburn) structure of a finite-dimensional *-algebra:
//! a unitary `W` with `W^dag A W = (+)_k L(C^{d_k}) (x) I_{m_k} (+) 0_C`.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::algebra::{commutant, StarAlgebra};
use super::space::{fix_phase, intersect, orthonormalize};
use crate::error::{Error, Result};
use crate::numerics::random::{complex_gaussian, hermitian_combination, hermitian_generators};
use crate::numerics::{
    cluster_eigenvalues, eigh, polar_unitary, split_projector, svd, ComplexMatrix, Tolerance,
    CLUSTER_GAP, ZERO,
};

/// Residual allowed on the block form of every basis element.
pub const STRUCTURE_EPS: f64 = 1e-8;

const MAX_ATTEMPTS: u64 = 8;
const MAX_TIGHTENINGS: usize = 3;

/// One simple summand `L(C^d) (x) I_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    /// Dimension `d_k` of the factor the algebra acts on irreducibly.
    pub dim: usize,
    /// Multiplicity `m_k` (dimension of the factor acted on trivially).
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure {
    /// Unitary whose columns are ordered block by block (index `a * m + j`
    /// inside a block), followed by the `dim_c` columns of the null part.
    pub intertwiner: ComplexMatrix,
    /// Canonical order: `d` descending, then `m` descending, then position.
    pub blocks: Vec<Block>,
    pub dim_c: usize,
    /// Block-form residual measured on the algebra basis.
    pub residual: f64,
    /// Seed of the successful draw.
    pub seed: u64,
}

impl BlockStructure {
    pub fn dim_h(&self) -> usize {
        self.intertwiner.rows()
    }

    /// `sum d_k^2`, the dimension of the algebra.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Worst deviation of `W^dag X W` from `(+)_k x_k (x) I_{m_k} (+) 0` over
    /// the given operators, combined with the unitarity defect of `W`.
    pub fn block_form_residual(&self, ops: &[ComplexMatrix]) -> f64 {
        let w = &self.intertwiner;
        let wa = w.adjoint();
        let mut worst = w.isometry_defect();
        for x in ops {
            let y = &(&wa * x) * w;
            let expected = self.expected_block_form(&y);
            worst = worst.max((&y - &expected).hs_norm());
        }
        worst
    }

    fn expected_block_form(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let n = y.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            let (d, m) = (b.dim, b.multiplicity);
            for a in 0..d {
                for c in 0..d {
                    let mut x = ZERO;
                    for j in 0..m {
                        x += y[(offset + a * m + j, offset + c * m + j)];
                    }
                    x /= m as f64;
                    for j in 0..m {
                        out[(offset + a * m + j, offset + c * m + j)] = x;
                    }
                }
            }
            offset += d * m;
        }
        out
    }
}

/// Computes the block structure of `alg`.
///
/// Minimal central projections come from the spectrum of a random Hermitian
/// element of the center; inside each block a random Hermitian element of the
/// block commutant splits the multiplicity space, and polar factors of random
/// commutant elements supply the matching partial isometries. A draw that
/// fails verification is repeated with the next seed, up to eight times.
pub fn structure_decomposition(
    alg: &StarAlgebra,
    seed: u64,
    tol: &Tolerance,
) -> Result<BlockStructure> {
    let n = alg.dim_h();
    let (q, kernel) = split_projector(alg.unit());
    if alg.dim() == 0 || q.cols() == 0 {
        return Ok(BlockStructure {
            intertwiner: ComplexMatrix::identity(n),
            blocks: Vec::new(),
            dim_c: n,
            residual: 0.0,
            seed,
        });
    }
    let comm = commutant(alg.basis(), alg.unit(), tol)?;
    let center = intersect(alg.space(), comm.space(), tol)?;
    let center_herm = hermitian_generators(center.basis());

    let mut worst: f64 = 0.0;
    for attempt in 0..MAX_ATTEMPTS {
        let s = seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        match attempt_decomposition(
            alg,
            &q,
            kernel.as_ref(),
            &center_herm,
            center.dim(),
            &mut rng,
            tol,
        ) {
            Some((w, blocks)) => {
                let dim_c = n - q.cols();
                let mut st = BlockStructure {
                    intertwiner: w,
                    blocks,
                    dim_c,
                    residual: 0.0,
                    seed: s,
                };
                if st.algebra_dim() != alg.dim() {
                    worst = f64::INFINITY;
                    continue;
                }
                st.residual = st.block_form_residual(alg.basis());
                if st.residual <= STRUCTURE_EPS {
                    return Ok(st);
                }
                worst = worst.max(st.residual);
            }
            None => worst = f64::INFINITY,
        }
    }
    Err(Error::DecompositionFailed {
        attempts: MAX_ATTEMPTS as usize,
        residual: worst,
    })
}

struct PendingBlock {
    block: Block,
    first_support: usize,
    columns: ComplexMatrix,
}

fn attempt_decomposition(
    alg: &StarAlgebra,
    q: &ComplexMatrix,
    kernel: Option<&ComplexMatrix>,
    center_herm: &[ComplexMatrix],
    center_dim: usize,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
) -> Option<(ComplexMatrix, Vec<Block>)> {
    let z = hermitian_combination(center_herm, rng)?;
    let zr = &(&q.adjoint() * &z) * q;
    let (values, vectors) = eigh(&zr);

    let mut gap = CLUSTER_GAP;
    let mut clusters = cluster_eigenvalues(&values, gap);
    for _ in 0..MAX_TIGHTENINGS {
        if clusters.len() == center_dim {
            break;
        }
        gap /= 10.0;
        clusters = cluster_eigenvalues(&values, gap);
    }
    if clusters.len() != center_dim {
        return None;
    }

    let mut pending = Vec::with_capacity(clusters.len());
    for range in clusters {
        let wk = q * &vectors.columns(range);
        pending.push(decompose_block(alg, &wk, rng, tol)?);
    }
    pending.sort_by(|a, b| {
        b.block
            .dim
            .cmp(&a.block.dim)
            .then(b.block.multiplicity.cmp(&a.block.multiplicity))
            .then(a.first_support.cmp(&b.first_support))
    });

    let mut parts: Vec<&ComplexMatrix> = pending.iter().map(|p| &p.columns).collect();
    let mut complement = kernel.cloned();
    if let Some(k) = complement.as_mut() {
        fix_column_phases(k);
    }
    if let Some(k) = complement.as_ref() {
        parts.push(k);
    }
    let w = ComplexMatrix::hstack(&parts);
    Some((w, pending.iter().map(|p| p.block).collect()))
}

/// Columns of `W` for the block supported on the range of the isometry `wk`.
fn decompose_block(
    alg: &StarAlgebra,
    wk: &ComplexMatrix,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
) -> Option<PendingBlock> {
    let rk = wk.cols();
    let wka = wk.adjoint();
    let compressed: Vec<ComplexMatrix> = alg.basis().iter().map(|x| &(&wka * x) * wk).collect();
    let local = orthonormalize(&compressed, rk, tol).ok()?;
    let d = exact_sqrt(local.dim())?;
    let local_comm = commutant(local.basis(), &ComplexMatrix::identity(rk), tol).ok()?;
    let m = exact_sqrt(local_comm.dim())?;
    if d * m != rk {
        return None;
    }

    let first_support = (0..wk.rows())
        .find(|&i| (0..rk).map(|j| wk[(i, j)].norm_sqr()).sum::<f64>() > 1e-8)
        .unwrap_or(usize::MAX);

    // Eigenspaces of a generic Hermitian commutant element are C^d (x) |h_j>.
    let comm_herm = hermitian_generators(local_comm.basis());
    let h = hermitian_combination(&comm_herm, rng)?;
    let (values, vectors) = eigh(&h);
    let clusters = cluster_eigenvalues(&values, CLUSTER_GAP);
    if clusters.len() != m || clusters.iter().any(|c| c.len() != d) {
        return None;
    }
    let mut first = vectors.columns(clusters[0].clone());
    fix_column_phases(&mut first);

    // partners[j] maps the first eigenspace onto the j-th one
    let mut partners = Vec::with_capacity(m);
    partners.push(first.clone());
    for range in clusters.iter().skip(1) {
        let ej = vectors.columns(range.clone());
        let g = random_element(local_comm.basis(), rng);
        let mj = &(&ej.adjoint() * &g) * &first;
        let s = svd(&mj).singular_values;
        if s[s.len() - 1] <= 1e-6 * s[0] {
            return None;
        }
        partners.push(&ej * &polar_unitary(&mj));
    }

    let local_cols = ComplexMatrix::from_fn(rk, rk, |row, col| {
        let (a, j) = (col / m, col % m);
        partners[j][(row, a)]
    });
    Some(PendingBlock {
        block: Block {
            dim: d,
            multiplicity: m,
        },
        first_support,
        columns: wk * &local_cols,
    })
}

fn random_element(basis: &[ComplexMatrix], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(basis[0].rows(), basis[0].cols());
    for b in basis {
        acc += &b.scale(complex_gaussian(rng));
    }
    acc
}

fn fix_column_phases(m: &mut ComplexMatrix) {
    for j in 0..m.cols() {
        let mut col = m.column(j);
        fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
}

fn exact_sqrt(k: usize) -> Option<usize> {
    let r = libm::round(libm::sqrt(k as f64)) as usize;
    (r * r == k && r > 0).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random;
    use crate::opspace::{block_algebra, generate_algebra, OperatorSpace};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn full_matrix_algebra_is_one_block() {
        let alg = StarAlgebra::full(&ComplexMatrix::identity(3), &tol()).unwrap();
        let st = structure_decomposition(&alg, 0, &tol()).unwrap();
        assert_eq!(
            st.blocks,
            alloc::vec![Block {
                dim: 3,
                multiplicity: 1
            }]
        );
        assert_eq!(st.dim_c, 0);
        assert!(st.residual < 1e-10);
    }

    #[test]
    fn diagonal_algebra_is_three_scalar_blocks() {
        let ps: Vec<_> = (0..3).map(|i| ComplexMatrix::unit(3, i, i)).collect();
        let alg = block_algebra(&ps, &tol()).unwrap();
        let st = structure_decomposition(&alg, 0, &tol()).unwrap();
        assert_eq!(st.blocks, alloc::vec![Block { dim: 1, multiplicity: 1 }; 3]);
        assert_eq!(st.dim_c, 0);
    }

    #[test]
    fn planted_block_with_multiplicity_and_null_part() {
        // V (L(C^2) (x) I_3 (+) 0_1) V^dag on C^7
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random::unitary(7, &mut rng);
        let embed = |x: &ComplexMatrix| {
            let big = x.kron(&ComplexMatrix::identity(3));
            let mut y = ComplexMatrix::zeros(7, 7);
            for i in 0..6 {
                for j in 0..6 {
                    y[(i, j)] = big[(i, j)];
                }
            }
            &(&v * &y) * &v.adjoint()
        };
        let gens: Vec<_> = OperatorSpace::full(2).basis().iter().map(embed).collect();
        let unit = embed(&ComplexMatrix::identity(2));
        let alg = generate_algebra(&gens, &unit, &tol()).unwrap();
        assert_eq!(alg.dim(), 4);
        let st = structure_decomposition(&alg, 0, &tol()).unwrap();
        assert_eq!(
            st.blocks,
            alloc::vec![Block {
                dim: 2,
                multiplicity: 3
            }]
        );
        assert_eq!(st.dim_c, 1);
        assert!(st.residual <= STRUCTURE_EPS);
        // cached structure agrees
        assert_eq!(alg.structure(&tol()).unwrap().blocks, st.blocks);
    }

    #[test]
    fn zero_algebra() {
        let alg = commutant(
            &[ComplexMatrix::unit(2, 0, 1)],
            &ComplexMatrix::diagonal_real(&[1.0, 0.0]),
            &tol(),
        )
        .unwrap();
        let st = structure_decomposition(&alg, 0, &tol()).unwrap();
        assert!(st.blocks.is_empty());
        assert_eq!(st.dim_c, 2);
    }
}
