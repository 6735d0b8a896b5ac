#![allow(dead_code)]

use num_complex::Complex64;
use oaqec_core::channels::Channel;
use oaqec_core::numerics::random;
use oaqec_core::opspace::{orthonormalize, StarAlgebra};
use oaqec_core::{ComplexMatrix, Tolerance};
use rand::Rng;

pub const STRUCTURES: [&[(usize, usize)]; 4] = [
    &[(2, 1)],
    &[(2, 3), (1, 1)],
    &[(3, 2)],
    &[(1, 1), (1, 1), (1, 1), (1, 1)],
];

/// `V (sum_k L(C^d_k) (x) I_m_k + 0_C) V^dag` for a random unitary `V`.
pub struct Planted {
    pub v: ComplexMatrix,
    pub blocks: Vec<(usize, usize)>,
    pub dim_c: usize,
}

impl Planted {
    pub fn random<R: Rng>(blocks: &[(usize, usize)], dim_c: usize, rng: &mut R) -> Self {
        let n = blocks.iter().map(|(d, m)| d * m).sum::<usize>() + dim_c;
        Self {
            v: random::unitary(n, rng),
            blocks: blocks.to_vec(),
            dim_c,
        }
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    fn offset(&self, k: usize) -> usize {
        self.blocks[..k].iter().map(|(d, m)| d * m).sum()
    }

    fn code_dim(&self) -> usize {
        self.offset(self.blocks.len())
    }

    fn conjugate(&self, local: &ComplexMatrix) -> ComplexMatrix {
        &(&self.v * local) * &self.v.adjoint()
    }

    fn place(&self, at: usize, m: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out[(at + i, at + j)] = m[(i, j)];
            }
        }
        out
    }

    /// `V (x (x) y) V^dag` placed on block `k`.
    pub fn embed(&self, k: usize, x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
        self.conjugate(&self.place(self.offset(k), &x.kron(y)))
    }

    pub fn unit(&self) -> ComplexMatrix {
        let n = self.n();
        let ones: Vec<f64> = (0..n)
            .map(|i| if i < self.code_dim() { 1.0 } else { 0.0 })
            .collect();
        self.conjugate(&ComplexMatrix::diagonal_real(&ones))
    }

    pub fn algebra_basis(&self) -> Vec<ComplexMatrix> {
        let mut out = Vec::new();
        for (k, &(d, m)) in self.blocks.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out.push(self.embed(
                        k,
                        &ComplexMatrix::unit(d, i, j),
                        &ComplexMatrix::identity(m),
                    ));
                }
            }
        }
        out
    }

    pub fn algebra(&self) -> StarAlgebra {
        let tol = Tolerance::default();
        let space = orthonormalize(&self.algebra_basis(), self.n(), &tol).unwrap();
        StarAlgebra::new(space, self.unit(), &tol).unwrap()
    }

    /// Random element of the algebra.
    pub fn element<R: Rng>(&self, rng: &mut R) -> ComplexMatrix {
        let n = self.n();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &(d, m)) in self.blocks.iter().enumerate() {
            out += &self.embed(k, &random::ginibre(d, d, rng), &ComplexMatrix::identity(m));
        }
        out
    }

    /// `kraus` elements `V (sum_k I_d (x) b_ak + c_a) V^dag`, each family
    /// `{b_ak}_a`, `{c_a}_a` cut from a random isometry. The channel conserves
    /// the algebra.
    pub fn conserving_kraus<R: Rng>(&self, kraus: usize, rng: &mut R) -> Vec<ComplexMatrix> {
        let n = self.n();
        let mut out = vec![ComplexMatrix::zeros(n, n); kraus];
        let mut pieces: Vec<(usize, usize, usize)> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, &(d, m))| (self.offset(k), d, m))
            .collect();
        if self.dim_c > 0 {
            pieces.push((self.code_dim(), 1, self.dim_c));
        }
        for (at, d, m) in pieces {
            let iso = random::isometry(kraus * m, m, rng);
            for (a, e) in out.iter_mut().enumerate() {
                let b = ComplexMatrix::from_fn(m, m, |i, j| iso[(a * m + i, j)]);
                *e += &self.place(at, &ComplexMatrix::identity(d).kron(&b));
            }
        }
        out.into_iter().map(|e| self.conjugate(&e)).collect()
    }

    pub fn conserving_channel<R: Rng>(&self, kraus: usize, rng: &mut R) -> Channel {
        Channel::new(self.conserving_kraus(kraus, rng)).unwrap()
    }

    /// Correctable but generally not conserving: `|a> (x) W_a B_a` with
    /// `B_a` conserving and `W_a` random unitaries, so `E_c^dag E_b = delta_cb B_b^dag B_b`.
    pub fn flagged_channel<R: Rng>(&self, kraus: usize, rng: &mut R) -> Channel {
        let n = self.n();
        let elements = self
            .conserving_kraus(kraus, rng)
            .into_iter()
            .enumerate()
            .map(|(a, b)| ComplexMatrix::ket(kraus, a).kron(&(&random::unitary(n, rng) * &b)))
            .collect();
        Channel::new(elements).unwrap()
    }
}

pub fn random_structure<R: Rng>(rng: &mut R) -> (Vec<(usize, usize)>, usize) {
    let blocks = STRUCTURES[rng.random_range(0..STRUCTURES.len())].to_vec();
    (blocks, rng.random_range(0..3))
}

pub fn sorted_blocks(blocks: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut b = blocks.to_vec();
    b.sort_unstable_by(|x, y| y.cmp(x));
    b
}

/// Random rank-`r` orthogonal projector on `C^n`.
pub fn random_projector<R: Rng>(n: usize, r: usize, rng: &mut R) -> ComplexMatrix {
    let q = random::isometry(n, r, rng);
    &q * &q.adjoint()
}

/// Column-stochastic matrix with a random sparsity pattern (every column keeps one entry).
pub fn random_stochastic<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut e = vec![0.0; n * n];
    for j in 0..n {
        let keep = rng.random_range(0..n);
        let mut col: Vec<f64> = (0..n)
            .map(|i| {
                if i == keep || rng.random_bool(0.4) {
                    rng.random_range(0.05..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let s: f64 = col.iter().sum();
        col.iter_mut().for_each(|x| *x /= s);
        for i in 0..n {
            e[i * n + j] = col[i];
        }
    }
    e
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
