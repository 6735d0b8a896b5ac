use alloc::vec::Vec;

use once_cell::race::OnceBox;

use super::space::{orthonormalize, OperatorSpace, SpanBuilder};
use super::structure::{structure_decomposition, BlockStructure};
use crate::error::{Error, Result};
use crate::numerics::{
    check_projector, null_space_matrix, qr_r, split_projector, support_split, ComplexMatrix,
    Tolerance, ZERO,
};

/// Finite-dimensional *-algebra supported on the range of its unit projector.
pub struct StarAlgebra {
    space: OperatorSpace,
    unit: ComplexMatrix,
    compressed_generators: bool,
    structure: OnceBox<BlockStructure>,
}

impl Clone for StarAlgebra {
    fn clone(&self) -> Self {
        let structure = OnceBox::new();
        if let Some(s) = self.structure.get() {
            let _ = structure.set(alloc::boxed::Box::new(s.clone()));
        }
        Self {
            space: self.space.clone(),
            unit: self.unit.clone(),
            compressed_generators: self.compressed_generators,
            structure,
        }
    }
}

impl core::fmt::Debug for StarAlgebra {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("StarAlgebra")
            .field("dim_h", &self.dim_h())
            .field("dim", &self.dim())
            .field("unit_rank", &self.unit.trace().re)
            .finish()
    }
}

impl StarAlgebra {
    pub(crate) fn from_parts(space: OperatorSpace, unit: ComplexMatrix) -> Self {
        Self {
            space,
            unit,
            compressed_generators: false,
            structure: OnceBox::new(),
        }
    }

    /// Wraps an operator space, checking every algebra invariant within `1e-8`.
    pub fn new(space: OperatorSpace, unit: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        check_projector(&unit, tol)?;
        let alg = Self::from_parts(space, unit);
        let defect = alg.invariant_defect();
        if defect > 1e-8 {
            return Err(Error::InvalidArgument(alloc::format!(
                "operator space is not a *-algebra with the given unit (defect {defect:e})"
            )));
        }
        Ok(alg)
    }

    /// All of `P L(H) P`.
    pub fn full(unit: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        commutant(&[], unit, tol)
    }

    pub fn space(&self) -> &OperatorSpace {
        &self.space
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.space.basis()
    }

    pub fn unit(&self) -> &ComplexMatrix {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.space.dim_h()
    }

    /// Whether some generator had to be compressed to `P G P`.
    pub fn generators_compressed(&self) -> bool {
        self.compressed_generators
    }

    /// Block structure for seed 0, computed on first use.
    pub fn structure(&self, tol: &Tolerance) -> Result<&BlockStructure> {
        if let Some(s) = self.structure.get() {
            return Ok(s);
        }
        let s = structure_decomposition(self, 0, tol)?;
        Ok(self.structure.get_or_init(|| alloc::boxed::Box::new(s)))
    }

    /// Largest violation of adjoint closure, product closure, support on the
    /// unit, and membership of the unit.
    pub fn invariant_defect(&self) -> f64 {
        let basis = self.basis();
        let p = &self.unit;
        let mut worst: f64 = 0.0;
        let residual = |x: &ComplexMatrix| (x - &self.space.project(x)).hs_norm();
        for x in basis {
            worst = worst.max(residual(&x.adjoint()));
            worst = worst
                .max((&(p * x) - x).hs_norm())
                .max((&(x * p) - x).hs_norm());
            for y in basis {
                worst = worst.max(residual(&(x * y)));
            }
        }
        worst.max(residual(p))
    }

    /// Whether every basis element commutes with every other within `eps`.
    pub fn is_commutative(&self, eps: f64) -> bool {
        commutative(self.basis(), eps)
    }
}

pub(crate) fn commutative(basis: &[ComplexMatrix], eps: f64) -> bool {
    basis.iter().enumerate().all(|(i, x)| {
        basis[i + 1..]
            .iter()
            .all(|y| x.commutator(y).op_norm() <= eps)
    })
}

fn check_square(n: usize, x: &ComplexMatrix, context: &'static str) -> Result<()> {
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch {
            context,
            expected: n,
            found: if x.rows() != n { x.rows() } else { x.cols() },
        });
    }
    Ok(())
}

/// Smallest *-algebra containing `P` and the compressions `P G P` of the generators.
///
/// Spans are closed under adjoints and pairwise products, round by round,
/// until the dimension stops growing.
pub fn generate_algebra(
    generators: &[ComplexMatrix],
    unit: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<StarAlgebra> {
    check_projector(unit, tol)?;
    let n = unit.rows();
    let mut compressed = false;
    let mut builder = SpanBuilder::new(n, tol.abs_eps);
    builder.push(unit);
    for g in generators {
        check_square(n, g, "algebra generator")?;
        let pgp = &(unit * g) * unit;
        if (&pgp - g).hs_norm() > tol.abs_eps * g.hs_norm().max(1.0) {
            compressed = true;
        }
        builder.push(&pgp);
        builder.push(&pgp.adjoint());
    }
    let rank = libm::round(unit.trace().re) as usize;
    let max_dim = rank * rank;
    let mut done = 0;
    while done < builder.len() && builder.len() < max_dim {
        let current = builder.len();
        let snapshot: Vec<ComplexMatrix> = builder.basis().to_vec();
        'round: for j in done..current {
            let bj = &snapshot[j];
            builder.push(&bj.adjoint());
            for bi in &snapshot {
                builder.push(&(bi * bj));
                builder.push(&(bj * bi));
                if builder.len() >= max_dim {
                    break 'round;
                }
            }
        }
        done = current;
    }
    let mut alg = StarAlgebra::from_parts(builder.finish(), unit.clone());
    alg.compressed_generators = compressed;
    Ok(alg)
}

/// `{X = P X P : [X, s] = [X, s^dag] = 0 for all s in S}`.
///
/// The constraint set is first replaced by an orthonormal basis of
/// `span(S + S^dag)`; the unknown is `X = Q Y Q^dag` with `Q` spanning `P H`.
/// The commutator superoperators are stacked batch by batch into a running QR
/// factor, so the final SVD is only `r^2 x r^2` for `r = rank P`.
pub fn commutant(
    set: &[ComplexMatrix],
    within: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<StarAlgebra> {
    check_projector(within, tol)?;
    let n = within.rows();
    for s in set {
        check_square(n, s, "commutant constraint")?;
    }
    let (q, _) = split_projector(within);
    let r = q.cols();
    if r == 0 {
        return Ok(StarAlgebra::from_parts(
            OperatorSpace::empty(n),
            within.clone(),
        ));
    }

    // one SVD of the whole family; incremental Gram-Schmidt would normalize
    // weakly represented directions with amplified rounding error
    let scale = set.iter().map(|s| s.hs_norm()).fold(1.0, f64::max);
    let mut family = Vec::with_capacity(2 * set.len());
    for s in set {
        family.push(s.clone());
        family.push(s.adjoint());
    }
    let constraints = orthonormalize(
        &family,
        n,
        &Tolerance {
            abs_eps: tol.abs_eps * scale,
            ..*tol
        },
    )?;

    let n2 = n * n;
    let r2 = r * r;
    // R factor of the stacked constraint superoperators, accumulated batch by
    // batch; its null space is that of the full stack.
    let batch = (4 * r2).div_ceil(n2).max(1);
    let mut acc: Option<ComplexMatrix> = None;
    for chunk in constraints.basis().chunks(batch) {
        let top = acc.as_ref().map_or(0, ComplexMatrix::rows);
        let mut stacked = ComplexMatrix::zeros(top + chunk.len() * n2, r2);
        if let Some(a) = &acc {
            stacked.data_mut()[..top * r2].copy_from_slice(a.data());
        }
        for (slot, t) in chunk.iter().enumerate() {
            let m_t = commutator_superop(&q, t);
            let at = (top + slot * n2) * r2;
            stacked.data_mut()[at..at + n2 * r2].copy_from_slice(m_t.data());
        }
        acc = Some(qr_r(&stacked));
    }
    // constraints and candidates are orthonormal, so singular values are O(1)
    let coeffs = match &acc {
        None => ComplexMatrix::identity(r2),
        Some(a) => null_space_matrix(a, tol.rank_eps, tol.rank_eps)
            .unwrap_or_else(|| ComplexMatrix::zeros(r2, 0)),
    };

    let qa = q.adjoint();
    let basis: Vec<ComplexMatrix> = (0..coeffs.cols())
        .map(|c| {
            let y = ComplexMatrix::from_fn(r, r, |i, j| coeffs[(i * r + j, c)]);
            &(&q * &y) * &qa
        })
        .collect();
    let space = OperatorSpace::from_orthonormal(n, basis);
    let unit = algebra_unit(&space, within, tol)?;
    Ok(StarAlgebra::from_parts(space, unit))
}

/// Matrix of `Y -> vec([Q Y Q^dag, t])` in the basis of elementary `Y = |i><j|`.
fn commutator_superop(q: &ComplexMatrix, t: &ComplexMatrix) -> ComplexMatrix {
    let n = q.rows();
    let r = q.cols();
    let qa = q.adjoint();
    let left = &qa * t; // row j: q_j^dag t
    let right = t * q; // column i: t q_i
    let mut out = ComplexMatrix::zeros(n * n, r * r);
    for i in 0..r {
        for j in 0..r {
            let col = i * r + j;
            for a in 0..n {
                let qi = q[(a, i)];
                let ti = right[(a, i)];
                for b in 0..n {
                    let v = qi * left[(j, b)] - ti * qa[(j, b)];
                    if v != ZERO {
                        out[(a * n + b, col)] = v;
                    }
                }
            }
        }
    }
    out
}

/// `P` when it lies in the span, otherwise the support projector of `sum X X^dag`.
fn algebra_unit(
    space: &OperatorSpace,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let n = space.dim_h();
    if space.is_empty() {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    if space
        .contains(
            p,
            &Tolerance {
                abs_eps: 1e-8,
                ..*tol
            },
        )?
        .contained
    {
        return Ok(p.clone());
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for x in space.basis() {
        acc += &(x * &x.adjoint());
    }
    let (support, _) = support_split(
        &acc.hermitian_part(),
        &Tolerance {
            abs_eps: 1e-8,
            rank_eps: tol.rank_eps.max(1e-10),
        },
    )?;
    Ok(support)
}

/// Builds `L(C_1) + ... + L(C_k)` for orthogonal projectors `P_k`, with unit `sum P_k`.
pub fn block_algebra(projectors: &[ComplexMatrix], tol: &Tolerance) -> Result<StarAlgebra> {
    let Some(first) = projectors.first() else {
        return Err(Error::InvalidArgument(
            "block algebra needs at least one projector".into(),
        ));
    };
    let n = first.rows();
    let mut unit = ComplexMatrix::zeros(n, n);
    let mut basis = Vec::new();
    for p in projectors {
        check_projector(p, tol)?;
        unit += p;
        let (q, _) = split_projector(p);
        for i in 0..q.cols() {
            for j in 0..q.cols() {
                let qi = ComplexMatrix::column_vector(&q.column(i));
                let qj = ComplexMatrix::column_vector(&q.column(j));
                basis.push(&qi * &qj.adjoint());
            }
        }
    }
    check_projector(&unit, tol)?;
    Ok(StarAlgebra::from_parts(
        OperatorSpace::from_orthonormal(n, basis),
        unit,
    ))
}
