use alloc::vec::Vec;

use super::conditions::check_code;
use super::report::{CorrectionReport, Scan, WitnessIndex};
use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::numerics::{pinv_sqrt, projector_range, support_split, ComplexMatrix, Tolerance};
use crate::opspace::StarAlgebra;

/// Transpose (Petz) recovery for the code `P H`.
///
/// Kraus elements are `R_a = P E_a^dag S` with `S = E(P)^{-1/2}` on the support
/// of `E(P)`, followed by one element `|v><k|` per kernel vector `k` of `E(P)`,
/// where `v` is the first range vector of `P`. The result is trace preserving
/// on the whole output space.
pub fn petz_recovery(ch: &Channel, p: &ComplexMatrix, tol: &Tolerance) -> Result<Channel> {
    check_code(p, ch.dim_in(), tol)?;
    let image = ch.apply(p)?.hermitian_part();
    if image.op_norm() <= tol.abs_eps {
        return Err(Error::AnnihilatedCode);
    }
    let s = pinv_sqrt(&image, tol)?;
    let (_, kernel) = support_split(&image, tol)?;
    let mut kraus: Vec<ComplexMatrix> = ch
        .kraus()
        .iter()
        .map(|e| &(p * &e.adjoint()) * &s)
        .collect();
    if !kernel.is_empty() {
        let range = projector_range(p);
        let v = ComplexMatrix::column_vector(&range.column(0));
        for k in &kernel {
            kraus.push(&v * &k.adjoint());
        }
    }
    Channel::new(kraus)
}

/// Checks `P (R o E)^dag(X) P = P X P` on the algebra basis.
pub fn verify_correction(
    r: &Channel,
    e: &Channel,
    alg: &StarAlgebra,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<CorrectionReport> {
    let n = e.dim_in();
    if e.dim_out() != r.dim_in() {
        return Err(Error::DimensionMismatch {
            context: "recovery input",
            expected: e.dim_out(),
            found: r.dim_in(),
        });
    }
    if r.dim_out() != n {
        return Err(Error::DimensionMismatch {
            context: "recovery output",
            expected: n,
            found: r.dim_out(),
        });
    }
    if alg.dim_h() != n {
        return Err(Error::DimensionMismatch {
            context: "algebra Hilbert space",
            expected: n,
            found: alg.dim_h(),
        });
    }
    check_code(p, n, tol)?;
    let mut scan = Scan::new();
    for (i, x) in alg.basis().iter().enumerate() {
        let back = e.dual_apply(&r.dual_apply(x)?)?;
        let lhs = &(p * &back) * p;
        let rhs = &(p * x) * p;
        scan.offer(WitnessIndex::Basis { basis: i }, &lhs - &rhs);
    }
    Ok(scan.finish(tol.abs_eps, alg.basis()))
}

/// Re-runs [`verify_correction`] with the same recovery on the channel with
/// elements `E'_b = sum_a mixing[b, a] E_a`.
pub fn robustness_check(
    ch: &Channel,
    r: &Channel,
    alg: &StarAlgebra,
    p: &ComplexMatrix,
    mixing: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<CorrectionReport> {
    let mixed = ch.mix_kraus(mixing)?;
    verify_correction(r, &mixed, alg, p, tol)
}
