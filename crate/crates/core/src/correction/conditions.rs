use alloc::vec::Vec;

use super::report::{CorrectionReport, CrossCheck, Scan, WitnessIndex};
use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::numerics::{check_projector, ComplexMatrix, Tolerance};
use crate::opspace::{commutant, OperatorSpace, StarAlgebra};

/// Relative tolerance for `P X P = X` on algebra basis elements.
const SUPPORT_EPS: f64 = 1e-8;

pub(crate) fn check_code(p: &ComplexMatrix, n: usize, tol: &Tolerance) -> Result<()> {
    if p.rows() != n || p.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "code projector",
            expected: n,
            found: p.rows(),
        });
    }
    check_projector(p, tol)
}

fn check_algebra(alg: &StarAlgebra, p: &ComplexMatrix, n: usize) -> Result<()> {
    if alg.dim_h() != n {
        return Err(Error::DimensionMismatch {
            context: "algebra Hilbert space",
            expected: n,
            found: alg.dim_h(),
        });
    }
    let residual = alg
        .basis()
        .iter()
        .map(|x| (&(&(p * x) * p) - x).hs_norm())
        .fold(0.0, f64::max);
    if residual > SUPPORT_EPS {
        return Err(Error::SupportMismatch { residual });
    }
    Ok(())
}

fn check_endo(ch: &Channel) -> Result<()> {
    if ch.dim_in() != ch.dim_out() {
        return Err(Error::DimensionMismatch {
            context: "channel must act on a single space",
            expected: ch.dim_in(),
            found: ch.dim_out(),
        });
    }
    Ok(())
}

/// `max ||P E^dag(X) P - P X P||` over the algebra basis.
pub(crate) fn direct_conservation(
    ch: &Channel,
    basis: &[ComplexMatrix],
    p: &ComplexMatrix,
) -> Result<Scan> {
    let mut scan = Scan::new();
    for (i, x) in basis.iter().enumerate() {
        let lhs = &(p * &ch.dual_apply(x)?) * p;
        let rhs = &(p * x) * p;
        scan.offer(WitnessIndex::Basis { basis: i }, &lhs - &rhs);
    }
    Ok(scan)
}

fn commutator_conservation(ch: &Channel, basis: &[ComplexMatrix], p: &ComplexMatrix) -> Scan {
    let mut scan = Scan::new();
    for (a, e) in ch.kraus().iter().enumerate() {
        let ep = e * p;
        for (i, x) in basis.iter().enumerate() {
            scan.offer(WitnessIndex::Kraus { kraus: a, basis: i }, ep.commutator(x));
        }
    }
    scan
}

/// Whether every element of `alg` is conserved on `P H`: `[E_a P, X] = 0`
/// for all Kraus elements and basis elements.
///
/// The direct condition `P E^dag(X) P = P X P` is evaluated as a cross-check
/// at ten times the tolerance; [`CorrectionReport::consistent`] reports agreement.
pub fn is_conserved(
    ch: &Channel,
    alg: &StarAlgebra,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<CorrectionReport> {
    check_endo(ch)?;
    let n = ch.dim_in();
    check_code(p, n, tol)?;
    check_algebra(alg, p, n)?;
    let mut report = commutator_conservation(ch, alg.basis(), p).finish(tol.abs_eps, alg.basis());
    let direct = direct_conservation(ch, alg.basis(), p)?;
    let tolerance = 10.0 * tol.abs_eps;
    report.cross_check = Some(CrossCheck {
        residual: direct.worst(),
        tolerance,
        passed: direct.worst() <= tolerance,
    });
    Ok(report)
}

fn code_products(ch: &Channel, p: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let ep: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * p).collect();
    let mut out = Vec::with_capacity(ep.len() * ep.len());
    for c in &ep {
        let ca = c.adjoint();
        for b in &ep {
            out.push(&ca * b);
        }
    }
    out
}

/// Whether `alg` is correctable on `P H`: `[P E_c^dag E_b P, X] = 0` for all
/// Kraus pairs and basis elements.
pub fn is_correctable(
    ch: &Channel,
    alg: &StarAlgebra,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<CorrectionReport> {
    let n = ch.dim_in();
    check_code(p, n, tol)?;
    check_algebra(alg, p, n)?;
    let k = ch.kraus().len();
    let products = code_products(ch, p);
    let mut scan = Scan::new();
    for c in 0..k {
        for b in 0..k {
            let m = &products[c * k + b];
            for (i, x) in alg.basis().iter().enumerate() {
                scan.offer(WitnessIndex::KrausPair { c, b, basis: i }, m.commutator(x));
            }
        }
    }
    Ok(scan.finish(tol.abs_eps, alg.basis()))
}

/// Largest *-closed algebra on `P H` conserved by `ch`: the commutant of
/// `{E_a P, P E_a^dag}` inside `P L(H) P`.
///
/// The unit is `P` when `P` itself is conserved, otherwise the identity of the
/// returned span.
pub fn max_conserved_algebra(
    ch: &Channel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<StarAlgebra> {
    check_endo(ch)?;
    check_code(p, ch.dim_in(), tol)?;
    let constraints: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * p).collect();
    commutant(&constraints, p, tol)
}

/// Largest correctable algebra on `P H` with unit `P`: the commutant of
/// `{P E_c^dag E_b P}` inside `P L(H) P`. Every correctable algebra with
/// support in `P H` is a subalgebra of it.
pub fn max_correctable_algebra(
    ch: &Channel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<StarAlgebra> {
    check_code(p, ch.dim_in(), tol)?;
    commutant(&code_products(ch, p), p, tol)
}

/// Whether the subsystem `A` of `V (C^dA (x) C^dB)` is noiseless:
/// `P E^dag(V (X (x) I) V^dag) P = V (X (x) I) V^dag` for all `X` in `L(C^dA)`.
///
/// The commutator test on the algebra `V (L(C^dA) (x) I) V^dag` is reported as
/// the cross-check.
pub fn is_noiseless_subsystem(
    ch: &Channel,
    v: &ComplexMatrix,
    (dim_a, dim_b): (usize, usize),
    tol: &Tolerance,
) -> Result<CorrectionReport> {
    check_endo(ch)?;
    let n = ch.dim_in();
    if v.rows() != n || v.cols() != dim_a * dim_b || dim_a == 0 || dim_b == 0 {
        return Err(Error::DimensionMismatch {
            context: "subsystem isometry shape",
            expected: n * dim_a * dim_b,
            found: v.rows() * v.cols(),
        });
    }
    let alg = subsystem_algebra(v, (dim_a, dim_b), tol)?;
    let (p, basis) = (alg.unit(), alg.basis());
    // residuals are taken for the unnormalized images V (|i><j| (x) I) V^dag
    let scale = libm::sqrt(dim_b as f64);
    let mut scan = Scan::new();
    for (i, y) in basis.iter().enumerate() {
        let lhs = &(p * &ch.dual_apply(y)?) * p;
        scan.offer(WitnessIndex::Basis { basis: i }, (&lhs - y).scale_re(scale));
    }
    let mut report = scan.finish(tol.abs_eps, basis);
    let commutators = commutator_conservation(ch, basis, p);
    report.cross_check = Some(CrossCheck {
        residual: commutators.worst(),
        tolerance: tol.abs_eps,
        passed: commutators.worst() <= tol.abs_eps,
    });
    Ok(report)
}

/// Algebra `V (L(C^dA) (x) I) V^dag` with unit `V V^dag`; `V` must be an isometry.
pub fn subsystem_algebra(
    v: &ComplexMatrix,
    (dim_a, dim_b): (usize, usize),
    tol: &Tolerance,
) -> Result<StarAlgebra> {
    if v.cols() != dim_a * dim_b || dim_a == 0 {
        return Err(Error::DimensionMismatch {
            context: "subsystem isometry columns",
            expected: dim_a * dim_b,
            found: v.cols(),
        });
    }
    let deviation = v.isometry_defect();
    if deviation > SUPPORT_EPS {
        return Err(Error::NotIsometry { deviation });
    }
    let va = v.adjoint();
    let norm = 1.0 / libm::sqrt(dim_b as f64);
    let basis = (0..dim_a * dim_a)
        .map(|k| {
            let x = ComplexMatrix::unit(dim_a, k / dim_a, k % dim_a)
                .kron(&ComplexMatrix::identity(dim_b));
            (&(v * &x) * &va).scale_re(norm)
        })
        .collect();
    StarAlgebra::new(
        OperatorSpace::from_orthonormal(v.rows(), basis),
        v * &va,
        tol,
    )
}
