use alloc::vec::Vec;

use crate::channels::{from_unitary_interaction, Keep};
use crate::correction::{is_correctable, max_correctable_algebra, CorrectionReport};
use crate::error::Result;
use crate::numerics::{ComplexMatrix, Tolerance};
use crate::opspace::{
    commutant, commutative, intersect, orthonormalize, OperatorSpace, StarAlgebra,
};

/// Commutator threshold for the pointer commutativity scan.
const POINTER_EPS: f64 = 1e-8;

/// Where the information of `S` ends up after a system-apparatus interaction.
#[derive(Debug, Clone)]
pub struct FlowReport {
    /// Observables whose information stays in `S` (correctable for `E_SS`).
    pub a_ss: StarAlgebra,
    /// Observables whose information reaches `A`: the commutant of the range of `E_SS^dag`.
    pub a_sa: StarAlgebra,
    /// `a_ss` intersected with `a_sa`.
    pub pointer: OperatorSpace,
    pub pointer_commutative: bool,
    /// Correctability of `a_sa` under `E_SA`.
    pub a_sa_check: CorrectionReport,
}

/// Analyses `rho_S -> U (rho_S (x) rho_A) U^dag` through its two reduced channels.
pub fn information_flow(
    u: &ComplexMatrix,
    (dim_s, dim_a): (usize, usize),
    rho_a: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FlowReport> {
    let e_ss = from_unitary_interaction(u, (dim_s, dim_a), rho_a, Keep::System)?;
    let e_sa = from_unitary_interaction(u, (dim_s, dim_a), rho_a, Keep::Apparatus)?;
    let id = ComplexMatrix::identity(dim_s);

    let mut range = Vec::with_capacity(dim_s * dim_s);
    for i in 0..dim_s {
        for j in 0..dim_s {
            range.push(e_ss.dual_apply(&ComplexMatrix::unit(dim_s, i, j))?);
        }
    }
    let range = orthonormalize(&range, dim_s, tol)?;
    let a_sa = commutant(range.basis(), &id, tol)?;
    let a_ss = max_correctable_algebra(&e_ss, &id, tol)?;
    let pointer = intersect(a_ss.space(), a_sa.space(), tol)?;
    let pointer_commutative = commutative(pointer.basis(), POINTER_EPS);
    let a_sa_check = is_correctable(&e_sa, &a_sa, &id, tol)?;
    Ok(FlowReport {
        a_ss,
        a_sa,
        pointer,
        pointer_commutative,
        a_sa_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gates::*;

    fn tol() -> Tolerance {
        Tolerance::for_decisions()
    }

    fn ground() -> ComplexMatrix {
        ComplexMatrix::unit(2, 0, 0)
    }

    fn diagonals() -> OperatorSpace {
        orthonormalize(
            &[ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)],
            2,
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn no_interaction_keeps_everything() {
        let report =
            information_flow(&ComplexMatrix::identity(4), (2, 2), &ground(), &tol()).unwrap();
        assert_eq!(report.a_ss.dim(), 4);
        assert_eq!(report.a_sa.dim(), 1);
        assert_eq!(report.pointer.dim(), 1);
        assert!(report.pointer_commutative && report.a_sa_check.passed);
    }

    #[test]
    fn swap_moves_everything() {
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let report = information_flow(&swap(), (2, 2), &plus, &tol()).unwrap();
        assert_eq!(report.a_ss.dim(), 1);
        assert_eq!(report.a_sa.dim(), 4);
        assert_eq!(report.pointer.dim(), 1);
        assert!(report.pointer_commutative && report.a_sa_check.passed);
    }

    #[test]
    fn cnot_selects_the_computational_basis() {
        let report = information_flow(&cnot(), (2, 2), &ground(), &tol()).unwrap();
        for space in [report.a_ss.space(), report.a_sa.space(), &report.pointer] {
            assert!(space.same_span(&diagonals(), 1e-10).0);
        }
        assert!(report.pointer_commutative && report.a_sa_check.passed);
    }
}
