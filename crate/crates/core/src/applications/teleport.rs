use alloc::vec::Vec;

use super::classical::{confusability_classes, CONFUSABILITY_EPS};
use crate::channels::{check_unitary, classical_channel, compose, Channel, StochasticMatrix};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Tolerance};
use crate::opspace::{commutant, StarAlgebra};

fn check_unitaries(unitaries: &[ComplexMatrix]) -> Result<usize> {
    let Some(first) = unitaries.first() else {
        return Err(Error::InvalidArgument(
            "at least one unitary is required".into(),
        ));
    };
    let d = first.rows();
    for u in unitaries {
        if u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "teleportation unitary side",
                expected: d,
                found: u.rows().max(u.cols()),
            });
        }
        check_unitary(u)?;
    }
    Ok(d)
}

fn check_flags(p: &StochasticMatrix, n: usize) -> Result<()> {
    if p.rows() != n || p.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "flag transition matrix side",
            expected: n,
            found: if p.cols() != n { p.cols() } else { p.rows() },
        });
    }
    Ok(())
}

/// `C^d -> C^N (x) C^d` with Kraus elements `|i> (x) U_i / sqrt(N)`.
pub fn teleport_channel(unitaries: &[ComplexMatrix]) -> Result<Channel> {
    check_unitaries(unitaries)?;
    let n = unitaries.len();
    let w = 1.0 / libm::sqrt(n as f64);
    let kraus = unitaries
        .iter()
        .enumerate()
        .map(|(i, u)| ComplexMatrix::ket(n, i).kron(u).scale_re(w))
        .collect();
    Channel::new(kraus)
}

/// Teleportation followed by the classical channel `p` on the flag register.
pub fn noisy_teleport_channel(
    unitaries: &[ComplexMatrix],
    p: &StochasticMatrix,
) -> Result<Channel> {
    let d = check_unitaries(unitaries)?;
    check_flags(p, unitaries.len())?;
    let noise = classical_channel(p).tensor(&Channel::identity(d));
    compose(&noise, &teleport_channel(unitaries)?)
}

/// Commutant on `C^d` of `{U_h^dag U_h' : h, h' confusable under p}`.
pub fn correctable_after_noisy_teleport(
    unitaries: &[ComplexMatrix],
    p: &StochasticMatrix,
    tol: &Tolerance,
) -> Result<StarAlgebra> {
    let d = check_unitaries(unitaries)?;
    check_flags(p, unitaries.len())?;
    let mut generators = Vec::new();
    for class in confusability_classes(p, CONFUSABILITY_EPS).classes() {
        for (k, &h) in class.iter().enumerate() {
            let uh = unitaries[h].adjoint();
            for &h2 in &class[k + 1..] {
                generators.push(&uh * &unitaries[h2]);
            }
        }
    }
    commutant(&generators, &ComplexMatrix::identity(d), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correction::{
        is_correctable, max_correctable_algebra, petz_recovery, verify_correction,
    };
    use crate::numerics::gates::*;

    fn tol() -> Tolerance {
        Tolerance::for_decisions()
    }

    fn flags_0_3() -> StochasticMatrix {
        let mut e = alloc::vec![0.0; 16];
        for (i, j, v) in [
            (0, 0, 0.5),
            (3, 0, 0.5),
            (0, 3, 0.5),
            (3, 3, 0.5),
            (1, 1, 1.0),
            (2, 2, 1.0),
        ] {
            e[i * 4 + j] = v;
        }
        StochasticMatrix::new(4, 4, e).unwrap()
    }

    #[test]
    fn pauli_teleportation_products() {
        let ch = teleport_channel(&paulis()).unwrap();
        assert_eq!((ch.dim_in(), ch.dim_out()), (2, 8));
        for (i, a) in ch.kraus().iter().enumerate() {
            for (j, b) in ch.kraus().iter().enumerate() {
                let expected = if i == j {
                    ComplexMatrix::identity(2).scale_re(0.25)
                } else {
                    ComplexMatrix::zeros(2, 2)
                };
                assert!((&(&a.adjoint() * b) - &expected).max_abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn trivial_teleportations() {
        let single = teleport_channel(&[ComplexMatrix::identity(2)]).unwrap();
        assert!(single.same_map(&Channel::identity(2), 1e-15));
        let two = teleport_channel(&[ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let alg = StarAlgebra::full(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(
            is_correctable(&two, &alg, &ComplexMatrix::identity(2), &tol())
                .unwrap()
                .passed
        );
        assert!(matches!(
            teleport_channel(&[ComplexMatrix::identity(2).scale_re(2.0)]),
            Err(Error::NotUnitary { .. })
        ));
        assert!(teleport_channel(&[]).is_err());
    }

    #[test]
    fn noiseless_flags_reproduce_teleportation() {
        let noisy = noisy_teleport_channel(&paulis(), &StochasticMatrix::identity(4)).unwrap();
        assert!(noisy.same_map(&teleport_channel(&paulis()).unwrap(), 1e-14));
        let alg =
            correctable_after_noisy_teleport(&paulis(), &StochasticMatrix::identity(4), &tol())
                .unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn confusing_identity_and_z_leaves_diagonals() {
        let p = flags_0_3();
        let alg = correctable_after_noisy_teleport(&paulis(), &p, &tol()).unwrap();
        assert_eq!(alg.dim(), 2);
        let diag = ComplexMatrix::diagonal_real(&[1.0, 0.0]);
        assert!(alg.space().contains(&diag, &tol()).unwrap().contained);
        let composed = noisy_teleport_channel(&paulis(), &p).unwrap();
        let direct =
            max_correctable_algebra(&composed, &ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(direct.space().same_span(alg.space(), 1e-8).0);
        let r = petz_recovery(&composed, &ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(
            verify_correction(&r, &composed, &alg, &ComplexMatrix::identity(2), &tol())
                .unwrap()
                .passed
        );
    }

    #[test]
    fn fully_confused_flags_leave_scalars() {
        let p = StochasticMatrix::uniform(4);
        let alg = correctable_after_noisy_teleport(&paulis(), &p, &tol()).unwrap();
        assert_eq!(alg.dim(), 1);
        let composed = noisy_teleport_channel(&paulis(), &p).unwrap();
        let direct =
            max_correctable_algebra(&composed, &ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(direct.space().same_span(alg.space(), 1e-8).0);
    }

    #[test]
    fn flag_matrix_must_match() {
        assert!(noisy_teleport_channel(&paulis(), &StochasticMatrix::identity(3)).is_err());
    }
}
