use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::channels::{classical_channel, Channel, StochasticMatrix};
use crate::error::Error;
use crate::numerics::gates::*;
use crate::numerics::{random, ComplexMatrix, Tolerance};
use crate::opspace::{block_algebra, generate_algebra, StarAlgebra};

fn tol() -> Tolerance {
    Tolerance::for_decisions()
}

fn id(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n)
}

fn z1() -> ComplexMatrix {
    pauli_z().kron(&id(2))
}

fn phase_flip(p: f64) -> Channel {
    Channel::mixed_unitary(&[(1.0 - p, id(4)), (p, z1())]).unwrap()
}

fn halves() -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::diagonal_real(&[1.0, 1.0, 0.0, 0.0]),
        ComplexMatrix::diagonal_real(&[0.0, 0.0, 1.0, 1.0]),
    )
}

fn hybrid() -> StarAlgebra {
    let (p1, p2) = halves();
    block_algebra(&[p1, p2], &tol()).unwrap()
}

fn teleport() -> Channel {
    let kraus = paulis()
        .into_iter()
        .enumerate()
        .map(|(i, u)| ComplexMatrix::ket(4, i).kron(&u).scale_re(0.5))
        .collect();
    Channel::new(kraus).unwrap()
}

#[test]
fn identity_conserves_everything() {
    let alg = StarAlgebra::full(&id(3), &tol()).unwrap();
    let report = is_conserved(&Channel::identity(3), &alg, &id(3), &tol()).unwrap();
    assert!(report.passed && report.worst_residual == 0.0);
    assert!(report.consistent());
}

#[test]
fn phase_flip_conservation() {
    let ch = phase_flip(0.25);
    let diag = generate_algebra(&[z1()], &id(4), &tol()).unwrap();
    let report = is_conserved(&ch, &diag, &id(4), &tol()).unwrap();
    assert!(report.passed && report.consistent());

    let full = StarAlgebra::full(&id(4), &tol()).unwrap();
    let report = is_conserved(&ch, &full, &id(4), &tol()).unwrap();
    assert!(!report.passed && report.consistent());
    let w = report.witness.unwrap();
    assert!(z1().commutator(&w.element).op_norm() > 0.1);
    assert!((w.residual_operator.op_norm() - report.worst_residual).abs() < 1e-15);
}

#[test]
fn phase_flip_correctability() {
    let ch = phase_flip(0.25);
    let report = is_correctable(&ch, &hybrid(), &id(4), &tol()).unwrap();
    assert!(report.passed && report.worst_residual < 1e-12 && report.witness.is_none());
    let full = StarAlgebra::full(&id(4), &tol()).unwrap();
    let report = is_correctable(&ch, &full, &id(4), &tol()).unwrap();
    assert!(!report.passed);
    assert!(matches!(
        report.witness.unwrap().index,
        WitnessIndex::KrausPair { .. }
    ));
}

#[test]
fn teleportation_is_correctable() {
    let alg = StarAlgebra::full(&id(2), &tol()).unwrap();
    let report = is_correctable(&teleport(), &alg, &id(2), &tol()).unwrap();
    assert!(report.passed && report.worst_residual < 1e-14);
    assert_eq!(
        max_correctable_algebra(&teleport(), &id(2), &tol())
            .unwrap()
            .dim(),
        4
    );
}

#[test]
fn maximal_conserved_algebras() {
    let z = Channel::unitary(&z1()).unwrap();
    let alg = max_conserved_algebra(&z, &id(4), &tol()).unwrap();
    assert_eq!(alg.dim(), 8);
    assert!(alg.space().same_span(hybrid().space(), 1e-10).0);
    assert_eq!(
        max_conserved_algebra(&Channel::identity(3), &id(3), &tol())
            .unwrap()
            .dim(),
        9
    );
    let depolarize = classical_channel(&StochasticMatrix::uniform(3));
    let scalars = max_conserved_algebra(&depolarize, &id(3), &tol()).unwrap();
    assert_eq!(scalars.dim(), 1);
    assert!(scalars.space().contains(&id(3), &tol()).unwrap().contained);
}

#[test]
fn maximal_correctable_algebras() {
    assert_eq!(
        max_correctable_algebra(&Channel::identity(3), &id(3), &tol())
            .unwrap()
            .dim(),
        9
    );
    let alg = max_correctable_algebra(&phase_flip(0.1), &id(4), &tol()).unwrap();
    assert_eq!(alg.dim(), 8);
    assert!(alg.space().same_span(hybrid().space(), 1e-10).0);
    assert!(
        is_correctable(&phase_flip(0.1), &alg, &id(4), &tol())
            .unwrap()
            .passed
    );
}

#[test]
fn classical_maximal_algebra_is_constant_on_classes() {
    // 0 and 1 are confusable, 2 is not
    let p = StochasticMatrix::new(
        3,
        3,
        alloc::vec![0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    let alg = max_correctable_algebra(&classical_channel(&p), &id(3), &tol()).unwrap();
    let contains = |d: &[f64]| {
        alg.space()
            .contains(&ComplexMatrix::diagonal_real(d), &tol())
            .unwrap()
            .contained
    };
    assert!(contains(&[1.0, 1.0, 0.0]));
    assert!(contains(&[0.0, 0.0, 1.0]));
    assert!(!contains(&[1.0, 0.0, 0.0]));
}

#[test]
fn noiseless_subsystems() {
    let v = id(4);
    assert!(
        is_noiseless_subsystem(&Channel::identity(4), &v, (2, 2), &tol())
            .unwrap()
            .passed
    );

    let zz = pauli_z().kron(&pauli_z());
    let dephase = Channel::mixed_unitary(&[(0.7, id(4)), (0.3, zz)]).unwrap();
    let span = ComplexMatrix::from_fn(4, 2, |r, c| {
        if (r, c) == (1, 0) || (r, c) == (2, 1) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let report = is_noiseless_subsystem(&dephase, &span, (2, 1), &tol()).unwrap();
    assert!(report.passed && report.consistent());

    let report = is_noiseless_subsystem(&phase_flip(0.25), &v, (2, 2), &tol()).unwrap();
    assert!(!report.passed && report.consistent());
    // E^dag(X_1) = (1 - 2p) X_1, so the worst deviation is 2p
    assert!((report.worst_residual - 0.5).abs() < 1e-12);

    let not_isometry = id(4).scale_re(2.0);
    assert!(matches!(
        is_noiseless_subsystem(&dephase, &not_isometry, (2, 2), &tol()),
        Err(Error::NotIsometry { .. })
    ));
}

#[test]
fn support_mismatch_is_an_error() {
    let (p1, p2) = halves();
    let alg = block_algebra(&[p1], &tol()).unwrap();
    assert!(matches!(
        is_correctable(&phase_flip(0.1), &alg, &p2, &tol()),
        Err(Error::SupportMismatch { .. })
    ));
}

#[test]
fn explicit_recovery_corrects_phase_flip() {
    let (p1, p2) = halves();
    let r = Channel::new(alloc::vec![p1, &z1() * &p2]).unwrap();
    for p in [0.1, 0.25, 0.5, 0.9] {
        let report = verify_correction(&r, &phase_flip(p), &hybrid(), &id(4), &tol()).unwrap();
        assert!(report.passed && report.worst_residual <= 1e-12);
    }
}

#[test]
fn doing_nothing_does_not_correct_phase_flip() {
    let full = StarAlgebra::full(&id(4), &tol()).unwrap();
    let report = verify_correction(
        &Channel::identity(4),
        &phase_flip(0.25),
        &full,
        &id(4),
        &tol(),
    )
    .unwrap();
    assert!(!report.passed);
    let alg = StarAlgebra::full(&id(3), &tol()).unwrap();
    let trivial = verify_correction(
        &Channel::identity(3),
        &Channel::identity(3),
        &alg,
        &id(3),
        &tol(),
    )
    .unwrap();
    assert!(trivial.passed && trivial.worst_residual == 0.0);
}

#[test]
fn petz_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random::unitary(3, &mut rng);
    let ch = Channel::unitary(&u).unwrap();
    let r = petz_recovery(&ch, &id(3), &tol()).unwrap();
    assert_eq!(r.kraus().len(), 1);
    assert!((&r.kraus()[0] - &u.adjoint()).max_abs() < 1e-12);
    let round_trip = crate::channels::compose(&r, &ch).unwrap();
    assert!(round_trip.same_map(&Channel::identity(3), 1e-10));

    let p = 0.3;
    let r = petz_recovery(&phase_flip(p), &id(4), &tol()).unwrap();
    assert!((&r.kraus()[0] - &id(4).scale_re((1.0 - p).sqrt())).max_abs() < 1e-12);
    assert!((&r.kraus()[1] - &z1().scale_re(p.sqrt())).max_abs() < 1e-12);
    assert!(
        verify_correction(&r, &phase_flip(p), &hybrid(), &id(4), &tol())
            .unwrap()
            .passed
    );

    let alg = StarAlgebra::full(&id(2), &tol()).unwrap();
    let r = petz_recovery(&teleport(), &id(2), &tol()).unwrap();
    let report = verify_correction(&r, &teleport(), &alg, &id(2), &tol()).unwrap();
    assert!(report.worst_residual <= 1e-10);
}

#[test]
fn petz_completes_to_a_channel_on_a_subspace_code() {
    let (p1, _) = halves();
    let r = petz_recovery(&phase_flip(0.2), &p1, &tol()).unwrap();
    assert!(r.tp_defect() < 1e-10);
    let alg = StarAlgebra::full(&p1, &tol()).unwrap();
    // Z_1 acts as +1 on C_1, so every operator there is corrected
    assert!(
        verify_correction(&r, &phase_flip(0.2), &alg, &p1, &tol())
            .unwrap()
            .passed
    );
}

#[test]
fn petz_rejects_annihilated_code() {
    let dead = Channel::subnormalized(alloc::vec![ComplexMatrix::zeros(2, 2)]).unwrap();
    assert_eq!(
        petz_recovery(&dead, &id(2), &tol()).unwrap_err(),
        Error::AnnihilatedCode
    );
}

#[test]
fn robustness_under_mixing() {
    let (p1, p2) = halves();
    let r = Channel::new(alloc::vec![p1, &z1() * &p2]).unwrap();
    let ch = phase_flip(0.25);
    let base = verify_correction(&r, &ch, &hybrid(), &id(4), &tol()).unwrap();
    let same = robustness_check(&ch, &r, &hybrid(), &id(4), &id(2), &tol()).unwrap();
    assert_eq!(base, same);
    assert!(
        robustness_check(&ch, &r, &hybrid(), &id(4), &hadamard(), &tol())
            .unwrap()
            .passed
    );
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mixing = random::unitary(2, &mut rng);
    assert!(
        robustness_check(&ch, &r, &hybrid(), &id(4), &mixing, &tol())
            .unwrap()
            .passed
    );
    assert!(matches!(
        robustness_check(&ch, &r, &hybrid(), &id(4), &id(2).scale_re(3.0), &tol()),
        Err(Error::NotIsometry { .. })
    ));
}

#[test]
fn witness_is_first_maximal_index() {
    // both basis elements give the same residual; the first one wins
    let ch = Channel::unitary(&pauli_z()).unwrap();
    let xs: Vec<ComplexMatrix> = alloc::vec![pauli_x(), pauli_x()];
    let alg = generate_algebra(&xs, &id(2), &tol()).unwrap();
    let report = is_conserved(&ch, &alg, &id(2), &tol()).unwrap();
    let w = report.witness.unwrap();
    assert!(matches!(w.index, WitnessIndex::Kraus { kraus: 0, .. }));
}
