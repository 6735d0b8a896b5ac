//! Loads every input of a job, then dispatches to the engines.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use oaqec_core::applications::{
    classical_correctable, confusability_classes, correctable_after_noisy_teleport,
    information_flow, CONFUSABILITY_EPS,
};
use oaqec_core::channels::{Channel, StochasticMatrix};
use oaqec_core::correction::{
    is_conserved, is_correctable, max_correctable_algebra, petz_recovery, verify_correction,
};
use oaqec_core::opspace::{generate_algebra, structure_decomposition, StarAlgebra};
use oaqec_core::ComplexMatrix;

use crate::format::{parse_channel_file, parse_matrix_file, to_json, ChannelJson, MatrixJson};
use crate::manifest::{Command, Job};
use crate::report::*;

/// Observable values within this distance count as equal.
const OBSERVABLE_EPS: f64 = 1e-12;

enum Loaded {
    Decompose {
        generators: Vec<ComplexMatrix>,
        projector: Option<ComplexMatrix>,
    },
    Condition {
        channel: Channel,
        generators: Vec<ComplexMatrix>,
        projector: Option<ComplexMatrix>,
    },
    MaxCorrectable {
        channel: Channel,
        projector: Option<ComplexMatrix>,
    },
    Recover {
        channel: Channel,
        projector: Option<ComplexMatrix>,
        generators: Vec<ComplexMatrix>,
    },
    Verify {
        recovery: Channel,
        channel: Channel,
        generators: Vec<ComplexMatrix>,
        projector: Option<ComplexMatrix>,
    },
    Classical {
        stochastic: StochasticMatrix,
        observables: Vec<(String, Vec<f64>)>,
    },
    Teleport {
        unitaries: Vec<ComplexMatrix>,
        stochastic: Option<StochasticMatrix>,
    },
    Flow {
        unitary: ComplexMatrix,
        apparatus: ComplexMatrix,
    },
}

fn matrix(job: &Job, name: &str) -> Result<Option<ComplexMatrix>> {
    job.path(name)
        .map(|(_, p)| parse_matrix_file(p))
        .transpose()
}

fn matrices(job: &Job, name: &str) -> Result<Vec<ComplexMatrix>> {
    job.paths(name)
        .iter()
        .map(|(_, p)| parse_matrix_file(p))
        .collect()
}

fn channel(job: &Job, name: &str) -> Result<Channel> {
    let (_, p) = job
        .path(name)
        .expect("required inputs are checked when the job is built");
    parse_channel_file(p)
}

fn stochastic(job: &Job) -> Result<Option<StochasticMatrix>> {
    match job.path("stochastic") {
        None => Ok(None),
        Some((_, p)) => {
            let m = parse_matrix_file(p)?;
            let s = StochasticMatrix::from_matrix(&m)
                .with_context(|| format!("{}: not column stochastic", p.display()))?;
            Ok(Some(s))
        }
    }
}

/// An observable is a real vector (either orientation) or a real diagonal matrix.
fn observable(m: &ComplexMatrix, path: &std::path::Path) -> Result<Vec<f64>> {
    let values: Vec<_> = if m.rows() == 1 || m.cols() == 1 {
        m.data().to_vec()
    } else if m.is_square() {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j && m[(i, j)].norm() > OBSERVABLE_EPS {
                    bail!(
                        "{}: observable matrix is not diagonal at ({i}, {j})",
                        path.display()
                    );
                }
            }
        }
        (0..m.rows()).map(|i| m[(i, i)]).collect()
    } else {
        bail!(
            "{}: observable must be a vector or a diagonal matrix",
            path.display()
        );
    };
    if let Some(k) = values.iter().position(|z| z.im.abs() > OBSERVABLE_EPS) {
        bail!("{}: observable entry {k} is not real", path.display());
    }
    Ok(values.iter().map(|z| z.re).collect())
}

fn load(job: &Job) -> Result<Loaded> {
    Ok(match job.command {
        Command::Decompose => Loaded::Decompose {
            generators: matrices(job, "generators")?,
            projector: matrix(job, "projector")?,
        },
        Command::Conserve | Command::Correct => Loaded::Condition {
            channel: channel(job, "channel")?,
            generators: matrices(job, "generators")?,
            projector: matrix(job, "projector")?,
        },
        Command::MaxCorrectable => Loaded::MaxCorrectable {
            channel: channel(job, "channel")?,
            projector: matrix(job, "projector")?,
        },
        Command::Recover => Loaded::Recover {
            channel: channel(job, "channel")?,
            projector: matrix(job, "projector")?,
            generators: matrices(job, "generators")?,
        },
        Command::Verify => Loaded::Verify {
            recovery: channel(job, "recovery")?,
            channel: channel(job, "channel")?,
            generators: matrices(job, "generators")?,
            projector: matrix(job, "projector")?,
        },
        Command::Classical => {
            let mut observables = Vec::new();
            for (name, p) in job.paths("observables") {
                observables.push((name.clone(), observable(&parse_matrix_file(p)?, p)?));
            }
            Loaded::Classical {
                stochastic: stochastic(job)?.expect("required input"),
                observables,
            }
        }
        Command::Teleport => Loaded::Teleport {
            unitaries: matrices(job, "unitaries")?,
            stochastic: stochastic(job)?,
        },
        Command::Flow => Loaded::Flow {
            unitary: matrix(job, "unitary")?.expect("required input"),
            apparatus: matrix(job, "apparatus")?.expect("required input"),
        },
    })
}

fn code(p: Option<ComplexMatrix>, n: usize) -> Result<ComplexMatrix> {
    match p {
        Some(p) if p.rows() != n || p.cols() != n => {
            bail!("projector is {}x{}, expected {n}x{n}", p.rows(), p.cols())
        }
        Some(p) => Ok(p),
        None => Ok(ComplexMatrix::identity(n)),
    }
}

fn closure(job: &Job, generators: &[ComplexMatrix], p: &ComplexMatrix) -> Result<StarAlgebra> {
    generate_algebra(generators, p, &job.tol).context("closing the algebra generators")
}

fn basis_json(basis: &[ComplexMatrix]) -> Vec<MatrixJson> {
    basis.iter().map(MatrixJson::from).collect()
}

fn write_recovery(path: &PathBuf, ch: &Channel) -> Result<()> {
    fs::write(path, to_json(&ChannelJson::from(ch)))
        .with_context(|| format!("cannot write recovery channel to {}", path.display()))
}

fn compute(job: &Job, loaded: Loaded) -> Result<(bool, Body)> {
    let tol = &job.tol;
    Ok(match loaded {
        Loaded::Decompose {
            generators,
            projector,
        } => {
            let n = generators.first().map_or(0, ComplexMatrix::rows);
            let p = code(projector, n)?;
            let alg = closure(job, &generators, &p)?;
            let s = structure_decomposition(&alg, job.seed, tol)?;
            (true, Body::Structure(StructureResult::from_structure(&s)))
        }
        Loaded::Condition {
            channel,
            generators,
            projector,
        } => {
            let p = code(projector, channel.dim_in())?;
            let alg = closure(job, &generators, &p)?;
            let (name, r) = if job.command == Command::Conserve {
                ("conservation", is_conserved(&channel, &alg, &p, tol)?)
            } else {
                ("correctability", is_correctable(&channel, &alg, &p, tol)?)
            };
            (
                r.passed,
                Body::Condition(ConditionResult::new(name, alg.dim(), &r)),
            )
        }
        Loaded::MaxCorrectable { channel, projector } => {
            let p = code(projector, channel.dim_in())?;
            let alg = max_correctable_algebra(&channel, &p, tol)?;
            let s = structure_decomposition(&alg, job.seed, tol)?;
            let body = MaxCorrectableResult {
                structure: StructureResult::from_structure(&s),
                basis: basis_json(alg.basis()),
            };
            (true, Body::MaxCorrectable(body))
        }
        Loaded::Recover {
            channel,
            projector,
            generators,
        } => {
            let p = code(projector, channel.dim_in())?;
            let alg = if generators.is_empty() {
                max_correctable_algebra(&channel, &p, tol)?
            } else {
                closure(job, &generators, &p)?
            };
            let r = petz_recovery(&channel, &p, tol)?;
            let check = verify_correction(&r, &channel, &alg, &p, tol)?;
            let written_to = match &job.recovery_out {
                Some((shown, path)) => {
                    write_recovery(path, &r)?;
                    Some(shown.clone())
                }
                None => None,
            };
            let body = RecoverResult {
                kraus_count: r.kraus().len(),
                tp_defect: r.tp_defect(),
                recovery: written_to.is_none().then(|| ChannelJson::from(&r)),
                written_to,
                verification: ConditionResult::new("correction", alg.dim(), &check),
            };
            (check.passed, Body::Recover(body))
        }
        Loaded::Verify {
            recovery,
            channel,
            generators,
            projector,
        } => {
            let p = code(projector, channel.dim_in())?;
            let alg = closure(job, &generators, &p)?;
            let r = verify_correction(&recovery, &channel, &alg, &p, tol)?;
            (
                r.passed,
                Body::Condition(ConditionResult::new("correction", alg.dim(), &r)),
            )
        }
        Loaded::Classical {
            stochastic,
            observables,
        } => {
            let classes = confusability_classes(&stochastic, CONFUSABILITY_EPS);
            let mut verdicts = Vec::with_capacity(observables.len());
            for (file, alpha) in observables {
                let correctable = classical_correctable(&stochastic, &alpha, OBSERVABLE_EPS)
                    .with_context(|| format!("observable {file}"))?;
                verdicts.push(ObservableVerdict { file, correctable });
            }
            let passed = verdicts.iter().all(|v| v.correctable);
            let body = ClassicalResult {
                classes: classes.classes().to_vec(),
                observables: verdicts,
            };
            (passed, Body::Classical(body))
        }
        Loaded::Teleport {
            unitaries,
            stochastic,
        } => {
            let noisy = stochastic.is_some();
            let p = stochastic.unwrap_or_else(|| StochasticMatrix::identity(unitaries.len()));
            let alg = correctable_after_noisy_teleport(&unitaries, &p, tol)?;
            let s = structure_decomposition(&alg, job.seed, tol)?;
            let body = TeleportResult {
                noisy,
                flag_classes: confusability_classes(&p, CONFUSABILITY_EPS)
                    .classes()
                    .to_vec(),
                structure: StructureResult::from_structure(&s),
                basis: basis_json(alg.basis()),
            };
            (true, Body::Teleport(body))
        }
        Loaded::Flow { unitary, apparatus } => {
            let da = apparatus.rows();
            if da == 0 || unitary.rows() % da != 0 {
                bail!(
                    "unitary dimension {} is not a multiple of the apparatus dimension {da}",
                    unitary.rows()
                );
            }
            let ds = unitary.rows() / da;
            let f = information_flow(&unitary, (ds, da), &apparatus, tol)?;
            let body = FlowResult {
                a_ss: SpaceJson::new(f.a_ss.basis()),
                a_sa: SpaceJson::new(f.a_sa.basis()),
                pointer: SpaceJson::new(f.pointer.basis()),
                pointer_commutative: f.pointer_commutative,
                a_sa_check: ConditionResult::new("correctability", f.a_sa.dim(), &f.a_sa_check),
            };
            (f.a_sa_check.passed, Body::Flow(body))
        }
    })
}

/// Runs a job. Input and engine errors are returned as `Err`; a failed
/// condition is a report with status `"fail"`.
pub fn execute(job: &Job) -> Result<Report> {
    let loaded = load(job)?;
    let (passed, result) = compute(job, loaded)?;
    Ok(Report {
        command: job.command.name(),
        status: if passed { "pass" } else { "fail" },
        tolerance: job.tol.abs_eps,
        rank_tolerance: job.tol.rank_eps,
        seed: job.seed,
        result,
    })
}
