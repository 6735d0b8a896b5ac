//! Report types, their JSON form and their text rendering.

use std::fmt::Write;

use oaqec_core::correction::{CorrectionReport, WitnessIndex};
use oaqec_core::opspace::BlockStructure;
use oaqec_core::ComplexMatrix;
use serde::Serialize;

use crate::format::{ChannelJson, MatrixJson};

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    /// `"pass"` or `"fail"`.
    pub status: &'static str,
    pub tolerance: f64,
    pub rank_tolerance: f64,
    pub seed: u64,
    pub result: Body,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Body {
    Structure(StructureResult),
    Condition(ConditionResult),
    MaxCorrectable(MaxCorrectableResult),
    Recover(RecoverResult),
    Classical(ClassicalResult),
    Teleport(TeleportResult),
    Flow(FlowResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockJson {
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureResult {
    pub algebra_dim: usize,
    pub blocks: Vec<BlockJson>,
    pub dim_c: usize,
    pub residual: f64,
}

impl StructureResult {
    pub fn from_structure(s: &BlockStructure) -> Self {
        Self {
            algebra_dim: s.algebra_dim(),
            blocks: s
                .blocks
                .iter()
                .map(|b| BlockJson {
                    dim: b.dim,
                    multiplicity: b.multiplicity,
                })
                .collect(),
            dim_c: s.dim_c,
            residual: s.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    /// `"kraus"`, `"kraus_pair"` or `"basis"`.
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    pub basis: usize,
    pub element: MatrixJson,
    pub residual_operator: MatrixJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckJson {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    /// `"conservation"`, `"correctability"` or `"correction"`.
    pub condition: &'static str,
    pub satisfied: bool,
    /// Dimension of the closed algebra actually tested.
    pub algebra_dim: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckJson>,
}

impl ConditionResult {
    pub fn new(condition: &'static str, algebra_dim: usize, r: &CorrectionReport) -> Self {
        let witness = r.witness.as_ref().map(|w| {
            let (kind, kraus, c, b, basis) = match w.index {
                WitnessIndex::Kraus { kraus, basis } => ("kraus", Some(kraus), None, None, basis),
                WitnessIndex::KrausPair { c, b, basis } => {
                    ("kraus_pair", None, Some(c), Some(b), basis)
                }
                WitnessIndex::Basis { basis } => ("basis", None, None, None, basis),
            };
            WitnessJson {
                kind,
                kraus,
                c,
                b,
                basis,
                element: MatrixJson::from(&w.element),
                residual_operator: MatrixJson::from(&w.residual_operator),
            }
        });
        Self {
            condition,
            satisfied: r.passed,
            algebra_dim,
            worst_residual: r.worst_residual,
            tolerance: r.tolerance,
            witness,
            cross_check: r.cross_check.map(|c| CrossCheckJson {
                residual: c.residual,
                tolerance: c.tolerance,
                passed: c.passed,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxCorrectableResult {
    pub structure: StructureResult,
    pub basis: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoverResult {
    pub kraus_count: usize,
    pub tp_defect: f64,
    /// Where the recovery channel was written; otherwise it is inlined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub written_to: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<ChannelJson>,
    pub verification: ConditionResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservableVerdict {
    pub file: String,
    pub correctable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalResult {
    pub classes: Vec<Vec<usize>>,
    pub observables: Vec<ObservableVerdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TeleportResult {
    pub noisy: bool,
    pub flag_classes: Vec<Vec<usize>>,
    pub structure: StructureResult,
    pub basis: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpaceJson {
    pub dim: usize,
    pub basis: Vec<MatrixJson>,
}

impl SpaceJson {
    pub fn new(basis: &[ComplexMatrix]) -> Self {
        Self {
            dim: basis.len(),
            basis: basis.iter().map(MatrixJson::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowResult {
    pub a_ss: SpaceJson,
    pub a_sa: SpaceJson,
    pub pointer: SpaceJson,
    pub pointer_commutative: bool,
    pub a_sa_check: ConditionResult,
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn entry(re: f64, im: f64) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    let (re, im) = (clean(re), clean(im));
    if im == 0.0 {
        format!("{re:.4}")
    } else {
        format!("{re:.4}{im:+.4}i")
    }
}

fn matrix_text(out: &mut String, indent: &str, m: &MatrixJson) {
    for i in 0..m.rows {
        let row: Vec<String> = (0..m.cols)
            .map(|j| {
                let [re, im] = m.data[i * m.cols + j];
                format!("{:>16}", entry(re, im))
            })
            .collect();
        let _ = writeln!(out, "{indent}{}", row.join(""));
    }
}

fn basis_text(out: &mut String, basis: &[MatrixJson]) {
    for (k, m) in basis.iter().enumerate() {
        let _ = writeln!(out, "  basis element {k}:");
        matrix_text(out, "    ", m);
    }
}

fn structure_text(out: &mut String, s: &StructureResult) {
    let blocks: Vec<String> = s
        .blocks
        .iter()
        .map(|b| format!("({}, {})", b.dim, b.multiplicity))
        .collect();
    let _ = writeln!(out, "  algebra dimension {}", s.algebra_dim);
    let _ = writeln!(
        out,
        "  blocks (d, m): {}",
        if blocks.is_empty() {
            "none".into()
        } else {
            blocks.join(" ")
        }
    );
    let _ = writeln!(out, "  null part dimension {}", s.dim_c);
    let _ = writeln!(out, "  block-form residual {}", sci(s.residual));
}

fn condition_text(out: &mut String, c: &ConditionResult) {
    let verdict = if c.satisfied { "satisfied" } else { "violated" };
    let name = match c.condition {
        "correction" => "recovery condition",
        "conservation" => "conservation condition",
        _ => "correctability condition",
    };
    let _ = writeln!(out, "  {name} {verdict}");
    let _ = writeln!(out, "  algebra dimension {}", c.algebra_dim);
    let _ = writeln!(
        out,
        "  worst residual {} (tolerance {})",
        sci(c.worst_residual),
        sci(c.tolerance)
    );
    if let Some(x) = &c.cross_check {
        let _ = writeln!(
            out,
            "  cross-check residual {} (tolerance {}): {}",
            sci(x.residual),
            sci(x.tolerance),
            if x.passed { "agrees" } else { "fails" }
        );
    }
    if let Some(w) = &c.witness {
        let at = match w.kind {
            "kraus" => format!("Kraus element {}", w.kraus.unwrap_or(0)),
            "kraus_pair" => format!("Kraus pair ({}, {})", w.c.unwrap_or(0), w.b.unwrap_or(0)),
            _ => "algebra".to_string(),
        };
        let _ = writeln!(out, "  witness: {at}, basis element {}", w.basis);
        let _ = writeln!(out, "  basis element:");
        matrix_text(out, "    ", &w.element);
        let _ = writeln!(out, "  residual operator:");
        matrix_text(out, "    ", &w.residual_operator);
    }
}

fn classes_text(classes: &[Vec<usize>]) -> String {
    classes
        .iter()
        .map(|c| {
            let ids: Vec<String> = c.iter().map(usize::to_string).collect();
            format!("{{{}}}", ids.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.status);
        match &self.result {
            Body::Structure(s) => structure_text(&mut out, s),
            Body::Condition(c) => condition_text(&mut out, c),
            Body::MaxCorrectable(m) => {
                structure_text(&mut out, &m.structure);
                basis_text(&mut out, &m.basis);
            }
            Body::Recover(r) => {
                let _ = writeln!(
                    out,
                    "  recovery channel with {} Kraus elements, trace-preservation defect {}",
                    r.kraus_count,
                    sci(r.tp_defect)
                );
                match &r.written_to {
                    Some(p) => {
                        let _ = writeln!(out, "  written to {p}");
                    }
                    None => {
                        let _ = writeln!(out, "  not written (no recovery output path given)");
                    }
                }
                condition_text(&mut out, &r.verification);
            }
            Body::Classical(c) => {
                let _ = writeln!(out, "  confusability classes: {}", classes_text(&c.classes));
                for v in &c.observables {
                    let verdict = if v.correctable {
                        "correctable"
                    } else {
                        "not correctable"
                    };
                    let _ = writeln!(out, "  {}: {verdict}", v.file);
                }
            }
            Body::Teleport(t) => {
                let _ = writeln!(
                    out,
                    "  {} teleportation, flag classes: {}",
                    if t.noisy { "noisy" } else { "noiseless" },
                    classes_text(&t.flag_classes)
                );
                structure_text(&mut out, &t.structure);
                basis_text(&mut out, &t.basis);
            }
            Body::Flow(f) => {
                let _ = writeln!(
                    out,
                    "  information kept in the system: dimension {}",
                    f.a_ss.dim
                );
                let _ = writeln!(
                    out,
                    "  information reaching the apparatus: dimension {}",
                    f.a_sa.dim
                );
                let _ = writeln!(
                    out,
                    "  pointer algebra dimension {}, {}",
                    f.pointer.dim,
                    if f.pointer_commutative {
                        "commutative"
                    } else {
                        "not commutative"
                    }
                );
                basis_text(&mut out, &f.pointer.basis);
                condition_text(&mut out, &f.a_sa_check);
            }
        }
        out
    }
}
