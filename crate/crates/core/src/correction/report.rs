use crate::numerics::ComplexMatrix;

/// Which operators produced a residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessIndex {
    /// Kraus element `a` against algebra basis element `basis`.
    Kraus { kraus: usize, basis: usize },
    /// Kraus pair `(c, b)` against algebra basis element `basis`.
    KrausPair { c: usize, b: usize, basis: usize },
    /// Algebra basis element alone.
    Basis { basis: usize },
}

/// Operator data exhibiting a violated condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub index: WitnessIndex,
    /// The algebra basis element involved.
    pub element: ComplexMatrix,
    /// The offending commutator or deviation.
    pub residual_operator: ComplexMatrix,
}

/// Second, independent test run alongside the main one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionReport {
    /// `worst_residual <= tolerance`.
    pub passed: bool,
    /// Largest operator norm encountered.
    pub worst_residual: f64,
    pub tolerance: f64,
    /// Set when the test fails: the first index achieving the worst residual.
    pub witness: Option<Witness>,
    pub cross_check: Option<CrossCheck>,
}

impl CorrectionReport {
    /// Whether the cross-check (if any) reached the same verdict.
    pub fn consistent(&self) -> bool {
        self.cross_check.is_none_or(|c| c.passed == self.passed)
    }
}

/// Max-reduction over an index grid visited in lexicographic order; only a
/// strictly larger residual replaces the current witness.
pub(crate) struct Scan {
    worst: f64,
    witness: Option<(WitnessIndex, ComplexMatrix)>,
}

impl Scan {
    pub(crate) fn new() -> Self {
        Self {
            worst: 0.0,
            witness: None,
        }
    }

    pub(crate) fn worst(&self) -> f64 {
        self.worst
    }

    pub(crate) fn offer(&mut self, index: WitnessIndex, residual: ComplexMatrix) {
        // the spectral norm never exceeds the Hilbert-Schmidt norm
        if residual.hs_norm() <= self.worst {
            return;
        }
        let r = residual.op_norm();
        if r > self.worst {
            self.worst = r;
            self.witness = Some((index, residual));
        }
    }

    pub(crate) fn finish(self, tolerance: f64, basis: &[ComplexMatrix]) -> CorrectionReport {
        let passed = self.worst <= tolerance;
        let witness = if passed {
            None
        } else {
            self.witness.map(|(index, residual_operator)| {
                let b = match index {
                    WitnessIndex::Kraus { basis, .. }
                    | WitnessIndex::KrausPair { basis, .. }
                    | WitnessIndex::Basis { basis } => basis,
                };
                Witness {
                    index,
                    element: basis[b].clone(),
                    residual_operator,
                }
            })
        };
        CorrectionReport {
            passed,
            worst_residual: self.worst,
            tolerance,
            witness,
            cross_check: None,
        }
    }
}
