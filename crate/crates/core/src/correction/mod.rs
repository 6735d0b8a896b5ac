//! Conservation and correctability tests, maximal algebras, and recovery.

mod conditions;
mod recovery;
mod report;

pub use conditions::{
    is_conserved, is_correctable, is_noiseless_subsystem, max_conserved_algebra,
    max_correctable_algebra, subsystem_algebra,
};
pub use recovery::{petz_recovery, robustness_check, verify_correction};
pub use report::{CorrectionReport, CrossCheck, Witness, WitnessIndex};

#[cfg(test)]
mod tests;
