//! File formats and job runner behind the `oaqec` command.

pub mod format;
pub mod manifest;
pub mod report;
pub mod run;

use std::fs;

use anyhow::{Context, Result};

pub use manifest::{Command, Format, Job, Overrides};
pub use report::Report;
pub use run::execute;

/// Exit status for a failed condition; input errors use 1.
pub const EXIT_FAILED: u8 = 2;

/// Runs a job and returns its exit status (0 or [`EXIT_FAILED`]) with the report.
pub fn run(job: &Job) -> Result<(u8, Report)> {
    let report = execute(job)?;
    Ok((if report.passed() { 0 } else { EXIT_FAILED }, report))
}

/// Renders a report in the job's format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.text(),
        Format::Json => format::to_json(report),
    }
}

/// Writes the rendered report to the job's output path, or returns it for stdout.
pub fn emit(report: &Report, job: &Job) -> Result<Option<String>> {
    let text = render(report, job.format);
    match &job.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
