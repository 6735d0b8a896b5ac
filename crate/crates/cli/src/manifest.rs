//! Job descriptions: a command, named input files and options.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use oaqec_core::Tolerance;
use serde::Deserialize;

/// Default pass/fail threshold on residuals.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default relative rank cutoff.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Decompose,
    Conserve,
    Correct,
    MaxCorrectable,
    Recover,
    Verify,
    Classical,
    Teleport,
    Flow,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Decompose => "decompose",
            Self::Conserve => "conserve",
            Self::Correct => "correct",
            Self::MaxCorrectable => "max-correctable",
            Self::Recover => "recover",
            Self::Verify => "verify",
            Self::Classical => "classical",
            Self::Teleport => "teleport",
            Self::Flow => "flow",
        }
    }

    /// `(name, required, list)` for every accepted input.
    pub fn inputs(self) -> &'static [(&'static str, bool, bool)] {
        match self {
            Self::Decompose => &[("generators", true, true), ("projector", false, false)],
            Self::Conserve | Self::Correct => &[
                ("channel", true, false),
                ("generators", true, true),
                ("projector", false, false),
            ],
            Self::MaxCorrectable => &[("channel", true, false), ("projector", false, false)],
            Self::Recover => &[
                ("channel", true, false),
                ("projector", false, false),
                ("generators", false, true),
            ],
            Self::Verify => &[
                ("recovery", true, false),
                ("channel", true, false),
                ("generators", true, true),
                ("projector", false, false),
            ],
            Self::Classical => &[("stochastic", true, false), ("observables", false, true)],
            Self::Teleport => &[("unitaries", true, true), ("stochastic", false, false)],
            Self::Flow => &[("unitary", true, false), ("apparatus", true, false)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Paths {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Options {
    tol: Option<f64>,
    rank_tol: Option<f64>,
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<String>,
    recovery_out: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    command: Command,
    #[serde(default)]
    inputs: BTreeMap<String, Paths>,
    #[serde(default)]
    options: Options,
}

/// Settings given on the command line; they take precedence over the manifest.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub rank_tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub recovery_out: Option<PathBuf>,
}

/// A fully resolved job.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    /// Input name to paths as written, and resolved against the base directory.
    pub inputs: BTreeMap<String, Vec<(String, PathBuf)>>,
    pub tol: Tolerance,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub recovery_out: Option<(String, PathBuf)>,
}

impl Job {
    /// Job from `name=path` pairs; paths are taken relative to the working directory.
    pub fn from_pairs(
        command: Command,
        pairs: &[(String, String)],
        over: Overrides,
    ) -> Result<Self> {
        let mut inputs: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (k, v) in pairs {
            inputs.entry(k.clone()).or_default().push(v.clone());
        }
        build(command, inputs, Path::new(""), Options::default(), over)
    }

    pub fn from_manifest(path: &Path, over: Overrides) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        let m: Manifest = serde_json::from_str(&text)
            .with_context(|| format!("{}: invalid manifest", path.display()))?;
        let inputs = m
            .inputs
            .into_iter()
            .map(|(k, v)| match v {
                Paths::One(p) => (k, vec![p]),
                Paths::Many(ps) => (k, ps),
            })
            .collect();
        let base = path.parent().unwrap_or(Path::new(""));
        build(m.command, inputs, base, m.options, over)
            .with_context(|| format!("manifest {}", path.display()))
    }

    /// The single path of a scalar input, if given.
    pub fn path(&self, name: &str) -> Option<&(String, PathBuf)> {
        self.inputs.get(name).and_then(|v| v.first())
    }

    pub fn paths(&self, name: &str) -> &[(String, PathBuf)] {
        self.inputs.get(name).map_or(&[], Vec::as_slice)
    }
}

fn build(
    command: Command,
    raw: BTreeMap<String, Vec<String>>,
    base: &Path,
    opts: Options,
    over: Overrides,
) -> Result<Job> {
    let spec = command.inputs();
    for (name, paths) in &raw {
        let Some(&(_, _, list)) = spec.iter().find(|(n, _, _)| n == name) else {
            let known: Vec<&str> = spec.iter().map(|(n, _, _)| *n).collect();
            bail!(
                "{}: unknown input \"{name}\" (accepted: {})",
                command.name(),
                known.join(", ")
            );
        };
        if !list && paths.len() != 1 {
            bail!(
                "{}: input \"{name}\" takes exactly one file",
                command.name()
            );
        }
    }
    for &(name, required, _) in spec {
        if required && raw.get(name).is_none_or(Vec::is_empty) {
            bail!("{}: missing input \"{name}\"", command.name());
        }
    }
    let resolve = |p: &str| base.join(p);
    let inputs = raw
        .into_iter()
        .map(|(k, ps)| {
            let resolved = ps.into_iter().map(|p| (p.clone(), resolve(&p))).collect();
            (k, resolved)
        })
        .collect();
    let tol = Tolerance::new(
        over.tol.or(opts.tol).unwrap_or(DEFAULT_TOL),
        over.rank_tol.or(opts.rank_tol).unwrap_or(DEFAULT_RANK_TOL),
    )?;
    let recovery_out = match (over.recovery_out, opts.recovery_out) {
        (Some(p), _) => Some((p.display().to_string(), p)),
        (None, Some(p)) => Some((p.clone(), resolve(&p))),
        (None, None) => None,
    };
    Ok(Job {
        command,
        inputs,
        tol,
        seed: over.seed.or(opts.seed).unwrap_or(0),
        format: over.format.or(opts.format).unwrap_or_default(),
        out: over.out.or_else(|| opts.out.map(|p| resolve(&p))),
        recovery_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn missing_and_unknown_inputs() {
        let err = Job::from_pairs(
            Command::Correct,
            &pairs(&[("channel", "c.json")]),
            Overrides::default(),
        );
        assert!(err
            .unwrap_err()
            .to_string()
            .contains("missing input \"generators\""));
        let err = Job::from_pairs(
            Command::Flow,
            &pairs(&[("channel", "c.json")]),
            Overrides::default(),
        );
        assert!(err.unwrap_err().to_string().contains("unknown input"));
        let err = Job::from_pairs(
            Command::Flow,
            &pairs(&[("unitary", "a"), ("unitary", "b"), ("apparatus", "c")]),
            Overrides::default(),
        );
        assert!(err.unwrap_err().to_string().contains("exactly one"));
    }

    #[test]
    fn defaults_and_overrides() {
        let p = pairs(&[("unitary", "u"), ("apparatus", "a")]);
        let job = Job::from_pairs(Command::Flow, &p, Overrides::default()).unwrap();
        assert_eq!(job.tol.abs_eps, DEFAULT_TOL);
        assert_eq!(job.format, Format::Text);
        let over = Overrides {
            tol: Some(1e-6),
            seed: Some(9),
            ..Overrides::default()
        };
        let job = Job::from_pairs(Command::Flow, &p, over).unwrap();
        assert_eq!((job.tol.abs_eps, job.seed), (1e-6, 9));
    }

    #[test]
    fn manifest_paths_are_relative_to_the_manifest() {
        let dir = std::env::temp_dir().join(format!("oaqec-manifest-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.json");
        fs::write(
            &path,
            r#"{"command":"teleport","inputs":{"unitaries":["a.json","b.json"]},"options":{"tol":1e-9,"format":"json"}}"#,
        )
        .unwrap();
        let job = Job::from_manifest(&path, Overrides::default()).unwrap();
        assert_eq!(job.paths("unitaries")[1].1, dir.join("b.json"));
        assert_eq!(job.paths("unitaries")[1].0, "b.json");
        assert_eq!(job.format, Format::Json);
        assert_eq!(job.tol.abs_eps, 1e-9);
        fs::write(
            &path,
            r#"{"command":"teleport","inputs":{},"options":{"colour":1}}"#,
        )
        .unwrap();
        assert!(Job::from_manifest(&path, Overrides::default()).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
