use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use connfield::flow::ExperimentConfig;
use sha2::{Digest, Sha256};

const CONFIG_PREFIX: &str = "config.";

/// Plain `key = value` record of one run.
#[derive(Debug, Default)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    /// `(role, path, sha256)`.
    pub inputs: Vec<(String, PathBuf, String)>,
    pub outputs: Vec<PathBuf>,
    /// Wall-clock seconds per phase.
    pub timings: Vec<(String, f64)>,
    pub results: Vec<(String, String)>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn add_input(&mut self, role: &str, path: &Path) -> Result<()> {
        let hash = sha256_file(path)?;
        self.inputs.push((role.into(), path.to_path_buf(), hash));
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for line in self.config.to_text().lines() {
            let _ = writeln!(s, "{CONFIG_PREFIX}{line}");
        }
        for (role, path, hash) in &self.inputs {
            let _ = writeln!(s, "input.{role}.path = {}", path.display());
            let _ = writeln!(s, "input.{role}.sha256 = {hash}");
        }
        for (k, p) in self.outputs.iter().enumerate() {
            let _ = writeln!(s, "output.{k} = {}", p.display());
        }
        for (phase, secs) in &self.timings {
            let _ = writeln!(s, "time.{phase}_s = {secs:.3}");
        }
        for (k, v) in &self.results {
            let _ = writeln!(s, "result.{k} = {v}");
        }
        s
    }
}

/// Re-parses the config echoed into a manifest.
pub fn config_from_manifest(text: &str) -> connfield::Result<ExperimentConfig> {
    let echo: String = text
        .lines()
        .filter_map(|l| l.strip_prefix(CONFIG_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect();
    ExperimentConfig::parse(&echo, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let cfg = ExperimentConfig {
            image: Some("/data/g.pgm".into()),
            stationary_tol: Some(1e-3),
            ..ExperimentConfig::default()
        };
        let m = RunManifest {
            config: cfg.clone(),
            outputs: vec!["/out/final.pgm".into()],
            timings: vec![("flow".into(), 1.5)],
            ..RunManifest::default()
        };
        assert_eq!(config_from_manifest(&m.to_text()).unwrap(), cfg);
    }
}
