//! Experiment configuration and its line-based `key = value` text format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::BoundaryMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyMode {
    None,
    Connected,
    SimplyConnected,
}

impl PenaltyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PenaltyMode::None => "none",
            PenaltyMode::Connected => "connected",
            PenaltyMode::SimplyConnected => "simply_connected",
        }
    }
}

impl FromStr for PenaltyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" | "off" => Ok(PenaltyMode::None),
            "connected" | "on" => Ok(PenaltyMode::Connected),
            "simply_connected" => Ok(PenaltyMode::SimplyConnected),
            other => Err(format!("unknown penalty mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    /// `u = 1` with a linear taper to 0 over the two outermost cells.
    OnesWithBoundaryTaper,
    /// `u = g`.
    FromImage,
    /// `u` read from `init_file`.
    FromFile,
}

impl InitialCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            InitialCondition::OnesWithBoundaryTaper => "ones_with_boundary_taper",
            InitialCondition::FromImage => "from_image",
            InitialCondition::FromFile => "from_file",
        }
    }
}

impl FromStr for InitialCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ones_with_boundary_taper" => Ok(InitialCondition::OnesWithBoundaryTaper),
            "from_image" => Ok(InitialCondition::FromImage),
            "from_file" => Ok(InitialCondition::FromFile),
            other => Err(format!("unknown initial condition `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nx: usize,
    pub ny: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub eta: f64,
    pub kappa: f64,
    pub delta: f64,
    pub tau: f64,
    pub bc: BoundaryMode,
    pub penalty: PenaltyMode,
    pub max_steps: usize,
    /// Absolute stationarity threshold on `max|Δu|/τ`; `None` uses 1% of the
    /// first step's rate.
    pub stationary_tol: Option<f64>,
    /// Steps between recomputing components and geodesics.
    pub refresh: usize,
    /// Snapshot period in steps, 0 for none.
    pub snapshot_every: usize,
    pub init: InitialCondition,
    pub init_file: Option<PathBuf>,
    /// Target image `g`.
    pub image: Option<PathBuf>,
    /// Fidelity prefactor `Φ`; `Φ ≡ 1` when absent.
    pub phi: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            nx: 152,
            ny: 152,
            epsilon: 5e-3,
            alpha: 0.35,
            eta: 300.0,
            kappa: 0.0,
            delta: 0.0,
            tau: 5e-8,
            bc: BoundaryMode::Dirichlet0,
            penalty: PenaltyMode::None,
            max_steps: 200_000,
            stationary_tol: None,
            refresh: 10,
            snapshot_every: 0,
            init: InitialCondition::OnesWithBoundaryTaper,
            init_file: None,
            image: None,
            phi: None,
            output: None,
        }
    }
}

/// Keys that must appear in a config file.
pub const REQUIRED_KEYS: [&str; 5] = ["epsilon", "alpha", "tau", "max_steps", "penalty"];

const KNOWN_KEYS: [&str; 19] = [
    "nx",
    "ny",
    "epsilon",
    "alpha",
    "eta",
    "kappa",
    "delta",
    "tau",
    "bc",
    "penalty",
    "max_steps",
    "stationary_tol",
    "refresh",
    "snapshot_every",
    "init",
    "init_file",
    "image",
    "phi",
    "output",
];

impl ExperimentConfig {
    /// Penalty weight `η ε^{-κ}`.
    pub fn penalty_weight(&self) -> f64 {
        self.eta * self.epsilon.powf(-self.kappa)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::Config { line: 0, message });
        if self.nx < 3 || self.ny < 3 {
            return bad(format!(
                "grid {}x{} needs at least 3 nodes per axis",
                self.nx, self.ny
            ));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return bad(format!("alpha must lie in (0, 0.5], got {}", self.alpha));
        }
        for (key, v) in [
            ("eta", self.eta),
            ("delta", self.delta),
            ("kappa", self.kappa),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!(
                    "{key} must be a finite non-negative number, got {v}"
                ));
            }
        }
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if self.refresh == 0 {
            return bad("refresh must be at least 1".into());
        }
        Ok(())
    }

    /// Checks that every file the config reads from is named.
    pub fn validate_inputs(&self) -> Result<()> {
        let bad = |message: &str| {
            Err(Error::Config {
                line: 0,
                message: message.into(),
            })
        };
        if self.init == InitialCondition::FromImage && self.image.is_none() {
            return bad("init = from_image requires `image`");
        }
        if self.init == InitialCondition::FromFile && self.init_file.is_none() {
            return bad("init = from_file requires `init_file`");
        }
        Ok(())
    }

    /// Parses the config text. Relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let known = KNOWN_KEYS
                .iter()
                .find(|&&k| k == key)
                .ok_or_else(|| err(format!("unknown key `{key}`")))?;
            if seen.contains(known) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(known);

            fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
                v.parse()
                    .map_err(|_| format!("key `{key}`: cannot parse `{v}`"))
            }
            let path = |v: &str| -> PathBuf {
                let p = PathBuf::from(v);
                match base_dir {
                    Some(base) if p.is_relative() => base.join(p),
                    _ => p,
                }
            };
            let res: std::result::Result<(), String> = (|| {
                match key {
                    "nx" => cfg.nx = num(key, value)?,
                    "ny" => cfg.ny = num(key, value)?,
                    "epsilon" => cfg.epsilon = num(key, value)?,
                    "alpha" => cfg.alpha = num(key, value)?,
                    "eta" => cfg.eta = num(key, value)?,
                    "kappa" => cfg.kappa = num(key, value)?,
                    "delta" => cfg.delta = num(key, value)?,
                    "tau" => cfg.tau = num(key, value)?,
                    "bc" => cfg.bc = value.parse().map_err(|e| format!("key `bc`: {e}"))?,
                    "penalty" => {
                        cfg.penalty = value.parse().map_err(|e| format!("key `penalty`: {e}"))?
                    }
                    "max_steps" => cfg.max_steps = num(key, value)?,
                    "stationary_tol" => {
                        cfg.stationary_tol = match value {
                            "auto" => None,
                            v => Some(num(key, v)?),
                        }
                    }
                    "refresh" => cfg.refresh = num(key, value)?,
                    "snapshot_every" => cfg.snapshot_every = num(key, value)?,
                    "init" => cfg.init = value.parse().map_err(|e| format!("key `init`: {e}"))?,
                    "init_file" => cfg.init_file = Some(path(value)),
                    "image" => cfg.image = Some(path(value)),
                    "phi" => cfg.phi = Some(path(value)),
                    "output" => cfg.output = Some(path(value)),
                    _ => unreachable!("filtered by KNOWN_KEYS"),
                }
                Ok(())
            })();
            res.map_err(err)?;
        }
        if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !seen.contains(k)) {
            return Err(Error::MissingKey((*missing).to_string()));
        }
        cfg.validate()?;
        cfg.validate_inputs()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent())
    }

    /// Serializes every key; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("epsilon", format!("{:?}", self.epsilon));
        kv("alpha", format!("{:?}", self.alpha));
        kv("eta", format!("{:?}", self.eta));
        kv("kappa", format!("{:?}", self.kappa));
        kv("delta", format!("{:?}", self.delta));
        kv("tau", format!("{:?}", self.tau));
        kv("bc", self.bc.as_str().into());
        kv("penalty", self.penalty.as_str().into());
        kv("max_steps", self.max_steps.to_string());
        kv(
            "stationary_tol",
            self.stationary_tol
                .map_or("auto".into(), |t| format!("{t:?}")),
        );
        kv("refresh", self.refresh.to_string());
        kv("snapshot_every", self.snapshot_every.to_string());
        kv("init", self.init.as_str().into());
        for (k, p) in [
            ("init_file", &self.init_file),
            ("image", &self.image),
            ("phi", &self.phi),
            ("output", &self.output),
        ] {
            if let Some(p) = p {
                kv(k, p.display().to_string());
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "epsilon = 5e-3\nalpha = 0.35\ntau = 5e-8\nmax_steps = 10\npenalty = connected\n";

    #[test]
    fn parses_minimal_with_defaults() {
        let cfg = ExperimentConfig::parse(MINIMAL, None).unwrap();
        assert_eq!(cfg.penalty, PenaltyMode::Connected);
        assert_eq!(cfg.eta, 300.0);
        assert_eq!(cfg.refresh, 10);
        assert_eq!(cfg.penalty_weight(), 300.0);
    }

    #[test]
    fn missing_epsilon_is_named() {
        let text = MINIMAL.replace("epsilon = 5e-3\n", "");
        match ExperimentConfig::parse(&text, None) {
            Err(e @ Error::MissingKey(_)) => assert!(e.to_string().contains("epsilon")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_line() {
        let text = format!("{MINIMAL}# comment\nfoo = 1\n");
        match ExperimentConfig::parse(&text, None) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("foo"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_values_rejected() {
        for bad in [
            "tau = -1",
            "refresh = 0",
            "alpha = 0.7",
            "penalty = maybe",
            "eta = x",
        ] {
            let key = bad.split('=').next().unwrap().trim();
            let text: String = MINIMAL
                .lines()
                .filter(|l| !l.starts_with(key))
                .chain(std::iter::once(bad))
                .map(|l| format!("{l}\n"))
                .collect();
            assert!(ExperimentConfig::parse(&text, None).is_err(), "{bad}");
        }
    }

    #[test]
    fn relative_paths_resolve() {
        let text = format!("{MINIMAL}image = g.pgm\nphi = /abs/phi.pgm\n");
        let cfg = ExperimentConfig::parse(&text, Some(Path::new("/cfg/dir"))).unwrap();
        assert_eq!(cfg.image.unwrap(), PathBuf::from("/cfg/dir/g.pgm"));
        assert_eq!(cfg.phi.unwrap(), PathBuf::from("/abs/phi.pgm"));
    }

    #[test]
    fn text_round_trip() {
        let cfg = ExperimentConfig {
            kappa: 0.25,
            delta: 140.0,
            tau: 1.234_567_890_123e-7,
            stationary_tol: Some(0.5),
            image: Some("/x/g.pgm".into()),
            init: InitialCondition::FromImage,
            penalty: PenaltyMode::SimplyConnected,
            bc: BoundaryMode::Neumann,
            ..Default::default()
        };
        let back = ExperimentConfig::parse(&cfg.to_text(), None).unwrap();
        assert_eq!(back, cfg);
    }
}
