use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const OUT_ENV: &str = "SHADOWLAB_OUT";
pub const DEFAULT_OUT: &str = "shadowlab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Construct,
    Shadow,
    HyperShadow,
    AnosovRefute,
    UniversalDendrite,
    Dichotomy,
    Transitivity,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Construct => "construct",
            Self::Shadow => "shadow",
            Self::HyperShadow => "hyper-shadow",
            Self::AnosovRefute => "anosov-refute",
            Self::UniversalDendrite => "universal-dendrite",
            Self::Dichotomy => "dichotomy",
            Self::Transitivity => "transitivity",
        }
    }

    fn needs_eps(self) -> bool {
        !matches!(self, Self::Construct | Self::UniversalDendrite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Builder {
    Square,
    ThreeFixed,
    Star,
    Bridge,
    Universal,
    CatMap,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub builder: Option<Builder>,
    /// Star arms, or the branch order of the universal dendrite.
    pub n: Option<usize>,
    /// Universal dendrite stage.
    pub k: Option<usize>,
    /// Teeth per comb layer.
    pub m: Option<usize>,
    /// Arms of the two stars joined by a bridge.
    pub left: Option<usize>,
    pub right: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub delta_grid: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub trials: Option<usize>,
    pub mesh: Option<f64>,
    pub k_max: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub svg: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub system: SystemSpec,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::from_toml(&text)
    }

    pub fn kind(&self) -> Result<ExperimentKind, CliError> {
        self.kind.ok_or_else(|| CliError::Validation("missing `kind`".into()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Output directory: the config, then the environment, then the default.
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn eps(&self) -> Result<f64, CliError> {
        self.params.eps.ok_or_else(|| CliError::Validation("missing `params.eps`".into()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let kind = self.kind()?;
        let p = &self.params;
        if kind.needs_eps() && p.eps.is_none() {
            return invalid(format!("`{}` requires `params.eps`", kind.name()));
        }
        let positive = [("eps", p.eps), ("delta", p.delta), ("mesh", p.mesh)];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return invalid(format!("`params.{name}` must be positive, got {v}"));
                }
            }
        }
        if let Some(grid) = &p.delta_grid {
            if grid.is_empty() || grid.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
                return invalid("`params.delta_grid` must be a nonempty list of nonnegative numbers");
            }
        }
        for (name, v) in [("steps", p.steps), ("trials", p.trials)] {
            if v == Some(0) {
                return invalid(format!("`params.{name}` must be positive"));
            }
        }
        let s = &self.system;
        for (name, v) in [("n", s.n), ("m", s.m), ("left", s.left), ("right", s.right)] {
            if v == Some(0) {
                return invalid(format!("`system.{name}` must be positive"));
            }
        }
        let anosov = matches!(kind, ExperimentKind::AnosovRefute | ExperimentKind::Dichotomy | ExperimentKind::Transitivity);
        match (anosov, s.builder) {
            (true, None | Some(Builder::CatMap)) | (false, None) => Ok(()),
            (true, Some(b)) => invalid(format!("`{}` runs on the cat map, not `{b:?}`", kind.name())),
            (false, Some(Builder::CatMap)) => invalid(format!("`{}` needs a dendrite system", kind.name())),
            (false, Some(_)) => Ok(()),
        }
    }
}
