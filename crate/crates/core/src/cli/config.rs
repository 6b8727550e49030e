use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use faer::c64;
use serde::{Deserialize, Serialize};

use crate::condition::WeightScheme;
use crate::eigensolve::Target;
use crate::error::{Error, Result};
use crate::models::{ModelName, ModelParams, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Validate,
    Experiment1,
    Experiment2,
    Example52,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Validate => "validate",
            Command::Experiment1 => "experiment1",
            Command::Experiment2 => "experiment2",
            Command::Example52 => "example52",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum WeightsMode {
    Uniform,
    Relative,
    DataOnly,
    Custom,
}

impl WeightsMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightsMode::Uniform => "uniform",
            WeightsMode::Relative => "relative",
            WeightsMode::DataOnly => "data_only",
            WeightsMode::Custom => "custom",
        }
    }
}

/// Parses `largest`, `all` or `nearest=RE,IM`.
pub fn parse_target(s: &str) -> Result<Target> {
    match s.trim() {
        "largest" => Ok(Target::Largest),
        "all" => Ok(Target::All),
        t => {
            let rest = t
                .strip_prefix("nearest=")
                .ok_or_else(|| Error::Parse(format!("unknown target '{t}' (expected largest, all or nearest=RE,IM)")))?;
            let parts: Vec<&str> = rest.split(',').collect();
            let num = |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad target '{t}': {e}")));
            match parts.as_slice() {
                [re] => Ok(Target::Nearest(c64::new(num(re)?, 0.0))),
                [re, im] => Ok(Target::Nearest(c64::new(num(re)?, num(im)?))),
                _ => Err(Error::Parse(format!("bad target '{t}'"))),
            }
        }
    }
}

pub fn target_str(t: &Target) -> String {
    match t {
        Target::Largest => "largest".into(),
        Target::All => "all".into(),
        Target::Nearest(z) => format!("nearest={},{}", z.re, z.im),
    }
}

/// Parses a comma separated list of perturbation sizes.
pub fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad eps entry '{x}': {e}"))))
        .collect()
}

/// Entries must be positive, finite and strictly decreasing.
pub fn check_eps_list(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Parse("eps list is empty".into()));
    }
    if let Some(x) = eps.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::Parse(format!("eps entries must be positive, got {x}")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parse("eps list must be strictly decreasing".into()));
    }
    Ok(())
}

/// Command-line options shared by every subcommand. Each one may also come
/// from a JSON config file; flags take precedence.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// JSON config file with any of the options below
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Polynomial system matrix in JSON form {"A","B","C","D"}
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Built-in model instead of --input
    #[arg(long, value_enum, value_name = "NAME")]
    pub model: Option<ModelName>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, value_enum)]
    pub weights: Option<WeightsMode>,
    /// WeightScheme JSON {"a","b","c","d"} for --weights custom
    #[arg(long, value_name = "PATH")]
    pub weights_file: Option<PathBuf>,
    /// Comma separated, positive and decreasing
    #[arg(long, value_name = "LIST")]
    pub eps: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; a .meta.json sidecar is written next to it
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// largest | all | nearest=RE,IM
    #[arg(long, value_name = "TARGET", allow_hyphen_values = true)]
    pub target: Option<String>,
    /// Divide condition numbers by |lambda0|
    #[arg(long)]
    pub scaled: bool,
    /// Number of random realizations (experiment1)
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Comma separated k values (experiment2)
    #[arg(long, value_name = "LIST")]
    pub k_grid: Option<String>,
}

/// The on-disk form of [`Flags`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub input: Option<PathBuf>,
    pub model: Option<ModelName>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub k: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<f64>,
    pub weights: Option<WeightsMode>,
    pub weights_file: Option<PathBuf>,
    pub custom_weights: Option<WeightScheme>,
    pub eps: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub target: Option<String>,
    pub scaled: Option<bool>,
    pub realizations: Option<usize>,
    pub k_grid: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

pub const DEFAULT_EPS: [f64; 3] = [1e-6, 1e-7, 1e-8];
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_REALIZATIONS: usize = 100;
pub const DEFAULT_K_GRID: [f64; 7] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

/// Fully resolved settings of one run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub model: Option<ModelSpec>,
    /// model parameters from flags or config, also used by the experiments
    pub params: ModelParams,
    /// `None` picks the model's default scheme
    pub weights_mode: Option<WeightsMode>,
    pub custom_weights: Option<WeightScheme>,
    pub eps_list: Vec<f64>,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub target: Target,
    pub scaled: bool,
    pub realizations: usize,
    pub k_grid: Vec<f64>,
}

impl ExperimentConfig {
    /// Merges flags over the optional config file and validates the result.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(c) = file.command {
            if c != command {
                return Err(Error::Parse(format!(
                    "config file is for command {}, but {} was requested",
                    c.as_str(),
                    command.as_str()
                )));
            }
        }
        let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let params = ModelParams {
            n: flags.n.or(file.n),
            k: flags.k.or(file.k),
            m: flags.m.or(file.m),
            alpha: flags.alpha.or(file.alpha),
            beta: flags.beta.or(file.beta),
            seed: Some(seed),
        };
        let input_path = flags.input.clone().or(file.input);
        let model = flags.model.or(file.model).map(|name| ModelSpec::new(name, params.clone()));
        if input_path.is_some() && model.is_some() {
            return Err(Error::Parse("give either --input or --model, not both".into()));
        }

        let weights_mode = flags.weights.or(file.weights);
        let weights_file = flags.weights_file.clone().or(file.weights_file);
        let custom_weights = match (&weights_file, file.custom_weights) {
            (Some(p), _) => {
                let text = std::fs::read_to_string(p)?;
                let w: WeightScheme = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                Some(w)
            }
            (None, w) => w,
        };
        match (weights_mode, &custom_weights) {
            (Some(WeightsMode::Custom), None) => {
                return Err(Error::Parse("--weights custom needs --weights-file".into()));
            }
            (Some(WeightsMode::Custom), Some(w)) => w.validate().map_err(|e| Error::Parse(e.to_string()))?,
            (_, Some(_)) => return Err(Error::Parse("custom weights given without --weights custom".into())),
            _ => {}
        }

        let eps_list = match (&flags.eps, file.eps) {
            (Some(s), _) => parse_eps_list(s)?,
            (None, Some(v)) => v,
            (None, None) => DEFAULT_EPS.to_vec(),
        };
        check_eps_list(&eps_list)?;

        let target = match flags.target.as_deref().or(file.target.as_deref()) {
            Some(t) => parse_target(t)?,
            None => Target::Largest,
        };
        let k_grid = match (&flags.k_grid, file.k_grid) {
            (Some(s), _) => parse_eps_list(s)?,
            (None, Some(v)) => v,
            (None, None) => DEFAULT_K_GRID.to_vec(),
        };
        if k_grid.is_empty() || k_grid.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(Error::Parse("k grid entries must be positive".into()));
        }
        let realizations = flags.realizations.or(file.realizations).unwrap_or(DEFAULT_REALIZATIONS);
        if realizations == 0 {
            return Err(Error::Parse("need at least one realization".into()));
        }

        Ok(Self {
            command,
            input_path,
            model,
            params,
            weights_mode,
            custom_weights,
            eps_list,
            seed,
            out_path: flags.out.clone().or(file.out),
            target,
            scaled: flags.scaled || file.scaled.unwrap_or(false),
            realizations,
            k_grid,
        })
    }
}
