//! Command-line front end.

pub mod config;
pub mod experiments;
pub mod output;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::condition::{analyze, ConditionReport, WeightScheme};
use crate::eigensolve::zeros_of;
use crate::error::{Error, Result};
use crate::models::{self, ModelName, ModelSpec};
use crate::perturb::{first_order_validate, TrialResult};
use crate::psm::PolySystemMatrix;

use config::{target_str, Command, ExperimentConfig, Flags, WeightsMode};
use experiments::{Exp2Weights, Ex52Row};
use output::{emit, fmt_f64, Table};

#[derive(Debug, Parser)]
#[command(name = "rzcond", version, about = "Condition numbers of simple zeros of rational matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Condition numbers of selected eigenvalues
    Analyze(Flags),
    /// First-order check with the extremal perturbation
    Validate(Flags),
    /// Damped vibration ratios over random realizations
    Experiment1(Flags),
    /// Loaded string condition numbers over a k grid
    Experiment2(Flags),
    /// Closed-form example against computed values
    Example52(Flags),
}

impl Sub {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Analyze(f) => (Command::Analyze, f),
            Sub::Validate(f) => (Command::Validate, f),
            Sub::Experiment1(f) => (Command::Experiment1, f),
            Sub::Experiment2(f) => (Command::Experiment2, f),
            Sub::Example52(f) => (Command::Example52, f),
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    let (command, flags) = cli.command.split();
    let cfg = ExperimentConfig::resolve(command, flags)?;
    match command {
        Command::Analyze => cmd_analyze(&cfg),
        Command::Validate => cmd_validate(&cfg),
        Command::Experiment1 => cmd_experiment1(&cfg),
        Command::Experiment2 => cmd_experiment2(&cfg),
        Command::Example52 => cmd_example52(&cfg),
    }
}

/// The problem of an analyze or validate run.
pub struct Problem {
    pub psm: PolySystemMatrix,
    pub spec: Option<ModelSpec>,
}

pub fn load_problem(cfg: &ExperimentConfig) -> Result<Problem> {
    match (&cfg.input_path, &cfg.model) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let psm = PolySystemMatrix::from_json(&text).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?;
            Ok(Problem { psm, spec: None })
        }
        (None, Some(spec)) => {
            let spec = spec.clone().with_defaults();
            Ok(Problem {
                psm: spec.build()?,
                spec: Some(spec),
            })
        }
        (None, None) => Err(Error::Parse("give --input or --model".into())),
    }
}

fn default_mode(spec: Option<&ModelSpec>) -> WeightsMode {
    match spec.map(|s| s.name) {
        Some(ModelName::Example52) => WeightsMode::DataOnly,
        _ => WeightsMode::Uniform,
    }
}

pub fn weights_for(cfg: &ExperimentConfig, s: &PolySystemMatrix, spec: Option<&ModelSpec>) -> Result<(WeightsMode, WeightScheme)> {
    let mode = cfg.weights_mode.unwrap_or_else(|| default_mode(spec));
    let w = match mode {
        WeightsMode::Uniform => WeightScheme::uniform(s),
        WeightsMode::Relative => WeightScheme::relative(s)?,
        WeightsMode::DataOnly => match spec {
            Some(sp) if sp.name == ModelName::Example52 => models::example52_weights(s),
            Some(sp) => models::data_only_weights(sp)?,
            None => return Err(Error::InvalidSpec("data_only weights need a built-in model".into())),
        },
        WeightsMode::Custom => {
            let w = cfg.custom_weights.clone().ok_or_else(|| Error::Parse("missing custom weights".into()))?;
            w.check_against(s)?;
            w
        }
    };
    Ok((mode, w))
}

fn base_meta(cfg: &ExperimentConfig, spec: Option<&ModelSpec>) -> Value {
    json!({
        "command": cfg.command.as_str(),
        "seed": cfg.seed,
        "input": cfg.input_path.as_ref().map(|p| p.display().to_string()),
        "model": spec.map(|s| s.name.as_str()),
        "params": spec.map(|s| s.param_map()),
        "target": target_str(&cfg.target),
        "scaled": cfg.scaled,
    })
}

fn insert(meta: &mut Value, key: &str, v: Value) {
    if let Value::Object(m) = meta {
        m.insert(key.into(), v);
    }
}

pub fn cmd_analyze(cfg: &ExperimentConfig) -> Result<()> {
    let prob = load_problem(cfg)?;
    let s = &prob.psm;
    let (mode, w) = weights_for(cfg, s, prob.spec.as_ref())?;
    let zeros = zeros_of(s, &cfg.target)?;
    let mut table = Table::new(&ConditionReport::CSV_HEADER);
    let mut reports = Vec::new();
    let mut first_err = None;
    for sz in &zeros {
        match analyze(s, sz, &w) {
            Ok(rep) => {
                if rep.marginal_minimality {
                    eprintln!("warning: lambda0 = {} is only marginally minimal", sz.lambda0);
                }
                table.push_f64(&if cfg.scaled { rep.csv_row_scaled() } else { rep.csv_row() });
                reports.push(rep);
            }
            Err(e) => {
                eprintln!("warning: lambda0 = {}: {}", sz.lambda0, e.diagnostic());
                first_err.get_or_insert(e);
            }
        }
    }
    if reports.is_empty() {
        return Err(first_err.unwrap_or(Error::NoFiniteEigenvalues));
    }
    let mut meta = base_meta(cfg, prob.spec.as_ref());
    insert(&mut meta, "weights", json!(mode.as_str()));
    insert(&mut meta, "weight_scheme", json!(w));
    insert(&mut meta, "reports", json!(reports));
    emit(&table, cfg.out_path.as_deref(), meta)
}

pub fn cmd_validate(cfg: &ExperimentConfig) -> Result<()> {
    let prob = load_problem(cfg)?;
    let s = &prob.psm;
    let (mode, w) = weights_for(cfg, s, prob.spec.as_ref())?;
    let sz = zeros_of(s, &cfg.target)?.remove(0);
    let summary = first_order_validate(s, &sz, &w, &cfg.eps_list)?;
    let mut table = Table::new(&TrialResult::CSV_HEADER);
    for t in &summary.trials {
        table.push_f64(&t.csv_row());
    }
    let short = json!({
        "kappa_S": summary.kappa_s,
        "max_rel_error": summary.max_rel_error,
        "lambda0_re": sz.lambda0.re,
        "lambda0_im": sz.lambda0.im,
        "rel_errors": summary.rel_errors,
        "slopes": summary.slopes,
    });
    let mut meta = base_meta(cfg, prob.spec.as_ref());
    insert(&mut meta, "weights", json!(mode.as_str()));
    insert(&mut meta, "eps", json!(cfg.eps_list));
    insert(&mut meta, "summary", short.clone());
    emit(&table, cfg.out_path.as_deref(), meta)?;
    let text = serde_json::to_string(&short)?;
    if cfg.out_path.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

fn usize_param(x: Option<f64>, default: usize, what: &str) -> Result<usize> {
    match x {
        None => Ok(default),
        Some(v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
        Some(v) => Err(Error::InvalidSpec(format!("{what} = {v} must be an integer >= 1"))),
    }
}

pub fn cmd_experiment1(cfg: &ExperimentConfig) -> Result<()> {
    let n = cfg.params.n.unwrap_or(20);
    let k = usize_param(cfg.params.k, 2, "k")?;
    if n == 0 {
        return Err(Error::InvalidSpec("n must be >= 1".into()));
    }
    let out = experiments::experiment1(n, k, cfg.realizations, cfg.seed);
    for s in &out.skipped {
        eprintln!("warning: realization {} ({}) skipped: {}", s.index, s.representation, s.reason);
    }
    if out.rows.is_empty() {
        return Err(Error::NoFiniteEigenvalues);
    }
    let mut table = Table::new(&["realization", "seed", "representation", "weights", "lambda0_re", "lambda0_im", "kappa_S", "kappa_U", "ratio"]);
    for r in &out.rows {
        let mut row = vec![r.realization.to_string(), r.seed.to_string(), r.representation.to_string(), r.weights.as_str().to_string()];
        row.extend([r.lambda0_re, r.lambda0_im, r.kappa_s, r.kappa_u, r.ratio].map(fmt_f64));
        table.push(row);
    }
    let mut meta = base_meta(cfg, None);
    insert(&mut meta, "n", json!(n));
    insert(&mut meta, "k", json!(k));
    insert(&mut meta, "realizations", json!(cfg.realizations));
    insert(&mut meta, "realization_seeds", json!("seed + realization"));
    insert(&mut meta, "skipped", json!(out.skipped));
    emit(&table, cfg.out_path.as_deref(), meta)
}

pub fn cmd_experiment2(cfg: &ExperimentConfig) -> Result<()> {
    let n = cfg.params.n.unwrap_or(10);
    let m = cfg.params.m.unwrap_or(1.0);
    let weights = match cfg.weights_mode {
        None | Some(WeightsMode::Uniform) => Exp2Weights::Uniform,
        Some(WeightsMode::Relative) => Exp2Weights::Relative,
        Some(other) => return Err(Error::InvalidSpec(format!("experiment2 supports uniform or relative weights, not {}", other.as_str()))),
    };
    let rows = experiments::experiment2(n, m, &cfg.k_grid, weights)?;
    let mut table = Table::new(&["representation", "k", "lambda0_re", "lambda0_im", "kappa_S", "kappa_U", "ratio"]);
    for r in &rows {
        let mut row = vec![r.representation.to_string()];
        row.extend([r.k, r.lambda0_re, r.lambda0_im, r.kappa_s, r.kappa_u, r.ratio].map(fmt_f64));
        table.push(row);
    }
    let mut meta = base_meta(cfg, None);
    insert(&mut meta, "n", json!(n));
    insert(&mut meta, "m", json!(m));
    insert(&mut meta, "k_grid", json!(cfg.k_grid));
    insert(&mut meta, "weights", json!(weights));
    insert(&mut meta, "slopes", json!(experiments::exp2_slopes(&rows)));
    emit(&table, cfg.out_path.as_deref(), meta)
}

pub fn cmd_example52(cfg: &ExperimentConfig) -> Result<()> {
    let p = &cfg.params;
    let grid = if p.alpha.is_none() && p.beta.is_none() && p.k.is_none() {
        experiments::example52_grid()
    } else {
        vec![(p.alpha.unwrap_or(2.0), p.beta.unwrap_or(3.0), usize_param(p.k, 2, "k")?)]
    };
    let rows = grid
        .into_iter()
        .map(|(a, b, k)| experiments::example52_row(a, b, k))
        .collect::<Result<Vec<Ex52Row>>>()?;
    let mut table = Table::new(&["alpha", "beta", "k", "is_pole", "lambda0_re", "lambda0_im", "kappa_S", "kappa_S_closed", "kappa_U", "kappa_U_closed", "ratio"]);
    for r in &rows {
        let mut row = vec![fmt_f64(r.alpha), fmt_f64(r.beta), r.k.to_string(), r.is_pole.to_string()];
        row.extend([r.lambda0_re, r.lambda0_im, r.kappa_s, r.kappa_s_closed, r.kappa_u, r.kappa_u_closed, r.ratio].map(fmt_f64));
        table.push(row);
    }
    let mut meta = base_meta(cfg, None);
    insert(&mut meta, "weights", json!("data_only"));
    emit(&table, cfg.out_path.as_deref(), meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelParams;

    fn cfg_for(command: Command, flags: Flags) -> ExperimentConfig {
        ExperimentConfig::resolve(command, &flags).unwrap()
    }

    #[test]
    fn subcommands_parse() {
        let cli = Cli::try_parse_from(["rzcond", "analyze", "--model", "example52", "--alpha", "-2", "--target", "nearest=-2,0"]).unwrap();
        let (c, f) = cli.command.split();
        assert_eq!(c, Command::Analyze);
        assert_eq!(f.alpha, Some(-2.0));
        assert!(Cli::try_parse_from(["rzcond", "analyze", "--weights", "bogus"]).is_err());
    }

    #[test]
    fn example52_defaults_to_data_only_weights() {
        let cfg = cfg_for(Command::Analyze, Flags {
            model: Some(ModelName::Example52),
            ..Default::default()
        });
        let prob = load_problem(&cfg).unwrap();
        let (mode, w) = weights_for(&cfg, &prob.psm, prob.spec.as_ref()).unwrap();
        assert_eq!(mode, WeightsMode::DataOnly);
        assert_eq!(w, models::example52_weights(&prob.psm));
    }

    #[test]
    fn data_only_needs_model() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        let spec = ModelSpec::new(ModelName::Example52, ModelParams::default()).with_defaults();
        std::fs::write(&path, spec.build().unwrap().to_json().unwrap()).unwrap();
        let cfg = cfg_for(Command::Analyze, Flags {
            input: Some(path),
            weights: Some(WeightsMode::DataOnly),
            ..Default::default()
        });
        let prob = load_problem(&cfg).unwrap();
        assert!(matches!(weights_for(&cfg, &prob.psm, None), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn analyze_writes_kappa_s_three() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a.csv");
        let cfg = cfg_for(Command::Analyze, Flags {
            model: Some(ModelName::Example52),
            out: Some(out.clone()),
            ..Default::default()
        });
        cmd_analyze(&cfg).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rec = rdr.records().next().unwrap().unwrap();
        let ks: f64 = rec[2].parse().unwrap();
        assert!((ks - 3.0).abs() <= 1e-8 * 3.0);
    }
}
