//! Drivers for the two numerical experiments and the closed-form example.

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::{analyze, WeightScheme};
use crate::eigensolve::{zeros_of, Target};
use crate::error::{Error, Result};
use crate::models::{self, ModelName, ModelSpec};

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exp1Weights {
    Uniform,
    DataOnly,
}

impl Exp1Weights {
    pub fn as_str(self) -> &'static str {
        match self {
            Exp1Weights::Uniform => "uniform",
            Exp1Weights::DataOnly => "data_only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp1Row {
    pub realization: usize,
    pub seed: u64,
    pub representation: ModelName,
    pub weights: Exp1Weights,
    pub lambda0_re: f64,
    pub lambda0_im: f64,
    pub kappa_s: f64,
    pub kappa_u: f64,
    pub ratio: f64,
}

/// A realization that produced no row, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub index: usize,
    pub representation: ModelName,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct Exp1Output {
    pub rows: Vec<Exp1Row>,
    pub skipped: Vec<Skipped>,
}

fn exp1_one(n: usize, k: usize, r: usize, seed: u64, name: ModelName) -> std::result::Result<Vec<Exp1Row>, Skipped> {
    let skip = |e: Error| Skipped {
        index: r,
        representation: name,
        reason: e.diagnostic(),
    };
    let spec = ModelSpec::damped_vibration(name, n, k, seed);
    let s = spec.build().map_err(skip)?;
    let sz = zeros_of(&s, &Target::Largest).map_err(skip)?.remove(0);
    [(Exp1Weights::Uniform, WeightScheme::uniform(&s)), (Exp1Weights::DataOnly, models::data_only_weights(&spec).map_err(skip)?)]
        .into_iter()
        .map(|(label, w)| {
            let rep = analyze(&s, &sz, &w).map_err(skip)?;
            Ok(Exp1Row {
                realization: r,
                seed,
                representation: name,
                weights: label,
                lambda0_re: rep.lambda0_re,
                lambda0_im: rep.lambda0_im,
                kappa_s: rep.kappa_s,
                kappa_u: rep.kappa_u,
                ratio: rep.ratio,
            })
        })
        .collect()
}

/// Condition number ratios of the damped vibration model for both
/// realizations and both weight choices, at the largest eigenvalue.
/// Realization `r` uses seed `seed + r`.
pub fn experiment1(n: usize, k: usize, realizations: usize, seed: u64) -> Exp1Output {
    let jobs: Vec<(usize, ModelName)> = (0..realizations)
        .flat_map(|r| [(r, ModelName::DampedVibrationRep1), (r, ModelName::DampedVibrationRep3)])
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(r, name)| exp1_one(n, k, r, seed.wrapping_add(r as u64), name))
        .collect();
    let mut out = Exp1Output::default();
    for res in results {
        match res {
            Ok(rows) => out.rows.extend(rows),
            Err(s) => out.skipped.push(s),
        }
    }
    out.rows.sort_by_key(|r| (r.realization, r.representation, r.weights));
    out.skipped.sort_by_key(|s| (s.index, s.representation));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exp2Weights {
    Uniform,
    Relative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp2Row {
    pub representation: ModelName,
    pub k: f64,
    pub lambda0_re: f64,
    pub lambda0_im: f64,
    pub kappa_s: f64,
    pub kappa_u: f64,
    pub ratio: f64,
}

impl Exp2Row {
    pub fn lambda0(&self) -> c64 {
        c64::new(self.lambda0_re, self.lambda0_im)
    }
}

/// Log-log slopes of one representation over the k grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp2Slopes {
    pub representation: ModelName,
    /// least squares over the whole grid
    pub kappa_s: f64,
    pub kappa_u: f64,
    /// between the last two grid points
    pub kappa_s_last: f64,
    pub kappa_u_last: f64,
}

fn exp2_one(name: ModelName, n: usize, k: f64, m: f64, weights: Exp2Weights) -> Result<Exp2Row> {
    let s = ModelSpec::loaded_string(name, n, k, m).build()?;
    let sz = zeros_of(&s, &Target::Largest)?.remove(0);
    let w = match weights {
        Exp2Weights::Uniform => WeightScheme::uniform(&s),
        Exp2Weights::Relative => WeightScheme::relative(&s)?,
    };
    let rep = analyze(&s, &sz, &w)?;
    Ok(Exp2Row {
        representation: name,
        k,
        lambda0_re: rep.lambda0_re,
        lambda0_im: rep.lambda0_im,
        kappa_s: rep.kappa_s,
        kappa_u: rep.kappa_u,
        ratio: rep.ratio,
    })
}

/// Loaded string condition numbers at the largest eigenvalue for both
/// realizations over the k grid, sorted by representation then k.
pub fn experiment2(n: usize, m: f64, k_grid: &[f64], weights: Exp2Weights) -> Result<Vec<Exp2Row>> {
    let jobs: Vec<(ModelName, f64)> = [ModelName::LoadedStringRep2, ModelName::LoadedStringRep4]
        .into_iter()
        .flat_map(|name| k_grid.iter().map(move |&k| (name, k)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(name, k)| exp2_one(name, n, k, m, weights))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (a.representation, a.k).partial_cmp(&(b.representation, b.k)).expect("finite k"));
    Ok(rows)
}

pub fn exp2_slopes(rows: &[Exp2Row]) -> Vec<Exp2Slopes> {
    [ModelName::LoadedStringRep2, ModelName::LoadedStringRep4]
        .into_iter()
        .filter_map(|name| {
            let r: Vec<&Exp2Row> = rows.iter().filter(|x| x.representation == name).collect();
            if r.len() < 2 {
                return None;
            }
            let ks: Vec<f64> = r.iter().map(|x| x.k).collect();
            let s: Vec<f64> = r.iter().map(|x| x.kappa_s).collect();
            let u: Vec<f64> = r.iter().map(|x| x.kappa_u).collect();
            let t = r.len() - 2;
            Some(Exp2Slopes {
                representation: name,
                kappa_s: loglog_slope(&ks, &s),
                kappa_u: loglog_slope(&ks, &u),
                kappa_s_last: loglog_slope(&ks[t..], &s[t..]),
                kappa_u_last: loglog_slope(&ks[t..], &u[t..]),
            })
        })
        .collect()
}

/// Parameter grid of the closed-form example.
pub fn example52_grid() -> Vec<(f64, f64, usize)> {
    let mut g = Vec::new();
    for alpha in [1.5, 2.0, 5.0] {
        for beta in [1.0, 10.0] {
            for k in [1, 2, 5] {
                g.push((alpha, beta, k));
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ex52Row {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    /// `beta = +-alpha^k`, where alpha is also a pole
    pub is_pole: bool,
    pub lambda0_re: f64,
    pub lambda0_im: f64,
    pub kappa_s: f64,
    pub kappa_s_closed: f64,
    pub kappa_u: f64,
    pub kappa_u_closed: f64,
    pub ratio: f64,
}

pub fn example52_kappa_s_closed(alpha: f64) -> f64 {
    alpha.abs() + 1.0
}

pub fn example52_kappa_u_closed(alpha: f64, beta: f64, k: usize) -> f64 {
    let ps: f64 = (0..=k).map(|i| models::example52_p(i) * alpha.abs().powi(i as i32)).sum();
    ps * (1.0 + alpha.abs().powi(2 * k as i32) + beta * beta).sqrt()
}

pub fn example52_row(alpha: f64, beta: f64, k: usize) -> Result<Ex52Row> {
    let s = models::example52(alpha, beta, k)?;
    let sz = zeros_of(&s, &Target::Nearest(c64::new(alpha, 0.0)))?.remove(0);
    let rep = analyze(&s, &sz, &models::example52_weights(&s))?;
    Ok(Ex52Row {
        alpha,
        beta,
        k,
        is_pole: (beta.abs() - alpha.abs().powi(k as i32)).abs() == 0.0,
        lambda0_re: rep.lambda0_re,
        lambda0_im: rep.lambda0_im,
        kappa_s: rep.kappa_s,
        kappa_s_closed: example52_kappa_s_closed(alpha),
        kappa_u: rep.kappa_u,
        kappa_u_closed: example52_kappa_u_closed(alpha, beta, k),
        ratio: rep.ratio,
    })
}
