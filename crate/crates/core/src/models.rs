//! Example problems: the small illustrative realizations, the parametric
//! family with closed-form condition numbers, the damped vibration model with
//! random data, and the NLEVP loaded string.

use std::collections::BTreeMap;

use clap::ValueEnum;
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::condition::WeightScheme;
use crate::error::{Error, Result};
use crate::linalg::{creal, CMat};
use crate::polymat::{zeros, PolyMatrix};
use crate::psm::{identity_block, zero_constant_block, PolySystemMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelName {
    DampedVibrationRep1,
    DampedVibrationRep3,
    LoadedStringRep2,
    LoadedStringRep4,
    Example52,
    Example24Psm,
    Example29Psm,
}

impl ModelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::DampedVibrationRep1 => "damped_vibration_rep1",
            ModelName::DampedVibrationRep3 => "damped_vibration_rep3",
            ModelName::LoadedStringRep2 => "loaded_string_rep2",
            ModelName::LoadedStringRep4 => "loaded_string_rep4",
            ModelName::Example52 => "example52",
            ModelName::Example24Psm => "example24_psm",
            ModelName::Example29Psm => "example29_psm",
        }
    }
}

impl std::fmt::Display for ModelName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optional model parameters; which ones are required depends on the name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: ModelName,
    #[serde(default)]
    pub params: ModelParams,
}

fn need<T: Copy>(v: Option<T>, what: &str, name: ModelName) -> Result<T> {
    v.ok_or_else(|| Error::InvalidSpec(format!("model {name} needs parameter {what}")))
}

fn integral(x: f64, what: &str, name: ModelName) -> Result<usize> {
    if x >= 1.0 && x.fract() == 0.0 && x < u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::InvalidSpec(format!("model {name}: {what} = {x} must be an integer >= 1")))
    }
}

impl ModelSpec {
    pub fn new(name: ModelName, params: ModelParams) -> Self {
        Self { name, params }
    }

    pub fn damped_vibration(name: ModelName, n: usize, k: usize, seed: u64) -> Self {
        Self::new(name, ModelParams {
            n: Some(n),
            k: Some(k as f64),
            seed: Some(seed),
            ..Default::default()
        })
    }

    pub fn loaded_string(name: ModelName, n: usize, k: f64, m: f64) -> Self {
        Self::new(name, ModelParams {
            n: Some(n),
            k: Some(k),
            m: Some(m),
            ..Default::default()
        })
    }

    pub fn example52(alpha: f64, beta: f64, k: usize) -> Self {
        Self::new(ModelName::Example52, ModelParams {
            alpha: Some(alpha),
            beta: Some(beta),
            k: Some(k as f64),
            ..Default::default()
        })
    }

    /// Fills unset parameters with the desk-scale defaults.
    pub fn with_defaults(mut self) -> Self {
        let p = &mut self.params;
        match self.name {
            ModelName::DampedVibrationRep1 | ModelName::DampedVibrationRep3 => {
                p.n.get_or_insert(20);
                p.k.get_or_insert(2.0);
                p.seed.get_or_insert(0);
            }
            ModelName::LoadedStringRep2 | ModelName::LoadedStringRep4 => {
                p.n.get_or_insert(10);
                p.k.get_or_insert(1.0);
                p.m.get_or_insert(1.0);
            }
            ModelName::Example52 => {
                p.alpha.get_or_insert(2.0);
                p.beta.get_or_insert(3.0);
                p.k.get_or_insert(2.0);
            }
            ModelName::Example24Psm | ModelName::Example29Psm => {}
        }
        self
    }

    pub fn build(&self) -> Result<PolySystemMatrix> {
        let p = &self.params;
        let name = self.name;
        let positive_n = |n: usize| {
            if n >= 1 {
                Ok(n)
            } else {
                Err(Error::InvalidSpec(format!("model {name} needs n >= 1")))
            }
        };
        match name {
            ModelName::DampedVibrationRep1 | ModelName::DampedVibrationRep3 => {
                let n = positive_n(need(p.n, "n", name)?)?;
                let k = integral(need(p.k, "k", name)?, "k", name)?;
                let seed = need(p.seed, "seed", name)?;
                let rep = if name == ModelName::DampedVibrationRep1 {
                    DampedVibrationRep::Rep1
                } else {
                    DampedVibrationRep::Rep3
                };
                damped_vibration(rep, &DampedVibrationData::random(n, k, seed))
            }
            ModelName::LoadedStringRep2 | ModelName::LoadedStringRep4 => {
                let n = positive_n(need(p.n, "n", name)?)?;
                let rep = if name == ModelName::LoadedStringRep2 {
                    LoadedStringRep::Rep2
                } else {
                    LoadedStringRep::Rep4
                };
                loaded_string(rep, n, need(p.k, "k", name)?, need(p.m, "m", name)?)
            }
            ModelName::Example52 => {
                let k = integral(need(p.k, "k", name)?, "k", name)?;
                example52(need(p.alpha, "alpha", name)?, need(p.beta, "beta", name)?, k)
            }
            ModelName::Example24Psm => Ok(example24_psm()),
            ModelName::Example29Psm => Ok(example29_psm()),
        }
    }

    /// Parameters as a flat map, for metadata sidecars.
    pub fn param_map(&self) -> BTreeMap<String, serde_json::Value> {
        match serde_json::to_value(&self.params) {
            Ok(serde_json::Value::Object(m)) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        }
    }
}

/// Weights that perturb only the data of the damped vibration model.
pub fn data_only_weights(spec: &ModelSpec) -> Result<WeightScheme> {
    match spec.name {
        ModelName::DampedVibrationRep1 => WeightScheme::new(vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0], vec![1.0, 1.0]),
        ModelName::DampedVibrationRep3 => WeightScheme::new(vec![1.0, 0.0], vec![1.0], vec![0.0, 0.0, 0.0], vec![1.0, 1.0]),
        other => Err(Error::InvalidSpec(format!("data-only weights are defined for the damped vibration model, not {other}"))),
    }
}

/// Uniform weights with `d_0 = 0`, the choice used with [`example52`].
pub fn example52_weights(s: &PolySystemMatrix) -> WeightScheme {
    let mut w = WeightScheme::uniform(s);
    w.d = vec![0.0; w.d.len()];
    w
}

/// Sharp weight `p_i` of [`example52_weights`] in closed form.
pub fn example52_p(i: usize) -> f64 {
    match i {
        0 => 0.5 * (1.0 + 5f64.sqrt()),
        1 => 2f64.sqrt(),
        _ => 1.0,
    }
}

fn real(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> CMat {
    Mat::from_fn(rows, cols, |i, j| creal(f(i, j)))
}

fn eye(n: usize) -> CMat {
    real(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
}

fn poly(coeffs: Vec<CMat>) -> PolyMatrix {
    let (r, c) = (coeffs[0].nrows(), coeffs[0].ncols());
    PolyMatrix::new(r, c, coeffs).expect("model coefficients share a shape")
}

/// `R(z) = [[1, 0], [1/(z-1), 1]]` realized with `A = z - 1`.
pub fn example24_psm() -> PolySystemMatrix {
    let a = poly(vec![real(1, 1, |_, _| -1.0), real(1, 1, |_, _| 1.0)]);
    let b = poly(vec![real(1, 2, |_, j| if j == 0 { 1.0 } else { 0.0 })]);
    let c = poly(vec![real(2, 1, |i, _| if i == 1 { 1.0 } else { 0.0 })]);
    PolySystemMatrix::new(a, b, c, identity_block(2)).expect("valid example")
}

/// The same `R` realized with `A = 1 - z`, minimal at the zero-pole `z = 1`.
pub fn example29_psm() -> PolySystemMatrix {
    let a = poly(vec![real(1, 1, |_, _| 1.0), real(1, 1, |_, _| -1.0)]);
    let b = poly(vec![real(1, 2, |_, j| if j == 0 { 1.0 } else { 0.0 })]);
    let c = poly(vec![real(2, 1, |i, _| if i == 1 { -1.0 } else { 0.0 })]);
    PolySystemMatrix::new(a, b, c, identity_block(2)).expect("valid example")
}

/// `A = [[z^k, beta], [beta, z^k]]`, `B = I`, `C = diag(z - alpha, 1)`, `D = 0`.
pub fn example52(alpha: f64, beta: f64, k: usize) -> Result<PolySystemMatrix> {
    if k == 0 {
        return Err(Error::InvalidSpec("example52 needs k >= 1".into()));
    }
    let mut a = vec![zeros(2, 2); k + 1];
    a[0] = real(2, 2, |i, j| if i != j { beta } else { 0.0 });
    a[k] = eye(2);
    let c = vec![
        real(2, 2, |i, j| match (i, j) {
            (0, 0) => -alpha,
            (1, 1) => 1.0,
            _ => 0.0,
        }),
        real(2, 2, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 }),
    ];
    PolySystemMatrix::new(poly(a), identity_block(2), poly(c), zero_constant_block(2, 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadedStringRep {
    /// `R = A - z B + z e_n (z - k/m)^{-1} k e_n^T`
    Rep2,
    /// `R = A - z B + k z e_n (z - k/m)^{-1} e_n^T`
    Rep4,
}

/// NLEVP `loaded_string` stiffness and mass matrices with `h = 1/n`.
pub fn loaded_string_matrices(n: usize) -> (CMat, CMat) {
    let h = 1.0 / n as f64;
    let stiff = real(n, n, |i, j| {
        if i == j {
            if i == n - 1 { 1.0 / h } else { 2.0 / h }
        } else if i.abs_diff(j) == 1 {
            -1.0 / h
        } else {
            0.0
        }
    });
    let mass = real(n, n, |i, j| {
        if i == j {
            if i == n - 1 { h / 3.0 } else { 4.0 * h / 6.0 }
        } else if i.abs_diff(j) == 1 {
            h / 6.0
        } else {
            0.0
        }
    });
    (stiff, mass)
}

/// The loaded string `R(z) = A - z B + k z / (z - k/m) e_n e_n^T`.
pub fn loaded_string(rep: LoadedStringRep, n: usize, k: f64, m: f64) -> Result<PolySystemMatrix> {
    if n == 0 || !(k.is_finite() && m.is_finite()) || m == 0.0 {
        return Err(Error::InvalidSpec(format!("loaded string needs n >= 1 and finite k, nonzero m (n = {n}, k = {k}, m = {m})")));
    }
    let (stiff, mass) = loaded_string_matrices(n);
    let en_row = |s: f64| real(1, n, |_, j| if j == n - 1 { s } else { 0.0 });
    let en_col = |s: f64| real(n, 1, |i, _| if i == n - 1 { s } else { 0.0 });
    let a = poly(vec![real(1, 1, |_, _| -k / m), eye(1)]);
    let (b, c) = match rep {
        LoadedStringRep::Rep2 => (poly(vec![en_row(k)]), poly(vec![zeros(n, 1), en_col(1.0)])),
        LoadedStringRep::Rep4 => (poly(vec![en_row(1.0)]), poly(vec![zeros(n, 1), en_col(k)])),
    };
    let d = poly(vec![stiff, Mat::from_fn(n, n, |i, j| -mass[(i, j)])]);
    PolySystemMatrix::new(a, b, c, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DampedVibrationRep {
    /// `B` stacks `z C_i`, `C = [z I ... z I]`
    Rep1,
    /// `B` stacks `C_i`, `C = [z^2 I ... z^2 I]`
    Rep3,
}

/// Random data of `R(z) = -K + z M + z^2 sum_i C_i / (w_i - z)`.
#[derive(Clone, Debug)]
pub struct DampedVibrationData {
    pub stiffness: CMat,
    pub mass: CMat,
    pub c: Vec<CMat>,
    pub poles: Vec<f64>,
}

impl DampedVibrationData {
    /// Standard normal entries drawn in the order `K`, `M`, `C_1..C_k`, poles.
    pub fn random(n: usize, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = |rows, cols| -> CMat {
            Mat::from_fn(rows, cols, |_, _| {
                let x: f64 = StandardNormal.sample(&mut rng);
                creal(x)
            })
        };
        let stiffness = gauss(n, n);
        let mass = gauss(n, n);
        let c = (0..k).map(|_| gauss(n, n)).collect();
        let poles = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self { stiffness, mass, c, poles }
    }

    pub fn n(&self) -> usize {
        self.stiffness.nrows()
    }
}

pub fn damped_vibration(rep: DampedVibrationRep, data: &DampedVibrationData) -> Result<PolySystemMatrix> {
    let n = data.n();
    let k = data.c.len();
    if n == 0 || k == 0 {
        return Err(Error::InvalidSpec("damped vibration needs n >= 1 and k >= 1".into()));
    }
    let nk = n * k;
    let a = poly(vec![
        real(nk, nk, |i, j| if i == j { data.poles[i / n] } else { 0.0 }),
        real(nk, nk, |i, j| if i == j { -1.0 } else { 0.0 }),
    ]);
    let stacked = Mat::from_fn(nk, n, |i, j| data.c[i / n][(i % n, j)]);
    let ones_row = real(n, nk, |i, j| if j % n == i { 1.0 } else { 0.0 });
    let (b, c) = match rep {
        DampedVibrationRep::Rep1 => (poly(vec![zeros(nk, n), stacked]), poly(vec![zeros(n, nk), ones_row])),
        DampedVibrationRep::Rep3 => (poly(vec![stacked]), poly(vec![zeros(n, nk), zeros(n, nk), ones_row])),
    };
    let d = poly(vec![
        Mat::from_fn(n, n, |i, j| -data.stiffness[(i, j)]),
        data.mass.clone(),
    ]);
    PolySystemMatrix::new(a, b, c, d)
}

/// Random PSM with complex Gaussian coefficients: `A` of degree exactly
/// `deg >= 1`, the other blocks of random degree in `0..=deg`.
pub fn random_psm(seed: u64, n: usize, p: usize, deg: usize) -> Result<PolySystemMatrix> {
    if n == 0 || p == 0 || deg == 0 {
        return Err(Error::InvalidSpec(format!("random_psm needs n, p, deg >= 1 (got {n}, {p}, {deg})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block = |rng: &mut ChaCha8Rng, rows: usize, cols: usize, len: usize| -> PolyMatrix {
        let coeffs = (0..len)
            .map(|_| {
                Mat::from_fn(rows, cols, |_, _| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    c64::new(re, im)
                })
            })
            .collect();
        PolyMatrix::new(rows, cols, coeffs).expect("shapes match")
    };
    let a = block(&mut rng, n, n, deg + 1);
    let lens: [usize; 3] = std::array::from_fn(|_| rng.random_range(1..=deg + 1));
    let b = block(&mut rng, n, p, lens[0]);
    let c = block(&mut rng, p, n, lens[1]);
    let d = block(&mut rng, p, p, lens[2]);
    PolySystemMatrix::new(a, b, c, d)
}
