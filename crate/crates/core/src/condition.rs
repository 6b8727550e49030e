//! Structured and unstructured eigenvalue condition numbers.

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::SimpleZero;
use crate::error::{Error, Result};
use crate::linalg::{self, norm2};
use crate::polymat::PolyMatrix;
use crate::psm::PolySystemMatrix;

/// Per-degree nonnegative caps on the coefficient perturbations of each
/// block. An empty list means the block is not perturbed at all.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

fn structural_ones(p: &PolyMatrix) -> Vec<f64> {
    vec![1.0; p.len()]
}

impl WeightScheme {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        let w = Self { a, b, c, d };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::InvalidSpec(format!("weight {name} has invalid entry {x}")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, &Vec<f64>); 4] {
        [("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)]
    }

    /// All weights 1 up to each block's structural degree.
    pub fn uniform(s: &PolySystemMatrix) -> Self {
        Self {
            a: structural_ones(s.a()),
            b: structural_ones(s.b()),
            c: structural_ones(s.c()),
            d: structural_ones(s.d()),
        }
    }

    /// Spectral norms of the coefficients.
    pub fn relative(s: &PolySystemMatrix) -> Result<Self> {
        Ok(Self {
            a: s.a().coeff_norms()?,
            b: s.b().coeff_norms()?,
            c: s.c().coeff_norms()?,
            d: s.d().coeff_norms()?,
        })
    }

    /// Largest list length, i.e. `d + 1` for the degree `d` of the weights.
    pub fn len(&self) -> usize {
        self.named().iter().map(|(_, v)| v.len()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[[a_i, b_i], [c_i, d_i]]`, missing entries as 0.
    pub fn block(&self, i: usize) -> [[f64; 2]; 2] {
        let g = |v: &Vec<f64>| v.get(i).copied().unwrap_or(0.0);
        [[g(&self.a), g(&self.b)], [g(&self.c), g(&self.d)]]
    }

    /// Checks that no block carries more weights than coefficients.
    pub fn check_against(&self, s: &PolySystemMatrix) -> Result<()> {
        let blocks = s.blocks();
        for ((name, v), blk) in self.named().into_iter().zip(blocks) {
            if v.len() > blk.len() {
                return Err(Error::ShapeMismatch(format!(
                    "weight {name} has {} entries but the block has {} coefficients",
                    v.len(),
                    blk.len()
                )));
            }
        }
        Ok(())
    }
}

fn poly_abs(weights: &[f64], r: f64) -> f64 {
    weights.iter().rev().fold(0.0, |acc, x| acc * r + x)
}

/// `S(z)` with entries `sum_i x_i |z|^i` for the four weight lists.
pub fn s_matrix(weights: &WeightScheme, z: c64) -> [[f64; 2]; 2] {
    let r = z.norm();
    [
        [poly_abs(&weights.a, r), poly_abs(&weights.b, r)],
        [poly_abs(&weights.c, r), poly_abs(&weights.d, r)],
    ]
}

/// Structured condition number
/// `(1/K) [||w1|| ||w2||] S(lambda0) [||v1||; ||v2||]`.
pub fn kappa_s(s: &PolySystemMatrix, sz: &SimpleZero, weights: &WeightScheme) -> Result<f64> {
    weights.check_against(s)?;
    sz.check()?;
    let m = s_matrix(weights, sz.lambda0);
    let (v1, v2) = (norm2(&sz.v1), norm2(&sz.v2));
    let (w1, w2) = (norm2(&sz.w1), norm2(&sz.w2));
    Ok((w1 * (m[0][0] * v1 + m[0][1] * v2) + w2 * (m[1][0] * v1 + m[1][1] * v2)) / sz.k)
}

/// Largest singular value of a real 2x2 matrix.
pub fn sigma_max_2x2(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let fro2 = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    (0.5 * (fro2 + disc.sqrt())).sqrt()
}

/// Sharp unstructured weights `p_i = sigma_max([[a_i, b_i], [c_i, d_i]])`.
pub fn p_from_weights(weights: &WeightScheme) -> Vec<f64> {
    (0..weights.len()).map(|i| sigma_max_2x2(weights.block(i))).collect()
}

/// Unstructured condition number `||w|| ||v|| (sum_i p_i |lambda0|^i) / K`.
pub fn kappa_u(sz: &SimpleZero, p: &[f64]) -> Result<f64> {
    sz.ensure_simple()?;
    Ok(norm2(&sz.w) * norm2(&sz.v) * poly_abs(p, sz.lambda0.norm()) / sz.k)
}

/// Bundled condition numbers of one simple zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub lambda0_re: f64,
    pub lambda0_im: f64,
    #[serde(rename = "kappa_S")]
    pub kappa_s: f64,
    #[serde(rename = "kappa_U")]
    pub kappa_u: f64,
    pub p: Vec<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "S_at_lambda0")]
    pub s_at_lambda0: [[f64; 2]; 2],
    /// `kappa_U / kappa_S`, infinite when `kappa_S = 0`
    pub ratio: f64,
    #[serde(rename = "scaled_kappa_S")]
    pub scaled_kappa_s: f64,
    #[serde(rename = "scaled_kappa_U")]
    pub scaled_kappa_u: f64,
    /// set when `lambda0 = 0` and the scaled values are left unscaled
    pub unscaled_at_zero: bool,
    pub sigma_col: f64,
    pub sigma_row: f64,
    pub minimality_tol: f64,
    /// minimal, but a rank test passed within a factor 10 of its threshold
    pub marginal_minimality: bool,
}

impl ConditionReport {
    pub const CSV_HEADER: [&'static str; 6] = ["lambda0_re", "lambda0_im", "kappa_S", "kappa_U", "ratio", "K"];

    pub fn lambda0(&self) -> c64 {
        c64::new(self.lambda0_re, self.lambda0_im)
    }

    pub fn csv_row(&self) -> [f64; 6] {
        [self.lambda0_re, self.lambda0_im, self.kappa_s, self.kappa_u, self.ratio, self.k]
    }

    /// CSV row with the `|lambda0|`-scaled condition numbers.
    pub fn csv_row_scaled(&self) -> [f64; 6] {
        let ratio = if self.scaled_kappa_s == 0.0 {
            f64::INFINITY
        } else {
            self.scaled_kappa_u / self.scaled_kappa_s
        };
        [self.lambda0_re, self.lambda0_im, self.scaled_kappa_s, self.scaled_kappa_u, ratio, self.k]
    }
}

/// `kappa_S`, `kappa_U` with sharp weights, and their ratio.
pub fn analyze(s: &PolySystemMatrix, sz: &SimpleZero, weights: &WeightScheme) -> Result<ConditionReport> {
    let ks = kappa_s(s, sz, weights)?;
    let p = p_from_weights(weights);
    let ku = kappa_u(sz, &p)?;
    let r = sz.lambda0.norm();
    let (scale, unscaled_at_zero) = if r == 0.0 { (1.0, true) } else { (r, false) };
    Ok(ConditionReport {
        lambda0_re: sz.lambda0.re,
        lambda0_im: sz.lambda0.im,
        kappa_s: ks,
        kappa_u: ku,
        p,
        k: sz.k,
        s_at_lambda0: s_matrix(weights, sz.lambda0),
        ratio: if ks == 0.0 { f64::INFINITY } else { ku / ks },
        scaled_kappa_s: ks / scale,
        scaled_kappa_u: ku / scale,
        unscaled_at_zero,
        sigma_col: sz.minimality.sigma_col,
        sigma_row: sz.minimality.sigma_row,
        minimality_tol: sz.minimality.tol,
        marginal_minimality: sz.minimality.marginal(),
    })
}

/// Compares `w^T P'(lambda0) v` with `w2^T R'(lambda0) v2`, `R'` by central
/// differences; returns the difference relative to `max(1, |w^T P' v|)`.
pub fn lemma33_check(s: &PolySystemMatrix, sz: &SimpleZero) -> Result<f64> {
    let z = sz.lambda0;
    s.transfer_eval(z)?;
    let h = 1e-6 * z.norm().max(1.0);
    let rp = s.transfer_eval(z + h)?;
    let rm = s.transfer_eval(z - h)?;
    let dr = linalg::mat_scale(linalg::mat_add_scaled(rp.as_ref(), rm.as_ref(), c64::new(-1.0, 0.0)).as_ref(), c64::new(0.5 / h, 0.0));
    let lhs = linalg::bilinear(&sz.w, s.assemble().eval_derivative(z).as_ref(), &sz.v);
    let rhs = linalg::bilinear(&sz.w2, dr.as_ref(), &sz.v2);
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}
