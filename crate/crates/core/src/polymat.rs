//! Dense matrix polynomials `P(z) = sum_i P_i z^i` over complex numbers.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, czero, CMat};

/// A matrix polynomial stored densely in the monomial basis.
///
/// `coeffs[i]` is the coefficient of `z^i`. An empty coefficient list is the
/// zero polynomial with degree `-inf`. Trailing zero coefficients are allowed
/// and kept: they carry the *structural* degree of a block, which decides how
/// many weights a block gets.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    coeffs: Vec<CMat>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, coeffs: Vec<CMat>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!(
                "matrix polynomial must have positive dimensions, got {rows}x{cols}"
            )));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if c.nrows() != rows || c.ncols() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient {i} is {}x{}, expected {rows}x{cols}",
                    c.nrows(),
                    c.ncols()
                )));
            }
        }
        Ok(Self { rows, cols, coeffs })
    }

    /// The zero polynomial (no coefficients).
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(m: CMat) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            coeffs: vec![m],
        }
    }

    /// Builds a polynomial from real row-major coefficient tables.
    pub fn from_real(rows: usize, cols: usize, coeffs: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = coeffs
            .iter()
            .map(|c| {
                if c.len() != rows || c.iter().any(|r| r.len() != cols) {
                    return Err(Error::ShapeMismatch(format!(
                        "real coefficient table is not {rows}x{cols}"
                    )));
                }
                Ok(Mat::from_fn(rows, cols, |i, j| c64::new(c[i][j], 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, mats)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    /// Coefficient of `z^i`; zero beyond the stored list.
    pub fn coeff(&self, i: usize) -> CMat {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.rows, self.cols))
    }

    /// Number of stored coefficients (structural degree + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest index with a nonzero coefficient; `None` encodes `-inf`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|c| !linalg::is_all_zero(c.as_ref()))
    }

    /// Structural degree `len - 1`; `None` for the empty list.
    pub fn structural_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Drops trailing coefficients that are exactly zero.
    pub fn normalize(&self) -> Self {
        let keep = self.degree().map_or(0, |d| d + 1);
        Self {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    /// Horner evaluation of `sum_i P_i z^i`.
    pub fn eval(&self, z: c64) -> CMat {
        let mut acc: CMat = Mat::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = Mat::from_fn(self.rows, self.cols, |i, j| acc[(i, j)] * z + c[(i, j)]);
        }
        acc
    }

    /// Horner evaluation of `sum_i i P_i z^(i-1)`.
    pub fn eval_derivative(&self, z: c64) -> CMat {
        let mut acc: CMat = Mat::zeros(self.rows, self.cols);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            let f = k as f64;
            acc = Mat::from_fn(self.rows, self.cols, |i, j| acc[(i, j)] * z + c[(i, j)] * f);
        }
        acc
    }

    /// Spectral norms of the stored coefficients.
    pub fn coeff_norms(&self) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| linalg::spectral_norm(c.as_ref()))
            .collect()
    }

    /// `sum_i ||P_i||_2 max(1,|z|)^i`, the scale used for residual tests.
    pub fn scale_at(&self, z: c64) -> Result<f64> {
        let r = z.norm().max(1.0);
        Ok(self
            .coeff_norms()?
            .iter()
            .enumerate()
            .map(|(i, n)| n * r.powi(i as i32))
            .sum())
    }

    pub fn scale(&self, s: c64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| linalg::mat_scale(c.as_ref(), s))
                .collect(),
        }
    }

    /// `self + s * other`, with structural length the max of both.
    pub fn add_scaled(&self, other: &PolyMatrix, s: c64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{} matrix polynomials",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let len = self.len().max(other.len());
        let coeffs = (0..len)
            .map(|i| linalg::mat_add_scaled(self.coeff(i).as_ref(), other.coeff(i).as_ref(), s))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            coeffs,
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<Self> {
        self.add_scaled(other, c64::new(1.0, 0.0))
    }

    /// Entry `(i, j)` of every coefficient, mainly for tests and display.
    pub fn entry_coeffs(&self, i: usize, j: usize) -> Vec<c64> {
        self.coeffs.iter().map(|c| c[(i, j)]).collect()
    }

    pub fn coeff_ref(&self, i: usize) -> Option<MatRef<'_, c64>> {
        self.coeffs.get(i).map(|c| c.as_ref())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyMatrixWire {
    rows: usize,
    cols: usize,
    coeffs: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for PolyMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                (0..self.rows)
                    .map(|i| {
                        (0..self.cols)
                            .map(|j| [c[(i, j)].re, c[(i, j)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        PolyMatrixWire {
            rows: self.rows,
            cols: self.cols,
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PolyMatrixWire::deserialize(deserializer)?;
        let mut mats = Vec::with_capacity(w.coeffs.len());
        for (k, c) in w.coeffs.iter().enumerate() {
            if c.len() != w.rows || c.iter().any(|r| r.len() != w.cols) {
                return Err(D::Error::custom(format!(
                    "coefficient {k} is not {}x{}",
                    w.rows, w.cols
                )));
            }
            mats.push(Mat::from_fn(w.rows, w.cols, |i, j| {
                c64::new(c[i][j][0], c[i][j][1])
            }));
        }
        PolyMatrix::new(w.rows, w.cols, mats).map_err(D::Error::custom)
    }
}

/// Zero matrix helper shared by block assembly code.
pub(crate) fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::from_fn(rows, cols, |_, _| czero())
}
