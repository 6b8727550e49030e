//! Polynomial system matrices
//!
//! ```text
//!        [ -A(z)  B(z) ]
//! P(z) = [              ]      R(z) = D(z) + C(z) A(z)^{-1} B(z)
//!        [  C(z)  D(z) ]
//! ```
//!
//! with `A` of size `n x n` and a square `p x p` transfer function.

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, EPS};
use crate::polymat::{zeros, PolyMatrix};

/// Number of random points used by the probabilistic regularity test.
pub const REGULARITY_PROBES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PsmWire", into = "PsmWire")]
pub struct PolySystemMatrix {
    a: PolyMatrix,
    b: PolyMatrix,
    c: PolyMatrix,
    d: PolyMatrix,
}

#[derive(Serialize, Deserialize)]
struct PsmWire {
    #[serde(rename = "A")]
    a: PolyMatrix,
    #[serde(rename = "B")]
    b: PolyMatrix,
    #[serde(rename = "C")]
    c: PolyMatrix,
    #[serde(rename = "D")]
    d: PolyMatrix,
}

impl TryFrom<PsmWire> for PolySystemMatrix {
    type Error = Error;
    fn try_from(w: PsmWire) -> Result<Self> {
        PolySystemMatrix::new(w.a, w.b, w.c, w.d)
    }
}

impl From<PolySystemMatrix> for PsmWire {
    fn from(s: PolySystemMatrix) -> Self {
        PsmWire {
            a: s.a,
            b: s.b,
            c: s.c,
            d: s.d,
        }
    }
}

/// Rank diagnostics of `[-A(z); C(z)]` and `[A(z) B(z)]` at a single point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub sigma_col: f64,
    pub sigma_row: f64,
    pub minimal: bool,
    pub tol: f64,
}

impl MinimalityReport {
    /// Minimal, but one of the singular values is within a factor 10 of `tol`.
    pub fn marginal(&self) -> bool {
        self.minimal && self.sigma_col.min(self.sigma_row) <= 10.0 * self.tol
    }
}

impl PolySystemMatrix {
    /// Validates block shapes and the regularity of `A`.
    pub fn new(a: PolyMatrix, b: PolyMatrix, c: PolyMatrix, d: PolyMatrix) -> Result<Self> {
        let s = Self::new_unchecked(a, b, c, d)?;
        if !probe_regular(&s.a)? {
            return Err(Error::NotRegular("A(z)"));
        }
        Ok(s)
    }

    /// Shape checks only; skips the regularity probe. Perturbation blocks
    /// (which are typically singular) are carried in this form.
    pub fn new_unchecked(a: PolyMatrix, b: PolyMatrix, c: PolyMatrix, d: PolyMatrix) -> Result<Self> {
        let n = a.rows();
        let p = d.rows();
        let shapes = [
            ("A", &a, n, n),
            ("B", &b, n, p),
            ("C", &c, p, n),
            ("D", &d, p, p),
        ];
        for (name, blk, r, cc) in shapes {
            if blk.rows() != r || blk.cols() != cc {
                return Err(Error::ShapeMismatch(format!(
                    "block {name} is {}x{}, expected {r}x{cc} (n = {n}, p = {p})",
                    blk.rows(),
                    blk.cols()
                )));
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> &PolyMatrix {
        &self.a
    }
    pub fn b(&self) -> &PolyMatrix {
        &self.b
    }
    pub fn c(&self) -> &PolyMatrix {
        &self.c
    }
    pub fn d(&self) -> &PolyMatrix {
        &self.d
    }

    /// Size of `A`.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Size of the (square) transfer function.
    pub fn p(&self) -> usize {
        self.d.rows()
    }

    pub fn blocks(&self) -> [&PolyMatrix; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// The `(n+p) x (n+p)` matrix polynomial `[-A B; C D]`.
    pub fn assemble(&self) -> PolyMatrix {
        let (n, p) = (self.n(), self.p());
        let len = self.blocks().iter().map(|b| b.len()).max().unwrap_or(0);
        let coeffs = (0..len)
            .map(|i| {
                let (ai, bi, ci, di) = (self.a.coeff(i), self.b.coeff(i), self.c.coeff(i), self.d.coeff(i));
                Mat::from_fn(n + p, n + p, |r, s| match (r < n, s < n) {
                    (true, true) => -ai[(r, s)],
                    (true, false) => bi[(r, s - n)],
                    (false, true) => ci[(r - n, s)],
                    (false, false) => di[(r - n, s - n)],
                })
            })
            .collect();
        PolyMatrix::new(n + p, n + p, coeffs).expect("assembled blocks are conformable")
    }

    /// Default rank threshold `(n+p) eps ||M||_2` for a tested block matrix `M`.
    pub fn rank_tol(&self, norm: f64) -> f64 {
        (self.n() + self.p()) as f64 * EPS * norm
    }

    /// `R(z) = D(z) + C(z) A(z)^{-1} B(z)` via an LU solve.
    pub fn transfer_eval(&self, z: c64) -> Result<CMat> {
        let az = self.a.eval(z);
        let sv = linalg::singular_values(az.as_ref())?;
        let sigma = *sv.last().unwrap_or(&0.0);
        let tol = self.rank_tol(sv[0]);
        if sigma <= tol {
            return Err(Error::PoleOrSingular { z, sigma, tol });
        }
        let x = linalg::solve(az.as_ref(), self.b.eval(z).as_ref());
        let cz = self.c.eval(z);
        let dz = self.d.eval(z);
        let p = self.p();
        Ok(Mat::from_fn(p, p, |i, j| {
            dz[(i, j)] + (0..self.n()).map(|k| cz[(i, k)] * x[(k, j)]).sum::<c64>()
        }))
    }

    /// Local minimality test at `z`. With `tol = None` the default
    /// `(n+p) eps max(||[-A; C]||, ||[A B]||)` threshold is used.
    pub fn minimality_at(&self, z: c64, tol: Option<f64>) -> Result<MinimalityReport> {
        let (n, p) = (self.n(), self.p());
        let az = self.a.eval(z);
        let bz = self.b.eval(z);
        let cz = self.c.eval(z);
        let col = Mat::from_fn(n + p, n, |r, s| if r < n { -az[(r, s)] } else { cz[(r - n, s)] });
        let row = Mat::from_fn(n, n + p, |r, s| if s < n { az[(r, s)] } else { bz[(r, s - n)] });
        let sv_col = linalg::singular_values(col.as_ref())?;
        let sv_row = linalg::singular_values(row.as_ref())?;
        let sigma_col = *sv_col.last().unwrap_or(&0.0);
        let sigma_row = *sv_row.last().unwrap_or(&0.0);
        let tol = tol.unwrap_or_else(|| self.rank_tol(sv_col[0].max(sv_row[0])));
        Ok(MinimalityReport {
            sigma_col,
            sigma_row,
            minimal: sigma_col > tol && sigma_row > tol,
            tol,
        })
    }

    /// Blockwise `self + eps * delta` (the stored `-A` block picks up `-eps dA`).
    pub fn add_scaled(&self, delta: &PolySystemMatrix, eps: f64) -> Result<Self> {
        if delta.n() != self.n() || delta.p() != self.p() {
            return Err(Error::ShapeMismatch(format!(
                "perturbation has n = {}, p = {}; system has n = {}, p = {}",
                delta.n(),
                delta.p(),
                self.n(),
                self.p()
            )));
        }
        let e = c64::new(eps, 0.0);
        Ok(Self {
            a: self.a.add_scaled(&delta.a, e)?,
            b: self.b.add_scaled(&delta.b, e)?,
            c: self.c.add_scaled(&delta.c, e)?,
            d: self.d.add_scaled(&delta.d, e)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Probabilistic regularity test: `det P(z)` is taken to be nonzero when
/// `P(z)` has a non-negligible smallest singular value at one or more of
/// [`REGULARITY_PROBES`] fixed pseudo-random points.
pub fn probe_regular(poly: &PolyMatrix) -> Result<bool> {
    if poly.rows() != poly.cols() {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0005_eed0_fa11);
    for _ in 0..REGULARITY_PROBES {
        let z = c64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let sv = linalg::singular_values(poly.eval(z).as_ref())?;
        let (smax, smin) = (sv[0], *sv.last().unwrap());
        if smax > 0.0 && smin > 1e3 * poly.rows() as f64 * EPS * smax {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Block-diagonal helper: a polynomial `n x n` identity-coupling block.
pub fn identity_block(n: usize) -> PolyMatrix {
    PolyMatrix::constant(Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    }))
}

/// Zero block with a single (zero) structural coefficient.
pub fn zero_constant_block(rows: usize, cols: usize) -> PolyMatrix {
    PolyMatrix::constant(zeros(rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{creal, max_abs, max_abs_diff};
    use crate::models;
    use rand::Rng;

    fn example29() -> PolySystemMatrix {
        models::example29_psm()
    }

    #[test]
    fn assemble_example29() {
        let p = example29().assemble();
        assert_eq!(p.len(), 2);
        let expected0 = [[-1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
        let expected1 = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.coeffs()[0][(i, j)], creal(expected0[i][j]));
                assert_eq!(p.coeffs()[1][(i, j)], creal(expected1[i][j]));
            }
        }
    }

    #[test]
    fn assemble_block_diagonal_when_couplings_vanish() {
        let a = PolyMatrix::from_real(2, 2, &[
            vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        let d = PolyMatrix::from_real(1, 1, &[vec![vec![3.0]]]).unwrap();
        let s = PolySystemMatrix::new(a, PolyMatrix::zero(2, 1), PolyMatrix::zero(1, 2), d).unwrap();
        let p = s.assemble();
        assert_eq!(p.degree(), Some(2));
        for c in p.coeffs() {
            assert_eq!(c[(0, 2)], creal(0.0));
            assert_eq!(c[(2, 0)], creal(0.0));
        }
        assert_eq!(p.coeffs()[0][(2, 2)], creal(3.0));
    }

    #[test]
    fn assemble_example52_k2() {
        let s = models::example52(2.0, 3.0, 2).unwrap();
        let p = s.assemble();
        assert_eq!((p.rows(), p.degree()), (4, Some(2)));
        // row 2 = [C row 0 | D row 0] = [z - 2, 0, 0, 0]
        assert_eq!(p.entry_coeffs(2, 0), vec![creal(-2.0), creal(1.0), creal(0.0)]);
        // -A block: -[[z^2, 3], [3, z^2]]
        assert_eq!(p.entry_coeffs(0, 1), vec![creal(-3.0), creal(0.0), creal(0.0)]);
        assert_eq!(p.entry_coeffs(1, 1), vec![creal(0.0), creal(0.0), creal(-1.0)]);
        assert_eq!(p.entry_coeffs(0, 2)[0], creal(1.0));
    }

    #[test]
    fn transfer_of_example_realization_at_two() {
        // R(z) = [[1, 0], [1/(z-1), 1]]
        for s in [models::example24_psm(), example29()] {
            let r = s.transfer_eval(creal(2.0)).unwrap();
            let expected = [[1.0, 0.0], [1.0, 1.0]];
            for i in 0..2 {
                for j in 0..2 {
                    assert!((r[(i, j)] - creal(expected[i][j])).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn transfer_at_pole_is_rejected() {
        let err = example29().transfer_eval(creal(1.0)).unwrap_err();
        assert!(matches!(err, Error::PoleOrSingular { .. }));
    }

    #[test]
    fn transfer_with_zero_b_is_d() {
        let a = PolyMatrix::from_real(1, 1, &[vec![vec![2.0]], vec![vec![1.0]]]).unwrap();
        let d = PolyMatrix::from_real(2, 2, &[
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            vec![vec![0.5, 0.0], vec![0.0, -1.0]],
        ])
        .unwrap();
        let c = PolyMatrix::from_real(2, 1, &[vec![vec![1.0], vec![1.0]]]).unwrap();
        let s = PolySystemMatrix::new(a, PolyMatrix::zero(1, 2), c, d.clone()).unwrap();
        let z = c64::new(0.4, -1.1);
        let r = s.transfer_eval(z).unwrap();
        assert!(max_abs_diff(r.as_ref(), d.eval(z).as_ref()) < 1e-15);
    }

    #[test]
    fn transfer_example52_matches_explicit_inverse() {
        let (alpha, beta, k) = (2.0, 3.0, 2u32);
        let s = models::example52(alpha, beta, k as usize).unwrap();
        let z = c64::new(0.7, 0.4);
        let zk = z.powu(k);
        let det = zk * zk - beta * beta;
        // inv(A) = [[z^k, -b], [-b, z^k]] / det ; R = C inv(A) B with B = I, D = 0
        let inv = [[zk / det, -beta / det], [-beta / det, zk / det]];
        let cdiag = [z - alpha, creal(1.0)];
        let r = s.transfer_eval(z).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = cdiag[i] * inv[i][j];
                assert!((r[(i, j)] - expected).norm() < 1e-14 * (1.0 + expected.norm()));
            }
        }
    }

    #[test]
    fn minimality_examples() {
        let m = example29().minimality_at(creal(1.0), None).unwrap();
        assert!(m.minimal, "{m:?}");

        let n = 3;
        let a = PolyMatrix::from_real(n, n, &[
            vec![vec![1.0, 0.5, 0.0], vec![0.0, -1.0, 0.2], vec![0.0, 0.0, 2.0]],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        ])
        .unwrap();
        let s = PolySystemMatrix::new(a, identity_block(n), identity_block(n), identity_block(n)).unwrap();
        for z in [creal(-1.0), creal(1.0), c64::new(0.3, 2.0)] {
            assert!(s.minimality_at(z, None).unwrap().minimal);
        }

        // A = diag(z, 1), C = 0: [-A(0); 0] loses rank
        let a = PolyMatrix::from_real(2, 2, &[
            vec![vec![0.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        ])
        .unwrap();
        let b = PolyMatrix::from_real(2, 1, &[vec![vec![1.0], vec![1.0]]]).unwrap();
        let c = PolyMatrix::from_real(1, 2, &[vec![vec![0.0, 0.0]]]).unwrap();
        let d = PolyMatrix::from_real(1, 1, &[vec![vec![1.0]]]).unwrap();
        let s = PolySystemMatrix::new(a, b, c, d).unwrap();
        let m = s.minimality_at(creal(0.0), None).unwrap();
        assert!(!m.minimal);
        assert!(m.sigma_col < 1e-15);
        assert!(m.sigma_row > 0.5);
    }

    #[test]
    fn singular_a_is_rejected() {
        let a = PolyMatrix::from_real(2, 2, &[vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![vec![1.0, 1.0], vec![1.0, 1.0]]]).unwrap();
        let err = PolySystemMatrix::new(a, PolyMatrix::zero(2, 1), PolyMatrix::zero(1, 2), identity_block(1)).unwrap_err();
        assert!(matches!(err, Error::NotRegular(_)));
    }

    #[test]
    fn bad_block_shape_is_rejected() {
        let err = PolySystemMatrix::new(identity_block(2), PolyMatrix::zero(2, 2), PolyMatrix::zero(1, 2), identity_block(1))
            .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn schur_determinant_identity_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for t in 0..30 {
            let s = models::random_psm(1000 + t, 3, 2, 2).unwrap();
            let z = c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let lhs = linalg::det(s.assemble().eval(z).as_ref());
            let minus_a = linalg::mat_scale(s.a().eval(z).as_ref(), creal(-1.0));
            let rhs = linalg::det(minus_a.as_ref()) * linalg::det(s.transfer_eval(z).unwrap().as_ref());
            let err = (lhs.norm().ln() - rhs.norm().ln()).abs();
            assert!(err < 1e-8, "log-magnitude mismatch {err}");
            assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm());
        }
    }

    #[test]
    fn loaded_string_realizations_share_transfer_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r2 = models::loaded_string(models::LoadedStringRep::Rep2, 10, 7.0, 2.0).unwrap();
        let r4 = models::loaded_string(models::LoadedStringRep::Rep4, 10, 7.0, 2.0).unwrap();
        for _ in 0..20 {
            let z = c64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let a = r2.transfer_eval(z).unwrap();
            let b = r4.transfer_eval(z).unwrap();
            assert!(max_abs_diff(a.as_ref(), b.as_ref()) <= 1e-12 * max_abs(a.as_ref()));
        }
    }

    #[test]
    fn json_roundtrip_and_rejects_bad_shapes() {
        let s = example29();
        let js = s.to_json().unwrap();
        assert!(js.contains("\"A\""));
        assert_eq!(PolySystemMatrix::from_json(&js).unwrap(), s);
        let bad = r#"{"A":{"rows":1,"cols":1,"coeffs":[[[[1,0]]]]},
                     "B":{"rows":1,"cols":2,"coeffs":[]},
                     "C":{"rows":2,"cols":1,"coeffs":[]},
                     "D":{"rows":3,"cols":3,"coeffs":[]}}"#;
        assert!(matches!(PolySystemMatrix::from_json(bad), Err(Error::Parse(_))));
    }
}
