//! Thin dense helpers over `faer`, plus LAPACK for the QZ algorithm.
//!
//! Vectors are plain `Vec<c64>`; all sizes here are small (tens to a few
//! hundred), so clarity wins over blocking.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

pub const EPS: f64 = f64::EPSILON;

pub fn czero() -> c64 {
    c64::new(0.0, 0.0)
}

pub fn creal(x: f64) -> c64 {
    c64::new(x, 0.0)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values()
        .map_err(|e| Error::BackendFailure(format!("svd: {e:?}")))
}

pub fn spectral_norm(m: MatRef<'_, c64>) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

pub fn smallest_singular_value(m: MatRef<'_, c64>) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// Full SVD information of a square matrix needed for null-direction
/// extraction.
#[derive(Clone, Debug)]
pub struct NullDirections {
    /// all singular values, nonincreasing
    pub sigma: Vec<f64>,
    /// left singular vector of the smallest singular value
    pub left: Vec<c64>,
    /// right singular vector of the smallest singular value
    pub right: Vec<c64>,
}

pub fn null_directions(m: MatRef<'_, c64>) -> Result<NullDirections> {
    let n = m.ncols();
    assert_eq!(m.nrows(), n, "null_directions expects a square matrix");
    let svd = m
        .svd()
        .map_err(|e| Error::BackendFailure(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let sigma: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let u = svd.U();
    let v = svd.V();
    let left = (0..n).map(|i| u[(i, n - 1)]).collect();
    let right = (0..n).map(|i| v[(i, n - 1)]).collect();
    Ok(NullDirections { sigma, left, right })
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    a.partial_piv_lu().solve(b)
}

struct Zggev {
    n: i32,
    a: Vec<c64>,
    b: Vec<c64>,
    alpha: Vec<c64>,
    beta: Vec<c64>,
    rwork: Vec<f64>,
}

impl Zggev {
    fn run(&mut self, work: &mut [c64], lwork: i32) -> i32 {
        let mut info = 0i32;
        let mut dummy = czero();
        let one = 1i32;
        // SAFETY: a, b hold n*n entries, alpha and beta n, rwork 8n, work
        // lwork; eigenvectors are not referenced. c64 matches the binding's
        // complex layout.
        unsafe {
            lapack_sys::zggev_(
                c"N".as_ptr(),
                c"N".as_ptr(),
                &self.n,
                self.a.as_mut_ptr().cast(),
                &self.n,
                self.b.as_mut_ptr().cast(),
                &self.n,
                self.alpha.as_mut_ptr().cast(),
                self.beta.as_mut_ptr().cast(),
                std::ptr::from_mut(&mut dummy).cast(),
                &one,
                std::ptr::from_mut(&mut dummy).cast(),
                &one,
                work.as_mut_ptr().cast(),
                &lwork,
                self.rwork.as_mut_ptr(),
                &mut info,
            );
        }
        info
    }
}

/// Finite-or-infinite eigenvalues of the pencil `a x = lambda b` as
/// `(alpha, beta)` pairs with `lambda = alpha / beta`, by LAPACK `zggev`.
pub fn generalized_eigenvalues(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<Vec<(c64, c64)>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let col_major = |m: MatRef<'_, c64>| -> Vec<c64> { (0..n).flat_map(|j| (0..n).map(move |i| m[(i, j)])).collect() };
    let mut z = Zggev {
        n: n as i32,
        a: col_major(a),
        b: col_major(b),
        alpha: vec![czero(); n],
        beta: vec![czero(); n],
        rwork: vec![0.0; 8 * n],
    };
    let mut query = [czero()];
    let info = z.run(&mut query, -1);
    if info != 0 {
        return Err(Error::BackendFailure(format!("zggev workspace query: info = {info}")));
    }
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![czero(); lwork];
    let info = z.run(&mut work, lwork as i32);
    if info != 0 {
        return Err(Error::BackendFailure(format!("zggev: info = {info}")));
    }
    Ok(z.alpha.into_iter().zip(z.beta).collect())
}

pub fn matvec(m: MatRef<'_, c64>, x: &[c64]) -> Vec<c64> {
    assert_eq!(m.ncols(), x.len());
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

/// `x^T y` without conjugation.
pub fn tdot(x: &[c64], y: &[c64]) -> c64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `x^T M y` without conjugation.
pub fn bilinear(x: &[c64], m: MatRef<'_, c64>, y: &[c64]) -> c64 {
    tdot(x, &matvec(m, y))
}

pub fn norm2(x: &[c64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn conj_vec(x: &[c64]) -> Vec<c64> {
    x.iter().map(|z| z.conj()).collect()
}

pub fn scale_vec(x: &[c64], s: c64) -> Vec<c64> {
    x.iter().map(|z| z * s).collect()
}

/// Outer product `x y^T` (no conjugation).
pub fn outer(x: &[c64], y: &[c64]) -> CMat {
    Mat::from_fn(x.len(), y.len(), |i, j| x[i] * y[j])
}

pub fn mat_add_scaled(a: MatRef<'_, c64>, b: MatRef<'_, c64>, s: c64) -> CMat {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + s * b[(i, j)])
}

pub fn mat_scale(a: MatRef<'_, c64>, s: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| s * a[(i, j)])
}

pub fn is_all_zero(a: MatRef<'_, c64>) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| a[(i, j)] == czero()))
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Determinant via LU; only used on small test-sized matrices.
pub fn det(a: MatRef<'_, c64>) -> c64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.to_owned();
    let mut d = creal(1.0);
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[(i, k)].norm() > m[(piv, k)].norm() {
                piv = i;
            }
        }
        if m[(piv, k)] == czero() {
            return czero();
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            d = -d;
        }
        let pivot = m[(k, k)];
        d *= pivot;
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
        }
    }
    d
}
