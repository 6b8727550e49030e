//! Finite eigenvalues and eigenvectors of regular matrix polynomials.
//!
//! Eigenvalues come from a QZ solve of the first companion pencil. Each one
//! is then polished by a few Newton steps on the smallest singular value of
//! `P(z)`, and the eigenvectors are read off one SVD of `P(lambda0)`.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, EPS};
use crate::polymat::{zeros, PolyMatrix};
use crate::psm::{MinimalityReport, PolySystemMatrix};

/// Relative threshold for the simplicity test on `K` and `sigma2_gap`.
pub const SIMPLE_TOL: f64 = 1e-10;

/// Maximum number of Newton polishing steps per eigenvalue.
pub const NEWTON_STEPS: usize = 3;

/// Which eigenvalue(s) of `P` a command works on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    /// Largest finite eigenvalue in magnitude where the realization is minimal.
    Largest,
    /// Finite eigenvalue closest to the given point.
    Nearest(c64),
    All,
}

/// The companion pencil `z M1 + M0` of a matrix polynomial of degree `d >= 1`.
pub fn companion_pencil(p: &PolyMatrix) -> Result<(CMat, CMat)> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::DegreeZero),
    };
    if p.rows() != p.cols() {
        return Err(Error::ShapeMismatch(format!(
            "companion pencil needs a square polynomial, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let s = p.rows();
    let size = s * d;
    let mut m0 = zeros(size, size);
    let mut m1 = zeros(size, size);
    let lead = p.coeff(d);
    for i in 0..size {
        for j in 0..size {
            let (bi, bj) = (i / s, j / s);
            let (ri, rj) = (i % s, j % s);
            if bi == 0 && bj == 0 {
                m1[(i, j)] = lead[(ri, rj)];
            } else if bi == bj && ri == rj {
                m1[(i, j)] = c64::new(1.0, 0.0);
            }
            if bi == 0 {
                m0[(i, j)] = p.coeffs()[d - 1 - bj][(ri, rj)];
            } else if bj + 1 == bi && ri == rj {
                m0[(i, j)] = c64::new(-1.0, 0.0);
            }
        }
    }
    Ok((m0, m1))
}

fn fro(m: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Finite eigenvalues of `P`, in backend order.
///
/// Pencil eigenvalues `alpha / beta` are dropped as infinite when `beta`
/// vanishes relative to the pencil scale or when `|lambda|` exceeds
/// `max(1, ||M0||) max(1, ||M1||) / sqrt(eps)`.
pub fn eigenvalues(p: &PolyMatrix) -> Result<Vec<c64>> {
    let (m0, m1) = companion_pencil(p)?;
    let size = m0.nrows();
    let neg_m0 = Mat::from_fn(size, size, |i, j| -m0[(i, j)]);
    let pairs = linalg::generalized_eigenvalues(neg_m0.as_ref(), m1.as_ref())?;
    let (n0, n1) = (fro(&m0), fro(&m1));
    let beta_tol = 10.0 * size as f64 * EPS * n1;
    let cutoff = n0.max(1.0) * n1.max(1.0) / EPS.sqrt();
    Ok(pairs
        .into_iter()
        .filter(|(alpha, beta)| beta.norm() > beta_tol && beta.norm() > EPS * alpha.norm())
        .map(|(alpha, beta)| alpha / beta)
        .filter(|z| z.re.is_finite() && z.im.is_finite() && z.norm() <= cutoff)
        .collect())
}

/// Finite eigenvalue closest to `target`; ties go to the first in backend order.
pub fn nearest_eigenvalue(p: &PolyMatrix, target: c64) -> Result<c64> {
    let ev = eigenvalues(p)?;
    nearest_in(&ev, target)
        .map(|i| ev[i])
        .ok_or(Error::NoFiniteEigenvalues)
}

pub(crate) fn nearest_in(ev: &[c64], target: c64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, z) in ev.iter().enumerate() {
        let d = (z - target).norm();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// An approximate eigenvalue of `P` with null directions from one SVD.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: c64,
    /// unit right null direction, `P(lambda) v ~ 0`
    pub v: Vec<c64>,
    /// unit left null direction in the transpose sense, `w^T P(lambda) ~ 0`
    pub w: Vec<c64>,
    /// `w^T P'(lambda) v`
    pub wdpv: c64,
    pub sigma_min: f64,
    pub sigma2_gap: f64,
    /// `sum_i ||P_i|| max(1, |lambda|)^i`
    pub scale: f64,
    /// `sum_i i |lambda|^(i-1) |w|^T |P_i| |v|`, the size `K` is measured against
    pub kscale: f64,
}

impl EigenPair {
    /// `|w^T P'(lambda) v|`.
    pub fn k(&self) -> f64 {
        self.wdpv.norm()
    }

    pub fn simple_tol(&self) -> f64 {
        SIMPLE_TOL * linalg::norm2(&self.v) * linalg::norm2(&self.w) * self.scale
    }

    pub fn k_tol(&self) -> f64 {
        SIMPLE_TOL * self.kscale
    }

    pub fn is_simple(&self) -> bool {
        self.k() > self.k_tol() && self.sigma2_gap > self.simple_tol()
    }

    pub fn ensure_simple(&self) -> Result<()> {
        if self.is_simple() {
            Ok(())
        } else {
            Err(Error::NotSimple {
                k: self.k(),
                k_tol: self.k_tol(),
                sigma2: self.sigma2_gap,
                tol: self.simple_tol(),
            })
        }
    }

    pub fn residual_right(&self, p: &PolyMatrix) -> f64 {
        linalg::norm2(&linalg::matvec(p.eval(self.lambda).as_ref(), &self.v))
    }

    pub fn residual_left(&self, p: &PolyMatrix) -> f64 {
        let pz = p.eval(self.lambda);
        linalg::norm2(&linalg::matvec(pz.transpose(), &self.w))
    }
}

/// `sum_i i |z|^(i-1) |w|^T |P_i| |v|`.
pub fn derivative_scale(p: &PolyMatrix, z: c64, v: &[c64], w: &[c64]) -> f64 {
    let r = z.norm();
    (1..p.len())
        .map(|i| {
            let c = p.coeff(i);
            let mut t = 0.0;
            for (a, wa) in w.iter().enumerate() {
                for (b, vb) in v.iter().enumerate() {
                    t += wa.norm() * c[(a, b)].norm() * vb.norm();
                }
            }
            i as f64 * r.powi(i as i32 - 1) * t
        })
        .sum()
}

/// Null directions of `P(lambda)` at a given point, without refinement.
pub fn pair_at(p: &PolyMatrix, lambda: c64) -> Result<EigenPair> {
    let nd = linalg::null_directions(p.eval(lambda).as_ref())?;
    let s = nd.sigma.len();
    let v = nd.right;
    let w = linalg::conj_vec(&nd.left);
    let wdpv = linalg::bilinear(&w, p.eval_derivative(lambda).as_ref(), &v);
    Ok(EigenPair {
        lambda,
        wdpv,
        sigma_min: nd.sigma[s - 1],
        sigma2_gap: if s >= 2 { nd.sigma[s - 2] } else { f64::INFINITY },
        scale: p.scale_at(lambda)?,
        kscale: derivative_scale(p, lambda, &v, &w),
        v,
        w,
    })
}

/// Newton polishing of an approximate eigenvalue.
///
/// Each step is `z <- z - w^T P(z) v / w^T P'(z) v` with `v`, `w` the current
/// null directions, and is kept only while `sigma_min / scale` decreases.
pub fn refine(p: &PolyMatrix, lambda: c64, steps: usize) -> Result<EigenPair> {
    let mut best = pair_at(p, lambda)?;
    for _ in 0..steps {
        if best.sigma_min == 0.0 || best.wdpv == linalg::czero() {
            break;
        }
        let r = linalg::bilinear(&best.w, p.eval(best.lambda).as_ref(), &best.v);
        let next = best.lambda - r / best.wdpv;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        let cand = pair_at(p, next)?;
        if cand.sigma_min / cand.scale < best.sigma_min / best.scale {
            best = cand;
        } else {
            break;
        }
    }
    Ok(best)
}

/// All finite eigenpairs of `P`, refined, in backend order.
pub fn eigenpairs(p: &PolyMatrix) -> Result<Vec<EigenPair>> {
    let ev = eigenvalues(p)?;
    if ev.is_empty() {
        return Err(Error::NoFiniteEigenvalues);
    }
    ev.into_iter().map(|z| refine(p, z, NEWTON_STEPS)).collect()
}

/// Indices of `ev` picked by `target`. Ties in magnitude, such as conjugate
/// pairs, go to the largest imaginary part.
pub fn select(ev: &[c64], target: &Target) -> Vec<usize> {
    match target {
        Target::All => (0..ev.len()).collect(),
        Target::Nearest(z) => nearest_in(ev, *z).into_iter().collect(),
        Target::Largest => {
            let top = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let near_top = |z: &c64| z.norm() >= top * (1.0 - 1e-10);
            ev.iter()
                .enumerate()
                .filter(|(_, z)| near_top(z))
                .max_by(|(_, a), (_, b)| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i)
                .into_iter()
                .collect()
        }
    }
}

/// A candidate simple zero of the transfer function, as an eigenpair of the
/// assembled system matrix with its block partition.
#[derive(Clone, Debug)]
pub struct SimpleZero {
    pub lambda0: c64,
    pub v: Vec<c64>,
    pub w: Vec<c64>,
    pub v1: Vec<c64>,
    pub v2: Vec<c64>,
    pub w1: Vec<c64>,
    pub w2: Vec<c64>,
    /// `|w^T P'(lambda0) v|`
    pub k: f64,
    pub wdpv: c64,
    pub sigma_min: f64,
    pub sigma2_gap: f64,
    pub scale: f64,
    pub kscale: f64,
    pub minimality: MinimalityReport,
}

impl SimpleZero {
    /// Partitions an eigenpair of `s.assemble()` and runs the minimality test.
    /// No error is raised for non-minimal or non-simple pairs; see
    /// [`SimpleZero::check`].
    pub fn from_pair(s: &PolySystemMatrix, pair: &EigenPair) -> Result<Self> {
        let n = s.n();
        if pair.v.len() != n + s.p() {
            return Err(Error::ShapeMismatch(format!(
                "eigenvector has length {}, system matrix has size {}",
                pair.v.len(),
                n + s.p()
            )));
        }
        let minimality = s.minimality_at(pair.lambda, None)?;
        Ok(Self {
            lambda0: pair.lambda,
            v1: pair.v[..n].to_vec(),
            v2: pair.v[n..].to_vec(),
            w1: pair.w[..n].to_vec(),
            w2: pair.w[n..].to_vec(),
            v: pair.v.clone(),
            w: pair.w.clone(),
            k: pair.k(),
            wdpv: pair.wdpv,
            sigma_min: pair.sigma_min,
            sigma2_gap: pair.sigma2_gap,
            scale: pair.scale,
            kscale: pair.kscale,
            minimality,
        })
    }

    /// Refines `lambda0` as an eigenvalue of `s.assemble()` and partitions.
    pub fn near(s: &PolySystemMatrix, lambda0: c64) -> Result<Self> {
        Self::from_pair(s, &refine(&s.assemble(), lambda0, NEWTON_STEPS)?)
    }

    pub fn simple_tol(&self) -> f64 {
        SIMPLE_TOL * linalg::norm2(&self.v) * linalg::norm2(&self.w) * self.scale
    }

    pub fn k_tol(&self) -> f64 {
        SIMPLE_TOL * self.kscale
    }

    pub fn is_simple(&self) -> bool {
        self.k > self.k_tol() && self.sigma2_gap > self.simple_tol()
    }

    pub fn ensure_minimal(&self) -> Result<()> {
        let m = &self.minimality;
        if m.minimal {
            Ok(())
        } else {
            Err(Error::NotMinimal {
                sigma_col: m.sigma_col,
                sigma_row: m.sigma_row,
                tol: m.tol,
            })
        }
    }

    pub fn ensure_simple(&self) -> Result<()> {
        if self.is_simple() {
            Ok(())
        } else {
            Err(Error::NotSimple {
                k: self.k,
                k_tol: self.k_tol(),
                sigma2: self.sigma2_gap,
                tol: self.simple_tol(),
            })
        }
    }

    /// Minimal and simple.
    pub fn check(&self) -> Result<()> {
        self.ensure_minimal()?;
        self.ensure_simple()
    }
}

/// Eigenpairs of `s.assemble()` chosen by `target`, partitioned. Candidates
/// are returned even when not minimal or not simple.
///
/// `Largest` picks the largest eigenvalue at which the realization is
/// minimal, that is the largest zero of the transfer function, and falls
/// back to the largest eigenvalue when there is none.
pub fn zeros_of(s: &PolySystemMatrix, target: &Target) -> Result<Vec<SimpleZero>> {
    let p = s.assemble();
    let ev = eigenvalues(&p)?;
    let at = |z: c64| SimpleZero::from_pair(s, &refine(&p, z, NEWTON_STEPS)?);
    if *target == Target::Largest {
        let mut rest = ev.clone();
        let mut first = None;
        while let Some(&i) = select(&rest, target).first() {
            let sz = at(rest.swap_remove(i))?;
            if sz.minimality.minimal {
                return Ok(vec![sz]);
            }
            first.get_or_insert(sz);
        }
        return first.map(|sz| vec![sz]).ok_or(Error::NoFiniteEigenvalues);
    }
    let picked = select(&ev, target);
    if picked.is_empty() {
        return Err(Error::NoFiniteEigenvalues);
    }
    picked.into_iter().map(|i| at(ev[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{creal, norm2};
    use crate::models;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar(c: &[f64]) -> PolyMatrix {
        PolyMatrix::from_real(1, 1, &c.iter().map(|x| vec![vec![*x]]).collect::<Vec<_>>()).unwrap()
    }

    fn sorted_re(mut v: Vec<c64>) -> Vec<c64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v
    }

    #[test]
    fn linear_scalar_pencil() {
        let p = scalar(&[-1.0, 1.0]);
        let (m0, m1) = companion_pencil(&p).unwrap();
        assert_eq!((m0[(0, 0)], m1[(0, 0)]), (creal(-1.0), creal(1.0)));
        let ev = eigenvalues(&p).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - creal(1.0)).norm() < 1e-15);
    }

    #[test]
    fn quadratic_scalar_roots() {
        let ev = sorted_re(eigenvalues(&scalar(&[-1.0, 0.0, 1.0])).unwrap());
        assert_eq!(ev.len(), 2);
        assert!((ev[0] + 1.0).norm() < 1e-14 && (ev[1] - 1.0).norm() < 1e-14);
        // z^2 - 3z + 2 and z^2 + 1 against the quadratic formula
        let ev = sorted_re(eigenvalues(&scalar(&[2.0, -3.0, 1.0])).unwrap());
        assert!((ev[0] - 1.0).norm() < 1e-14 && (ev[1] - 2.0).norm() < 1e-14);
        let mut ev = eigenvalues(&scalar(&[1.0, 0.0, 1.0])).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - c64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_polynomial_has_no_pencil() {
        assert!(matches!(companion_pencil(&scalar(&[3.0])), Err(Error::DegreeZero)));
        let trailing = scalar(&[3.0, 0.0]);
        assert!(matches!(companion_pencil(&trailing), Err(Error::DegreeZero)));
    }

    #[test]
    fn example29_eigenvalue_and_vectors() {
        let p = models::example29_psm().assemble();
        let ev = eigenvalues(&p).unwrap();
        assert_eq!(ev.len(), 1, "{ev:?}");
        assert!((ev[0] - 1.0).norm() < 1e-12);
        let pairs = eigenpairs(&p).unwrap();
        let pr = &pairs[0];
        let expected = [creal(-1.0), creal(0.0), creal(-1.0)];
        let cos = linalg::tdot(&linalg::conj_vec(&expected), &pr.v).norm() / (norm2(&expected) * norm2(&pr.v));
        assert!(cos > 1.0 - 1e-12);
        assert!(pr.is_simple());
        assert!(pr.residual_left(&p) < 1e-14);
    }

    #[test]
    fn left_vector_uses_transpose_convention() {
        // complex coefficients so w^T P = 0 and w^H P = 0 differ
        let p = PolyMatrix::new(2, 2, vec![
            Mat::from_fn(2, 2, |i, j| [[c64::new(1.0, 2.0), c64::new(0.5, -1.0)], [c64::new(-0.3, 0.7), c64::new(2.0, 0.1)]][i][j]),
            Mat::from_fn(2, 2, |i, j| if i == j { creal(1.0) } else { c64::new(0.2, 0.3) }),
        ])
        .unwrap();
        for pr in eigenpairs(&p).unwrap() {
            let pz = p.eval(pr.lambda);
            let wt_p = linalg::matvec(pz.transpose(), &pr.w);
            assert!(norm2(&wt_p) < 1e-12 * pr.scale);
            let wh_p = linalg::matvec(pz.transpose(), &linalg::conj_vec(&pr.w));
            assert!(norm2(&wh_p) > 1e-6, "conjugated vector should not be a left null vector");
        }
    }

    #[test]
    fn double_eigenvalue_is_not_simple() {
        let p = PolyMatrix::new(2, 2, vec![zeros(2, 2), Mat::from_fn(2, 2, |i, j| creal((i == j) as u8 as f64))]).unwrap();
        let pairs = eigenpairs(&p).unwrap();
        assert_eq!(pairs.len(), 2);
        for pr in &pairs {
            assert!(pr.lambda.norm() < 1e-14);
            assert!(pr.sigma2_gap < 1e-14);
            assert!(!pr.is_simple());
            assert!(matches!(pr.ensure_simple(), Err(Error::NotSimple { .. })));
        }
    }

    #[test]
    fn random_cubic_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let coeffs = (0..4)
                .map(|_| Mat::from_fn(4, 4, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
                .collect();
            let p = PolyMatrix::new(4, 4, coeffs).unwrap();
            let pairs = eigenpairs(&p).unwrap();
            assert_eq!(pairs.len(), 12);
            for pr in pairs {
                assert!(pr.sigma_min <= 1e-8 * pr.scale);
                assert!(pr.residual_right(&p) <= 1e-8 * pr.scale);
                assert!(pr.residual_left(&p) <= 1e-8 * pr.scale);
                assert!((norm2(&pr.v) - 1.0).abs() < 1e-12 && (norm2(&pr.w) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn example52_det_a_roots() {
        // det A(z) = z^(2k) - beta^2, roots the 2k-th roots of beta^2
        for (beta, k) in [(3.0f64, 1usize), (3.0, 2), (10.0, 3)] {
            let s = models::example52(2.0, beta, k).unwrap();
            let mut ev = eigenvalues(s.a()).unwrap();
            assert_eq!(ev.len(), 2 * k);
            let r = beta.powf(1.0 / k as f64);
            for z in &ev {
                assert!((z.norm() - r).abs() < 1e-12 * r);
                assert!((z.powu(2 * k as u32) - beta * beta).norm() < 1e-10 * beta * beta);
            }
            ev.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
            for w in ev.windows(2) {
                let gap = w[1].arg() - w[0].arg();
                assert!((gap - std::f64::consts::PI / k as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn example52_infinite_eigenvalues_are_dropped() {
        for k in [1, 2, 5] {
            let p = models::example52(2.0, 3.0, k).unwrap().assemble();
            let ev = eigenvalues(&p).unwrap();
            assert_eq!(ev.len(), 1, "k = {k}: {ev:?}");
            assert!((ev[0] - 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn simplicity_is_scale_invariant() {
        let p = models::example29_psm().assemble();
        let q = p.scale(c64::new(1e6, -3e5));
        let r = p.scale(creal(1e-7));
        for m in [&p, &q, &r] {
            let pairs = eigenpairs(m).unwrap();
            assert!(pairs[0].is_simple());
        }
        let dbl = PolyMatrix::new(2, 2, vec![zeros(2, 2), Mat::from_fn(2, 2, |i, j| creal(1e8 * (i == j) as u8 as f64))]).unwrap();
        assert!(eigenpairs(&dbl).unwrap().iter().all(|pr| !pr.is_simple()));
    }

    #[test]
    fn nearest_and_tie_break() {
        let p = scalar(&[-1.0, 0.0, 1.0]);
        assert!((nearest_eigenvalue(&p, creal(0.9)).unwrap() - 1.0).norm() < 1e-14);
        let first = nearest_eigenvalue(&p, creal(0.0)).unwrap();
        for _ in 0..5 {
            assert_eq!(nearest_eigenvalue(&p, creal(0.0)).unwrap(), first);
        }
        let ev = eigenvalues(&p).unwrap();
        assert_eq!(first, ev[0]);
    }

    #[test]
    fn select_targets() {
        let ev = vec![creal(1.0), c64::new(0.0, -3.0), creal(2.0)];
        assert_eq!(select(&ev, &Target::Largest), vec![1]);
        assert_eq!(select(&ev, &Target::Nearest(creal(1.8))), vec![2]);
        assert_eq!(select(&ev, &Target::All), vec![0, 1, 2]);
        assert!(select(&[], &Target::Largest).is_empty());
        let pair = [c64::new(1.0, -2.0), c64::new(0.5, 0.0), c64::new(1.0, 2.0)];
        assert_eq!(select(&pair, &Target::Largest), vec![2]);
    }

    #[test]
    fn refine_improves_a_perturbed_guess() {
        let p = models::example29_psm().assemble();
        let pr = refine(&p, creal(1.0 + 1e-4), NEWTON_STEPS).unwrap();
        assert!((pr.lambda - 1.0).norm() < 1e-12);
    }

    #[test]
    fn partition_satisfies_block_relation() {
        let s = models::random_psm(42, 3, 2, 2).unwrap();
        for sz in zeros_of(&s, &Target::All).unwrap() {
            assert_eq!((sz.v1.len(), sz.v2.len(), sz.w1.len(), sz.w2.len()), (3, 2, 3, 2));
            let x = linalg::solve(s.a().eval(sz.lambda0).as_ref(), Mat::from_fn(3, 1, |i, _| {
                linalg::matvec(s.b().eval(sz.lambda0).as_ref(), &sz.v2)[i]
            }).as_ref());
            let diff: Vec<c64> = (0..3).map(|i| x[(i, 0)] - sz.v1[i]).collect();
            assert!(norm2(&diff) < 1e-8);
        }
    }

    #[test]
    fn badly_scaled_blocks_stay_simple() {
        let s = models::loaded_string(models::LoadedStringRep::Rep4, 10, 1e6, 1.0).unwrap();
        let sz = zeros_of(&s, &Target::Largest).unwrap().remove(0);
        assert!(sz.k < sz.simple_tol());
        assert!(sz.is_simple());
    }

    #[test]
    fn derivative_scale_of_scalar() {
        let p = scalar(&[1.0, -2.0, 3.0]);
        let one = [creal(1.0)];
        assert!((derivative_scale(&p, c64::new(0.0, 2.0), &one, &one) - 14.0).abs() < 1e-14);
    }

    #[test]
    fn largest_skips_non_minimal_eigenvalues() {
        let s = PolySystemMatrix::new(scalar(&[-5.0, 1.0]), scalar(&[0.0]), scalar(&[1.0]), scalar(&[-2.0, 1.0])).unwrap();
        let mut ev = eigenvalues(&s.assemble()).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[1] - creal(5.0)).norm() < 1e-12);
        let sz = zeros_of(&s, &Target::Largest).unwrap().remove(0);
        assert!((sz.lambda0 - creal(2.0)).norm() < 1e-12);
        let far = zeros_of(&s, &Target::Nearest(creal(6.0))).unwrap().remove(0);
        assert!(!far.minimality.minimal);
    }
}
