//! Structured perturbations of polynomial system matrices and the empirical
//! first-order check of the condition number.

use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::condition::WeightScheme;
use crate::eigensolve::{self, SimpleZero, NEWTON_STEPS};
use crate::error::{Error, Result};
use crate::linalg::{self, conj_vec, czero, norm2, CMat};
use crate::polymat::PolyMatrix;
use crate::psm::PolySystemMatrix;

/// A blockwise direction `(dA, dB, dC, dD)`; the perturbed system is
/// `A + eps dA`, `B + eps dB`, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredPerturbation {
    pub da: PolyMatrix,
    pub db: PolyMatrix,
    pub dc: PolyMatrix,
    pub dd: PolyMatrix,
}

impl StructuredPerturbation {
    pub fn blocks(&self) -> [&PolyMatrix; 4] {
        [&self.da, &self.db, &self.dc, &self.dd]
    }

    /// The direction as a (generally singular) system matrix.
    pub fn as_psm(&self) -> Result<PolySystemMatrix> {
        PolySystemMatrix::new_unchecked(self.da.clone(), self.db.clone(), self.dc.clone(), self.dd.clone())
    }

    /// Largest excess of a coefficient norm over its weight (0 when feasible).
    pub fn cap_violation(&self, weights: &WeightScheme) -> Result<f64> {
        let caps = [&weights.a, &weights.b, &weights.c, &weights.d];
        let mut worst = 0.0f64;
        for (blk, cap) in self.blocks().into_iter().zip(caps) {
            for (i, n) in blk.coeff_norms()?.into_iter().enumerate() {
                worst = worst.max(n - cap.get(i).copied().unwrap_or(0.0));
            }
        }
        Ok(worst)
    }

    /// `w^T dP(lambda0) v` for the assembled direction.
    pub fn first_order_numerator(&self, sz: &SimpleZero) -> Result<c64> {
        Ok(linalg::bilinear(&sz.w, self.as_psm()?.assemble().eval(sz.lambda0).as_ref(), &sz.v))
    }

    /// The first-order rate `|w^T dP(lambda0) v| / K`.
    pub fn first_order_rate(&self, sz: &SimpleZero) -> Result<f64> {
        Ok(self.first_order_numerator(sz)?.norm() / sz.k)
    }
}

/// One perturb-and-resolve measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub eps: f64,
    pub delta_lambda_abs: f64,
    /// `eps * kappa_S`
    pub predicted: f64,
    /// `delta_lambda_abs / eps`
    pub ratio_measured: f64,
}

impl TrialResult {
    pub const CSV_HEADER: [&'static str; 4] = ["eps", "delta_lambda_abs", "predicted", "ratio_measured"];

    pub fn csv_row(&self) -> [f64; 4] {
        [self.eps, self.delta_lambda_abs, self.predicted, self.ratio_measured]
    }
}

fn rank_one_block(weights: &[f64], mu: c64, sign: f64, left: &[c64], right: &[c64]) -> PolyMatrix {
    let (rows, cols) = (left.len(), right.len());
    let (nl, nr) = (norm2(left), norm2(right));
    let degenerate = nl == 0.0 || nr == 0.0;
    let dir = if degenerate {
        Mat::zeros(rows, cols)
    } else {
        linalg::outer(&conj_vec(left), &conj_vec(right))
    };
    let coeffs: Vec<CMat> = weights
        .iter()
        .enumerate()
        .map(|(i, wi)| {
            let mui = if i == 0 { c64::new(1.0, 0.0) } else { mu.powu(i as u32) };
            let s = mui * (sign * wi / if degenerate { 1.0 } else { nl * nr });
            if degenerate || *wi == 0.0 {
                Mat::zeros(rows, cols)
            } else {
                linalg::mat_scale(dir.as_ref(), s)
            }
        })
        .collect();
    if coeffs.is_empty() {
        PolyMatrix::zero(rows, cols)
    } else {
        PolyMatrix::new(rows, cols, coeffs).expect("outer products have the block shape")
    }
}

/// The rank-one perturbation that attains `kappa_S` to first order.
///
/// Each coefficient is `x_i mu^i conj(w_a) v_b^H / (||w_a|| ||v_b||)` with
/// `mu = conj(lambda0) / |lambda0|` (0 at the origin), so every term of
/// `w^T dP(lambda0) v` equals `x_i |lambda0|^i ||w_a|| ||v_b||`. The `dA`
/// block carries a minus sign to cancel the `-A` in `P`.
pub fn extremal_perturbation(s: &PolySystemMatrix, sz: &SimpleZero, weights: &WeightScheme) -> Result<StructuredPerturbation> {
    weights.check_against(s)?;
    sz.check()?;
    let r = sz.lambda0.norm();
    let mu = if r == 0.0 { czero() } else { sz.lambda0.conj() / r };
    Ok(StructuredPerturbation {
        da: rank_one_block(&weights.a, mu, -1.0, &sz.w1, &sz.v1),
        db: rank_one_block(&weights.b, mu, 1.0, &sz.w1, &sz.v2),
        dc: rank_one_block(&weights.c, mu, 1.0, &sz.w2, &sz.v1),
        dd: rank_one_block(&weights.d, mu, 1.0, &sz.w2, &sz.v2),
    })
}

fn random_block(rng: &mut ChaCha8Rng, weights: &[f64], rows: usize, cols: usize) -> Result<PolyMatrix> {
    if weights.is_empty() {
        return Ok(PolyMatrix::zero(rows, cols));
    }
    let coeffs = weights
        .iter()
        .map(|wi| {
            let g: CMat = Mat::from_fn(rows, cols, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                c64::new(re, im)
            });
            let nrm = linalg::spectral_norm(g.as_ref())?;
            Ok(if *wi == 0.0 || nrm == 0.0 {
                Mat::zeros(rows, cols)
            } else {
                linalg::mat_scale(g.as_ref(), c64::new(wi / nrm, 0.0))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::new(rows, cols, coeffs)
}

/// Complex Gaussian coefficients rescaled onto the boundary `||dX_i|| = x_i`.
pub fn random_perturbation(weights: &WeightScheme, n: usize, p: usize, seed: u64) -> Result<StructuredPerturbation> {
    weights.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(StructuredPerturbation {
        da: random_block(&mut rng, &weights.a, n, n)?,
        db: random_block(&mut rng, &weights.b, n, p)?,
        dc: random_block(&mut rng, &weights.c, p, n)?,
        dd: random_block(&mut rng, &weights.d, p, p)?,
    })
}

/// `S + eps dP`, blockwise.
pub fn apply(s: &PolySystemMatrix, dp: &StructuredPerturbation, eps: f64) -> Result<PolySystemMatrix> {
    s.add_scaled(&dp.as_psm()?, eps)
}

/// Distance from `lambda0` to the closest other finite eigenvalue of `P`.
pub fn spectral_gap(p: &PolyMatrix, lambda0: c64) -> Result<f64> {
    let ev = eigensolve::eigenvalues(p)?;
    let own = eigensolve::nearest_in(&ev, lambda0).ok_or(Error::NoFiniteEigenvalues)?;
    Ok(ev
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != own)
        .map(|(_, z)| (z - lambda0).norm())
        .fold(f64::INFINITY, f64::min))
}

/// Perturbs, re-solves, and measures `|lambda0(eps) - lambda0|`.
pub fn measure_shift(
    s: &PolySystemMatrix,
    dp: &StructuredPerturbation,
    sz: &SimpleZero,
    eps: f64,
    kappa_s: f64,
) -> Result<TrialResult> {
    if eps == 0.0 {
        return Ok(TrialResult {
            eps,
            delta_lambda_abs: 0.0,
            predicted: 0.0,
            ratio_measured: 0.0,
        });
    }
    let half_gap = 0.5 * spectral_gap(&s.assemble(), sz.lambda0)?;
    let perturbed = apply(s, dp, eps)?.assemble();
    let guess = eigensolve::nearest_eigenvalue(&perturbed, sz.lambda0)?;
    let lam = eigensolve::refine(&perturbed, guess, NEWTON_STEPS)?.lambda;
    let shift = (lam - sz.lambda0).norm();
    if shift >= half_gap {
        return Err(Error::EigenvalueCollision { shift, half_gap });
    }
    Ok(TrialResult {
        eps,
        delta_lambda_abs: shift,
        predicted: eps * kappa_s,
        ratio_measured: shift / eps.abs(),
    })
}

/// Outcome of an extremal-perturbation sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    #[serde(rename = "kappa_S")]
    pub kappa_s: f64,
    /// `|ratio_measured - kappa_S| / kappa_S` per eps, 0 when both vanish
    pub rel_errors: Vec<f64>,
    pub max_rel_error: f64,
    /// log10 slopes of the deviation `|ratio_measured - kappa_S|` between
    /// consecutive eps values
    pub slopes: Vec<f64>,
    pub trials: Vec<TrialResult>,
}

fn rel_error(measured: f64, kappa_s: f64) -> f64 {
    if kappa_s == 0.0 {
        if measured == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (measured - kappa_s).abs() / kappa_s
    }
}

/// Runs [`measure_shift`] with the extremal perturbation over `eps_list`.
pub fn first_order_validate(
    s: &PolySystemMatrix,
    sz: &SimpleZero,
    weights: &WeightScheme,
    eps_list: &[f64],
) -> Result<ValidationSummary> {
    let kappa_s = crate::condition::kappa_s(s, sz, weights)?;
    let dp = extremal_perturbation(s, sz, weights)?;
    let trials = eps_list
        .iter()
        .map(|&eps| measure_shift(s, &dp, sz, eps, kappa_s))
        .collect::<Result<Vec<_>>>()?;
    let rel_errors: Vec<f64> = trials.iter().map(|t| rel_error(t.ratio_measured, kappa_s)).collect();
    let slopes = trials
        .windows(2)
        .map(|t| {
            let d0 = (t[0].ratio_measured - kappa_s).abs();
            let d1 = (t[1].ratio_measured - kappa_s).abs();
            (d1.log10() - d0.log10()) / (t[1].eps.log10() - t[0].eps.log10())
        })
        .collect();
    Ok(ValidationSummary {
        kappa_s,
        max_rel_error: rel_errors.iter().copied().fold(0.0, f64::max),
        rel_errors,
        slopes,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::kappa_s;
    use crate::eigensolve::{zeros_of, Target};
    use crate::linalg::{creal, max_abs_diff};
    use crate::models;

    fn largest(s: &PolySystemMatrix) -> SimpleZero {
        zeros_of(s, &Target::Largest).unwrap().remove(0)
    }

    fn zero_weights(w: &WeightScheme) -> WeightScheme {
        let z = |v: &Vec<f64>| vec![0.0; v.len()];
        WeightScheme::new(z(&w.a), z(&w.b), z(&w.c), z(&w.d)).unwrap()
    }

    #[test]
    fn zero_weights_give_zero_perturbations() {
        let s = models::example52(2.0, 3.0, 2).unwrap();
        let sz = largest(&s);
        let w = zero_weights(&WeightScheme::uniform(&s));
        let ext = extremal_perturbation(&s, &sz, &w).unwrap();
        let rnd = random_perturbation(&w, 2, 2, 1).unwrap();
        for dp in [ext, rnd] {
            for blk in dp.blocks() {
                assert!(blk.coeffs().iter().all(|c| linalg::is_all_zero(c.as_ref())));
            }
        }
    }

    #[test]
    fn extremal_norms_equal_weights() {
        for seed in 0..10 {
            let s = models::random_psm(seed, 3, 2, 2).unwrap();
            let sz = largest(&s);
            if sz.check().is_err() {
                continue;
            }
            let w = WeightScheme::relative(&s).unwrap();
            let dp = extremal_perturbation(&s, &sz, &w).unwrap();
            let caps = [&w.a, &w.b, &w.c, &w.d];
            for (blk, cap) in dp.blocks().into_iter().zip(caps) {
                assert_eq!(blk.len(), cap.len());
                for (n, c) in blk.coeff_norms().unwrap().iter().zip(cap.iter()) {
                    assert!((n - c).abs() <= 1e-12 * c.max(1.0));
                }
            }
        }
    }

    #[test]
    fn extremal_sharpness_is_exact() {
        for seed in 0..20 {
            let s = models::random_psm(100 + seed, 2, 3, 3).unwrap();
            for sz in zeros_of(&s, &Target::All).unwrap() {
                if sz.check().is_err() {
                    continue;
                }
                let w = WeightScheme::uniform(&s);
                let ks = kappa_s(&s, &sz, &w).unwrap();
                let rate = extremal_perturbation(&s, &sz, &w).unwrap().first_order_rate(&sz).unwrap();
                assert!((rate - ks).abs() <= 1e-10 * ks, "{rate} vs {ks}");
            }
        }
    }

    #[test]
    fn extremal_at_origin_keeps_only_constant_terms() {
        // scalar P(z) = z (z + 2) realized with A = 1, D = z^2 + 2z; zero at 0
        let a = PolyMatrix::from_real(1, 1, &[vec![vec![1.0]]]).unwrap();
        let b = PolyMatrix::from_real(1, 1, &[vec![vec![0.5]]]).unwrap();
        let c = PolyMatrix::from_real(1, 1, &[vec![vec![0.0]], vec![vec![1.0]]]).unwrap();
        let d = PolyMatrix::from_real(1, 1, &[vec![vec![0.0]], vec![vec![2.0]], vec![vec![1.0]]]).unwrap();
        let s = PolySystemMatrix::new(a, b, c, d).unwrap();
        let sz = zeros_of(&s, &Target::Nearest(creal(0.0))).unwrap().remove(0);
        assert!(sz.lambda0.norm() < 1e-14);
        let dp = extremal_perturbation(&s, &sz, &WeightScheme::uniform(&s)).unwrap();
        for blk in dp.blocks() {
            for c in blk.coeffs().iter().skip(1) {
                assert!(linalg::is_all_zero(c.as_ref()));
            }
        }
    }

    #[test]
    fn random_perturbation_is_deterministic_and_on_boundary() {
        let s = models::example52(2.0, 3.0, 2).unwrap();
        let w = WeightScheme::relative(&s).unwrap();
        let a = random_perturbation(&w, 2, 2, 99).unwrap();
        let b = random_perturbation(&w, 2, 2, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_perturbation(&w, 2, 2, 100).unwrap());
        assert!(a.cap_violation(&w).unwrap() <= 1e-12);
        let caps = [&w.a, &w.b, &w.c, &w.d];
        for (blk, cap) in a.blocks().into_iter().zip(caps) {
            for (n, c) in blk.coeff_norms().unwrap().iter().zip(cap.iter()) {
                assert!((n - c).abs() <= 1e-12 * c.max(1.0));
            }
        }
    }

    #[test]
    fn apply_identities() {
        let s = models::random_psm(5, 3, 2, 2).unwrap();
        let w = WeightScheme::uniform(&s);
        let dp = random_perturbation(&w, 3, 2, 5).unwrap();
        assert_eq!(apply(&s, &dp, 0.0).unwrap().assemble().eval(creal(0.3)), s.assemble().eval(creal(0.3)));
        let back = apply(&apply(&s, &dp, 1e-3).unwrap(), &dp, -1e-3).unwrap();
        let z = c64::new(0.2, -0.9);
        assert!(max_abs_diff(back.assemble().eval(z).as_ref(), s.assemble().eval(z).as_ref()) < 1e-15);
        let eps = 0.37;
        let lhs = apply(&s, &dp, eps).unwrap().assemble();
        let rhs = s.assemble().add_scaled(&dp.as_psm().unwrap().assemble(), creal(eps)).unwrap();
        for i in 0..lhs.len() {
            assert!(max_abs_diff(lhs.coeffs()[i].as_ref(), rhs.coeff(i).as_ref()) < 1e-15);
        }
        let wrong = random_perturbation(&w, 2, 2, 5).unwrap();
        assert!(matches!(apply(&s, &wrong, 1.0), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn example52_measured_slope_matches_kappa() {
        let s = models::example52(2.0, 3.0, 2).unwrap();
        let sz = largest(&s);
        let w = models::example52_weights(&s);
        let ks = kappa_s(&s, &sz, &w).unwrap();
        let dp = extremal_perturbation(&s, &sz, &w).unwrap();
        let t = measure_shift(&s, &dp, &sz, 1e-7, ks).unwrap();
        assert!((t.ratio_measured - 3.0).abs() <= 0.01 * 3.0, "{t:?}");
        assert!((t.predicted - 3e-7).abs() < 1e-15);
        let zero = measure_shift(&s, &dp, &sz, 0.0, ks).unwrap();
        assert_eq!(zero.delta_lambda_abs, 0.0);
    }

    #[test]
    fn example29_perturbed_eigenvalue_stays_close() {
        let s = models::example29_psm();
        let sz = largest(&s);
        let dp = extremal_perturbation(&s, &sz, &WeightScheme::uniform(&s)).unwrap();
        let p = apply(&s, &dp, 1e-6).unwrap().assemble();
        let z = eigensolve::nearest_eigenvalue(&p, creal(1.0)).unwrap();
        assert!((z - 1.0).norm() < 1e-4);
    }

    #[test]
    fn random_rate_matches_quotient() {
        let s = models::random_psm(77, 2, 2, 2).unwrap();
        let sz = largest(&s);
        sz.check().unwrap();
        let w = WeightScheme::uniform(&s);
        let ks = kappa_s(&s, &sz, &w).unwrap();
        let dp = random_perturbation(&w, 2, 2, 3).unwrap();
        let q = dp.first_order_rate(&sz).unwrap();
        assert!(q <= ks * (1.0 + 1e-12));
        let t = measure_shift(&s, &dp, &sz, 1e-7, ks).unwrap();
        assert!((t.ratio_measured - q).abs() <= 1e-3 * q.max(1e-3), "{} vs {q}", t.ratio_measured);
    }

    #[test]
    fn collision_is_detected() {
        // eigenvalues 1 and 1.001; a big shift towards the neighbour trips the gap check
        let d = PolyMatrix::from_real(2, 2, &[
            vec![vec![-1.0, 0.0], vec![0.0, -1.001]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        let a = PolyMatrix::from_real(1, 1, &[vec![vec![1.0]]]).unwrap();
        let s = PolySystemMatrix::new(a, PolyMatrix::zero(1, 2), PolyMatrix::zero(2, 1), d).unwrap();
        let sz = zeros_of(&s, &Target::Nearest(creal(1.0))).unwrap().remove(0);
        let w = WeightScheme::new(vec![], vec![], vec![], vec![1.0, 0.0]).unwrap();
        let dp = extremal_perturbation(&s, &sz, &w).unwrap();
        let ks = kappa_s(&s, &sz, &w).unwrap();
        assert!(measure_shift(&s, &dp, &sz, 1e-7, ks).is_ok());
        let err = measure_shift(&s, &dp, &sz, 1e-2, ks).unwrap_err();
        assert!(matches!(err, Error::EigenvalueCollision { .. }));
    }

    #[test]
    fn validate_example52_and_zero_weights() {
        let s = models::example52(2.0, 3.0, 2).unwrap();
        let sz = largest(&s);
        let w = models::example52_weights(&s);
        let sum = first_order_validate(&s, &sz, &w, &[1e-5, 1e-6, 1e-7]).unwrap();
        assert!(sum.max_rel_error <= 0.05);
        assert!(sum.rel_errors[0] > sum.rel_errors[1] && sum.rel_errors[1] > sum.rel_errors[2]);
        for slope in &sum.slopes {
            assert!((slope - 1.0).abs() < 0.2, "{:?}", sum.slopes);
        }
        let z = zero_weights(&w);
        let sum = first_order_validate(&s, &sz, &z, &[1e-6, 1e-7]).unwrap();
        assert_eq!(sum.kappa_s, 0.0);
        assert_eq!(sum.max_rel_error, 0.0);
        assert!(sum.trials.iter().all(|t| t.ratio_measured == 0.0));
    }
}
