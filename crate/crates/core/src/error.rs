use faer::c64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// `A(z)` failed the nonsingularity test: `z` is numerically a pole
    /// candidate of the transfer function or an eigenvalue of `A`.
    #[error("A(z) is numerically singular at z = {z} (sigma_min = {sigma:.3e}, tol = {tol:.3e})")]
    PoleOrSingular { z: c64, sigma: f64, tol: f64 },

    #[error(
        "system matrix is not minimal at lambda0: sigma_col = {sigma_col:.3e}, sigma_row = {sigma_row:.3e}, tol = {tol:.3e}"
    )]
    NotMinimal {
        sigma_col: f64,
        sigma_row: f64,
        tol: f64,
    },

    #[error("eigenvalue is not simple: K = {k:.3e} (tol {k_tol:.3e}), sigma2 = {sigma2:.3e} (tol {tol:.3e})")]
    NotSimple { k: f64, k_tol: f64, sigma2: f64, tol: f64 },

    #[error("companion linearization needs a matrix polynomial of degree >= 1")]
    DegreeZero,

    #[error("matrix polynomial has no finite eigenvalues")]
    NoFiniteEigenvalues,

    #[error("eigensolver failure: {0}")]
    BackendFailure(String),

    #[error("{0} is not regular (determinant vanishes at every probe point)")]
    NotRegular(&'static str),

    #[error("eigenvalue shift {shift:.3e} is not below half the spectral gap {half_gap:.3e}")]
    EigenvalueCollision { shift: f64, half_gap: f64 },

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.into())
    }
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidSpec(_) | Error::ShapeMismatch(_) | Error::NotRegular(_) | Error::Io(_) => 2,
            Error::NotMinimal { .. } => 3,
            Error::NotSimple { .. } => 4,
            Error::PoleOrSingular { .. } => 5,
            Error::DegreeZero | Error::NoFiniteEigenvalues | Error::BackendFailure(_) | Error::EigenvalueCollision { .. } => 6,
        }
    }

    /// One-line diagnostic naming the failing quantity.
    pub fn diagnostic(&self) -> String {
        match self {
            Error::NotMinimal { sigma_col, sigma_row, tol } => {
                let failing: Vec<&str> = [("sigma_col", sigma_col), ("sigma_row", sigma_row)]
                    .into_iter()
                    .filter(|(_, s)| **s <= *tol)
                    .map(|(n, _)| n)
                    .collect();
                format!("{self} [failing: {}]", failing.join(", "))
            }
            Error::NotSimple { k, k_tol, sigma2, tol } => {
                let failing: Vec<&str> = [("K", k, k_tol), ("sigma2_gap", sigma2, tol)]
                    .into_iter()
                    .filter(|(_, s, t)| **s <= **t)
                    .map(|(n, _, _)| n)
                    .collect();
                format!("{self} [failing: {}]", failing.join(", "))
            }
            _ => self.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct_per_class() {
        let cases = [
            (Error::Parse("x".into()), 2),
            (Error::NotMinimal { sigma_col: 0.0, sigma_row: 1.0, tol: 1e-15 }, 3),
            (Error::NotSimple { k: 0.0, k_tol: 1e-10, sigma2: 1.0, tol: 1e-10 }, 4),
            (Error::PoleOrSingular { z: c64::new(1.0, 0.0), sigma: 0.0, tol: 1e-16 }, 5),
            (Error::NoFiniteEigenvalues, 6),
            (Error::BackendFailure("qz".into()), 6),
        ];
        for (e, code) in cases {
            assert_eq!(e.exit_code(), code, "{e}");
        }
    }

    #[test]
    fn diagnostics_name_the_failing_value() {
        let e = Error::NotMinimal { sigma_col: 1e-18, sigma_row: 0.5, tol: 1e-15 };
        assert!(e.diagnostic().ends_with("[failing: sigma_col]"));
        let e = Error::NotSimple { k: 1.0, k_tol: 1e-10, sigma2: 1e-20, tol: 1e-10 };
        assert!(e.diagnostic().ends_with("[failing: sigma2_gap]"));
    }
}
