//! Condition numbers of simple zeros of rational matrices.
//!
//! A rational matrix is given through a polynomial system matrix
//! `P(z) = [-A B; C D]` with transfer function `R = D + C A^{-1} B`. The
//! crate computes the structured condition number `kappa_S` of a simple
//! eigenvalue of `P` under blockwise coefficient perturbations, Tisseur's
//! unstructured `kappa_U` of the same eigenvalue, and the extremal
//! perturbations that attain `kappa_S` to first order.
//!
//! ```no_run
//! use rzcond::{condition, eigensolve, models};
//!
//! let s = models::example52(2.0, 3.0, 2)?;
//! let zeros = eigensolve::zeros_of(&s, &eigensolve::Target::Largest)?;
//! let w = models::example52_weights(&s);
//! let report = condition::analyze(&s, &zeros[0], &w)?;
//! assert!((report.kappa_s - 3.0).abs() < 1e-8);
//! # Ok::<(), rzcond::Error>(())
//! ```

pub mod cli;
pub mod condition;
pub mod eigensolve;
pub mod error;
pub mod linalg;
pub mod models;
pub mod perturb;
pub mod polymat;
pub mod psm;

pub use condition::{ConditionReport, WeightScheme};
pub use eigensolve::{EigenPair, SimpleZero, Target};
pub use error::{Error, Result};
pub use models::{ModelName, ModelParams, ModelSpec};
pub use perturb::{StructuredPerturbation, TrialResult};
pub use polymat::PolyMatrix;
pub use psm::{MinimalityReport, PolySystemMatrix};
