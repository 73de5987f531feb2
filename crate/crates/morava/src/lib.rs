//! Exact arithmetic for formal group laws and Morava K-theory computations:
//! p-local scalars, truncated graded (Laurent) series, BP and Morava formal
//! group laws, characteristic numbers of hypersurfaces, residue formulas for
//! cohomology operations, Smith normal form of BP-module presentations, a
//! gamma-filtration torsion engine for split quadrics, and a rule engine for
//! K(n)-splitting of homogeneous varieties.

pub mod charnum;
pub mod error;
pub mod fgl;
pub mod motives;
pub mod ops;
pub mod quadric;
pub mod scalar;
pub mod series;
pub mod snf;
pub mod splitting;
pub mod symfunc;

pub use error::{AlgebraError, Result};
pub use fgl::{
    additive_fgl, bp_fgl, bp_log, fgl_from_log, morava_fgl, morava_log, FglLabel, FormalGroupLaw,
    Height,
};
pub use scalar::{require_prime, PRat};
pub use series::{laurent_divide, GradedSeries, Ring, Var, VarKind};
