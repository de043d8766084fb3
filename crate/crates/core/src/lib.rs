//! Simultaneous Gaussian quadrature for a pair of measures.
//!
//! The nodes are the eigenvalues of the banded Hessenberg matrix built from
//! the stepline recurrence of the type II multiple orthogonal polynomials;
//! the two weight vectors come from the left and right eigenvectors together
//! with a 2×2 normalization matrix. Everything is computed in MPFR
//! arithmetic at a caller-chosen number of decimal digits.
//!
//! ```no_run
//! use mopquad::{make_rule, integrate_named, Integrand, PrecisionContext, WeightSystem};
//!
//! let ctx = PrecisionContext::new(100)?;
//! let system = WeightSystem::bessel_k("1", "0")?;
//! let rule = make_rule(&system, 10, &ctx)?;
//! let (i1, i2) = integrate_named(&rule, &Integrand::ExpNeg, &ctx)?;
//! # Ok::<(), mopquad::Error>(())
//! ```

pub mod error;
pub mod hessenberg;
pub mod precision;
pub mod quadrature;
pub mod roots;
pub mod rule_io;
pub mod systems;
pub mod vandermonde;

pub use error::{Error, Result};
pub use hessenberg::{eval_type_two, BandedHessenberg, EigenPair};
pub use precision::{cos_fn, exp_neg, format_fixed, format_sci, gamma, ExtReal, PrecisionContext};
pub use quadrature::{
    certified_pairs, exactness_degrees, integrate, integrate_named, make_rule, verify_exactness,
    weight_report, weights_oracle, ExactnessReport, Integrand, QuadratureRule,
};
pub use roots::eigen_nodes;
pub use rule_io::{rule_from_json, rule_to_csv, rule_to_json, rule_to_table, RuleDocument};
pub use systems::{
    bessel_i_coeffs, bessel_i_normalization, bessel_k_coeffs, bessel_k_normalization,
    nn_to_stepline, CustomStepline, NNCoefficients, NormalizationMatrix, SteplineCoefficients,
    SystemDescriptor, WeightSystem,
};
