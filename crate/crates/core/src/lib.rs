//! Unimodal soft-label regularisation for ordinal classification built on
//! the generalised beta distribution `GB(alpha, u, v)`.
//!
//! The pipeline is:
//!
//! 1. [`solver`] derives one `GB` distribution per class from mean/variance
//!    constraints (concentrated `alpha = 2` shapes for the two extreme
//!    classes, midpoint-centred standard betas in between),
//! 2. [`encoding`] integrates each distribution over the `J` unit
//!    sub-intervals to obtain a row-stochastic soft-label matrix,
//! 3. [`loss`] evaluates the cross-entropy against those soft targets,
//! 4. [`metrics`] scores predictions, including the geometric mean of the
//!    extreme-class sensitivities (GMSEC),
//! 5. [`bench`] ties everything together on synthetic ordinal data.

pub mod bench;
pub mod encoding;
pub mod error;
pub mod gb;
pub mod loss;
pub mod metrics;
pub mod solver;
pub mod special;

pub use encoding::SoftLabelMatrix;
pub use error::{Error, Result};
pub use gb::GbParams;
pub use metrics::{ConfusionMatrix, MetricReport};
pub use solver::{ClassDistributionSet, ExtremeShape, SolverConfig};
