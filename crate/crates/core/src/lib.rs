//! Angularly accelerating electron matter waves.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Oracle constants are pasted at full reference precision.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analysis;
pub mod constants;
pub mod electrodynamics;
pub mod error;
pub mod holography;
pub mod io;
pub mod kinematics;
pub mod propagation;
pub mod quadrature;
pub mod specfun;
pub mod wavefield;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every listing of the guide in `book/` runs as a doctest.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/waves.md")]
    pub mod waves {}
    #[doc = include_str!("../../../book/src/kinematics.md")]
    pub mod kinematics {}
    #[doc = include_str!("../../../book/src/fields.md")]
    pub mod fields {}
    #[doc = include_str!("../../../book/src/holography.md")]
    pub mod holography {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    pub mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    pub mod numerics {}
}
