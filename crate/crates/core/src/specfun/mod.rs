//! Special-function kernels: Bessel J, incomplete gamma, the regularized ₂F̃₃ and ζ_ℓ.

mod bessel;
pub mod ddouble;
mod gamma;
mod hypergeometric;

pub use bessel::{bessel_j, bessel_j_zero, jn, jn_pair, jn_prime};
pub use gamma::{factorial, gamma, incomplete_gamma_lower, incomplete_gamma_upper, ln_gamma};
pub use hypergeometric::{hyp_2f3_reg, zeta_ell, SeriesControl, SERIES_U_LIMIT};
