//! Special functions and quadrature.

pub mod bessel;
pub mod cutoff;
pub mod gamma;
pub mod quad;

pub use bessel::{bessel_j, bessel_j_seq};
pub use cutoff::{bessel_k_half_constants, cutoff_g, CutoffG};
pub use gamma::{complex_gamma, gamma_c, gamma_ratio_unit, ln_gamma, upper_incomplete_gamma};
pub use quad::{gauss_legendre, oscillatory_integral, OscResult, QuadratureSpec};
