//! Exact arithmetic, Dirichlet characters and built-in newform coefficients.

pub mod characters;
pub mod coeffs;
pub mod factor;
pub mod ntt;
pub mod rational;
pub mod registry;

pub use characters::{char_group, gauss_sum, DirichletCharacter};
pub use coeffs::{coeff_table, eta_coeffs, hecke_extend, CoeffTable};
pub use factor::{factorize, mod_inverse, Factorization};
pub use rational::Rational;
pub use registry::{lookup, NewformSpec, BUILTINS};
