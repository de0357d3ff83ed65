//! Numerics for modular-form L-functions on the critical line: coefficient
//! tables, approximate functional equations, Voronoi summation at arbitrary
//! level, Farey-block stationary phase and resonance counting.

pub mod arithforms;
pub mod cli;
pub mod error;
pub mod farey;
pub mod lfunction;
pub mod sieve;
pub mod special;
pub mod statphase;
pub mod voronoi;

pub use error::{Error, Result};
