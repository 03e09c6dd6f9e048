//! Matrix-symbol calculus for Fourier multipliers on the torus and on SU(2).

pub mod central;
pub mod cz;
pub mod error;
pub mod harmonic;
pub mod linalg;
pub mod multiplier;
pub mod symbol;
pub mod vf_inverse;

pub use error::{Error, Result};
