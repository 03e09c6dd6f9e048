//! Group models, representations, quadrature grids and the group Fourier transform.

pub mod cg;
pub mod fourier;
pub mod grid;
pub mod group;
pub mod selftest;
pub mod su2;

pub use cg::clebsch_gordan;
pub use fourier::{
    evaluate_su2, evaluate_torus, fourier_forward, fourier_forward_labels, fourier_inverse,
    plancherel_norm, sobolev_norm, GroupFunction,
};
pub use grid::{build_grid, cached_grid, GridPoint, GroupGrid};
pub use group::{
    bracket, casimir_lambda, casimir_lambda_sq, irrep_dimension, GroupKind, GroupModel, IrrepLabel,
};
pub use selftest::{fourier_selftest, random_coefficients, FourierSelfTest, SELFTEST_TOLERANCE};
pub use su2::{
    character, generator_image, little_d, wigner_matrix, wigner_of, EulerAngles, Su2Element,
};
