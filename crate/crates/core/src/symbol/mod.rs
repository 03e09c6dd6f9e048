//! Matrix symbols, quantization and difference operators.

pub mod difference;
pub mod leibniz;
pub mod matrix;
pub mod profile;
pub mod quantize;
pub mod recouple;
pub mod torus_array;

pub use difference::{
    apply_difference, apply_difference_shift, apply_differences, generators, laplace_difference,
    laplace_difference_quadrature, laplace_difference_shift, words_of_order, DifferenceWord,
    Elementary,
};
pub use leibniz::{
    laplace_rule_residual, leibniz_residual, leibniz_terms, word_rule_residual, LeibnizResidual,
};
pub use matrix::{symbol_product, MatrixSymbol};
pub use profile::{
    difference_profile, factor_band, required_band, seminorm, DifferenceProfile, ProfileSpec,
    SymbolData,
};
pub use quantize::{
    quantize_apply, rho_squared, symbol_to_kernel, vector_field_exact, vector_field_symbol,
    DistanceFunction,
};
pub use recouple::{apply_elementary_recoupled, laplace_diagonal_entry, laplace_recoupled};
pub use torus_array::TorusArray;
