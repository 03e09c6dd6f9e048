//! Roundtrip and Plancherel check on random band-limited coefficients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fourier::{fourier_forward, fourier_inverse, plancherel_norm};
use super::grid::cached_grid;
use super::group::GroupModel;
use crate::error::Result;
use crate::linalg::{hs_norm, CMatrix};
use crate::symbol::MatrixSymbol;

pub const SELFTEST_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSelfTest {
    pub group: String,
    pub band: u32,
    pub seed: u64,
    pub labels: usize,
    pub nodes: usize,
    /// `max_ξ ‖F(F⁻¹ f̂)(ξ) − f̂(ξ)‖_HS / max_ξ ‖f̂(ξ)‖_HS`.
    pub roundtrip_error: f64,
    /// `|‖f‖₂ − (Σ d‖f̂‖²_HS)^{1/2}| / ‖f‖₂`.
    pub plancherel_error: f64,
    pub pass: bool,
}

/// Coefficients with entries uniform in the unit square, one matrix per label up to `band`.
pub fn random_coefficients(model: &GroupModel, band: u32, seed: u64) -> MatrixSymbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = MatrixSymbol::zero(model);
    for l in model.labels_up_to(band) {
        let d = l.dimension();
        let m = CMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        s.insert(l, m).expect("label from the model");
    }
    s
}

pub fn fourier_selftest(model: &GroupModel, band: u32, seed: u64) -> Result<FourierSelfTest> {
    let grid = cached_grid(model, band)?;
    let s = random_coefficients(model, band, seed);
    let f = fourier_inverse(&s, &grid)?;
    let back = fourier_forward(&f, band)?;
    let scale = s.iter().map(|(_, m)| hs_norm(m)).fold(0.0, f64::max);
    let roundtrip_error = back.max_hs_diff(&s, band) / scale;
    let n = f.l2_norm();
    let plancherel_error = (n - plancherel_norm(&s)).abs() / n;
    Ok(FourierSelfTest {
        group: model.to_string(),
        band,
        seed,
        labels: s.iter().count(),
        nodes: grid.len(),
        roundtrip_error,
        plancherel_error,
        pass: roundtrip_error < SELFTEST_TOLERANCE && plancherel_error < SELFTEST_TOLERANCE,
    })
}
