//! Quantization `Op(σ)`, kernels, vector-field symbols and the pseudo-distance.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::matrix::{symbol_product, MatrixSymbol};
use crate::error::{Error, Result};
use crate::harmonic::{
    fourier_forward, fourier_inverse, generator_image, wigner_of, GridPoint, GroupFunction,
    GroupGrid, GroupKind, GroupModel, Su2Element,
};
use crate::linalg::{CMatrix, I};

/// `Aφ(g) = Σ d_ξ tr(ξ(g) σ(ξ) φ̂(ξ))` on the nodes of `f`'s grid.
pub fn quantize_apply(sigma: &MatrixSymbol, f: &GroupFunction) -> Result<GroupFunction> {
    let grid = f.grid();
    grid.model().check_same(sigma.model())?;
    let band = grid.band();
    if sigma.band() > band {
        return Err(Error::BandExceeded {
            label_band: sigma.band(),
            grid_band: band,
        });
    }
    let fh = fourier_forward(f, band)?;
    fourier_inverse(&symbol_product(sigma, &fh)?, grid)
}

/// The right-convolution kernel `ℱ⁻¹σ`.
pub fn symbol_to_kernel(sigma: &MatrixSymbol, grid: &Arc<GroupGrid>) -> Result<GroupFunction> {
    fourier_inverse(sigma, grid)
}

/// Step used by the finite-difference symbol of a vector field.
pub const VF_STEP: f64 = 1e-4;

/// `σ_X(ξ) = (Xξ)(1)`, from centred differences of `ξ(exp(tX))` with one
/// Richardson step on SU(2); closed form `2πi x·k` on the torus.
pub fn vector_field_symbol(model: &GroupModel, x: &[f64], band: u32) -> Result<MatrixSymbol> {
    match model.kind() {
        GroupKind::Torus(n) => {
            check_len(x, *n)?;
            Ok(torus_vf(model, x, band))
        }
        GroupKind::Su2 => {
            check_len(x, 3)?;
            let a = [x[0], x[1], x[2]];
            let central = |t: u32, h: f64| {
                let p = wigner_of(t, &Su2Element::exp(a, h));
                let m = wigner_of(t, &Su2Element::exp(a, -h));
                (p - m) / Complex64::from(2.0 * h)
            };
            Ok(MatrixSymbol::from_fn(model, band, |l| {
                let t = l.twice_spin().unwrap();
                let coarse = central(t, VF_STEP);
                let fine = central(t, VF_STEP / 2.0);
                (fine * Complex64::from(4.0) - coarse) / Complex64::from(3.0)
            }))
        }
    }
}

/// `σ_X(ξ) = −i(x·J)` from the spin matrices; the torus case is already exact.
pub fn vector_field_exact(model: &GroupModel, x: &[f64], band: u32) -> Result<MatrixSymbol> {
    match model.kind() {
        GroupKind::Torus(n) => {
            check_len(x, *n)?;
            Ok(torus_vf(model, x, band))
        }
        GroupKind::Su2 => {
            check_len(x, 3)?;
            let a = [x[0], x[1], x[2]];
            Ok(MatrixSymbol::from_fn(model, band, |l| {
                generator_image(l.twice_spin().unwrap(), a)
            }))
        }
    }
}

fn torus_vf(model: &GroupModel, x: &[f64], band: u32) -> MatrixSymbol {
    MatrixSymbol::from_fn(model, band, |l| {
        let k = l.freq().unwrap();
        let v: f64 = k.iter().zip(x).map(|(k, a)| *k as f64 * a).sum();
        CMatrix::from_element(1, 1, I * (2.0 * PI * v))
    })
}

fn check_len(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "vector field needs {n} finite coefficients, got {x:?}"
        )));
    }
    Ok(())
}

/// `ρ²(g) = Σ_{ξ∈Δ₀}(d_ξ − tr ξ(g))` sampled on a grid.
#[derive(Clone, Debug)]
pub struct DistanceFunction {
    model: GroupModel,
    samples: GroupFunction,
}

impl DistanceFunction {
    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn samples(&self) -> &GroupFunction {
        &self.samples
    }

    /// `3 − tr Ad(g) = 2 − 2cos t` for `g` of rotation angle `t`.
    pub fn eval_su2(g: &Su2Element) -> f64 {
        let a = g.a.re.clamp(-1.0, 1.0);
        4.0 * (1.0 - a * a)
    }

    /// `2n − Σ_j 2cos(2πx_j)`.
    pub fn eval_torus(x: &[f64]) -> f64 {
        x.iter().map(|v| 2.0 - 2.0 * (2.0 * PI * v).cos()).sum()
    }
}

pub fn rho_squared(model: &GroupModel, grid: &Arc<GroupGrid>) -> Result<DistanceFunction> {
    grid.model().check_same(model)?;
    if model.is_su2() && grid.band() < 2 {
        return Err(Error::GridTooSmall {
            need: 2,
            have: grid.band(),
        });
    }
    let g = grid.clone();
    let samples = GroupFunction::from_index_fn(grid.clone(), move |i| {
        let v = match g.node(i) {
            GridPoint::Torus(x) => DistanceFunction::eval_torus(&x),
            GridPoint::Su2(_) => {
                let ad = g.wigner_at(i, 2).expect("grid band ≥ 2 for the adjoint");
                3.0 - ad.trace().re
            }
        };
        Complex64::from(v)
    });
    Ok(DistanceFunction {
        model: model.clone(),
        samples,
    })
}
