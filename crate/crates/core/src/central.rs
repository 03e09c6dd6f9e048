//! Central multipliers on SU(2): Weyl dimension and character formulas on
//! the full weight lattice and the lattice differences acting on central
//! sequences.
//!
//! Weights are stored doubled, so `w = 2ℓ` for the dominant weight of spin
//! `ℓ` and the Weyl vector is `w = 1`. The Weyl group `{1, ω}` acts by
//! `w + 1 ↦ −(w + 1)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{
    bracket, casimir_lambda, casimir_lambda_sq, fourier_forward, fourier_inverse, GroupFunction,
    GroupGrid, GroupModel, IrrepLabel,
};
use crate::symbol::{symbol_product, vector_field_exact, MatrixSymbol};

/// A point of the SU(2) weight lattice, stored as twice the weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightLatticePoint {
    pub twice_weight: i64,
}

impl WeightLatticePoint {
    pub const TWICE_RHO: i64 = 1;

    pub fn new(twice_weight: i64) -> Self {
        Self { twice_weight }
    }

    /// `ω(ξ + ρ) − ρ`.
    pub fn reflect(self) -> Self {
        Self::new(-self.twice_weight - 2 * Self::TWICE_RHO)
    }

    /// Dominant representative and the sign of the Weyl element reaching
    /// it; `None` on the wall `ξ + ρ = 0`.
    pub fn dominant(self) -> Option<(u32, f64)> {
        match self.twice_weight {
            w if w >= 0 => Some((w as u32, 1.0)),
            -1 => None,
            w => Some(((-w - 2) as u32, -1.0)),
        }
    }

    /// The Weyl orbit `{ξ, −ξ}` of the weight itself.
    pub fn orbit(self) -> Vec<Self> {
        if self.twice_weight == 0 {
            vec![self]
        } else {
            vec![self, Self::new(-self.twice_weight)]
        }
    }
}

/// `d_ξ = (ξ + ρ, α)/(ρ, α)`, signed off the dominant chamber.
pub fn weyl_dimension(w: WeightLatticePoint) -> f64 {
    (w.twice_weight + WeightLatticePoint::TWICE_RHO) as f64
}

/// `χ_ξ(exp tH) = sin((2ℓ+1)t/2)/sin(t/2)` where `t` is the rotation angle.
pub fn weyl_character(w: WeightLatticePoint, t: f64) -> Complex64 {
    let n = weyl_dimension(w);
    let den = (t / 2.0).sin();
    let v = if den.abs() < 1e-8 {
        n * (n * t / 2.0).cos() / (t / 2.0).cos()
    } else {
        (n * t / 2.0).sin() / den
    };
    Complex64::new(v, 0.0)
}

/// `Σ_{ξ'∈O_ξ} χ_{ξ'}` and `Σ_{ξ'∈O_ξ} e^{2πi(ξ', x)}` at angle `t`.
pub fn orbit_sums(w: WeightLatticePoint, t: f64) -> (Complex64, Complex64) {
    let orbit = w.orbit();
    let chars = orbit.iter().map(|&p| weyl_character(p, t)).sum();
    let exps = orbit
        .iter()
        .map(|p| Complex64::from_polar(1.0, p.twice_weight as f64 * t / 2.0))
        .sum();
    (chars, exps)
}

/// `Σ_{ξ'∈O_ξ} χ_{ξ'}χ_{ξ*}` and `Σ_{ξ'∈O_ξ} χ_{ξ*+ξ'}` at angle `t`.
pub fn orbit_product_sums(
    w: WeightLatticePoint,
    star: WeightLatticePoint,
    t: f64,
) -> (Complex64, Complex64) {
    let orbit = w.orbit();
    let cs = weyl_character(star, t);
    let lhs = orbit.iter().map(|&p| weyl_character(p, t) * cs).sum();
    let rhs = orbit
        .iter()
        .map(|p| {
            weyl_character(
                WeightLatticePoint::new(star.twice_weight + p.twice_weight),
                t,
            )
        })
        .sum();
    (lhs, rhs)
}

/// `∫ χ_a \bar χ_b dg` by quadrature on `grid`.
pub fn character_pairing(
    a: WeightLatticePoint,
    b: WeightLatticePoint,
    grid: &Arc<GroupGrid>,
) -> Result<Complex64> {
    if !grid.model().is_su2() {
        return Err(Error::ModelMismatch {
            expected: "su2".into(),
            found: grid.model().to_string(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() {
        let t = grid.element(i).unwrap().class_angle();
        acc += weyl_character(a, t) * weyl_character(b, t).conj() * grid.weights()[i];
    }
    Ok(acc)
}

/// Behaviour under the Weyl reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// Symbol values `σ_ξ`, invariant under the reflection.
    Even,
    /// Character coefficients such as `d_ξ` or `d_ξσ_ξ`, changing sign.
    Odd,
}

/// Scalar sequence on dominant labels `2ℓ = 0..=max`, extended to the
/// lattice according to its parity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralSequence {
    parity: Parity,
    values: Vec<Complex64>,
}

impl CentralSequence {
    pub fn new(parity: Parity, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyRange);
        }
        Ok(Self { parity, values })
    }

    pub fn from_fn<F: FnMut(u32) -> Complex64>(parity: Parity, max: u32, f: F) -> Self {
        Self {
            parity,
            values: (0..=max).map(f).collect(),
        }
    }

    /// Symbol values `σ_ξ` read off a symbol's `(0, 0)` entries.
    pub fn from_symbol(sigma: &MatrixSymbol, max: u32) -> Result<Self> {
        if !sigma.model().is_su2() {
            return Err(Error::ModelMismatch {
                expected: "su2".into(),
                found: sigma.model().to_string(),
            });
        }
        if sigma.trusted_band() < max {
            return Err(Error::RangeNotExact {
                range: max,
                exact: sigma.trusted_band() as i64,
            });
        }
        Ok(Self::from_fn(Parity::Even, max, |w| {
            sigma.value(&IrrepLabel::Su2(w))[(0, 0)]
        }))
    }

    /// The dimensions `d_ξ`, an odd sequence.
    pub fn dimensions(max: u32) -> Self {
        Self::from_fn(Parity::Odd, max, |w| Complex64::new((w + 1) as f64, 0.0))
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Largest dominant `2ℓ` stored.
    pub fn max(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at any lattice point; `None` beyond the stored range.
    pub fn value(&self, w: i64) -> Option<Complex64> {
        match WeightLatticePoint::new(w).dominant() {
            None => Some(match self.parity {
                Parity::Odd => Complex64::new(0.0, 0.0),
                // the wall value is never weighted by a nonzero d
                Parity::Even => self.values[0],
            }),
            Some((dw, sign)) => {
                let v = *self.values.get(dw as usize)?;
                Some(match self.parity {
                    Parity::Even => v,
                    Parity::Odd => v * sign,
                })
            }
        }
    }

    /// Character coefficients `d_ξσ_ξ` (odd) of an even sequence, or the
    /// sequence itself if already odd.
    pub fn coefficients(&self) -> Self {
        match self.parity {
            Parity::Odd => self.clone(),
            Parity::Even => Self::from_fn(Parity::Odd, self.max(), |w| {
                self.values[w as usize] * (w + 1) as f64
            }),
        }
    }

    /// `σ(ξ) = σ_ξ I`, with `σ_ξ = τ_ξ/d_ξ` for odd sequences; exact up to
    /// the stored range.
    pub fn as_symbol(&self) -> MatrixSymbol {
        let model = GroupModel::su2();
        MatrixSymbol::scalar_fn(&model, self.max(), |l| {
            let w = l.twice_spin().unwrap();
            let v = self.values[w as usize];
            match self.parity {
                Parity::Even => v,
                Parity::Odd => v / (w + 1) as f64,
            }
        })
    }

    /// `(2ℓ, re, im)` triples.
    pub fn triples(&self) -> Vec<(u32, f64, f64)> {
        self.values
            .iter()
            .enumerate()
            .map(|(w, v)| (w as u32, v.re, v.im))
            .collect()
    }

    pub fn from_triples(parity: Parity, triples: &[(u32, f64, f64)]) -> Result<Self> {
        let max = triples.iter().map(|t| t.0).max().ok_or(Error::EmptyRange)?;
        let mut values = vec![None; max as usize + 1];
        for &(w, re, im) in triples {
            values[w as usize] = Some(Complex64::new(re, im));
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(w, v)| v.ok_or_else(|| Error::Parse(format!("missing value at 2l = {w}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parity, values)
    }

    pub fn max_abs_diff(&self, other: &Self, up_to: u32) -> f64 {
        (0..=up_to as usize)
            .map(|w| (self.values[w] - other.values[w]).norm())
            .fold(0.0, f64::max)
    }

    /// `2τ_w − τ_{w−s} − τ_{w+s}` on the coefficients, returned with the
    /// parity of the input.
    fn stencil(&self, step: i64) -> Result<Self> {
        if (self.max() as i64) < step {
            return Err(Error::MarginExceeded {
                margin: step as u32,
                exact: self.max(),
            });
        }
        let tau = self.coefficients();
        let out_max = self.max() - step as u32;
        let at = |w: i64| tau.value(w).unwrap();
        Ok(Self::from_fn(self.parity, out_max, |w| {
            let w = w as i64;
            let v = at(w) * 2.0 - at(w - step) - at(w + step);
            match self.parity {
                Parity::Odd => v,
                Parity::Even => v / (w + 1) as f64,
            }
        }))
    }
}

/// The second difference `Δ₂τ_ℓ = 2τ_ℓ − τ_{ℓ−1} − τ_{ℓ+1}` on the
/// coefficients `τ = dσ`, so that `d_ξ 𝔸(σI) = Δ₂(dσ) I`.
pub fn delta2(s: &CentralSequence) -> Result<CentralSequence> {
    s.stencil(2)
}

/// Weiss' difference: multiplication by `γ = χ_{1/2} − 2` on the group,
/// a second difference with half-integer steps on the coefficients.
pub fn nweiss_delta(s: &CentralSequence) -> Result<CentralSequence> {
    // γχ_w = χ_{w+1} + χ_{w−1} − 2χ_w
    s.stencil(1).map(|d| d.scale(-1.0))
}

impl CentralSequence {
    fn scale(mut self, c: f64) -> Self {
        for v in &mut self.values {
            *v *= c;
        }
        self
    }
}

/// Multiplication by a central function `γ(t)` of the rotation angle,
/// carried out on the group: `ℱ γ ℱ⁻¹`. `reach` is the band of `γ`; the
/// output is exact on `2ℓ ≤ max − reach`.
pub fn central_multiplication<F>(
    s: &CentralSequence,
    reach: u32,
    gamma: F,
) -> Result<CentralSequence>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if s.max() < reach {
        return Err(Error::MarginExceeded {
            margin: reach,
            exact: s.max(),
        });
    }
    let model = GroupModel::su2();
    let grid = crate::harmonic::cached_grid(&model, s.max() + reach)?;
    let f = fourier_inverse(&s.as_symbol(), &grid)?;
    let samples = f.samples().to_vec();
    let g = GroupFunction::from_index_fn(grid.clone(), {
        let grid = grid.clone();
        move |i| samples[i] * gamma(grid.element(i).unwrap().class_angle())
    });
    let max = s.max() - reach;
    let out = fourier_forward(&g, max)?.with_exact_band(Some(max));
    let sym = CentralSequence::from_symbol(&out, max)?;
    Ok(match s.parity {
        Parity::Even => sym,
        Parity::Odd => sym.coefficients(),
    })
}

/// `γ(exp τ) = Σ_ω e^{2πi(ωρ, τ)} − |W|` as a function of the rotation angle.
pub fn weiss_gamma(t: f64) -> f64 {
    2.0 * (t / 2.0).cos() - 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypoellipticityReport {
    pub order: usize,
    pub range: u32,
    /// `max |Δ_k d_ξ|/|d_ξ| ⟨ξ⟩^k`.
    pub max_ratio: f64,
    pub argmax: u32,
    /// `max d_ξ/⟨ξ⟩`, the polynomial bound with exponent `|Δ₀⁺| = 1`.
    pub polynomial_bound: f64,
}

/// Forward lattice differences of order `k` with step `1/2` in `ℓ`.
pub fn hypoellipticity_ratio(k: usize, range: u32) -> Result<HypoellipticityReport> {
    if range == 0 {
        return Err(Error::EmptyRange);
    }
    let binom = |n: usize, r: usize| -> f64 {
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let mut best = (0.0, 0);
    let mut poly: f64 = 0.0;
    for w in 0..=range {
        let d = |j: usize| weyl_dimension(WeightLatticePoint::new(w as i64 + j as i64));
        let diff: f64 = (0..=k)
            .map(|j| {
                let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * binom(k, j) * d(j)
            })
            .sum();
        let br = bracket(&IrrepLabel::Su2(w));
        let r = diff.abs() / d(0) * br.powi(k as i32);
        if r > best.0 {
            best = (r, w);
        }
        poly = poly.max(d(0) / br);
    }
    Ok(HypoellipticityReport {
        order: k,
        range,
        max_ratio: best.0,
        argmax: best.1,
        polynomial_bound: poly,
    })
}

/// `σ_{R_Z}(ξ) = λ_ξ^{−1}σ_Z(ξ)` for a unit vector field `Z`, zero on the
/// trivial label.
pub fn riesz_symbol(model: &GroupModel, z: &[f64], band: u32) -> Result<MatrixSymbol> {
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalised { norm });
    }
    let sz = vector_field_exact(model, z, band)?;
    let inv = MatrixSymbol::scalar_fn(model, band, |l| {
        let lam = casimir_lambda(l);
        Complex64::new(if lam > 0.0 { 1.0 / lam } else { 0.0 }, 0.0)
    });
    Ok(symbol_product(&inv, &sz)?.with_exact_band(sz.exact_band()))
}

/// `s_ℓ = f(λ_ℓ²)` on `2ℓ ≤ range`; the caller decides `f(0)`.
pub fn function_of_laplacian<F: Fn(f64) -> Complex64>(f: F, range: u32) -> CentralSequence {
    CentralSequence::from_fn(Parity::Even, range, |w| {
        f(casimir_lambda_sq(&IrrepLabel::Su2(w)))
    })
}
