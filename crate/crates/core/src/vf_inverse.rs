//! Inverses of `X + c` for a real left-invariant vector field `X` on SU(2).
//!
//! All symbols are returned in the standard bases. The frame `u` with
//! `ξ(u)⁻¹σ_X(ξ)ξ(u)` diagonal is kept alongside; the differences used in
//! the recursion are those of the fundamental representation in the
//! rotated basis `η(u)⁻¹ η η(u)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{generator_image, wigner_of, GroupModel, IrrepLabel, Su2Element};
use crate::linalg::{hs_norm, CMatrix};
use crate::multiplier::{check_symbol_class, MultiplierReport, SymbolClassSpec};
use crate::symbol::{apply_differences, factor_band, DifferenceWord, Elementary, MatrixSymbol};

/// Smallest admissible distance of `−c` to the spectrum of `σ_X(ξ)`.
pub const SPECTRAL_MARGIN: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    x: [f64; 3],
    frame: Su2Element,
    tau: [Complex64; 2],
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

impl VectorFieldSpec {
    pub fn new(x: [f64; 3]) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutOfRange(
                "vector field coefficients must be finite".into(),
            ));
        }
        let frame = aligning_frame(x);
        let u = wigner_of(1, &frame);
        let diag = u.adjoint() * generator_image(1, x) * &u;
        // 𝔻σ_X = −(Xη)(1) under f̂(ξ) = ∫ f ξ(g)* dg
        let tau = [-diag[(0, 0)], -diag[(1, 1)]];
        Ok(Self { x, frame, tau })
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.x
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn frame(&self) -> &Su2Element {
        &self.frame
    }

    /// Basis change `ξ(u)` diagonalising `σ_X(ξ)`.
    pub fn diagonalising_unitary(&self, twice_spin: u32) -> CMatrix {
        wigner_of(twice_spin, &self.frame)
    }

    /// `σ_X(ξ)` in the diagonalising basis.
    pub fn diagonal_symbol(&self, twice_spin: u32) -> CMatrix {
        let u = self.diagonalising_unitary(twice_spin);
        u.adjoint() * generator_image(twice_spin, self.x) * u
    }

    /// Eigenvalues of `σ_X(ξ)`, imaginary parts ascending.
    pub fn spectrum(&self, twice_spin: u32) -> Vec<Complex64> {
        let n = twice_spin as usize + 1;
        let im = self.norm();
        // −i|x|m with m running from ℓ down to −ℓ
        (0..n)
            .map(|k| Complex64::new(0.0, im * (k as f64 - twice_spin as f64 / 2.0)))
            .collect()
    }

    /// `τ_ij` for the fundamental representation in the rotated basis.
    pub fn tau_matrix(&self) -> CMatrix {
        let u = self.diagonalising_unitary(1);
        -(u.adjoint() * generator_image(1, self.x) * u)
    }

    pub fn tau(&self) -> [Complex64; 2] {
        self.tau
    }
}

/// A group element whose spin-1/2 matrix diagonalises `σ_X`, with the
/// diagonal entries' imaginary parts ascending.
fn aligning_frame(x: [f64; 3]) -> Su2Element {
    let target = generator_image(1, x);
    if target.iter().all(|z| z.norm() == 0.0) {
        return Su2Element::identity();
    }
    // σ_X = −iH with H Hermitian; ascending imaginary parts = descending H
    let h = &target * Complex64::new(0.0, 1.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let (hi, lo) = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let mut u = CMatrix::zeros(2, 2);
    u.set_column(0, &eig.eigenvectors.column(hi));
    u.set_column(1, &eig.eigenvectors.column(lo));
    let det = u.determinant();
    let fix = det.conj() / det.norm();
    for r in 0..2 {
        u[(r, 1)] *= fix;
    }
    let g = Su2Element {
        a: u[(0, 0)],
        b: u[(0, 1)],
    };
    let candidates = [
        g,
        g.inverse(),
        Su2Element {
            a: g.a.conj(),
            b: g.b.conj(),
        },
        Su2Element {
            a: g.a.conj(),
            b: g.b.conj(),
        }
        .inverse(),
    ];
    let score = |g: &Su2Element| {
        let w = wigner_of(1, g);
        let d = w.adjoint() * &target * w;
        let off = d[(0, 1)].norm() + d[(1, 0)].norm();
        let order = if d[(0, 0)].im <= d[(1, 1)].im {
            0.0
        } else {
            1.0
        };
        off + order
    };
    candidates
        .into_iter()
        .min_by(|a, b| score(a).total_cmp(&score(b)))
        .unwrap()
}

/// `(spec(−X) − ℤτ₁₁ − ℤτ₂₂) ∩ {|c| ≤ bound}`.
pub fn exceptional_set(x: &VectorFieldSpec, bound: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    let push = |v: Complex64, out: &mut Vec<Complex64>| {
        if v.norm() <= bound + 1e-12 && !out.iter().any(|&w| close(w, v)) {
            out.push(v);
        }
    };
    let n = x.norm();
    if n == 0.0 {
        push(Complex64::new(0.0, 0.0), &mut out);
        return out;
    }
    // spin ℓ carries eigenvalues i|x|m, |m| ≤ ℓ
    let top = (2.0 * bound / n).ceil() as u32 + 1;
    for tj in 0..=top {
        for e in x.spectrum(tj) {
            push(-e, &mut out);
        }
    }
    // closure under integer shifts by the τ_jj
    let mut frontier = out.clone();
    while let Some(v) = frontier.pop() {
        for t in x.tau() {
            for s in [1.0, -1.0] {
                let w = v - t * s;
                if w.norm() <= bound + 1e-12 && !out.iter().any(|&z| close(z, w)) {
                    out.push(w);
                    frontier.push(w);
                }
            }
        }
    }
    out.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    out
}

pub fn is_exceptional(x: &VectorFieldSpec, c: Complex64) -> bool {
    exceptional_set(x, c.norm() + 1.0)
        .iter()
        .any(|&e| (e - c).norm() < SPECTRAL_MARGIN)
}

/// `(σ_X(ξ) + cI)⁻¹` on `2ℓ ≤ band`.
pub fn invert_vf_symbol(x: &VectorFieldSpec, c: Complex64, band: u32) -> Result<MatrixSymbol> {
    shifted_inverse(x, c, band)
}

fn shifted_inverse(x: &VectorFieldSpec, c: Complex64, band: u32) -> Result<MatrixSymbol> {
    let model = GroupModel::su2();
    let mut out = MatrixSymbol::zero(&model);
    for tj in 0..=band {
        let spec = x.spectrum(tj);
        if let Some(e) = spec.iter().find(|&&e| (e + c).norm() < SPECTRAL_MARGIN) {
            return Err(Error::Exceptional {
                label: IrrepLabel::Su2(tj).to_string(),
                c_re: c.re,
                c_im: c.im,
                eig_re: e.re,
                eig_im: e.im,
            });
        }
        let u = x.diagonalising_unitary(tj);
        let d = x.diagonal_symbol(tj);
        let inv = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(tj as usize + 1, |i, _| {
            Complex64::new(1.0, 0.0) / (d[(i, i)] + c)
        }));
        out.insert(IrrepLabel::Su2(tj), &u * inv * u.adjoint())?;
    }
    Ok(out.with_exact_band(Some(band)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecursionResidual {
    /// `max ‖𝔻_jj σ⁻¹ + τ_jj(σ_X + c)⁻¹(σ_X + c + τ_jj)⁻¹‖_HS`.
    pub diagonal: f64,
    /// `max ‖𝔻_ij σ⁻¹‖_HS` over `i ≠ j`.
    pub off_diagonal: f64,
    /// Labels checked: `2ℓ ≤ exact_band`.
    pub exact_band: u32,
}

impl RecursionResidual {
    pub fn max(&self) -> f64 {
        self.diagonal.max(self.off_diagonal)
    }
}

/// Differences `𝔻_ij` of the fundamental representation in the rotated
/// basis, applied to `sigma`, indexed `[i][j]`.
fn rotated_differences(
    x: &VectorFieldSpec,
    sigma: &MatrixSymbol,
) -> Result<Vec<Vec<MatrixSymbol>>> {
    let model = GroupModel::su2();
    let fund = IrrepLabel::Su2(1);
    let mut words = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            words.push(DifferenceWord::single(Elementary::new(
                &model,
                fund.clone(),
                a,
                b,
            )?));
        }
    }
    let std = apply_differences(&words, sigma)?;
    let u = x.diagonalising_unitary(1);
    let mut out = vec![Vec::new(), Vec::new()];
    for (i, row) in out.iter_mut().enumerate() {
        for j in 0..2 {
            // q̃_ij = Σ_ab conj(U_ai) q_ab U_bj
            let mut acc = std[0].scale(u[(0, i)].conj() * u[(0, j)]);
            for a in 0..2 {
                for b in 0..2 {
                    if a + b > 0 {
                        acc = acc.add(&std[2 * a + b].scale(u[(a, i)].conj() * u[(b, j)]))?;
                    }
                }
            }
            row.push(acc);
        }
    }
    Ok(out)
}

/// Residual of `𝔻_jj σ_{X+c}⁻¹ = −τ_jj(σ_X + c)⁻¹(σ_X + c + τ_jj)⁻¹` and of
/// `𝔻_ij σ_{X+c}⁻¹ = 0` for `i ≠ j`, with the differences computed by
/// quadrature. `j` is zero based.
pub fn recursion_residual(
    x: &VectorFieldSpec,
    c: Complex64,
    j: usize,
    band: u32,
) -> Result<RecursionResidual> {
    if j > 1 {
        return Err(Error::OutOfRange(format!(
            "index {j} outside the fundamental representation"
        )));
    }
    let tau = x.tau()[j];
    if band == 0 {
        return Err(Error::MarginExceeded {
            margin: 1,
            exact: 0,
        });
    }
    let inv = invert_vf_symbol(x, c, band)?;
    let shifted = invert_vf_symbol(x, c + tau, band)?;
    let diffs = rotated_differences(x, &inv)?;
    let exact = diffs[j][j].exact_band().unwrap_or(band - 1);
    let mut diagonal: f64 = 0.0;
    for (l, d) in diffs[j][j].iter() {
        if l.band() <= exact {
            let rhs = inv.value(l) * shifted.value(l) * -tau;
            diagonal = diagonal.max(hs_norm(&(d - rhs)));
        }
    }
    let mut off_diagonal: f64 = 0.0;
    for (i, row) in diffs.iter().enumerate() {
        for (k, d) in row.iter().enumerate() {
            if i != k {
                for (l, m) in d.iter() {
                    if l.band() <= exact {
                        off_diagonal = off_diagonal.max(hs_norm(m));
                    }
                }
            }
        }
    }
    Ok(RecursionResidual {
        diagonal,
        off_diagonal,
        exact_band: exact,
    })
}

/// `σ_{X+c}⁻¹ ∈ S⁰₀` on `2ℓ ≤ range`; the class grading carries the
/// Sobolev order `κ|1/p − 1/2|`.
pub fn verify_s00(x: &VectorFieldSpec, c: Complex64, range: u32) -> Result<MultiplierReport> {
    let model = GroupModel::su2();
    let kappa = model.kappa();
    let band = range + factor_band(&model) * kappa as u32;
    let inv = invert_vf_symbol(x, c, band)?;
    check_symbol_class(&inv.into(), &SymbolClassSpec::new(0.0, 0.0, kappa)?, range)
}

/// Whether `σ_X(ξ)` is diagonal in the frame for every `2ℓ ≤ band`.
pub fn frame_diagonalises(x: &VectorFieldSpec, band: u32, tol: f64) -> bool {
    (0..=band).all(|tj| {
        let d = x.diagonal_symbol(tj);
        d.iter().map(|z| z.norm_sqr()).sum::<f64>()
            - d.diagonal().iter().map(|z| z.norm_sqr()).sum::<f64>()
            <= tol * tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_diagonalise() {
        for x in [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -2.0],
            [1.0, 0.0, 0.0],
            [0.3, -0.4, 0.5],
        ] {
            let v = VectorFieldSpec::new(x).unwrap();
            assert!(frame_diagonalises(&v, 8, 1e-10), "{x:?}");
            for tj in 0..=6 {
                let d = v.diagonal_symbol(tj);
                let s = v.spectrum(tj);
                for i in 0..=tj as usize {
                    assert!((d[(i, i)] - s[i]).norm() < 1e-10, "{x:?} {tj}");
                }
            }
        }
    }

    #[test]
    fn tau_is_diagonal_and_traceless() {
        let v = VectorFieldSpec::new([0.2, 0.7, -0.1]).unwrap();
        let t = v.tau_matrix();
        assert!(t[(0, 1)].norm() < 1e-12 && t[(1, 0)].norm() < 1e-12);
        assert!((t[(0, 0)] + t[(1, 1)]).norm() < 1e-12);
    }
}
