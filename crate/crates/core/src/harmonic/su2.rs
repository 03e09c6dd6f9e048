//! SU(2) elements, Euler angles and Wigner matrices.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{spin_matrices, CMatrix, I};

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

/// Euler angles with `φ ∈ [0,2π)`, `θ ∈ [0,π]`, `ψ ∈ [0,4π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Result<Self> {
        let check = |name: &'static str, v: f64, lo: f64, hi: f64, closed: bool| {
            let ok = v.is_finite() && v >= lo && if closed { v <= hi } else { v < hi };
            if ok {
                Ok(())
            } else {
                Err(Error::AngleOutOfRange {
                    name,
                    value: v,
                    lo,
                    hi,
                })
            }
        };
        check("phi", phi, 0.0, TWO_PI, false)?;
        check("theta", theta, 0.0, PI, true)?;
        check("psi", psi, 0.0, FOUR_PI, false)?;
        Ok(Self { phi, theta, psi })
    }

    pub fn identity() -> Self {
        Self {
            phi: 0.0,
            theta: 0.0,
            psi: 0.0,
        }
    }
}

/// A unit quaternion stored as the first row `(a, b)` of
/// `[[a, b], [-b̄, ā]]`, the spin-1/2 matrix in the ascending basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Element {
    pub a: Complex64,
    pub b: Complex64,
}

impl Su2Element {
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_euler(e: &EulerAngles) -> Self {
        let (s, c) = (e.theta / 2.0).sin_cos();
        Self {
            a: Complex64::from_polar(c, (e.phi + e.psi) / 2.0),
            b: Complex64::from_polar(s, (e.phi - e.psi) / 2.0),
        }
    }

    /// Euler angles in the canonical ranges.
    pub fn to_euler(&self) -> EulerAngles {
        let (ra, rb) = (self.a.norm(), self.b.norm());
        let theta = (2.0 * rb.atan2(ra)).clamp(0.0, PI);
        let alpha = if ra > 0.0 { self.a.arg() } else { 0.0 };
        let beta = if rb > 0.0 { self.b.arg() } else { 0.0 };
        let mut phi = alpha + beta;
        let mut psi = alpha - beta;
        let k = (phi / TWO_PI).floor();
        phi -= TWO_PI * k;
        psi += TWO_PI * k;
        psi = psi.rem_euclid(FOUR_PI);
        if phi >= TWO_PI {
            phi -= TWO_PI;
            psi = (psi + TWO_PI).rem_euclid(FOUR_PI);
        }
        if psi >= FOUR_PI {
            psi = 0.0;
        }
        EulerAngles {
            phi: phi.max(0.0),
            theta,
            psi,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a - self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// `exp(t X)` for `X = x₁D₁ + x₂D₂ + x₃D₃` in the frame where `D₃ = ∂/∂ψ`.
    pub fn exp(x: [f64; 3], t: f64) -> Self {
        // spin-1/2 image of X is -i(x·J) with J = σ/2
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if norm == 0.0 {
            return Self::identity();
        }
        let half = t * norm / 2.0;
        let (s, c) = half.sin_cos();
        let u = [x[0] / norm, x[1] / norm, x[2] / norm];
        // exp(-i half (u·σ)) in the ascending basis (m = -1/2, +1/2):
        // σ_z = diag(-1, 1), σ_x swaps, σ_y = [[0, i], [-i, 0]]
        let a = Complex64::new(c, s * u[2]);
        let b = Complex64::new(s * u[1], -s * u[0]);
        Self { a, b }
    }

    /// Rotation angle `t ∈ [0, 2π]` of the conjugacy class; `g ~ exp(t D₃)`.
    pub fn class_angle(&self) -> f64 {
        2.0 * self.a.re.clamp(-1.0, 1.0).acos()
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[self.a, self.b, -self.b.conj(), self.a.conj()])
    }

    pub fn distance(&self, o: &Self) -> f64 {
        ((self.a - o.a).norm_sqr() + (self.b - o.b).norm_sqr()).sqrt()
    }
}

struct SpinBasis {
    vecs: CMatrix,
    eig: Vec<f64>,
}

fn spin_basis(twice_spin: u32) -> Arc<SpinBasis> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<SpinBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&twice_spin) {
        return b.clone();
    }
    let (_, jy, _) = spin_matrices(twice_spin);
    let eig = jy.symmetric_eigen();
    // eigenvalues of J_y are exactly the magnetic numbers
    let basis = Arc::new(SpinBasis {
        vecs: eig.eigenvectors,
        eig: eig
            .eigenvalues
            .iter()
            .map(|&v| (2.0 * v).round() / 2.0)
            .collect(),
    });
    cache.lock().unwrap().insert(twice_spin, basis.clone());
    basis
}

/// Wigner little-d matrix `d(θ) = exp(-iθJ_y)`, ascending magnetic numbers.
pub fn little_d(twice_spin: u32, theta: f64) -> DMatrix<f64> {
    let n = twice_spin as usize + 1;
    if twice_spin == 0 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    let basis = spin_basis(twice_spin);
    let phases: Vec<Complex64> = basis
        .eig
        .iter()
        .map(|&m| Complex64::from_polar(1.0, -theta * m))
        .collect();
    let mut scaled = basis.vecs.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[k];
    }
    let full = scaled * basis.vecs.adjoint();
    DMatrix::from_fn(n, n, |i, j| full[(i, j)].re)
}

/// `ξ^ℓ(φ,θ,ψ)_{mn} = e^{-imφ} d^ℓ_{mn}(θ) e^{-inψ}`.
pub fn wigner_matrix(twice_spin: u32, e: &EulerAngles) -> Result<CMatrix> {
    let e = EulerAngles::new(e.phi, e.theta, e.psi)?;
    Ok(wigner_unchecked(twice_spin, &e))
}

pub fn wigner_of(twice_spin: u32, g: &Su2Element) -> CMatrix {
    wigner_unchecked(twice_spin, &g.to_euler())
}

fn wigner_unchecked(twice_spin: u32, e: &EulerAngles) -> CMatrix {
    let n = twice_spin as usize + 1;
    let d = little_d(twice_spin, e.theta);
    let m = |k: usize| k as f64 - twice_spin as f64 / 2.0;
    CMatrix::from_fn(n, n, |i, j| {
        Complex64::from_polar(d[(i, j)], -m(i) * e.phi - m(j) * e.psi)
    })
}

/// Symbol of a left-invariant vector field, `(Xξ)(1) = -i(x·J)`.
pub fn generator_image(twice_spin: u32, x: [f64; 3]) -> CMatrix {
    let (jx, jy, jz) = spin_matrices(twice_spin);
    (jx * Complex64::from(x[0]) + jy * Complex64::from(x[1]) + jz * Complex64::from(x[2])) * -I
}

/// Character `χ_ℓ(t) = sin((2ℓ+1)t/2) / sin(t/2)` with its limits.
pub fn character(twice_spin: u32, t: f64) -> f64 {
    let s = (t / 2.0).sin();
    let d = twice_spin as f64 + 1.0;
    if s.abs() < 1e-8 {
        // t near 2πk: χ = d·(cos(t/2))^{2ℓ} sign
        let c = (t / 2.0).cos();
        return d * c.signum().powi(twice_spin as i32);
    }
    (d * t / 2.0).sin() / s
}
