//! Small dense complex matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    match m.shape() {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => m[(0, 0)].norm(),
        _ => {
            if is_diagonal(m) {
                return m.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
            }
            m.clone()
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .fold(0.0, f64::max)
        }
    }
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &CMatrix) -> f64 {
    hs_norm_sq(m).sqrt()
}

pub fn hs_norm_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn is_diagonal(m: &CMatrix) -> bool {
    let (r, cols) = m.shape();
    for j in 0..cols {
        for i in 0..r {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// `‖m m* - I‖_HS`
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    hs_norm(&(prod - CMatrix::identity(n, n)))
}

/// Angular momentum matrices `(J_x, J_y, J_z)` for the given twice-spin, rows
/// and columns indexed by `m = -j..=j` ascending.
pub fn spin_matrices(twice_spin: u32) -> (CMatrix, CMatrix, CMatrix) {
    let d = twice_spin as usize + 1;
    let j = twice_spin as f64 / 2.0;
    let mut jp = CMatrix::zeros(d, d);
    let mut jz = CMatrix::zeros(d, d);
    for k in 0..d {
        let m = k as f64 - j;
        jz[(k, k)] = c(m, 0.0);
        if k + 1 < d {
            jp[(k + 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    (jx, jy, jz)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_of_rotation_is_one() {
        let (s, co) = (0.3f64.sin(), 0.3f64.cos());
        let m = CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0)]);
        assert!((op_norm(&m) - 1.0).abs() < 1e-14);
        assert!((hs_norm(&m) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spin_commutator() {
        for t in 1..6 {
            let (jx, jy, jz) = spin_matrices(t);
            let comm = &jx * &jy - &jy * &jx;
            assert!(hs_norm(&(comm - jz * I)) < 1e-12);
        }
    }
}
