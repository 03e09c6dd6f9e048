//! Dense scalar symbols on a frequency box of the torus.

use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::MatrixSymbol;
use crate::error::{Error, Result};
use crate::harmonic::{GroupModel, IrrepLabel};
use crate::linalg::CMatrix;

/// Values `σ(k)` for `|k|∞ ≤ radius`, all trusted.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusArray {
    n: usize,
    radius: u32,
    data: Vec<Complex64>,
}

impl TorusArray {
    pub fn from_fn<F>(n: usize, radius: u32, f: F) -> Self
    where
        F: Fn(&[i64]) -> Complex64 + Sync,
    {
        let side = 2 * radius as usize + 1;
        let total = side.pow(n as u32);
        let data = (0..total)
            .into_par_iter()
            .map_init(
                || vec![0i64; n],
                |k, idx| {
                    Self::unflatten_into(radius, idx, k);
                    f(k)
                },
            )
            .collect();
        Self { n, radius, data }
    }

    /// Dense copy of a torus symbol; absent labels count as zero when the
    /// symbol is complete.
    pub fn from_symbol(sigma: &MatrixSymbol) -> Result<Self> {
        let n = sigma
            .model()
            .torus_dim()
            .ok_or_else(|| Error::Unsupported("dense arrays need a torus model".into()))?;
        let radius = sigma.band().min(sigma.trusted_band());
        Ok(Self::from_fn(n, radius, |k| {
            sigma
                .get(&IrrepLabel::Torus(k.to_vec()))
                .map_or(Complex64::new(0.0, 0.0), |m| m[(0, 0)])
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }

    fn unflatten_into(radius: u32, mut idx: usize, k: &mut [i64]) {
        let side = 2 * radius as usize + 1;
        for j in (0..k.len()).rev() {
            k[j] = (idx % side) as i64 - radius as i64;
            idx /= side;
        }
    }

    fn stride(&self, axis: usize) -> usize {
        self.side().pow((self.n - 1 - axis) as u32)
    }

    pub fn index(&self, k: &[i64]) -> Option<usize> {
        let r = self.radius as i64;
        let mut idx = 0usize;
        for &kj in k {
            if kj.abs() > r {
                return None;
            }
            idx = idx * self.side() + (kj + r) as usize;
        }
        Some(idx)
    }

    pub fn get(&self, k: &[i64]) -> Option<Complex64> {
        self.index(k).map(|i| self.data[i])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    /// Frequency vector of a flat index.
    pub fn freq(&self, idx: usize) -> Vec<i64> {
        let mut k = vec![0; self.n];
        Self::unflatten_into(self.radius, idx, &mut k);
        k
    }

    /// Writes the frequency of `idx` into `k`.
    pub fn freq_into(&self, idx: usize, k: &mut [i64]) {
        Self::unflatten_into(self.radius, idx, k)
    }

    /// Box of radius one less; `f` gets the flat index of `k` in `self`.
    fn shrink<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(usize) -> Complex64 + Sync,
    {
        if self.radius == 0 {
            return Err(Error::MarginExceeded {
                margin: 1,
                exact: 0,
            });
        }
        Ok(Self::from_fn(self.n, self.radius - 1, |k| {
            f(self.index(k).unwrap())
        }))
    }

    /// `σ(k − e) − σ(k)` for the character `e^{2πi e·x}`, `e = sign·e_axis`.
    pub fn difference(&self, axis: usize, sign: i64) -> Result<Self> {
        let st = self.stride(axis) as isize * sign as isize;
        self.shrink(|i| self.data[(i as isize - st) as usize] - self.data[i])
    }

    /// `2nσ(k) − Σ_j (σ(k+e_j) + σ(k−e_j))`.
    pub fn laplace(&self) -> Result<Self> {
        let strides: Vec<usize> = (0..self.n).map(|j| self.stride(j)).collect();
        let n = self.n;
        self.shrink(|i| {
            let mut acc = self.data[i] * (2 * n) as f64;
            for &st in &strides {
                acc -= self.data[i + st] + self.data[i - st];
            }
            acc
        })
    }

    pub fn to_symbol(&self) -> MatrixSymbol {
        let model = GroupModel::torus(self.n).unwrap();
        MatrixSymbol::from_fn(&model, self.radius, |l| {
            CMatrix::from_element(1, 1, self.get(l.freq().unwrap()).unwrap())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::difference::{
        apply_difference_shift, laplace_difference_shift, DifferenceWord, Elementary,
    };

    #[test]
    fn matches_symbol_route() {
        let a = TorusArray::from_fn(2, 5, |k| {
            Complex64::new(k[0] as f64 * k[1] as f64, (k[0] * k[0]) as f64)
        });
        let s = a.to_symbol();
        let m = GroupModel::torus(2).unwrap();
        let e = Elementary::new(&m, IrrepLabel::Torus(vec![0, -1]), 0, 0).unwrap();
        let d1 = apply_difference_shift(&DifferenceWord::single(e), &s).unwrap();
        let d2 = a.difference(1, -1).unwrap().to_symbol();
        assert!(d1.max_hs_diff(&d2, 4) < 1e-14);
        let l1 = laplace_difference_shift(&s).unwrap();
        let l2 = a.laplace().unwrap().to_symbol();
        assert!(l1.max_hs_diff(&l2, 4) < 1e-12);
        assert_eq!(a.laplace().unwrap().radius(), 4);
    }
}
