//! Finitely supported matrix-valued functions on the unitary dual.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::{GroupModel, IrrepLabel};
use crate::linalg::{hs_norm, op_norm, CMatrix};

/// A matrix symbol `ξ ↦ σ(ξ) ∈ C^{d_ξ×d_ξ}`.
///
/// `exact_band == None` means the stored entries are the whole symbol (zero
/// elsewhere). `Some(b)` means the entries are a truncation that is only
/// trusted on labels of band at most `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSymbol {
    model: GroupModel,
    entries: BTreeMap<IrrepLabel, CMatrix>,
    exact_band: Option<u32>,
}

impl MatrixSymbol {
    /// The zero symbol.
    pub fn zero(model: &GroupModel) -> Self {
        Self {
            model: model.clone(),
            entries: BTreeMap::new(),
            exact_band: None,
        }
    }

    /// Truncation of an everywhere-defined symbol to labels of band ≤ `band`.
    pub fn from_fn<F>(model: &GroupModel, band: u32, mut f: F) -> Self
    where
        F: FnMut(&IrrepLabel) -> CMatrix,
    {
        let entries = model
            .labels_up_to(band)
            .into_iter()
            .map(|l| {
                let m = f(&l);
                (l, m)
            })
            .collect();
        Self {
            model: model.clone(),
            entries,
            exact_band: Some(band),
        }
    }

    /// `σ(ξ) = I` on every label of band ≤ `band`; the symbol of the identity.
    pub fn identity(model: &GroupModel, band: u32) -> Self {
        Self::from_fn(model, band, |l| {
            let d = l.dimension();
            CMatrix::identity(d, d)
        })
    }

    /// `σ(ξ) = s(ξ) I`.
    pub fn scalar_fn<F>(model: &GroupModel, band: u32, mut s: F) -> Self
    where
        F: FnMut(&IrrepLabel) -> Complex64,
    {
        Self::from_fn(model, band, |l| {
            let d = l.dimension();
            CMatrix::identity(d, d) * s(l)
        })
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn exact_band(&self) -> Option<u32> {
        self.exact_band
    }

    /// Marks the stored entries as complete (finitely supported symbol).
    pub fn complete(mut self) -> Self {
        self.exact_band = None;
        self
    }

    pub fn with_exact_band(mut self, band: Option<u32>) -> Self {
        self.exact_band = band;
        self
    }

    /// Largest band of a stored label.
    pub fn band(&self) -> u32 {
        self.entries.keys().map(|l| l.band()).max().unwrap_or(0)
    }

    /// Band up to which values are trustworthy: the exact band, or anything
    /// for complete symbols.
    pub fn trusted_band(&self) -> u32 {
        self.exact_band.unwrap_or(u32::MAX)
    }

    pub fn insert(&mut self, label: IrrepLabel, m: CMatrix) -> Result<()> {
        self.model.check_label(&label)?;
        let d = label.dimension();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                label: label.to_string(),
                rows: m.nrows(),
                cols: m.ncols(),
                dim: d,
            });
        }
        self.entries.insert(label, m);
        Ok(())
    }

    pub fn get(&self, label: &IrrepLabel) -> Option<&CMatrix> {
        self.entries.get(label)
    }

    /// Value at `label`, zero if absent.
    pub fn value(&self, label: &IrrepLabel) -> CMatrix {
        self.entries.get(label).cloned().unwrap_or_else(|| {
            let d = label.dimension();
            CMatrix::zeros(d, d)
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IrrepLabel, &CMatrix)> {
        self.entries.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &IrrepLabel> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(&IrrepLabel, &CMatrix) -> CMatrix,
    {
        Self {
            model: self.model.clone(),
            entries: self
                .entries
                .iter()
                .map(|(l, m)| (l.clone(), f(l, m)))
                .collect(),
            exact_band: self.exact_band,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, m| m * c)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.model.check_same(&other.model)?;
        let mut out = self.clone();
        for (l, m) in &other.entries {
            let e = out
                .entries
                .entry(l.clone())
                .or_insert_with(|| CMatrix::zeros(m.nrows(), m.ncols()));
            *e += m * Complex64::from(sign);
        }
        out.exact_band = min_exact(self.exact_band, other.exact_band);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// Keeps labels of band ≤ `band`.
    pub fn restrict(&self, band: u32) -> Self {
        Self {
            model: self.model.clone(),
            entries: self
                .entries
                .iter()
                .filter(|(l, _)| l.band() <= band)
                .map(|(l, m)| (l.clone(), m.clone()))
                .collect(),
            exact_band: Some(self.exact_band.map_or(band, |b| b.min(band))),
        }
    }

    /// `sup ‖σ(ξ)‖_op` over stored labels.
    pub fn sup_op_norm(&self) -> f64 {
        self.entries.values().map(op_norm).fold(0.0, f64::max)
    }

    /// Largest `‖σ(ξ) − τ(ξ)‖_HS` over labels of band ≤ `band` present in either.
    pub fn max_hs_diff(&self, other: &Self, band: u32) -> f64 {
        let mut worst: f64 = 0.0;
        for l in self.entries.keys().chain(other.entries.keys()) {
            if l.band() <= band {
                worst = worst.max(hs_norm(&(self.value(l) - other.value(l))));
            }
        }
        worst
    }

    /// Drops labels whose matrices are exactly zero.
    pub fn prune(mut self, tol: f64) -> Self {
        self.entries.retain(|_, m| hs_norm(m) > tol);
        self
    }
}

pub(crate) fn min_exact(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Pointwise product `(στ)(ξ) = σ(ξ)τ(ξ)` on the common support.
pub fn symbol_product(sigma: &MatrixSymbol, tau: &MatrixSymbol) -> Result<MatrixSymbol> {
    sigma.model.check_same(&tau.model)?;
    let mut out = MatrixSymbol::zero(&sigma.model);
    for (l, a) in &sigma.entries {
        if let Some(b) = tau.entries.get(l) {
            out.entries.insert(l.clone(), a * b);
        }
    }
    out.exact_band = min_exact(sigma.exact_band, tau.exact_band);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn dimension_checked() {
        let mut s = MatrixSymbol::zero(&GroupModel::su2());
        assert!(s.insert(IrrepLabel::Su2(2), CMatrix::zeros(2, 2)).is_err());
        assert!(s
            .insert(IrrepLabel::Torus(vec![1]), CMatrix::zeros(1, 1))
            .is_err());
        s.insert(IrrepLabel::Su2(2), CMatrix::identity(3, 3))
            .unwrap();
        assert_eq!(s.band(), 2);
        assert_eq!(s.exact_band(), None);
    }

    #[test]
    fn product_with_identity() {
        let m = GroupModel::su2();
        let s = MatrixSymbol::from_fn(&m, 4, |l| {
            let d = l.dimension();
            CMatrix::from_fn(d, d, |i, j| c(i as f64, j as f64 - 1.0))
        });
        let p = symbol_product(&s, &MatrixSymbol::identity(&m, 4)).unwrap();
        assert_eq!(p, s);
    }

    #[test]
    fn sub_takes_union() {
        let m = GroupModel::torus(1).unwrap();
        let mut a = MatrixSymbol::zero(&m);
        a.insert(IrrepLabel::Torus(vec![1]), CMatrix::identity(1, 1))
            .unwrap();
        let b = MatrixSymbol::identity(&m, 2);
        let d = a.sub(&b).unwrap();
        assert_eq!(d.len(), 5);
        assert_eq!(d.exact_band(), Some(2));
        assert!(d.value(&IrrepLabel::Torus(vec![1]))[(0, 0)].norm() < 1e-15);
    }
}
