//! Difference operators `ξ₀𝔻_ij = ℱ (ξ₀(g)_ij − δ_ij) ℱ⁻¹` and `𝔸 = ℱ ρ² ℱ⁻¹`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::MatrixSymbol;
use crate::error::{Error, Result};
use crate::harmonic::{
    cached_grid, fourier_forward, fourier_inverse, GridPoint, GroupGrid, GroupKind, GroupModel,
    IrrepLabel,
};
use crate::linalg::CMatrix;

/// A single `ξ₀𝔻_ij`; `row` and `col` are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elementary {
    pub rep: IrrepLabel,
    pub row: usize,
    pub col: usize,
}

impl Elementary {
    pub fn new(model: &GroupModel, rep: IrrepLabel, row: usize, col: usize) -> Result<Self> {
        model.check_label(&rep)?;
        let d = rep.dimension();
        if row >= d || col >= d {
            return Err(Error::InvalidLabel(format!(
                "index ({row},{col}) outside a {d}-dimensional representation"
            )));
        }
        Ok(Self { rep, row, col })
    }

    pub fn band(&self) -> u32 {
        self.rep.band()
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D[{}]({},{})", self.rep, self.row, self.col)
    }
}

/// An ordered product of elementary differences; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DifferenceWord {
    factors: Vec<Elementary>,
}

impl DifferenceWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(factors: Vec<Elementary>) -> Self {
        Self { factors }
    }

    pub fn single(e: Elementary) -> Self {
        Self { factors: vec![e] }
    }

    pub fn factors(&self) -> &[Elementary] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    /// Total band of the multiplying function.
    pub fn band(&self) -> u32 {
        self.factors.iter().map(|e| e.band()).sum()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self { factors }
    }
}

impl fmt::Display for DifferenceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// The generating family: every matrix entry of every representation in Δ₀.
pub fn generators(model: &GroupModel) -> Vec<Elementary> {
    let mut out = Vec::new();
    for rep in model.delta0() {
        let d = rep.dimension();
        for i in 0..d {
            for j in 0..d {
                out.push(Elementary {
                    rep: rep.clone(),
                    row: i,
                    col: j,
                });
            }
        }
    }
    out
}

/// Every word of the given order up to reordering; differences commute, so
/// one representative per multiset of generators suffices.
pub fn words_of_order(model: &GroupModel, order: usize) -> Vec<DifferenceWord> {
    let gens = generators(model);
    let mut out = Vec::new();
    let mut idx = vec![0usize; order];
    if order == 0 {
        return vec![DifferenceWord::identity()];
    }
    loop {
        out.push(DifferenceWord::new(
            idx.iter().map(|&i| gens[i].clone()).collect(),
        ));
        // next non-decreasing index tuple
        let mut p = order;
        while p > 0 && idx[p - 1] == gens.len() - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        let v = idx[p - 1];
        for x in idx.iter_mut().skip(p) {
            *x = v;
        }
    }
    out
}

/// Multiplier function values at grid nodes, with the representations
/// needed sampled once.
struct NodeSampler<'a> {
    grid: &'a GroupGrid,
    reps: HashMap<IrrepLabel, Vec<CMatrix>>,
}

impl<'a> NodeSampler<'a> {
    fn new(grid: &'a GroupGrid, reps: &[IrrepLabel]) -> Self {
        let mut map = HashMap::new();
        if grid.model().is_su2() {
            for r in reps {
                if map.contains_key(r) {
                    continue;
                }
                let t = r.twice_spin().unwrap();
                let v: Vec<CMatrix> = (0..grid.len())
                    .into_par_iter()
                    .map(|i| grid.wigner_at(i, t).unwrap())
                    .collect();
                map.insert(r.clone(), v);
            }
        }
        Self { grid, reps: map }
    }

    fn entry(&self, e: &Elementary, idx: usize) -> Complex64 {
        let delta = if e.row == e.col { 1.0 } else { 0.0 };
        match &e.rep {
            IrrepLabel::Su2(_) => self.reps[&e.rep][idx][(e.row, e.col)] - delta,
            IrrepLabel::Torus(k) => match self.grid.node(idx) {
                GridPoint::Torus(x) => {
                    let ph: f64 = k.iter().zip(&x).map(|(k, x)| *k as f64 * x).sum();
                    Complex64::from_polar(1.0, 2.0 * PI * ph) - delta
                }
                GridPoint::Su2(_) => unreachable!(),
            },
        }
    }

    fn word(&self, w: &DifferenceWord, idx: usize) -> Complex64 {
        w.factors
            .iter()
            .map(|e| self.entry(e, idx))
            .fold(Complex64::new(1.0, 0.0), |a, b| a * b)
    }
}

/// Exact band of `ℱ q ℱ⁻¹ σ` for a multiplier of band `q_band`, and the band
/// on which the output is computed.
fn output_bands(sigma: &MatrixSymbol, q_band: u32) -> Result<(u32, Option<u32>)> {
    match sigma.exact_band() {
        None => Ok((sigma.band() + q_band, None)),
        Some(b) => {
            if b < q_band {
                return Err(Error::MarginExceeded {
                    margin: q_band,
                    exact: b,
                });
            }
            Ok((b - q_band, Some(b - q_band)))
        }
    }
}

/// `ℱ q ℱ⁻¹ σ` by quadrature for several multipliers at once.
fn apply_multipliers<F>(
    sigma: &MatrixSymbol,
    q_band: u32,
    reps: &[IrrepLabel],
    count: usize,
    q: F,
) -> Result<Vec<MatrixSymbol>>
where
    F: Fn(&NodeSampler, usize, usize) -> Complex64 + Sync,
{
    let (out_band, exact) = output_bands(sigma, q_band)?;
    let grid_band = (sigma.band() + q_band).max(1);
    let grid = cached_grid(sigma.model(), grid_band)?;
    let f = fourier_inverse(sigma, &grid)?;
    let sampler = NodeSampler::new(&grid, reps);
    (0..count)
        .map(|w| {
            let g = f.map(|z| z);
            let samples: Vec<Complex64> = g
                .samples()
                .par_iter()
                .enumerate()
                .map(|(i, z)| z * q(&sampler, w, i))
                .collect();
            let h = crate::harmonic::GroupFunction::new(grid.clone(), samples)?;
            let out = fourier_forward(&h, out_band)?;
            Ok(out.with_exact_band(exact))
        })
        .collect()
}

/// `𝔻^α σ` through the defining formula, on the labels where it is exact.
pub fn apply_difference(word: &DifferenceWord, sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    Ok(apply_differences(std::slice::from_ref(word), sigma)?.remove(0))
}

/// Several words applied to the same symbol, sharing one inverse transform.
pub fn apply_differences(
    words: &[DifferenceWord],
    sigma: &MatrixSymbol,
) -> Result<Vec<MatrixSymbol>> {
    if words.is_empty() {
        return Ok(Vec::new());
    }
    for w in words {
        for e in w.factors() {
            sigma.model().check_label(&e.rep)?;
        }
    }
    let q_band = words.iter().map(|w| w.band()).max().unwrap();
    let reps: Vec<IrrepLabel> = words
        .iter()
        .flat_map(|w| w.factors().iter().map(|e| e.rep.clone()))
        .collect();
    apply_multipliers(sigma, q_band, &reps, words.len(), |s, w, i| {
        s.word(&words[w], i)
    })
}

/// `𝔸σ = ℱ ρ² ℱ⁻¹ σ`: shift stencil on the torus, quadrature on SU(2).
pub fn laplace_difference(sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    match sigma.model().kind() {
        GroupKind::Torus(_) => laplace_difference_shift(sigma),
        GroupKind::Su2 => laplace_difference_quadrature(sigma),
    }
}

/// `𝔸σ` by multiplying the kernel with `ρ²` on a grid.
pub fn laplace_difference_quadrature(sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    let model = sigma.model().clone();
    let reps = model.delta0();
    let gens = generators(&model);
    let diag: Vec<Elementary> = gens.into_iter().filter(|e| e.row == e.col).collect();
    let q_band = reps.iter().map(|r| r.band()).max().unwrap();
    let mut out = apply_multipliers(sigma, q_band, &reps, 1, |s, _, i| {
        -diag.iter().map(|e| s.entry(e, i)).sum::<Complex64>()
    })?;
    Ok(out.remove(0))
}

/// Torus: `(ξ₀𝔻)σ(k) = σ(k − e) − σ(k)` for `ξ₀ = e^{2πi e·x}`.
pub fn apply_difference_shift(word: &DifferenceWord, sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    if sigma.model().torus_dim().is_none() {
        return Err(Error::Unsupported(
            "shift differences need a torus model".into(),
        ));
    }
    let mut cur = sigma.clone();
    for e in word.factors() {
        sigma.model().check_label(&e.rep)?;
        let shift = e.rep.freq().unwrap().to_vec();
        let (out_band, exact) = output_bands(&cur, e.band())?;
        let src = cur.clone();
        cur = MatrixSymbol::from_fn(sigma.model(), out_band, |l| {
            let k = l.freq().unwrap();
            let back: Vec<i64> = k.iter().zip(&shift).map(|(a, b)| a - b).collect();
            src.value(&IrrepLabel::Torus(back)) - src.value(l)
        })
        .with_exact_band(exact);
    }
    Ok(cur)
}

/// Torus: `𝔸σ(k) = 2nσ(k) − Σ_j (σ(k+e_j) + σ(k−e_j))`.
pub fn laplace_difference_shift(sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    let n = sigma
        .model()
        .torus_dim()
        .ok_or_else(|| Error::Unsupported("shift differences need a torus model".into()))?;
    let (out_band, exact) = output_bands(sigma, 1)?;
    Ok(MatrixSymbol::from_fn(sigma.model(), out_band, |l| {
        let k = l.freq().unwrap();
        let mut acc = sigma.value(l) * Complex64::from(2.0 * n as f64);
        for j in 0..n {
            for s in [-1i64, 1] {
                let mut kk = k.to_vec();
                kk[j] += s;
                acc -= sigma.value(&IrrepLabel::Torus(kk));
            }
        }
        acc
    })
    .with_exact_band(exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        assert_eq!(generators(&GroupModel::su2()).len(), 9);
        assert_eq!(generators(&GroupModel::torus(3).unwrap()).len(), 6);
        assert_eq!(words_of_order(&GroupModel::su2(), 2).len(), 45);
        assert_eq!(words_of_order(&GroupModel::torus(3).unwrap(), 0).len(), 1);
    }

    #[test]
    fn quadratic_second_difference() {
        let m = GroupModel::torus(1).unwrap();
        let s = MatrixSymbol::scalar_fn(&m, 10, |l| {
            let k = l.freq().unwrap()[0] as f64;
            Complex64::from(k * k)
        });
        let a = laplace_difference(&s).unwrap();
        assert_eq!(a.exact_band(), Some(9));
        for (_, v) in a.iter() {
            assert!((v[(0, 0)] + 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn bad_index_rejected() {
        let m = GroupModel::su2();
        assert!(Elementary::new(&m, IrrepLabel::Su2(2), 3, 0).is_err());
        assert!(Elementary::new(&m, IrrepLabel::Su2(2), 2, 2).is_ok());
    }
}
