//! Forward and inverse group Fourier transforms on a [`GroupGrid`].

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::{GroupGrid, Layout, Su2Layout};
use super::group::{bracket, IrrepLabel};
use super::su2::{wigner_of, Su2Element};
use crate::error::{Error, Result};
use crate::linalg::{hs_norm_sq, CMatrix};
use crate::symbol::MatrixSymbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Samples of a function on the nodes of a grid.
#[derive(Clone, Debug)]
pub struct GroupFunction {
    grid: Arc<GroupGrid>,
    samples: Vec<Complex64>,
    declared_band: Option<u32>,
}

impl GroupFunction {
    pub fn new(grid: Arc<GroupGrid>, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridTooSmall {
                need: samples.len() as u32,
                have: grid.len() as u32,
            });
        }
        Ok(Self {
            grid,
            samples,
            declared_band: None,
        })
    }

    /// Samples `f(node)` for every node index.
    pub fn from_index_fn<F>(grid: Arc<GroupGrid>, f: F) -> Self
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        let samples = (0..grid.len()).into_par_iter().map(f).collect();
        Self {
            grid,
            samples,
            declared_band: None,
        }
    }

    /// Samples an SU(2) function given on group elements.
    pub fn from_element_fn<F>(grid: Arc<GroupGrid>, f: F) -> Result<Self>
    where
        F: Fn(&Su2Element) -> Complex64 + Sync + Send,
    {
        if !grid.model().is_su2() {
            return Err(Error::Unsupported("element sampling needs su2".into()));
        }
        let g = grid.clone();
        Ok(Self::from_index_fn(grid, move |i| {
            f(&g.element(i).unwrap())
        }))
    }

    pub fn with_declared_band(mut self, band: u32) -> Self {
        self.declared_band = Some(band);
        self
    }

    pub fn declared_band(&self) -> Option<u32> {
        self.declared_band
    }

    pub fn grid(&self) -> &Arc<GroupGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn integral(&self) -> Complex64 {
        self.samples
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v * *w)
            .sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let s: f64 = self
            .samples
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v.norm().powf(p) * w)
            .sum();
        s.powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn pointwise<F>(&self, other: &Self, f: F) -> Self
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            declared_band: None,
        }
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64,
    {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|z| f(*z)).collect(),
            declared_band: self.declared_band,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `f̂(ξ) = ∫ f(g) ξ(g)* dg` on every label of band ≤ `band`.
pub fn fourier_forward(f: &GroupFunction, band: u32) -> Result<MatrixSymbol> {
    let grid = f.grid();
    if band > grid.band() {
        return Err(Error::BandExceeded {
            label_band: band,
            grid_band: grid.band(),
        });
    }
    let model = grid.model().clone();
    let entries: BTreeMap<IrrepLabel, CMatrix> = match &grid.layout {
        Layout::Torus { n, side } => torus_forward(f.samples(), *n, *side, band),
        Layout::Su2(l) => su2_forward(f.samples(), l, grid.band(), band),
    };
    let mut out = MatrixSymbol::zero(&model);
    for (k, m) in entries {
        out.insert(k, m)?;
    }
    Ok(out)
}

/// Forward transform on an explicit label set.
pub fn fourier_forward_labels(f: &GroupFunction, labels: &[IrrepLabel]) -> Result<MatrixSymbol> {
    let band = labels.iter().map(|l| l.band()).max().unwrap_or(0);
    let all = fourier_forward(f, band)?;
    let mut out = MatrixSymbol::zero(all.model());
    for l in labels {
        all.model().check_label(l)?;
        out.insert(l.clone(), all.value(l))?;
    }
    Ok(out)
}

/// Peter–Weyl sum `Σ d_ξ tr(ξ(g) f̂(ξ))` on every node.
pub fn fourier_inverse(coeffs: &MatrixSymbol, grid: &Arc<GroupGrid>) -> Result<GroupFunction> {
    grid.model().check_same(coeffs.model())?;
    if coeffs.band() > grid.band() {
        return Err(Error::BandExceeded {
            label_band: coeffs.band(),
            grid_band: grid.band(),
        });
    }
    let samples = match &grid.layout {
        Layout::Torus { n, side } => torus_inverse(coeffs, *n, *side),
        Layout::Su2(l) => su2_inverse(coeffs, l, grid.band()),
    };
    Ok(GroupFunction {
        grid: grid.clone(),
        samples,
        declared_band: Some(coeffs.band()),
    })
}

/// Peter–Weyl sum at a single SU(2) element or torus point.
pub fn evaluate_su2(coeffs: &MatrixSymbol, g: &Su2Element) -> Complex64 {
    coeffs
        .iter()
        .map(|(l, m)| {
            let t = l.twice_spin().unwrap();
            let d = l.dimension() as f64;
            (wigner_of(t, g) * m).trace() * d
        })
        .sum()
}

pub fn evaluate_torus(coeffs: &MatrixSymbol, x: &[f64]) -> Complex64 {
    coeffs
        .iter()
        .map(|(l, m)| {
            let k = l.freq().unwrap();
            let ph: f64 = k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum();
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * ph) * m[(0, 0)]
        })
        .sum()
}

/// `sqrt(Σ d_ξ ‖f̂(ξ)‖²_HS)`.
pub fn plancherel_norm(coeffs: &MatrixSymbol) -> f64 {
    sobolev_norm(coeffs, 0.0)
}

/// `sqrt(Σ d_ξ ⟨ξ⟩^{2s} ‖f̂(ξ)‖²_HS)`.
pub fn sobolev_norm(coeffs: &MatrixSymbol, s: f64) -> f64 {
    coeffs
        .iter()
        .map(|(l, m)| l.dimension() as f64 * bracket(l).powf(2.0 * s) * hs_norm_sq(m))
        .sum::<f64>()
        .sqrt()
}

fn wrap(k: i64, side: usize) -> usize {
    k.rem_euclid(side as i64) as usize
}

fn fft_axes(data: &mut [Complex64], n: usize, side: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut buf = vec![ZERO; side];
    for axis in 0..n {
        let stride = side.pow((n - 1 - axis) as u32);
        let block = stride * side;
        for start in 0..data.len() / side {
            let outer = start / stride;
            let inner = start % stride;
            let base = outer * block + inner;
            for (t, b) in buf.iter_mut().enumerate() {
                *b = data[base + t * stride];
            }
            fft.process(&mut buf);
            for (t, b) in buf.iter().enumerate() {
                data[base + t * stride] = *b;
            }
        }
    }
}

fn torus_forward(
    samples: &[Complex64],
    n: usize,
    side: usize,
    band: u32,
) -> BTreeMap<IrrepLabel, CMatrix> {
    let mut data = samples.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(side);
    fft_axes(&mut data, n, side, &fft);
    let scale = 1.0 / data.len() as f64;
    let model_labels = crate::harmonic::GroupModel::torus(n)
        .unwrap()
        .labels_up_to(band);
    model_labels
        .into_iter()
        .map(|l| {
            let k = l.freq().unwrap();
            let mut idx = 0;
            for &kj in k {
                idx = idx * side + wrap(kj, side);
            }
            (l, CMatrix::from_element(1, 1, data[idx] * scale))
        })
        .collect()
}

fn torus_inverse(coeffs: &MatrixSymbol, n: usize, side: usize) -> Vec<Complex64> {
    let mut data = vec![ZERO; side.pow(n as u32)];
    for (l, m) in coeffs.iter() {
        let mut idx = 0;
        for &kj in l.freq().unwrap() {
            idx = idx * side + wrap(kj, side);
        }
        data[idx] += m[(0, 0)];
    }
    let fft = FftPlanner::new().plan_fft_inverse(side);
    fft_axes(&mut data, n, side, &fft);
    data
}

/// For each θ node: `S[t][u] = (1/(N_φN_ψ)) Σ_{a,b} f e^{i t φ_a/2} e^{i u ψ_b/2}`,
/// indexed by `t mod 2N_φ`, `u mod N_ψ`.
fn su2_phase_sums(samples: &[Complex64], l: &Su2Layout) -> Vec<Vec<Complex64>> {
    let (np, ns) = (l.n_phi, l.n_psi);
    let len_t = 2 * np;
    let mut planner = FftPlanner::new();
    let fpsi = planner.plan_fft_inverse(ns);
    let fphi = planner.plan_fft_inverse(len_t);
    let scale = 1.0 / (np * ns) as f64;
    (0..l.n_theta)
        .into_par_iter()
        .map(|k| {
            let block = &samples[k * np * ns..(k + 1) * np * ns];
            let mut rows = block.to_vec();
            for row in rows.chunks_mut(ns) {
                fpsi.process(row);
            }
            let mut out = vec![ZERO; len_t * ns];
            let mut col = vec![ZERO; len_t];
            for u in 0..ns {
                col.iter_mut().for_each(|z| *z = ZERO);
                for a in 0..np {
                    col[a] = rows[a * ns + u];
                }
                fphi.process(&mut col);
                for t in 0..len_t {
                    out[t * ns + u] = col[t] * scale;
                }
            }
            out
        })
        .collect()
}

fn mag_index(twice_spin: u32, i: usize) -> i64 {
    2 * i as i64 - twice_spin as i64
}

fn su2_forward(
    samples: &[Complex64],
    l: &Su2Layout,
    grid_band: u32,
    band: u32,
) -> BTreeMap<IrrepLabel, CMatrix> {
    let sums = su2_phase_sums(samples, l);
    let dt = l.dtables(grid_band);
    let (len_t, ns) = (2 * l.n_phi, l.n_psi);
    (0..=band)
        .into_par_iter()
        .map(|tw| {
            let d = tw as usize + 1;
            let mut m = CMatrix::zeros(d, d);
            for k in 0..l.n_theta {
                let w = l.w_theta[k];
                let dk = &dt[k][tw as usize];
                let s = &sums[k];
                for i in 0..d {
                    let u = wrap(mag_index(tw, i), ns);
                    for j in 0..d {
                        let t = wrap(mag_index(tw, j), len_t);
                        m[(i, j)] += s[t * ns + u] * (w * dk[(j, i)]);
                    }
                }
            }
            (IrrepLabel::Su2(tw), m)
        })
        .collect()
}

fn su2_inverse(coeffs: &MatrixSymbol, l: &Su2Layout, grid_band: u32) -> Vec<Complex64> {
    let (np, ns) = (l.n_phi, l.n_psi);
    let len_t = 2 * np;
    let dt = l.dtables(grid_band);
    let mut planner = FftPlanner::new();
    let fpsi = planner.plan_fft_forward(ns);
    let fphi = planner.plan_fft_forward(len_t);
    let blocks: Vec<Vec<Complex64>> = (0..l.n_theta)
        .into_par_iter()
        .map(|k| {
            // G[t][u] = Σ_ℓ d_ℓ d^ℓ_{ij}(θ_k) f̂^ℓ_{ji}, t = 2m_i, u = 2m_j
            let mut g = vec![ZERO; len_t * ns];
            for (lab, m) in coeffs.iter() {
                let tw = lab.twice_spin().unwrap();
                let d = tw as usize + 1;
                let dk = &dt[k][tw as usize];
                for i in 0..d {
                    let t = wrap(mag_index(tw, i), len_t);
                    for j in 0..d {
                        let u = wrap(mag_index(tw, j), ns);
                        g[t * ns + u] += m[(j, i)] * (d as f64 * dk[(i, j)]);
                    }
                }
            }
            for row in g.chunks_mut(ns) {
                fpsi.process(row);
            }
            let mut col = vec![ZERO; len_t];
            let mut out = vec![ZERO; np * ns];
            for u in 0..ns {
                for t in 0..len_t {
                    col[t] = g[t * ns + u];
                }
                fphi.process(&mut col);
                for a in 0..np {
                    out[a * ns + u] = col[a];
                }
            }
            out
        })
        .collect();
    blocks.concat()
}
