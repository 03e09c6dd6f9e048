//! Weighted suprema of difference operators, shell by shell.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::difference::{apply_differences, laplace_difference, words_of_order};
use super::matrix::MatrixSymbol;
use super::torus_array::TorusArray;
use crate::error::{Error, Result};
use crate::harmonic::{bracket, GroupModel};
use crate::linalg::op_norm;

/// A symbol in either storage.
#[derive(Clone, Debug)]
pub enum SymbolData {
    Matrix(MatrixSymbol),
    Torus(TorusArray),
}

impl SymbolData {
    pub fn model(&self) -> GroupModel {
        match self {
            SymbolData::Matrix(s) => s.model().clone(),
            SymbolData::Torus(a) => GroupModel::torus(a.dim()).unwrap(),
        }
    }

    /// Largest band on which stored values are trusted.
    pub fn trusted_band(&self) -> u32 {
        match self {
            SymbolData::Matrix(s) => s.trusted_band(),
            SymbolData::Torus(a) => a.radius(),
        }
    }

    /// Multiplies the value at `ξ` by `⟨ξ⟩^s`.
    pub fn reweight(&self, s: f64) -> Self {
        match self {
            SymbolData::Matrix(m) => {
                SymbolData::Matrix(m.map(|l, v| v * Complex64::new(bracket(l).powf(s), 0.0)))
            }
            SymbolData::Torus(a) => {
                SymbolData::Torus(TorusArray::from_fn(a.dim(), a.radius(), |k| {
                    a.get(k).unwrap() * torus_bracket(k).powf(s)
                }))
            }
        }
    }

    /// Matrix form; torus arrays become complete symbols on their box.
    pub fn to_matrix(&self) -> MatrixSymbol {
        match self {
            SymbolData::Matrix(m) => m.clone(),
            SymbolData::Torus(a) => a.to_symbol(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        match self {
            SymbolData::Matrix(s) => SymbolData::Matrix(s.scale(c)),
            SymbolData::Torus(a) => {
                SymbolData::Torus(TorusArray::from_fn(a.dim(), a.radius(), |k| {
                    a.get(k).unwrap() * c
                }))
            }
        }
    }
}

impl From<MatrixSymbol> for SymbolData {
    fn from(s: MatrixSymbol) -> Self {
        SymbolData::Matrix(s)
    }
}

impl From<TorusArray> for SymbolData {
    fn from(a: TorusArray) -> Self {
        SymbolData::Torus(a)
    }
}

/// Weights `w_a` for `⟨ξ⟩^{w_a} max_{|α|=a} ‖𝔻^α σ(ξ)‖_op`, `a = 0..weights.len()`,
/// and optionally a power `p` of `𝔸` with its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub order_weights: Vec<f64>,
    pub laplace: Option<(usize, f64)>,
    pub range: u32,
}

/// `orders[a][b]`: supremum over labels of band `b` of the weighted quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceProfile {
    pub range: u32,
    pub orders: Vec<Vec<f64>>,
    pub laplace: Option<Vec<f64>>,
}

impl DifferenceProfile {
    pub fn constant(&self, order: usize, up_to: u32) -> f64 {
        sup_to(&self.orders[order], up_to)
    }

    pub fn laplace_constant(&self, up_to: u32) -> Option<f64> {
        self.laplace.as_ref().map(|v| sup_to(v, up_to))
    }
}

fn sup_to(v: &[f64], up_to: u32) -> f64 {
    v.iter()
        .take(up_to as usize + 1)
        .copied()
        .fold(0.0, f64::max)
}

/// Band consumed by one difference factor.
pub fn factor_band(model: &GroupModel) -> u32 {
    model.delta0().iter().map(|r| r.band()).max().unwrap_or(1)
}

/// Trusted band needed to evaluate `spec`.
pub fn required_band(model: &GroupModel, spec: &ProfileSpec) -> u32 {
    let top = spec.order_weights.len().saturating_sub(1);
    let lap = spec.laplace.map_or(0, |(p, _)| p);
    spec.range + factor_band(model) * top.max(lap) as u32
}

pub fn difference_profile(data: &SymbolData, spec: &ProfileSpec) -> Result<DifferenceProfile> {
    let model = data.model();
    if spec.order_weights.is_empty() && spec.laplace.is_none() {
        return Err(Error::EmptyRange);
    }
    let need = required_band(&model, spec);
    if data.trusted_band() < need {
        return Err(Error::RangeNotExact {
            range: spec.range,
            exact: data.trusted_band() as i64 - (need - spec.range) as i64,
        });
    }
    match data {
        SymbolData::Matrix(s) if s.model().torus_dim().is_some() => {
            difference_profile(&SymbolData::Torus(TorusArray::from_symbol(s)?), spec)
        }
        SymbolData::Matrix(s) => matrix_profile(s, spec),
        SymbolData::Torus(a) => torus_profile(a, spec),
    }
}

fn label_shells(s: &MatrixSymbol, range: u32, w: f64, into: &mut [f64]) {
    for (l, m) in s.iter() {
        let b = l.band();
        if b <= range {
            let v = bracket(l).powf(w) * op_norm(m);
            into[b as usize] = into[b as usize].max(v);
        }
    }
}

fn matrix_profile(s: &MatrixSymbol, spec: &ProfileSpec) -> Result<DifferenceProfile> {
    let model = s.model().clone();
    let shells = spec.range as usize + 1;
    let mut orders = Vec::new();
    for (a, &w) in spec.order_weights.iter().enumerate() {
        let mut v = vec![0.0; shells];
        if a == 0 {
            label_shells(s, spec.range, w, &mut v);
        } else {
            let words = words_of_order(&model, a);
            for d in apply_differences(&words, s)? {
                label_shells(&d, spec.range, w, &mut v);
            }
        }
        orders.push(v);
    }
    let laplace = match spec.laplace {
        None => None,
        Some((p, w)) => {
            let mut cur = s.clone();
            for _ in 0..p {
                cur = laplace_difference(&cur)?;
            }
            let mut v = vec![0.0; shells];
            label_shells(&cur, spec.range, w, &mut v);
            Some(v)
        }
    };
    Ok(DifferenceProfile {
        range: spec.range,
        orders,
        laplace,
    })
}

fn torus_bracket(k: &[i64]) -> f64 {
    let k2: f64 = k.iter().map(|&x| (x * x) as f64).sum();
    (2.0 * std::f64::consts::PI * k2.sqrt()).max(1.0)
}

/// Shell maxima of `⟨k⟩^w |a(k)|` over `|k|∞ ≤ range`.
pub(crate) fn torus_shells(a: &TorusArray, range: u32, w: f64) -> Vec<f64> {
    let geo = box_geometry(a.dim(), a.radius());
    let shells = range as usize + 1;
    let int_w = (w.fract() == 0.0 && w.abs() < 64.0).then_some(w as i32);
    let chunk = a
        .values()
        .len()
        .div_ceil(rayon::current_num_threads() * 4)
        .max(4096);
    a.values()
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, vals)| {
            let mut acc = vec![0.0; shells];
            let base = c * chunk;
            for (i, v) in vals.iter().enumerate() {
                let (b, br) = geo[base + i];
                let b = b as usize;
                if b < shells {
                    let wt = match int_w {
                        Some(0) => 1.0,
                        Some(p) => br.powi(p),
                        None => br.powf(w),
                    };
                    acc[b] = f64::max(acc[b], wt * v.norm_sqr().sqrt());
                }
            }
            acc
        })
        .reduce(|| vec![0.0; shells], max_merge)
}

fn max_merge(mut x: Vec<f64>, y: Vec<f64>) -> Vec<f64> {
    for (a, b) in x.iter_mut().zip(y) {
        *a = a.max(b);
    }
    x
}

type Geometry = Arc<Vec<(u32, f64)>>;

/// `(|k|∞, ⟨k⟩)` for every flat index of a box, cached per shape.
fn box_geometry(n: usize, radius: u32) -> Geometry {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Geometry>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&(n, radius)) {
        return g.clone();
    }
    let probe = TorusArray::from_fn(n, radius, |_| Complex64::new(0.0, 0.0));
    let geo: Vec<(u32, f64)> = (0..probe.values().len())
        .into_par_iter()
        .map_init(
            || vec![0i64; n],
            |k, idx| {
                probe.freq_into(idx, k);
                let b = k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u32;
                (b, torus_bracket(k))
            },
        )
        .collect();
    let geo = Arc::new(geo);
    let mut guard = cache.lock().unwrap();
    if guard.len() > 16 {
        guard.clear();
    }
    guard.insert((n, radius), geo.clone());
    geo
}

pub(crate) fn torus_shells_with<F>(a: &TorusArray, range: u32, f: F) -> Vec<f64>
where
    F: Fn(&[i64], Complex64) -> f64 + Sync,
{
    let shells = range as usize + 1;
    (0..a.values().len())
        .into_par_iter()
        .fold(
            || (vec![0.0; shells], vec![0i64; a.dim()]),
            |(mut acc, mut k), idx| {
                a.freq_into(idx, &mut k);
                let b = k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as usize;
                if b < shells {
                    acc[b] = f64::max(acc[b], f(&k, a.values()[idx]));
                }
                (acc, k)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(|| vec![0.0; shells], max_merge)
}

fn torus_profile(a: &TorusArray, spec: &ProfileSpec) -> Result<DifferenceProfile> {
    let n = a.dim();
    let gens: Vec<(usize, i64)> = (0..n).flat_map(|j| [(j, 1i64), (j, -1)]).collect();
    let shells = spec.range as usize + 1;
    let mut orders = vec![vec![0.0; shells]; spec.order_weights.len()];
    // depth-first over non-decreasing generator sequences
    fn walk(
        cur: &TorusArray,
        start: usize,
        depth: usize,
        gens: &[(usize, i64)],
        spec: &ProfileSpec,
        orders: &mut [Vec<f64>],
    ) -> Result<()> {
        let s = torus_shells(cur, spec.range, spec.order_weights[depth]);
        for (x, y) in orders[depth].iter_mut().zip(s) {
            *x = x.max(y);
        }
        if depth + 1 < spec.order_weights.len() {
            for g in start..gens.len() {
                let next = cur.difference(gens[g].0, gens[g].1)?;
                walk(&next, g, depth + 1, gens, spec, orders)?;
            }
        }
        Ok(())
    }
    if !spec.order_weights.is_empty() {
        walk(a, 0, 0, &gens, spec, &mut orders)?;
    }
    let laplace = match spec.laplace {
        None => None,
        Some((p, w)) => {
            let mut cur = a.clone();
            for _ in 0..p {
                cur = cur.laplace()?;
            }
            Some(torus_shells(&cur, spec.range, w))
        }
    };
    Ok(DifferenceProfile {
        range: spec.range,
        orders,
        laplace,
    })
}

/// `sup ⟨ξ⟩^w ‖𝔻^α σ(ξ)‖_op` over labels of band ≤ `range` and words of order `a`.
pub fn seminorm(data: &SymbolData, a: usize, w: f64, range: u32) -> Result<f64> {
    let mut weights = vec![0.0; a + 1];
    weights[a] = w;
    let p = difference_profile(
        data,
        &ProfileSpec {
            order_weights: weights,
            laplace: None,
            range,
        },
    )?;
    Ok(p.constant(a, range))
}
