//! Product quadrature grids on the torus and on SU(2).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::group::{GroupKind, GroupModel};
use super::su2::{little_d, EulerAngles, Su2Element};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// A quadrature node.
#[derive(Clone, Debug, PartialEq)]
pub enum GridPoint {
    Torus(Vec<f64>),
    Su2(EulerAngles),
}

#[derive(Debug)]
pub(crate) struct Su2Layout {
    pub n_phi: usize,
    pub n_psi: usize,
    pub n_theta: usize,
    pub theta: Vec<f64>,
    /// Haar weights in θ, summing to 1.
    pub w_theta: Vec<f64>,
    dtab: OnceLock<Vec<Vec<DMatrix<f64>>>>,
}

#[derive(Debug)]
pub(crate) enum Layout {
    Torus { n: usize, side: usize },
    Su2(Su2Layout),
}

/// Quadrature grid exact for products of two coefficients of band at most
/// `band` (twice-spin on SU(2), sup-norm of the frequency on the torus).
#[derive(Debug)]
pub struct GroupGrid {
    model: GroupModel,
    band: u32,
    pub(crate) layout: Layout,
    weights: Vec<f64>,
}

pub fn build_grid(model: &GroupModel, band: u32) -> Result<GroupGrid> {
    GroupGrid::new(model, band)
}

impl GroupGrid {
    pub fn new(model: &GroupModel, band: u32) -> Result<Self> {
        if band == 0 {
            return Err(Error::ZeroBand);
        }
        let (layout, weights) = match model.kind() {
            GroupKind::Torus(n) => {
                let side = 2 * band as usize + 1;
                let total = side.pow(*n as u32);
                (
                    Layout::Torus { n: *n, side },
                    vec![1.0 / total as f64; total],
                )
            }
            GroupKind::Su2 => {
                let t = band as usize;
                let n_phi = t + 1;
                let n_psi = 2 * (t + 1);
                let n_theta = t / 2 + 1;
                let gl = GaussLegendre::new(NonZeroUsize::new(n_theta).unwrap());
                // nodes in cos θ ascending; store θ ascending
                let mut pairs: Vec<(f64, f64)> = gl
                    .as_node_weight_pairs()
                    .iter()
                    .map(|&(x, w)| (x.clamp(-1.0, 1.0).acos(), w / 2.0))
                    .collect();
                pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let theta: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let w_theta: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                let per = 1.0 / (n_phi * n_psi) as f64;
                let mut weights = Vec::with_capacity(n_theta * n_phi * n_psi);
                for w in &w_theta {
                    weights.extend(std::iter::repeat_n(w * per, n_phi * n_psi));
                }
                (
                    Layout::Su2(Su2Layout {
                        n_phi,
                        n_psi,
                        n_theta,
                        theta,
                        w_theta,
                        dtab: OnceLock::new(),
                    }),
                    weights,
                )
            }
        };
        Ok(Self {
            model: model.clone(),
            band,
            layout,
            weights,
        })
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn band(&self) -> u32 {
        self.band
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node counts per axis: `(side, …)` on the torus, `(n_θ, n_φ, n_ψ)` on SU(2).
    pub fn shape(&self) -> Vec<usize> {
        match &self.layout {
            Layout::Torus { n, side } => vec![*side; *n],
            Layout::Su2(l) => vec![l.n_theta, l.n_phi, l.n_psi],
        }
    }

    pub fn node(&self, idx: usize) -> GridPoint {
        match &self.layout {
            Layout::Torus { n, side } => {
                let mut x = vec![0.0; *n];
                let mut r = idx;
                for j in (0..*n).rev() {
                    x[j] = (r % side) as f64 / *side as f64;
                    r /= side;
                }
                GridPoint::Torus(x)
            }
            Layout::Su2(l) => {
                let b = idx % l.n_psi;
                let a = (idx / l.n_psi) % l.n_phi;
                let k = idx / (l.n_psi * l.n_phi);
                GridPoint::Su2(EulerAngles {
                    phi: 2.0 * PI * a as f64 / l.n_phi as f64,
                    theta: l.theta[k],
                    psi: 4.0 * PI * b as f64 / l.n_psi as f64,
                })
            }
        }
    }

    pub fn nodes(&self) -> Vec<GridPoint> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Node as a group element; `None` on the torus.
    pub fn element(&self, idx: usize) -> Option<Su2Element> {
        match self.node(idx) {
            GridPoint::Su2(e) => Some(Su2Element::from_euler(&e)),
            GridPoint::Torus(_) => None,
        }
    }

    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `ξ(g)` at an SU(2) node, read from the cached little-d tables.
    pub fn wigner_at(&self, idx: usize, twice_spin: u32) -> Option<CMatrix> {
        let l = match &self.layout {
            Layout::Su2(l) => l,
            Layout::Torus { .. } => return None,
        };
        if twice_spin > self.band {
            return None;
        }
        let b = idx % l.n_psi;
        let a = (idx / l.n_psi) % l.n_phi;
        let k = idx / (l.n_psi * l.n_phi);
        let phi = 2.0 * PI * a as f64 / l.n_phi as f64;
        let psi = 4.0 * PI * b as f64 / l.n_psi as f64;
        let d = &l.dtables(self.band)[k][twice_spin as usize];
        let n = twice_spin as usize + 1;
        let m = |i: usize| i as f64 - twice_spin as f64 / 2.0;
        Some(CMatrix::from_fn(n, n, |i, j| {
            Complex64::from_polar(d[(i, j)], -m(i) * phi - m(j) * psi)
        }))
    }
}

type GridCache = Mutex<HashMap<(GroupModel, u32), Arc<GroupGrid>>>;

/// Shared grids keyed by model and band.
pub fn cached_grid(model: &GroupModel, band: u32) -> Result<Arc<GroupGrid>> {
    static CACHE: OnceLock<GridCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (model.clone(), band);
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let g = Arc::new(GroupGrid::new(model, band)?);
    cache.lock().unwrap().insert(key, g.clone());
    Ok(g)
}

impl Su2Layout {
    /// Little-d tables at every θ node for every twice-spin up to `band`.
    pub fn dtables(&self, band: u32) -> &Vec<Vec<DMatrix<f64>>> {
        self.dtab.get_or_init(|| {
            self.theta
                .par_iter()
                .map(|&th| (0..=band).map(|t| little_d(t, th)).collect())
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for m in [GroupModel::su2(), GroupModel::torus(2).unwrap()] {
            let g = build_grid(&m, 5).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_counts() {
        let g = build_grid(&GroupModel::torus(1).unwrap(), 2).unwrap();
        assert_eq!(g.len(), 5);
        assert!(g.weights().iter().all(|&w| (w - 0.2).abs() < 1e-15));
        assert_eq!(g.node(3), GridPoint::Torus(vec![0.6]));
    }

    #[test]
    fn su2_counts_and_ranges() {
        let g = build_grid(&GroupModel::su2(), 8).unwrap();
        assert_eq!(g.shape(), vec![5, 9, 18]);
        for p in g.nodes() {
            if let GridPoint::Su2(e) = p {
                assert!(EulerAngles::new(e.phi, e.theta, e.psi).is_ok());
            }
        }
    }

    #[test]
    fn zero_band_rejected() {
        assert!(matches!(
            build_grid(&GroupModel::su2(), 0),
            Err(Error::ZeroBand)
        ));
    }
}
