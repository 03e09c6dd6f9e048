//! Mollifier families built from the pseudo-distance and the weak-type scaling probe.
//!
//! On SU(2) every central function is handled on a one-dimensional class-angle
//! rule: with `t` the class angle, `∫_G f dg = (2π)⁻¹ ∫_0^{4π} f(t) sin²(t/2) dt`,
//! which the trapezoid rule on `t_k = 4πk/N` integrates spectrally. The
//! pseudo-distance `ρ = 2|sin(t/2)|` also vanishes at `−1`, so the mollifiers
//! live on the sheet `cos(t/2) > 0` around the identity.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{
    bracket, casimir_lambda, clebsch_gordan, fourier_forward, sobolev_norm, GridPoint,
    GroupFunction, GroupGrid, GroupModel, IrrepLabel, Su2Element,
};
use crate::linalg::{hs_norm_sq, op_norm};
use crate::symbol::{
    apply_elementary_recoupled, generators, laplace_diagonal_entry, laplace_difference,
    symbol_product, DifferenceWord, Elementary, MatrixSymbol, TorusArray,
};

pub const MIN_LADDER: usize = 4;
pub const MIN_SUPPORT_NODES: f64 = 8.0;
pub const SLOPE_TOLERANCE: f64 = 0.1;
pub const MIN_R_SQUARED: f64 = 0.98;
/// Default class-angle nodes.
pub const CLASS_NODES: usize = 1 << 16;
/// Relative `ℓ²` mass allowed beyond the band used for coefficients.
const TAIL: f64 = 1e-12;

/// `φ̃`: one on `[0, ½]`, descending smoothly to zero at 1.
pub fn plateau_bump(x: f64) -> f64 {
    let x = x.abs();
    if x <= 0.5 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let y = 2.0 * (1.0 - x);
        let a = (-1.0 / y).exp();
        let b = (-1.0 / (1.0 - y)).exp();
        a / (a + b)
    }
}

/// Quadrature on which central functions are sampled.
#[derive(Clone, Debug)]
pub enum MollifierGrid {
    /// Trapezoid rule on the SU(2) class angle.
    Class { nodes: usize },
    /// A full grid of either model.
    Group(Arc<GroupGrid>),
}

impl MollifierGrid {
    pub fn class(nodes: usize) -> Self {
        MollifierGrid::Class { nodes }
    }

    pub fn model(&self) -> GroupModel {
        match self {
            MollifierGrid::Class { .. } => GroupModel::su2(),
            MollifierGrid::Group(g) => g.model().clone(),
        }
    }

    fn len(&self) -> usize {
        match self {
            MollifierGrid::Class { nodes } => *nodes,
            MollifierGrid::Group(g) => g.len(),
        }
    }

    fn weight(&self, k: usize) -> f64 {
        match self {
            MollifierGrid::Class { nodes } => {
                let s = (class_angle(k, *nodes) / 2.0).sin();
                2.0 * s * s / *nodes as f64
            }
            MollifierGrid::Group(g) => g.weights()[k],
        }
    }

    /// `ρ` at node `k`, or `None` off the identity sheet.
    fn rho(&self, k: usize) -> Option<f64> {
        match self {
            MollifierGrid::Class { nodes } => {
                let t = class_angle(k, *nodes);
                ((t / 2.0).cos() > 0.0).then(|| 2.0 * (t / 2.0).sin().abs())
            }
            MollifierGrid::Group(g) => match g.node(k) {
                GridPoint::Torus(x) => Some(torus_rho(&x)),
                GridPoint::Su2(e) => su2_rho(&Su2Element::from_euler(&e)),
            },
        }
    }

    /// Node spacing measured in `ρ` near the identity.
    pub fn spacing(&self) -> f64 {
        match self {
            MollifierGrid::Class { nodes } => 4.0 * PI / *nodes as f64,
            MollifierGrid::Group(g) => match g.model().torus_dim() {
                Some(_) => 2.0 * PI / g.shape()[0] as f64,
                None => 2.0 * PI / (g.band() + 1) as f64,
            },
        }
    }

    /// Whether the support radius `r^{1/n}` spans enough nodes.
    pub fn resolves(&self, r: f64) -> bool {
        let n = self.model().dimension() as f64;
        r.powf(1.0 / n) >= MIN_SUPPORT_NODES * self.spacing()
    }

    /// Largest band whose coefficients the rule still integrates reliably.
    pub fn coefficient_band(&self) -> u32 {
        match self {
            MollifierGrid::Class { nodes } => (*nodes / 8) as u32,
            MollifierGrid::Group(g) => g.band(),
        }
    }
}

fn class_angle(k: usize, nodes: usize) -> f64 {
    4.0 * PI * k as f64 / nodes as f64
}

fn torus_rho(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| 2.0 - 2.0 * (2.0 * PI * v).cos())
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

fn su2_rho(g: &Su2Element) -> Option<f64> {
    let a = g.a.re.clamp(-1.0, 1.0);
    (a > 0.0).then(|| 2.0 * (1.0 - a * a).max(0.0).sqrt())
}

/// A real central function sampled on a [`MollifierGrid`].
#[derive(Clone, Debug)]
pub struct CentralFunction {
    grid: MollifierGrid,
    values: Vec<f64>,
}

/// `φ_r = c_r φ̃(r^{−1/n}ρ)` with `∫φ_r = 1`.
#[derive(Clone, Debug)]
pub struct Mollifier {
    pub r: f64,
    pub c_r: f64,
    pub function: CentralFunction,
}

impl CentralFunction {
    pub fn grid(&self) -> &MollifierGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.weight(k) * v)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.weight(k) * v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Multiplies by `ρ²`.
    pub fn times_rho_squared(&self) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let r = self.grid.rho(k).unwrap_or(0.0);
                if *v == 0.0 {
                    0.0
                } else {
                    v * r * r
                }
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Samples as a [`GroupFunction`]; only for group grids.
    pub fn to_group_function(&self) -> Result<GroupFunction> {
        match &self.grid {
            MollifierGrid::Group(g) => GroupFunction::new(
                g.clone(),
                self.values.iter().map(|&v| Complex64::from(v)).collect(),
            ),
            MollifierGrid::Class { .. } => Err(Error::Unsupported(
                "class-angle samples have no full-grid form".into(),
            )),
        }
    }

    /// Scalar Fourier coefficients `f̂(ℓ) = d_ℓ⁻¹ ∫ f χ_ℓ` for `2ℓ ≤ band` (class rule only).
    pub fn class_coefficients(&self, band: u32) -> Result<Vec<f64>> {
        let MollifierGrid::Class { nodes } = self.grid else {
            return Err(Error::Unsupported(
                "class coefficients need the class-angle rule".into(),
            ));
        };
        let len = band as usize + 1;
        let support: Vec<usize> = (0..nodes).filter(|&k| self.values[k] != 0.0).collect();
        let raw = support
            .par_chunks(256)
            .map(|chunk| {
                let mut acc = vec![0.0; len];
                for &k in chunk {
                    let t = class_angle(k, nodes);
                    let c2 = 2.0 * (t / 2.0).cos();
                    let f = self.grid.weight(k) * self.values[k];
                    // χ_w = U_w(cos(t/2)) by the three-term recurrence
                    let (mut prev, mut cur) = (0.0, 1.0);
                    for a in acc.iter_mut() {
                        *a += f * cur;
                        let next = c2 * cur - prev;
                        prev = cur;
                        cur = next;
                    }
                }
                acc
            })
            .collect::<Vec<Vec<f64>>>()
            .into_iter()
            // summed in chunk order so results do not depend on scheduling
            .fold(vec![0.0; len], |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            });
        Ok(raw
            .into_iter()
            .enumerate()
            .map(|(w, v)| v / (w + 1) as f64)
            .collect())
    }

    /// Coefficients on the full grid up to its band.
    pub fn group_coefficients(&self) -> Result<MatrixSymbol> {
        let f = self.to_group_function()?;
        fourier_forward(&f, f.grid().band())
    }

    /// Class coefficients up to the smallest band holding all but a `1e−12` share of `‖f‖₂²`.
    pub fn resolved_coefficients(&self) -> Result<Vec<f64>> {
        let cap = self.grid.coefficient_band();
        let s = self.class_coefficients(cap)?;
        let mass: Vec<f64> = s
            .iter()
            .enumerate()
            .map(|(w, v)| ((w + 1) * (w + 1)) as f64 * v * v)
            .collect();
        let total: f64 = mass.iter().sum();
        let mut tail = 0.0;
        let mut band = cap as usize;
        while band > 0 && tail + mass[band] <= TAIL * total {
            tail += mass[band];
            band -= 1;
        }
        if band + 1 >= cap as usize && total > 0.0 {
            return Err(Error::BandExceeded {
                label_band: cap + 1,
                grid_band: cap,
            });
        }
        Ok(s[..=band].to_vec())
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "scale r = {r} must lie in (0, 1]"
        )))
    }
}

pub fn build_phi_r(model: &GroupModel, grid: &MollifierGrid, r: f64) -> Result<Mollifier> {
    check_r(r)?;
    grid.model().check_same(model)?;
    if !grid.resolves(r) {
        return Err(Error::Unresolved {
            smallest_r: smallest_resolved(grid),
        });
    }
    let n = model.dimension() as f64;
    let scale = r.powf(-1.0 / n);
    let raw: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| grid.rho(k).map_or(0.0, |rho| plateau_bump(scale * rho)))
        .collect();
    let mass: f64 = raw
        .iter()
        .enumerate()
        .map(|(k, v)| grid.weight(k) * v)
        .sum();
    let c_r = 1.0 / mass;
    Ok(Mollifier {
        r,
        c_r,
        function: CentralFunction {
            grid: grid.clone(),
            values: raw.into_iter().map(|v| v * c_r).collect(),
        },
    })
}

/// `ψ_r = φ_r − φ_{r/2}`.
pub fn build_psi_r(model: &GroupModel, grid: &MollifierGrid, r: f64) -> Result<CentralFunction> {
    let a = build_phi_r(model, grid, r)?;
    let b = build_phi_r(model, grid, r / 2.0)?;
    Ok(a.function.sub(&b.function))
}

pub fn smallest_resolved(grid: &MollifierGrid) -> f64 {
    let n = grid.model().dimension() as i32;
    (MIN_SUPPORT_NODES * grid.spacing()).powi(n)
}

/// `∫_{ρ ≥ t^{1/n}} φ_r`.
pub fn mollifier_tail(phi: &Mollifier, t: f64) -> f64 {
    let f = &phi.function;
    let n = f.grid.model().dimension() as f64;
    let cut = t.powf(1.0 / n);
    f.values
        .iter()
        .enumerate()
        .filter(|(k, v)| **v != 0.0 && f.grid.rho(*k).is_some_and(|rho| rho >= cut))
        .map(|(k, v)| f.grid.weight(k) * v)
        .sum()
}

/// `∫ |φ_r(gh⁻¹) − φ_r(g)| dg` with its ratio to `ρ(h)/r^{1/n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct L1Modulus {
    pub r: f64,
    pub rho_h: f64,
    pub value: f64,
    pub ratio: f64,
}

/// Evaluated on a Cartesian box in exponential coordinates around the
/// identity, `nodes` points per axis; `h` must lie near the identity.
pub fn l1_modulus(model: &GroupModel, r: f64, h: &GridPoint, nodes: usize) -> Result<L1Modulus> {
    check_r(r)?;
    let n = model.dimension();
    if n != 3 {
        return Err(Error::Unsupported(
            "the translate integral is implemented in dimension 3".into(),
        ));
    }
    let scale = r.powf(-1.0 / n as f64);
    let support = r.powf(1.0 / n as f64);
    // Exponential coordinates v of h, and ρ as a function of v.
    let (hv, rho_h): ([f64; 3], f64) = match (model.torus_dim(), h) {
        (Some(3), GridPoint::Torus(x)) if x.len() == 3 => {
            let w: Vec<f64> = x.iter().map(|v| v - v.round()).collect();
            ([w[0], w[1], w[2]], torus_rho(x))
        }
        (None, GridPoint::Su2(e)) => {
            let g = Su2Element::from_euler(e);
            let t = g.class_angle();
            if t >= PI {
                return Err(Error::OutOfRange("h must lie on the identity sheet".into()));
            }
            let s = (t / 2.0).sin();
            // g = cos(t/2) − i sin(t/2) u·σ, read u off a and b
            let u = if s > 0.0 {
                [-g.b.im / s, g.b.re / s, g.a.im / s]
            } else {
                [0.0; 3]
            };
            ([u[0] * t, u[1] * t, u[2] * t], 2.0 * s)
        }
        _ => {
            return Err(Error::ModelMismatch {
                expected: format!("{model:?}"),
                found: "translation of another model".into(),
            })
        }
    };
    let torus = model.torus_dim().is_some();
    // coordinate radius of the support ball
    let radius = if torus {
        (support / PI).min(0.5) * 1.05
    } else {
        2.0 * (support / 2.0).min(1.0).asin() * 1.05
    };
    let lo: Vec<f64> = (0..3).map(|i| hv[i].min(0.0) - radius).collect();
    let hi: Vec<f64> = (0..3).map(|i| hv[i].max(0.0) + radius).collect();
    let step: Vec<f64> = (0..3).map(|i| (hi[i] - lo[i]) / nodes as f64).collect();
    let cell = step.iter().product::<f64>();
    let hg = match h {
        GridPoint::Su2(e) => Some(Su2Element::from_euler(e).inverse()),
        _ => None,
    };
    let bump = |rho: Option<f64>| rho.map_or(0.0, |p| plateau_bump(scale * p));
    let raw = (0..nodes * nodes * nodes)
        .into_par_iter()
        .map(|idx| {
            let ijk = [idx % nodes, (idx / nodes) % nodes, idx / (nodes * nodes)];
            let v: Vec<f64> = (0..3)
                .map(|i| lo[i] + (ijk[i] as f64 + 0.5) * step[i])
                .collect();
            if torus {
                let shifted: Vec<f64> = v.iter().zip(&hv).map(|(a, b)| a - b).collect();
                (bump(Some(torus_rho(&shifted))) - bump(Some(torus_rho(&v)))).abs()
            } else {
                let t = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if t >= PI {
                    return 0.0;
                }
                let g = Su2Element::exp([v[0], v[1], v[2]], 1.0);
                let gh = g.mul(hg.as_ref().unwrap());
                let density = if t > 1e-12 {
                    let s = (t / 2.0).sin();
                    s * s / (4.0 * PI * PI * t * t)
                } else {
                    1.0 / (16.0 * PI * PI)
                };
                density * (bump(su2_rho(&gh)) - bump(su2_rho(&g))).abs()
            }
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>();
    // the normalisation uses the same box rule for consistency
    let mass = if torus {
        (0..nodes * nodes * nodes)
            .into_par_iter()
            .map(|idx| {
                let ijk = [idx % nodes, (idx / nodes) % nodes, idx / (nodes * nodes)];
                let v: Vec<f64> = (0..3)
                    .map(|i| lo[i] + (ijk[i] as f64 + 0.5) * step[i])
                    .collect();
                bump(Some(torus_rho(&v)))
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum::<f64>()
    } else {
        let phi = build_phi_r(model, &MollifierGrid::class(CLASS_NODES), r)?;
        1.0 / (phi.c_r * cell)
    };
    let value = raw / mass;
    let bound = rho_h / support;
    Ok(L1Modulus {
        r,
        rho_h,
        value,
        ratio: if bound > 0.0 { value / bound } else { 0.0 },
    })
}

/// Least-squares line through `(log r, log value)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub ladder: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl SlopeFit {
    pub fn good(&self) -> bool {
        self.r_squared >= MIN_R_SQUARED
    }
}

pub fn fit_slope(ladder: &[f64], values: &[f64]) -> Result<SlopeFit> {
    if ladder.len() < MIN_LADDER {
        return Err(Error::LadderTooShort {
            points: ladder.len(),
            min: MIN_LADDER,
        });
    }
    if values
        .iter()
        .chain(ladder)
        .any(|v| !(v.is_finite() && *v > 0.0))
    {
        return Err(Error::OutOfRange(
            "log-log fit needs positive values".into(),
        ));
    }
    let xs: Vec<f64> = ladder.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(SlopeFit {
        ladder: ladder.to_vec(),
        values: values.to_vec(),
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// `{2^{−k}}`, `k = 4..=9`.
pub fn default_ladder() -> Vec<f64> {
    (4..=9).map(|k| 2f64.powi(-k)).collect()
}

/// Drops scales the grid cannot resolve (for `ψ_r` the scale `r/2` must resolve).
pub fn usable_ladder(grid: &MollifierGrid, ladder: &[f64], halves: bool) -> Result<Vec<f64>> {
    let kept: Vec<f64> = ladder
        .iter()
        .copied()
        .filter(|&r| grid.resolves(if halves { r / 2.0 } else { r }))
        .collect();
    if kept.len() < MIN_LADDER {
        return Err(Error::LadderTooShort {
            points: kept.len(),
            min: MIN_LADDER,
        });
    }
    Ok(kept)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MollifierSlopes {
    pub normalisation: SlopeFit,
    pub sup: SlopeFit,
    pub phi_l2: SlopeFit,
    pub psi_l2: SlopeFit,
    pub max_mass_error: f64,
}

/// Slopes of `c_r`, `sup φ_r`, `‖φ_r‖₂` and `‖ψ_r‖₂` against `r`.
pub fn mollifier_slopes(grid: &MollifierGrid, ladder: &[f64]) -> Result<MollifierSlopes> {
    let model = grid.model();
    let ladder = usable_ladder(grid, ladder, true)?;
    let rows: Vec<(f64, f64, f64, f64, f64)> = ladder
        .iter()
        .map(|&r| {
            let phi = build_phi_r(&model, grid, r)?;
            let half = build_phi_r(&model, grid, r / 2.0)?;
            let psi = phi.function.sub(&half.function);
            let err = (phi.function.integral() - 1.0)
                .abs()
                .max(psi.integral().abs());
            Ok((
                phi.c_r,
                phi.function.sup(),
                phi.function.l2_norm(),
                psi.l2_norm(),
                err,
            ))
        })
        .collect::<Result<_>>()?;
    let col = |f: fn(&(f64, f64, f64, f64, f64)) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(MollifierSlopes {
        normalisation: fit_slope(&ladder, &col(|x| x.0))?,
        sup: fit_slope(&ladder, &col(|x| x.1))?,
        phi_l2: fit_slope(&ladder, &col(|x| x.2))?,
        psi_l2: fit_slope(&ladder, &col(|x| x.3))?,
        max_mass_error: rows.iter().fold(0.0, |m, x| m.max(x.4)),
    })
}

/// A function vanishing to a known order at the identity.
#[derive(Clone, Debug, PartialEq)]
pub enum VanishingFactor {
    One,
    RhoSquared,
    /// `ξ(g)_ij − δ_ij` for a representation in the generating family.
    Coefficient(Elementary),
}

impl VanishingFactor {
    pub fn order(&self) -> usize {
        match self {
            VanishingFactor::One => 0,
            VanishingFactor::RhoSquared => 2,
            VanishingFactor::Coefficient(_) => 1,
        }
    }

    fn sample(&self, p: &GridPoint) -> Complex64 {
        match (self, p) {
            (VanishingFactor::One, _) => Complex64::from(1.0),
            (VanishingFactor::RhoSquared, GridPoint::Torus(x)) => {
                Complex64::from(torus_rho(x).powi(2))
            }
            (VanishingFactor::RhoSquared, GridPoint::Su2(e)) => {
                let a = Su2Element::from_euler(e).a.re.clamp(-1.0, 1.0);
                Complex64::from(4.0 * (1.0 - a * a))
            }
            (VanishingFactor::Coefficient(el), GridPoint::Torus(x)) => {
                let k = el.rep.freq().unwrap();
                let ph: f64 = k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum();
                Complex64::from_polar(1.0, 2.0 * PI * ph) - 1.0
            }
            (VanishingFactor::Coefficient(el), GridPoint::Su2(e)) => {
                let m = crate::harmonic::wigner_of(
                    el.rep.twice_spin().unwrap(),
                    &Su2Element::from_euler(e),
                );
                m[(el.row, el.col)] - if el.row == el.col { 1.0 } else { 0.0 }
            }
        }
    }
}

/// `‖qψ_r‖_{H^{−s}}` for one scale.
pub fn negative_sobolev_norm(psi: &CentralFunction, q: &VanishingFactor, s: f64) -> Result<f64> {
    match &psi.grid {
        MollifierGrid::Class { .. } => match q {
            VanishingFactor::One => Ok(central_sobolev(&psi.resolved_coefficients()?, -s)),
            VanishingFactor::RhoSquared => Ok(central_sobolev(
                &psi.times_rho_squared().resolved_coefficients()?,
                -s,
            )),
            VanishingFactor::Coefficient(e) => {
                let te = e
                    .rep
                    .twice_spin()
                    .ok_or_else(|| Error::InvalidLabel(e.rep.to_string()))?
                    as i64;
                let coeffs = psi.resolved_coefficients()?;
                Ok(elementary_central_norm(e, te, &coeffs, -s))
            }
        },
        MollifierGrid::Group(g) => {
            let f = GroupFunction::from_index_fn(g.clone(), {
                let g = g.clone();
                let v = psi.values.clone();
                let q = q.clone();
                move |i| q.sample(&g.node(i)) * v[i]
            });
            Ok(sobolev_norm(&fourier_forward(&f, g.band())?, -s))
        }
    }
}

/// `sqrt(Σ d² ⟨ℓ⟩^{2s} |s_ℓ|²)` for a scalar sequence indexed by `2ℓ`.
fn central_sobolev(coeffs: &[f64], s: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(w, v)| {
            let d = (w + 1) as f64;
            d * d * bracket(&IrrepLabel::Su2(w as u32)).powf(2.0 * s) * v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// `‖⟨ξ⟩^s 𝔻_ij(s_ℓ I)‖_{ℓ²}` for a central sequence, entry by entry.
fn elementary_central_norm(e: &Elementary, te: i64, coeffs: &[f64], s: f64) -> f64 {
    let (ti, tj) = (2 * e.row as i64 - te, 2 * e.col as i64 - te);
    let top = coeffs.len() as i64 - 1 - te;
    (0..=top.max(-1))
        .into_par_iter()
        .map(|tjj| {
            let d = (tjj + 1) as f64;
            let mut hs = 0.0;
            for a in 0..=tjj {
                let ta = 2 * a - tjj;
                let tb = ta + tj - ti;
                if tb.abs() > tjj {
                    continue;
                }
                let mut v = 0.0;
                for tl in ((tjj - te).abs()..=tjj + te).step_by(2) {
                    let c1 = clebsch_gordan(te, ti, tl, ta - ti, tjj, ta);
                    let c2 = clebsch_gordan(te, tj, tl, tb - tj, tjj, tb);
                    v += (tl + 1) as f64 * coeffs[tl as usize] * c1 * c2;
                }
                v /= d;
                if ti == tj {
                    v -= coeffs[tjj as usize];
                }
                hs += v * v;
            }
            d * bracket(&IrrepLabel::Su2(tjj as u32)).powf(2.0 * s) * hs
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevDecay {
    pub order: usize,
    pub s: f64,
    pub expected_slope: f64,
    pub fit: SlopeFit,
}

/// Slope of `r ↦ ‖qψ_r‖_{H^{−s}}`; expected `(t+s)/n − ½`.
pub fn negative_sobolev_decay(
    grid: &MollifierGrid,
    q: &VanishingFactor,
    s: f64,
    ladder: &[f64],
) -> Result<SobolevDecay> {
    let model = grid.model();
    let n = model.dimension() as f64;
    if !(0.0..=1.0 + n / 2.0).contains(&s) {
        return Err(Error::OutOfRange(format!(
            "s = {s} outside [0, {}]",
            1.0 + n / 2.0
        )));
    }
    let ladder = usable_ladder(grid, ladder, true)?;
    let values: Vec<f64> = ladder
        .iter()
        .map(|&r| negative_sobolev_norm(&build_psi_r(&model, grid, r)?, q, s))
        .collect::<Result<_>>()?;
    let t = q.order();
    Ok(SobolevDecay {
        order: t,
        s,
        expected_slope: (t as f64 + s) / n - 0.5,
        fit: fit_slope(&ladder, &values)?,
    })
}

/// Symbols the probe accepts.
#[derive(Clone)]
pub enum ProbeSymbol {
    Zero,
    Identity,
    /// Diagonal SU(2) symbol given by `(2ℓ, 2m) ↦ σ(ℓ)_mm`, any band.
    Diagonal(Arc<dyn Fn(u32, i64) -> Complex64 + Send + Sync>),
    /// A stored symbol; its trusted band limits the probe.
    Matrix(MatrixSymbol),
}

impl std::fmt::Debug for ProbeSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProbeSymbol::Zero => write!(f, "Zero"),
            ProbeSymbol::Identity => write!(f, "Identity"),
            ProbeSymbol::Diagonal(_) => write!(f, "Diagonal(..)"),
            ProbeSymbol::Matrix(m) => write!(f, "Matrix(band {})", m.band()),
        }
    }
}

impl ProbeSymbol {
    /// The SU(2) Riesz symbol `λ⁻¹σ_Z`. Conjugating by a fixed rotation leaves
    /// every probe norm unchanged, so `Z` is taken along the third axis.
    pub fn su2_riesz(z: &[f64]) -> Result<Self> {
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if z.len() != 3 || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalised { norm });
        }
        Ok(ProbeSymbol::Diagonal(Arc::new(|tj, tm| {
            let lam = casimir_lambda(&IrrepLabel::Su2(tj));
            if lam > 0.0 {
                Complex64::new(0.0, -(tm as f64) / (2.0 * lam))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub m: usize,
    pub epsilon: f64,
    pub target_slope: f64,
    pub threshold: f64,
    pub band: u32,
    pub trivial: bool,
    pub fit: Option<SlopeFit>,
    pub pass: bool,
}

/// `m = κ/2` with `n(1+ε) = 4m`.
pub fn probe_exponents(model: &GroupModel) -> (usize, f64) {
    let m = model.kappa() / 2;
    let n = model.dimension() as f64;
    (m, 4.0 * m as f64 / n - 1.0)
}

/// `r ↦ ‖𝔸^m(σψ̂_r)‖_{ℓ²}` on the ladder, with the pass rule `slope ≥ 2m/n − ½ − 0.1`.
pub fn cz_probe(grid: &MollifierGrid, sigma: &ProbeSymbol, ladder: &[f64]) -> Result<ProbeReport> {
    let model = grid.model();
    let (m, epsilon) = probe_exponents(&model);
    let n = model.dimension() as f64;
    let target = 2.0 * m as f64 / n - 0.5;
    let ladder = usable_ladder(grid, ladder, true)?;
    let mut values = Vec::with_capacity(ladder.len());
    let mut band = 0;
    for &r in &ladder {
        let psi = build_psi_r(&model, grid, r)?;
        let (v, b) = probe_norm(&psi, sigma, m)?;
        values.push(v);
        band = band.max(b);
    }
    let trivial = values.iter().all(|v| *v == 0.0);
    let fit = if trivial {
        None
    } else {
        Some(fit_slope(&ladder, &values)?)
    };
    let pass = trivial
        || fit
            .as_ref()
            .is_some_and(|f| f.slope >= target - SLOPE_TOLERANCE);
    Ok(ProbeReport {
        m,
        epsilon,
        target_slope: target,
        threshold: target - SLOPE_TOLERANCE,
        band,
        trivial,
        fit,
        pass,
    })
}

/// `‖𝔸^m(σψ̂)‖_{ℓ²}` and the band it was evaluated on.
pub fn probe_norm(psi: &CentralFunction, sigma: &ProbeSymbol, m: usize) -> Result<(f64, u32)> {
    if let ProbeSymbol::Zero = sigma {
        return Ok((0.0, 0));
    }
    match (&psi.grid, sigma) {
        (MollifierGrid::Class { .. }, ProbeSymbol::Identity) => {
            let mut f = psi.clone();
            for _ in 0..m {
                f = f.times_rho_squared();
            }
            let c = f.resolved_coefficients()?;
            Ok((central_sobolev(&c, 0.0), c.len() as u32 - 1))
        }
        (MollifierGrid::Class { .. }, ProbeSymbol::Diagonal(d)) => {
            let s = psi.resolved_coefficients()?;
            let top = s.len() as u32 - 1;
            let band = top + 2 * m as u32;
            let d = d.clone();
            let mut cur: Arc<dyn Fn(u32, i64) -> Complex64 + Send + Sync> = {
                let s = Arc::new(s);
                Arc::new(move |tj, tm| {
                    if tj <= top {
                        d(tj, tm) * s[tj as usize]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            };
            // tabulate all but the last power of 𝔸; the last is summed on the fly
            for _ in 1..m {
                let table = Arc::new(diagonal_laplace_table(&*cur, band));
                cur = Arc::new(move |tj, tm| {
                    table
                        .get(tj as usize)
                        .map_or(Complex64::new(0.0, 0.0), |row| {
                            row[((tm + tj as i64) / 2) as usize]
                        })
                });
            }
            let norm = (0..=band)
                .into_par_iter()
                .map(|tj| {
                    let d = (tj + 1) as f64;
                    let hs: f64 = (0..=tj as i64)
                        .map(|a| {
                            laplace_diagonal_entry(&|l, mm| cur(l, mm), tj, 2 * a - tj as i64)
                                .norm_sqr()
                        })
                        .sum();
                    d * hs
                })
                .collect::<Vec<f64>>()
                .iter()
                .sum::<f64>()
                .sqrt();
            Ok((norm, band))
        }
        (_, ProbeSymbol::Matrix(sym)) => matrix_probe(psi, sym, m),
        (MollifierGrid::Group(g), _) => {
            let sym = match sigma {
                ProbeSymbol::Identity => MatrixSymbol::identity(g.model(), g.band()),
                _ => {
                    return Err(Error::Unsupported(
                        "lazily given symbols need the class-angle rule".into(),
                    ))
                }
            };
            matrix_probe(psi, &sym, m)
        }
        (MollifierGrid::Class { .. }, ProbeSymbol::Zero) => unreachable!(),
    }
}

/// `(𝔸τ)` for a diagonal symbol, tabulated on `2ℓ ≤ band`.
fn diagonal_laplace_table(
    tau: &(dyn Fn(u32, i64) -> Complex64 + Send + Sync),
    band: u32,
) -> Vec<Vec<Complex64>> {
    (0..=band)
        .into_par_iter()
        .map(|tj| {
            (0..=tj as i64)
                .map(|a| laplace_diagonal_entry(&|l, mm| tau(l, mm), tj, 2 * a - tj as i64))
                .collect()
        })
        .collect()
}

fn psi_symbol(psi: &CentralFunction, model: &GroupModel, band: u32) -> Result<MatrixSymbol> {
    match &psi.grid {
        MollifierGrid::Class { .. } => {
            let s = psi.class_coefficients(band)?;
            Ok(MatrixSymbol::scalar_fn(model, band, |l| {
                Complex64::from(s[l.twice_spin().unwrap() as usize])
            }))
        }
        MollifierGrid::Group(_) => psi.group_coefficients(),
    }
}

fn matrix_probe(psi: &CentralFunction, sigma: &MatrixSymbol, m: usize) -> Result<(f64, u32)> {
    let model = sigma.model().clone();
    psi.grid.model().check_same(&model)?;
    let fb = model.delta0().iter().map(|r| r.band()).max().unwrap_or(1);
    let reach = fb * m as u32;
    // band of ψ̂ fed into the product
    let need = match &psi.grid {
        MollifierGrid::Class { .. } => psi.resolved_coefficients()?.len() as u32 - 1 + reach,
        MollifierGrid::Group(g) => g.band(),
    };
    let have = sigma.trusted_band().min(sigma.band());
    if have < need || need < reach {
        return Err(Error::BandExceeded {
            label_band: need,
            grid_band: have,
        });
    }
    let trusted = need;
    let tau = psi_symbol(psi, &model, trusted)?;
    let mut cur = symbol_product(sigma, &tau)?.with_exact_band(Some(trusted));
    for _ in 0..m {
        cur = match model.torus_dim() {
            Some(_) => TorusArray::from_symbol(&cur)?.laplace()?.to_symbol(),
            None => laplace_difference(&cur)?,
        };
    }
    let band = trusted - reach;
    let norm = cur
        .iter()
        .filter(|(l, _)| l.band() <= band)
        .map(|(l, v)| l.dimension() as f64 * hs_norm_sq(v))
        .sum::<f64>()
        .sqrt();
    Ok((norm, band))
}

/// Both sides of `‖𝔸(σψ̂)‖ ≤ C₂‖ψ‖_{H^{−2}} + C₀‖ρ²ψ‖₂ + Σ_ij C_ij‖q_ji ψ‖_{H^{−1}}`,
/// the bound obtained from the `𝔸` rule with `C₀ = sup‖σ‖`,
/// `C_ij = sup⟨ξ⟩‖𝔻_ij σ‖` and `C₂ = sup⟨ξ⟩²‖𝔸σ‖`, all on one band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeibnizBound {
    pub band: u32,
    pub lhs: f64,
    pub laplace_term: f64,
    pub plain_term: f64,
    pub cross_term: f64,
}

impl LeibnizBound {
    pub fn rhs(&self) -> f64 {
        self.laplace_term + self.plain_term + self.cross_term
    }
}

pub fn leibniz_bound(psi: &CentralFunction, sigma: &MatrixSymbol) -> Result<LeibnizBound> {
    let model = sigma.model().clone();
    let trusted = sigma
        .trusted_band()
        .min(sigma.band())
        .min(psi.grid.coefficient_band());
    let fb = model.delta0().iter().map(|r| r.band()).max().unwrap_or(1);
    if trusted < 2 * fb {
        return Err(Error::RangeTooSmall {
            range: trusted,
            min: 2 * fb,
        });
    }
    let band = trusted - fb;
    // ψ̂ truncated to the trusted band is exactly the symbol of a band-limited
    // function, so the 𝔸 rule holds exactly below `band`.
    let tau = psi_symbol(psi, &model, trusted)?.with_exact_band(Some(trusted));
    let sigma = sigma.clone().with_exact_band(Some(trusted));
    let restrict =
        |s: &MatrixSymbol, f: &dyn Fn(&IrrepLabel, &crate::linalg::CMatrix) -> f64| -> Vec<f64> {
            s.iter()
                .filter(|(l, _)| l.band() <= band)
                .map(|(l, v)| f(l, v))
                .collect()
        };
    let l2 = |s: &MatrixSymbol, w: f64| -> f64 {
        restrict(s, &|l, v| {
            l.dimension() as f64 * bracket(l).powf(2.0 * w) * hs_norm_sq(v)
        })
        .iter()
        .sum::<f64>()
        .sqrt()
    };
    let sup = |s: &MatrixSymbol, w: f64| -> f64 {
        restrict(s, &|l, v| bracket(l).powf(w) * op_norm(v))
            .into_iter()
            .fold(0.0, f64::max)
    };
    let prod = symbol_product(&sigma, &tau)?.with_exact_band(Some(trusted));
    let lhs = l2(&laplace_difference(&prod)?, 0.0);
    let laplace_term = sup(&laplace_difference(&sigma)?, 2.0) * l2(&tau, -2.0);
    let plain_term = sup(&sigma, 0.0) * l2(&laplace_difference(&tau)?, 0.0);
    let mut cross_term = 0.0;
    for e in generators(&model) {
        let t = Elementary {
            rep: e.rep.clone(),
            row: e.col,
            col: e.row,
        };
        let ds = apply_word(&e, &sigma)?;
        let dt = apply_word(&t, &tau)?;
        cross_term += sup(&ds, 1.0) * l2(&dt, -1.0);
    }
    Ok(LeibnizBound {
        band,
        lhs,
        laplace_term,
        plain_term,
        cross_term,
    })
}

fn apply_word(e: &Elementary, s: &MatrixSymbol) -> Result<MatrixSymbol> {
    if s.model().is_su2() {
        apply_elementary_recoupled(e, s)
    } else {
        crate::symbol::apply_difference(&DifferenceWord::single(e.clone()), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(plateau_bump(0.0), 1.0);
        assert_eq!(plateau_bump(0.5), 1.0);
        assert_eq!(plateau_bump(1.0), 0.0);
        assert!((plateau_bump(0.75) - 0.5).abs() < 1e-12);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = plateau_bump(0.5 + k as f64 / 200.0);
            assert!(v <= prev + 1e-15 && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn class_rule_integrates_characters() {
        let g = MollifierGrid::class(4096);
        for w in 0..6u32 {
            let v: f64 = (0..4096)
                .map(|k| g.weight(k) * crate::harmonic::character(w, class_angle(k, 4096)))
                .sum();
            assert!(
                (v - if w == 0 { 1.0 } else { 0.0 }).abs() < 1e-12,
                "w={w} v={v}"
            );
        }
    }

    #[test]
    fn line_fit_recovers_power() {
        let r: Vec<f64> = (1..6).map(|k| 2f64.powi(-k)).collect();
        let v: Vec<f64> = r.iter().map(|x| 3.0 * x.powf(-0.5)).collect();
        let f = fit_slope(&r, &v).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        assert!(fit_slope(&r[..3], &v[..3]).is_err());
    }
}
