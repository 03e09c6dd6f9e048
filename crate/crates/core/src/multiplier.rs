//! Finite-range checks of Mikhlin-type multiplier conditions.
//!
//! Every check works on a truncated label range, so "pass" means: all
//! constants are finite on the range and none of them is still growing
//! between the half range and the full range.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{bracket, cached_grid, fourier_inverse, GroupModel};
use crate::linalg::CMatrix;
use crate::symbol::profile::torus_shells_with;
use crate::symbol::{
    difference_profile, symbol_product, DifferenceProfile, MatrixSymbol, ProfileSpec, SymbolData,
    TorusArray,
};

/// Fewest labels per direction a range must contain.
pub const MIN_RANGE: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Largest admissible `C(R) / C(R/2)`.
    pub growth_threshold: f64,
    /// When the supremum is still rising at the edge, the shell increment
    /// over `[R−q, R]` must be at most this fraction of the one over
    /// `[R−2q, R−q]`, `q ≈ R/4`.
    pub saturation: f64,
    /// Constants below `floor · C₀` count as zero.
    pub floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            growth_threshold: 1.25,
            saturation: 0.6,
            floor: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantReport {
    pub name: String,
    /// Difference order of the condition.
    pub order: usize,
    /// Exponent of `⟨ξ⟩` in the weight.
    pub weight: f64,
    pub full: f64,
    pub half: f64,
    pub quarter: f64,
    pub growth: f64,
    pub saturated: bool,
    /// Whether this constant enters the verdict.
    pub required: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassGrading {
    pub m: f64,
    pub rho: f64,
    pub max_order: usize,
    /// `(p, r(p))` for the Sobolev loss `r(p) = κ(1−ρ)|1/p − 1/2|`.
    pub loss: Vec<(f64, f64)>,
    pub reweighted_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub check: String,
    pub model: String,
    pub range: u32,
    pub range_description: String,
    pub kappa: usize,
    pub trusted_band: Option<u32>,
    pub constants: Vec<ConstantReport>,
    pub pass: bool,
    pub tolerances: Tolerances,
    pub class: Option<ClassGrading>,
    pub notes: Vec<String>,
}

impl MultiplierReport {
    pub fn constant(&self, name: &str) -> Option<&ConstantReport> {
        self.constants.iter().find(|c| c.name == name)
    }

    /// Required constant of the given order.
    pub fn order(&self, order: usize) -> Option<&ConstantReport> {
        self.constants
            .iter()
            .find(|c| c.order == order && c.name.starts_with('C'))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymbolClassSpec {
    pub m: f64,
    pub rho: f64,
    pub max_order: usize,
}

impl SymbolClassSpec {
    pub fn new(m: f64, rho: f64, max_order: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::OutOfRange(format!(
                "type rho = {rho} outside [0, 1]"
            )));
        }
        Ok(Self { m, rho, max_order })
    }
}

fn range_description(model: &GroupModel, range: u32) -> String {
    let scope = if model.is_su2() {
        format!("su2 labels with 2l <= {range}")
    } else {
        format!("{model} frequencies with |k|_inf <= {range}")
    };
    format!("{scope}; pass means finite constants with a non-growing tail on this range only")
}

fn check_range(range: u32) -> Result<()> {
    if range < MIN_RANGE {
        return Err(Error::RangeTooSmall {
            range,
            min: MIN_RANGE,
        });
    }
    Ok(())
}

struct Assess<'a> {
    tol: &'a Tolerances,
    range: u32,
    zero: f64,
}

impl Assess<'_> {
    fn grade(
        &self,
        name: String,
        order: usize,
        weight: f64,
        shells: &[f64],
        required: bool,
    ) -> ConstantReport {
        let sup = |up: u32| {
            shells
                .iter()
                .take(up as usize + 1)
                .copied()
                .fold(0.0, f64::max)
        };
        let shell = |b: u32| shells.get(b as usize).copied().unwrap_or(0.0);
        let (full, half, quarter) = (sup(self.range), sup(self.range / 2), sup(self.range / 4));
        // even step keeps the SU(2) spin parity fixed
        let q = 2 * (self.range / 8).max(1);
        let (growth, saturated) = if full <= self.zero {
            (1.0, true)
        } else {
            let g = full / half.max(self.zero);
            let tol = 1e-6 * full + self.zero;
            let flat = full - sup(self.range - q) <= tol;
            let late = shell(self.range) - shell(self.range - q);
            let early = shell(self.range - q) - shell(self.range - 2 * q);
            (
                g,
                flat || late <= tol || (early > 0.0 && late <= self.tol.saturation * early),
            )
        };
        let pass = full.is_finite() && growth < self.tol.growth_threshold && saturated;
        ConstantReport {
            name,
            order,
            weight,
            full,
            half,
            quarter,
            growth,
            saturated,
            required,
            pass,
        }
    }
}

fn assess<'a>(tol: &'a Tolerances, range: u32, zero_order: &[f64]) -> Assess<'a> {
    let c0 = zero_order.iter().copied().fold(0.0, f64::max);
    Assess {
        tol,
        range,
        zero: tol.floor * c0.max(f64::MIN_POSITIVE),
    }
}

fn trusted(data: &SymbolData) -> Option<u32> {
    Some(data.trusted_band()).filter(|&b| b != u32::MAX)
}

fn finish(
    check: &str,
    data: &SymbolData,
    range: u32,
    constants: Vec<ConstantReport>,
    tol: Tolerances,
    notes: Vec<String>,
) -> MultiplierReport {
    let model = data.model();
    let pass = constants.iter().filter(|c| c.required).all(|c| c.pass);
    MultiplierReport {
        check: check.to_string(),
        model: model.to_string(),
        range,
        range_description: range_description(&model, range),
        kappa: model.kappa(),
        trusted_band: trusted(data),
        constants,
        pass,
        tolerances: tol,
        class: None,
        notes,
    }
}

fn order_name(a: usize) -> String {
    format!("C{a}")
}

/// `⟨ξ⟩^{|α|}‖𝔻^α σ(ξ)‖_op` for all words with `|α| ≤ κ`, with `𝔸^{κ/2}`
/// reported alongside.
pub fn check_mikhlin(data: &SymbolData, range: u32, kappa: usize) -> Result<MultiplierReport> {
    check_mikhlin_with(data, range, kappa, Tolerances::default())
}

pub fn check_mikhlin_with(
    data: &SymbolData,
    range: u32,
    kappa: usize,
    tol: Tolerances,
) -> Result<MultiplierReport> {
    check_range(range)?;
    let model = data.model();
    if kappa != model.kappa() {
        return Err(Error::OutOfRange(format!(
            "kappa {kappa} does not match {} for {model}",
            model.kappa()
        )));
    }
    let weights: Vec<f64> = (0..=kappa).map(|a| a as f64).collect();
    let spec = ProfileSpec {
        order_weights: weights.clone(),
        laplace: Some((kappa / 2, kappa as f64)),
        range,
    };
    let prof = difference_profile(data, &spec)?;
    let a = assess(&tol, range, &prof.orders[0]);
    let mut constants: Vec<ConstantReport> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| a.grade(order_name(i), i, w, &prof.orders[i], true))
        .collect();
    constants.push(laplace_constant(&a, &prof, kappa, false));
    Ok(finish("mikhlin", data, range, constants, tol, Vec::new()))
}

fn laplace_constant(
    a: &Assess<'_>,
    prof: &DifferenceProfile,
    kappa: usize,
    required: bool,
) -> ConstantReport {
    a.grade(
        format!("A^{}", kappa / 2),
        kappa,
        kappa as f64,
        prof.laplace.as_deref().unwrap_or(&[]),
        required,
    )
}

/// `𝔸^{κ/2}` with weight `⟨ξ⟩^κ` and words of order `≤ κ−1` only.
pub fn check_refined(data: &SymbolData, range: u32) -> Result<MultiplierReport> {
    check_refined_with(data, range, Tolerances::default())
}

pub fn check_refined_with(
    data: &SymbolData,
    range: u32,
    tol: Tolerances,
) -> Result<MultiplierReport> {
    check_range(range)?;
    let model = data.model();
    let kappa = model.kappa();
    let spec = ProfileSpec {
        order_weights: (0..kappa).map(|a| a as f64).collect(),
        laplace: Some((kappa / 2, kappa as f64)),
        range,
    };
    let prof = difference_profile(data, &spec)?;
    let a = assess(&tol, range, &prof.orders[0]);
    let mut constants: Vec<ConstantReport> = (0..kappa)
        .map(|i| a.grade(order_name(i), i, i as f64, &prof.orders[i], true))
        .collect();
    constants.push(laplace_constant(&a, &prof, kappa, true));
    let mut report = finish("refined", data, range, constants, tol, Vec::new());
    if report.pass {
        report.notes.push(format!(
            "refined conditions hold; words of order {kappa} were not evaluated"
        ));
    }
    Ok(report)
}

/// The three conditions on `𝕋³`: `|σ(k)|`, `|k||σ(k+e_j) − σ(k)|` and
/// `|k|²|σ(k) − (1/6)Σ_j(σ(k+e_j) + σ(k−e_j))|`.
pub fn check_torus3(data: &SymbolData, range: u32) -> Result<MultiplierReport> {
    check_torus3_with(data, range, Tolerances::default())
}

pub fn check_torus3_with(
    data: &SymbolData,
    range: u32,
    tol: Tolerances,
) -> Result<MultiplierReport> {
    let model = data.model();
    if model.torus_dim() != Some(3) {
        return Err(Error::ModelMismatch {
            expected: "torus-3".into(),
            found: model.to_string(),
        });
    }
    check_range(range)?;
    if data.trusted_band() < range + 1 {
        return Err(Error::RangeNotExact {
            range,
            exact: data.trusted_band() as i64 - 1,
        });
    }
    let arr = match data {
        SymbolData::Torus(a) => a.clone(),
        SymbolData::Matrix(s) => TorusArray::from_symbol(s)?,
    };
    let norm = |k: &[i64]| (k.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
    let c0 = torus_shells_with(&arr, range, |_, v| v.norm());
    let mut c1 = vec![0.0; range as usize + 1];
    for j in 0..3 {
        // σ(k + e_j) − σ(k)
        let d = arr.difference(j, -1)?;
        let s = torus_shells_with(&d, range, |k, v| norm(k) * v.norm());
        for (x, y) in c1.iter_mut().zip(s) {
            *x = f64::max(*x, y);
        }
    }
    // 6σ(k) − Σ_j(σ(k+e_j) + σ(k−e_j))
    let lap = arr.laplace()?;
    let c2 = torus_shells_with(&lap, range, |k, v| {
        let n = norm(k);
        n * n * v.norm() / 6.0
    });
    let a = assess(&tol, range, &c0);
    let constants = vec![
        a.grade("bounded".into(), 0, 0.0, &c0, true),
        a.grade("forward".into(), 1, 1.0, &c1, true),
        a.grade("average".into(), 2, 2.0, &c2, true),
    ];
    Ok(finish("torus3", data, range, constants, tol, Vec::new()))
}

/// `‖𝔻^α σ(ξ)‖_op ≤ C_α⟨ξ⟩^{m−ρ|α|}` for `|α| ≤ max_order`, with the
/// reduction to an order zero Mikhlin check after reweighting by
/// `⟨ξ⟩^{−m−κ(1−ρ)}`.
pub fn check_symbol_class(
    data: &SymbolData,
    spec: &SymbolClassSpec,
    range: u32,
) -> Result<MultiplierReport> {
    let spec = SymbolClassSpec::new(spec.m, spec.rho, spec.max_order)?;
    check_range(range)?;
    let tol = Tolerances::default();
    let model = data.model();
    let kappa = model.kappa();
    let weights: Vec<f64> = (0..=spec.max_order)
        .map(|a| spec.rho * a as f64 - spec.m)
        .collect();
    let prof = difference_profile(
        data,
        &ProfileSpec {
            order_weights: weights.clone(),
            laplace: None,
            range,
        },
    )?;
    let a = assess(&tol, range, &prof.orders[0]);
    let constants: Vec<ConstantReport> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| a.grade(order_name(i), i, w, &prof.orders[i], true))
        .collect();
    let shift = -spec.m - kappa as f64 * (1.0 - spec.rho);
    let reweighted = check_mikhlin_with(&data.reweight(shift), range, kappa, tol)?;
    let loss = [1.5, 2.0, 3.0, 4.0]
        .iter()
        .map(|&p| (p, sobolev_loss(kappa, spec.rho, p)))
        .collect();
    let mut report = finish("symbol_class", data, range, constants, tol, Vec::new());
    report.pass &= reweighted.pass;
    if !reweighted.pass {
        report.notes.push(format!(
            "reweighting by <xi>^{shift} does not give a Mikhlin multiplier on this range"
        ));
    }
    report.class = Some(ClassGrading {
        m: spec.m,
        rho: spec.rho,
        max_order: spec.max_order,
        loss,
        reweighted_pass: reweighted.pass,
    });
    Ok(report)
}

/// `κ(1−ρ)|1/p − 1/2|`.
pub fn sobolev_loss(kappa: usize, rho: f64, p: f64) -> f64 {
    kappa as f64 * (1.0 - rho) * (1.0 / p - 0.5).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpRatioStats {
    pub p: f64,
    pub trials: usize,
    pub band: u32,
    pub seed: u64,
    pub max: f64,
    pub median: f64,
    pub min: f64,
}

/// `‖Op(σ)f‖_p / ‖f‖_p` over random functions with Fourier support in
/// band `≤ band`. A regression probe, not a bound.
pub fn empirical_lp_ratio(
    data: &SymbolData,
    p: f64,
    trials: usize,
    band: u32,
    seed: u64,
) -> Result<LpRatioStats> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::OutOfRange(format!("p = {p} must lie in (1, inf)")));
    }
    if trials == 0 {
        return Err(Error::EmptyRange);
    }
    if data.trusted_band() < band {
        return Err(Error::BandExceeded {
            label_band: band,
            grid_band: data.trusted_band(),
        });
    }
    let model = data.model();
    let sigma = data.to_matrix().restrict(band);
    // |f|^p is not band-limited; oversample
    let grid = cached_grid(&model, 2 * band + 2)?;
    let mut ratios = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            loop {
                let fh = MatrixSymbol::from_fn(&model, band, |l| {
                    let d = l.dimension();
                    CMatrix::from_fn(d, d, |_, _| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                });
                let f = fourier_inverse(&fh, &grid)?;
                let nf = f.lp_norm(p);
                if nf < 1e-12 {
                    continue;
                }
                let g = fourier_inverse(&symbol_product(&sigma, &fh)?, &grid)?;
                return Ok(g.lp_norm(p) / nf);
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    ratios.sort_by(f64::total_cmp);
    let n = ratios.len();
    let median = if n % 2 == 1 {
        ratios[n / 2]
    } else {
        0.5 * (ratios[n / 2 - 1] + ratios[n / 2])
    };
    Ok(LpRatioStats {
        p,
        trials,
        band,
        seed,
        max: ratios[n - 1],
        median,
        min: ratios[0],
    })
}

/// `⟨ξ⟩^s` as a scalar symbol.
pub fn bracket_power(model: &GroupModel, band: u32, s: f64) -> MatrixSymbol {
    MatrixSymbol::scalar_fn(model, band, |l| Complex64::new(bracket(l).powf(s), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_values() {
        assert_eq!(sobolev_loss(2, 1.0, 1.5), 0.0);
        assert!((sobolev_loss(2, 0.0, 1.5) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(sobolev_loss(2, 0.0, 2.0), 0.0);
    }

    #[test]
    fn class_spec_validation() {
        assert!(SymbolClassSpec::new(0.0, 1.5, 2).is_err());
        assert!(SymbolClassSpec::new(-1.0, 0.5, 2).is_ok());
    }

    #[test]
    fn grading_of_growing_and_saturating_profiles() {
        let tol = Tolerances::default();
        let a = Assess {
            tol: &tol,
            range: 64,
            zero: 1e-12,
        };
        let log: Vec<f64> = (0..=64).map(|b| (1.0 + b as f64).ln()).collect();
        assert!(!a.grade("x".into(), 0, 0.0, &log, true).pass);
        let sat: Vec<f64> = (0..=64).map(|b| 1.0 - 1.0 / (2.0 + b as f64)).collect();
        assert!(a.grade("x".into(), 0, 0.0, &sat, true).pass);
        let lin: Vec<f64> = (0..=64).map(|b| b as f64).collect();
        assert!(!a.grade("x".into(), 0, 0.0, &lin, true).pass);
        let zero = vec![0.0; 65];
        assert!(a.grade("x".into(), 0, 0.0, &zero, true).pass);
    }
}
