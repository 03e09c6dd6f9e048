//! SU(2) differences by Clebsch–Gordan recoupling instead of quadrature.
//!
//! `η_ij ξ^L_μν = Σ_J ⟨e i; L μ|J i+μ⟩⟨e j; L ν|J j+ν⟩ ξ^J_{i+μ, j+ν}`, so
//! `(𝔻_ij τ)_{J,ba} = d_J⁻¹ Σ_L d_L τ_{L, b−j, a−i} ⟨e i; L a−i|J a⟩⟨e j; L b−j|J b⟩ − δ_ij τ_{J,ba}`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::difference::{generators, Elementary};
use super::matrix::MatrixSymbol;
use crate::error::{Error, Result};
use crate::harmonic::{clebsch_gordan, IrrepLabel};
use crate::linalg::CMatrix;

fn m_of(tw: i64, idx: usize) -> i64 {
    2 * idx as i64 - tw
}

fn idx_of(tw: i64, tm: i64) -> Option<usize> {
    if tm.abs() > tw || (tw + tm) % 2 != 0 {
        None
    } else {
        Some(((tm + tw) / 2) as usize)
    }
}

fn check_su2(sigma: &MatrixSymbol) -> Result<()> {
    if sigma.model().is_su2() {
        Ok(())
    } else {
        Err(Error::Unsupported("recoupling needs the su2 model".into()))
    }
}

fn out_range(sigma: &MatrixSymbol, margin: u32) -> Result<(u32, Option<u32>)> {
    match sigma.exact_band() {
        None => Ok((sigma.band() + margin, None)),
        Some(b) if b >= margin => Ok((b - margin, Some(b - margin))),
        Some(b) => Err(Error::MarginExceeded { margin, exact: b }),
    }
}

/// `ξ₀𝔻_ij σ` on SU(2) by recoupling.
pub fn apply_elementary_recoupled(e: &Elementary, sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    check_su2(sigma)?;
    let te = e.rep.twice_spin().unwrap() as i64;
    let (ti, tj) = (m_of(te, e.row), m_of(te, e.col));
    let (out_band, exact) = out_range(sigma, te as u32)?;
    let labels: Vec<u32> = (0..=out_band).collect();
    let mats: Vec<(IrrepLabel, CMatrix)> = labels
        .par_iter()
        .map(|&tjj| {
            let tjj = tjj as i64;
            let d = tjj as usize + 1;
            let mut h = CMatrix::zeros(d, d);
            for tl in ((tjj - te).abs()..=tjj + te).step_by(2) {
                let Some(tau) = sigma.get(&IrrepLabel::Su2(tl as u32)) else {
                    continue;
                };
                let dl = (tl + 1) as f64;
                for a in 0..d {
                    let ta = m_of(tjj, a);
                    let Some(mu) = idx_of(tl, ta - ti) else {
                        continue;
                    };
                    let c1 = clebsch_gordan(te, ti, tl, ta - ti, tjj, ta);
                    if c1 == 0.0 {
                        continue;
                    }
                    for b in 0..d {
                        let tb = m_of(tjj, b);
                        let Some(nu) = idx_of(tl, tb - tj) else {
                            continue;
                        };
                        let c2 = clebsch_gordan(te, tj, tl, tb - tj, tjj, tb);
                        h[(b, a)] += tau[(nu, mu)] * (dl * c1 * c2);
                    }
                }
            }
            h /= Complex64::from(d as f64);
            if e.row == e.col {
                h -= sigma.value(&IrrepLabel::Su2(tjj as u32));
            }
            (IrrepLabel::Su2(tjj as u32), h)
        })
        .collect();
    let mut out = MatrixSymbol::zero(sigma.model());
    for (l, m) in mats {
        out.insert(l, m)?;
    }
    Ok(out.with_exact_band(exact))
}

/// `𝔸σ = −Σ_i 𝔻_ii σ` over the adjoint representation, by recoupling.
pub fn laplace_recoupled(sigma: &MatrixSymbol) -> Result<MatrixSymbol> {
    check_su2(sigma)?;
    let mut acc: Option<MatrixSymbol> = None;
    for e in generators(sigma.model())
        .into_iter()
        .filter(|e| e.row == e.col)
    {
        let d = apply_elementary_recoupled(&e, sigma)?;
        acc = Some(match acc {
            None => d,
            Some(a) => a.add(&d)?,
        });
    }
    Ok(acc.unwrap().scale(Complex64::from(-1.0)))
}

/// `(𝔸τ)_{J,a}` for a diagonal symbol `τ_{L,m}` given lazily; `𝔸` keeps
/// diagonal symbols diagonal since `ρ²` is central.
pub fn laplace_diagonal_entry<F>(tau: &F, tjj: u32, ta: i64) -> Complex64
where
    F: Fn(u32, i64) -> Complex64,
{
    let tjj = tjj as i64;
    let d = (tjj + 1) as f64;
    let mut acc = 3.0 * tau(tjj as u32, ta);
    for ti in [-2i64, 0, 2] {
        for tl in ((tjj - 2).abs()..=tjj + 2).step_by(2) {
            let tm = ta - ti;
            if tm.abs() > tl {
                continue;
            }
            let c = clebsch_gordan(2, ti, tl, tm, tjj, ta);
            if c != 0.0 {
                acc -= tau(tl as u32, tm) * ((tl + 1) as f64 * c * c / d);
            }
        }
    }
    acc
}
