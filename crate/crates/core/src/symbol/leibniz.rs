//! Leibniz rules for difference operators acting on products of symbols.
//!
//! With `f̂(ξ) = ∫ f(g) ξ(g)* dg` the product `στ` has kernel `K_τ ∗ K_σ`, and
//! `η(hh')_ij − δ_ij` splits as `q_ij(h) + q_ij(h') + Σ_c q_ic(h) q_cj(h')`.
//! Hence `𝔻_ij(στ) = (𝔻_ij σ)τ + σ(𝔻_ij τ) + Σ_c (𝔻_cj σ)(𝔻_ic τ)`.

use std::collections::BTreeMap;

use super::difference::{
    apply_differences, generators, laplace_difference, DifferenceWord, Elementary,
};
use super::matrix::{symbol_product, MatrixSymbol};
use crate::error::Result;
use crate::linalg::{hs_norm, CMatrix};

/// Residuals of the word rule and of the `𝔸` rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeibnizResidual {
    pub word: f64,
    pub laplace: f64,
}

impl LeibnizResidual {
    pub fn max(&self) -> f64 {
        self.word.max(self.laplace)
    }
}

/// Expansion of `𝔻^α(στ)` as `Σ (𝔻^β σ)(𝔻^γ τ)`, one `(β, γ)` pair per term.
pub fn leibniz_terms(word: &DifferenceWord) -> Vec<(DifferenceWord, DifferenceWord)> {
    let mut terms = vec![(Vec::new(), Vec::new())];
    for e in word.factors() {
        let d = e.rep.dimension();
        let mut next = Vec::with_capacity(terms.len() * (2 + d));
        for (s, t) in &terms {
            let mut a: Vec<Elementary> = s.clone();
            a.push(e.clone());
            next.push((a, t.clone()));
            let mut b: Vec<Elementary> = t.clone();
            b.push(e.clone());
            next.push((s.clone(), b));
            for c in 0..d {
                let mut s2 = s.clone();
                s2.push(Elementary {
                    rep: e.rep.clone(),
                    row: c,
                    col: e.col,
                });
                let mut t2 = t.clone();
                t2.push(Elementary {
                    rep: e.rep.clone(),
                    row: e.row,
                    col: c,
                });
                next.push((s2, t2));
            }
        }
        terms = next;
    }
    terms
        .into_iter()
        .map(|(s, t)| (DifferenceWord::new(s), DifferenceWord::new(t)))
        .collect()
}

fn apply_all(
    words: &[DifferenceWord],
    sigma: &MatrixSymbol,
) -> Result<BTreeMap<DifferenceWord, MatrixSymbol>> {
    let mut uniq: Vec<DifferenceWord> = words.to_vec();
    uniq.sort();
    uniq.dedup();
    let (empty, nonempty): (Vec<_>, Vec<_>) = uniq.into_iter().partition(|w| w.order() == 0);
    let mut out: BTreeMap<DifferenceWord, MatrixSymbol> = BTreeMap::new();
    for w in empty {
        out.insert(w, sigma.clone());
    }
    // group by band so every batch shares a grid
    let mut by_band: BTreeMap<u32, Vec<DifferenceWord>> = BTreeMap::new();
    for w in nonempty {
        by_band.entry(w.band()).or_default().push(w);
    }
    for (_, ws) in by_band {
        for (w, r) in ws.iter().zip(apply_differences(&ws, sigma)?) {
            out.insert(w.clone(), r);
        }
    }
    Ok(out)
}

/// `max ‖𝔻^α(στ) − Σ (𝔻^β σ)(𝔻^γ τ)‖_HS` over labels where both sides are exact.
pub fn word_rule_residual(
    word: &DifferenceWord,
    sigma: &MatrixSymbol,
    tau: &MatrixSymbol,
) -> Result<f64> {
    let prod = symbol_product(sigma, tau)?;
    let lhs = apply_all(std::slice::from_ref(word), &prod)?
        .remove(word)
        .unwrap();
    let terms = leibniz_terms(word);
    let sw: Vec<DifferenceWord> = terms.iter().map(|t| t.0.clone()).collect();
    let tw: Vec<DifferenceWord> = terms.iter().map(|t| t.1.clone()).collect();
    let sd = apply_all(&sw, sigma)?;
    let td = apply_all(&tw, tau)?;
    let band = compare_band(&lhs, sigma, tau, word.band());
    let mut worst: f64 = 0.0;
    for l in sigma.model().labels_up_to(band) {
        let d = l.dimension();
        let mut rhs = CMatrix::zeros(d, d);
        for (b, g) in &terms {
            rhs += sd[b].value(&l) * td[g].value(&l);
        }
        worst = worst.max(hs_norm(&(lhs.value(&l) - rhs)));
    }
    Ok(worst)
}

/// `𝔸(στ) = (𝔸σ)τ + σ(𝔸τ) − Σ_{ξ∈Δ₀} Σ_ij (𝔻_ij σ)(𝔻_ji τ)`.
pub fn laplace_rule_residual(sigma: &MatrixSymbol, tau: &MatrixSymbol) -> Result<f64> {
    let model = sigma.model().clone();
    let prod = symbol_product(sigma, tau)?;
    let lhs = laplace_difference(&prod)?;
    let a_s = laplace_difference(sigma)?;
    let a_t = laplace_difference(tau)?;
    let gens = generators(&model);
    let words: Vec<DifferenceWord> = gens.iter().cloned().map(DifferenceWord::single).collect();
    let transposed: Vec<DifferenceWord> = gens
        .iter()
        .map(|e| {
            DifferenceWord::single(Elementary {
                rep: e.rep.clone(),
                row: e.col,
                col: e.row,
            })
        })
        .collect();
    let sd = apply_all(&words, sigma)?;
    let td = apply_all(&transposed, tau)?;
    let q_band = model.delta0().iter().map(|r| r.band()).max().unwrap();
    let band = compare_band(&lhs, sigma, tau, q_band);
    let mut worst: f64 = 0.0;
    for l in model.labels_up_to(band) {
        let mut rhs = a_s.value(&l) * tau.value(&l) + sigma.value(&l) * a_t.value(&l);
        for (w, wt) in words.iter().zip(&transposed) {
            rhs -= sd[w].value(&l) * td[wt].value(&l);
        }
        worst = worst.max(hs_norm(&(lhs.value(&l) - rhs)));
    }
    Ok(worst)
}

/// Word rule for `word` and the `𝔸` rule, on the same pair.
pub fn leibniz_residual(
    word: &DifferenceWord,
    sigma: &MatrixSymbol,
    tau: &MatrixSymbol,
) -> Result<LeibnizResidual> {
    Ok(LeibnizResidual {
        word: word_rule_residual(word, sigma, tau)?,
        laplace: laplace_rule_residual(sigma, tau)?,
    })
}

fn compare_band(lhs: &MatrixSymbol, sigma: &MatrixSymbol, tau: &MatrixSymbol, margin: u32) -> u32 {
    let trusted = sigma.trusted_band().min(tau.trusted_band());
    if trusted == u32::MAX {
        lhs.band()
    } else {
        trusted.saturating_sub(margin)
    }
}
