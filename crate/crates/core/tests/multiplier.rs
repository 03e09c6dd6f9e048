use liemult_core::harmonic::*;
use liemult_core::linalg::{c, CMatrix};
use liemult_core::multiplier::*;
use liemult_core::symbol::*;
use liemult_core::Error;
use num_complex::Complex64;

fn su2_riesz(band: u32) -> MatrixSymbol {
    let model = GroupModel::su2();
    let inv = MatrixSymbol::scalar_fn(&model, band, |l| {
        let lam = casimir_lambda(l);
        c(if lam > 0.0 { 1.0 / lam } else { 0.0 }, 0.0)
    });
    symbol_product(
        &inv,
        &vector_field_exact(&model, &[0.0, 0.0, 1.0], band).unwrap(),
    )
    .unwrap()
}

fn torus3<F: Fn(&[i64]) -> Complex64 + Sync>(radius: u32, f: F) -> SymbolData {
    TorusArray::from_fn(3, radius, f).into()
}

fn euclid(k: &[i64]) -> f64 {
    k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt()
}

fn riesz_k(k: &[i64]) -> Complex64 {
    let n = euclid(k);
    c(if n == 0.0 { 0.0 } else { k[0] as f64 / n }, 0.0)
}

#[test]
fn identity_passes_with_vanishing_differences() {
    let model = GroupModel::su2();
    let id: SymbolData = MatrixSymbol::identity(&model, 20).into();
    let r = check_mikhlin(&id, 16, 2).unwrap();
    assert!(r.pass, "{r:#?}");
    assert!((r.order(0).unwrap().full - 1.0).abs() < 1e-12);
    for a in 1..=2 {
        assert!(r.order(a).unwrap().full < 1e-9);
    }
    let t: SymbolData = MatrixSymbol::identity(&GroupModel::torus(2).unwrap(), 12).into();
    let r = check_mikhlin(&t, 10, 2).unwrap();
    assert!(r.pass);
    assert!(r.order(1).unwrap().full == 0.0);
}

#[test]
fn su2_riesz_is_a_multiplier() {
    let s: SymbolData = su2_riesz(44).into();
    let r = check_mikhlin(&s, 40, 2).unwrap();
    assert!(r.pass, "{r:#?}");
    assert!(r.order(0).unwrap().full <= 1.0);
    let refined = check_refined(&s, 40).unwrap();
    assert!(refined.pass, "{refined:#?}");
    assert!(!refined.notes.is_empty());
}

#[test]
fn oscillating_torus_symbol_fails() {
    let s = torus3(66, |k| Complex64::from_polar(1.0, euclid(k)));
    let r = check_mikhlin(&s, 64, 2).unwrap();
    assert!(!r.pass);
    let c1 = r.order(1).unwrap();
    assert!(!c1.pass && c1.growth > 1.25, "{c1:#?}");
}

#[test]
fn torus_riesz_passes_every_variant() {
    let s = torus3(66, riesz_k);
    let m = check_mikhlin(&s, 64, 2).unwrap();
    assert!(m.pass, "{m:#?}");
    let r = check_refined(&s, 64).unwrap();
    assert!(r.pass, "{r:#?}");
    let t = check_torus3(&s, 64).unwrap();
    assert!(t.pass, "{t:#?}");
    assert!(t.constants.iter().all(|c| c.full.is_finite()));
}

#[test]
fn sign_symbol_fails_first_order() {
    let s = torus3(66, |k| c(k[0].signum() as f64, 0.0));
    let r = check_refined(&s, 64).unwrap();
    assert!(!r.pass);
    assert!(!r.order(1).unwrap().pass);
    let t = check_torus3(&s, 64).unwrap();
    assert!(!t.constant("forward").unwrap().pass);
    // |k||σ(k+e₁)−σ(k)| = q along k = (0, q, 0)
    assert!(t.constant("forward").unwrap().full >= 64.0);
}

#[test]
fn torus3_examples() {
    let one = torus3(33, |_| c(1.0, 0.0));
    let r = check_torus3(&one, 32).unwrap();
    assert!(r.pass);
    let v: Vec<f64> = r.constants.iter().map(|c| c.full).collect();
    assert_eq!(v, vec![1.0, 0.0, 0.0]);
    let log = torus3(65, |k| c((1.0 + euclid(k)).ln(), 0.0));
    let r = check_torus3(&log, 64).unwrap();
    assert!(!r.constant("bounded").unwrap().pass, "{r:#?}");
    assert!(!r.pass);
}

#[test]
fn torus3_agrees_with_refined_on_second_order() {
    let cases: Vec<SymbolData> = vec![
        torus3(66, riesz_k),
        torus3(66, |k| c(k[0].signum() as f64, 0.0)),
        torus3(66, |k| Complex64::from_polar(1.0, euclid(k))),
        torus3(66, |k| c(1.0 / (1.0 + euclid(k)), 0.0)),
    ];
    for s in &cases {
        let t = check_torus3(s, 64).unwrap();
        let r = check_refined(s, 64).unwrap();
        assert_eq!(
            t.constant("average").unwrap().pass,
            r.constant("A^1").unwrap().pass,
            "{t:#?} {r:#?}"
        );
    }
}

#[test]
fn mikhlin_pass_implies_refined_pass() {
    let cases: Vec<SymbolData> = vec![
        torus3(66, riesz_k),
        torus3(66, |k| c(1.0 / (1.0 + euclid(k)), 0.0)),
        torus3(66, |k| Complex64::from_polar(1.0, euclid(k))),
        su2_riesz(28).into(),
    ];
    for s in &cases {
        let range = if s.model().is_su2() { 24 } else { 64 };
        let m = check_mikhlin(s, range, s.model().kappa()).unwrap();
        let r = check_refined(s, range).unwrap();
        assert!(!m.pass || r.pass);
    }
}

#[test]
fn constants_scale_and_grow_with_range() {
    let s = torus3(34, riesz_k);
    let base = check_mikhlin(&s, 32, 2).unwrap();
    let z = c(-2.0, 1.5);
    let scaled = check_mikhlin(&s.scale(z), 32, 2).unwrap();
    assert_eq!(base.pass, scaled.pass);
    for (a, b) in base.constants.iter().zip(&scaled.constants) {
        assert!((b.full - z.norm() * a.full).abs() <= 1e-10 * b.full.max(1.0));
        assert_eq!(a.pass, b.pass);
    }
    let small = check_mikhlin(&s, 16, 2).unwrap();
    for (a, b) in small.constants.iter().zip(&base.constants) {
        assert!(a.full <= b.full);
    }
}

#[test]
fn range_and_model_errors() {
    let s = torus3(34, riesz_k);
    assert!(matches!(
        check_mikhlin(&s, 4, 2),
        Err(Error::RangeTooSmall { .. })
    ));
    assert!(matches!(
        check_mikhlin(&s, 33, 2),
        Err(Error::RangeNotExact { .. })
    ));
    let su: SymbolData = su2_riesz(12).into();
    assert!(matches!(
        check_torus3(&su, 10),
        Err(Error::ModelMismatch { .. })
    ));
}

#[test]
fn inverse_vector_field_is_order_zero_type_zero() {
    let model = GroupModel::su2();
    let cst = c(0.37, 0.0);
    let sx = vector_field_exact(&model, &[0.0, 0.0, 1.0], 28).unwrap();
    let inv = sx.map(|_, m| {
        let d = m.nrows();
        (m + CMatrix::identity(d, d) * cst).try_inverse().unwrap()
    });
    let spec = SymbolClassSpec::new(0.0, 0.0, 2).unwrap();
    let r = check_symbol_class(&inv.into(), &spec, 24).unwrap();
    assert!(r.pass, "{r:#?}");
    let grading = r.class.unwrap();
    assert!(grading.reweighted_pass);
    let l15 = grading.loss.iter().find(|(p, _)| *p == 1.5).unwrap().1;
    assert!((l15 - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn central_resolvent_is_classical() {
    let model = GroupModel::su2();
    let s = MatrixSymbol::scalar_fn(&model, 28, |l| {
        c(1.0 / (1.0 + casimir_lambda_sq(l)).sqrt(), 0.0)
    });
    let spec = SymbolClassSpec::new(-1.0, 1.0, 2).unwrap();
    let r = check_symbol_class(&s.into(), &spec, 24).unwrap();
    assert!(r.pass, "{r:#?}");
    assert!(r.class.unwrap().loss.iter().all(|(_, l)| *l == 0.0));
}

#[test]
fn lp_ratios() {
    let model = GroupModel::su2();
    let id: SymbolData = MatrixSymbol::identity(&model, 6).into();
    let st = empirical_lp_ratio(&id, 3.0, 6, 6, 1).unwrap();
    assert!((st.max - 1.0).abs() < 1e-10 && (st.min - 1.0).abs() < 1e-10);
    let unitary: SymbolData = MatrixSymbol::from_fn(&model, 6, |l| {
        let d = l.dimension();
        CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |i, _| {
            Complex64::from_polar(1.0, 0.7 * i as f64 + 0.3)
        }))
    })
    .into();
    let st = empirical_lp_ratio(&unitary, 2.0, 6, 6, 2).unwrap();
    assert!((st.max - 1.0).abs() < 1e-9 && (st.min - 1.0).abs() < 1e-9);
    let riesz: SymbolData = su2_riesz(8).into();
    let a = empirical_lp_ratio(&riesz, 4.0, 50, 8, 7).unwrap();
    let b = empirical_lp_ratio(&riesz, 4.0, 50, 8, 7).unwrap();
    assert_eq!(a, b);
    assert!(a.max.is_finite() && a.max < 3.0 && a.median > 0.0, "{a:?}");
    assert!(empirical_lp_ratio(&riesz, 1.0, 5, 8, 7).is_err());
}
