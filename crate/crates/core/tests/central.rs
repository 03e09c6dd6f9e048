use std::f64::consts::PI;

use liemult_core::central::*;
use liemult_core::harmonic::*;
use liemult_core::linalg::{c, op_norm};
use liemult_core::multiplier::check_mikhlin;
use liemult_core::symbol::*;
use liemult_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn wp(w: i64) -> WeightLatticePoint {
    WeightLatticePoint::new(w)
}

fn angles() -> impl Iterator<Item = f64> {
    (0..=40).map(|i| 4.0 * PI * i as f64 / 40.0 + 1e-3)
}

#[test]
fn character_is_trace_of_wigner_matrix() {
    for tj in 0..=10u32 {
        for t in angles() {
            let g = Su2Element::exp([0.3, -0.2, 0.9], t);
            let tr = wigner_of(tj, &g).trace();
            assert!((weyl_character(wp(tj as i64), g.class_angle()) - tr).norm() < 1e-9);
        }
    }
}

#[test]
fn reflection_flips_dimension_and_character_only() {
    let s = function_of_laplacian(|x| c(1.0 / (1.0 + x), 0.0), 10);
    for w in 0..=8i64 {
        let p = wp(w);
        let r = p.reflect();
        assert_eq!(weyl_dimension(r), -weyl_dimension(p));
        for t in angles() {
            assert!((weyl_character(r, t) + weyl_character(p, t)).norm() < 1e-9);
        }
        assert_eq!(s.value(r.twice_weight), s.value(w));
    }
}

#[test]
fn orbit_identities() {
    for w in 0..=10i64 {
        for t in angles() {
            let (a, b) = orbit_sums(wp(w), t);
            assert!((a - b).norm() < 1e-9, "{w} {t}");
            for star in 0..=10i64 {
                let (l, r) = orbit_product_sums(wp(w), wp(star), t);
                assert!((l - r).norm() < 1e-9, "{w} {star} {t}");
            }
        }
    }
}

#[test]
fn character_orthogonality_with_signs() {
    let grid = cached_grid(&GroupModel::su2(), 24).unwrap();
    for a in 0..=10i64 {
        for b in 0..=10i64 {
            let v = character_pairing(wp(a), wp(b), &grid).unwrap();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-9);
        }
    }
    // ξ* = ω·ξ: (ξ*+ρ) = −(ξ+ρ)
    let v = character_pairing(wp(4).reflect(), wp(4), &grid).unwrap();
    assert!((v + 1.0).norm() < 1e-9);
    assert!(character_pairing(wp(-1), wp(3), &grid).unwrap().norm() < 1e-9);
}

#[test]
fn delta2_examples() {
    let one = CentralSequence::from_fn(Parity::Even, 20, |_| c(2.5, -1.0));
    let d = delta2(&one).unwrap();
    assert!(d.values().iter().all(|v| v.norm() < 1e-12));
    let inv_d = CentralSequence::from_fn(Parity::Even, 20, |w| c(1.0 / (w + 1) as f64, 0.0));
    let d = delta2(&inv_d).unwrap();
    assert!(d.values()[2..].iter().all(|v| v.norm() < 1e-12));
    let a = laplace_difference(&inv_d.as_symbol()).unwrap();
    let from_symbol = CentralSequence::from_symbol(&a, 18).unwrap();
    assert!(from_symbol.max_abs_diff(&d, 18) < 1e-9);
}

#[test]
fn delta2_on_indicators_matches_quadrature() {
    for star in [0u32, 1, 2, 5] {
        let s = CentralSequence::from_fn(Parity::Even, 12, |w| {
            c(if w == star { 1.0 / (w + 1) as f64 } else { 0.0 }, 0.0)
        });
        let lat = delta2(&s).unwrap();
        let quad = central_multiplication(&s, 2, |t| 2.0 - 2.0 * t.cos()).unwrap();
        assert!(lat.max_abs_diff(&quad, 10) < 1e-10, "{star}");
        let lap =
            CentralSequence::from_symbol(&laplace_difference(&s.as_symbol()).unwrap(), 10).unwrap();
        assert!(lat.max_abs_diff(&lap, 10) < 1e-9);
    }
}

#[test]
fn weiss_delta() {
    let d = CentralSequence::dimensions(42);
    let out = nweiss_delta(&d).unwrap();
    assert!(out.values().iter().take(41).all(|v| v.norm() < 1e-10));
    let quad = central_multiplication(&CentralSequence::dimensions(20), 1, weiss_gamma).unwrap();
    assert!(quad.values().iter().all(|v| v.norm() < 1e-10));
    let one = CentralSequence::from_fn(Parity::Even, 20, |_| c(1.0, 0.0));
    assert!(nweiss_delta(&one)
        .unwrap()
        .values()
        .iter()
        .all(|v| v.norm() < 1e-12));
    let sq = CentralSequence::from_fn(Parity::Even, 20, |w| c((w as f64 / 2.0).powi(2), 0.0));
    let lat = nweiss_delta(&sq).unwrap();
    let quad = central_multiplication(&sq, 1, weiss_gamma).unwrap();
    assert!(lat.max_abs_diff(&quad, 19) < 1e-9);
    assert!(lat.values().iter().any(|v| v.norm() > 0.1));
}

#[test]
fn missing_neighbours() {
    let s = CentralSequence::from_fn(Parity::Even, 1, |_| c(1.0, 0.0));
    assert!(matches!(delta2(&s), Err(Error::MarginExceeded { .. })));
    assert!(nweiss_delta(&s).is_ok());
}

#[test]
fn hypoellipticity() {
    let r40 = hypoellipticity_ratio(1, 40).unwrap();
    let r80 = hypoellipticity_ratio(1, 80).unwrap();
    assert!(r40.max_ratio.is_finite() && r40.max_ratio <= r80.max_ratio);
    assert!(r80.max_ratio / r40.max_ratio < 1.05);
    assert!(r80.max_ratio <= 1.0 + 1e-12);
    assert_eq!(hypoellipticity_ratio(2, 40).unwrap().max_ratio, 0.0);
    // (2l+1)/max(1, sqrt(l(l+1))) peaks at l = 1
    let oracle = (0..=80)
        .map(|t| {
            let l = t as f64 / 2.0;
            (2.0 * l + 1.0) / (l * (l + 1.0)).sqrt().max(1.0)
        })
        .fold(0.0, f64::max);
    assert!((r80.polynomial_bound - oracle).abs() < 1e-12);
    assert!((oracle - 3.0 / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn riesz() {
    let model = GroupModel::su2();
    let r = riesz_symbol(&model, &[0.0, 0.0, 1.0], 44).unwrap();
    assert!(r.value(&IrrepLabel::Su2(0)).norm() == 0.0);
    let m = r.value(&IrrepLabel::Su2(2));
    let l = 1.0f64;
    for (i, mm) in [1.0f64, 0.0, -1.0].iter().enumerate() {
        assert!((m[(i, i)].norm() - mm.abs() / (l * (l + 1.0)).sqrt()).abs() < 1e-12);
    }
    assert!((op_norm(&m) - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    assert!(r.sup_op_norm() <= 1.0 + 1e-10);
    let rep = check_mikhlin(&r.clone().into(), 40, 2).unwrap();
    assert!(rep.pass);
    let tilted = riesz_symbol(&model, &[0.6, 0.0, 0.8], 20).unwrap();
    assert!(tilted.sup_op_norm() <= 1.0 + 1e-10);
    assert!(matches!(
        riesz_symbol(&model, &[0.0, 0.0, 2.0], 10),
        Err(Error::NotNormalised { .. })
    ));
    let t = riesz_symbol(&GroupModel::torus(2).unwrap(), &[1.0, 0.0], 5).unwrap();
    let v = t.value(&IrrepLabel::Torus(vec![3, 4]))[(0, 0)];
    assert!((v - c(0.0, 0.6)).norm() < 1e-12);
}

#[test]
fn functions_of_the_laplacian() {
    let one = function_of_laplacian(|_| c(1.0, 0.0), 10);
    assert!(one.values().iter().all(|v| *v == c(1.0, 0.0)));
    let res = function_of_laplacian(|x| c(1.0 / (1.0 + x), 0.0), 10);
    for w in 0..=10u32 {
        let l = w as f64 / 2.0;
        assert!((res.values()[w as usize].re - 1.0 / (1.0 + l * (l + 1.0))).abs() < 1e-14);
    }
    let imag = function_of_laplacian(
        |x| {
            if x == 0.0 {
                c(0.0, 0.0)
            } else {
                Complex64::new(0.0, x.ln()).exp()
            }
        },
        44,
    );
    let rep = check_mikhlin(&imag.as_symbol().into(), 40, 2).unwrap();
    assert!(rep.pass, "{rep:#?}");
}

#[test]
fn triples_roundtrip() {
    let s = function_of_laplacian(|x| c(x, -x), 6);
    let back = CentralSequence::from_triples(Parity::Even, &s.triples()).unwrap();
    assert_eq!(back, s);
    assert!(CentralSequence::from_triples(Parity::Even, &[(0, 1.0, 0.0), (2, 1.0, 0.0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bridge_identity(vals in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 13)) {
        let s = CentralSequence::new(Parity::Even, vals.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
        let lat = delta2(&s).unwrap();
        let a = laplace_difference(&s.as_symbol()).unwrap();
        prop_assert_eq!(a.exact_band(), Some(10));
        let lap = CentralSequence::from_symbol(&a, 10).unwrap();
        prop_assert!(lat.max_abs_diff(&lap, 10) < 1e-9);
        for (l, m) in a.iter() {
            let d = l.dimension();
            let want = lat.values()[l.twice_spin().unwrap() as usize];
            prop_assert!((m - liemult_core::linalg::CMatrix::identity(d, d) * want).norm() < 1e-9);
        }
    }
}
