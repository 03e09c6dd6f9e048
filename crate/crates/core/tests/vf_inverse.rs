use liemult_core::harmonic::*;
use liemult_core::linalg::{c, op_norm, CMatrix};
use liemult_core::symbol::*;
use liemult_core::vf_inverse::*;
use liemult_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d3() -> VectorFieldSpec {
    VectorFieldSpec::new([0.0, 0.0, 1.0]).unwrap()
}

#[test]
fn exceptional_sets() {
    let set = exceptional_set(&d3(), 3.0);
    let want: Vec<Complex64> = (-6..=6).map(|k| c(0.0, k as f64 / 2.0)).collect();
    assert_eq!(set.len(), want.len());
    for (a, b) in set.iter().zip(&want) {
        assert!((a - b).norm() < 1e-12);
    }
    let double = exceptional_set(&VectorFieldSpec::new([0.0, 0.0, 2.0]).unwrap(), 6.0);
    assert_eq!(double.len(), set.len());
    for (a, b) in double.iter().zip(&set) {
        assert!((a - b * 2.0).norm() < 1e-12);
    }
    let tilted = exceptional_set(&VectorFieldSpec::new([0.6, 0.0, 0.8]).unwrap(), 3.0);
    assert_eq!(tilted.len(), set.len());
    assert!(!is_exceptional(&d3(), c(0.3, 0.0)));
    assert!(is_exceptional(&d3(), c(0.0, -1.5)));
}

#[test]
fn inverse_of_d3_plus_one() {
    let inv = invert_vf_symbol(&d3(), c(1.0, 0.0), 12).unwrap();
    for tj in 0..=12u32 {
        let m = inv.value(&IrrepLabel::Su2(tj));
        let mins = (0..=tj)
            .map(|k| (k as f64 - tj as f64 / 2.0).abs())
            .fold(f64::INFINITY, f64::min);
        assert!((op_norm(&m) - 1.0 / (mins * mins + 1.0).sqrt()).abs() < 1e-12);
        // m ascending: σ_{D₃} = diag(−im)
        for k in 0..=tj as usize {
            let mm = k as f64 - tj as f64 / 2.0;
            assert!((m[(k, k)] - c(1.0, 0.0) / c(1.0, -mm)).norm() < 1e-12);
        }
    }
    let err = invert_vf_symbol(&d3(), c(0.0, 0.5), 4).unwrap_err();
    assert!(
        matches!(err, Error::Exceptional { ref label, .. } if label.contains('1')),
        "{err}"
    );
}

#[test]
fn inverse_times_symbol_is_identity() {
    for x in [[0.0, 0.0, 1.0], [0.3, -0.4, 0.5], [1.0, 2.0, -0.5]] {
        let v = VectorFieldSpec::new(x).unwrap();
        let cc = c(0.37, 0.21);
        let inv = invert_vf_symbol(&v, cc, 10).unwrap();
        let sx = vector_field_exact(&GroupModel::su2(), &x, 10).unwrap();
        for (l, m) in inv.iter() {
            let d = l.dimension();
            let id = CMatrix::identity(d, d);
            assert!(((sx.value(l) + &id * cc) * m - id).norm() < 1e-10);
        }
    }
}

#[test]
fn inverse_undoes_x_plus_c() {
    let x = [0.3, -0.4, 0.5];
    let v = VectorFieldSpec::new(x).unwrap();
    let cc = c(0.8, -0.1);
    let model = GroupModel::su2();
    let grid = cached_grid(&model, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fh = MatrixSymbol::from_fn(&model, 4, |l| {
        let d = l.dimension();
        CMatrix::from_fn(d, d, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    })
    .complete();
    let f = fourier_inverse(&fh, &grid).unwrap();
    // (X + c)f by central differences along exp(tX)
    let h = 1e-5;
    let xf = GroupFunction::from_element_fn(grid.clone(), |g| {
        let p = evaluate_su2(&fh, &g.mul(&Su2Element::exp(x, h)));
        let q = evaluate_su2(&fh, &g.mul(&Su2Element::exp(x, -h)));
        (p - q) / (2.0 * h) + evaluate_su2(&fh, g) * cc
    })
    .unwrap();
    let inv = invert_vf_symbol(&v, cc, 8).unwrap();
    let back = quantize_apply(&inv, &xf).unwrap();
    assert!(back.max_abs_diff(&f) < 1e-7);
}

#[test]
fn recursion_for_d3() {
    for j in 0..2 {
        let r = recursion_residual(&d3(), c(1.0, 0.0), j, 12).unwrap();
        assert!(r.diagonal < 1e-9 && r.off_diagonal < 1e-9, "{r:?}");
        assert_eq!(r.exact_band, 11);
    }
    let r = recursion_residual(&d3(), c(100.0, 0.0), 0, 12).unwrap();
    assert!(r.max() < 1e-9);
    let inv = invert_vf_symbol(&d3(), c(100.0, 0.0), 12).unwrap();
    assert!((inv.sup_op_norm() - 0.01).abs() < 1e-4);
}

#[test]
fn recursion_for_tilted_field() {
    let v = VectorFieldSpec::new([0.6, -0.3, 0.2]).unwrap();
    let r = recursion_residual(&v, c(0.4, 0.7), 1, 10).unwrap();
    assert!(r.max() < 1e-9, "{r:?}");
}

#[test]
fn inverse_is_in_s00() {
    let rep = verify_s00(&d3(), c(1.0, 0.0), 40).unwrap();
    assert!(rep.pass, "{rep:#?}");
    let class = rep.class.unwrap();
    assert_eq!(class.loss.iter().find(|(p, _)| *p == 2.0).unwrap().1, 0.0);
    for (p, l) in class.loss {
        assert!((l - 2.0 * (1.0 / p - 0.5).abs()).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn membership_matches_invertibility(k in -8i32..=8, re in prop::sample::select(vec![0.0, 0.3])) {
        let cc = c(re, k as f64 / 2.0);
        let exc = is_exceptional(&d3(), cc);
        let inv = invert_vf_symbol(&d3(), cc, 20);
        prop_assert_eq!(exc, inv.is_err());
    }

    #[test]
    fn tau_table(x in prop::array::uniform3(-2.0f64..2.0)) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let v = VectorFieldSpec::new(x).unwrap();
        let t = v.tau_matrix();
        prop_assert!(t[(0, 1)].norm() < 1e-8 && t[(1, 0)].norm() < 1e-8);
        prop_assert!((t[(0, 0)] + t[(1, 1)]).norm() < 1e-8);
        prop_assert!(frame_diagonalises(&v, 6, 1e-8));
    }
}
