use super::*;
use crate::forms::{Lattice, Poly};
use crate::ncseries::Word;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `dz/(z - p) - dz/(z - q)`.
fn two_pole(p: Complex64, q: Complex64) -> MeromorphicForm {
    MeromorphicForm::rational(Poly::constant(p - q), Poly::from_roots(&[p, q])).unwrap()
}

fn sphere_pair() -> SurfaceScene {
    let omega = FormAssignment::new(vec![
        two_pole(c(0.0, 0.0), c(1.0, 0.0)),
        two_pole(c(0.0, 2.0), c(0.0, 3.0)),
    ])
    .unwrap();
    SurfaceScene::new(omega, c(-1.0, 0.5))
}

fn torus_pair() -> SurfaceScene {
    let l = Lattice::new(c(0.0, 1.0)).unwrap();
    let omega = FormAssignment::new(vec![
        MeromorphicForm::elliptic(l, c(0.5, 0.1), c(0.8, 0.25)).unwrap(),
        MeromorphicForm::elliptic(l, c(0.2, 0.6), c(0.35, 0.8)).unwrap(),
    ])
    .unwrap();
    SurfaceScene::new(omega, c(0.0, 0.0))
}

#[test]
fn commutator_of_linear_series() {
    let fa = NCSeries::one_plus_letter(2, 2, 1, c(2.0, 0.0)).unwrap();
    let fb = NCSeries::one_plus_letter(2, 2, 2, c(0.0, 3.0)).unwrap();
    let k = commutator_series(&fa, &fb).unwrap();
    let ab = c(0.0, 6.0);
    let expected = NCSeries::from_coeffs(
        2,
        2,
        [
            (Word::empty(), c(1.0, 0.0)),
            (Word::new([1, 2]), ab),
            (Word::new([2, 1]), -ab),
        ],
    )
    .unwrap();
    assert!(k.max_abs_diff(&expected) < 1e-14);
    let one = NCSeries::one(2, 2);
    assert_eq!(commutator_series(&fa, &one).unwrap(), one);
}

#[test]
fn commutator_matches_direct_product_and_has_no_linear_terms() {
    let scene = torus_pair();
    let lay = layout(&scene).unwrap();
    let (alpha, beta) = lay.cycles.unwrap();
    let fa = transport_series(&scene.omega, &alpha, 3, 1e-12)
        .unwrap()
        .series;
    let fb = transport_series(&scene.omega, &beta, 3, 1e-12)
        .unwrap()
        .series;
    let k = commutator_series(&fa, &fb).unwrap();
    let direct = fa
        .concat_mul(&fb)
        .unwrap()
        .concat_mul(&fa.inverse().unwrap())
        .unwrap()
        .concat_mul(&fb.inverse().unwrap())
        .unwrap();
    assert!(k.max_abs_diff(&direct) < 1e-10);
    for i in 1..=2 {
        assert_eq!(k.at(&[i]), c(0.0, 0.0));
    }
}

#[test]
fn sphere_layout_orders_loops_and_puts_infinity_last() {
    let lay = layout(&sphere_pair()).unwrap();
    assert_eq!(lay.loops.len(), 5);
    assert_eq!(lay.loops[4].point, PolePoint::Infinity);
    assert!(lay.loops.windows(2).all(|w| w[0].angle < w[1].angle));
    assert!(lay.cycles.is_none());
}

#[test]
fn torus_layout_translates_poles() {
    let l = Lattice::new(c(0.1, 1.2)).unwrap();
    let omega = FormAssignment::new(vec![MeromorphicForm::elliptic(
        l,
        c(-0.3, 0.4),
        c(0.45, -0.5),
    )
    .unwrap()])
    .unwrap();
    let scene = SurfaceScene::new(omega, c(0.02, 0.03));
    let lay = layout(&scene).unwrap();
    assert_eq!(lay.loops.len(), 2);
    for pl in &lay.loops {
        let PolePoint::Finite(z) = pl.point else {
            panic!()
        };
        let (x, y) = l.coordinates(z - scene.base);
        assert!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0);
    }
}

#[test]
fn residue_sums_vanish() {
    let r = residue_linear_check(&sphere_pair(), 1e-12).unwrap();
    assert!(r.passed, "{r:?}");
    let omega = FormAssignment::new(vec![MeromorphicForm::simple_pole(c(0.3, 0.0))]).unwrap();
    let r = residue_linear_check(&SurfaceScene::new(omega, c(0.0, 1.0)), 1e-12).unwrap();
    assert!(r.passed);
}

#[test]
fn global_law_on_the_sphere() {
    let r = global_reciprocity(&sphere_pair(), 3, 1e-8).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.per_degree.len(), 4);
}

#[test]
fn global_law_with_a_pole_at_infinity() {
    let omega = FormAssignment::new(vec![
        MeromorphicForm::simple_pole(c(0.0, 0.0)),
        MeromorphicForm::simple_pole(c(1.0, 1.0)),
    ])
    .unwrap();
    let r = global_reciprocity(&SurfaceScene::new(omega, c(0.5, -0.7)), 3, 1e-8).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn global_law_on_the_torus() {
    let r = global_reciprocity(&torus_pair(), 2, 1e-7).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn bilinear_law_on_the_sphere() {
    let r = riemann_bilinear_check(&sphere_pair(), (0, 1), 1e-9).unwrap();
    assert!(r.passed, "{r:?}");
    // the individual terms are far from zero
    assert!(r.residuals.iter().any(|x| x.value > 0.1));
}

#[test]
fn bilinear_law_on_the_torus() {
    let r = riemann_bilinear_check(&torus_pair(), (0, 1), 1e-7).unwrap();
    assert!(r.passed, "{r:?}");
    let swapped = riemann_bilinear_check(&torus_pair(), (1, 0), 1e-7).unwrap();
    assert!(swapped.passed, "{swapped:?}");
}

#[test]
fn triple_law_on_the_sphere() {
    let omega = FormAssignment::new(vec![
        two_pole(c(1.0, 0.0), c(2.0, 0.3)),
        two_pole(c(0.5, 1.5), c(-0.5, 2.0)),
        two_pole(c(-1.5, 0.2), c(-2.0, -0.8)),
    ])
    .unwrap();
    let r = triple_check(&SurfaceScene::new(omega, c(0.0, 0.0)), (0, 1, 2), 1e-9).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn triple_law_on_the_torus() {
    let l = Lattice::new(c(0.0, 1.0)).unwrap();
    let omega = FormAssignment::new(vec![
        MeromorphicForm::elliptic(l, c(0.5, 0.08), c(0.85, 0.12)).unwrap(),
        MeromorphicForm::elliptic(l, c(0.55, 0.5), c(0.75, 0.65)).unwrap(),
        MeromorphicForm::elliptic(l, c(0.15, 0.7), c(0.25, 0.9)).unwrap(),
    ])
    .unwrap();
    let r = triple_check(&SurfaceScene::new(omega, c(0.0, 0.0)), (0, 1, 2), 1e-6).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn interleaved_poles_are_rejected() {
    let omega = FormAssignment::new(vec![
        two_pole(c(1.0, 0.0), c(-1.0, 0.0)),
        two_pole(c(0.0, 1.0), c(0.0, -1.0)),
    ])
    .unwrap();
    let err =
        riemann_bilinear_check(&SurfaceScene::new(omega, c(0.1, 0.2)), (0, 1), 1e-9).unwrap_err();
    assert!(matches!(err, Error::Layout(_)), "{err:?}");
}

#[test]
fn shared_pole_is_rejected() {
    let omega = FormAssignment::new(vec![
        two_pole(c(1.0, 0.0), c(2.0, 0.0)),
        two_pole(c(1.0, 0.0), c(0.0, 3.0)),
    ])
    .unwrap();
    let err =
        riemann_bilinear_check(&SurfaceScene::new(omega, c(0.0, -1.0)), (0, 1), 1e-9).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err:?}");
}

#[test]
fn weil_worked_example() {
    let f = DlogForm::new(Poly::linear(c(0.0, 0.0)), Poly::one()).unwrap();
    let g = DlogForm::new(Poly::linear(c(1.0, 0.0)), Poly::linear(c(-1.0, 0.0))).unwrap();
    let w = weil_check(&f, &g, 1e-10).unwrap();
    assert!(w.defect < 1e-12, "{w:?}");
    let x = w.cross_check.expect("a grouped base point exists");
    assert!((x - w.product).norm() < 1e-8, "{w:?}");
}

#[test]
fn weil_rejects_common_divisor_points() {
    let f = DlogForm::new(Poly::linear(c(0.0, 0.0)), Poly::one()).unwrap();
    let g = DlogForm::new(Poly::linear(c(0.0, 0.0)), Poly::linear(c(-1.0, 0.0))).unwrap();
    assert!(matches!(
        weil_check(&f, &g, 1e-10),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn tame_symbols_are_grouplike() {
    let r = shuffle_check(&sphere_pair(), 3, 1e-9).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.residuals.len(), 5);
    let r = shuffle_check(&torus_pair(), 2, 1e-8).unwrap();
    assert!(r.passed, "{r:?}");
}
