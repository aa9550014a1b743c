use std::f64::consts::PI;

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn delta() -> QExpansion {
    delta_qexp(30).unwrap()
}

fn h(y: f64) -> Endpoint {
    Endpoint::Height(y)
}

fn path(a: Endpoint, b: Endpoint) -> VerticalPath {
    VerticalPath::new(a, b).unwrap()
}

#[test]
fn delta_integral_to_the_cusp() {
    let d = delta();
    let got =
        vertical_transport(&d, &path(h(1.0), Endpoint::Cusp), &Word::letter(1), 1e-14).unwrap();
    let expected: Complex64 = (1..=30)
        .map(|n| c(0.0, 1.0 / (2.0 * PI)) * d.coeff(n) / n as f64 * (-2.0 * PI * n as f64).exp())
        .sum();
    assert!((got - expected).norm() < 1e-15, "{got} {expected}");
}

#[test]
fn powers_of_dz() {
    let d = delta();
    let p = path(h(1.0), h(2.0));
    for k in 0..=4usize {
        let got = vertical_transport(&d, &p, &Word::new(vec![2u8; k]), 1e-13).unwrap();
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        assert!(
            (got - I.powu(k as u32) / fact).norm() < 1e-12,
            "k = {k}: {got}"
        );
    }
    let below = vertical_transport(&d, &path(h(0.25), h(0.75)), &Word::new([2, 2]), 1e-13).unwrap();
    assert!((below - c(-0.125, 0.0)).norm() < 1e-12, "{below}");
}

#[test]
fn inverted_chart_agrees_with_direct_summation() {
    let d = delta_qexp(60).unwrap();
    let letters = [d.clone(), QExpansion::dz()];
    let layout = WordLayout::new(2, 3);
    let direct = run(&letters, &layout, Chart::Upper, 1.0, 0.6, 1e-15)
        .unwrap()
        .value;
    let via = vertical_series(&letters, &path(h(1.0), h(0.6)), 3, 1e-15)
        .unwrap()
        .series;
    let direct = NCSeries::from_dense(&layout, &direct);
    assert!(
        via.max_abs_diff(&direct) < 1e-13,
        "{}",
        via.max_abs_diff(&direct)
    );
}

#[test]
fn composition_through_a_height() {
    let letters = [delta(), QExpansion::dz()];
    let whole = vertical_series(&letters, &path(Endpoint::Cusp, Endpoint::Zero), 3, 1e-13)
        .unwrap()
        .series;
    let a = vertical_series(&letters, &path(Endpoint::Cusp, h(0.4)), 3, 1e-13)
        .unwrap()
        .series;
    let b = vertical_series(&letters, &path(h(0.4), Endpoint::Zero), 3, 1e-13)
        .unwrap()
        .series;
    assert!(whole.max_abs_diff(&a.concat_mul(&b).unwrap()) < 1e-12);
}

#[test]
fn cusp_forms_need_no_regularization() {
    let letters = [delta(), delta().scaled(c(0.0, 2.0))];
    let j = jsymbol_reg(&letters, &path(h(1.1), Endpoint::Cusp), 3, 1e-13).unwrap();
    assert_eq!(j.dropped(), j.series);
    assert!(j.shuffle_defect() < 1e-13);
    let res = jsymbol_res(&letters, 3);
    assert_eq!(res, NCSeries::one(2, 3));
}

#[test]
fn eisenstein_constant_term_matches_height_ladder() {
    let e4 = eisenstein_qexp(4, 30).unwrap();
    let letters = [e4.clone(), delta(), QExpansion::dz()];
    let j = jsymbol_reg(&letters, &path(h(1.5), Endpoint::Cusp), 3, 1e-13).unwrap();
    let heights: Vec<f64> = (0..10).map(|k| 8.0 + k as f64).collect();
    let ladder = jsymbol_ladder(&letters, 1.5, 3, &heights, 1e-12).unwrap();
    assert!(
        j.series.max_abs_diff(&ladder) < 1e-8,
        "{}",
        j.series.max_abs_diff(&ladder)
    );
    // degree one: int (E4 - 1) dz to the cusp plus the constant term -i y0
    let dec: Complex64 = (1..=30)
        .map(|n| {
            c(0.0, 1.0 / (2.0 * PI)) * e4.coeff(n) / n as f64 * (-2.0 * PI * 1.5 * n as f64).exp()
        })
        .sum();
    assert!((j.series.at(&[1]) - (dec - I * 1.5)).norm() < 1e-12);
    assert!(j.shuffle_defect() < 1e-10);
    let d = j.dropped();
    assert_eq!(d.at(&[1]), ZERO);
    assert_eq!(d.at(&[2, 3]), ZERO);
    assert_eq!(d.at(&[3, 2]), j.series.at(&[3, 2]));
}

#[test]
fn residue_factor_is_exponential() {
    let e6 = eisenstein_qexp(6, 10).unwrap();
    let letters = [e6, QExpansion::dz().scaled(c(0.5, 0.0))];
    let r = jsymbol_res(&letters, 4);
    let a = r.at(&[1]);
    assert_eq!(a, c(1.0, 0.0));
    for k in 2..=4usize {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        assert!((r.at(&vec![1; k]) - a.powu(k as u32) / fact).norm() < 1e-15);
        assert!((r.at(&vec![2; k]) - c(0.5, 0.0).powu(k as u32) / fact).norm() < 1e-15);
    }
}

#[test]
fn eisenstein_at_zero_is_rejected() {
    let letters = [eisenstein_qexp(4, 20).unwrap()];
    let err = vertical_series(&letters, &path(h(1.0), Endpoint::Zero), 2, 1e-10).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    let err = jsymbol_reg(&letters, &path(h(1.0), h(2.0)), 2, 1e-10).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn short_cutoff_is_reported() {
    let short = delta_qexp(3).unwrap();
    let err = vertical_series(&[short], &path(h(1.0), h(2.0)), 1, 1e-12).unwrap_err();
    assert!(matches!(err, Error::QExpansion(_)), "{err:?}");
}

#[test]
fn functional_equation_self_check() {
    let d = delta();
    for s in [4.0, 6.0, 8.0] {
        let l = lvalue_oracle(&d, s, 1e-10).unwrap();
        assert!(l.self_check < 1e-10);
        assert!(l.value.norm() > 1e-6);
    }
    let l = lvalue_oracle(&d.scaled(c(2.0, 0.0)), 6.0, 1e-10).unwrap();
    assert!((l.value - 2.0 * lvalue_oracle(&d, 6.0, 1e-10).unwrap().value).norm() < 1e-16);
}

#[test]
fn two_routes_to_l_values() {
    let d = delta();
    for n in 1..=3usize {
        let it = lvalue_iterated(&d, n, 1e-13).unwrap();
        let lam = lvalue_oracle(&d, n as f64 + 1.0, 1e-10).unwrap().value;
        let expected = (-I).powu(n as u32 + 1) * lam * (n as f64 + 1.0);
        assert!(
            (it - expected).norm() < 1e-6 * expected.norm(),
            "n = {n}: {it} {expected}"
        );
    }
    let doubled = lvalue_iterated(&d.scaled(c(2.0, 0.0)), 2, 1e-13).unwrap();
    assert!((doubled - 2.0 * lvalue_iterated(&d, 2, 1e-13).unwrap()).norm() < 1e-12);
}

#[test]
fn double_l_value_against_nested_quadrature() {
    let d = delta();
    let it = lvalue_multiple(&d, &[1, 1], 1e-14).unwrap();
    let oracle = lvalue_multiple_oracle(&d, 1, 1, 1e-14).unwrap();
    assert!((it - oracle).norm() < 1e-6 * oracle.norm(), "{it} {oracle}");
}
