use std::path::PathBuf;

use num_complex::Complex64;

use chen_reciprocity::modular::{
    delta_qexp, eisenstein_qexp, jsymbol_reg, jsymbol_res, vertical_series, Endpoint, QExpansion,
    VerticalPath,
};
use chen_reciprocity::ncseries::NCSeries;

#[test]
fn shipped_qexpansion_is_the_discriminant() {
    let p: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "..",
        "docs",
        "examples",
        "delta.qexp",
    ]
    .iter()
    .collect();
    assert_eq!(QExpansion::load(&p).unwrap(), delta_qexp(30).unwrap());
}

#[test]
fn modular_symbol_from_two_cusp_paths() {
    // J(i inf -> 0) = J(i inf -> i y) J(i y -> 0) for every height
    let letters = [delta_qexp(30).unwrap(), QExpansion::dz()];
    let path = |a, b| VerticalPath::new(a, b).unwrap();
    let whole = vertical_series(&letters, &path(Endpoint::Cusp, Endpoint::Zero), 3, 1e-13)
        .unwrap()
        .series;
    for y in [0.3, 1.0, 2.5] {
        let a = jsymbol_reg(
            &letters,
            &path(Endpoint::Cusp, Endpoint::Height(y)),
            3,
            1e-13,
        )
        .unwrap();
        let b = vertical_series(
            &letters,
            &path(Endpoint::Height(y), Endpoint::Zero),
            3,
            1e-13,
        )
        .unwrap()
        .series;
        assert!(
            whole.max_abs_diff(&a.series.concat_mul(&b).unwrap()) < 1e-11,
            "y = {y}"
        );
        assert!(a.shuffle_defect() < 1e-11);
    }
}

#[test]
fn eisenstein_symbols_are_grouplike_and_invert() {
    let letters = [
        eisenstein_qexp(4, 30).unwrap(),
        eisenstein_qexp(6, 30).unwrap(),
        QExpansion::dz(),
    ];
    let up = jsymbol_reg(
        &letters,
        &VerticalPath::new(Endpoint::Height(1.3), Endpoint::Cusp).unwrap(),
        3,
        1e-13,
    )
    .unwrap();
    let down = jsymbol_reg(
        &letters,
        &VerticalPath::new(Endpoint::Cusp, Endpoint::Height(1.3)).unwrap(),
        3,
        1e-13,
    )
    .unwrap();
    assert!(up.shuffle_defect() < 1e-9);
    assert!(
        up.series
            .concat_mul(&down.series)
            .unwrap()
            .max_abs_diff(&NCSeries::one(3, 3))
            < 1e-9
    );
    let res = jsymbol_res(&letters, 3);
    assert_eq!(res.at(&[2]), Complex64::new(1.0, 0.0));
}
