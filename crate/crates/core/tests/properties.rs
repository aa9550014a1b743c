use num_complex::Complex64;
use proptest::prelude::*;

use chen_reciprocity::forms::MeromorphicForm;
use chen_reciprocity::geometry::Path;
use chen_reciprocity::modular::QExpansion;
use chen_reciprocity::ncseries::{all_words, grouplike_defect, NCSeries, Word};
use chen_reciprocity::transport::{transport_series, FormAssignment};

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// A series over two letters, truncated at degree 3, with constant term 1.
fn unit_series() -> impl Strategy<Value = NCSeries> {
    let n = all_words(2, 3).len() - 1;
    prop::collection::vec(complex(), n).prop_map(|cs| {
        let words = all_words(2, 3).into_iter().filter(|w| !w.is_empty());
        let mut coeffs: Vec<(Word, Complex64)> = words.zip(cs).collect();
        coeffs.push((Word::empty(), Complex64::new(1.0, 0.0)));
        NCSeries::from_coeffs(2, 3, coeffs).unwrap()
    })
}

fn scene_forms() -> FormAssignment {
    FormAssignment::new(vec![
        MeromorphicForm::simple_pole(Complex64::new(0.0, 2.0)),
        MeromorphicForm::dz(),
        MeromorphicForm::simple_pole(Complex64::new(-1.5, -1.0)),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_is_two_sided(a in unit_series()) {
        let one = NCSeries::one(2, 3);
        let inv = a.inverse().unwrap();
        prop_assert!(a.concat_mul(&inv).unwrap().max_abs_diff(&one) < 1e-10);
        prop_assert!(inv.concat_mul(&a).unwrap().max_abs_diff(&one) < 1e-10);
    }

    #[test]
    fn product_is_associative(a in unit_series(), b in unit_series(), c in unit_series()) {
        let left = a.concat_mul(&b).unwrap().concat_mul(&c).unwrap();
        let right = a.concat_mul(&b.concat_mul(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-10);
    }

    #[test]
    fn transport_splits_at_any_point(
        start in (-1.0..1.0f64, -0.5..0.5f64),
        end in (-1.0..1.0f64, -0.5..0.5f64),
        t in 0.05..0.95f64,
    ) {
        let (a, b) = (Complex64::new(start.0, start.1), Complex64::new(end.0, end.1));
        prop_assume!((a - b).norm() > 1e-3);
        let m = a + (b - a) * t;
        let omega = scene_forms();
        let whole = transport_series(&omega, &Path::line(a, b), 3, 1e-13).unwrap().series;
        let first = transport_series(&omega, &Path::line(a, m), 3, 1e-13).unwrap().series;
        let second = transport_series(&omega, &Path::line(m, b), 3, 1e-13).unwrap().series;
        prop_assert!(whole.max_abs_diff(&first.concat_mul(&second).unwrap()) < 1e-11);
        prop_assert!(grouplike_defect(&whole) < 1e-11);
        prop_assert!(whole.reverse_antipode().max_abs_diff(&whole.inverse().unwrap()) < 1e-11);
    }

    #[test]
    fn qexpansion_text_round_trip(
        weight in (1u32..8).prop_map(|k| 2 * k),
        coeffs in prop::collection::vec(complex(), 1..20),
    ) {
        let f = QExpansion::new(weight, coeffs).unwrap();
        prop_assert_eq!(QExpansion::parse(&f.to_text()).unwrap(), f);
    }
}
