//! Generating series of iterated integrals along paths, computed by
//! integrating `dF = F sum_i A_i omega_i` with `F(start) = 1`.

mod engine;
mod oracle;
mod spectral;

pub use engine::MAX_PANELS;
pub(crate) use engine::{integrate, Drive, Integrated};
pub(crate) use oracle::adaptive_gk;
pub use oracle::{simplex_oracle, OracleValue};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::MeromorphicForm;
use crate::geometry::{Path, PathSegment};
use crate::ncseries::{NCSeries, Word, WordLayout};

/// Paths must stay at least this far from every pole.
pub const PATH_POLE_PROXIMITY: f64 = 1e-9;

/// Letter `A_{i+1}` is paired with `forms[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormAssignment {
    forms: Vec<MeromorphicForm>,
}

impl FormAssignment {
    pub fn new(forms: Vec<MeromorphicForm>) -> Result<Self> {
        if forms.is_empty() || forms.len() > u8::MAX as usize {
            return Err(Error::InvalidForm(format!(
                "need 1..=255 forms, got {}",
                forms.len()
            )));
        }
        let taus: Vec<_> = forms.iter().map(|f| f.lattice().map(|l| l.tau())).collect();
        if taus.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidForm(
                "forms live on different surfaces".into(),
            ));
        }
        Ok(FormAssignment { forms })
    }

    pub fn forms(&self) -> &[MeromorphicForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// Form attached to the 1-based letter `i`.
    pub fn letter(&self, i: u8) -> &MeromorphicForm {
        &self.forms[i as usize - 1]
    }

    /// All forms pulled back to the chart `z = c + 1/w`.
    pub fn at_infinity_chart(&self, c: Complex64) -> Result<FormAssignment> {
        Ok(FormAssignment {
            forms: self
                .forms
                .iter()
                .map(|f| f.at_infinity_chart(c))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub series: NCSeries,
    /// Error estimate for each word length `0..=N`.
    pub estimated_error: Vec<f64>,
    pub path: Path,
    pub panels: usize,
}

struct SegmentDrive<'a> {
    forms: &'a [MeromorphicForm],
    seg: &'a PathSegment,
}

impl Drive for SegmentDrive<'_> {
    fn eval(&self, t: f64, tc: f64, out: &mut [Complex64]) {
        let z = self.seg.point_split(t, tc);
        let dz = self.seg.derivative(t);
        for (slot, f) in out[1..=self.forms.len()].iter_mut().zip(self.forms) {
            *slot = f.coefficient(z) * dz;
        }
    }
}

fn segment_pole_distance(seg: &PathSegment, form: &MeromorphicForm) -> f64 {
    match form {
        MeromorphicForm::Elliptic(e) => {
            let l = e.lattice();
            let (lo, hi) = seg.bounding_box();
            let reach = 1.0 + l.tau().norm();
            let mut best = f64::INFINITY;
            for p in [e.a(), e.b()] {
                let (x0, y0) = l.coordinates(lo - p);
                let (x1, y1) = l.coordinates(hi - p);
                let (x2, y2) = l.coordinates(Complex64::new(lo.re, hi.im) - p);
                let (x3, y3) = l.coordinates(Complex64::new(hi.re, lo.im) - p);
                let span = reach / l.tau().im.min(1.0);
                let xs = [x0, x1, x2, x3];
                let ys = [y0, y1, y2, y3];
                let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min) - span;
                let xmax = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + span;
                let ymin = ys.iter().copied().fold(f64::INFINITY, f64::min) - span;
                let ymax = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) + span;
                for n in ymin.floor() as i64..=ymax.ceil() as i64 {
                    for m in xmin.floor() as i64..=xmax.ceil() as i64 {
                        let q = p + l.tau() * n as f64 + m as f64;
                        best = best.min(seg.distance_to(q));
                    }
                }
            }
            best
        }
        _ => form
            .finite_poles()
            .iter()
            .map(|&p| seg.distance_to(p))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Rejects paths that come within `PATH_POLE_PROXIMITY` of a pole.
pub fn check_path_avoids_poles(omega: &FormAssignment, path: &Path) -> Result<()> {
    for seg in path.segments() {
        for f in omega.forms() {
            let d = segment_pole_distance(seg, f);
            if d < PATH_POLE_PROXIMITY {
                return Err(Error::PoleProximity {
                    point: seg.start(),
                    distance: d,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn transport_dense(
    omega: &FormAssignment,
    path: &Path,
    layout: &WordLayout,
    tol: f64,
) -> Result<Integrated> {
    check_path_avoids_poles(omega, path)?;
    let segs = path.segments();
    if segs.is_empty() {
        return Ok(Integrated {
            value: layout.unit(),
            err_by_degree: vec![0.0; layout.depth + 1],
            panels: 0,
        });
    }
    let seg_tol = tol / segs.len() as f64;
    let parts = segs
        .par_iter()
        .map(|seg| {
            integrate(
                &SegmentDrive {
                    forms: omega.forms(),
                    seg,
                },
                layout,
                seg_tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut value = layout.unit();
    let mut err_by_degree = vec![0.0; layout.depth + 1];
    let mut panels = 0;
    for part in parts {
        value = layout.mul(&value, &part.value);
        for (e, pe) in err_by_degree.iter_mut().zip(&part.err_by_degree) {
            *e += pe;
        }
        panels += part.panels;
    }
    Ok(Integrated {
        value,
        err_by_degree,
        panels,
    })
}

/// Generating series `F_p` truncated at word length `degree`.
pub fn transport_series(
    omega: &FormAssignment,
    path: &Path,
    degree: usize,
    tol: f64,
) -> Result<TransportResult> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let layout = WordLayout::new(omega.len(), degree);
    let out = transport_dense(omega, path, &layout, tol)?;
    Ok(TransportResult {
        series: NCSeries::from_dense(&layout, &out.value),
        estimated_error: out.err_by_degree,
        path: path.clone(),
        panels: out.panels,
    })
}

/// `int_p omega_1 o ... o omega_k`.
pub fn iterated_integral(forms: &[MeromorphicForm], path: &Path, tol: f64) -> Result<Complex64> {
    if forms.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let omega = FormAssignment::new(forms.to_vec())?;
    let res = transport_series(&omega, path, forms.len(), tol)?;
    let word = Word::new((1..=forms.len() as u8).collect::<Vec<_>>());
    Ok(res.series.coeff(&word))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Poly;
    use crate::geometry::circle_loop;
    use crate::ncseries::grouplike_defect;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn factorial(k: usize) -> f64 {
        (1..=k).product::<usize>() as f64
    }

    #[test]
    fn circle_around_simple_pole() {
        let omega = FormAssignment::new(vec![MeromorphicForm::simple_pole(c(0.0, 0.0))]).unwrap();
        let res = transport_series(
            &omega,
            &circle_loop(c(0.0, 0.0), 0.3, 0.0).unwrap(),
            4,
            1e-12,
        )
        .unwrap();
        let two_pi_i = c(0.0, 2.0 * PI);
        for r in 0..=4 {
            let expected = two_pi_i.powu(r as u32) / factorial(r);
            let got = res.series.coeff(&Word::new(vec![1u8; r]));
            assert!(
                (got - expected).norm() < 1e-10,
                "r={r}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn powers_of_dz() {
        let omega = FormAssignment::new(vec![MeromorphicForm::dz()]).unwrap();
        let res =
            transport_series(&omega, &Path::line(c(0.0, 0.0), c(1.0, 0.0)), 5, 1e-12).unwrap();
        for k in 0..=5 {
            assert!(
                (res.series.coeff(&Word::new(vec![1u8; k])) - 1.0 / factorial(k)).norm() < 1e-13
            );
        }
    }

    #[test]
    fn constant_path_gives_unit() {
        let omega = FormAssignment::new(vec![MeromorphicForm::dz()]).unwrap();
        let res = transport_series(&omega, &Path::constant(c(1.0, 1.0)), 3, 1e-10).unwrap();
        assert_eq!(res.series, NCSeries::one(1, 3));
    }

    #[test]
    fn small_words() {
        let z_dz = MeromorphicForm::rational(Poly::from_real(&[0.0, 1.0]), Poly::one()).unwrap();
        let line = Path::line(c(0.0, 0.0), c(1.0, 0.0));
        let v = iterated_integral(&[z_dz, MeromorphicForm::dz()], &line, 1e-12).unwrap();
        assert!((v - 1.0 / 6.0).norm() < 1e-13);
        let v = iterated_integral(
            &[MeromorphicForm::dz(), MeromorphicForm::dz()],
            &line,
            1e-12,
        )
        .unwrap();
        assert!((v - 0.5).norm() < 1e-13);
        let circle = circle_loop(c(0.0, 0.0), 1.0, 0.0).unwrap();
        let v = iterated_integral(&[MeromorphicForm::simple_pole(c(0.0, 0.0))], &circle, 1e-12)
            .unwrap();
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn rejects_paths_through_poles() {
        let omega = FormAssignment::new(vec![MeromorphicForm::simple_pole(c(0.5, 0.0))]).unwrap();
        let err = transport_series(&omega, &Path::line(c(0.0, 0.0), c(1.0, 0.0)), 2, 1e-10);
        assert!(matches!(err, Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn grouplike_and_reversal() {
        let omega = FormAssignment::new(vec![
            MeromorphicForm::simple_pole(c(0.0, 0.0)),
            MeromorphicForm::simple_pole(c(1.0, 0.0)),
        ])
        .unwrap();
        let path = Path::polyline(&[c(0.5, 0.5), c(-0.5, 1.0), c(2.0, -0.3)]).unwrap();
        let f = transport_series(&omega, &path, 4, 1e-12).unwrap().series;
        assert!(grouplike_defect(&f) < 1e-11);
        let g = transport_series(&omega, &path.reversed(), 4, 1e-12)
            .unwrap()
            .series;
        assert!(g.max_abs_diff(&f.reverse_antipode()) < 1e-11);
        assert!(f.concat_mul(&g).unwrap().max_abs_diff(&NCSeries::one(2, 4)) < 1e-11);
    }
}
