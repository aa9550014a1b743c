//! Regular parts of forms near a pole, evaluated in the local coordinate
//! `s = z - q` so that no precision is lost to rounding `q + s`.

use num_complex::Complex64;

use super::{MeromorphicForm, Poly, DEDUP_TOL};

#[derive(Clone, Debug)]
enum Kind {
    Regular,
    /// Regular part `k(s) / d(s)`.
    Rational {
        k: Poly,
        d: Poly,
    },
    /// Regular part `n'/n - d'/d` in `s`.
    Dlog {
        n: Poly,
        d: Poly,
    },
    /// `sign (zeta(s) - 1/s + quasi) + sign_other zeta(q + s - other)`.
    Elliptic {
        sign: f64,
        quasi: Complex64,
        other: Complex64,
    },
}

/// `coefficient(q + s) - Res_q / s` for one form.
#[derive(Clone, Debug)]
pub(crate) struct LocalPart<'a> {
    form: &'a MeromorphicForm,
    q: Complex64,
    kind: Kind,
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < DEDUP_TOL * 1f64.max(a.norm())
}

fn strip_low(p: &Poly, k: usize) -> Poly {
    Poly::new(p.coeffs().get(k..).unwrap_or(&[]).to_vec())
}

impl<'a> LocalPart<'a> {
    pub(crate) fn new(form: &'a MeromorphicForm, q: Complex64) -> Self {
        let kind = match form {
            MeromorphicForm::Rational(r) if r.poles().iter().any(|&(p, _)| near(p, q)) => {
                let n = r.num().taylor_shift(q);
                let d = strip_low(&r.den().taylor_shift(q), 1);
                let res = n.eval(Complex64::new(0.0, 0.0)) / d.eval(Complex64::new(0.0, 0.0));
                let k = strip_low(&n.add(&d.scale(-res)), 1);
                Kind::Rational { k, d }
            }
            MeromorphicForm::Dlog(f) => match f.divisor().iter().find(|&&(p, _)| near(p, q)) {
                Some(&(_, m)) => {
                    let (mut n, mut d) = (f.num().taylor_shift(q), f.den().taylor_shift(q));
                    if m > 0 {
                        n = strip_low(&n, m as usize);
                    } else {
                        d = strip_low(&d, (-m) as usize);
                    }
                    Kind::Dlog { n, d }
                }
                None => Kind::Regular,
            },
            MeromorphicForm::Elliptic(e) => {
                let l = e.lattice();
                let quasi = |w: Complex64| {
                    let (x, y) = l.coordinates(w);
                    l.eta1() * x.round() + l.eta2() * y.round()
                };
                if l.congruent(q, e.a(), DEDUP_TOL) {
                    Kind::Elliptic {
                        sign: 1.0,
                        quasi: quasi(q - e.a()),
                        other: e.b(),
                    }
                } else if l.congruent(q, e.b(), DEDUP_TOL) {
                    Kind::Elliptic {
                        sign: -1.0,
                        quasi: quasi(q - e.b()),
                        other: e.a(),
                    }
                } else {
                    Kind::Regular
                }
            }
            _ => Kind::Regular,
        };
        LocalPart { form, q, kind }
    }

    pub(crate) fn regular_part(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            Kind::Regular => self.form.coefficient(self.q + s),
            Kind::Rational { k, d } => k.eval(s) / d.eval(s),
            Kind::Dlog { n, d } => {
                n.derivative().eval(s) / n.eval(s) - d.derivative().eval(s) / d.eval(s)
            }
            Kind::Elliptic { sign, quasi, other } => {
                let MeromorphicForm::Elliptic(e) = self.form else {
                    unreachable!()
                };
                let l = e.lattice();
                let rest = l
                    .zeta(self.q + s - other)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                (l.zeta_minus_pole(s) + quasi - rest) * *sign
            }
        }
    }
}
