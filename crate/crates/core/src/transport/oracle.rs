//! Reference values of iterated integrals by nested adaptive Gauss-Kronrod
//! quadrature over the ordered simplex.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::MeromorphicForm;
use crate::geometry::Path;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub const ORACLE_MAX_LENGTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub error: f64,
}

/// Integrand sampled in the global parameter `s in [0, segments]`.
struct Pullback<'a> {
    path: &'a Path,
}

impl Pullback<'_> {
    fn eval(&self, form: &MeromorphicForm, s: f64) -> Complex64 {
        let segs = self.path.segments();
        let k = (s.floor() as usize).min(segs.len() - 1);
        let t = s - k as f64;
        form.coefficient(segs[k].point(t)) * segs[k].derivative(t)
    }
}

fn gk15(f: &dyn Fn(f64) -> (Complex64, f64), a: f64, b: f64) -> (Complex64, f64, f64) {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let (fc, ec) = f(m);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut inner_err = ec * WGK[7];
    for j in 0..7 {
        let (f1, e1) = f(m - h * XGK[j]);
        let (f2, e2) = f(m + h * XGK[j]);
        kron += (f1 + f2) * WGK[j];
        inner_err += (e1 + e2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm(), inner_err * h.abs())
}

fn adaptive(
    f: &dyn Fn(f64) -> (Complex64, f64),
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> (Complex64, f64) {
    let (v, e, inner) = gk15(f, a, b);
    if e <= tol || depth >= 40 {
        return (v, e + inner);
    }
    let m = 0.5 * (a + b);
    let (v1, e1) = adaptive(f, a, m, 0.5 * tol, depth + 1);
    let (v2, e2) = adaptive(f, m, b, 0.5 * tol, depth + 1);
    (v1 + v2, e1 + e2)
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]`; `f` returns a
/// value and an error bound for that value.
pub(crate) fn adaptive_gk(
    f: &dyn Fn(f64) -> (Complex64, f64),
    a: f64,
    b: f64,
    tol: f64,
) -> (Complex64, f64) {
    adaptive(f, a, b, tol, 0)
}

/// Integral over `[0, s]` split at segment breakpoints.
fn integrate_to(f: &dyn Fn(f64) -> (Complex64, f64), s: f64, tol: f64) -> (Complex64, f64) {
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let pieces = s.ceil().max(1.0) as usize;
    for k in 0..pieces {
        let a = k as f64;
        let b = (k as f64 + 1.0).min(s);
        if b > a {
            let (v, e) = adaptive(f, a, b, tol / pieces as f64, 0);
            total += v;
            err += e;
        }
    }
    (total, err)
}

/// `int_p omega_1 o ... o omega_k` as the nested integral
/// `int_{0 <= t_1 <= ... <= t_k <= 1} prod g_j(t_j) dt_j`, at most four forms.
pub fn simplex_oracle(forms: &[MeromorphicForm], path: &Path) -> Result<OracleValue> {
    if forms.len() > ORACLE_MAX_LENGTH {
        return Err(Error::Precondition(format!(
            "simplex oracle supports at most {ORACLE_MAX_LENGTH} forms, got {}",
            forms.len()
        )));
    }
    if forms.is_empty() || path.segments().is_empty() {
        let v = if forms.is_empty() { 1.0 } else { 0.0 };
        return Ok(OracleValue {
            value: Complex64::new(v, 0.0),
            error: 0.0,
        });
    }
    for f in forms {
        for seg in path.segments() {
            let d = f
                .finite_poles()
                .iter()
                .map(|&p| seg.distance_to(p))
                .fold(f64::INFINITY, f64::min);
            if d < 1e-9 {
                return Err(Error::PoleProximity {
                    point: seg.start(),
                    distance: d,
                });
            }
        }
    }
    let pb = Pullback { path };
    let total = path.segments().len() as f64;
    let tols = [1e-13, 1e-12, 1e-11, 1e-10];
    let (value, error) = nested(&pb, forms, total, tols[forms.len() - 1], forms.len());
    Ok(OracleValue { value, error })
}

/// `J_k(s) = int_0^s g_k(t) J_{k-1}(t) dt` with `J_0 = 1`.
fn nested(
    pb: &Pullback,
    forms: &[MeromorphicForm],
    s: f64,
    tol: f64,
    k: usize,
) -> (Complex64, f64) {
    let form = &forms[k - 1];
    if k == 1 {
        return integrate_to(&|t| (pb.eval(form, t), 0.0), s, tol);
    }
    let inner_tol = tol * 0.1;
    integrate_to(
        &|t| {
            let (j, e) = nested(pb, forms, t, inner_tol, k - 1);
            let g = pb.eval(form, t);
            (g * j, g.norm() * e)
        },
        s,
        tol,
    )
}
