//! Meromorphic 1-forms of the third kind: rational forms and dlog forms on
//! the Riemann sphere, and elliptic forms on a torus.

mod elliptic;
mod local;
mod poly;

pub use elliptic::{zeta_oracle, EllipticForm, Lattice};
pub(crate) use local::LocalPart;
pub use poly::{Poly, Root};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Evaluations closer than this to a pole are rejected.
pub const POLE_PROXIMITY: f64 = 1e-9;

const DEDUP_TOL: f64 = 1e-9;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A point of the Riemann sphere, or of the torus when the forms are elliptic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolePoint {
    Finite(Complex64),
    Infinity,
}

impl std::fmt::Display for PolePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolePoint::Finite(z) => write!(f, "{z}"),
            PolePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// `(num/den)(z) dz` with simple finite poles.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    num: Poly,
    den: Poly,
    poles: Vec<(Complex64, Complex64)>,
}

impl RationalForm {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidForm("denominator is identically zero".into()));
        }
        let dden = den.derivative();
        let mut poles = Vec::new();
        if !num.is_zero() {
            for root in den.roots() {
                if num.eval(root.value).norm() <= 1e-10 * num_scale(&num, root.value) {
                    return Err(Error::InvalidForm(format!(
                        "numerator and denominator share the root {}",
                        root.value
                    )));
                }
                if root.multiplicity > 1 {
                    return Err(Error::HigherOrderPole(format!(
                        "pole of order {} at {}",
                        root.multiplicity, root.value
                    )));
                }
                poles.push((root.value, num.eval(root.value) / dden.eval(root.value)));
            }
        }
        Ok(RationalForm { num, den, poles })
    }

    /// `dz / (z - p)`.
    pub fn simple_pole(p: Complex64) -> Self {
        RationalForm::new(Poly::one(), Poly::linear(p)).expect("simple pole form")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Finite poles paired with their residues.
    pub fn poles(&self) -> &[(Complex64, Complex64)] {
        &self.poles
    }

    pub fn coefficient(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn singular_at_infinity(&self) -> bool {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => false,
            (Some(n), Some(d)) => n + 2 > d,
            _ => unreachable!(),
        }
    }

    pub fn residue_at_infinity(&self) -> Result<Complex64> {
        let (Some(n), Some(d)) = (self.num.degree(), self.den.degree()) else {
            return Ok(zero());
        };
        if n + 2 <= d {
            Ok(zero())
        } else if n + 1 == d {
            Ok(-self.num.lead() / self.den.lead())
        } else {
            Err(Error::HigherOrderPole(format!(
                "pole of order {} at infinity",
                n + 2 - d
            )))
        }
    }

    fn residue_at(&self, p: Complex64) -> Complex64 {
        self.poles
            .iter()
            .find(|(q, _)| (q - p).norm() < DEDUP_TOL * 1f64.max(q.norm()))
            .map(|&(_, r)| r)
            .unwrap_or_else(zero)
    }

    /// The same form in the chart `z = c + 1/w`.
    pub fn at_infinity_chart(&self, c: Complex64) -> Result<RationalForm> {
        let (Some(dn), Some(dd)) = (self.num.degree(), self.den.degree()) else {
            return Ok(self.clone());
        };
        let rn = self.num.taylor_shift(c).reversed();
        let rd = self.den.taylor_shift(c).reversed();
        let e = dd as i64 - dn as i64 - 2;
        let minus = Complex64::new(-1.0, 0.0);
        match e {
            e if e >= 0 => RationalForm::new(rn.scale(minus).shift_up(e as usize), rd),
            -1 => RationalForm::new(rn.scale(minus), rd.shift_up(1)),
            _ => Err(Error::HigherOrderPole(format!(
                "pole of order {} at infinity",
                -e
            ))),
        }
    }
}

fn num_scale(p: &Poly, z: Complex64) -> f64 {
    let r = 1f64.max(z.norm());
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * r.powi(k as i32))
        .fold(0.0, f64::max)
}

/// `df/f` for a reduced rational function `f = num/den`.
#[derive(Clone, Debug, PartialEq)]
pub struct DlogForm {
    num: Poly,
    den: Poly,
    divisor: Vec<(Complex64, i64)>,
}

impl DlogForm {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::InvalidForm("dlog of the zero function".into()));
        }
        let mut divisor: Vec<(Complex64, i64)> = num
            .roots()
            .into_iter()
            .map(|r| (r.value, r.multiplicity as i64))
            .collect();
        for r in den.roots() {
            if divisor
                .iter()
                .any(|(z, _)| (z - r.value).norm() < 1e-7 * 1f64.max(z.norm()))
            {
                return Err(Error::InvalidForm(format!(
                    "f is not reduced: common root {}",
                    r.value
                )));
            }
            divisor.push((r.value, -(r.multiplicity as i64)));
        }
        Ok(DlogForm { num, den, divisor })
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Finite zeros (positive order) and poles (negative order) of `f`.
    pub fn divisor(&self) -> &[(Complex64, i64)] {
        &self.divisor
    }

    /// Order of `f` at infinity.
    pub fn order_at_infinity(&self) -> i64 {
        self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64
    }

    pub fn function(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Value of `f` at infinity when it is finite and nonzero.
    pub fn function_at_infinity(&self) -> Option<Complex64> {
        (self.order_at_infinity() == 0).then(|| self.num.lead() / self.den.lead())
    }

    pub fn coefficient(&self, z: Complex64) -> Complex64 {
        self.num.derivative().eval(z) / self.num.eval(z)
            - self.den.derivative().eval(z) / self.den.eval(z)
    }

    fn residue_at(&self, p: Complex64) -> Complex64 {
        self.divisor
            .iter()
            .find(|(q, _)| (q - p).norm() < DEDUP_TOL * 1f64.max(q.norm()))
            .map(|&(_, m)| Complex64::new(m as f64, 0.0))
            .unwrap_or_else(zero)
    }

    pub fn at_infinity_chart(&self, c: Complex64) -> Result<DlogForm> {
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let rn = self.num.taylor_shift(c).reversed();
        let rd = self.den.taylor_shift(c).reversed();
        if dd >= dn {
            DlogForm::new(rn.shift_up(dd - dn), rd)
        } else {
            DlogForm::new(rn, rd.shift_up(dn - dd))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeromorphicForm {
    Rational(RationalForm),
    Dlog(DlogForm),
    Elliptic(EllipticForm),
}

impl MeromorphicForm {
    pub fn rational(num: Poly, den: Poly) -> Result<Self> {
        RationalForm::new(num, den).map(MeromorphicForm::Rational)
    }

    pub fn dlog(num: Poly, den: Poly) -> Result<Self> {
        DlogForm::new(num, den).map(MeromorphicForm::Dlog)
    }

    pub fn elliptic(lattice: Lattice, a: Complex64, b: Complex64) -> Result<Self> {
        EllipticForm::new(lattice, a, b).map(MeromorphicForm::Elliptic)
    }

    /// `dz`.
    pub fn dz() -> Self {
        MeromorphicForm::Rational(RationalForm::new(Poly::one(), Poly::one()).expect("dz"))
    }

    /// `dz / (z - p)`.
    pub fn simple_pole(p: Complex64) -> Self {
        MeromorphicForm::Rational(RationalForm::simple_pole(p))
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        match self {
            MeromorphicForm::Elliptic(e) => Some(e.lattice()),
            _ => None,
        }
    }

    /// Finite poles; for elliptic forms the representatives in the
    /// fundamental parallelogram.
    pub fn finite_poles(&self) -> Vec<Complex64> {
        match self {
            MeromorphicForm::Rational(r) => r.poles().iter().map(|p| p.0).collect(),
            MeromorphicForm::Dlog(d) => d.divisor().iter().map(|p| p.0).collect(),
            MeromorphicForm::Elliptic(e) => vec![e.a(), e.b()],
        }
    }

    pub fn singular_at_infinity(&self) -> bool {
        match self {
            MeromorphicForm::Rational(r) => r.singular_at_infinity(),
            MeromorphicForm::Dlog(d) => d.order_at_infinity() != 0,
            MeromorphicForm::Elliptic(_) => false,
        }
    }

    /// Distance from `z` to the nearest finite pole (modulo the lattice for
    /// elliptic forms).
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        match self {
            MeromorphicForm::Elliptic(e) => {
                let l = e.lattice();
                l.distance_mod(z, e.a()).min(l.distance_mod(z, e.b()))
            }
            _ => self
                .finite_poles()
                .iter()
                .map(|p| (z - p).norm())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Coefficient `g(z)` of `g(z) dz`, rejecting points near a pole.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let d = self.pole_distance(z);
        if d < POLE_PROXIMITY {
            return Err(Error::PoleProximity {
                point: z,
                distance: d,
            });
        }
        Ok(self.coefficient(z))
    }

    /// Coefficient without the proximity check; NaN on a lattice point.
    pub fn coefficient(&self, z: Complex64) -> Complex64 {
        match self {
            MeromorphicForm::Rational(r) => r.coefficient(z),
            MeromorphicForm::Dlog(d) => d.coefficient(z),
            MeromorphicForm::Elliptic(e) => e
                .coefficient(z)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        }
    }

    /// Residue at a point; zero at regular points.
    pub fn residue_at(&self, p: PolePoint) -> Result<Complex64> {
        match (self, p) {
            (MeromorphicForm::Rational(r), PolePoint::Finite(z)) => Ok(r.residue_at(z)),
            (MeromorphicForm::Rational(r), PolePoint::Infinity) => r.residue_at_infinity(),
            (MeromorphicForm::Dlog(d), PolePoint::Finite(z)) => Ok(d.residue_at(z)),
            (MeromorphicForm::Dlog(d), PolePoint::Infinity) => {
                Ok(Complex64::new(d.order_at_infinity() as f64, 0.0))
            }
            (MeromorphicForm::Elliptic(e), PolePoint::Finite(z)) => Ok(e.residue_at(z)),
            (MeromorphicForm::Elliptic(_), PolePoint::Infinity) => Err(Error::InvalidForm(
                "a torus has no point at infinity".into(),
            )),
        }
    }

    /// The form pulled back to the chart `z = c + 1/w` around infinity.
    pub fn at_infinity_chart(&self, c: Complex64) -> Result<MeromorphicForm> {
        match self {
            MeromorphicForm::Rational(r) => r.at_infinity_chart(c).map(MeromorphicForm::Rational),
            MeromorphicForm::Dlog(d) => d.at_infinity_chart(c).map(MeromorphicForm::Dlog),
            MeromorphicForm::Elliptic(_) => Err(Error::InvalidForm(
                "elliptic forms have no chart at infinity".into(),
            )),
        }
    }
}

/// A pole shared by a form set together with each form's residue there.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleEntry {
    pub point: PolePoint,
    pub residues: Vec<Complex64>,
}

impl PoleEntry {
    /// Indices of the forms with a nonzero residue at this point.
    pub fn active_forms(&self) -> Vec<usize> {
        self.residues
            .iter()
            .enumerate()
            .filter(|(_, r)| r.norm() > 1e-12)
            .map(|(i, _)| i)
            .collect()
    }
}

/// De-duplicated poles of a form set. On the sphere infinity is listed last
/// when any form is singular there; elliptic poles are reduced modulo the
/// lattice.
pub fn pole_set(forms: &[MeromorphicForm]) -> Result<Vec<PoleEntry>> {
    let lattice = forms.iter().find_map(MeromorphicForm::lattice).copied();
    if let Some(l) = lattice {
        if forms
            .iter()
            .any(|f| f.lattice().map(|m| m.tau() != l.tau()).unwrap_or(true))
        {
            return Err(Error::InvalidForm(
                "elliptic and sphere forms cannot be mixed".into(),
            ));
        }
    }
    let same = |a: Complex64, b: Complex64| match lattice {
        Some(l) => l.congruent(a, b, DEDUP_TOL),
        None => (a - b).norm() < DEDUP_TOL * 1f64.max(a.norm()),
    };
    let mut points: Vec<Complex64> = Vec::new();
    for f in forms {
        for p in f.finite_poles() {
            if !points.iter().any(|&q| same(p, q)) {
                points.push(p);
            }
        }
    }
    let mut entries = Vec::with_capacity(points.len() + 1);
    for p in points {
        let residues = forms
            .iter()
            .map(|f| f.residue_at(PolePoint::Finite(p)))
            .collect::<Result<Vec<_>>>()?;
        entries.push(PoleEntry {
            point: PolePoint::Finite(p),
            residues,
        });
    }
    if lattice.is_none() && forms.iter().any(MeromorphicForm::singular_at_infinity) {
        let residues = forms
            .iter()
            .map(|f| f.residue_at(PolePoint::Infinity))
            .collect::<Result<Vec<_>>>()?;
        entries.push(PoleEntry {
            point: PolePoint::Infinity,
            residues,
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dz_over_z() -> MeromorphicForm {
        MeromorphicForm::simple_pole(c(0.0, 0.0))
    }

    #[test]
    fn evaluation() {
        assert_eq!(dz_over_z().eval(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        let f = MeromorphicForm::dlog(Poly::from_real(&[-1.0, 1.0]), Poly::one()).unwrap();
        assert!((f.eval(c(3.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        assert!(dz_over_z().eval(c(1e-10, 0.0)).is_err());
    }

    #[test]
    fn residues() {
        let f = dz_over_z();
        assert_eq!(
            f.residue_at(PolePoint::Finite(c(0.0, 0.0))).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(f.residue_at(PolePoint::Infinity).unwrap(), c(-1.0, 0.0));
        let g = MeromorphicForm::rational(
            Poly::from_real(&[0.0, 2.0]),
            Poly::from_real(&[-1.0, 0.0, 1.0]),
        )
        .unwrap();
        assert!((g.residue_at(PolePoint::Finite(c(1.0, 0.0))).unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(
            g.residue_at(PolePoint::Finite(c(5.0, 0.0))).unwrap(),
            c(0.0, 0.0)
        );
        let dz = MeromorphicForm::dz();
        assert!(dz.residue_at(PolePoint::Infinity).is_err());
        assert_eq!(
            dz.residue_at(PolePoint::Finite(c(0.0, 0.0))).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            MeromorphicForm::rational(Poly::one(), Poly::from_real(&[0.0, 0.0, 1.0])),
            Err(Error::HigherOrderPole(_))
        ));
        assert!(MeromorphicForm::rational(Poly::one(), Poly::from_real(&[0.0])).is_err());
        assert!(
            MeromorphicForm::dlog(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[0.0, 1.0]))
                .is_err()
        );
        assert!(MeromorphicForm::dlog(Poly::from_real(&[0.0]), Poly::one()).is_err());
    }

    #[test]
    fn pole_sets() {
        let set = pole_set(&[dz_over_z()]).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set[0].point, PolePoint::Finite(c(0.0, 0.0)));
        assert_eq!(
            set[1],
            PoleEntry {
                point: PolePoint::Infinity,
                residues: vec![c(-1.0, 0.0)]
            }
        );
        let set = pole_set(&[dz_over_z(), MeromorphicForm::simple_pole(c(1.0, 0.0))]).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set[1].residues, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(set[2].residues, vec![c(-1.0, 0.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn dlog_divisor_and_infinity() {
        let f = DlogForm::new(
            Poly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0)]),
            Poly::linear(c(-2.0, 0.0)),
        )
        .unwrap();
        let mut orders: Vec<i64> = f.divisor().iter().map(|d| d.1).collect();
        orders.sort();
        assert_eq!(orders, vec![-1, 2]);
        assert_eq!(f.order_at_infinity(), -1);
        let total: i64 = orders.iter().sum::<i64>() + f.order_at_infinity();
        assert_eq!(total, 0);
    }

    #[test]
    fn chart_at_infinity_pulls_back() {
        let forms = [
            dz_over_z(),
            MeromorphicForm::rational(
                Poly::from_real(&[1.0, 2.0]),
                Poly::from_roots(&[c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 3.0)]),
            )
            .unwrap(),
            MeromorphicForm::dlog(
                Poly::from_roots(&[c(1.0, 0.0), c(2.0, 0.0)]),
                Poly::linear(c(0.0, 1.0)),
            )
            .unwrap(),
        ];
        let base = c(0.3, -0.2);
        for f in &forms {
            let g = f.at_infinity_chart(base).unwrap();
            for w in [c(0.3, 0.1), c(-0.2, 0.25)] {
                let z = base + 1.0 / w;
                let expected = f.coefficient(z) * (-1.0 / (w * w));
                assert!((g.coefficient(w) - expected).norm() < 1e-12 * (1.0 + expected.norm()));
            }
            let r_inf = f.residue_at(PolePoint::Infinity).unwrap();
            let r_0 = g.residue_at(PolePoint::Finite(c(0.0, 0.0))).unwrap();
            assert!((r_inf - r_0).norm() < 1e-10);
        }
    }

    #[test]
    fn residue_sum_vanishes() {
        let f = MeromorphicForm::rational(
            Poly::from_real(&[1.0, -1.0, 0.5]),
            Poly::from_roots(&[c(1.0, 0.0), c(-1.0, 2.0), c(0.5, -0.5)]),
        )
        .unwrap();
        let total: Complex64 = pole_set(&[f]).unwrap().iter().map(|e| e.residues[0]).sum();
        assert!(total.norm() < 1e-12);
    }
}
