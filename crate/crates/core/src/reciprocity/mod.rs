//! Reciprocity laws for iterated integrals: the generating-series law over
//! all tame symbols, its degree-two and degree-three coefficient forms, and
//! Weil reciprocity.

mod layout;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{DlogForm, MeromorphicForm, PolePoint};
use crate::geometry::Path;
use crate::ncseries::{grouplike_defect, NCSeries};
use crate::regularization::{regularized_transport, tame_symbol};
use crate::transport::{transport_series, FormAssignment};

pub use layout::{
    chart_forms, cut_choices, layout, layout_with_cut, Chart, Layout, PoleLoop, SurfaceScene,
};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// `F - 1`.
pub fn plus_part(f: &NCSeries) -> NCSeries {
    f.plus_part()
}

/// Series of the commutator loop `alpha beta alpha^-1 beta^-1`, expanded
/// in plus parts so that every term has degree at least two.
pub fn commutator_series(fa: &NCSeries, fb: &NCSeries) -> Result<NCSeries> {
    let a = fa.plus_part();
    let b = fb.plus_part();
    let ai = fa.inverse()?.plus_part();
    let bi = fb.inverse()?.plus_part();
    let one = NCSeries::one(fa.alphabet_size(), fa.truncation());
    let ab = a.concat_mul(&b)?;
    let b_ai = b.concat_mul(&ai)?;
    let ab_ai = ab.concat_mul(&ai)?;
    let terms = [
        b_ai.clone(),
        a.concat_mul(&bi)?.scale(Complex64::new(-1.0, 0.0)),
        ab_ai.clone(),
        b_ai.concat_mul(&bi)?,
        ab_ai.concat_mul(&bi)?,
    ];
    terms.iter().try_fold(one, |acc, t| acc.add(t))
}

/// A labelled scalar residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub label: String,
    pub value: f64,
}

/// Outcome of one reciprocity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub check: String,
    pub tolerance: f64,
    pub max_defect: f64,
    /// Largest defect among words of each length, for series-valued checks.
    pub per_degree: Vec<f64>,
    pub residuals: Vec<Residual>,
    /// The computed sum or product for scalar checks, as `[re, im]`.
    pub value: Option<[f64; 2]>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl DefectReport {
    pub fn new(check: &str, tolerance: f64, max_defect: f64) -> Self {
        DefectReport {
            check: check.to_string(),
            tolerance,
            max_defect,
            per_degree: Vec::new(),
            residuals: Vec::new(),
            value: None,
            passed: max_defect.is_finite() && max_defect <= tolerance,
            notes: Vec::new(),
        }
    }

    pub fn with_value(mut self, z: Complex64) -> Self {
        self.value = Some([z.re, z.im]);
        self
    }

    fn with_terms(mut self, terms: &[(String, Complex64)]) -> Self {
        self.residuals = terms
            .iter()
            .map(|(l, z)| Residual {
                label: l.clone(),
                value: z.norm(),
            })
            .collect();
        self
    }
}

fn transport_tol(tol: f64, pieces: usize) -> f64 {
    (1e-2 * tol / pieces.max(1) as f64).max(1e-13)
}

fn point_label(p: &PolePoint) -> String {
    match p {
        PolePoint::Finite(z) => format!("({:.6}{:+.6}i)", z.re, z.im),
        PolePoint::Infinity => "inf".into(),
    }
}

/// Product of the assembled tame symbols in layout order, times the
/// commutator factor on a torus. It equals 1 in every degree.
pub fn global_product(scene: &SurfaceScene, degree: usize, tol: f64) -> Result<(NCSeries, Layout)> {
    let lay = layout(scene)?;
    let pieces = lay.loops.len() + 2;
    let ttol = transport_tol(tol, pieces);
    let symbols = lay
        .loops
        .par_iter()
        .map(|pl| {
            let omega = chart_forms(&scene.omega, pl.chart)?;
            Ok(tame_symbol(&omega, &pl.keyhole, degree, ttol)?.series)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = scene.omega.len();
    let mut product = NCSeries::one(n, degree);
    for s in &symbols {
        product = product.concat_mul(s)?;
    }
    if let Some((alpha, beta)) = &lay.cycles {
        let (fa, fb) = rayon::join(
            || transport_series(&scene.omega, alpha, degree, ttol),
            || transport_series(&scene.omega, beta, degree, ttol),
        );
        product = product.concat_mul(&commutator_series(&fa?.series, &fb?.series)?)?;
    }
    Ok((product, lay))
}

/// Per-word defect of the generating-series reciprocity law.
pub fn global_reciprocity(scene: &SurfaceScene, degree: usize, tol: f64) -> Result<DefectReport> {
    let (product, lay) = global_product(scene, degree, tol)?;
    let one = NCSeries::one(scene.omega.len(), degree);
    let per_degree = product.per_degree_abs_diff(&one);
    let max = per_degree.iter().copied().fold(0.0, f64::max);
    let mut report = DefectReport::new("global", tol, max);
    report.per_degree = per_degree;
    report.residuals = crate::ncseries::all_words(scene.omega.len(), degree)
        .into_iter()
        .filter(|w| !w.is_empty())
        .map(|w| Residual {
            label: w.to_string(),
            value: (product.coeff(&w) - one.coeff(&w)).norm(),
        })
        .collect();
    report.notes.push(format!("{} pole loops", lay.loops.len()));
    Ok(report)
}

/// Shuffle defect of every tame symbol in the layout and of the cycle
/// transports on a torus.
pub fn shuffle_check(scene: &SurfaceScene, degree: usize, tol: f64) -> Result<DefectReport> {
    let lay = layout(scene)?;
    let ttol = transport_tol(tol, lay.loops.len() + 2);
    let mut residuals = lay
        .loops
        .par_iter()
        .map(|pl| {
            let omega = chart_forms(&scene.omega, pl.chart)?;
            let s = tame_symbol(&omega, &pl.keyhole, degree, ttol)?.series;
            Ok(Residual {
                label: point_label(&pl.point),
                value: grouplike_defect(&s),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some((alpha, beta)) = &lay.cycles {
        for (label, p) in [("alpha", alpha), ("beta", beta)] {
            let s = transport_series(&scene.omega, p, degree, ttol)?.series;
            residuals.push(Residual {
                label: label.into(),
                value: grouplike_defect(&s),
            });
        }
    }
    let max = residuals.iter().map(|r| r.value).fold(0.0, f64::max);
    let mut report = DefectReport::new("shuffle", tol, max);
    report.residuals = residuals;
    Ok(report)
}

/// Sum of all residues of each form, infinity included on the sphere.
pub fn residue_linear_check(scene: &SurfaceScene, tol: f64) -> Result<DefectReport> {
    let entries = crate::forms::pole_set(scene.omega.forms())?;
    let sums: Vec<Complex64> = (0..scene.omega.len())
        .map(|i| entries.iter().map(|e| e.residues[i]).sum())
        .collect();
    let max = sums.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let mut report = DefectReport::new("residue", tol, max);
    report.residuals = sums
        .iter()
        .enumerate()
        .map(|(i, s)| Residual {
            label: format!("form {}", i + 1),
            value: s.norm(),
        })
        .collect();
    Ok(report)
}

/// For each loop, the single form (among the scene's) with a pole there.
fn loop_labels(lay: &Layout) -> Result<Vec<Option<usize>>> {
    lay.loops
        .iter()
        .map(|pl| {
            let active = pl.active_forms();
            match active.len() {
                0 => Ok(None),
                1 => Ok(Some(active[0])),
                _ => Err(Error::Precondition(format!(
                    "forms {:?} share the pole {}",
                    active.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    point_label(&pl.point)
                ))),
            }
        })
        .collect()
}

/// Labels of the maximal runs of consecutive poles of the same form.
fn runs(labels: &[Option<usize>], cyclic: bool) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for l in labels.iter().flatten() {
        if out.last() != Some(l) {
            out.push(*l);
        }
    }
    if cyclic && out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn grouping_error(runs: &[usize]) -> Error {
    Error::Layout(format!(
        "poles of each form must be consecutive in the loop order at the base point, got form blocks {:?}",
        runs.iter().map(|i| i + 1).collect::<Vec<_>>()
    ))
}

/// First layout, over the choices of the ray to infinity, whose form blocks
/// satisfy `accept`.
fn grouped_layout(
    scene: &SurfaceScene,
    accept: impl Fn(&[usize]) -> bool,
) -> Result<(Layout, Vec<Option<usize>>, Vec<usize>)> {
    let mut first_error = None;
    for rank in 0..cut_choices(scene)? {
        let lay = match layout_with_cut(scene, rank) {
            Ok(l) => l,
            Err(e @ Error::Layout(_)) => {
                first_error.get_or_insert(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let labels = loop_labels(&lay)?;
        let r = runs(&labels, scene.genus() == 0);
        if accept(&r) {
            return Ok((lay, labels, r));
        }
        first_error.get_or_insert(grouping_error(&r));
    }
    Err(first_error.unwrap_or_else(|| Error::Layout("no admissible layout".into())))
}

/// Regularized transports along the approach rays of the loops with a pole
/// of some form.
fn approach_series(
    scene: &SurfaceScene,
    lay: &Layout,
    labels: &[Option<usize>],
    degree: usize,
    tol: f64,
) -> Result<Vec<Option<NCSeries>>> {
    lay.loops
        .par_iter()
        .zip(labels.par_iter())
        .map(|(pl, label)| {
            if label.is_none() {
                return Ok(None);
            }
            let omega = chart_forms(&scene.omega, pl.chart)?;
            let gamma = Path::line(pl.keyhole.base, pl.keyhole.pole);
            Ok(Some(
                regularized_transport(&omega, &gamma, degree, tol)?.series,
            ))
        })
        .collect()
}

fn cycle_series(
    scene: &SurfaceScene,
    lay: &Layout,
    degree: usize,
    tol: f64,
) -> Result<Option<(NCSeries, NCSeries)>> {
    let Some((alpha, beta)) = &lay.cycles else {
        return Ok(None);
    };
    let (fa, fb) = rayon::join(
        || transport_series(&scene.omega, alpha, degree, tol),
        || transport_series(&scene.omega, beta, degree, tol),
    );
    Ok(Some((fa?.series, fb?.series)))
}

/// Terms of the bilinear law for `omega_1 = forms[pair.0]` and
/// `omega_2 = forms[pair.1]`, with residue terms carrying `2 pi i`.
pub fn bilinear_terms(
    scene: &SurfaceScene,
    pair: (usize, usize),
    tol: f64,
) -> Result<Vec<(String, Complex64)>> {
    let sub = scene.restricted(&[pair.0, pair.1])?;
    let (lay, labels, r) = grouped_layout(&sub, |r| {
        r.len() == r.iter().collect::<std::collections::BTreeSet<_>>().len()
    })?;
    // On a torus the relation reads sigma_1 ... sigma_N [alpha, beta] = 1, so
    // the block of the first form has to come first; otherwise the law holds
    // with the two forms exchanged.
    let (p, q) = if sub.genus() == 1 && r == [1, 0] {
        (2u8, 1u8)
    } else {
        (1u8, 2u8)
    };
    let ttol = transport_tol(tol, lay.loops.len() + 2);
    let approach = approach_series(&sub, &lay, &labels, 1, ttol)?;
    let mut terms = Vec::new();
    for ((pl, label), f) in lay.loops.iter().zip(&labels).zip(&approach) {
        let (Some(l), Some(f)) = (label, f) else {
            continue;
        };
        let letter = *l as u8 + 1;
        let res = pl.residues[*l];
        let t = if letter == p {
            -TWO_PI_I * res * f.at(&[q])
        } else {
            TWO_PI_I * res * f.at(&[p])
        };
        terms.push((
            format!("pole {} of form {}", point_label(&pl.point), letter),
            t,
        ));
    }
    if let Some((fa, fb)) = cycle_series(&sub, &lay, 1, ttol)? {
        terms.push((
            "cycles".into(),
            fa.at(&[p]) * fb.at(&[q]) - fb.at(&[p]) * fa.at(&[q]),
        ));
    }
    Ok(terms)
}

/// Bilinear law for two forms without common poles: the residue-weighted
/// path integrals plus the cycle term sum to zero.
pub fn riemann_bilinear_check(
    scene: &SurfaceScene,
    pair: (usize, usize),
    tol: f64,
) -> Result<DefectReport> {
    let terms = bilinear_terms(scene, pair, tol)?;
    let sum: Complex64 = terms.iter().map(|t| t.1).sum();
    Ok(DefectReport::new("riemann", tol, sum.norm())
        .with_value(sum)
        .with_terms(&terms))
}

/// Terms of the triple-form law for `forms[triple.i]`, letters `A, B, C`.
pub fn triple_terms(
    scene: &SurfaceScene,
    triple: (usize, usize, usize),
    tol: f64,
) -> Result<Vec<(String, Complex64)>> {
    let sub = scene.restricted(&[triple.0, triple.1, triple.2])?;
    let genus = sub.genus();
    let (lay, labels, _) = grouped_layout(&sub, |r| {
        let mut present = r.to_vec();
        present.sort_unstable();
        present.dedup();
        if present.len() != r.len() {
            false
        } else if genus == 0 {
            (0..r.len()).any(|k| r[k..].iter().chain(&r[..k]).eq(present.iter()))
        } else {
            r == present
        }
    })?;
    let ttol = transport_tol(tol, lay.loops.len() + 2);
    let approach = approach_series(&sub, &lay, &labels, 2, ttol)?;
    let mut terms = Vec::new();
    for ((pl, label), f) in lay.loops.iter().zip(&labels).zip(&approach) {
        let (Some(l), Some(f)) = (label, f) else {
            continue;
        };
        let res = TWO_PI_I * pl.residues[*l];
        let t = match l {
            0 => res * f.at(&[3, 2]),
            1 => -res * f.at(&[1]) * f.at(&[3]),
            _ => res * f.at(&[1, 2]),
        };
        terms.push((
            format!("pole {} of form {}", point_label(&pl.point), l + 1),
            t,
        ));
    }
    if let Some((a, b)) = cycle_series(&sub, &lay, 2, ttol)? {
        let cycles = a.at(&[1, 2]) * b.at(&[3]) - b.at(&[1, 2]) * a.at(&[3])
            + a.at(&[3, 2]) * b.at(&[1])
            - b.at(&[3, 2]) * a.at(&[1])
            - a.at(&[1]) * b.at(&[2]) * a.at(&[3])
            + b.at(&[1]) * a.at(&[2]) * b.at(&[3]);
        terms.push(("cycles".into(), cycles));
    }
    Ok(terms)
}

/// Triple-form law for three forms with pairwise disjoint poles.
pub fn triple_check(
    scene: &SurfaceScene,
    triple: (usize, usize, usize),
    tol: f64,
) -> Result<DefectReport> {
    let terms = triple_terms(scene, triple, tol)?;
    let sum: Complex64 = terms.iter().map(|t| t.1).sum();
    Ok(DefectReport::new("triple", tol, sum.norm())
        .with_value(sum)
        .with_terms(&terms))
}

/// Weil reciprocity for two rational functions.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilReport {
    /// `prod g(P_i)^{-a_i} prod f(Q_j)^{b_j}` by exact evaluation.
    pub product: Complex64,
    pub defect: f64,
    /// The same product from the exponentiated bilinear law, when a base
    /// point with grouped divisors was found.
    pub cross_check: Option<Complex64>,
    pub base: Option<Complex64>,
}

fn checked_power(z: Complex64, k: i64, what: &str) -> Result<Complex64> {
    if z.norm() == 0.0 || !z.is_finite() {
        return Err(Error::Precondition(format!(
            "{what} vanishes or is singular on the other divisor"
        )));
    }
    Ok(z.powi(k as i32))
}

/// Exact Weil product for rational functions with disjoint divisors.
pub fn weil_product(f: &DlogForm, g: &DlogForm) -> Result<Complex64> {
    let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-9 * 1f64.max(a.norm());
    for &(p, _) in f.divisor() {
        if g.divisor().iter().any(|&(q, _)| close(p, q)) {
            return Err(Error::Precondition(format!(
                "divisors of f and g share the point {p}"
            )));
        }
    }
    if f.order_at_infinity() != 0 && g.order_at_infinity() != 0 {
        return Err(Error::Precondition(
            "divisors of f and g share the point at infinity".into(),
        ));
    }
    let mut product = Complex64::new(1.0, 0.0);
    for &(p, a) in f.divisor() {
        product *= checked_power(g.function(p), -a, "g")?;
    }
    for &(q, b) in g.divisor() {
        product *= checked_power(f.function(q), b, "f")?;
    }
    if f.order_at_infinity() != 0 {
        let v = g
            .function_at_infinity()
            .ok_or_else(|| Error::Precondition("g is singular at infinity".into()))?;
        product *= checked_power(v, -f.order_at_infinity(), "g")?;
    }
    if g.order_at_infinity() != 0 {
        let v = f
            .function_at_infinity()
            .ok_or_else(|| Error::Precondition("f is singular at infinity".into()))?;
        product *= checked_power(v, g.order_at_infinity(), "f")?;
    }
    Ok(product)
}

/// Candidate base points around the divisors, tried in order until the
/// layout groups both divisors.
fn weil_base_candidates(f: &DlogForm, g: &DlogForm) -> Vec<Complex64> {
    let pts: Vec<Complex64> = f.divisor().iter().chain(g.divisor()).map(|d| d.0).collect();
    let n = pts.len().max(1) as f64;
    let center = pts.iter().sum::<Complex64>() / n;
    let scale = pts.iter().map(|p| (p - center).norm()).fold(1.0, f64::max);
    let mut out = Vec::new();
    for radius in [0.37, 1.3, 3.1, 0.11] {
        for k in 0..24 {
            out.push(center + Complex64::from_polar(radius * scale, 0.3 + 0.27 * k as f64));
        }
    }
    out
}

/// Weil reciprocity by exact evaluation, cross-validated against the
/// exponentiated bilinear law for `df/f` and `dg/g`.
pub fn weil_check(f: &DlogForm, g: &DlogForm, tol: f64) -> Result<WeilReport> {
    let product = weil_product(f, g)?;
    let omega = FormAssignment::new(vec![
        MeromorphicForm::Dlog(f.clone()),
        MeromorphicForm::Dlog(g.clone()),
    ])?;
    let mut cross_check = None;
    let mut base = None;
    for p in weil_base_candidates(f, g) {
        let scene = SurfaceScene::new(omega.clone(), p);
        match bilinear_terms(&scene, (0, 1), tol) {
            Ok(terms) => {
                cross_check = Some(weil_exponent(&terms).exp());
                base = Some(p);
                break;
            }
            Err(Error::Layout(_))
            | Err(Error::PoleProximity { .. })
            | Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(WeilReport {
        product,
        defect: (product - 1.0).norm(),
        cross_check,
        base,
    })
}

/// `sum b_j log f(Q_j) - sum a_i log g(P_i)` along the approach rays, read
/// off the bilinear residue terms.
fn weil_exponent(terms: &[(String, Complex64)]) -> Complex64 {
    terms
        .iter()
        .filter(|t| t.0 != "cycles")
        .map(|t| t.1 / TWO_PI_I)
        .sum()
}

#[cfg(test)]
mod tests;
