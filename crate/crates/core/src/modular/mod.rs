//! Iterated integrals of modular 1-forms `f dz` along the imaginary axis,
//! regularized J-symbols at the cusp and L-values.
//!
//! Letters are [`QExpansion`]s of level one. A weight-`k` letter stands for
//! the form `f(z) dz`; weight 0 is a constant multiple of `dz`. Points below
//! height 1 are reached in the chart `w = -1/z`, where `f(z) dz` becomes
//! `w^(k-2) f(w) dw`, so every integrand is summed at height at least 1.

mod lvalue;
mod qexp;

pub use lvalue::{lvalue_iterated, lvalue_multiple, lvalue_multiple_oracle, lvalue_oracle, LValue};
pub use qexp::{delta_qexp, divisor_sigma, eisenstein_qexp, QExpansion};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ncseries::{grouplike_defect, NCSeries, Word, WordLayout};
use crate::regularization::exp_letters;
use crate::transport::{integrate, Drive};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
/// Size of the neglected tails when cutting the path off below a cusp.
const TAIL: f64 = 1e-17;

/// A point of `i R_{>0}` or one of the cusps `i infinity` and `0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Endpoint {
    Cusp,
    Zero,
    Height(f64),
}

impl Endpoint {
    fn check(self) -> Result<Self> {
        match self {
            Endpoint::Height(y) if !(y > 0.0 && y.is_finite()) => Err(Error::InvalidPath(format!(
                "height must be positive and finite, got {y}"
            ))),
            e => Ok(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerticalPath {
    pub from: Endpoint,
    pub to: Endpoint,
}

impl VerticalPath {
    pub fn new(from: Endpoint, to: Endpoint) -> Result<Self> {
        Ok(VerticalPath {
            from: from.check()?,
            to: to.check()?,
        })
    }

    pub fn reversed(&self) -> VerticalPath {
        VerticalPath {
            from: self.to,
            to: self.from,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Chart {
    /// `z = i y`.
    Upper,
    /// `w = -1/z = i y`.
    Inverted,
}

struct VerticalDrive<'a> {
    letters: &'a [QExpansion],
    chart: Chart,
    y0: f64,
    y1: f64,
}

impl Drive for VerticalDrive<'_> {
    fn eval(&self, t: f64, _tc: f64, out: &mut [Complex64]) {
        let y = self.y0 + t * (self.y1 - self.y0);
        let z = Complex64::new(0.0, y);
        let dz = I * (self.y1 - self.y0);
        for (j, f) in self.letters.iter().enumerate() {
            out[1 + j] = match self.chart {
                Chart::Upper => f.eval(z) * dz,
                Chart::Inverted if f.weight() == 0 => f.coeff(0) / (z * z) * dz,
                Chart::Inverted => z.powi(f.weight() as i32 - 2) * f.eval(z) * dz,
            };
        }
    }
}

struct Leg {
    value: Vec<Complex64>,
    error: f64,
}

fn run(
    letters: &[QExpansion],
    layout: &WordLayout,
    chart: Chart,
    y0: f64,
    y1: f64,
    tol: f64,
) -> Result<Leg> {
    if y0 == y1 {
        return Ok(Leg {
            value: layout.unit(),
            error: 0.0,
        });
    }
    let drive = VerticalDrive {
        letters,
        chart,
        y0,
        y1,
    };
    let out = integrate(&drive, layout, tol)?;
    Ok(Leg {
        value: out.value,
        error: out.err_by_degree.iter().sum(),
    })
}

/// Smallest integer height `>= 8` at which the decaying parts, weighted by
/// `y^power`, fall below [`TAIL`].
fn cutoff_height(letters: &[QExpansion], power: impl Fn(&QExpansion) -> i32) -> Result<f64> {
    for y in 8..=80 {
        let y = y as f64;
        let bound: f64 = letters
            .iter()
            .map(|f| f.decay_bound(y) * y.powi(power(f)))
            .sum();
        if bound < TAIL {
            return Ok(y);
        }
    }
    Err(Error::QExpansion(
        "q-expansion tails do not decay fast enough toward the cusp".into(),
    ))
}

fn check_letters(letters: &[QExpansion], tol: f64) -> Result<()> {
    if letters.is_empty() {
        return Err(Error::Precondition(
            "at least one letter is required".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    for (j, f) in letters.iter().enumerate() {
        let tail = f.tail_bound(1.0);
        if tail > 1e-3 * tol || tail > 1e-14 {
            return Err(Error::QExpansion(format!(
                "letter {}: cutoff {} leaves a tail of {tail:.2e} at height 1",
                j + 1,
                f.cutoff()
            )));
        }
    }
    Ok(())
}

/// Transport from `i` to `e`, with the cusps regularized by the constant
/// term in the height.
fn from_i(letters: &[QExpansion], layout: &WordLayout, e: Endpoint, tol: f64) -> Result<Leg> {
    let depth = layout.depth as i32;
    match e {
        Endpoint::Height(y) if y >= 1.0 => run(letters, layout, Chart::Upper, 1.0, y, tol),
        Endpoint::Height(y) => run(letters, layout, Chart::Inverted, 1.0, 1.0 / y, tol),
        Endpoint::Cusp => {
            let y = cutoff_height(letters, |_| depth)?;
            let leg = run(letters, layout, Chart::Upper, 1.0, y, tol)?;
            let a0: Vec<Complex64> = letters.iter().map(|f| f.coeff(0)).collect();
            let e = exp_letters(layout, &a0, -I * y);
            Ok(Leg {
                value: layout.mul(&leg.value, &e),
                error: leg.error,
            })
        }
        Endpoint::Zero => {
            if let Some(j) = letters.iter().position(|f| f.weight() > 0 && !f.is_cusp()) {
                return Err(Error::Precondition(format!(
                    "letter {} has a nonzero constant term and weight {}; regularization at the cusp 0 is unsupported",
                    j + 1,
                    letters[j].weight()
                )));
            }
            let w = cutoff_height(letters, |f| f.weight() as i32 - 2 + depth)?;
            let leg = run(letters, layout, Chart::Inverted, 1.0, w, tol)?;
            let a0: Vec<Complex64> = letters
                .iter()
                .map(|f| if f.weight() == 0 { f.coeff(0) } else { ZERO })
                .collect();
            let e = exp_letters(layout, &a0, -I / w);
            Ok(Leg {
                value: layout.mul(&leg.value, &e),
                error: leg.error,
            })
        }
    }
}

/// Transport with its error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalSeries {
    pub series: NCSeries,
    pub estimated_error: f64,
}

/// Generating series of iterated integrals of the letters along `path`.
/// Cusp endpoints are regularized by taking the constant term in the
/// height; at `0` only `dz` letters may have a constant term.
pub fn vertical_series(
    letters: &[QExpansion],
    path: &VerticalPath,
    degree: usize,
    tol: f64,
) -> Result<VerticalSeries> {
    check_letters(letters, tol)?;
    let layout = WordLayout::new(letters.len(), degree);
    let leg_tol = 0.25 * tol;
    let (a, b) = rayon::join(
        || from_i(letters, &layout, path.from, leg_tol),
        || from_i(letters, &layout, path.to, leg_tol),
    );
    let (a, b) = (a?, b?);
    let a_inv = NCSeries::from_dense(&layout, &a.value).inverse()?;
    let series = a_inv.concat_mul(&NCSeries::from_dense(&layout, &b.value))?;
    Ok(VerticalSeries {
        series,
        estimated_error: a.error + b.error,
    })
}

/// `int f dz o ... ` over the word in the letters `1 = f dz`, `2 = dz`.
pub fn vertical_transport(
    f: &QExpansion,
    path: &VerticalPath,
    word: &Word,
    tol: f64,
) -> Result<Complex64> {
    if word.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if let Some(&l) = word.letters().iter().find(|&&l| l == 0 || l > 2) {
        return Err(Error::LetterOutOfRange {
            letter: l,
            alphabet: 2,
        });
    }
    let letters = [f.clone(), QExpansion::dz()];
    let s = vertical_series(&letters, path, word.len(), tol)?;
    Ok(s.series.coeff(word))
}

/// Regularized J-symbol along a vertical path with a cusp endpoint at `i infinity`.
#[derive(Clone, Debug, PartialEq)]
pub struct JSymbol {
    pub series: NCSeries,
    /// Constant terms `a_0` of the letters, the pole data at the cusp.
    pub constant_terms: Vec<Complex64>,
    /// Whether the cusp is the end of the path (otherwise its start).
    pub cusp_at_end: bool,
    pub estimated_error: f64,
}

impl JSymbol {
    /// The series with every word that touches the cusp in a letter with
    /// `a_0 != 0` set to zero.
    pub fn dropped(&self) -> NCSeries {
        let coeffs = self.series.iter().filter_map(|(w, c)| {
            let l = if self.cusp_at_end {
                w.last()
            } else {
                w.first()
            };
            match l {
                Some(l) if self.constant_terms[l as usize - 1].norm() != 0.0 => None,
                _ => Some((w.clone(), *c)),
            }
        });
        NCSeries::from_coeffs(
            self.series.alphabet_size(),
            self.series.truncation(),
            coeffs.collect::<Vec<_>>(),
        )
        .expect("subset of a valid series")
    }

    pub fn shuffle_defect(&self) -> f64 {
        grouplike_defect(&self.series)
    }
}

fn cusp_side(path: &VerticalPath) -> Result<bool> {
    match (path.from, path.to) {
        (Endpoint::Cusp, Endpoint::Cusp) => {
            Err(Error::InvalidPath("both endpoints are the cusp".into()))
        }
        (_, Endpoint::Cusp) => Ok(true),
        (Endpoint::Cusp, _) => Ok(false),
        _ => Err(Error::Precondition(
            "a J-symbol path needs the cusp i infinity as an endpoint".into(),
        )),
    }
}

pub fn jsymbol_reg(
    letters: &[QExpansion],
    path: &VerticalPath,
    degree: usize,
    tol: f64,
) -> Result<JSymbol> {
    let cusp_at_end = cusp_side(path)?;
    let s = vertical_series(letters, path, degree, tol)?;
    Ok(JSymbol {
        series: s.series,
        constant_terms: letters.iter().map(|f| f.coeff(0)).collect(),
        cusp_at_end,
        estimated_error: s.estimated_error,
    })
}

/// `exp(sum_j a_0(f_j) A_j)`, the residue factor at the cusp: `f dz` has
/// residue `a_0 / (2 pi i)` in `q`.
pub fn jsymbol_res(letters: &[QExpansion], degree: usize) -> NCSeries {
    let layout = WordLayout::new(letters.len(), degree);
    let a0: Vec<Complex64> = letters.iter().map(|f| f.coeff(0)).collect();
    NCSeries::from_dense(
        &layout,
        &exp_letters(&layout, &a0, Complex64::new(1.0, 0.0)),
    )
}

/// Independent value of the J-symbol from `i y0` to the cusp: transports
/// to the heights `T` of a ladder, fits every coefficient by a polynomial
/// in `T` and keeps its constant term.
pub fn jsymbol_ladder(
    letters: &[QExpansion],
    y0: f64,
    degree: usize,
    heights: &[f64],
    tol: f64,
) -> Result<NCSeries> {
    check_letters(letters, tol)?;
    let cols = degree + 1;
    if heights.len() < cols + 2 {
        return Err(Error::Regularization(format!(
            "ladder needs at least {} heights, got {}",
            cols + 2,
            heights.len()
        )));
    }
    if heights.iter().any(|&t| !(t > y0.max(1.0))) {
        return Err(Error::Regularization(
            "ladder heights must exceed max(y0, 1)".into(),
        ));
    }
    let layout = WordLayout::new(letters.len(), degree);
    let start = VerticalPath::new(Endpoint::Height(y0), Endpoint::Height(1.0))?;
    let head = vertical_series(letters, &start, degree, 1e-3 * tol)?.series;
    let samples = heights
        .par_iter()
        .map(|&t| run(letters, &layout, Chart::Upper, 1.0, t, 1e-3 * tol).map(|l| l.value))
        .collect::<Result<Vec<_>>>()?;
    let lo = heights.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let a = DMatrix::from_fn(heights.len(), cols, |r, c| {
        ((heights[r] - mid) / half).powi(c as i32)
    });
    let svd = a.svd(true, true);
    let at_zero: Vec<f64> = (0..cols).map(|c| (-mid / half).powi(c as i32)).collect();
    let mut out = vec![ZERO; layout.total()];
    for (idx, o) in out.iter_mut().enumerate() {
        let re = DVector::from_iterator(heights.len(), samples.iter().map(|s| s[idx].re));
        let im = DVector::from_iterator(heights.len(), samples.iter().map(|s| s[idx].im));
        let xr = svd
            .solve(&re, 1e-15)
            .map_err(|e| Error::Regularization(e.to_string()))?;
        let xi = svd
            .solve(&im, 1e-15)
            .map_err(|e| Error::Regularization(e.to_string()))?;
        *o = (0..cols)
            .map(|c| Complex64::new(xr[c], xi[c]) * at_zero[c])
            .sum();
    }
    head.concat_mul(&NCSeries::from_dense(&layout, &out))
}

#[cfg(test)]
mod tests;
