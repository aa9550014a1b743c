//! Regularized generating series along paths that end at a pole, residual
//! series of small loops, and the pro-unipotent tame symbol.
//!
//! The regularization of `F` along `gamma: P -> Q` is the constant term
//! `lim F_{gamma_eps} exp(-L ln eps)`, where `gamma_eps` stops at distance
//! `eps` from `Q` and `L = sum_i Res_Q(omega_i) A_i`. It is computed exactly by
//! transporting the conjugated driver `exp(L ln s) M_reg exp(-L ln s)` along
//! the final straight segment, where `M_reg` is the driver with the polar
//! parts removed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{LocalPart, PolePoint};
use crate::geometry::{keyhole_loop, KeyholeSpec, Path, PathSegment};
use crate::ncseries::{NCSeries, Word, WordLayout};
use crate::transport::{integrate, transport_dense, transport_series, Drive, FormAssignment};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Residues `Res_Q omega_i` for every letter.
pub fn residues_at(omega: &FormAssignment, q: PolePoint) -> Result<Vec<Complex64>> {
    omega.forms().iter().map(|f| f.residue_at(q)).collect()
}

/// `exp(x L)` for a degree-one element `L` given by its letter coefficients.
pub(crate) fn exp_letters(layout: &WordLayout, l: &[Complex64], x: Complex64) -> Vec<Complex64> {
    let mut out = layout.unit();
    let n = layout.n;
    for k in 1..=layout.depth {
        let (prev, cur) = (layout.offset(k - 1), layout.offset(k));
        let scale = x / k as f64;
        for cu in 0..layout.count(k - 1) {
            let t = out[prev + cu];
            if t == ZERO {
                continue;
            }
            for i in 0..n {
                out[cur + cu * n + i] = t * l[i] * scale;
            }
        }
    }
    out
}

/// `F^Res = exp(2 pi i sum_j Res_Q(omega_j) A_j)`: the word `(i_1..i_r)` has
/// coefficient `(2 pi i)^r / r! prod Res_Q omega_{i_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSeries {
    pub series: NCSeries,
    pub residues: Vec<Complex64>,
}

pub fn residual_series(
    omega: &FormAssignment,
    q: PolePoint,
    degree: usize,
) -> Result<ResidualSeries> {
    let residues = residues_at(omega, q)?;
    let layout = WordLayout::new(omega.len(), degree);
    let dense = exp_letters(&layout, &residues, Complex64::new(0.0, 2.0 * PI));
    Ok(ResidualSeries {
        series: NCSeries::from_dense(&layout, &dense),
        residues,
    })
}

/// Parameters of an epsilon ladder `eps_k = eps0 * ratio^k`, and the highest
/// power of `eps` modelled by the log-polynomial fit.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsLadder {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
    pub eps_powers: u32,
}

impl EpsLadder {
    /// `|P - Q| / 8` with six halvings.
    pub fn halving(distance: f64) -> Self {
        EpsLadder {
            eps0: distance / 8.0,
            ratio: 0.5,
            count: 7,
            eps_powers: 2,
        }
    }

    /// Ladder for the log-polynomial fit: `1e-2 |P - Q|` down to
    /// `1e-8 |P - Q|`, modelling `eps` and `eps^2` corrections, with twice as
    /// many points as the largest basis at `degree`.
    pub fn for_fit(distance: f64, degree: usize) -> Self {
        let eps_powers = 2;
        let count = 2 * (degree + 1) * (1 + eps_powers as usize);
        let ratio = 1e-6f64.powf(1.0 / (count - 1) as f64);
        EpsLadder {
            eps0: distance * 1e-2,
            ratio,
            count,
            eps_powers,
        }
    }

    /// Size of the largest fit basis at `degree`.
    pub fn unknowns(&self, degree: usize) -> usize {
        (degree + 1) * (1 + self.eps_powers as usize)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.eps0 * self.ratio.powi(k as i32))
            .collect()
    }
}

/// Per-word log-polynomial fit diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct FitDiagnostics {
    pub ladder: Vec<f64>,
    /// Largest least-squares residual over all words.
    pub max_residual: f64,
    /// `(word, residual)` for every fitted word.
    pub residuals: Vec<(Word, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedSeries {
    pub series: NCSeries,
    pub pole: Complex64,
    /// Letter residues at the pole.
    pub residues: Vec<Complex64>,
    pub estimated_error: f64,
    pub diagnostics: Option<FitDiagnostics>,
}

impl RegularizedSeries {
    /// The series with every word ending in a letter that has a pole at `Q`
    /// set to zero.
    pub fn dropped(&self) -> NCSeries {
        let mut coeffs: Vec<(Word, Complex64)> = Vec::new();
        for (w, c) in self.series.iter() {
            let keep = match w.last() {
                None => true,
                Some(l) => self.residues[l as usize - 1].norm() == 0.0,
            };
            if keep {
                coeffs.push((w.clone(), *c));
            }
        }
        NCSeries::from_coeffs(
            self.series.alphabet_size(),
            self.series.truncation(),
            coeffs,
        )
        .expect("subset of a valid series")
    }

    /// `max |F rev(F) - 1|`, which vanishes when the series is grouplike.
    pub fn inverse_defect(&self) -> f64 {
        let one = NCSeries::one(self.series.alphabet_size(), self.series.truncation());
        self.series
            .concat_mul(&self.series.reverse_antipode())
            .map(|p| p.max_abs_diff(&one))
            .unwrap_or(f64::INFINITY)
    }
}

fn split_approach(gamma: &Path) -> Result<(Path, Complex64, Complex64)> {
    let segs = gamma.segments();
    let Some(PathSegment::Line { start, end }) = segs.last() else {
        return Err(Error::InvalidPath(
            "the path to a pole must end with a straight segment".into(),
        ));
    };
    if (end - start).norm() == 0.0 {
        return Err(Error::InvalidPath("degenerate final segment".into()));
    }
    let head = if segs.len() > 1 {
        Path::new(segs[..segs.len() - 1].to_vec())?
    } else {
        Path::constant(*start)
    };
    Ok((head, *start, *end))
}

/// Conjugated driver along `z0 -> Q` in the graded parameter
/// `t = 1 - (1 - tau)^3`.
struct ConjugatedDrive<'a> {
    local: Vec<LocalPart<'a>>,
    layout: &'a WordLayout,
    z0: Complex64,
    q: Complex64,
    residues: &'a [Complex64],
}

impl Drive for ConjugatedDrive<'_> {
    fn letters_only(&self) -> bool {
        false
    }

    fn eval(&self, _tau: f64, u: f64, out: &mut [Complex64]) {
        let dt = 3.0 * u * u;
        let dz = (self.q - self.z0) * dt;
        let offset = (self.z0 - self.q) * (u * u * u);
        let mut m0 = vec![ZERO; self.layout.total()];
        for (i, f) in self.local.iter().enumerate() {
            m0[1 + i] = f.regular_part(offset) * dz;
        }
        if self.residues.iter().all(|r| r.norm() == 0.0) {
            out.copy_from_slice(&m0);
            return;
        }
        let x = Complex64::new(((self.q - self.z0).norm() * u * u * u).ln(), 0.0);
        let e_plus = exp_letters(self.layout, self.residues, x);
        let e_minus = exp_letters(self.layout, self.residues, -x);
        let conj = self.layout.mul(&self.layout.mul(&e_plus, &m0), &e_minus);
        out.copy_from_slice(&conj);
    }
}

/// Regularized series along `gamma`, whose final segment is a straight line
/// ending at the pole `Q = gamma.end()`.
pub fn regularized_transport(
    omega: &FormAssignment,
    gamma: &Path,
    degree: usize,
    tol: f64,
) -> Result<RegularizedSeries> {
    let (head, z0, q) = split_approach(gamma)?;
    let residues = residues_at(omega, PolePoint::Finite(q))?;
    let layout = WordLayout::new(omega.len(), degree);
    let probe = Path::line(z0, z0 + (q - z0) * (1.0 - 1e-6));
    crate::transport::check_path_avoids_poles(omega, &probe)?;
    let head_part = transport_dense(omega, &head, &layout, 0.5 * tol)?;
    let local = omega.forms().iter().map(|f| LocalPart::new(f, q)).collect();
    let drive = ConjugatedDrive {
        local,
        layout: &layout,
        z0,
        q,
        residues: &residues,
    };
    let tail = integrate(&drive, &layout, 0.5 * tol)?;
    let start = exp_letters(
        &layout,
        &residues,
        Complex64::new(-(q - z0).norm().ln(), 0.0),
    );
    let value = layout.mul(&layout.mul(&head_part.value, &start), &tail.value);
    let err = head_part
        .err_by_degree
        .iter()
        .chain(&tail.err_by_degree)
        .sum();
    Ok(RegularizedSeries {
        series: NCSeries::from_dense(&layout, &value),
        pole: q,
        residues,
        estimated_error: err,
        diagnostics: None,
    })
}

fn truncated_approach(head: &Path, z0: Complex64, q: Complex64, eps: f64) -> Result<Path> {
    let end = q + (z0 - q) / (z0 - q).norm() * eps;
    let last = Path::line(z0, end);
    if head.segments().is_empty() {
        Ok(last)
    } else {
        head.compose(&last)
    }
}

/// Number of trailing letters of `w` with a pole at `Q`.
fn trailing_pole_letters(w: &Word, residues: &[Complex64]) -> usize {
    w.letters()
        .iter()
        .rev()
        .take_while(|&&l| residues[l as usize - 1].norm() != 0.0)
        .count()
}

/// Regularization by least-squares fitting of every coefficient of
/// `F_{gamma_eps}` along an epsilon ladder against
/// `ln^l eps (l <= trailing pole letters)` and `eps^j ln^l eps
/// (1 <= j <= eps_powers, l <= |w|)`, keeping the constant term.
pub fn ladder_regularized_transport(
    omega: &FormAssignment,
    gamma: &Path,
    degree: usize,
    tol: f64,
    ladder: &EpsLadder,
) -> Result<RegularizedSeries> {
    let (head, z0, q) = split_approach(gamma)?;
    let residues = residues_at(omega, PolePoint::Finite(q))?;
    let layout = WordLayout::new(omega.len(), degree);
    let eps = ladder.values();
    if eps.iter().any(|&e| !(e > 0.0) || e >= (z0 - q).norm()) {
        return Err(Error::Regularization(
            "ladder values must lie in (0, |z0 - Q|)".into(),
        ));
    }
    let needed = 2 * ladder.unknowns(degree);
    if eps.len() < needed {
        return Err(Error::Regularization(format!(
            "ladder needs at least {needed} points, got {}",
            eps.len()
        )));
    }
    let transport_tol = (tol * 1e-3).min(1e-12);
    let samples = eps
        .par_iter()
        .map(|&e| {
            transport_dense(
                omega,
                &truncated_approach(&head, z0, q, e)?,
                &layout,
                transport_tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![ZERO; layout.total()];
    out[0] = Complex64::new(1.0, 0.0);
    let mut residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (idx, slot) in out.iter_mut().enumerate().skip(1) {
        let w = layout.word(idx);
        let m = trailing_pole_letters(&w, &residues);
        let mut columns: Vec<Box<dyn Fn(f64) -> f64>> = Vec::new();
        for l in 0..=m {
            columns.push(Box::new(move |e: f64| e.ln().powi(l as i32)));
        }
        for j in 1..=ladder.eps_powers {
            for l in 0..=w.len() {
                columns.push(Box::new(move |e: f64| {
                    e.powi(j as i32) * e.ln().powi(l as i32)
                }));
            }
        }
        let rows = eps.len();
        let cols = columns.len();
        let mut a = DMatrix::<f64>::zeros(rows, cols);
        for (r, &e) in eps.iter().enumerate() {
            for (c, f) in columns.iter().enumerate() {
                a[(r, c)] = f(e);
            }
        }
        let norms: Vec<f64> = (0..cols).map(|c| a.column(c).norm().max(1e-300)).collect();
        for (c, nrm) in norms.iter().enumerate() {
            a.column_mut(c).scale_mut(1.0 / nrm);
        }
        let svd = a.clone().svd(true, true);
        let re = DVector::from_iterator(rows, samples.iter().map(|s| s.value[idx].re));
        let im = DVector::from_iterator(rows, samples.iter().map(|s| s.value[idx].im));
        let xr = svd
            .solve(&re, 1e-14)
            .map_err(|e| Error::Regularization(e.to_string()))?;
        let xi = svd
            .solve(&im, 1e-14)
            .map_err(|e| Error::Regularization(e.to_string()))?;
        let rr = (&a * &xr - &re).amax();
        let ri = (&a * &xi - &im).amax();
        let resid = rr.max(ri);
        max_residual = max_residual.max(resid);
        residuals.push((w, resid));
        *slot = Complex64::new(xr[0] / norms[0], xi[0] / norms[0]);
    }
    if max_residual > tol {
        return Err(Error::Regularization(format!(
            "log-polynomial fit residual {max_residual:.3e} exceeds tolerance {tol:.3e}"
        )));
    }
    Ok(RegularizedSeries {
        series: NCSeries::from_dense(&layout, &out),
        pole: q,
        residues,
        estimated_error: max_residual,
        diagnostics: Some(FitDiagnostics {
            ladder: eps,
            max_residual,
            residuals,
        }),
    })
}

/// Assembled tame symbol `1 + F^reg (F^Res - 1) F^reg_{gamma^-1}` for the
/// keyhole around `Q`, with `F^reg_{gamma^-1} = rev(F^reg)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TameSymbol {
    pub series: NCSeries,
    pub regularized: RegularizedSeries,
    pub residual: ResidualSeries,
    /// `max |F^reg rev(F^reg) - 1|`.
    pub inverse_defect: f64,
}

pub fn assemble_tame_symbol(reg: &NCSeries, residual: &NCSeries) -> Result<NCSeries> {
    let one = NCSeries::one(reg.alphabet_size(), reg.truncation());
    let inner = residual.sub(&one)?;
    one.add(
        &reg.concat_mul(&inner)?
            .concat_mul(&reg.reverse_antipode())?,
    )
}

pub fn tame_symbol(
    omega: &FormAssignment,
    spec: &KeyholeSpec,
    degree: usize,
    tol: f64,
) -> Result<TameSymbol> {
    let gamma = Path::line(spec.base, spec.pole);
    let regularized = regularized_transport(omega, &gamma, degree, tol)?;
    let residual = residual_series(omega, PolePoint::Finite(spec.pole), degree)?;
    let series = assemble_tame_symbol(&regularized.series, &residual.series)?;
    let inverse_defect = regularized.inverse_defect();
    Ok(TameSymbol {
        series,
        regularized,
        residual,
        inverse_defect,
    })
}

/// Assembled tame symbol against direct transport around keyhole loops of
/// shrinking radius.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyholeDefect {
    pub ladder: Vec<f64>,
    /// Max per-word defect at each ladder radius.
    pub defects: Vec<f64>,
    /// Defects at or below this level count as converged.
    pub noise_floor: f64,
    /// Every defect is at most the larger of its predecessor and the noise floor.
    pub decreasing: bool,
}

pub fn keyhole_direct_check(
    omega: &FormAssignment,
    spec: &KeyholeSpec,
    ladder: &[f64],
    degree: usize,
    tol: f64,
) -> Result<KeyholeDefect> {
    let symbol = tame_symbol(omega, spec, degree, tol)?;
    let defects = ladder
        .par_iter()
        .map(|&eps| {
            let k = KeyholeSpec::new(spec.base, spec.pole, eps)?;
            let direct = transport_series(omega, &keyhole_loop(&k), degree, tol)?;
            Ok(direct.series.max_abs_diff(&symbol.series))
        })
        .collect::<Result<Vec<f64>>>()?;
    let scale = symbol
        .series
        .iter()
        .map(|(_, c)| c.norm())
        .fold(1.0, f64::max);
    let noise_floor = (100.0 * tol).max(1e-12 * scale);
    let decreasing = defects.windows(2).all(|w| w[1] <= w[0].max(noise_floor));
    if !decreasing {
        return Err(Error::Regularization(format!(
            "keyhole defect does not decrease along the ladder: {defects:?}"
        )));
    }
    Ok(KeyholeDefect {
        ladder: ladder.to_vec(),
        defects,
        noise_floor,
        decreasing,
    })
}
