//! L-values of cusp forms: as iterated integrals from `i infinity` to `0`
//! and, independently, by incomplete-gamma summation of the q-series.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ur};

use super::{vertical_series, Endpoint, QExpansion, VerticalPath};
use crate::error::{Error, Result};
use crate::ncseries::Word;
use crate::transport::adaptive_gk;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn require_cusp(f: &QExpansion) -> Result<()> {
    if !f.is_cusp() || f.weight() < 2 {
        return Err(Error::Precondition(
            "a cusp form of positive weight is required".into(),
        ));
    }
    Ok(())
}

/// `prod (n_j + 1)!` times the coefficient of `f dz o dz^n_1 o ... o f dz o dz^n_k`
/// in the series from `i infinity` to `0`.
pub fn lvalue_multiple(f: &QExpansion, ns: &[usize], tol: f64) -> Result<Complex64> {
    require_cusp(f)?;
    if ns.is_empty() {
        return Err(Error::Precondition(
            "at least one exponent is required".into(),
        ));
    }
    let mut letters = Vec::new();
    for &n in ns {
        letters.push(1u8);
        letters.extend(std::iter::repeat_n(2u8, n));
    }
    let word = Word::new(letters);
    let scale: f64 = ns.iter().map(|&n| factorial(n + 1)).product();
    let path = VerticalPath::new(Endpoint::Cusp, Endpoint::Zero)?;
    let alphabet = [f.clone(), QExpansion::dz()];
    let s = vertical_series(&alphabet, &path, word.len(), tol / scale)?;
    Ok(s.series.coeff(&word) * scale)
}

/// `(n + 1)! int_{i infinity}^0 f dz o dz^n`, which equals
/// `(n + 1) (-i)^(n+1) Lambda(f, n + 1)`.
pub fn lvalue_iterated(f: &QExpansion, n: usize, tol: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    lvalue_multiple(f, &[n], tol)
}

/// Completed L-value `Lambda(f, s) = int_0^infinity f(iy) y^(s-1) dy` with the
/// functional-equation defect `|Lambda(s) - i^k Lambda(k - s)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValue {
    pub value: Complex64,
    pub self_check: f64,
}

/// `c^-s Gamma(s, c x)`.
fn upper_gamma_term(c: f64, s: f64, x: f64) -> f64 {
    c.powf(-s) * gamma_ur(s, c * x) * gamma(s)
}

fn lambda(f: &QExpansion, s: f64, t0: f64) -> Complex64 {
    let k = f.weight() as f64;
    let ik = I.powu(f.weight());
    (1..=f.cutoff())
        .map(|n| {
            let c = 2.0 * PI * n as f64;
            f.coeff(n) * (upper_gamma_term(c, s, t0) + ik * upper_gamma_term(c, k - s, 1.0 / t0))
        })
        .sum()
}

pub fn lvalue_oracle(f: &QExpansion, s: f64, tol: f64) -> Result<LValue> {
    require_cusp(f)?;
    let k = f.weight() as f64;
    if !(s > 0.0 && s < k) {
        return Err(Error::Precondition(format!(
            "s must lie in (0, {k}), got {s}"
        )));
    }
    const T0: f64 = 1.25;
    if f.required_cutoff(1.0 / T0).is_none() {
        return Err(Error::QExpansion(format!(
            "cutoff {} too small for the split at height {}",
            f.cutoff(),
            1.0 / T0
        )));
    }
    let value = lambda(f, s, T0);
    let mirrored = lambda(f, k - s, T0);
    let self_check = (value - I.powu(f.weight()) * mirrored).norm();
    if self_check > tol {
        return Err(Error::ToleranceNotAchieved {
            tol,
            achieved: self_check,
            panels: 0,
        });
    }
    Ok(LValue { value, self_check })
}

/// The double L-value `lvalue_multiple(f, [n1, n2])` by nested quadrature on
/// the imaginary axis.
pub fn lvalue_multiple_oracle(f: &QExpansion, n1: usize, n2: usize, tol: f64) -> Result<Complex64> {
    require_cusp(f)?;
    if f.required_cutoff(1.0).is_none() {
        return Err(Error::QExpansion(format!(
            "cutoff {} too small at height 1",
            f.cutoff()
        )));
    }
    let ik = I.powu(f.weight());
    let at = |y: f64| -> Complex64 {
        if y >= 1.0 {
            f.eval(Complex64::new(0.0, y))
        } else {
            f.eval(Complex64::new(0.0, 1.0 / y)) * y.powi(-(f.weight() as i32)) / ik
        }
    };
    // int_1^infinity f(iu) (u - 1)^j du
    let tail = |j: usize| -> Complex64 {
        (1..=f.cutoff())
            .map(|m| {
                let c = 2.0 * PI * m as f64;
                f.coeff(m) * (-c).exp() * factorial(j) / c.powi(j as i32 + 1)
            })
            .sum()
    };
    let tails: Vec<Complex64> = (0..=n1).map(tail).collect();
    let binom = |n: usize, k: usize| factorial(n) / (factorial(k) * factorial(n - k));
    let inner = |y: f64| -> (Complex64, f64) {
        if y >= 1.0 {
            let g = (1..=f.cutoff())
                .map(|m| {
                    let c = 2.0 * PI * m as f64;
                    f.coeff(m) * (-c * y).exp() * factorial(n1) / c.powi(n1 as i32 + 1)
                })
                .sum();
            return (g, 0.0);
        }
        let near = adaptive_gk(
            &|u| (at(u) * (u - y).powi(n1 as i32), 0.0),
            y,
            1.0,
            1e-3 * tol,
        );
        let far: Complex64 = (0..=n1)
            .map(|j| tails[j] * binom(n1, j) * (1.0 - y).powi((n1 - j) as i32))
            .sum();
        (near.0 + far, near.1)
    };
    let outer = |y: f64| -> (Complex64, f64) {
        let (g, e) = inner(y);
        let w = at(y) * y.powi(n2 as i32);
        (w * g, w.norm() * e)
    };
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in [(0.05, 0.3), (0.3, 1.0), (1.0, 3.0), (3.0, 8.0)] {
        total += adaptive_gk(&outer, a, b, 0.1 * tol).0;
    }
    let sign = -(-I).powu((n1 + n2) as u32);
    let scale = factorial(n1 + 1) * factorial(n2 + 1) / (factorial(n1) * factorial(n2));
    Ok(sign * total * scale)
}
