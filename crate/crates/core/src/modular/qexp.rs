//! Truncated q-expansions `sum_{n <= M} a_n q^n`, `q = exp(2 pi i z)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A level-one modular form of even weight `k` (so `f(-1/z) = z^k f(z)`),
/// given by its q-expansion up to the cutoff `M`. Weight 0 is reserved for
/// constants, which is how `dz` enters as a letter.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<Complex64>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if weight % 2 == 1 {
            return Err(Error::QExpansion(format!(
                "weight must be even, got {weight}"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::QExpansion("no coefficients".into()));
        }
        if weight == 0 && coeffs[1..].iter().any(|c| c.norm() != 0.0) {
            return Err(Error::QExpansion("weight 0 forms must be constant".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::QExpansion("non-finite coefficient".into()));
        }
        Ok(QExpansion { weight, coeffs })
    }

    /// The constant 1 of weight 0; as a letter it stands for `dz`.
    pub fn dz() -> Self {
        QExpansion {
            weight: 0,
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a_0 = 0`.
    pub fn is_cusp(&self) -> bool {
        self.coeffs[0].norm() == 0.0
    }

    pub fn scaled(&self, c: Complex64) -> QExpansion {
        QExpansion {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `f(z)` by summing the truncated series.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let q = (Complex64::i() * 2.0 * PI * z).exp();
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * q + a)
    }

    /// `f(z) - a_0`, the part that decays toward the cusp.
    pub fn eval_decaying(&self, z: Complex64) -> Complex64 {
        self.eval(z) - self.coeffs[0]
    }

    /// Rough size of the first omitted terms at height `y`.
    pub fn tail_bound(&self, y: f64) -> f64 {
        let m = self.cutoff();
        if m == 0 {
            return 0.0;
        }
        let last = self.coeffs[m.saturating_sub(1)..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let r = (-2.0 * PI * y).exp();
        10.0 * last * r.powi(m as i32 + 1) / (1.0 - r)
    }

    /// Bound on `sum_{n >= 1} |a_n| exp(-2 pi n y)`.
    pub fn decay_bound(&self, y: f64) -> f64 {
        let r = (-2.0 * PI * y).exp();
        let mut rn = 1.0;
        let mut s = 0.0;
        for a in &self.coeffs[1..] {
            rn *= r;
            s += a.norm() * rn;
        }
        s + self.tail_bound(y)
    }

    /// Smallest cutoff `M` with `|a_M| exp(-2 pi M y_min) < 1e-16`, judged
    /// from the coefficients present.
    pub fn required_cutoff(&self, y_min: f64) -> Option<usize> {
        (1..=self.cutoff()).find(|&m| {
            self.coeffs[m].norm() * (-2.0 * PI * m as f64 * y_min).exp() < 1e-16
                && self.coeffs[m..]
                    .iter()
                    .enumerate()
                    .all(|(j, a)| a.norm() * (-2.0 * PI * (m + j) as f64 * y_min).exp() < 1e-16)
        })
    }

    /// Parses `weight k cutoff M` followed by `n a_n` or `n re im` lines.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::QExpansion("empty file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || {
            Error::QExpansion(format!(
                "line {hl}: expected `weight k cutoff M`, got `{header}`"
            ))
        };
        if h.len() != 4 || h[0] != "weight" || h[2] != "cutoff" {
            return Err(bad_header());
        }
        let weight: u32 = h[1].parse().map_err(|_| bad_header())?;
        let cutoff: usize = h[3].parse().map_err(|_| bad_header())?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        for (ln, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            let bad = || {
                Error::QExpansion(format!(
                    "line {ln}: expected `n a_n` or `n re im`, got `{l}`"
                ))
            };
            if f.len() != 2 && f.len() != 3 {
                return Err(bad());
            }
            let n: usize = f[0].parse().map_err(|_| bad())?;
            let re: f64 = f[1].parse().map_err(|_| bad())?;
            let im: f64 = if f.len() == 3 {
                f[2].parse().map_err(|_| bad())?
            } else {
                0.0
            };
            if n > cutoff {
                return Err(Error::QExpansion(format!(
                    "line {ln}: index {n} exceeds the cutoff {cutoff}"
                )));
            }
            coeffs[n] = Complex64::new(re, im);
        }
        QExpansion::new(weight, coeffs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        QExpansion::parse(&text)
    }

    /// Text form accepted by [`QExpansion::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("weight {} cutoff {}\n", self.weight, self.cutoff());
        for (n, a) in self.coeffs.iter().enumerate() {
            if a.im == 0.0 {
                let _ = writeln!(out, "{n} {:e}", a.re);
            } else {
                let _ = writeln!(out, "{n} {:e} {:e}", a.re, a.im);
            }
        }
        out
    }
}

fn from_integers(weight: u32, a: &[i128]) -> QExpansion {
    QExpansion {
        weight,
        coeffs: a.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect(),
    }
}

/// `sigma_k(n) = sum_{d | n} d^k`.
pub fn divisor_sigma(k: u32, n: u64) -> i128 {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| (d as i128).pow(k))
        .sum()
}

/// The discriminant `q prod (1 - q^n)^24`, with `tau(1) = 1`.
pub fn delta_qexp(cutoff: usize) -> Result<QExpansion> {
    if cutoff < 2 {
        return Err(Error::QExpansion(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    // prod (1 - q^n) up to q^(cutoff-1), then its 24th power
    let m = cutoff;
    let mut eta = vec![0i128; m];
    eta[0] = 1;
    for n in 1..m {
        for j in (n..m).rev() {
            eta[j] -= eta[j - n];
        }
    }
    let mut p = vec![0i128; m];
    p[0] = 1;
    for _ in 0..24 {
        let mut next = vec![0i128; m];
        for (i, &a) in p.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, &b) in eta.iter().enumerate().take(m - i) {
                next[i + j] += a * b;
            }
        }
        p = next;
    }
    let mut coeffs = vec![0i128; m + 1];
    coeffs[1..].copy_from_slice(&p);
    Ok(from_integers(12, &coeffs))
}

/// Normalized Eisenstein series `E_4 = 1 + 240 sum sigma_3(n) q^n` and
/// `E_6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein_qexp(weight: u32, cutoff: usize) -> Result<QExpansion> {
    let (c, k) = match weight {
        4 => (240, 3),
        6 => (-504, 5),
        _ => {
            return Err(Error::QExpansion(format!(
                "Eisenstein series of weight {weight} not available"
            )))
        }
    };
    let coeffs: Vec<i128> = (0..=cutoff as u64)
        .map(|n| if n == 0 { 1 } else { c * divisor_sigma(k, n) })
        .collect();
    Ok(from_integers(weight, &coeffs))
}
