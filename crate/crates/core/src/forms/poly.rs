//! Dense complex polynomials, constant term first.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl Poly {
    /// Trailing zero coefficients are dropped.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    /// `z - r`.
    pub fn linear(r: Complex64) -> Self {
        Poly::new(vec![-r, Complex64::new(1.0, 0.0)])
    }

    /// `prod (z - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots
            .iter()
            .fold(Poly::one(), |p, &r| p.mul(&Poly::linear(r)))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has no degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(ZERO)
                        + other.coeffs.get(k).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }

    /// Multiplication by `z^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// `p(z + c)`.
    pub fn taylor_shift(&self, c: Complex64) -> Poly {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = a[j + 1];
                a[j] += c * next;
            }
        }
        Poly::new(a)
    }

    /// `z^deg p(1/z)`.
    pub fn reversed(&self) -> Poly {
        Poly::new(self.coeffs.iter().rev().copied().collect())
    }

    /// All roots with multiplicity, found by Aberth iteration and
    /// clustered so that numerically split multiple roots are merged.
    pub fn roots(&self) -> Vec<Root> {
        let raw = self.raw_roots();
        let scale = 1f64.max(raw.iter().map(|r| r.norm()).fold(0.0, f64::max));
        let tol = 1e-5 * scale;
        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        for r in raw {
            match clusters
                .iter_mut()
                .find(|(c, m)| (*c / *m as f64 - r).norm() < tol)
            {
                Some((sum, m)) => {
                    *sum += r;
                    *m += 1;
                }
                None => clusters.push((r, 1)),
            }
        }
        let mut roots: Vec<Root> = clusters
            .into_iter()
            .map(|(sum, m)| Root {
                value: sum / m as f64,
                multiplicity: m,
            })
            .collect();
        // a root of multiplicity m is a simple root of the (m-1)-th derivative
        for root in roots.iter_mut() {
            let mut p = self.clone();
            for _ in 1..root.multiplicity {
                p = p.derivative();
            }
            root.value = p.polish(root.value);
        }
        roots
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        let d = self.derivative();
        for _ in 0..3 {
            let dv = d.eval(z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = self.eval(z) / dv;
            if !step.is_finite() {
                break;
            }
            z -= step;
        }
        z
    }

    fn raw_roots(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else {
            return Vec::new();
        };
        if n == 0 {
            return Vec::new();
        }
        let lead = self.lead();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let p = Poly { coeffs: monic };
        let dp = p.derivative();
        let radius = 1.0 + p.coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                Complex64::from_polar(
                    0.5 * radius,
                    2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
                )
            })
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let pv = p.eval(z[i]);
                if pv == ZERO {
                    continue;
                }
                let ratio = pv / dp.eval(z[i]);
                let sum: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| 1.0 / (z[i] - z[j]))
                    .sum();
                let step = ratio / (1.0 - ratio * sum);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / 1f64.max(z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        z
    }
}
