//! Lattices `Z + tau Z`, the Weierstrass zeta function and third-kind forms
//! `(zeta(z - a) - zeta(z - b)) dz` on the torus.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points closer than this to a lattice point are treated as lying on it.
const LATTICE_EPS: f64 = 1e-14;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cot(z: Complex64) -> Complex64 {
    z.cos() / z.sin()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    tau: Complex64,
    eta1: Complex64,
    eta2: Complex64,
}

impl Lattice {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidLattice(tau.im));
        }
        let q2 = (Complex64::i() * 2.0 * PI * tau).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut qn = Complex64::new(1.0, 0.0);
        for n in 1..10_000u64 {
            qn *= q2;
            let term = qn * sigma1(n) as f64;
            sum += term;
            if term.norm() < 1e-18 * (1.0 + sum.norm()) {
                break;
            }
        }
        let eta1 = (1.0 - 24.0 * sum) * (PI * PI / 3.0);
        let eta2 = eta1 * tau - Complex64::i() * 2.0 * PI;
        Ok(Lattice { tau, eta1, eta2 })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// `zeta(z + 1) - zeta(z)`.
    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }

    /// `zeta(z + tau) - zeta(z)`.
    pub fn eta2(&self) -> Complex64 {
        self.eta2
    }

    /// Real coordinates `(x, y)` with `z = x + y tau`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let y = z.im / self.tau.im;
        (z.re - y * self.tau.re, y)
    }

    /// Representative of `z` in the half-open parallelogram `[0,1) + [0,1) tau`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (x, y) = self.coordinates(z);
        let (mut fx, mut fy) = (x - x.floor(), y - y.floor());
        if fx >= 1.0 - 1e-13 {
            fx = 0.0;
        }
        if fy >= 1.0 - 1e-13 {
            fy = 0.0;
        }
        c(fx, 0.0) + self.tau * fy
    }

    /// Distance from `z - w` to the nearest lattice point.
    pub fn distance_mod(&self, z: Complex64, w: Complex64) -> f64 {
        let d = z - w;
        let (x, y) = self.coordinates(d);
        let (m0, n0) = (x.round() as i64, y.round() as i64);
        let mut best = f64::INFINITY;
        for dm in -1..=1 {
            for dn in -1..=1 {
                let p = c((m0 + dm) as f64, 0.0) + self.tau * (n0 + dn) as f64;
                best = best.min((d - p).norm());
            }
        }
        best
    }

    pub fn congruent(&self, z: Complex64, w: Complex64, tol: f64) -> bool {
        self.distance_mod(z, w) < tol
    }

    /// Weierstrass zeta function of the lattice.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let n = (z.im / self.tau.im).round();
        let shifted = z - self.tau * n;
        let m = shifted.re.round();
        let w = shifted - m;
        if w.norm() < LATTICE_EPS {
            return Err(Error::OnLattice(z));
        }
        Ok(self.zeta_reduced(w) + self.eta1 * m + self.eta2 * n)
    }

    /// `zeta(s) - 1/s` for `s` near zero, without cancellation.
    pub fn zeta_minus_pole(&self, s: Complex64) -> Complex64 {
        let x = PI * s;
        let laurent = if x.norm() < 1e-2 {
            let x2 = x * x;
            -x * (1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 / 4725.0))) * PI
        } else {
            PI * cot(x) - 1.0 / s
        };
        self.eta1 * s + laurent + 4.0 * PI * self.theta_sum(s)
    }

    fn theta_sum(&self, w: Complex64) -> Complex64 {
        let q2 = (Complex64::i() * 2.0 * PI * self.tau).exp();
        let s = (2.0 * PI * w).sin();
        let cs = (2.0 * PI * w).cos();
        let mut sum = c(0.0, 0.0);
        let mut qn = c(1.0, 0.0);
        for _ in 0..10_000 {
            qn *= q2;
            let term = qn * s / (1.0 - 2.0 * qn * cs + qn * qn);
            sum += term;
            if term.norm() < 1e-18 * (1.0 + sum.norm()) {
                break;
            }
        }
        sum
    }

    fn zeta_reduced(&self, w: Complex64) -> Complex64 {
        self.eta1 * w + PI * cot(PI * w) + 4.0 * PI * self.theta_sum(w)
    }
}

fn sigma1(n: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

/// Reference zeta by row-wise summation of the lattice sum
/// `1/z + sum' (1/(z-w) + 1/w + z/w^2)`, each row closed in cotangents.
pub fn zeta_oracle(lattice: &Lattice, z: Complex64) -> Result<Complex64> {
    let tau = lattice.tau();
    if lattice.distance_mod(z, c(0.0, 0.0)) < LATTICE_EPS {
        return Err(Error::OnLattice(z));
    }
    let mut total = PI * cot(PI * z) + z * (PI * PI / 3.0);
    for n in 1..100_000i64 {
        let mut row = c(0.0, 0.0);
        for sign in [1.0, -1.0] {
            let nt = tau * (sign * n as f64);
            let sn = (PI * nt).sin();
            row += PI * cot(PI * (z - nt)) + PI * cot(PI * nt) + z * PI * PI / (sn * sn);
        }
        total += row;
        if row.norm() < 1e-17 * (1.0 + total.norm()) && n > 2 {
            break;
        }
    }
    Ok(total)
}

/// `(zeta(z - a) - zeta(z - b)) dz` with residue `+1` at `a` and `-1` at `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticForm {
    lattice: Lattice,
    a: Complex64,
    b: Complex64,
}

impl EllipticForm {
    /// `a` and `b` are stored reduced into the fundamental parallelogram.
    pub fn new(lattice: Lattice, a: Complex64, b: Complex64) -> Result<Self> {
        if lattice.congruent(a, b, 1e-9) {
            return Err(Error::InvalidForm(
                "elliptic form needs a and b distinct modulo the lattice".into(),
            ));
        }
        Ok(EllipticForm {
            lattice,
            a: lattice.reduce(a),
            b: lattice.reduce(b),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn coefficient(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.lattice.zeta(z - self.a)? - self.lattice.zeta(z - self.b)?)
    }

    pub fn residue_at(&self, p: Complex64) -> Complex64 {
        let mut r = c(0.0, 0.0);
        if self.lattice.congruent(p, self.a, 1e-9) {
            r += 1.0;
        }
        if self.lattice.congruent(p, self.b, 1e-9) {
            r -= 1.0;
        }
        r
    }
}
