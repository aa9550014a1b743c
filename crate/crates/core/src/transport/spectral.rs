//! Gauss-Legendre nodes and the spectral integration matrix on `[-1, 1]`.

use std::sync::OnceLock;

pub(crate) const NODES: usize = 16;

pub(crate) struct SpectralRule {
    /// Nodes on `[-1, 1]`, ascending.
    pub x: [f64; NODES],
    pub w: [f64; NODES],
    /// `s[j][l]`: weight of the value at node `l` in `int_{-1}^{x_j}`.
    pub s: [[f64; NODES]; NODES],
}

/// `P_0 .. P_{n}` at `x`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

/// Gauss-Legendre nodes and weights by Newton iteration on `P_n`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let p = legendre_all(n, z);
            dp = n as f64 * (z * p[n] - p[n - 1]) / (z * z - 1.0);
            let dz = p[n] / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let p = legendre_all(n, z);
        dp = if dp == 0.0 {
            1.0
        } else {
            n as f64 * (z * p[n] - p[n - 1]) / (z * z - 1.0)
        };
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

pub(crate) fn rule() -> &'static SpectralRule {
    static RULE: OnceLock<SpectralRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (xv, wv) = gauss_legendre(NODES);
        let mut x = [0.0; NODES];
        let mut w = [0.0; NODES];
        x.copy_from_slice(&xv);
        w.copy_from_slice(&wv);
        let pl: Vec<Vec<f64>> = x.iter().map(|&xl| legendre_all(NODES, xl)).collect();
        let mut s = [[0.0; NODES]; NODES];
        for j in 0..NODES {
            let pj = &pl[j];
            for l in 0..NODES {
                let mut acc = 0.5 * (x[j] + 1.0);
                for k in 1..NODES {
                    acc += 0.5 * pl[l][k] * (pj[k + 1] - pj[k - 1]);
                }
                s[j][l] = w[l] * acc;
            }
        }
        SpectralRule { x, w, s }
    })
}
