//! Adaptive panel integrator for `dT = T M(t) dt` over `t in [0, 1]` in the
//! truncated free algebra.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::spectral::{rule, NODES};
use crate::error::{Error, Result};
use crate::ncseries::WordLayout;

/// Panel budget per integration.
pub const MAX_PANELS: usize = 50_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Right-hand side `M(t)` of the transport equation.
pub(crate) trait Drive: Sync {
    /// Whether `M(t)` only has degree-one terms.
    fn letters_only(&self) -> bool {
        true
    }

    /// Writes `M(t)` into the dense buffer `out` (zeroed by the caller).
    /// `tc = 1 - t` is passed separately with full relative precision near
    /// `t = 1`. Letter drives only need to fill the degree-one slots.
    fn eval(&self, t: f64, tc: f64, out: &mut [Complex64]);
}

/// Transport across one panel `[a, b]`, started from the unit.
fn panel(drive: &dyn Drive, layout: &WordLayout, a: f64, b: f64) -> Vec<Complex64> {
    let r = rule();
    let h = 0.5 * (b - a);
    let total = layout.total();
    let n = layout.n;
    let letters_only = drive.letters_only();
    let mut m = vec![ZERO; NODES * total];
    for l in 0..NODES {
        let t = a + h * (r.x[l] + 1.0);
        let tc = (1.0 - b) + h * (1.0 - r.x[l]);
        drive.eval(t, tc, &mut m[l * total..(l + 1) * total]);
    }
    let mut tn = vec![ZERO; NODES * total];
    for l in 0..NODES {
        tn[l * total] = Complex64::new(1.0, 0.0);
    }
    let mut end = layout.unit();
    let mut rhs = vec![ZERO; NODES * layout.count(layout.depth)];
    for k in 1..=layout.depth {
        let ok = layout.offset(k);
        let ck = layout.count(k);
        for l in 0..NODES {
            let row = &mut rhs[l * ck..(l + 1) * ck];
            row.iter_mut().for_each(|x| *x = ZERO);
            let tl = &tn[l * total..(l + 1) * total];
            let ml = &m[l * total..(l + 1) * total];
            if letters_only {
                let prev = layout.offset(k - 1);
                for cu in 0..layout.count(k - 1) {
                    let tu = tl[prev + cu];
                    if tu == ZERO {
                        continue;
                    }
                    for i in 0..n {
                        row[cu * n + i] = tu * ml[1 + i];
                    }
                }
            } else {
                for j in 0..k {
                    let (oj, cj) = (layout.offset(j), layout.count(j));
                    let (om, cm) = (layout.offset(k - j), layout.count(k - j));
                    for cu in 0..cj {
                        let tu = tl[oj + cu];
                        if tu == ZERO {
                            continue;
                        }
                        let base = cu * cm;
                        for cv in 0..cm {
                            row[base + cv] += tu * ml[om + cv];
                        }
                    }
                }
            }
        }
        for j in 0..NODES {
            let dst = j * total + ok;
            for l in 0..NODES {
                let sjl = r.s[j][l] * h;
                let row = &rhs[l * ck..(l + 1) * ck];
                for c in 0..ck {
                    tn[dst + c] += row[c] * sjl;
                }
            }
        }
        for l in 0..NODES {
            let wl = r.w[l] * h;
            let row = &rhs[l * ck..(l + 1) * ck];
            for c in 0..ck {
                end[ok + c] += row[c] * wl;
            }
        }
    }
    end
}

struct Panel {
    a: f64,
    b: f64,
    /// Refined value `left * right`.
    value: Vec<Complex64>,
    left: Vec<Complex64>,
    right: Vec<Complex64>,
    err: f64,
    err_by_degree: Vec<f64>,
    converged: bool,
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn build_panel(
    drive: &dyn Drive,
    layout: &WordLayout,
    a: f64,
    b: f64,
    coarse: Vec<Complex64>,
) -> Panel {
    let m = 0.5 * (a + b);
    let left = panel(drive, layout, a, m);
    let right = panel(drive, layout, m, b);
    let value = layout.mul(&left, &right);
    let err_by_degree: Vec<f64> = (0..=layout.depth)
        .map(|k| {
            let o = layout.offset(k);
            (0..layout.count(k))
                .map(|c| (value[o + c] - coarse[o + c]).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let err = err_by_degree.iter().copied().fold(0.0, f64::max);
    let noise = 1e-14 * (1.0 + max_abs(&value));
    let converged = err <= noise || (b - a) < 1e-13;
    Panel {
        a,
        b,
        value,
        left,
        right,
        err,
        err_by_degree,
        converged,
    }
}

struct HeapItem(f64, usize);

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Result of one adaptive integration.
pub(crate) struct Integrated {
    pub value: Vec<Complex64>,
    pub err_by_degree: Vec<f64>,
    pub panels: usize,
}

/// Integrates `dT = T M dt` on `[0, 1]` until the summed panel error
/// estimates drop below `tol`.
pub(crate) fn integrate(drive: &dyn Drive, layout: &WordLayout, tol: f64) -> Result<Integrated> {
    const INITIAL: usize = 2;
    let mut panels: Vec<Option<Panel>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for i in 0..INITIAL {
        let (a, b) = (i as f64 / INITIAL as f64, (i + 1) as f64 / INITIAL as f64);
        let coarse = panel(drive, layout, a, b);
        let p = build_panel(drive, layout, a, b, coarse);
        total_err += p.err;
        if !p.converged {
            heap.push(HeapItem(p.err, panels.len()));
        }
        panels.push(Some(p));
    }
    let mut live = INITIAL;
    while total_err > tol {
        let Some(HeapItem(_, idx)) = heap.pop() else {
            break;
        };
        if live >= MAX_PANELS {
            return Err(Error::ToleranceNotAchieved {
                tol,
                achieved: total_err,
                panels: live,
            });
        }
        let p = panels[idx].take().expect("live panel");
        total_err -= p.err;
        let m = 0.5 * (p.a + p.b);
        for (a, b, coarse) in [(p.a, m, p.left), (m, p.b, p.right)] {
            let child = build_panel(drive, layout, a, b, coarse);
            total_err += child.err;
            if !child.converged {
                heap.push(HeapItem(child.err, panels.len()));
            }
            panels.push(Some(child));
        }
        live += 1;
        if heap.is_empty() {
            total_err = panels.iter().flatten().map(|p| p.err).sum();
        }
    }
    let mut done: Vec<Panel> = panels.into_iter().flatten().collect();
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut err_by_degree = vec![0.0; layout.depth + 1];
    let mut value = layout.unit();
    for p in &done {
        value = layout.mul(&value, &p.value);
        for (e, pe) in err_by_degree.iter_mut().zip(&p.err_by_degree) {
            *e += pe;
        }
    }
    Ok(Integrated {
        value,
        err_by_degree,
        panels: done.len(),
    })
}
