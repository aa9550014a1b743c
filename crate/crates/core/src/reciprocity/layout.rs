//! Loop layouts at a base point: keyholes around every pole in
//! counterclockwise order, plus the commutator cycles on a torus.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{pole_set, Lattice, PolePoint};
use crate::geometry::{keyhole_loop, KeyholeSpec, Path, PathSegment};
use crate::transport::FormAssignment;

/// Coordinates in which a pole loop is computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    Plane,
    /// `z = c + 1/w`; the pole sits at `w = 0`.
    Infinity {
        c: Complex64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleLoop {
    /// The pole; on a torus the representative inside the fundamental
    /// parallelogram at the base point.
    pub point: PolePoint,
    pub residues: Vec<Complex64>,
    /// Direction of the approach ray at the base point.
    pub angle: f64,
    pub chart: Chart,
    /// Base point, pole and radius in chart coordinates.
    pub keyhole: KeyholeSpec,
}

impl PoleLoop {
    /// Indices of the forms with a nonzero residue here.
    pub fn active_forms(&self) -> Vec<usize> {
        self.residues
            .iter()
            .enumerate()
            .filter(|(_, r)| r.norm() > 1e-12)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Forms and base point of a reciprocity computation. The genus follows from
/// the forms: elliptic forms live on a torus.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceScene {
    pub omega: FormAssignment,
    pub base: Complex64,
    pub lattice: Option<Lattice>,
}

impl SurfaceScene {
    pub fn new(omega: FormAssignment, base: Complex64) -> Self {
        let lattice = omega.forms().iter().find_map(|f| f.lattice()).copied();
        SurfaceScene {
            omega,
            base,
            lattice,
        }
    }

    pub fn genus(&self) -> usize {
        usize::from(self.lattice.is_some())
    }

    /// The same base point and surface with a subset of the forms.
    pub fn restricted(&self, indices: &[usize]) -> Result<SurfaceScene> {
        let forms = indices
            .iter()
            .map(|&i| {
                self.omega.forms().get(i).cloned().ok_or_else(|| {
                    Error::Precondition(format!(
                        "form index {i} out of range for {} forms",
                        self.omega.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SurfaceScene {
            omega: FormAssignment::new(forms)?,
            base: self.base,
            lattice: self.lattice,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    /// Pole loops in counterclockwise order.
    pub loops: Vec<PoleLoop>,
    /// `(alpha, beta)` with `alpha: P -> P + tau` and `beta: P -> P + 1`
    /// on a torus; then `sigma_1 ... sigma_N [alpha, beta] = 1`.
    pub cycles: Option<(Path, Path)>,
    /// Direction of the ray to infinity on the sphere.
    pub cut_angle: Option<f64>,
}

fn angle_after(theta: f64, from: f64) -> f64 {
    let mut a = theta - from;
    while a <= 0.0 {
        a += 2.0 * PI;
    }
    while a > 2.0 * PI {
        a -= 2.0 * PI;
    }
    a + from
}

/// Lays out keyhole loops at the scene base point. On the sphere the ray to
/// infinity runs through the widest angular gap between poles.
pub fn layout(scene: &SurfaceScene) -> Result<Layout> {
    layout_with_cut(scene, 0)
}

/// As [`layout`], with the ray to infinity in the gap of the given rank
/// (0 for the widest). Ignored on a torus.
pub fn layout_with_cut(scene: &SurfaceScene, gap_rank: usize) -> Result<Layout> {
    match scene.lattice {
        None => sphere_layout(scene, gap_rank),
        Some(l) => torus_layout(scene, &l),
    }
}

/// Number of distinct cut choices for [`layout_with_cut`].
pub fn cut_choices(scene: &SurfaceScene) -> Result<usize> {
    if scene.lattice.is_some() {
        return Ok(1);
    }
    let finite = pole_set(scene.omega.forms())?
        .iter()
        .filter(|e| e.point != PolePoint::Infinity)
        .count();
    Ok(finite.max(1))
}

/// Checks that each ray `P -> Q` stays clear of the other poles and returns
/// a keyhole radius for each pole.
fn keyhole_radii(base: Complex64, poles: &[Complex64]) -> Result<Vec<f64>> {
    let mut eps = Vec::with_capacity(poles.len());
    for (i, &q) in poles.iter().enumerate() {
        let d = (q - base).norm();
        if d < 1e-8 {
            return Err(Error::Precondition(format!(
                "base point {base} lies on the pole {q}"
            )));
        }
        let mut room = d;
        for (j, &r) in poles.iter().enumerate() {
            if i == j {
                continue;
            }
            let clearance = PathSegment::line(base, q).distance_to(r);
            if clearance < 1e-4 * d {
                return Err(Error::Layout(format!(
                    "ray to {q} passes within {clearance:.2e} of the pole {r}"
                )));
            }
            room = room
                .min((r - q).norm())
                .min(PathSegment::line(base, r).distance_to(q));
        }
        eps.push(0.25 * room);
    }
    Ok(eps)
}

fn sphere_layout(scene: &SurfaceScene, gap_rank: usize) -> Result<Layout> {
    let p = scene.base;
    let forms = scene.omega.forms();
    let mut finite: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    let mut inf_res = vec![Complex64::new(0.0, 0.0); forms.len()];
    for e in pole_set(forms)? {
        match e.point {
            PolePoint::Finite(z) => finite.push((z, e.residues)),
            PolePoint::Infinity => inf_res = e.residues,
        }
    }
    let raw: Vec<f64> = finite.iter().map(|(z, _)| (z - p).arg()).collect();
    let cut = if raw.is_empty() {
        0.0
    } else {
        let mut sorted = raw.clone();
        sorted.sort_by(f64::total_cmp);
        let last = sorted[sorted.len() - 1];
        let mut gaps = vec![(sorted[0] + 2.0 * PI - last, last)];
        gaps.extend(sorted.windows(2).map(|w| (w[1] - w[0], w[0])));
        gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (width, from) = gaps[gap_rank.min(gaps.len() - 1)];
        from + 0.5 * width
    };
    let angles: Vec<f64> = raw.iter().map(|&a| angle_after(a, cut)).collect();
    let mut order: Vec<usize> = (0..finite.len()).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
    let points: Vec<Complex64> = order.iter().map(|&i| finite[i].0).collect();
    let eps = keyhole_radii(p, &points)?;

    let dir = Complex64::from_polar(1.0, cut);
    let reach = 2.0 * points.iter().map(|q| (q - p).norm()).fold(1.0, f64::max);
    for &r in &points {
        let clearance = PathSegment::line(p, p + dir * reach).distance_to(r);
        if clearance < 1e-4 * (r - p).norm() {
            return Err(Error::Layout(format!(
                "the ray to infinity passes within {clearance:.2e} of {r}"
            )));
        }
    }
    let mut loops = Vec::with_capacity(points.len() + 1);
    for (k, &i) in order.iter().enumerate() {
        let (q, res) = &finite[i];
        loops.push(PoleLoop {
            point: PolePoint::Finite(*q),
            residues: res.clone(),
            angle: angles[i],
            chart: Chart::Plane,
            keyhole: KeyholeSpec::new(p, *q, eps[k])?,
        });
    }
    let c = p - dir;
    let w_base = 1.0 / (p - c);
    let w_room = points
        .iter()
        .map(|&q| (1.0 / (q - c)).norm())
        .fold(w_base.norm(), f64::min);
    loops.push(PoleLoop {
        point: PolePoint::Infinity,
        residues: inf_res,
        angle: cut + 2.0 * PI,
        chart: Chart::Infinity { c },
        keyhole: KeyholeSpec::new(w_base, Complex64::new(0.0, 0.0), 0.125 * w_room)?,
    });
    let out = Layout {
        loops,
        cycles: None,
        cut_angle: Some(cut),
    };
    check_contractible(scene, &out)?;
    Ok(out)
}

fn torus_layout(scene: &SurfaceScene, lattice: &Lattice) -> Result<Layout> {
    let p = scene.base;
    let tau = lattice.tau();
    let mut placed: Vec<(Complex64, Vec<Complex64>, f64)> = Vec::new();
    for e in pole_set(scene.omega.forms())? {
        let PolePoint::Finite(z) = e.point else {
            continue;
        };
        let (x, y) = lattice.coordinates(z - p);
        let (fx, fy) = (x - x.floor(), y - y.floor());
        let edge = 1e-6;
        if fx < edge || fx > 1.0 - edge || fy < edge || fy > 1.0 - edge {
            return Err(Error::Layout(format!(
                "pole {z} lies on the boundary of the fundamental parallelogram at {p}"
            )));
        }
        let q = p + fx + tau * fy;
        placed.push((q, e.residues, (q - p).arg()));
    }
    placed.sort_by(|a, b| a.2.total_cmp(&b.2));
    let points: Vec<Complex64> = placed.iter().map(|x| x.0).collect();
    let eps = keyhole_radii(p, &points)?;
    let loops = placed
        .into_iter()
        .zip(eps)
        .map(|((q, residues, angle), e)| {
            Ok(PoleLoop {
                point: PolePoint::Finite(q),
                residues,
                angle,
                chart: Chart::Plane,
                keyhole: KeyholeSpec::new(p, q, e)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cycles = Some((Path::line(p, p + tau), Path::line(p, p + 1.0)));
    let out = Layout {
        loops,
        cycles,
        cut_angle: None,
    };
    check_contractible(scene, &out)?;
    Ok(out)
}

/// Plane model of a pole loop: keyholes as they are, the loop around
/// infinity as a ray out to a large clockwise circle.
fn plane_loop(base: Complex64, pl: &PoleLoop, reach: f64) -> Result<Path> {
    match pl.chart {
        Chart::Plane => Ok(keyhole_loop(&pl.keyhole)),
        Chart::Infinity { .. } => {
            let dir = Complex64::from_polar(1.0, pl.angle);
            let out = Path::line(base, base + dir * reach);
            let circle = Path::segment(PathSegment::Arc {
                center: base,
                radius: reach,
                start_angle: pl.angle,
                end_angle: pl.angle - 2.0 * PI,
            });
            out.compose(&circle)?.compose(&out.reversed())
        }
    }
}

/// The composed loop must wind zero times around every pole, and every
/// keyhole once around its own pole only.
fn check_contractible(scene: &SurfaceScene, layout: &Layout) -> Result<()> {
    let p = scene.base;
    let finite: Vec<Complex64> = layout
        .loops
        .iter()
        .filter_map(|l| match (l.chart, l.point) {
            (Chart::Plane, PolePoint::Finite(z)) => Some(z),
            _ => None,
        })
        .collect();
    let reach = 2.0 * finite.iter().map(|q| (q - p).norm()).fold(1.0, f64::max);
    let mut total = Path::constant(p);
    for pl in &layout.loops {
        let lp = plane_loop(p, pl, reach)?;
        if let (Chart::Plane, PolePoint::Finite(own)) = (pl.chart, pl.point) {
            for &q in &finite {
                let expected = i64::from(q == own);
                if lp.winding_number(q)? != expected {
                    return Err(Error::Layout(format!(
                        "keyhole around {own} does not isolate it from {q}"
                    )));
                }
            }
        }
        total = total.compose(&lp)?;
    }
    if let Some((alpha, beta)) = &layout.cycles {
        let corner = alpha.end() + (beta.end() - beta.start());
        let rect = Path::polyline(&[p, alpha.end(), corner, beta.end(), p])?;
        total = total.compose(&rect)?;
    }
    for &q in &finite {
        let w = total.winding_number(q)?;
        if w != 0 {
            return Err(Error::Layout(format!(
                "composed loop winds {w} times around {q}"
            )));
        }
    }
    Ok(())
}

/// The forms in the chart a loop is computed in.
pub fn chart_forms(omega: &FormAssignment, chart: Chart) -> Result<FormAssignment> {
    match chart {
        Chart::Plane => Ok(omega.clone()),
        Chart::Infinity { c } => omega.at_infinity_chart(c),
    }
}
