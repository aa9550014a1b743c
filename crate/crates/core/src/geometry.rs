//! Piecewise-smooth paths and loops in the complex plane: segments, circle
//! loops, keyhole loops around a pole and winding numbers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for endpoint chaining.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Minimum distance of a closed path to a point whose winding number is asked for.
pub const WINDING_MIN_DISTANCE: f64 = 1e-10;

fn endpoints_match(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= ENDPOINT_TOL * 1f64.max(a.norm()).max(b.norm())
}

/// A smooth parametrization `p: [0, 1] -> C`.
#[derive(Clone, Debug, PartialEq)]
pub enum PathSegment {
    Line {
        start: Complex64,
        end: Complex64,
    },
    /// `center + radius * exp(i (start_angle + t (end_angle - start_angle)))`.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    /// Cubic Bezier curve with control points `p0..p3`.
    Bezier {
        p0: Complex64,
        p1: Complex64,
        p2: Complex64,
        p3: Complex64,
    },
}

impl PathSegment {
    pub fn line(start: Complex64, end: Complex64) -> Self {
        PathSegment::Line { start, end }
    }

    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            PathSegment::Line { start, end } => start + (end - start) * t,
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                center + Complex64::from_polar(radius, start_angle + t * (end_angle - start_angle))
            }
            PathSegment::Bezier { p0, p1, p2, p3 } => {
                let s = 1.0 - t;
                p0 * (s * s * s)
                    + p1 * (3.0 * s * s * t)
                    + p2 * (3.0 * s * t * t)
                    + p3 * (t * t * t)
            }
        }
    }

    /// `point(t)` with `tc = 1 - t` given separately, evaluated from the
    /// nearer endpoint so that points close to either end keep full
    /// relative precision.
    pub fn point_split(&self, t: f64, tc: f64) -> Complex64 {
        match *self {
            PathSegment::Line { start, end } if t > 0.5 => end - (end - start) * tc,
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } if t > 0.5 => {
                center + Complex64::from_polar(radius, end_angle - tc * (end_angle - start_angle))
            }
            _ => self.point(t),
        }
    }

    pub fn derivative(&self, t: f64) -> Complex64 {
        match *self {
            PathSegment::Line { start, end } => end - start,
            PathSegment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => {
                let dtheta = end_angle - start_angle;
                let theta = start_angle + t * dtheta;
                Complex64::i() * Complex64::from_polar(radius, theta) * dtheta
            }
            PathSegment::Bezier { p0, p1, p2, p3 } => {
                let s = 1.0 - t;
                (p1 - p0) * (3.0 * s * s) + (p2 - p1) * (6.0 * s * t) + (p3 - p2) * (3.0 * t * t)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            PathSegment::Line { end, .. } => end,
            PathSegment::Bezier { p3, .. } => p3,
            _ => self.point(1.0),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Line { start, end } => PathSegment::Line {
                start: end,
                end: start,
            },
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => PathSegment::Arc {
                center,
                radius,
                start_angle: end_angle,
                end_angle: start_angle,
            },
            PathSegment::Bezier { p0, p1, p2, p3 } => PathSegment::Bezier {
                p0: p3,
                p1: p2,
                p2: p1,
                p3: p0,
            },
        }
    }

    /// Corners `(min, max)` of an axis-aligned box containing the segment.
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let pts: Vec<Complex64> = match *self {
            PathSegment::Line { start, end } => vec![start, end],
            PathSegment::Arc { center, radius, .. } => {
                vec![
                    center - Complex64::new(radius, radius),
                    center + Complex64::new(radius, radius),
                ]
            }
            PathSegment::Bezier { p0, p1, p2, p3 } => vec![p0, p1, p2, p3],
        };
        let lo = pts
            .iter()
            .fold(Complex64::new(f64::INFINITY, f64::INFINITY), |m, p| {
                Complex64::new(m.re.min(p.re), m.im.min(p.im))
            });
        let hi = pts.iter().fold(
            Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            |m, p| Complex64::new(m.re.max(p.re), m.im.max(p.im)),
        );
        (lo, hi)
    }

    /// Distance from `z` to the segment. Exact for lines and arcs, sampled
    /// and refined for Bezier curves.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            PathSegment::Line { start, end } => {
                let d = end - start;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (z - start).norm();
                }
                let t = ((z - start) * d.conj()).re / len2;
                (z - self.point(t.clamp(0.0, 1.0))).norm()
            }
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let w = z - center;
                let mut best = (z - self.start()).norm().min((z - self.end()).norm());
                if w.norm() > 0.0 {
                    let (lo, hi) = if start_angle <= end_angle {
                        (start_angle, end_angle)
                    } else {
                        (end_angle, start_angle)
                    };
                    let phi = w.arg();
                    let k = ((lo - phi) / (2.0 * PI)).ceil();
                    let candidate = phi + 2.0 * PI * k;
                    if candidate <= hi {
                        best = best.min((w.norm() - radius).abs());
                    }
                } else {
                    best = radius;
                }
                best
            }
            PathSegment::Bezier { .. } => {
                let samples = 256;
                let mut best_t = 0.0;
                let mut best = f64::INFINITY;
                for k in 0..=samples {
                    let t = k as f64 / samples as f64;
                    let d = (self.point(t) - z).norm();
                    if d < best {
                        best = d;
                        best_t = t;
                    }
                }
                let (mut lo, mut hi) = (
                    (best_t - 1.0 / samples as f64).max(0.0),
                    (best_t + 1.0 / samples as f64).min(1.0),
                );
                for _ in 0..60 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if (self.point(m1) - z).norm() < (self.point(m2) - z).norm() {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                best.min((self.point(0.5 * (lo + hi)) - z).norm())
            }
        }
    }

    /// Continuous change of `arg(p(t) - z0)` over the segment.
    fn arg_increment(&self, z0: Complex64) -> f64 {
        fn rec(
            seg: &PathSegment,
            z0: Complex64,
            t0: f64,
            t1: f64,
            p0: Complex64,
            p1: Complex64,
            depth: u32,
        ) -> f64 {
            let chord = (p1 - p0).norm();
            let near = (p0 - z0).norm().min((p1 - z0).norm());
            if depth > 40 || chord < 0.25 * near {
                let mid = seg.point(0.5 * (t0 + t1));
                if depth > 40 || (mid - 0.5 * (p0 + p1)).norm() < 0.25 * near {
                    return ((p1 - z0) / (p0 - z0)).arg();
                }
            }
            let tm = 0.5 * (t0 + t1);
            let pm = seg.point(tm);
            rec(seg, z0, t0, tm, p0, pm, depth + 1) + rec(seg, z0, tm, t1, pm, p1, depth + 1)
        }
        let n = 16;
        let mut total = 0.0;
        let mut prev = self.point(0.0);
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let cur = self.point(t);
            total += rec(self, z0, (k - 1) as f64 / n as f64, t, prev, cur, 0);
            prev = cur;
        }
        total
    }
}

/// An ordered chain of segments with matching endpoints. A path with no
/// segments is the constant path at `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    start: Complex64,
    segments: Vec<PathSegment>,
}

impl Path {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self> {
        let start = segments
            .first()
            .map(PathSegment::start)
            .ok_or_else(|| Error::InvalidPath("a path needs at least one segment".into()))?;
        for pair in segments.windows(2) {
            if !endpoints_match(pair[0].end(), pair[1].start()) {
                return Err(Error::EndpointMismatch(pair[0].end(), pair[1].start()));
            }
        }
        Ok(Path { start, segments })
    }

    pub fn constant(point: Complex64) -> Self {
        Path {
            start: point,
            segments: Vec::new(),
        }
    }

    pub fn segment(seg: PathSegment) -> Self {
        Path {
            start: seg.start(),
            segments: vec![seg],
        }
    }

    pub fn line(a: Complex64, b: Complex64) -> Self {
        Self::segment(PathSegment::line(a, b))
    }

    /// Polyline through the given vertices.
    pub fn polyline(points: &[Complex64]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath("a polyline needs two points".into()));
        }
        Path::new(
            points
                .windows(2)
                .map(|p| PathSegment::line(p[0], p[1]))
                .collect(),
        )
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn start(&self) -> Complex64 {
        self.start
    }

    pub fn end(&self) -> Complex64 {
        self.segments
            .last()
            .map(PathSegment::end)
            .unwrap_or(self.start)
    }

    pub fn is_closed(&self) -> bool {
        endpoints_match(self.start(), self.end())
    }

    pub fn min_distance_to(&self, z: Complex64) -> f64 {
        if self.segments.is_empty() {
            return (self.start - z).norm();
        }
        self.segments
            .iter()
            .map(|s| s.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Concatenation: first `self`, then `other`.
    pub fn compose(&self, other: &Path) -> Result<Path> {
        if !endpoints_match(self.end(), other.start()) {
            return Err(Error::EndpointMismatch(self.end(), other.start()));
        }
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Ok(Path {
            start: self.start,
            segments,
        })
    }

    pub fn reversed(&self) -> Path {
        Path {
            start: self.end(),
            segments: self
                .segments
                .iter()
                .rev()
                .map(PathSegment::reversed)
                .collect(),
        }
    }

    /// `(1 / 2 pi i) \oint dz / (z - z0)`, rounded to the nearest integer.
    pub fn winding_number(&self, z0: Complex64) -> Result<i64> {
        if !self.is_closed() {
            return Err(Error::InvalidPath("winding number of an open path".into()));
        }
        let d = self.min_distance_to(z0);
        if d < WINDING_MIN_DISTANCE {
            return Err(Error::PoleProximity {
                point: z0,
                distance: d,
            });
        }
        let total: f64 = self.segments.iter().map(|s| s.arg_increment(z0)).sum();
        Ok((total / (2.0 * PI)).round() as i64)
    }
}

/// Closed counterclockwise circle starting and ending at
/// `center + radius * exp(i start_angle)`.
pub fn circle_loop(center: Complex64, radius: f64, start_angle: f64) -> Result<Path> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidPath(format!(
            "circle radius must be positive, got {radius}"
        )));
    }
    Ok(Path::segment(PathSegment::Arc {
        center,
        radius,
        start_angle,
        end_angle: start_angle + 2.0 * PI,
    }))
}

/// Base point, pole and circle radius of a keyhole loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyholeSpec {
    pub base: Complex64,
    pub pole: Complex64,
    pub epsilon: f64,
}

impl KeyholeSpec {
    pub fn new(base: Complex64, pole: Complex64, epsilon: f64) -> Result<Self> {
        let dist = (base - pole).norm();
        if !(epsilon > 0.0) || epsilon >= dist {
            return Err(Error::InvalidPath(format!(
                "keyhole radius {epsilon} must lie in (0, |P - Q| = {dist})"
            )));
        }
        Ok(KeyholeSpec {
            base,
            pole,
            epsilon,
        })
    }

    /// The point where the approach ray meets the circle.
    pub fn circle_start(&self) -> Complex64 {
        let dir = (self.base - self.pole) / (self.base - self.pole).norm();
        self.pole + dir * self.epsilon
    }

    /// Straight approach `P -> Q + eps (P - Q)/|P - Q|`.
    pub fn approach(&self) -> Path {
        Path::line(self.base, self.circle_start())
    }

    /// Full counterclockwise circle of radius `eps` around `Q`.
    pub fn circle(&self) -> Path {
        let angle = (self.base - self.pole).arg();
        Path::segment(PathSegment::Arc {
            center: self.pole,
            radius: self.epsilon,
            start_angle: angle,
            end_angle: angle + 2.0 * PI,
        })
    }
}

/// Approach ray, counterclockwise circle of radius `eps` around the pole, and
/// the return along the ray.
pub fn keyhole_loop(spec: &KeyholeSpec) -> Path {
    let approach = spec.approach();
    let back = approach.reversed();
    Path {
        start: spec.base,
        segments: vec![
            approach.segments[0].clone(),
            spec.circle().segments[0].clone(),
            back.segments[0].clone(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn compose_and_reverse() {
        let p = Path::line(c(0.0, 0.0), c(1.0, 0.0));
        let q = Path::line(c(1.0, 0.0), c(1.0, 1.0));
        let pq = p.compose(&q).unwrap();
        assert_eq!(pq.segments().len(), 2);
        assert!(!pq.is_closed());
        assert!(pq.compose(&p).is_err());
        assert!(p.compose(&p.reversed()).unwrap().is_closed());
        assert_eq!(p.reversed().start(), c(1.0, 0.0));
        assert_eq!(pq.reversed().reversed(), pq);
    }

    #[test]
    fn circle_windings() {
        let circle = circle_loop(c(0.0, 0.0), 1.0, 0.0).unwrap();
        assert!((circle.start() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(circle.is_closed());
        assert_eq!(circle.winding_number(c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(circle.winding_number(c(0.3, -0.2)).unwrap(), 1);
        assert_eq!(circle.winding_number(c(3.0, 0.0)).unwrap(), 0);
        assert_eq!(circle.reversed().winding_number(c(0.0, 0.0)).unwrap(), -1);
        assert!(circle_loop(c(0.0, 0.0), 0.0, 0.0).is_err());
        assert!(circle.winding_number(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn keyhole_layout() {
        let spec = KeyholeSpec::new(c(1.0, 0.0), c(0.0, 0.0), 0.1).unwrap();
        let k = keyhole_loop(&spec);
        assert_eq!(k.segments().len(), 3);
        assert!(k.is_closed());
        assert_eq!(k.winding_number(c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(k.winding_number(c(0.0, 0.5)).unwrap(), 0);
        assert_eq!(k.winding_number(c(-2.0, 0.0)).unwrap(), 0);
        assert!(KeyholeSpec::new(c(1.0, 0.0), c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn composed_keyholes_wind_additively() {
        let p = c(0.0, -1.0);
        let k1 = keyhole_loop(&KeyholeSpec::new(p, c(-1.0, 0.5), 0.05).unwrap());
        let k2 = keyhole_loop(&KeyholeSpec::new(p, c(1.0, 0.5), 0.05).unwrap());
        let both = k1.compose(&k2).unwrap();
        for z in [c(-1.0, 0.5), c(1.0, 0.5), c(0.0, 3.0)] {
            assert_eq!(
                both.winding_number(z).unwrap(),
                k1.winding_number(z).unwrap() + k2.winding_number(z).unwrap()
            );
        }
        assert_eq!(both.reversed().winding_number(c(1.0, 0.5)).unwrap(), -1);
    }

    #[test]
    fn distances() {
        let seg = PathSegment::line(c(0.0, 0.0), c(2.0, 0.0));
        assert!((seg.distance_to(c(1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((seg.distance_to(c(3.0, 0.0)) - 1.0).abs() < 1e-15);
        let arc = PathSegment::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start_angle: 0.0,
            end_angle: PI / 2.0,
        };
        assert!((arc.distance_to(c(0.0, 2.0)) - 1.0).abs() < 1e-12);
        assert!((arc.distance_to(c(0.0, -2.0)) - 5f64.sqrt()).abs() < 1e-12);
        let bez = PathSegment::Bezier {
            p0: c(0.0, 0.0),
            p1: c(1.0, 0.0),
            p2: c(2.0, 0.0),
            p3: c(3.0, 0.0),
        };
        assert!((bez.distance_to(c(1.5, 0.5)) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let segs = [
            PathSegment::line(c(0.0, 0.0), c(1.0, 2.0)),
            PathSegment::Arc {
                center: c(1.0, 1.0),
                radius: 0.5,
                start_angle: 0.3,
                end_angle: 2.0,
            },
            PathSegment::Bezier {
                p0: c(0.0, 0.0),
                p1: c(1.0, 1.0),
                p2: c(2.0, -1.0),
                p3: c(3.0, 0.5),
            },
        ];
        for s in &segs {
            for t in [0.1, 0.5, 0.9] {
                let h = 1e-6;
                let fd = (s.point(t + h) - s.point(t - h)) / (2.0 * h);
                assert!((fd - s.derivative(t)).norm() < 1e-7);
            }
        }
    }
}
