//! Measurable test sets `U` in the base and their clipped volumes `Vol(U ∩ Ω)`.

use serde::{Deserialize, Serialize};

use super::cubature::{integrate_over, Clip, SolidBall};
use super::planar::{clip_polygon, polygon_area, polygon_disk_area, Convex2};
use crate::base::{BaseDomain, Shape};
use crate::error::{domain, Error, Result};
use crate::special::{integrate, regularized_incomplete_beta, unit_ball_volume, Endpoints, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(domain("box corners must have equal, nonzero dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(domain("box needs lo < hi in every coordinate"));
        }
        Ok(Region::Box { lo, hi })
    }

    pub fn new_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(domain("ball centre must be a finite point"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Region::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b),
            Region::Ball { center, radius } => crate::base::dist(x, center) <= *radius,
        }
    }

    fn check_dim(&self, base: &BaseDomain) -> Result<()> {
        if self.dim() != base.dim() {
            return Err(domain(format!("region has dimension {}, base has {}", self.dim(), base.dim())));
        }
        Ok(())
    }

    /// `Vol(U ∩ Ω)`, computed independently of the surface cubature: exactly
    /// where closed forms exist (intervals, ball-ball caps, planar clipping),
    /// otherwise by slicing down to an exact planar area.
    pub fn clipped_volume(&self, base: &BaseDomain, spec: &QuadratureSpec) -> Result<f64> {
        self.check_dim(base)?;
        match (base.shape(), self) {
            (Shape::Ball { center, radius }, Region::Ball { center: c2, radius: r2 }) => {
                Ok(ball_ball_volume(center.len(), crate::base::dist(center, c2), *radius, *r2))
            }
            (Shape::Ball { center, radius }, Region::Box { lo, hi }) => ball_box_volume(center, *radius, lo, hi, spec),
            (Shape::Polygon { vertices }, Region::Box { lo, hi }) => {
                let rect = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
                Ok(polygon_area(&clip_polygon(vertices, &rect)).max(0.0))
            }
            (Shape::Polygon { vertices }, Region::Ball { center, radius }) => {
                Ok(polygon_disk_area(vertices, [center[0], center[1]], *radius).max(0.0))
            }
            (Shape::Ellipse { center, semi_axes }, Region::Box { lo, hi }) => {
                // the axis-aligned affine map taking the ellipse to the unit disk keeps boxes boxes
                let s = |v: f64, i: usize| (v - center[i]) / semi_axes[i];
                let rect = [
                    [s(lo[0], 0), s(lo[1], 1)],
                    [s(hi[0], 0), s(lo[1], 1)],
                    [s(hi[0], 0), s(hi[1], 1)],
                    [s(lo[0], 0), s(hi[1], 1)],
                ];
                Ok(semi_axes[0] * semi_axes[1] * polygon_disk_area(&rect, [0.0, 0.0], 1.0).max(0.0))
            }
            (Shape::Ellipse { .. }, Region::Ball { .. }) => {
                let one = |_: &[f64]| Ok(1.0);
                Ok(integrate_over(&clip_for(base, Some(self))?, &one, spec)?.value)
            }
        }
    }
}

/// Volume of a spherical cap of height `h` on a `d`-ball of radius `r`.
fn cap_volume(d: usize, r: f64, h: f64) -> f64 {
    let full = unit_ball_volume(d) * r.powi(d as i32);
    if h <= 0.0 {
        return 0.0;
    }
    if h >= 2.0 * r {
        return full;
    }
    if h > r {
        return full - cap_volume(d, r, 2.0 * r - h);
    }
    let z = ((2.0 * r * h - h * h) / (r * r)).clamp(0.0, 1.0);
    0.5 * full * regularized_incomplete_beta(z, (d as f64 + 1.0) / 2.0, 0.5).expect("valid beta arguments")
}

/// Volume of the intersection of two `d`-balls at centre distance `dist`.
pub(crate) fn ball_ball_volume(d: usize, dist: f64, r1: f64, r2: f64) -> f64 {
    if dist >= r1 + r2 {
        return 0.0;
    }
    if dist <= (r1 - r2).abs() {
        return unit_ball_volume(d) * r1.min(r2).powi(d as i32);
    }
    // the radical hyperplane sits at x1 from the first centre
    let x1 = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
    cap_volume(d, r1, r1 - x1) + cap_volume(d, r2, r2 - (dist - x1))
}

/// `Vol(B(c, r) ∩ box)` in any dimension.
pub(crate) fn ball_box_volume(c: &[f64], r: f64, lo: &[f64], hi: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    match c.len() {
        1 => Ok((hi[0].min(c[0] + r) - lo[0].max(c[0] - r)).max(0.0)),
        2 => {
            let rect = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
            Ok(polygon_disk_area(&rect, [c[0], c[1]], r).max(0.0))
        }
        _ => {
            let (a, b) = (lo[0].max(c[0] - r), hi[0].min(c[0] + r));
            if !(b > a) {
                return Ok(0.0);
            }
            let failure = std::cell::RefCell::new(None);
            let slice = |t: f64| {
                let rho = (r * r - (t - c[0]).powi(2)).max(0.0).sqrt();
                match ball_box_volume(&c[1..], rho, &lo[1..], &hi[1..], spec) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            let r = integrate(slice, a, b, spec, Endpoints::BOTH);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            match r {
                Ok(e) => Ok(e.value),
                // kinks where the slice sphere passes box edges limit attainable accuracy
                Err(Error::Quadrature { estimate, error }) if error <= 1e-9 * estimate.abs() => Ok(estimate),
                Err(e) => Err(e),
            }
        }
    }
}

fn base_convex2(shape: &Shape) -> Convex2 {
    match shape {
        Shape::Ball { center, radius } => Convex2::Disk { c: [center[0], center[1]], r: *radius },
        Shape::Ellipse { center, semi_axes } => Convex2::Ellipse { c: *center, ax: semi_axes[0], ay: semi_axes[1] },
        Shape::Polygon { vertices } => Convex2::Polygon(vertices.clone()),
    }
}

/// Integration domain `U ∩ Ω` (or `Ω` when no region is given).
pub(crate) fn clip_for(base: &BaseDomain, region: Option<&Region>) -> Result<Clip> {
    if let Some(u) = region {
        u.check_dim(base)?;
    }
    let dim = base.dim();
    Ok(match dim {
        1 => {
            let Shape::Ball { center, radius } = base.shape() else { unreachable!("1-d bases are intervals") };
            let (mut lo, mut hi) = (center[0] - radius, center[0] + radius);
            match region {
                Some(Region::Box { lo: a, hi: b }) => {
                    lo = lo.max(a[0]);
                    hi = hi.min(b[0]);
                }
                Some(Region::Ball { center, radius }) => {
                    lo = lo.max(center[0] - radius);
                    hi = hi.min(center[0] + radius);
                }
                None => {}
            }
            if hi > lo {
                Clip::Interval(lo, hi)
            } else {
                Clip::Empty
            }
        }
        2 => {
            let mut sets = vec![base_convex2(base.shape())];
            match region {
                Some(Region::Box { lo, hi }) => sets.push(Convex2::rect([lo[0], lo[1]], [hi[0], hi[1]])),
                Some(Region::Ball { center, radius }) => {
                    sets.push(Convex2::Disk { c: [center[0], center[1]], r: *radius })
                }
                None => {}
            }
            Clip::Planar(sets)
        }
        _ => {
            let Shape::Ball { center, radius } = base.shape() else {
                return Err(Error::Unsupported("bases of dimension ≥ 3 must be balls".into()));
            };
            let mut balls = vec![SolidBall { center: center.clone(), radius: *radius }];
            let mut bbox = None;
            match region {
                Some(Region::Box { lo, hi }) => bbox = Some((lo.clone(), hi.clone())),
                Some(Region::Ball { center, radius }) => {
                    balls.push(SolidBall { center: center.clone(), radius: *radius })
                }
                None => {}
            }
            Clip::Solid { dim, balls, bbox }
        }
    })
}
